//! The `sqrtp` command line: field invariants, order inventories, Eichler class
//! numbers and batch sweeps.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, Rational};
use crate::cmfield::{self, CmTag};
use crate::error::{Error, Result};
use crate::oracle;
use crate::orders::{self, OrderInvariant, Over};
use crate::quaternion::{self, ClassNumberReport, EichlerContext, EichlerInput};
use crate::realquad::{self, PrimeIdealF, RealQuadField, SplitKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NON_INTEGRAL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

pub const SWEEP_MAX: u64 = 100_000;
pub const CSV_HEADER: &str = "p,d_F,eps_a,eps_b,norm_eps,varpi,h_F,zeta_m1,h_K1,h_K2,h_K3,h_O_unramified";

#[derive(Parser, Debug)]
#[command(name = "sqrtp", version, about = "Class numbers over Q(sqrt p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fundamental unit, class number and zeta(-1) of Q(sqrt p).
    Field {
        p: u64,
        #[arg(long)]
        json: bool,
    },
    /// Quadratic orders with extra units in the CM fields over Q(sqrt p).
    Orders {
        p: u64,
        #[arg(long, value_enum, default_value = "of")]
        over: OverArg,
        #[arg(long)]
        json: bool,
    },
    /// Class number of an Eichler order with discriminant D and level N.
    ///
    /// Each item of --disc and --level is a rational prime `l`, standing for every
    /// prime of Q(sqrt p) above it, or `l:r` for the split prime above `l` with root `r`.
    Classnum {
        p: u64,
        #[arg(long, value_delimiter = ',')]
        disc: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        level: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// CSV table of invariants for all primes up to --pmax.
    Sweep {
        #[arg(long)]
        pmax: u64,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OverArg {
    #[value(name = "OF", alias = "of")]
    Of,
    #[value(name = "A", alias = "a")]
    A,
}

/// Machine-readable `field` output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldReport {
    pub p: u64,
    pub d_f: u64,
    /// `eps = eps_a + eps_b sqrt p`
    pub eps_a: Rational,
    pub eps_b: Rational,
    pub norm_eps: i8,
    pub varpi: Option<u8>,
    pub h_f: u64,
    pub zeta_m1: Rational,
}

impl FieldReport {
    pub fn new(field: &RealQuadField) -> Self {
        let (x, y) = field.eps.half_coords();
        FieldReport {
            p: field.p,
            d_f: field.d_f,
            eps_a: Rational::new(x, 2),
            eps_b: Rational::new(y, 2),
            norm_eps: field.norm_eps,
            varpi: field.varpi,
            h_f: field.h_f,
            zeta_m1: field.zeta_m1.clone(),
        }
    }
}

/// One row of `orders` output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRow {
    pub label: orders::OrderLabel,
    pub field: CmTag,
    pub field_name: String,
    pub over: Over,
    pub index: u64,
    pub w: u32,
    pub h: u64,
    pub conductor_support: Vec<PrimeIdealF>,
}

/// Run the CLI on `args` (including the program name), writing results to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match cli.command {
        Command::Field { p, json } => cmd_field(p, json, out),
        Command::Orders { p, over, json } => cmd_orders(p, over, json, out),
        Command::Classnum { p, disc, level, json } => cmd_classnum(p, &disc, &level, json, out),
        Command::Sweep { pmax, verify } => cmd_sweep(pmax, verify, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(CliError::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// The exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonIntegral(_) => EXIT_NON_INTEGRAL,
        Error::Inconsistent(_) | Error::SearchBound(_) => EXIT_VERIFY,
        _ => EXIT_INPUT,
    }
}

enum CliError {
    Io(std::io::Error),
    Lib(Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult = std::result::Result<(), CliError>;

/// Integers print without a denominator in text and CSV output.
fn compact(r: &Rational) -> String {
    match r.to_integer() {
        Some(n) => n.to_string(),
        None => r.to_string(),
    }
}

fn cmd_field(p: u64, json: bool, out: &mut dyn Write) -> CliResult {
    let field = realquad::build_field(p)?;
    let report = FieldReport::new(&field);
    if json {
        writeln!(out, "{}", to_json(&report))?;
        return Ok(());
    }
    writeln!(out, "p = {p}")?;
    writeln!(out, "d_F = {}", report.d_f)?;
    writeln!(out, "eps = {} + {}*sqrt({p})", compact(&report.eps_a), compact(&report.eps_b))?;
    writeln!(out, "N(eps) = {}", report.norm_eps)?;
    if let Some(v) = report.varpi {
        writeln!(out, "varpi = {v}")?;
    }
    writeln!(out, "h(F) = {}", report.h_f)?;
    writeln!(out, "zeta_F(-1) = {}", compact(&report.zeta_m1))?;
    Ok(())
}

/// Rows of the `orders` table.
pub fn order_rows(p: u64, over: Over) -> Result<Vec<OrderRow>> {
    let field = realquad::build_field(p)?;
    let cms = cmfield::enumerate_cm_fields(&field)?;
    let inv: Vec<OrderInvariant> = orders::inventory(&field, over)?;
    Ok(inv
        .iter()
        .map(|b| OrderRow {
            label: b.label,
            field: b.field,
            field_name: cms.iter().find(|k| k.tag == b.field).map(|k| k.name()).unwrap_or_default(),
            over: b.over,
            index: b.index_in_ok,
            w: b.w_b,
            h: b.h_b,
            conductor_support: b.conductor_support.clone(),
        })
        .collect())
}

fn cmd_orders(p: u64, over: OverArg, json: bool, out: &mut dyn Write) -> CliResult {
    let over = match over {
        OverArg::Of => Over::OF,
        OverArg::A => Over::A,
    };
    let rows = order_rows(p, over)?;
    if json {
        writeln!(out, "{}", to_json(&rows))?;
        return Ok(());
    }
    writeln!(out, "{:<13} {:<5} {:<22} {:>5} {:>3} {:>6}  conductor", "order", "K", "field", "index", "w", "h")?;
    for r in &rows {
        let support = if r.conductor_support.is_empty() {
            "-".to_string()
        } else {
            r.conductor_support.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
        };
        writeln!(
            out,
            "{:<13} {:<5} {:<22} {:>5} {:>3} {:>6}  {}",
            r.label.to_string(),
            r.field.to_string(),
            r.field_name,
            r.index,
            r.w,
            r.h,
            support
        )?;
    }
    Ok(())
}

/// Resolve `l` or `l:r` to primes of `F`.
pub fn parse_primes(field: &RealQuadField, items: &[String]) -> Result<Vec<PrimeIdealF>> {
    let mut out = Vec::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let bad = || Error::InvalidInput(format!("bad prime item {item:?}"));
        let (ell, root) = match item.split_once(':') {
            Some((l, r)) => (l.trim().parse::<u64>().map_err(|_| bad())?, Some(r.trim().parse::<u64>().map_err(|_| bad())?)),
            None => (item.parse::<u64>().map_err(|_| bad())?, None),
        };
        if !arith::is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        let above = realquad::factor_rational_prime(field, ell)?;
        match root {
            None => out.extend(above),
            Some(r) => {
                let q = above
                    .into_iter()
                    .find(|q| q.kind == SplitKind::Split && q.root == Some(r))
                    .ok_or_else(|| Error::InvalidInput(format!("no split prime above {ell} with root {r} in Q(sqrt {})", field.p)))?;
                out.push(q);
            }
        }
    }
    Ok(out)
}

/// The report for `classnum`.
pub fn classnum_report(p: u64, disc: &[String], level: &[String]) -> Result<ClassNumberReport> {
    let field = realquad::build_field(p)?;
    let d = parse_primes(&field, disc)?;
    let n = parse_primes(&field, level)?;
    let input = EichlerInput::new(&field, d, n)?;
    let ctx = EichlerContext::from_field(field)?;
    quaternion::class_number_eichler(&ctx, &input)
}

fn cmd_classnum(p: u64, disc: &[String], level: &[String], json: bool, out: &mut dyn Write) -> CliResult {
    let report = classnum_report(p, disc, level)?;
    if json {
        writeln!(out, "{}", to_json(&report))?;
        return Ok(());
    }
    let list = |v: &[PrimeIdealF]| {
        if v.is_empty() {
            "(1)".to_string()
        } else {
            v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ")
        }
    };
    writeln!(out, "p = {p}")?;
    writeln!(out, "D = {}", list(&report.disc))?;
    writeln!(out, "N = {}", list(&report.level))?;
    writeln!(out, "mass = {}", compact(&report.mass))?;
    writeln!(out, "{:<13} {:<6} {:>6} {:>3} {:>4}  term", "order", "K", "h", "w", "E")?;
    for c in &report.contributions {
        writeln!(
            out,
            "{:<13} {:<6} {:>6} {:>3} {:>4}  {}",
            c.label.to_string(),
            c.field.to_string(),
            c.h_b,
            c.w_b,
            c.embedding_product,
            compact(&c.term)
        )?;
    }
    writeln!(out, "elliptic = {}", compact(&report.elliptic))?;
    writeln!(out, "h(O) = {}", report.h_o)?;
    Ok(())
}

/// One CSV row of the sweep, optionally after running every oracle check for `p`.
pub fn sweep_row(p: u64, verify: bool) -> Result<String> {
    if verify {
        oracle::verify_prime(p)?;
    }
    let ctx = EichlerContext::new(p)?;
    let f = FieldReport::new(&ctx.field);
    let h = |tag: CmTag| ctx.cm_field(tag).map(|k| k.h_k.to_string()).unwrap_or_default();
    let h_o = quaternion::class_number_eichler(&ctx, &EichlerInput::maximal())?.h_o;
    Ok(format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        p,
        f.d_f,
        compact(&f.eps_a),
        compact(&f.eps_b),
        f.norm_eps,
        f.varpi.map(|v| v.to_string()).unwrap_or_default(),
        f.h_f,
        compact(&f.zeta_m1),
        h(CmTag::K1),
        h(CmTag::K2),
        h(CmTag::K3),
        h_o
    ))
}

fn cmd_sweep(pmax: u64, verify: bool, out: &mut dyn Write) -> CliResult {
    if pmax > SWEEP_MAX {
        return Err(Error::InvalidInput(format!("--pmax must be at most {SWEEP_MAX}")).into());
    }
    writeln!(out, "{CSV_HEADER}")?;
    let primes = arith::primes_up_to(pmax);
    for chunk in primes.chunks(64) {
        let rows: Vec<Result<String>> = chunk.par_iter().map(|&p| sweep_row(p, verify)).collect();
        for row in rows {
            match row {
                Ok(line) => writeln!(out, "{line}")?,
                Err(e) if verify => return Err(Error::Inconsistent(e.to_string()).into()),
                Err(e) => return Err(e.into()),
            }
        }
        out.flush()?;
    }
    Ok(())
}

/// Canonical JSON: pretty-printed, fields in declaration order.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}
