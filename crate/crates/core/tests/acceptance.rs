//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! output is exactly one PASS/FAIL line per criterion.

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;

use sqrtp::arith::{self, Rational};
use sqrtp::cmfield::{self, CmTag};
use sqrtp::imagquad;
use sqrtp::oracle;
use sqrtp::orders::{self, OrderLabel, Over};
use sqrtp::quaternion::{self, EichlerContext, EichlerInput};
use sqrtp::realquad::{self, PrimeIdealF};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn norm_law() -> Outcome {
    let primes = arith::primes_up_to(999);
    for &p in &primes {
        let f = realquad::build_field(p).map_err(err)?;
        oracle::certify_fundamental(&f.eps).map_err(err)?;
        check(f.eps.norm().magnitude() == &1u8.into(), || format!("p={p}: eps is not a unit"))?;
        let expect = if p == 2 || p % 4 == 1 { -1 } else { 1 };
        check(f.norm_eps == expect, || format!("p={p}: N(eps) = {}", f.norm_eps))?;
    }
    Ok(format!("{} primes", primes.len()))
}

fn varpi_table() -> Outcome {
    let listed = [37u64, 101, 197, 269, 349, 373, 389, 557, 677, 701, 709, 757, 829, 877, 997];
    let mut n = 0;
    for p in arith::primes_up_to(999).into_iter().filter(|p| p % 4 == 1) {
        let f = realquad::build_field(p).map_err(err)?;
        let v = realquad::varpi(&f).map_err(err)?;
        let expect = if p % 8 == 1 || listed.contains(&p) { 1 } else { 3 };
        check(v == expect, || format!("p={p}: varpi = {v}"))?;
        check(f.varpi == Some(v), || format!("p={p}: descriptor varpi {:?}", f.varpi))?;
        n += 1;
    }
    Ok(format!("{n} primes"))
}

fn expected_rows(p: u64) -> Vec<(CmTag, u32)> {
    use CmTag::*;
    match p {
        2 => vec![(K1, 4), (K3, 3)],
        3 => vec![(K1, 12), (K2, 2)],
        5 => vec![(K1, 2), (K3, 3), (Zeta10, 5)],
        _ if p % 4 == 1 => vec![(K1, 2), (K3, 3)],
        _ => vec![(K1, 4), (K2, 2), (K3, 3)],
    }
}

fn sample(class: u64) -> Vec<u64> {
    let all: Vec<u64> = arith::primes_up_to(499).into_iter().filter(|p| *p > 5 && p % 4 == class).collect();
    let step = all.len() as f64 / 20.0;
    (0..20).map(|i| all[(i as f64 * step) as usize]).collect()
}

fn cm_table() -> Outcome {
    let mut primes = vec![2, 3, 5];
    primes.extend(sample(1));
    primes.extend(sample(3));
    for &p in &primes {
        let f = realquad::build_field(p).map_err(err)?;
        let cms = cmfield::enumerate_cm_fields(&f).map_err(err)?;
        let rows: Vec<(CmTag, u32)> = cms.iter().map(|k| (k.tag, k.w_k)).collect();
        check(rows == expected_rows(p), || format!("p={p}: rows {rows:?}"))?;
        for k in &cms {
            let mu = oracle::roots_of_unity(k);
            check(mu.len() as u32 * k.q_kf as u32 == 2 * k.w_k, || {
                format!("p={p} {}: |mu| = {}, Q = {}", k.name(), mu.len(), k.q_kf)
            })?;
            oracle::verify_hasse_index(&f, k, &mu).map_err(err)?;
        }
    }
    Ok(format!("{} primes", primes.len()))
}

fn small_class_numbers() -> Outcome {
    let cases = [(2u64, CmTag::K3, 1u64), (5, CmTag::K1, 1), (5, CmTag::K3, 1), (3, CmTag::K2, 2)];
    for (p, tag, h) in cases {
        let f = realquad::build_field(p).map_err(err)?;
        let h_f = oracle::analytic_class_number_real(&f).map_err(err)?;
        let k = cmfield::enumerate_cm_fields(&f)
            .map_err(err)?
            .into_iter()
            .find(|k| k.tag == tag)
            .ok_or_else(|| format!("p={p}: no {tag}"))?;
        let got = cmfield::class_number_cm(&k, h_f, imagquad::class_number_imag).map_err(err)?;
        check(got == h && k.h_k == h, || format!("h({}) = {got}, descriptor {}", k.name(), k.h_k))?;
    }
    Ok("4 fields".into())
}

fn unit_count_mod_two() -> Outcome {
    let primes: Vec<u64> = arith::primes_up_to(199).into_iter().filter(|&p| p > 2).collect();
    for &p in &primes {
        let f = realquad::build_field(p).map_err(err)?;
        let k = cmfield::enumerate_cm_fields(&f).map_err(err)?.remove(0);
        check(k.tag == CmTag::K1, || format!("p={p}: first field is {}", k.tag))?;
        let ring = oracle::residue_ring_mod2(&k);
        check(ring.size() == 16, || format!("p={p}: |O_K/2O_K| = {}", ring.size()))?;
        let units = ring.unit_count() as i64;
        let expect = 4 * (2 - arith::kronecker(2, p as i64).map_err(err)? as i64);
        check(units == expect, || format!("p={p}: {units} units, expected {expect}"))?;
    }
    Ok(format!("{} primes", primes.len()))
}

fn order_class_numbers() -> Outcome {
    let results: Vec<Result<usize, String>> = arith::primes_up_to(199)
        .par_iter()
        .map(|&p| {
            let f = realquad::build_field(p).map_err(err)?;
            let cms = cmfield::enumerate_cm_fields(&f).map_err(err)?;
            let mut inv = orders::inventory(&f, Over::OF).map_err(err)?;
            if p % 4 == 1 {
                inv.extend(orders::inventory(&f, Over::A).map_err(err)?);
            }
            let mut n = 0;
            for b in inv.iter().filter(|b| b.label != OrderLabel::MaximalOrder) {
                let k = cms.iter().find(|k| k.tag == b.field).ok_or("missing field")?;
                let h = oracle::order_h_via_unit_indices(&f, k, b).map_err(err)?;
                check(h == b.h_b, || format!("p={p} {}: oracle {h}, closed form {}", b.label, b.h_b))?;
                let w = oracle::unit_index_of_order(&f, k, b).map_err(err)?;
                check(w == b.w_b, || format!("p={p} {}: oracle w {w}, closed form {}", b.label, b.w_b))?;
                check(oracle::conductor_divides(k, b), || format!("p={p} {}: conductor", b.label))?;
                n += 1;
            }
            Ok(n)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r?;
    }
    Ok(format!("{total} orders"))
}

fn eichler_examples() -> Outcome {
    let cases: [(u64, &[u64], u64); 4] = [(5, &[], 1), (2, &[], 1), (13, &[], 1), (5, &[2, 3], 2)];
    for (p, disc, h) in cases {
        let ctx = EichlerContext::new(p).map_err(err)?;
        let d: Vec<PrimeIdealF> = disc
            .iter()
            .flat_map(|&l| realquad::factor_rational_prime(&ctx.field, l).unwrap())
            .collect();
        let input = EichlerInput::new(&ctx.field, d, vec![]).map_err(err)?;
        let r = quaternion::class_number_eichler(&ctx, &input).map_err(err)?;
        check(r.h_o == h, || format!("p={p} D={disc:?}: h = {}", r.h_o))?;
    }
    Ok("4 orders".into())
}

const FAMILY: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn family_sweep(f: impl Fn(&EichlerContext, &EichlerInput) -> Result<(), String> + Sync) -> Result<usize, String> {
    let counts: Vec<Result<usize, String>> = arith::primes_up_to(199)
        .par_iter()
        .map(|&p| {
            let ctx = EichlerContext::new(p).map_err(err)?;
            let inputs = quaternion::input_family(&ctx.field, &FAMILY, 2).map_err(err)?;
            for input in &inputs {
                f(&ctx, input)?;
            }
            Ok(inputs.len())
        })
        .collect();
    counts.into_iter().sum()
}

fn integrality() -> Outcome {
    let n = family_sweep(|ctx, input| {
        let total = quaternion::mass(&ctx.field, input) + quaternion::elliptic_part(ctx, input).map_err(err)?;
        check(total.is_integer() && total.is_positive(), || {
            format!("p={} D={:?} N={:?}: {total}", ctx.p(), input.disc, input.level)
        })
    })?;
    Ok(format!("{n} inputs"))
}

fn closed_forms() -> Outcome {
    let n = family_sweep(|ctx, input| {
        if ctx.p() <= 5 {
            return Ok(());
        }
        let generic: Rational = quaternion::mass(&ctx.field, input) + quaternion::elliptic_part(ctx, input).map_err(err)?;
        let closed = quaternion::closed_form(ctx, input).map_err(err)?;
        check(generic == closed, || {
            format!("p={} D={:?} N={:?}: {generic} vs {closed}", ctx.p(), input.disc, input.level)
        })
    })?;
    Ok(format!("{n} inputs"))
}

fn dyadic_artin() -> Outcome {
    let mut n = 0;
    for p in arith::primes_up_to(99) {
        let f = realquad::build_field(p).map_err(err)?;
        for k in cmfield::enumerate_cm_fields(&f).map_err(err)? {
            for prime in realquad::factor_rational_prime(&f, 2).map_err(err)? {
                let structural = quaternion::artin_symbol(&k, &prime).map_err(err)?;
                let direct = oracle::dyadic_artin_via_ideals(&k, &prime).map_err(err)?;
                check(structural == direct, || format!("p={p} {} at {prime}: {structural} vs {direct}", k.name()))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} symbols"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("fundamental unit norm law, p < 1000", norm_law),
        ("varpi table, p = 1 mod 4, p < 1000", varpi_table),
        ("CM fields with w_K > 1 and their w_K", cm_table),
        ("small class numbers via Herglotz", small_class_numbers),
        ("|(O_K1/2O_K1)^x| = 4(2 - (2/p)), odd p < 200", unit_count_mod_two),
        ("order class numbers against unit-index oracle, p < 200", order_class_numbers),
        ("Eichler class numbers at desk scale", eichler_examples),
        ("integrality of mass + elliptic, p < 200", integrality),
        ("closed forms against generic assembly, 5 < p < 200", closed_forms),
        ("dyadic Artin symbols against factorization of 2, p < 100", dyadic_artin),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2}. {name} ({detail}, {secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
