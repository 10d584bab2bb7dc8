//! Eichler's class number formula `h(O) = Mass(O) + Ell(O)` for Eichler orders of
//! square-free level in totally definite quaternion algebras over `Q(sqrt p)`.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{self, Rational};
use crate::cmfield::{self, CmFieldDescriptor, CmTag};
use crate::error::{inconsistent, Error, Result};
use crate::finite_ring;
use crate::orders::{self, OrderInvariant, OrderLabel, Over};
use crate::realquad::{self, PrimeIdealF, RealQuadField, SplitKind};

/// Discriminant `D` and level `N` of an Eichler order, as sets of primes of `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EichlerInput {
    pub disc: Vec<PrimeIdealF>,
    pub level: Vec<PrimeIdealF>,
}

impl EichlerInput {
    pub fn new(field: &RealQuadField, mut disc: Vec<PrimeIdealF>, mut level: Vec<PrimeIdealF>) -> Result<Self> {
        for prime in disc.iter().chain(&level) {
            let above = realquad::factor_rational_prime(field, prime.ell)?;
            if !above.contains(prime) {
                return Err(Error::InvalidInput(format!("{prime} is not a prime of Q(sqrt {})", field.p)));
            }
        }
        disc.sort();
        level.sort();
        if disc.windows(2).any(|w| w[0] == w[1]) || level.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("discriminant and level must be square-free".into()));
        }
        if disc.iter().any(|q| level.contains(q)) {
            return Err(Error::InvalidInput("discriminant and level must be coprime".into()));
        }
        if disc.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "a totally definite algebra over a real quadratic field ramifies at an even number of finite primes, got {}",
                disc.len()
            )));
        }
        Ok(EichlerInput { disc, level })
    }

    pub fn maximal() -> Self {
        EichlerInput { disc: Vec::new(), level: Vec::new() }
    }
}

/// Everything about `F` needed to evaluate the formula for many inputs.
#[derive(Clone, Debug)]
pub struct EichlerContext {
    pub field: RealQuadField,
    pub cm_fields: Vec<CmFieldDescriptor>,
    pub inventory: Vec<OrderInvariant>,
    dyadic: HashMap<(CmTag, PrimeIdealF), i8>,
}

impl EichlerContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::from_field(realquad::build_field(p)?)
    }

    pub fn from_field(field: RealQuadField) -> Result<Self> {
        let cm_fields = cmfield::enumerate_cm_fields(&field)?;
        let inventory = orders::enumerate_suborders_of(&field, &cm_fields)?;
        let mut dyadic = HashMap::new();
        for k in &cm_fields {
            for prime in realquad::factor_rational_prime(&field, 2)? {
                dyadic.insert((k.tag, prime), dyadic_artin_symbol(k, &prime)?);
            }
        }
        Ok(EichlerContext { field, cm_fields, inventory, dyadic })
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn cm_field(&self, tag: CmTag) -> Option<&CmFieldDescriptor> {
        self.cm_fields.iter().find(|k| k.tag == tag)
    }

    pub fn artin(&self, tag: CmTag, prime: &PrimeIdealF) -> Result<i8> {
        if let Some(&s) = self.dyadic.get(&(tag, *prime)) {
            return Ok(s);
        }
        let k = self.cm_field(tag).ok_or_else(|| inconsistent(format!("no field {tag}")))?;
        artin_symbol(k, prime)
    }

    pub fn eichler(&self, b: &OrderInvariant, prime: &PrimeIdealF) -> Result<i8> {
        if b.over != Over::OF {
            return Err(Error::InvalidInput(format!("Eichler symbols are defined here only for O_F-orders, not {}", b.label)));
        }
        if b.conductor_support.contains(prime) {
            return Ok(1);
        }
        self.artin(b.field, prime)
    }
}

/// `(K/P)`: +1 split, -1 inert, 0 ramified.
pub fn artin_symbol(k: &CmFieldDescriptor, prime: &PrimeIdealF) -> Result<i8> {
    if prime.is_dyadic() {
        dyadic_artin_symbol(k, prime)
    } else {
        Ok(realquad::odd_quadratic_character(prime, &k.delta))
    }
}

/// The Artin symbol at a dyadic prime from the local factors of `O_K / 2 O_K`.
fn dyadic_artin_symbol(k: &CmFieldDescriptor, prime: &PrimeIdealF) -> Result<i8> {
    let ring = k.residue_ring(2);
    let ar = k.arith();
    let g = ar.from_quad(&prime.generator(k.p));
    let g = ring.reduce(&k.ok().int_coords(&g).ok_or_else(|| inconsistent("O_F is not inside O_K"))?);
    let above: Vec<_> = finite_ring::local_factors(&ring)
        .into_iter()
        .filter(|f| ring.is_nilpotent(ring.mul(f.idempotent, g)))
        .collect();
    let e_p = if prime.kind == SplitKind::Ramified { 2 } else { 1 };
    match above.as_slice() {
        [_, _] => Ok(1),
        [f] => match (f.dimension / f.residue_degree) / e_p {
            2 => Ok(0),
            1 => Ok(-1),
            _ => Err(inconsistent(format!("bad local factor above {prime} in {}", k.name()))),
        },
        _ => Err(inconsistent(format!("{} local factors above {prime} in {}", above.len(), k.name()))),
    }
}

/// `prod_{P | D} (1 - s(P)) prod_{P | N} (1 + s(P))`
pub fn embedding_product(input: &EichlerInput, symbol: impl Fn(&PrimeIdealF) -> Result<i8>) -> Result<u64> {
    let mut e = 1i64;
    for prime in &input.disc {
        e *= 1 - symbol(prime)? as i64;
    }
    for prime in &input.level {
        e *= 1 + symbol(prime)? as i64;
    }
    Ok(e as u64)
}

pub fn mass(field: &RealQuadField, input: &EichlerInput) -> Rational {
    let disc: u64 = input.disc.iter().map(|q| q.norm - 1).product();
    let level: u64 = input.level.iter().map(|q| q.norm + 1).product();
    Rational::new(1, 2) * field.zeta_m1.clone() * Rational::from_integer(field.h_f * disc * level)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub label: OrderLabel,
    pub field: CmTag,
    pub h_b: u64,
    pub w_b: u32,
    pub embedding_product: u64,
    pub term: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNumberReport {
    pub p: u64,
    pub disc: Vec<PrimeIdealF>,
    pub level: Vec<PrimeIdealF>,
    pub mass: Rational,
    pub contributions: Vec<Contribution>,
    pub elliptic: Rational,
    pub h_o: u64,
}

/// The per-order terms `(1/2) h(B) (1 - 1/w(B)) E_B` of the elliptic part.
pub fn contributions(ctx: &EichlerContext, input: &EichlerInput) -> Result<Vec<Contribution>> {
    ctx.inventory
        .iter()
        .map(|b| {
            let e = embedding_product(input, |q| ctx.eichler(b, q))?;
            let term = Rational::new(1, 2)
                * Rational::from_integer(b.h_b)
                * (Rational::one() - Rational::new(1, b.w_b))
                * Rational::from_integer(e);
            Ok(Contribution {
                label: b.label,
                field: b.field,
                h_b: b.h_b,
                w_b: b.w_b,
                embedding_product: e,
                term,
            })
        })
        .collect()
}

pub fn elliptic_part(ctx: &EichlerContext, input: &EichlerInput) -> Result<Rational> {
    Ok(contributions(ctx, input)?.into_iter().map(|c| c.term).sum())
}

pub fn class_number_eichler(ctx: &EichlerContext, input: &EichlerInput) -> Result<ClassNumberReport> {
    let mass = mass(&ctx.field, input);
    let contributions = contributions(ctx, input)?;
    let elliptic: Rational = contributions.iter().map(|c| c.term.clone()).sum();
    let total = mass.clone() + elliptic.clone();
    let h_o = total
        .to_integer()
        .filter(|h| h.to_u64().is_some_and(|h| h > 0))
        .and_then(|h| h.to_u64())
        .ok_or_else(|| Error::NonIntegral(total.clone()))?;
    if ctx.p() > 5 {
        let closed = closed_form(ctx, input)?;
        if closed != total {
            return Err(inconsistent(format!(
                "closed form gives {closed}, generic assembly gives {total} for p = {}",
                ctx.p()
            )));
        }
    }
    Ok(ClassNumberReport {
        p: ctx.p(),
        disc: input.disc.clone(),
        level: input.level.clone(),
        mass,
        contributions,
        elliptic,
        h_o,
    })
}

/// `C = 0` if `D` has a dyadic factor, else `2^(number of dyadic factors of N)`.
pub fn dyadic_c_factor(input: &EichlerInput) -> u64 {
    if input.disc.iter().any(|q| q.is_dyadic()) {
        0
    } else {
        1 << input.level.iter().filter(|q| q.is_dyadic()).count()
    }
}

/// The input with its dyadic primes removed.
pub fn odd_part(input: &EichlerInput) -> EichlerInput {
    EichlerInput {
        disc: input.disc.iter().filter(|q| !q.is_dyadic()).copied().collect(),
        level: input.level.iter().filter(|q| !q.is_dyadic()).copied().collect(),
    }
}

/// The closed forms for `p > 5`, written directly in terms of `h(K_j)` and the
/// field embedding products.
pub fn closed_form(ctx: &EichlerContext, input: &EichlerInput) -> Result<Rational> {
    let p = ctx.p();
    if p <= 5 {
        return Err(Error::InvalidInput(format!("no closed form for p = {p}")));
    }
    let m = mass(&ctx.field, input);
    let term = |tag: CmTag, coef: Rational, inp: &EichlerInput| -> Result<Rational> {
        let k = ctx.cm_field(tag).ok_or_else(|| inconsistent(format!("no field {tag}")))?;
        let e = embedding_product(inp, |q| ctx.artin(tag, q))?;
        Ok(coef * Rational::from_integer(k.h_k) * Rational::from_integer(e))
    };
    if p % 4 == 1 {
        Ok(m + term(CmTag::K1, Rational::new(1, 4), input)? + term(CmTag::K3, Rational::new(1, 3), input)?)
    } else {
        let t = 2 - arith::kronecker(2, p as i64)? as i64;
        let c = dyadic_c_factor(input);
        let b = term(CmTag::K1, Rational::new(5 * t * c as i64, 8), &odd_part(input))?;
        Ok(m + b
            + term(CmTag::K1, Rational::new(3, 8), input)?
            + term(CmTag::K2, Rational::new(1, 4), input)?
            + term(CmTag::K3, Rational::new(1, 3), input)?)
    }
}

/// All inputs with `D` and `N` drawn from the primes above `ells`, `D` and `N` disjoint,
/// `|D|` even and at most `max_each` primes in each.
pub fn input_family(field: &RealQuadField, ells: &[u64], max_each: usize) -> Result<Vec<EichlerInput>> {
    let mut primes = Vec::new();
    for &ell in ells {
        primes.extend(realquad::factor_rational_prime(field, ell)?);
    }
    let n = primes.len();
    let subsets: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max_each)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    let mut out = Vec::new();
    for d in subsets.iter().filter(|d| d.len() % 2 == 0) {
        for l in subsets.iter().filter(|l| l.iter().all(|i| !d.contains(i))) {
            let pick = |ix: &[usize]| ix.iter().map(|&i| primes[i]).collect::<Vec<_>>();
            out.push(EichlerInput::new(field, pick(d), pick(l))?);
        }
    }
    Ok(out)
}
