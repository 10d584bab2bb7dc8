//! The real quadratic field `F = Q(sqrt p)` for a prime `p`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Rational};
use crate::error::{inconsistent, Error, Result};
use crate::oracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadBasis {
    /// `a + b sqrt p`
    Sqrt,
    /// `a + b (1 + sqrt p)/2`, only when `p = 1 (mod 4)`
    HalfPlusSqrt,
}

/// An integral element of `Q(sqrt p)` in one of the two standard bases.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    p: u64,
    pub a: BigInt,
    pub b: BigInt,
    pub basis: QuadBasis,
}

impl QuadInt {
    pub fn new(p: u64, a: BigInt, b: BigInt, basis: QuadBasis) -> Result<Self> {
        if basis == QuadBasis::HalfPlusSqrt && p % 4 != 1 {
            return Err(Error::WrongResidue {
                what: "the (1 + sqrt p)/2 basis",
                residue: 1,
                p,
            });
        }
        Ok(QuadInt { p, a, b, basis })
    }

    pub fn from_int(p: u64, n: impl Into<BigInt>) -> Self {
        QuadInt {
            p,
            a: n.into(),
            b: BigInt::zero(),
            basis: natural_basis(p),
        }
    }

    /// The element `(x + y sqrt p)/2` in the integral basis of `O_F`, if it
    /// is integral.
    pub fn from_half(p: u64, x: BigInt, y: BigInt) -> Option<Self> {
        if p % 4 == 1 {
            if (&x - &y).is_odd() {
                return None;
            }
            let a = (&x - &y) / 2;
            Some(QuadInt { p, a, b: y, basis: QuadBasis::HalfPlusSqrt })
        } else {
            if x.is_odd() || y.is_odd() {
                return None;
            }
            Some(QuadInt { p, a: x / 2, b: y / 2, basis: QuadBasis::Sqrt })
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Coordinates `(x, y)` with `2 * self = x + y sqrt p`.
    pub fn half_coords(&self) -> (BigInt, BigInt) {
        match self.basis {
            QuadBasis::Sqrt => (&self.a * 2, &self.b * 2),
            QuadBasis::HalfPlusSqrt => (&self.a * 2 + &self.b, self.b.clone()),
        }
    }

    pub fn norm(&self) -> BigInt {
        let (x, y) = self.half_coords();
        (&x * &x - BigInt::from(self.p) * &y * &y) / 4
    }

    pub fn trace(&self) -> BigInt {
        self.half_coords().0
    }

    pub fn conj(&self) -> Self {
        let (x, y) = self.half_coords();
        Self::from_half(self.p, x, -y).expect("conjugate of an integer is integral")
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (x1, y1) = self.half_coords();
        let (x2, y2) = other.half_coords();
        let p = BigInt::from(self.p);
        let x = (&x1 * &x2 + &p * &y1 * &y2) / 2;
        let y = (&x1 * &y2 + &x2 * &y1) / 2;
        Self::from_half(self.p, x, y).expect("O_F is closed under multiplication")
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::from_int(self.p, 1), |acc, _| acc.mul(self))
    }

    /// Whether the element lies in `Z[sqrt p]`.
    pub fn in_sqrt_order(&self) -> bool {
        let (x, y) = self.half_coords();
        x.is_even() && y.is_even()
    }

    /// The real value under `sqrt p > 0`, for ordering and logs.
    pub fn to_f64(&self) -> f64 {
        let (x, y) = self.half_coords();
        (x.to_f64().unwrap_or(f64::NAN) + y.to_f64().unwrap_or(f64::NAN) * (self.p as f64).sqrt()) / 2.0
    }

    /// Natural log of `|self|`, robust for very large coordinates.
    pub fn ln_abs(&self) -> f64 {
        let (x, y) = self.half_coords();
        let bits = x.bits().max(y.bits());
        let shift = bits.saturating_sub(60);
        let xs = (&x >> shift).to_f64().unwrap_or(0.0);
        let ys = (&y >> shift).to_f64().unwrap_or(0.0);
        let v = (xs + ys * (self.p as f64).sqrt()) / 2.0;
        v.abs().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { "-" } else { "+" };
        match self.basis {
            QuadBasis::Sqrt => write!(f, "{}{}{}*sqrt({})", self.a, sign, self.b.abs(), self.p),
            QuadBasis::HalfPlusSqrt => {
                write!(f, "{}{}{}*(1+sqrt({}))/2", self.a, sign, self.b.abs(), self.p)
            }
        }
    }
}

pub(crate) fn natural_basis(p: u64) -> QuadBasis {
    if p % 4 == 1 {
        QuadBasis::HalfPlusSqrt
    } else {
        QuadBasis::Sqrt
    }
}

/// An element `(x + y sqrt p)/2` of `F` with possibly non-integral value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfQuad {
    pub x: BigInt,
    pub y: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

/// A prime of `O_F` above the rational prime `ell`.
///
/// `root` identifies the prime among those above `ell`: for odd `ell` it is
/// the image of `sqrt p` in `O_F/P = F_ell`; for a split dyadic prime it is the
/// image of `(1 + sqrt p)/2` in `F_2`; for the ramified dyadic prime it is the
/// image of `sqrt p`. Inert primes carry no root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeIdealF {
    pub ell: u64,
    pub kind: SplitKind,
    pub root: Option<u64>,
    pub norm: u64,
}

impl PrimeIdealF {
    pub fn is_dyadic(&self) -> bool {
        self.ell == 2
    }

    /// An element `g` with `P = (ell, g)`.
    pub fn generator(&self, p: u64) -> QuadInt {
        let ell = BigInt::from(self.ell);
        match (self.kind, self.root) {
            (SplitKind::Inert, _) => QuadInt::from_int(p, ell),
            (_, Some(r)) if self.ell == 2 && p % 4 == 1 => {
                // (1 + sqrt p)/2 - r
                QuadInt::new(p, -BigInt::from(r), BigInt::one(), QuadBasis::HalfPlusSqrt)
                    .expect("p = 1 mod 4")
            }
            (_, Some(r)) => {
                // sqrt p - r, in whichever basis O_F uses
                QuadInt::from_half(p, BigInt::from(-2 * r as i64), BigInt::from(2)).expect("integral")
            }
            (_, None) => unreachable!("split and ramified primes carry a root"),
        }
    }
}

impl fmt::Display for PrimeIdealF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            Some(r) if self.kind == SplitKind::Split => write!(f, "P{}:{}", self.ell, r),
            _ => write!(f, "P{}", self.ell),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealQuadField {
    pub p: u64,
    pub d_f: u64,
    /// Fundamental unit, `> 1` under `sqrt p > 0`.
    pub eps: QuadInt,
    pub norm_eps: i8,
    /// `[O_F^x : Z[sqrt p]^x]`, only for `p = 1 (mod 4)`.
    pub varpi: Option<u8>,
    pub h_f: u64,
    pub zeta_m1: Rational,
}

pub fn discriminant(p: u64) -> u64 {
    if p % 4 == 1 {
        p
    } else {
        4 * p
    }
}

pub fn build_field(p: u64) -> Result<RealQuadField> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let d_f = discriminant(p);
    let eps = fundamental_unit(p);
    let norm = eps.norm();
    let norm_eps = if norm.is_one() {
        1
    } else if norm == -BigInt::one() {
        -1
    } else {
        return Err(inconsistent(format!("fundamental unit {eps} has norm {norm}")));
    };
    let varpi = (p % 4 == 1).then(|| if eps.in_sqrt_order() { 1 } else { 3 });
    let mut field = RealQuadField {
        p,
        d_f,
        eps,
        norm_eps,
        varpi,
        h_f: 0,
        zeta_m1: siegel_zeta_minus_one(d_f),
    };
    field.h_f = class_number_real(&field)?;
    Ok(field)
}

/// Product of the complete quotients over one period of the continued
/// fraction of `(d_F mod 2 + sqrt d_F)/2`.
fn fundamental_unit(p: u64) -> QuadInt {
    let disc = discriminant(p) as i128;
    let s = arith::isqrt_u64(disc as u64) as i128;
    let (mut pp, mut qq) = (disc % 2, 2i128);
    let step = |pp: i128, qq: i128| {
        let a = (pp + s).div_euclid(qq);
        let np = a * qq - pp;
        (np, (disc - np * np) / qq)
    };
    (pp, qq) = step(pp, qq);
    let start = (pp, qq);
    // eta = (num_a + num_b sqrt disc) / den
    let mut num_a = BigInt::one();
    let mut num_b = BigInt::zero();
    let mut den = BigInt::one();
    let big_disc = BigInt::from(disc);
    loop {
        let bp = BigInt::from(pp);
        let na = &num_a * &bp + &num_b * &big_disc;
        let nb = &num_a + &num_b * &bp;
        num_a = na;
        num_b = nb;
        den *= qq;
        let g = num_a.gcd(&num_b).gcd(&den);
        num_a /= &g;
        num_b /= &g;
        den /= &g;
        (pp, qq) = step(pp, qq);
        if (pp, qq) == start {
            break;
        }
    }
    // sqrt(disc) = m sqrt p
    let m = if disc == p as i128 { 1 } else { 2 };
    let x = (&num_a * 2) / &den;
    let y = (&num_b * 2 * m) / &den;
    debug_assert!((&x * &den) == &num_a * 2);
    QuadInt::from_half(p, x, y).expect("a unit of O_F is integral")
}

/// `[O_F^x : Z[sqrt p]^x]`; 1 iff the fundamental unit lies in `Z[sqrt p]`.
pub fn varpi(field: &RealQuadField) -> Result<u8> {
    field.varpi.ok_or(Error::WrongResidue {
        what: "varpi",
        residue: 1,
        p: field.p,
    })
}

/// The element `x` of `F` with `x^2 = eps/2` and `x = (1 + sqrt p)/2 mod O_F`,
/// for `p = 3 (mod 4)`.
pub fn sqrt_half_unit(field: &RealQuadField) -> Result<HalfQuad> {
    let p = field.p;
    if p % 4 != 3 {
        return Err(Error::WrongResidue {
            what: "sqrt(eps/2)",
            residue: 3,
            p,
        });
    }
    // (u + v sqrt p)^2 = 2 eps, so u^2 + p v^2 = 2a and u^2 - p v^2 = +-2.
    let a = &field.eps.a;
    let b = &field.eps.b;
    let pb = BigInt::from(p);
    for sign in [1i64, -1] {
        let u2 = a + sign;
        let pv2 = a - sign;
        if !(&pv2 % &pb).is_zero() {
            continue;
        }
        let (Some(u), Some(v)) = (arith::exact_sqrt(&u2), arith::exact_sqrt(&(pv2 / &pb))) else {
            continue;
        };
        let v = if b.is_negative() { -v } else { v };
        let x = HalfQuad { x: u, y: v };
        if check_sqrt_half(field, &x) {
            return Ok(x);
        }
    }
    Err(inconsistent(format!("no square root of eps/2 for p = {p}")))
}

fn check_sqrt_half(field: &RealQuadField, x: &HalfQuad) -> bool {
    let p = BigInt::from(field.p);
    // x^2 = ((u^2 + p v^2) + 2uv sqrt p)/4 ; eps/2 = (a + b sqrt p)/2
    let sq_x = &x.x * &x.x + &p * &x.y * &x.y;
    let sq_y = &x.x * &x.y * 2;
    let congruent = x.x.is_odd() && x.y.is_odd();
    sq_x == &field.eps.a * 2 && sq_y == &field.eps.b * 2 && congruent
}

/// `zeta_F(-1)` from the exact finite sum
/// `(1/60) sum_{b^2 < d, b = d mod 2} sigma_1((d - b^2)/4)`.
pub fn zeta_minus_one(field: &RealQuadField) -> Rational {
    siegel_zeta_minus_one(field.d_f)
}

fn siegel_zeta_minus_one(d: u64) -> Rational {
    let s = arith::isqrt_u64(d) as i64;
    let total: u64 = (-s..=s)
        .filter(|b| (b - d as i64).rem_euclid(2) == 0 && ((b * b) as u64) < d)
        .map(|b| arith::divisor_sum((d - (b * b) as u64) / 4))
        .sum();
    Rational::new(total, 60)
}

/// A reduced indefinite form `(a, b, c)` of discriminant `b^2 - 4ac > 0`.
type IndefForm = (i64, i64, i64);

fn reduced_indefinite_forms(d: i64) -> Vec<IndefForm> {
    let s = arith::isqrt_u64(d as u64) as i64;
    let mut out = Vec::new();
    let mut b = if (s - d).rem_euclid(2) == 0 { s } else { s - 1 };
    while b > 0 {
        let n = (d - b * b) / 4;
        for (q, _) in divisors(n as u64).into_iter().map(|q| (q as i64, ())) {
            // |a| bounds: s < 2|a| + b and 2|a| - b <= s
            if 2 * q + b > s && 2 * q - b <= s {
                out.push((q, b, -n / q));
                out.push((-q, b, n / q));
            }
        }
        b -= 2;
    }
    out
}

fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (q, e) in arith::factorize(n) {
        let prev = ds.clone();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            ds.extend(prev.iter().map(|d| d * pw));
        }
    }
    ds
}

fn rho(f: IndefForm, d: i64, s: i64) -> IndefForm {
    let (_, b, c) = f;
    let m = 2 * c.abs();
    let nb = s - (s + b).rem_euclid(m);
    (c, nb, (nb * nb - d) / (4 * c))
}

/// Number of cycles of reduced forms of discriminant `d`, the narrow class number.
pub(crate) fn narrow_class_number(d: i64) -> u64 {
    let s = arith::isqrt_u64(d as u64) as i64;
    let forms = reduced_indefinite_forms(d);
    let mut seen = std::collections::HashSet::new();
    let mut cycles = 0;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        while seen.insert(g) {
            g = rho(g, d, s);
        }
    }
    cycles
}

/// The (wide) class number `h(F)` from cycles of reduced indefinite forms,
/// checked against the analytic class number formula.
pub fn class_number_real(field: &RealQuadField) -> Result<u64> {
    let narrow = narrow_class_number(field.d_f as i64);
    let h = if field.norm_eps == 1 { narrow / 2 } else { narrow };
    let analytic = oracle::analytic_class_number_real(field)?;
    if analytic != h {
        return Err(inconsistent(format!(
            "h(Q(sqrt {})): form cycles give {h}, analytic formula gives {analytic}",
            field.p
        )));
    }
    Ok(h)
}

/// The primes of `O_F` above `ell`, split pairs ordered by root.
pub fn factor_rational_prime(field: &RealQuadField, ell: u64) -> Result<Vec<PrimeIdealF>> {
    if !arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let p = field.p;
    let chi = arith::kronecker(field.d_f as i64, ell as i64)?;
    let ideal = |kind, root, norm| PrimeIdealF { ell, kind, root, norm };
    Ok(match chi {
        0 => {
            let root = if ell == 2 { p % 2 } else { 0 };
            vec![ideal(SplitKind::Ramified, Some(root), ell)]
        }
        -1 => vec![ideal(SplitKind::Inert, None, ell * ell)],
        _ => {
            let r = if ell == 2 {
                0
            } else {
                let r = arith::sqrt_mod_prime(p % ell, ell).expect("p is a square mod a split prime");
                r.min(ell - r)
            };
            vec![
                ideal(SplitKind::Split, Some(r), ell),
                ideal(SplitKind::Split, Some(if ell == 2 { 1 } else { ell - r }), ell),
            ]
        }
    })
}

/// Image of an element of `O_F` in `O_F/P`. For residue degree 2 the pair is
/// `(c0, c1)` on `1, t` with `t^2 = p` (odd `ell`) or `t^2 = t + 1` (`ell = 2`,
/// `t` the image of `(1 + sqrt p)/2`).
pub(crate) fn residue(prime: &PrimeIdealF, x: &QuadInt) -> (u64, u64) {
    let ell = prime.ell;
    if ell == 2 {
        let a = arith::mod_u64(&x.a, 2);
        let b = arith::mod_u64(&x.b, 2);
        return match prime.kind {
            SplitKind::Inert => (a, b),
            _ => ((a + b * prime.root.unwrap_or(0)) % 2, 0),
        };
    }
    let (hx, hy) = x.half_coords();
    let inv2 = arith::inv_mod(2, ell);
    let c0 = arith::mod_u64(&hx, ell) * inv2 % ell;
    let c1 = arith::mod_u64(&hy, ell) * inv2 % ell;
    match prime.kind {
        SplitKind::Inert => (c0, c1),
        _ => {
            let r = prime.root.unwrap_or(0);
            ((c0 + c1 * r % ell) % ell, 0)
        }
    }
}

/// `x^e` in `F_ell[t]/(t^2 - p)`.
fn pow_quadratic_residue(base: (u64, u64), mut e: u64, ell: u64, p: u64) -> (u64, u64) {
    let mul = |x: (u64, u64), y: (u64, u64)| {
        let m = |a: u64, b: u64| (a as u128 * b as u128 % ell as u128) as u64;
        (
            (m(x.0, y.0) + m(m(x.1, y.1), p % ell)) % ell,
            (m(x.0, y.1) + m(x.1, y.0)) % ell,
        )
    };
    let mut acc = (1, 0);
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    acc
}

/// Quadratic character of the residue of `x` at `P`: 0 if `x` lies in `P`,
/// otherwise +1 / -1 by Euler's criterion in `O_F/P`. In characteristic 2
/// every nonzero residue is a square.
pub fn is_square_in_residue_field(prime: &PrimeIdealF, x: &QuadInt) -> i8 {
    let r = residue(prime, x);
    if r == (0, 0) {
        return 0;
    }
    if prime.ell == 2 {
        return 1;
    }
    let ell = prime.ell;
    let one = match prime.kind {
        SplitKind::Inert => pow_quadratic_residue(r, (ell * ell - 1) / 2, ell, x.p()) == (1, 0),
        _ => arith::pow_mod(r.0, (ell - 1) / 2, ell) == 1,
    };
    if one {
        1
    } else {
        -1
    }
}

/// `v_P(x)` for an odd prime `P` and nonzero `x`.
pub(crate) fn valuation_odd(prime: &PrimeIdealF, x: &QuadInt) -> u32 {
    let ell = prime.ell;
    debug_assert!(ell != 2);
    // v_P(2) = 0, so work with 2x = A + B sqrt p
    let (a, b) = x.half_coords();
    let va = if a.is_zero() { u32::MAX } else { arith::valuation(&a, ell) };
    let vb = if b.is_zero() { u32::MAX } else { arith::valuation(&b, ell) };
    match prime.kind {
        SplitKind::Inert => va.min(vb),
        SplitKind::Ramified => va.saturating_mul(2).min(vb.saturating_mul(2).saturating_add(1)),
        SplitKind::Split => {
            let c = va.min(vb);
            let scale = BigInt::from(ell).pow(c);
            let (a, b) = (&a / &scale, &b / &scale);
            let r = prime.root.unwrap_or(0);
            let at_p = (arith::mod_u64(&a, ell) + arith::mod_u64(&b, ell) * r) % ell;
            if at_p != 0 {
                return c;
            }
            // Only one of the two conjugate primes divides a primitive element.
            let norm = &a * &a - BigInt::from(x.p()) * &b * &b;
            c + arith::valuation(&norm, ell)
        }
    }
}

/// Lift of the root of `t^2 = p` at a split odd prime to `Z/ell^k`.
fn hensel_root(prime: &PrimeIdealF, p: u64, k: u32) -> BigInt {
    let ell = BigInt::from(prime.ell);
    let mut r = BigInt::from(prime.root.unwrap_or(0));
    let mut modulus = ell.clone();
    let pb = BigInt::from(p);
    for _ in 1..k {
        modulus *= &ell;
        let f = (&r * &r - &pb).mod_floor(&modulus);
        let inv = (&r * BigInt::from(2)).modinv(&modulus).expect("2r is a unit at an odd split prime");
        r = (&r - f * inv).mod_floor(&modulus);
    }
    r
}

/// `(F(sqrt delta)/P)` for an odd prime `P` and nonzero `delta` in `O_F`.
pub(crate) fn odd_quadratic_character(prime: &PrimeIdealF, delta: &QuadInt) -> i8 {
    let v = valuation_odd(prime, delta);
    if v % 2 == 1 {
        return 0;
    }
    if v == 0 {
        return is_square_in_residue_field(prime, delta);
    }
    let ell = prime.ell;
    let p = delta.p();
    let (a, b) = delta.half_coords();
    let half = v / 2;
    let unit_residue: u64 = match prime.kind {
        SplitKind::Inert => {
            let scale = BigInt::from(ell).pow(v);
            let y = QuadInt::from_half(p, a / &scale, b / &scale).expect("ell^v divides delta");
            return is_square_in_residue_field(prime, &y);
        }
        SplitKind::Ramified => {
            // delta / p^(v/2); the residue is its rational part.
            let scale = BigInt::from(ell).pow(half);
            arith::mod_u64(&(a / scale), ell) * arith::inv_mod(2, ell) % ell
        }
        SplitKind::Split => {
            let k = v + 1;
            let modulus = BigInt::from(ell).pow(k);
            let r = hensel_root(prime, p, k);
            let image = (a + b * r).mod_floor(&modulus);
            let scale = BigInt::from(ell).pow(v);
            let u = image / scale;
            arith::mod_u64(&u, ell) * arith::inv_mod(2, ell) % ell
        }
    };
    if arith::pow_mod(unit_residue, (ell - 1) / 2, ell) == 1 {
        1
    } else {
        -1
    }
}
