//! Independent, slow recomputations of the invariants produced elsewhere in the crate.
//!
//! Everything here is an exhaustive enumeration or a direct search; none of it
//! reuses the closed forms it is meant to check.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::cmfield::{self, CmFieldDescriptor, CmTag};
use crate::error::{inconsistent, Error, Result};
use crate::finite_ring::{self, QuotientRing};
use crate::numfield::KElem;
use crate::orders::{self, OrderInvariant, OrderLabel, Over};
use crate::quaternion::{self, EichlerContext};
use crate::realquad::{self, PrimeIdealF, QuadInt, RealQuadField, SplitKind};

/// `h(F)` from `h log eps = -1/2 sum_{a < d} chi(a) log sin(pi a / d)`.
pub fn analytic_class_number_real(field: &RealQuadField) -> Result<u64> {
    let d = field.d_f as i64;
    let mut sum = 0.0f64;
    for a in 1..d {
        let chi = arith::kronecker(d, a)?;
        if chi != 0 {
            sum += chi as f64 * (std::f64::consts::PI * a as f64 / d as f64).sin().ln();
        }
    }
    let h = -0.5 * sum / field.eps.ln_abs();
    let rounded = h.round();
    if (h - rounded).abs() > 1e-6 || rounded < 1.0 {
        return Err(inconsistent(format!("analytic class number {h} for d = {d} is not an integer")));
    }
    Ok(rounded as u64)
}

/// Smallest unit `> 1` of `O_F`, by ascending search over the `sqrt p` coefficient.
pub fn brute_fundamental_unit(p: u64, bound: u64) -> Result<QuadInt> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let half = p % 4 == 1;
    for b in 1..=bound {
        // 2 eps = x + y sqrt p with y = b (p = 1 mod 4) or y = 2b
        let y = if half { b as u128 } else { 2 * b as u128 };
        let py2 = p as u128 * y * y;
        for x2 in [py2.checked_sub(4), py2.checked_add(4)].into_iter().flatten() {
            if let Some(x) = arith::exact_sqrt_u128(x2) {
                if let Some(u) = QuadInt::from_half(p, BigInt::from(x), BigInt::from(y)) {
                    return Ok(u);
                }
            }
        }
    }
    Err(Error::SearchBound(bound))
}

/// Certificate that the unit `eps > 1` is not a `k`-th power of a unit for any
/// prime `k`. A unit `eta > 1` satisfies `eta >= (1 + sqrt 5)/2`, which bounds `k`.
pub fn certify_fundamental(eps: &QuadInt) -> Result<()> {
    let p = eps.p();
    let norm = eps.norm();
    if norm.abs() != BigInt::one() || eps.to_f64() <= 1.0 {
        return Err(inconsistent(format!("{eps} is not a unit > 1")));
    }
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let kmax = (eps.ln_abs() / golden).floor() as u64;
    let trace: BigInt = eps.trace();
    let pb = BigInt::from(p);
    for k in arith::primes_up_to(kmax) {
        let x0: BigInt = Roots::nth_root(&trace, k as u32);
        let hi: BigInt = &x0 + BigInt::from(2);
        let mut x: BigInt = (&x0 - BigInt::from(2)).max(BigInt::one());
        while x <= hi {
            for n in [-4i32, 4] {
                let y2: BigInt = &x * &x - BigInt::from(n);
                if y2.is_positive() && (&y2 % &pb).is_zero() {
                    if let Some(y) = arith::exact_sqrt(&(y2 / &pb)) {
                        if let Some(eta) = QuadInt::from_half(p, x.clone(), y) {
                            if eta.pow(k as u32) == *eps {
                                return Err(inconsistent(format!("{eps} is the {k}-th power of {eta}")));
                            }
                        }
                    }
                }
            }
            x += 1;
        }
    }
    Ok(())
}

type FElem = (BigRational, BigRational);

fn f_mul(p: &BigRational, a: &FElem, b: &FElem) -> FElem {
    (&a.0 * &b.0 + p * &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = arith::exact_sqrt(r.numer())?;
    let d = arith::exact_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

/// A square root of `a + b sqrt p` in `F`, if one exists.
fn f_sqrt(p: &BigRational, a: &FElem) -> Option<FElem> {
    let two = BigRational::from_integer(2.into());
    let n = rational_sqrt(&(&a.0 * &a.0 - p * &a.1 * &a.1))?;
    for c2 in [(&a.0 + &n) / &two, (&a.0 - &n) / &two] {
        if c2.is_zero() {
            continue;
        }
        if let Some(c) = rational_sqrt(&c2) {
            let d = &a.1 / (&two * &c);
            if f_mul(p, &(c.clone(), d.clone()), &(c.clone(), d.clone())) == *a {
                return Some((c, d));
            }
        }
    }
    if a.1.is_zero() {
        let d = rational_sqrt(&(&a.0 / p))?;
        return Some((BigRational::zero(), d));
    }
    None
}

/// All roots of unity of `K`.
///
/// For `z` in `mu_K`, `t = z + conj(z)` lies in `O_F` with both conjugates in
/// `[-2, 2]`, and `z` is a root of `X^2 - t X + 1`. This enumerates those `t`
/// and keeps the roots that lie in `K`.
pub fn roots_of_unity(k: &CmFieldDescriptor) -> Vec<KElem> {
    let ar = k.arith();
    let p = k.p;
    let pr = BigRational::from_integer(p.into());
    let two = BigRational::from_integer(2.into());
    let (dx, dy) = k.delta.half_coords();
    let delta: FElem = (BigRational::new(dx, 2.into()), BigRational::new(dy, 2.into()));
    let delta_norm = &delta.0 * &delta.0 - &pr * &delta.1 * &delta.1;
    let delta_inv: FElem = (&delta.0 / &delta_norm, -&delta.1 / &delta_norm);
    let ymax = (16.0 / p as f64).sqrt().floor() as i64;
    let mut out = Vec::new();
    for y in -ymax..=ymax {
        for x in -4i64..=4 {
            // t = (x + y sqrt p)/2
            let Some(t) = QuadInt::from_half(p, x.into(), y.into()) else { continue };
            let r = (p as f64).sqrt() * y as f64;
            if (x as f64 + r).abs() > 4.0 + 1e-9 || (x as f64 - r).abs() > 4.0 + 1e-9 {
                continue;
            }
            let t: FElem = (BigRational::new(t.half_coords().0, 2.into()), BigRational::new(t.half_coords().1, 2.into()));
            let disc = (f_mul(&pr, &t, &t).0 - BigRational::from_integer(4.into()), f_mul(&pr, &t, &t).1);
            let Some(c) = f_sqrt(&pr, &f_mul(&pr, &disc, &delta_inv)) else { continue };
            for sign in [1i64, -1] {
                let sg = BigRational::from_integer(sign.into());
                let z = KElem([&t.0 / &two, &t.1 / &two, &c.0 * &sg / &two, &c.1 * &sg / &two]);
                if !out.contains(&z) && k.ok().contains(&z) && ar.mul(&z, &ar.conj(&z)) == ar.one() {
                    out.push(z);
                }
            }
        }
    }
    out
}

fn f_unit_inverse(k: &CmFieldDescriptor, x: &QuadInt) -> KElem {
    // x^-1 = N(x) conj(x) for a unit
    let ar = k.arith();
    let c = ar.from_quad(&x.conj());
    if x.norm().is_negative() {
        ar.scale(&c, &BigRational::from_integer((-1).into()))
    } else {
        c
    }
}

/// A unit of `O_K` outside `mu_K O_F^x`, for the fields with `Q_{K/F} = 2`.
pub fn extra_unit(field: &RealQuadField, k: &CmFieldDescriptor) -> Result<Option<KElem>> {
    let ar = k.arith();
    match k.tag {
        CmTag::K1 if field.p % 4 == 3 => {
            let x = realquad::sqrt_half_unit(field)?;
            let x = KElem([
                BigRational::new(x.x, 2.into()),
                BigRational::new(x.y, 2.into()),
                BigRational::zero(),
                BigRational::zero(),
            ]);
            Ok(Some(ar.mul(&x, &KElem::from_ints([1, 0, 1, 0], 1))))
        }
        CmTag::K2 => Ok(Some(ar.s())),
        _ => Ok(None),
    }
}

/// Check `Q_{K/F}`: for `Q = 2` the extra unit `u` has `u / conj(u)` a root of unity
/// that is not a square in `mu_K`; for `Q = 1` the discriminants of `F` and `E` are coprime.
pub fn verify_hasse_index(field: &RealQuadField, k: &CmFieldDescriptor, mu: &[KElem]) -> Result<()> {
    let ar = k.arith();
    match extra_unit(field, k)? {
        Some(u) => {
            if !k.ok().contains(&u) {
                return Err(inconsistent("extra unit is not integral"));
            }
            let n = ar.mul(&u, &ar.conj(&u));
            let n = quad_from_kelem(field.p, &n).ok_or_else(|| inconsistent("u conj(u) is not in O_F"))?;
            if n.norm().abs() != BigInt::one() {
                return Err(inconsistent("extra element is not a unit"));
            }
            let phi = ar.mul(&ar.mul(&u, &u), &f_unit_inverse(k, &n));
            let squares: Vec<KElem> = mu.iter().map(|z| ar.mul(z, z)).collect();
            if !mu.contains(&phi) || squares.contains(&phi) || k.q_kf != 2 {
                return Err(inconsistent(format!("Hasse unit index of {} is not 2", k.name())));
            }
        }
        None => {
            if k.q_kf != 1 {
                return Err(inconsistent(format!("no extra unit known for {}", k.name())));
            }
            if let (Some((d_e, _)), true) = (k.imaginary_subfields(), field.p % 2 == 1) {
                if num_integer::gcd(field.d_f, d_e.unsigned_abs()) != 1 {
                    return Err(inconsistent(format!("Hasse unit index of {} should be 2", k.name())));
                }
            }
        }
    }
    Ok(())
}

fn quad_from_kelem(p: u64, x: &KElem) -> Option<QuadInt> {
    if !x.0[2].is_zero() || !x.0[3].is_zero() {
        return None;
    }
    let two = BigRational::from_integer(2.into());
    let hx = &x.0[0] * &two;
    let hy = &x.0[1] * &two;
    if !hx.is_integer() || !hy.is_integer() {
        return None;
    }
    QuadInt::from_half(p, hx.to_integer(), hy.to_integer())
}

/// Representatives of `O_K^x / {+-1}` modulo `O_F^x` (or modulo `A^x` when `over_a`),
/// each class appearing twice as `+-u`.
fn unit_coset_reps(field: &RealQuadField, k: &CmFieldDescriptor, over_a: bool) -> Result<Vec<KElem>> {
    let ar = k.arith();
    let mu = roots_of_unity(k);
    let mut reps = mu.clone();
    if let Some(u) = extra_unit(field, k)? {
        reps.extend(mu.iter().map(|z| ar.mul(z, &u)));
    }
    if over_a {
        let varpi = realquad::varpi(field)?;
        let eps = ar.from_quad(&field.eps);
        let base = reps.clone();
        for j in 1..varpi as u32 {
            let ej = ar.pow(&eps, j);
            reps.extend(base.iter().map(|r| ar.mul(r, &ej)));
        }
    }
    Ok(reps)
}

/// `w(B)` by counting unit classes of `O_K` that lie in `B`.
pub fn unit_index_of_order(field: &RealQuadField, k: &CmFieldDescriptor, b: &OrderInvariant) -> Result<u32> {
    let reps = unit_coset_reps(field, k, b.over == Over::A)?;
    let inside = reps.iter().filter(|u| b.lattice().contains(u)).count();
    Ok(inside as u32 / 2)
}

/// `O_K / 2 O_K` as an explicit 16-element algebra.
pub fn residue_ring_mod2(k: &CmFieldDescriptor) -> QuotientRing {
    k.residue_ring(2)
}

/// The ideal `a` of `O_K` used to compute `h(B)` and the characteristic of `O_K / a`.
fn modulus_ideal(k: &CmFieldDescriptor, b: &OrderInvariant) -> (u32, Vec<KElem>) {
    let ar = k.arith();
    if b.label == OrderLabel::B13 {
        // sqrt -3 = sqrt 3 * sqrt -1
        let r = KElem::from_ints([0, 0, 0, 1], 1);
        (3, k.ok().basis().iter().map(|e| ar.mul(&r, e)).collect())
    } else {
        (2, k.ok().basis().iter().map(|e| ar.scale(e, &BigRational::from_integer(2.into()))).collect())
    }
}

fn image(ring: &QuotientRing, k: &CmFieldDescriptor, elems: &[KElem]) -> Result<Vec<u32>> {
    elems
        .iter()
        .map(|x| {
            k.ok()
                .int_coords(x)
                .map(|c| ring.reduce(&c))
                .ok_or_else(|| inconsistent("element is not in O_K"))
        })
        .collect()
}

/// Whether `a O_K` lies in `B` (so the conductor of `B` divides `a`) and `B != O_K`.
pub fn conductor_divides(k: &CmFieldDescriptor, b: &OrderInvariant) -> bool {
    let (_, ideal) = modulus_ideal(k, b);
    ideal.iter().all(|x| b.lattice().contains(x)) && k.ok().basis().iter().any(|x| !b.lattice().contains(x))
}

/// `h(B) = h(O_K) [(O_K/a)^x : (B/a)^x] / [O_K^x : B^x]`, from unit counts in `O_K / a`.
pub fn order_h_via_unit_indices(field: &RealQuadField, k: &CmFieldDescriptor, b: &OrderInvariant) -> Result<u64> {
    let (q, ideal_gens) = modulus_ideal(k, b);
    let ring = k.residue_ring(q);
    let ideal = ring.span(&image(&ring, k, &ideal_gens)?);
    let sub = ring.span(&image(&ring, k, b.lattice().basis())?);
    let ok_units = ring.quotient_unit_count(&ideal) as u64;
    let b_units = ring.subring_quotient_unit_count(&sub, &ideal) as u64;
    let w_b = unit_index_of_order(field, k, b)? as u64;
    let varpi = if b.over == Over::A { realquad::varpi(field)? as u64 } else { 1 };
    let reps = unit_coset_reps(field, k, false)?.len() as u64 / 2;
    // [O_K^x : B^x] = [O_K^x : O_F^x][O_F^x : A^x] / w(B)
    let num = k.h_k * (ok_units / b_units) * w_b;
    let den = reps * varpi;
    if ok_units % b_units != 0 || num % den != 0 {
        return Err(Error::NonIntegral(arith::Rational::new(num, den)));
    }
    Ok(num / den)
}

/// One maximal ideal of `O_K / 2 O_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoFactor {
    pub ideal: BTreeSet<u32>,
    pub residue_degree: u32,
    pub ramification: u32,
}

/// The primes of `O_K` above 2, read off the maximal ideals of `O_K / 2 O_K`
/// found by enumerating all ideals.
pub fn factor_two_directly(k: &CmFieldDescriptor) -> Vec<TwoFactor> {
    let ring = k.residue_ring(2);
    let mut ideals: BTreeSet<BTreeSet<u32>> = (0..ring.size()).map(|x| ring.principal_ideal(x)).collect();
    loop {
        let list: Vec<BTreeSet<u32>> = ideals.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in list.iter().enumerate() {
            for bb in &list[i + 1..] {
                let gens: Vec<u32> = a.iter().chain(bb).copied().collect();
                if ideals.insert(ring.span(&gens)) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let size = ring.size() as usize;
    let proper: Vec<&BTreeSet<u32>> = ideals.iter().filter(|i| i.len() < size).collect();
    let maximal: Vec<BTreeSet<u32>> = proper
        .iter()
        .filter(|m| !proper.iter().any(|n| n.len() > m.len() && m.is_subset(n)))
        .map(|m| (*m).clone())
        .collect();
    let g = maximal.len() as u32;
    maximal
        .into_iter()
        .map(|m| {
            let f = (size / m.len()).trailing_zeros();
            TwoFactor { ideal: m, residue_degree: f, ramification: 4 / (g * f) }
        })
        .collect()
}

/// The Artin symbol at a dyadic prime of `F` from [`factor_two_directly`].
pub fn dyadic_artin_via_ideals(k: &CmFieldDescriptor, prime: &PrimeIdealF) -> Result<i8> {
    let ring = k.residue_ring(2);
    let g = image(&ring, k, &[k.arith().from_quad(&prime.generator(k.p))])?[0];
    let above: Vec<TwoFactor> = factor_two_directly(k).into_iter().filter(|f| f.ideal.contains(&g)).collect();
    let e_p = if prime.kind == SplitKind::Ramified { 2 } else { 1 };
    match above.as_slice() {
        [_, _] => Ok(1),
        [f] if f.ramification == 2 * e_p => Ok(0),
        [f] if f.ramification == e_p => Ok(-1),
        _ => Err(inconsistent(format!("unexpected factorization of 2 in {}", k.name()))),
    }
}

/// Sizes of the projections of the image of `B` in `O_K / 2 O_K` onto its
/// local factors, ordered by idempotent.
pub fn residue_image_shape(k: &CmFieldDescriptor, b: &OrderInvariant) -> Result<Vec<usize>> {
    let ring = k.residue_ring(2);
    let sub = ring.span(&image(&ring, k, b.lattice().basis())?);
    let mut factors = finite_ring::local_factors(&ring);
    factors.sort_by_key(|f| f.idempotent);
    Ok(factors
        .iter()
        .map(|f| sub.iter().map(|&x| ring.mul(x, f.idempotent)).collect::<BTreeSet<u32>>().len())
        .collect())
}

/// Run every cross-check available for one prime `p`.
pub fn verify_prime(p: u64) -> Result<()> {
    let field = realquad::build_field(p)?;
    let fail = |what: String| Err(inconsistent(format!("p = {p}: {what}")));

    certify_fundamental(&field.eps)?;
    if field.eps.b.bits() <= 20 {
        let brute = brute_fundamental_unit(p, 10_000_000)?;
        if brute != field.eps {
            return fail(format!("brute-force unit {brute} differs from {}", field.eps));
        }
    }
    let expect_minus = p == 2 || p % 4 == 1;
    if (field.norm_eps == -1) != expect_minus {
        return fail("norm of the fundamental unit".into());
    }
    if analytic_class_number_real(&field)? != field.h_f {
        return fail("h(F)".into());
    }

    let cms = cmfield::enumerate_cm_fields(&field)?;
    for k in &cms {
        let mu = roots_of_unity(k);
        if mu.len() as u32 != k.mu_order {
            return fail(format!("|mu_K| = {} for {}, expected {}", mu.len(), k.name(), k.mu_order));
        }
        verify_hasse_index(&field, k, &mu)?;
        if Some(k.w_k) != cmfield::table_w(p, k.tag) {
            return fail(format!("w_K for {}", k.name()));
        }
        if k.tag == CmTag::K1 && p % 2 == 1 {
            let units = residue_ring_mod2(k).unit_count() as i64;
            if units != 4 * (2 - arith::kronecker(2, p as i64)? as i64) {
                return fail(format!("|(O_K/2O_K)^x| = {units}"));
            }
        }
        for prime in realquad::factor_rational_prime(&field, 2)? {
            if quaternion::artin_symbol(k, &prime)? != dyadic_artin_via_ideals(k, &prime)? {
                return fail(format!("dyadic Artin symbol at {prime} in {}", k.name()));
            }
        }
    }

    let mut all = orders::enumerate_suborders_of(&field, &cms)?;
    if p % 4 == 1 {
        all.extend(orders::enumerate_proper_a_orders(&field, &cms)?);
    }
    for b in &all {
        let k = cms.iter().find(|k| k.tag == b.field).expect("field of an inventory order");
        if unit_index_of_order(&field, k, b)? != b.w_b {
            return fail(format!("w({})", b.label));
        }
        if b.label != OrderLabel::MaximalOrder {
            if !conductor_divides(k, b) {
                return fail(format!("conductor of {}", b.label));
            }
            if order_h_via_unit_indices(&field, k, b)? != b.h_b {
                return fail(format!("h({})", b.label));
            }
        }
    }

    let ctx = EichlerContext::from_field(field)?;
    quaternion::class_number_eichler(&ctx, &quaternion::EichlerInput::maximal())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realquad::{build_field, QuadBasis};

    #[test]
    fn brute_units() {
        assert_eq!(
            brute_fundamental_unit(2, 100).unwrap(),
            QuadInt::new(2, 1.into(), 1.into(), QuadBasis::Sqrt).unwrap()
        );
        assert_eq!(
            brute_fundamental_unit(5, 100).unwrap(),
            QuadInt::new(5, 0.into(), 1.into(), QuadBasis::HalfPlusSqrt).unwrap()
        );
        assert_eq!(
            brute_fundamental_unit(19, 100).unwrap(),
            QuadInt::new(19, 170.into(), 39.into(), QuadBasis::Sqrt).unwrap()
        );
        assert_eq!(brute_fundamental_unit(31, 10), Err(Error::SearchBound(10)));
    }

    #[test]
    fn certificate_rejects_powers() {
        let f = build_field(7).unwrap();
        assert!(certify_fundamental(&f.eps).is_ok());
        assert!(certify_fundamental(&f.eps.pow(3)).is_err());
    }

    #[test]
    fn roots_of_unity_counts() {
        let cms = cmfield::enumerate_cm_fields(&build_field(5).unwrap()).unwrap();
        let counts: Vec<usize> = cms.iter().map(|k| roots_of_unity(k).len()).collect();
        assert_eq!(counts, vec![4, 6, 10]);
        let cms = cmfield::enumerate_cm_fields(&build_field(2).unwrap()).unwrap();
        assert_eq!(roots_of_unity(&cms[0]).len(), 8);
    }

    #[test]
    fn residue_ring_examples() {
        let k7 = &cmfield::enumerate_cm_fields(&build_field(7).unwrap()).unwrap()[0];
        assert_eq!(residue_ring_mod2(k7).unit_count(), 4);
        let k3 = &cmfield::enumerate_cm_fields(&build_field(3).unwrap()).unwrap()[0];
        assert_eq!(residue_ring_mod2(k3).unit_count(), 12);
        let k13 = &cmfield::enumerate_cm_fields(&build_field(13).unwrap()).unwrap()[1];
        let factors = finite_ring::local_factors(&residue_ring_mod2(k13));
        assert_eq!(factors.len(), 2);
        assert!(factors.iter().all(|f| f.dimension == 2 && f.residue_degree == 2));
    }

    #[test]
    fn two_in_k() {
        let cms = cmfield::enumerate_cm_fields(&build_field(13).unwrap()).unwrap();
        let k1 = factor_two_directly(&cms[0]);
        assert_eq!(k1.len(), 1);
        assert_eq!(k1[0].ramification, 2);
        let k3 = factor_two_directly(&cms[1]);
        assert_eq!(k3.len(), 2);
        assert!(k3.iter().all(|f| f.residue_degree == 2 && f.ramification == 1));
    }

    #[test]
    fn class_numbers_via_unit_indices() {
        for p in [3u64, 7, 13] {
            let f = build_field(p).unwrap();
            let cms = cmfield::enumerate_cm_fields(&f).unwrap();
            let mut inv = orders::enumerate_suborders_of(&f, &cms).unwrap();
            if p % 4 == 1 {
                inv.extend(orders::enumerate_proper_a_orders(&f, &cms).unwrap());
            }
            for b in inv.iter().filter(|b| b.label != OrderLabel::MaximalOrder) {
                let k = cms.iter().find(|k| k.tag == b.field).unwrap();
                assert_eq!(order_h_via_unit_indices(&f, k, b), Ok(b.h_b), "p={p} {}", b.label);
            }
        }
    }

    #[test]
    fn verify_small_primes() {
        for p in [2u64, 3, 5, 7, 13, 17] {
            verify_prime(p).unwrap();
        }
    }
}
