//! The CM quartic fields `K = F(sqrt delta)` over `F = Q(sqrt p)` whose unit
//! group is strictly larger than `O_F^x`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{inconsistent, Error, Result};
use crate::finite_ring::QuotientRing;
use crate::imagquad;
use crate::numfield::{CmArith, KElem, Lattice, Structure};
use crate::realquad::{QuadInt, RealQuadField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmTag {
    /// `F(sqrt -1)`
    K1,
    /// `F(sqrt -2)`, presented as `F(sqrt -eps)`
    K2,
    /// `F(sqrt -3)`
    K3,
    /// `Q(zeta_10)`, only over `Q(sqrt 5)`
    Zeta10,
}

impl CmTag {
    pub fn j(self) -> Option<i64> {
        match self {
            CmTag::K1 => Some(1),
            CmTag::K2 => Some(2),
            CmTag::K3 => Some(3),
            CmTag::Zeta10 => None,
        }
    }
}

impl fmt::Display for CmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CmTag::K1 => "K1",
            CmTag::K2 => "K2",
            CmTag::K3 => "K3",
            CmTag::Zeta10 => "Zeta10",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct CmFieldDescriptor {
    pub p: u64,
    pub tag: CmTag,
    /// `K = F(s)` with `s^2 = delta`
    pub delta: QuadInt,
    /// `|mu_K|`
    pub mu_order: u32,
    pub q_kf: u8,
    pub w_k: u32,
    pub h_k: u64,
    ok: Lattice,
    structure: Structure,
    arith: CmArith,
}

impl CmFieldDescriptor {
    pub fn arith(&self) -> &CmArith {
        &self.arith
    }

    pub fn ok(&self) -> &Lattice {
        &self.ok
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// `O_K / q O_K`
    pub fn residue_ring(&self, q: u32) -> QuotientRing {
        let one = self.ok.int_coords(&self.arith.one()).expect("1 lies in O_K");
        QuotientRing::new(&self.structure, &one, q)
    }

    /// Discriminants of the two imaginary quadratic subfields `Q(sqrt -j)` and
    /// `Q(sqrt -jp)`, for the biquadratic fields.
    pub fn imaginary_subfields(&self) -> Option<(i64, i64)> {
        let j = self.tag.j()?;
        let d_e = arith::quadratic_discriminant(-j);
        let d_e2 = arith::quadratic_discriminant(squarefree(-j * self.p as i64));
        Some((d_e, d_e2))
    }

    pub fn name(&self) -> String {
        match self.tag.j() {
            Some(j) => format!("Q(sqrt {}, sqrt -{})", self.p, j),
            None => "Q(zeta_10)".to_string(),
        }
    }
}

fn squarefree(n: i64) -> i64 {
    let core: u64 = arith::factorize(n.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(q, _)| q)
        .product();
    n.signum() * core as i64
}

/// `(tag, |mu_K|, Q_{K/F})` for every field of the table at this `p`.
fn table(p: u64) -> Vec<(CmTag, u32, u8)> {
    use CmTag::*;
    match p {
        2 => vec![(K1, 8, 1), (K3, 6, 1)],
        3 => vec![(K1, 12, 2), (K2, 2, 2)],
        5 => vec![(K1, 4, 1), (K3, 6, 1), (Zeta10, 10, 1)],
        _ if p % 4 == 1 => vec![(K1, 4, 1), (K3, 6, 1)],
        _ => vec![(K1, 4, 2), (K2, 2, 2), (K3, 6, 1)],
    }
}

/// The table value of `w_K` for a field, independent of any descriptor.
pub fn table_w(p: u64, tag: CmTag) -> Option<u32> {
    table(p)
        .into_iter()
        .find(|&(t, _, _)| t == tag)
        .map(|(_, mu, q)| mu * q as u32 / 2)
}

fn delta_for(field: &RealQuadField, tag: CmTag) -> QuadInt {
    let p = field.p;
    match tag {
        CmTag::K1 => QuadInt::from_int(p, -1),
        CmTag::K2 => {
            let (x, y) = field.eps.half_coords();
            QuadInt::from_half(p, -x, -y).expect("integral")
        }
        CmTag::K3 => QuadInt::from_int(p, -3),
        CmTag::Zeta10 => QuadInt::from_half(p, BigInt::from(-5), BigInt::from(-1)).expect("integral"),
    }
}

/// Candidate Z-basis of `O_K` on the power basis `1, sqrt p, s, sqrt p s`.
fn candidate_basis(field: &RealQuadField, tag: CmTag, ar: &CmArith) -> [KElem; 4] {
    let p = field.p;
    let e = |c: [i64; 4], den: i64| KElem::from_ints(c, den);
    match tag {
        CmTag::K1 if p == 2 => [e([1, 0, 0, 0], 1), e([0, 0, 1, 0], 1), e([0, 1, 0, 0], 1), e([0, 1, 0, 1], 2)],
        CmTag::K1 if p % 4 == 1 => [e([1, 0, 0, 0], 1), e([1, 1, 0, 0], 2), e([0, 0, 1, 0], 1), e([0, 0, 1, 1], 2)],
        CmTag::K1 => [e([1, 0, 0, 0], 1), e([1, 0, 0, 1], 2), e([0, 0, 1, 0], 1), e([0, 1, 1, 0], 2)],
        CmTag::K2 => [e([1, 0, 0, 0], 1), e([0, 1, 0, 0], 1), e([0, 0, 1, 0], 1), e([0, 0, 0, 1], 1)],
        CmTag::K3 if p % 4 == 1 => [e([1, 0, 0, 0], 1), e([1, 1, 0, 0], 2), e([1, 0, 1, 0], 2), e([1, 1, 1, 1], 4)],
        CmTag::K3 => [e([1, 0, 0, 0], 1), e([0, 1, 0, 0], 1), e([1, 0, 1, 0], 2), e([0, 1, 0, 1], 2)],
        CmTag::Zeta10 => {
            let z = e([-1, 1, 2, 0], 4);
            [ar.one(), z.clone(), ar.pow(&z, 2), ar.pow(&z, 3)]
        }
    }
}

fn expected_discriminant(p: u64, tag: CmTag) -> BigInt {
    match tag.j() {
        Some(j) => {
            let d_f = crate::realquad::discriminant(p) as i64;
            let d_e = arith::quadratic_discriminant(-j);
            let d_e2 = arith::quadratic_discriminant(squarefree(-j * p as i64));
            BigInt::from(d_f) * d_e * d_e2
        }
        None => BigInt::from(125),
    }
}

/// Enlarge a candidate order by integral elements `(sum c_i e_i)/2` until its
/// discriminant reaches `target`.
fn refine_to_maximal(ar: &CmArith, mut lat: Lattice, target: &BigInt) -> Result<Lattice> {
    loop {
        let disc = lat.discriminant(ar);
        if disc == BigRational::from_integer(target.clone()) {
            return Ok(lat);
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let found = (1u32..16).find_map(|mask| {
            let c: [BigInt; 4] = std::array::from_fn(|i| BigInt::from((mask >> i) & 1));
            let x = ar.scale(&lat.combine(&c), &half);
            ar.is_integral(&x).then_some(x)
        });
        let Some(x) = found else {
            return Err(inconsistent(format!("order of discriminant {disc} cannot be enlarged to {target}")));
        };
        let mut gens: Vec<KElem> = lat.basis().to_vec();
        gens.push(x);
        lat = ring_closure(ar, &gens)?;
    }
}

/// The smallest order containing the given generators (all assumed integral).
pub(crate) fn ring_closure(ar: &CmArith, gens: &[KElem]) -> Result<Lattice> {
    let mut lat = Lattice::from_generators(gens)?;
    while lat.structure_constants(ar).is_none() {
        let b = lat.basis();
        let mut more: Vec<KElem> = b.to_vec();
        for i in 0..4 {
            for j in i..4 {
                more.push(ar.mul(&b[i], &b[j]));
            }
        }
        lat = Lattice::from_generators(&more)?;
    }
    Ok(lat)
}

fn build_descriptor(field: &RealQuadField, tag: CmTag, mu_order: u32, q_kf: u8) -> Result<CmFieldDescriptor> {
    let p = field.p;
    let delta = delta_for(field, tag);
    let (x, y) = delta.half_coords();
    let totally_negative = x.is_negative() && &x * &x > BigInt::from(p) * &y * &y;
    if !totally_negative {
        return Err(inconsistent(format!("delta = {delta} is not totally negative")));
    }
    let ar = CmArith::new(p, &delta);
    if tag == CmTag::Zeta10 {
        let z = KElem::from_ints([-1, 1, 2, 0], 4);
        if ar.pow(&z, 5) != ar.one() || ar.pow(&z, 1) == ar.one() {
            return Err(inconsistent("zeta_5 presentation is wrong"));
        }
    }
    let lat = Lattice::new(candidate_basis(field, tag, &ar))?;
    if lat.structure_constants(&ar).is_none() || !lat.contains(&ar.one()) {
        return Err(inconsistent(format!("basis of O_K for {tag} over p = {p} is not a ring")));
    }
    let ok = refine_to_maximal(&ar, lat, &expected_discriminant(p, tag))?;
    let structure = ok.structure_constants(&ar).expect("checked above");
    let w_k = mu_order * q_kf as u32 / 2;
    let mut desc = CmFieldDescriptor {
        p,
        tag,
        delta,
        mu_order,
        q_kf,
        w_k,
        h_k: 0,
        ok,
        structure,
        arith: ar,
    };
    hasse_unit_index(&desc)?;
    desc.h_k = class_number_cm(&desc, field.h_f, imagquad::class_number_imag)?;
    Ok(desc)
}

/// The fields `K/F` with `w_K > 1`, in table order.
pub fn enumerate_cm_fields(field: &RealQuadField) -> Result<Vec<CmFieldDescriptor>> {
    table(field.p)
        .into_iter()
        .map(|(tag, mu, q)| build_descriptor(field, tag, mu, q))
        .collect()
}

/// `Q_{K/F}`, checked against the gcd criterion on discriminants for odd `p`.
pub fn hasse_unit_index(k: &CmFieldDescriptor) -> Result<u8> {
    let by_case = if k.p % 4 == 3 && matches!(k.tag, CmTag::K1 | CmTag::K2) { 2 } else { 1 };
    if by_case != k.q_kf {
        return Err(inconsistent(format!("Q_K/F for {} disagrees with the case table", k.name())));
    }
    if let (Some((d_e, _)), true) = (k.imaginary_subfields(), k.p % 2 == 1) {
        let d_f = crate::realquad::discriminant(k.p);
        let by_gcd = if num_integer::gcd(d_f, d_e.unsigned_abs()) > 1 { 2 } else { 1 };
        if by_gcd != k.q_kf {
            return Err(inconsistent(format!("Q_K/F for {} disagrees with the gcd criterion", k.name())));
        }
    }
    Ok(k.q_kf)
}

/// `h(K) = Q_{K/F} h(F) h(E) h(E') / 2`, with `h = 1` for `Q(zeta_8)` and `Q(zeta_10)`.
pub fn class_number_cm(
    k: &CmFieldDescriptor,
    h_f: u64,
    h_imag: impl Fn(i64) -> Result<u64>,
) -> Result<u64> {
    if k.tag == CmTag::Zeta10 || (k.p == 2 && k.tag == CmTag::K1) {
        return Ok(1);
    }
    let (d_e, d_e2) = k.imaginary_subfields().expect("biquadratic");
    let twice = k.q_kf as u64 * h_f * h_imag(d_e)? * h_imag(d_e2)?;
    if twice % 2 != 0 {
        return Err(Error::NonIntegral(arith::Rational::new(twice, 2)));
    }
    Ok(twice / 2)
}

pub fn maximal_order_basis(k: &CmFieldDescriptor) -> &[KElem; 4] {
    k.ok.basis()
}
