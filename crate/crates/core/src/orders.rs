//! Quadratic orders `B` in the CM fields with `w(B) > 1`: the `O_F`-orders that
//! enter the elliptic part of Eichler's formula, and the proper `Z[sqrt p]`-orders.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cmfield::{self, CmFieldDescriptor, CmTag};
use crate::error::{inconsistent, Error, Result};
use crate::numfield::{KElem, Lattice};
use crate::realquad::{self, PrimeIdealF, RealQuadField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrderLabel {
    MaximalOrder,
    B12,
    B14,
    B13,
    /// `Z[sqrt 2, sqrt -1]`
    B2sqrt2,
    B34,
    B32,
    B32conj,
}

impl fmt::Display for OrderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Over {
    OF,
    A,
}

impl fmt::Display for Over {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct OrderInvariant {
    pub label: OrderLabel,
    pub field: CmTag,
    pub over: Over,
    pub index_in_ok: u64,
    pub conductor_support: Vec<PrimeIdealF>,
    pub w_b: u32,
    pub h_b: u64,
    /// How `h_b` was obtained, for reports.
    pub formula: &'static str,
    lattice: Lattice,
}

impl OrderInvariant {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
}

fn field_of(cms: &[CmFieldDescriptor], tag: CmTag) -> Result<&CmFieldDescriptor> {
    cms.iter()
        .find(|k| k.tag == tag)
        .ok_or_else(|| inconsistent(format!("field {tag} missing from the inventory")))
}

/// `2 - (2/p)`
fn two_factor(p: u64) -> u64 {
    (2 - arith::kronecker(2, p as i64).expect("p is odd") as i64) as u64
}

fn exact_div(num: u64, den: u64) -> Result<u64> {
    if den == 0 || num % den != 0 {
        return Err(Error::NonIntegral(arith::Rational::new(num, den)));
    }
    Ok(num / den)
}

struct Draft {
    label: OrderLabel,
    index: u64,
    support: Vec<PrimeIdealF>,
    w_b: u32,
    h_b: u64,
    formula: &'static str,
    basis: Vec<KElem>,
}

fn finish(k: &CmFieldDescriptor, over: Over, d: Draft) -> Result<OrderInvariant> {
    let lattice = if d.basis.len() == 4 {
        Lattice::new(d.basis.clone().try_into().expect("four elements"))?
    } else {
        Lattice::from_generators(&d.basis)?
    };
    let ar = k.arith();
    if lattice.structure_constants(ar).is_none() || !lattice.contains(&ar.one()) {
        return Err(inconsistent(format!("{} in {} is not a ring", d.label, k.name())));
    }
    let index = k
        .ok()
        .index_of(lattice.basis())
        .and_then(|i| i.to_u64())
        .ok_or_else(|| inconsistent(format!("{} is not contained in O_K", d.label)))?;
    if index != d.index {
        return Err(inconsistent(format!("[O_K : {}] = {index}, expected {}", d.label, d.index)));
    }
    if k.w_k % d.w_b != 0 {
        return Err(inconsistent(format!("w({}) = {} does not divide w_K = {}", d.label, d.w_b, k.w_k)));
    }
    Ok(OrderInvariant {
        label: d.label,
        field: k.tag,
        over,
        index_in_ok: d.index,
        conductor_support: d.support,
        w_b: d.w_b,
        h_b: d.h_b,
        formula: d.formula,
        lattice,
    })
}

fn e(c: [i64; 4], den: i64) -> KElem {
    KElem::from_ints(c, den)
}

/// `Z[sqrt p, sqrt -1]` on the power basis.
fn sqrt_order() -> Vec<KElem> {
    vec![e([1, 0, 0, 0], 1), e([0, 1, 0, 0], 1), e([0, 0, 1, 0], 1), e([0, 0, 0, 1], 1)]
}

/// `Z + Z sqrt p + Z sqrt -1 + Z (1 + sqrt -1)(1 + sqrt p)/2`
fn b12_basis() -> Vec<KElem> {
    vec![e([1, 0, 0, 0], 1), e([0, 1, 0, 0], 1), e([0, 0, 1, 0], 1), e([1, 1, 1, 1], 2)]
}

/// `Z[sqrt p, zeta_6]` in `K3`
fn b34_basis() -> Vec<KElem> {
    vec![e([1, 0, 0, 0], 1), e([0, 1, 0, 0], 1), e([1, 0, 1, 0], 2), e([0, 1, 0, 1], 2)]
}

fn maximal(k: &CmFieldDescriptor) -> Draft {
    Draft {
        label: OrderLabel::MaximalOrder,
        index: 1,
        support: Vec::new(),
        w_b: k.w_k,
        h_b: k.h_k,
        formula: "h(K)",
        basis: k.ok().basis().to_vec(),
    }
}

/// All `O_F`-orders `B` with `w(B) > 1`, field by field.
pub fn enumerate_suborders_of(field: &RealQuadField, cms: &[CmFieldDescriptor]) -> Result<Vec<OrderInvariant>> {
    let p = field.p;
    let dyadic = realquad::factor_rational_prime(field, 2)?;
    let mut out = Vec::new();
    for k in cms {
        out.push(finish(k, Over::OF, maximal(k))?);
        if k.tag != CmTag::K1 {
            continue;
        }
        if p == 2 {
            out.push(finish(
                k,
                Over::OF,
                Draft {
                    label: OrderLabel::B2sqrt2,
                    index: 2,
                    support: dyadic.clone(),
                    w_b: 2,
                    h_b: 1,
                    formula: "1",
                    basis: sqrt_order(),
                },
            )?);
        } else if p % 4 == 3 {
            let (h, formula) = if p == 3 {
                (k.h_k, "h(K1)")
            } else {
                (two_factor(p) * k.h_k, "(2-(2/p))h(K1)")
            };
            for (label, index, w_b, basis) in [
                (OrderLabel::B12, 2, 4, b12_basis()),
                (OrderLabel::B14, 4, 2, sqrt_order()),
            ] {
                out.push(finish(
                    k,
                    Over::OF,
                    Draft { label, index, support: dyadic.clone(), w_b, h_b: h, formula, basis },
                )?);
            }
            if p == 3 {
                let above3 = realquad::factor_rational_prime(field, 3)?;
                out.push(finish(
                    k,
                    Over::OF,
                    Draft {
                        label: OrderLabel::B13,
                        index: 3,
                        support: above3,
                        w_b: 3,
                        h_b: k.h_k,
                        formula: "h(K1)",
                        // 1, sqrt 3, zeta_6 = (1 + sqrt 3 i)/2, sqrt 3 zeta_6 = (sqrt 3 + 3 i)/2
                        basis: vec![e([1, 0, 0, 0], 1), e([0, 1, 0, 0], 1), e([1, 0, 0, 1], 2), e([0, 1, 3, 0], 2)],
                    },
                )?);
            }
        }
    }
    Ok(out)
}

/// Generators of `B_{3,2} = A[eps zeta_6]` (or its conjugate) as an `A`-module.
fn b32_generators(field: &RealQuadField, k: &CmFieldDescriptor, conjugate: bool) -> Vec<KElem> {
    let ar = k.arith();
    let eps = ar.from_quad(&field.eps);
    let zeta6 = e([1, 0, if conjugate { -1 } else { 1 }, 0], 2);
    let g = ar.mul(&eps, &zeta6);
    let g2 = ar.mul(&g, &g);
    let sp = ar.sqrt_p();
    vec![ar.one(), sp.clone(), g.clone(), ar.mul(&sp, &g), g2.clone(), ar.mul(&sp, &g2)]
}

/// All proper `Z[sqrt p]`-orders `B` with `w(B) > 1`, for `p = 1 (mod 4)`.
pub fn enumerate_proper_a_orders(field: &RealQuadField, cms: &[CmFieldDescriptor]) -> Result<Vec<OrderInvariant>> {
    let p = field.p;
    let varpi = realquad::varpi(field)? as u64;
    let dyadic = realquad::factor_rational_prime(field, 2)?;
    let t = two_factor(p);
    let mut out = Vec::new();

    let k1 = field_of(cms, CmTag::K1)?;
    let h1 = k1.h_k;
    for (label, index, h_b, formula, basis) in [
        (OrderLabel::B12, 2, exact_div(t * h1, varpi)?, "(2-(2/p))h(K1)/varpi", b12_basis()),
        (OrderLabel::B14, 4, exact_div(2 * t * h1, varpi)?, "2(2-(2/p))h(K1)/varpi", sqrt_order()),
    ] {
        let d = Draft { label, index, support: dyadic.clone(), w_b: 2, h_b, formula, basis };
        out.push(finish(k1, Over::A, d)?);
    }

    let k3 = field_of(cms, CmTag::K3)?;
    let h3 = k3.h_k;
    let d = Draft {
        label: OrderLabel::B34,
        index: 4,
        support: dyadic.clone(),
        w_b: 3,
        h_b: exact_div(3 * h3, varpi)?,
        formula: "3h(K3)/varpi",
        basis: b34_basis(),
    };
    out.push(finish(k3, Over::A, d)?);
    if varpi == 3 {
        for (label, conjugate) in [(OrderLabel::B32, false), (OrderLabel::B32conj, true)] {
            let d = Draft {
                label,
                index: 2,
                support: dyadic.clone(),
                w_b: 3,
                h_b: h3,
                formula: "h(K3)",
                basis: b32_generators(field, k3, conjugate),
            };
            out.push(finish(k3, Over::A, d)?);
        }
    }
    Ok(out)
}

/// Convenience wrapper: build the CM fields and the inventory in one go.
pub fn inventory(field: &RealQuadField, over: Over) -> Result<Vec<OrderInvariant>> {
    let cms = cmfield::enumerate_cm_fields(field)?;
    match over {
        Over::OF => enumerate_suborders_of(field, &cms),
        Over::A if field.p % 4 == 1 => enumerate_proper_a_orders(field, &cms),
        Over::A => Err(Error::WrongResidue {
            what: "proper Z[sqrt p]-orders",
            residue: 1,
            p: field.p,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realquad::build_field;

    fn rows(p: u64, over: Over) -> Vec<(OrderLabel, CmTag, u32, u64)> {
        inventory(&build_field(p).unwrap(), over)
            .unwrap()
            .iter()
            .map(|b| (b.label, b.field, b.w_b, b.h_b))
            .collect()
    }

    #[test]
    fn of_inventories() {
        use CmTag::*;
        use OrderLabel::*;
        assert_eq!(rows(13, Over::OF), vec![(MaximalOrder, K1, 2, 1), (MaximalOrder, K3, 3, 2)]);
        let p7: Vec<(OrderLabel, u32)> = rows(7, Over::OF).iter().map(|r| (r.0, r.2)).collect();
        assert_eq!(p7, vec![(MaximalOrder, 4), (B12, 4), (B14, 2), (MaximalOrder, 2), (MaximalOrder, 3)]);
        assert_eq!(
            rows(3, Over::OF),
            vec![
                (MaximalOrder, K1, 12, 1),
                (B12, K1, 4, 1),
                (B14, K1, 2, 1),
                (B13, K1, 3, 1),
                (MaximalOrder, K2, 2, 2)
            ]
        );
        assert_eq!(
            rows(2, Over::OF),
            vec![(MaximalOrder, K1, 4, 1), (B2sqrt2, K1, 2, 1), (MaximalOrder, K3, 3, 1)]
        );
    }

    #[test]
    fn a_inventories() {
        use OrderLabel::*;
        let labels = |p| rows(p, Over::A).iter().map(|r| r.0).collect::<Vec<_>>();
        assert_eq!(labels(13), vec![B12, B14, B34, B32, B32conj]);
        assert_eq!(labels(17), vec![B12, B14, B34]);
        assert_eq!(labels(5), vec![B12, B14, B34, B32, B32conj]);
        // p = 13: h(K1) = 1, h(K3) = 2, varpi = 3
        let h: Vec<u64> = rows(13, Over::A).iter().map(|r| r.3).collect();
        assert_eq!(h, vec![1, 2, 2, 2, 2]);
        let h: Vec<u64> = rows(17, Over::A).iter().map(|r| r.3).collect();
        let f = build_field(17).unwrap();
        let cms = cmfield::enumerate_cm_fields(&f).unwrap();
        assert_eq!(h, vec![cms[0].h_k, 2 * cms[0].h_k, 3 * cms[1].h_k]);
        assert!(inventory(&build_field(7).unwrap(), Over::A).is_err());
    }

    #[test]
    fn conductor_support() {
        let f3 = build_field(3).unwrap();
        let inv = inventory(&f3, Over::OF).unwrap();
        let b13 = inv.iter().find(|b| b.label == OrderLabel::B13).unwrap();
        assert_eq!(b13.conductor_support.len(), 1);
        assert_eq!(b13.conductor_support[0].ell, 3);
        assert!(inv[0].conductor_support.is_empty());
        assert_eq!(b13.index_in_ok, 3);
    }
}
