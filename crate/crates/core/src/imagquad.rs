//! Class numbers of imaginary quadratic fields by counting reduced forms.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// A positive definite form `a x^2 + b xy + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    d != 0 && d != 1 && arith::quadratic_discriminant(squarefree_part(d)) == d
}

fn squarefree_part(d: i64) -> i64 {
    let sign = d.signum();
    let core: u64 = arith::factorize(d.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(q, _)| q)
        .product();
    sign * core as i64
}

/// Reduced forms of discriminant `d`, scanning `a` up to `bound`.
fn scan(d: i64, bound: i64) -> Vec<ReducedForm> {
    let mut out = Vec::new();
    for a in 1..=bound {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = ReducedForm { a, b, c: num / (4 * a) };
            if f.is_reduced() {
                out.push(f);
            }
        }
    }
    out
}

pub fn reduced_forms(d: i64) -> Result<Vec<ReducedForm>> {
    if d >= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::InvalidDiscriminant(d));
    }
    // reduced forms have 3a^2 <= |d|
    let bound = arith::isqrt_u64(d.unsigned_abs() / 3) as i64;
    let forms = scan(d, bound);
    debug_assert_eq!(forms, scan(d, bound + 1));
    Ok(forms)
}

pub fn class_number_imag(d: i64) -> Result<u64> {
    Ok(reduced_forms(d)?.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(class_number_imag(-4), Ok(1));
        assert_eq!(class_number_imag(-20), Ok(2));
        assert_eq!(class_number_imag(-15), Ok(2));
        assert_eq!(
            reduced_forms(-20).unwrap(),
            vec![ReducedForm { a: 1, b: 0, c: 5 }, ReducedForm { a: 2, b: 2, c: 3 }]
        );
    }

    #[test]
    fn rejects_bad_discriminants() {
        for d in [5, 0, -1, -12, -16, -2] {
            assert_eq!(class_number_imag(d), Err(Error::InvalidDiscriminant(d)));
        }
    }

    #[test]
    fn class_number_one_below_200() {
        let ones: Vec<i64> = (-200..0)
            .rev()
            .filter(|&d| is_fundamental_discriminant(d))
            .filter(|&d| class_number_imag(d).unwrap() == 1)
            .collect();
        assert_eq!(ones, vec![-3, -4, -7, -8, -11, -19, -43, -67, -163]);
    }

    #[test]
    fn scan_is_exhaustive() {
        for d in (-400..0).filter(|&d| is_fundamental_discriminant(d)) {
            let bound = arith::isqrt_u64(d.unsigned_abs() / 3) as i64;
            assert_eq!(scan(d, bound), scan(d, bound + 3), "d={d}");
        }
    }
}
