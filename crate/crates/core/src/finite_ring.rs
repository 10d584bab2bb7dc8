//! Finite commutative rings `O / q O` for a rank-4 order `O` and a small prime `q`,
//! enumerated element by element.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::arith;
use crate::numfield::Structure;

/// `O / q O` with elements encoded as base-`q` integers over the order's basis.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    q: u32,
    size: u32,
    mul: Vec<u32>,
    one: u32,
}

impl QuotientRing {
    /// `one` gives the coordinates of `1` in the order's basis.
    pub fn new(structure: &Structure, one: &[BigInt; 4], q: u32) -> Self {
        let size = q.pow(4);
        let c: Vec<Vec<Vec<u32>>> = structure
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().map(|x| arith::mod_u64(x, q as u64) as u32).collect())
                    .collect()
            })
            .collect();
        let mut ring = QuotientRing {
            q,
            size,
            mul: vec![0; (size * size) as usize],
            one: 0,
        };
        ring.one = ring.encode(&one.clone().map(|x| arith::mod_u64(&x, q as u64) as u32));
        for x in 0..size {
            let xv = ring.decode(x);
            for y in x..size {
                let yv = ring.decode(y);
                let mut out = [0u32; 4];
                for i in 0..4 {
                    for j in 0..4 {
                        let coef = xv[i] * yv[j] % q;
                        if coef == 0 {
                            continue;
                        }
                        for (k, o) in out.iter_mut().enumerate() {
                            *o = (*o + coef * c[i][j][k]) % q;
                        }
                    }
                }
                let z = ring.encode(&out);
                ring.mul[(x * size + y) as usize] = z;
                ring.mul[(y * size + x) as usize] = z;
            }
        }
        ring
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn characteristic(&self) -> u32 {
        self.q
    }

    pub fn one(&self) -> u32 {
        self.one
    }

    pub fn encode(&self, v: &[u32; 4]) -> u32 {
        v.iter().rev().fold(0, |acc, &d| acc * self.q + d % self.q)
    }

    pub fn decode(&self, mut x: u32) -> [u32; 4] {
        let mut out = [0; 4];
        for o in out.iter_mut() {
            *o = x % self.q;
            x /= self.q;
        }
        out
    }

    /// Reduce integer coordinates on the order's basis.
    pub fn reduce(&self, v: &[BigInt; 4]) -> u32 {
        self.encode(&v.clone().map(|x| arith::mod_u64(&x, self.q as u64) as u32))
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[(x * self.size + y) as usize]
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        let (a, b) = (self.decode(x), self.decode(y));
        self.encode(&std::array::from_fn(|i| (a[i] + b[i]) % self.q))
    }

    pub fn neg(&self, x: u32) -> u32 {
        let a = self.decode(x);
        self.encode(&a.map(|d| (self.q - d) % self.q))
    }

    pub fn is_unit(&self, x: u32) -> bool {
        (0..self.size).any(|y| self.mul(x, y) == self.one)
    }

    pub fn unit_count(&self) -> u32 {
        (0..self.size).filter(|&x| self.is_unit(x)).count() as u32
    }

    pub fn is_nilpotent(&self, x: u32) -> bool {
        let mut y = x;
        for _ in 0..8 {
            if y == 0 {
                return true;
            }
            y = self.mul(y, x);
        }
        y == 0
    }

    pub fn nilradical(&self) -> Vec<u32> {
        (0..self.size).filter(|&x| self.is_nilpotent(x)).collect()
    }

    pub fn idempotents(&self) -> Vec<u32> {
        (0..self.size).filter(|&x| self.mul(x, x) == x).collect()
    }

    /// Idempotents `e != 0` not expressible as `e1 + e2` with orthogonal nonzero idempotents.
    pub fn primitive_idempotents(&self) -> Vec<u32> {
        let ids = self.idempotents();
        ids.iter()
            .copied()
            .filter(|&e| e != 0)
            .filter(|&e| !ids.iter().any(|&f| f != 0 && f != e && self.mul(e, f) == f))
            .collect()
    }

    /// The ideal `e R`, as a sorted set.
    pub fn principal_ideal(&self, x: u32) -> BTreeSet<u32> {
        (0..self.size).map(|y| self.mul(x, y)).collect()
    }

    /// Additive span of a set of elements.
    pub fn span(&self, gens: &[u32]) -> BTreeSet<u32> {
        let mut set: BTreeSet<u32> = [0].into();
        for &g in gens {
            let mut next = set.clone();
            let mut m = g;
            while m != 0 {
                for &s in &set {
                    next.insert(self.add(s, m));
                }
                m = self.add(m, g);
            }
            set = next;
        }
        set
    }

    /// Number of units in `R / I` for an ideal `I`.
    pub fn quotient_unit_count(&self, ideal: &BTreeSet<u32>) -> u32 {
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for x in 0..self.size {
            let coset = self.coset_rep(x, ideal);
            if !seen.insert(coset) {
                continue;
            }
            if self.is_unit_mod(x, ideal) {
                count += 1;
            }
        }
        count
    }

    /// Units of the image of a subring `S` in `R / I`.
    pub fn subring_quotient_unit_count(&self, subring: &BTreeSet<u32>, ideal: &BTreeSet<u32>) -> u32 {
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for &x in subring {
            if seen.insert(self.coset_rep(x, ideal)) && self.is_unit_mod(x, ideal) {
                count += 1;
            }
        }
        count
    }

    fn coset_rep(&self, x: u32, ideal: &BTreeSet<u32>) -> u32 {
        ideal.iter().map(|&i| self.add(x, i)).min().unwrap_or(x)
    }

    fn is_unit_mod(&self, x: u32, ideal: &BTreeSet<u32>) -> bool {
        let minus_one = self.neg(self.one);
        (0..self.size).any(|y| ideal.contains(&self.add(self.mul(x, y), minus_one)))
    }

    /// The smallest subring containing the given elements.
    pub fn subring_generated(&self, gens: &[u32]) -> BTreeSet<u32> {
        let mut set = self.span(&[&[self.one][..], gens].concat());
        loop {
            let elems: Vec<u32> = set.iter().copied().collect();
            let products: Vec<u32> = elems
                .iter()
                .flat_map(|&a| elems.iter().map(move |&b| (a, b)))
                .map(|(a, b)| self.mul(a, b))
                .filter(|z| !set.contains(z))
                .collect();
            if products.is_empty() {
                return set;
            }
            let all: Vec<u32> = elems.into_iter().chain(products).collect();
            set = self.span(&all);
        }
    }

    /// `log_q |S|` for an additive subgroup `S`.
    pub fn dimension(&self, set: &BTreeSet<u32>) -> u32 {
        let mut n = set.len() as u32;
        let mut d = 0;
        while n > 1 {
            n /= self.q;
            d += 1;
        }
        d
    }
}

/// One local factor `e R` of a finite ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFactor {
    pub idempotent: u32,
    /// `log_q |e R|`
    pub dimension: u32,
    /// `log_q` of the residue field size of `e R`.
    pub residue_degree: u32,
    pub has_nilpotents: bool,
}

pub fn local_factors(ring: &QuotientRing) -> Vec<LocalFactor> {
    ring.primitive_idempotents()
        .into_iter()
        .map(|e| {
            let factor = ring.principal_ideal(e);
            let nil: BTreeSet<u32> = factor.iter().copied().filter(|&x| ring.is_nilpotent(x)).collect();
            let dimension = ring.dimension(&factor);
            LocalFactor {
                idempotent: e,
                dimension,
                residue_degree: dimension - ring.dimension(&nil),
                has_nilpotents: nil.len() > 1,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::array;

    /// `Z[x]/(x^4 - c)` on the basis `1, x, x^2, x^3`.
    fn cyclic_structure(modulus_poly_const: i64) -> Structure {
        array::from_fn(|i| {
            array::from_fn(|j| {
                let mut v: [BigInt; 4] = array::from_fn(|_| BigInt::from(0));
                let k = i + j;
                if k < 4 {
                    v[k] = 1.into();
                } else {
                    v[k - 4] = modulus_poly_const.into();
                }
                v
            })
        })
    }

    fn one() -> [BigInt; 4] {
        [1.into(), 0.into(), 0.into(), 0.into()]
    }

    #[test]
    fn f2_x4_minus_1_is_local() {
        // F_2[x]/(x+1)^4
        let r = QuotientRing::new(&cyclic_structure(1), &one(), 2);
        assert_eq!(r.size(), 16);
        assert_eq!(r.unit_count(), 8);
        let f = local_factors(&r);
        assert_eq!(f.len(), 1);
        assert!(f[0].has_nilpotents);
        assert_eq!(f[0].residue_degree, 1);
    }

    #[test]
    fn f3_x4_plus_1_splits_into_two_f9() {
        // x^4 + 1 = (x^2 + x + 2)(x^2 + 2x + 2) over F_3
        let r = QuotientRing::new(&cyclic_structure(-1), &one(), 3);
        let f = local_factors(&r);
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|l| l.dimension == 2 && l.residue_degree == 2 && !l.has_nilpotents));
        assert_eq!(r.unit_count(), 64);
    }

    #[test]
    fn quotient_units() {
        let r = QuotientRing::new(&cyclic_structure(1), &one(), 2);
        // ideal generated by x + 1 is the maximal ideal; quotient F_2
        let x_plus_1 = r.encode(&[1, 1, 0, 0]);
        let m = r.principal_ideal(x_plus_1);
        assert_eq!(m.len(), 8);
        assert_eq!(r.quotient_unit_count(&m), 1);
        let prime_field = r.subring_generated(&[]);
        assert_eq!(prime_field.len(), 2);
        assert_eq!(r.subring_quotient_unit_count(&prime_field, &[0].into()), 1);
    }
}
