//! Exact arithmetic in a quartic field `K = F(s)`, `F = Q(sqrt p)`, `s^2 = delta`,
//! together with full-rank lattices (orders) in `K`.
//!
//! Elements carry rational coordinates on the power basis `(1, sqrt p, s, sqrt p * s)`.

use std::array;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{inconsistent, Result};
use crate::realquad::QuadInt;

pub type Structure = [[[BigInt; 4]; 4]; 4];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KElem(pub [BigRational; 4]);

impl KElem {
    pub fn zero() -> Self {
        KElem(array::from_fn(|_| BigRational::zero()))
    }

    /// `(c0 + c1 sqrt p + c2 s + c3 sqrt p s) / den`
    pub fn from_ints(c: [i64; 4], den: i64) -> Self {
        KElem(c.map(|x| BigRational::new(x.into(), den.into())))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug)]
pub struct CmArith {
    p: BigRational,
    delta: (BigRational, BigRational),
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

impl CmArith {
    pub fn new(p: u64, delta: &QuadInt) -> Self {
        let (x, y) = delta.half_coords();
        let two = rat(2);
        CmArith {
            p: rat(p),
            delta: (rat(x) / &two, rat(y) / two),
        }
    }

    fn fmul(&self, a: (&BigRational, &BigRational), b: (&BigRational, &BigRational)) -> (BigRational, BigRational) {
        (a.0 * b.0 + &self.p * a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }

    pub fn mul(&self, x: &KElem, y: &KElem) -> KElem {
        let [x0, x1, x2, x3] = &x.0;
        let [y0, y1, y2, y3] = &y.0;
        let (r0, r1) = self.fmul((x0, x1), (y0, y1));
        let (t0, t1) = self.fmul((x2, x3), (y2, y3));
        let (t0, t1) = self.fmul((&t0, &t1), (&self.delta.0, &self.delta.1));
        let (u0, u1) = self.fmul((x0, x1), (y2, y3));
        let (v0, v1) = self.fmul((x2, x3), (y0, y1));
        KElem([r0 + t0, r1 + t1, u0 + v0, u1 + v1])
    }

    pub fn pow(&self, x: &KElem, n: u32) -> KElem {
        (0..n).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    pub fn add(&self, x: &KElem, y: &KElem) -> KElem {
        KElem(array::from_fn(|i| &x.0[i] + &y.0[i]))
    }

    pub fn sub(&self, x: &KElem, y: &KElem) -> KElem {
        KElem(array::from_fn(|i| &x.0[i] - &y.0[i]))
    }

    pub fn scale(&self, x: &KElem, c: &BigRational) -> KElem {
        KElem(array::from_fn(|i| &x.0[i] * c))
    }

    /// Complex conjugation: `s -> -s`. Since `delta` is totally negative this
    /// is complex conjugation under every embedding.
    pub fn conj(&self, x: &KElem) -> KElem {
        let [a, b, c, d] = &x.0;
        KElem([a.clone(), b.clone(), -c, -d])
    }

    pub fn trace(&self, x: &KElem) -> BigRational {
        &x.0[0] * rat(4)
    }

    pub fn one(&self) -> KElem {
        KElem::from_ints([1, 0, 0, 0], 1)
    }

    pub fn from_int(&self, n: i64) -> KElem {
        KElem::from_ints([n, 0, 0, 0], 1)
    }

    pub fn sqrt_p(&self) -> KElem {
        KElem::from_ints([0, 1, 0, 0], 1)
    }

    pub fn s(&self) -> KElem {
        KElem::from_ints([0, 0, 1, 0], 1)
    }

    pub fn from_quad(&self, x: &QuadInt) -> KElem {
        let (a, b) = x.half_coords();
        let two = rat(2);
        KElem([rat(a) / &two, rat(b) / two, BigRational::zero(), BigRational::zero()])
    }

    /// Characteristic polynomial of multiplication by `x` over `Q`, as
    /// coefficients `c[0] + c[1] T + ... + c[4] T^4` with `c[4] = 1`.
    pub fn char_poly(&self, x: &KElem) -> [BigRational; 5] {
        let basis = [
            self.one(),
            self.sqrt_p(),
            self.s(),
            self.mul(&self.sqrt_p(), &self.s()),
        ];
        let cols: Vec<KElem> = basis.iter().map(|b| self.mul(x, b)).collect();
        let a: Vec<Vec<BigRational>> = (0..4)
            .map(|i| (0..4).map(|j| cols[j].0[i].clone()).collect())
            .collect();
        faddeev_leverrier(&a)
    }

    pub fn is_integral(&self, x: &KElem) -> bool {
        self.char_poly(x).iter().all(|c| c.is_integer())
    }
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn faddeev_leverrier(a: &[Vec<BigRational>]) -> [BigRational; 5] {
    let n = a.len();
    let mut c: Vec<BigRational> = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr = (0..n).fold(BigRational::zero(), |acc, i| acc + &am[i][i]);
        c[n - k] = -tr / rat(k as i64);
    }
    array::from_fn(|i| c[i].clone())
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn mat_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..2 * n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    det
}

/// Hermite normal form (upper triangular, positive diagonal, reduced above
/// the diagonal) of a full-rank integer lattice in `Z^4` given by generators.
pub fn hnf(gens: &[[BigInt; 4]]) -> Result<[[BigInt; 4]; 4]> {
    let mut rows: Vec<[BigInt; 4]> = gens.to_vec();
    let mut out: Vec<[BigInt; 4]> = Vec::new();
    for col in 0..4 {
        // gcd-combine all rows on this column into one pivot row
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let min = *nonzero
                .iter()
                .min_by_key(|&&i| rows[i][col].abs())
                .expect("nonempty");
            for &i in &nonzero {
                if i != min {
                    let q = rows[i][col].div_floor(&rows[min][col]);
                    let pivot = rows[min].clone();
                    for j in 0..4 {
                        rows[i][j] -= &q * &pivot[j];
                    }
                }
            }
        }
        let idx = (0..rows.len())
            .find(|&i| !rows[i][col].is_zero())
            .ok_or_else(|| inconsistent("lattice is not of full rank"))?;
        let mut pivot = rows.swap_remove(idx);
        if pivot[col].is_negative() {
            for x in pivot.iter_mut() {
                *x = -&*x;
            }
        }
        out.push(pivot);
    }
    let mut h: [[BigInt; 4]; 4] = array::from_fn(|i| out[i].clone());
    for i in 0..4 {
        for k in 0..i {
            let q = h[k][i].div_floor(&h[i][i]);
            if !q.is_zero() {
                let row = h[i].clone();
                for j in 0..4 {
                    h[k][j] -= &q * &row[j];
                }
            }
        }
    }
    Ok(h)
}

/// A full-rank lattice in `K` with a chosen basis.
#[derive(Clone, Debug)]
pub struct Lattice {
    rows: [KElem; 4],
    inv: Vec<Vec<BigRational>>,
}

impl Lattice {
    pub fn new(rows: [KElem; 4]) -> Result<Self> {
        let m: Vec<Vec<BigRational>> = rows.iter().map(|r| r.0.to_vec()).collect();
        let inv = mat_inverse(&m).ok_or_else(|| inconsistent("basis is linearly dependent"))?;
        Ok(Lattice { rows, inv })
    }

    /// The Z-span of a finite generating set of rank 4, in Hermite normal form.
    pub fn from_generators(gens: &[KElem]) -> Result<Self> {
        let den = gens
            .iter()
            .flat_map(|g| g.0.iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let rows: Vec<[BigInt; 4]> = gens
            .iter()
            .map(|g| array::from_fn(|i| (&g.0[i] * BigRational::from_integer(den.clone())).to_integer()))
            .collect();
        let h = hnf(&rows)?;
        let d = BigRational::from_integer(den);
        Self::new(array::from_fn(|i| KElem(array::from_fn(|j| BigRational::from_integer(h[i][j].clone()) / &d))))
    }

    pub fn basis(&self) -> &[KElem; 4] {
        &self.rows
    }

    pub fn coords(&self, v: &KElem) -> [BigRational; 4] {
        array::from_fn(|j| (0..4).fold(BigRational::zero(), |acc, i| acc + &v.0[i] * &self.inv[i][j]))
    }

    pub fn int_coords(&self, v: &KElem) -> Option<[BigInt; 4]> {
        let c = self.coords(v);
        c.iter().all(|x| x.is_integer()).then(|| c.map(|x| x.to_integer()))
    }

    pub fn contains(&self, v: &KElem) -> bool {
        self.int_coords(v).is_some()
    }

    /// `sum c_i e_i`
    pub fn combine(&self, c: &[BigInt; 4]) -> KElem {
        KElem(array::from_fn(|k| {
            (0..4).fold(BigRational::zero(), |acc, i| {
                acc + &self.rows[i].0[k] * BigRational::from_integer(c[i].clone())
            })
        }))
    }

    /// `e_i e_j = sum_k c[i][j][k] e_k`, or `None` if some coefficient is
    /// not an integer (the lattice is not a ring).
    pub fn structure_constants(&self, ar: &CmArith) -> Option<Structure> {
        let mut out: Structure = array::from_fn(|_| array::from_fn(|_| array::from_fn(|_| BigInt::zero())));
        for i in 0..4 {
            for j in i..4 {
                let c = self.int_coords(&ar.mul(&self.rows[i], &self.rows[j]))?;
                out[i][j] = c.clone();
                out[j][i] = c;
            }
        }
        Some(out)
    }

    /// `det(Tr(e_i e_j))`
    pub fn discriminant(&self, ar: &CmArith) -> BigRational {
        let g: Vec<Vec<BigRational>> = (0..4)
            .map(|i| (0..4).map(|j| ar.trace(&ar.mul(&self.rows[i], &self.rows[j]))).collect())
            .collect();
        mat_det(&g)
    }

    /// Gram matrix of the positive definite form `Tr(x conj(y))`.
    pub fn hermitian_gram(&self, ar: &CmArith) -> Vec<Vec<BigRational>> {
        (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| ar.trace(&ar.mul(&self.rows[i], &ar.conj(&self.rows[j]))))
                    .collect()
            })
            .collect()
    }

    /// `[self : sub]` for a sublattice given by its own basis.
    pub fn index_of(&self, sub: &[KElem; 4]) -> Option<BigInt> {
        let m: Vec<Vec<BigRational>> = sub
            .iter()
            .map(|v| self.int_coords(v).map(|c| c.iter().map(|x| BigRational::from_integer(x.clone())).collect()))
            .collect::<Option<_>>()?;
        Some(mat_det(&m).abs().to_integer())
    }
}
