//! Exact integer and rational helpers shared by the rest of the crate.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Kronecker symbol `(a/n)`.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut result: i8 = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    // Jacobi symbol for odd n.
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    Ok(if n == 1 { result } else { 0 })
}

/// Sum of the positive divisors of `n`.
pub fn sigma1(n: i64) -> Result<u64> {
    if n <= 0 {
        return Err(Error::NonPositive(n));
    }
    Ok(divisor_sum(n as u64))
}

pub(crate) fn divisor_sum(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(q, e)| (q.pow(e + 1) - 1) / (q - 1))
        .product()
}

/// Prime factorization by trial division; `factorize(1)` is empty.
/// `n = 0` has no factorization and also yields an empty list.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut q = 2u64;
    while q.saturating_mul(q) <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact on the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n % q == 0 {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

pub(crate) fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

pub(crate) fn exact_sqrt_u128(n: u128) -> Option<u128> {
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Square root of a non-negative big integer if it is a perfect square.
pub(crate) fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// A square root of `a` modulo the odd prime `q` (Tonelli-Shanks).
pub(crate) fn sqrt_mod_prime(a: u64, q: u64) -> Option<u64> {
    let a = a % q;
    if a == 0 {
        return Some(0);
    }
    if q == 2 {
        return Some(a);
    }
    if pow_mod(a, (q - 1) / 2, q) != 1 {
        return None;
    }
    let s = (q - 1).trailing_zeros();
    let odd = (q - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (q - 1) / 2, q) != q - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, odd, q);
    let mut t = pow_mod(a, odd, q);
    let mut r = pow_mod(a, (odd + 1) / 2, q);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, q);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), q);
        m = i;
        c = mul_mod(b, b, q);
        t = mul_mod(t, c, q);
        r = mul_mod(r, b, q);
    }
    Some(r)
}

/// Largest `k` with `q^k | n`, for `n != 0`.
pub(crate) fn valuation(n: &BigInt, q: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let q = BigInt::from(q);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (d, r) = n.div_rem(&q);
        if !r.is_zero() {
            return k;
        }
        n = d;
        k += 1;
    }
}

/// `n mod q` as a value in `[0, q)`.
pub(crate) fn mod_u64(n: &BigInt, q: u64) -> u64 {
    n.mod_floor(&BigInt::from(q)).to_u64().expect("residue fits in u64")
}

pub(crate) fn inv_mod(a: u64, q: u64) -> u64 {
    // q prime
    pow_mod(a, q - 2, q)
}

/// Fundamental discriminant of `Q(sqrt(m))` for square-free `m != 1`.
pub(crate) fn quadratic_discriminant(m: i64) -> i64 {
    if m.rem_euclid(4) == 1 {
        m
    } else {
        4 * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn legendre_brute(a: i64, q: i64) -> i8 {
        let a = a.rem_euclid(q);
        if a == 0 {
            return 0;
        }
        if (1..q).any(|x| (x * x) % q == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-1, 5), Ok(1));
        assert_eq!(kronecker(2, 7), Ok(1));
        assert_eq!(kronecker(3, 9), Ok(0));
        assert_eq!(kronecker(5, 0), Err(Error::ZeroModulus));
        assert_eq!(kronecker(5, 2), Ok(-1));
        assert_eq!(kronecker(17, 2), Ok(1));
        assert_eq!(kronecker(-3, -1), Ok(-1));
    }

    #[test]
    fn kronecker_matches_legendre_for_odd_primes() {
        for &q in &[3i64, 5, 7, 11, 13, 97, 101] {
            for a in -60..60 {
                assert_eq!(kronecker(a, q).unwrap(), legendre_brute(a, q), "({a}/{q})");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_grid() {
        for n in 1..=50 {
            for a in -50i64..=50 {
                for b in -50i64..=50 {
                    let lhs = kronecker(a, n).unwrap() * kronecker(b, n).unwrap();
                    assert_eq!(lhs, kronecker(a * b, n).unwrap(), "a={a} b={b} n={n}");
                }
            }
        }
    }

    #[test]
    fn kronecker_multiplicative_in_modulus() {
        for a in -30i64..=30 {
            for m in 1..=30 {
                for n in 1..=30 {
                    let lhs = kronecker(a, m).unwrap() * kronecker(a, n).unwrap();
                    assert_eq!(lhs, kronecker(a, m * n).unwrap());
                }
            }
        }
    }

    #[test]
    fn sigma1_examples() {
        assert_eq!(sigma1(1), Ok(1));
        assert_eq!(sigma1(2), Ok(3));
        // divisors 1, 2, 3, 6
        assert_eq!(sigma1(6), Ok(12));
        assert_eq!(sigma1(0), Err(Error::NonPositive(0)));
        assert_eq!(sigma1(-4), Err(Error::NonPositive(-4)));
    }

    fn sigma_brute(n: u64) -> u64 {
        (1..=n).filter(|d| n % d == 0).sum()
    }

    #[test]
    fn sigma1_multiplicative_on_coprime() {
        for m in 1..=100u64 {
            for n in 1..=100u64 {
                if num_integer::gcd(m, n) == 1 {
                    assert_eq!(divisor_sum(m * n), divisor_sum(m) * divisor_sum(n));
                }
            }
        }
        for n in 1..=2000 {
            assert_eq!(divisor_sum(n), sigma_brute(n));
        }
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).is_empty());
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(997), vec![(997, 1)]);
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let primes = primes_up_to(20_000);
        let mut it = primes.iter().peekable();
        for n in 0..=20_000u64 {
            let expected = it.peek() == Some(&&n);
            if expected {
                it.next();
            }
            assert_eq!(is_prime(n), expected, "{n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn tonelli_shanks() {
        for &q in &[3u64, 5, 13, 17, 41, 97, 7919] {
            for a in 1..q.min(200) {
                match sqrt_mod_prime(a, q) {
                    Some(r) => assert_eq!(r * r % q, a % q),
                    None => assert_eq!(kronecker(a as i64, q as i64).unwrap(), -1),
                }
            }
        }
    }

    #[test]
    fn rational_text_round_trip() {
        let r = Rational::new(-6, 8);
        assert_eq!(r.to_string(), "-3/4");
        assert_eq!("-3/4".parse::<Rational>().unwrap(), r);
        assert_eq!("5".parse::<Rational>().unwrap(), Rational::from(5));
        assert!("1/0".parse::<Rational>().is_err());
    }

    proptest! {
        #[test]
        fn sigma1_multiplicative(m in 1u64..10_000, n in 1u64..10_000) {
            prop_assume!(num_integer::gcd(m, n) == 1);
            prop_assert_eq!(divisor_sum(m * n), divisor_sum(m) * divisor_sum(n));
        }

        #[test]
        fn factorization_reconstructs(n in 1u64..1_000_000) {
            let f = factorize(n);
            prop_assert_eq!(f.iter().map(|&(q, e)| q.pow(e)).product::<u64>(), n);
            prop_assert!(f.iter().all(|&(q, _)| is_prime(q)));
        }

        #[test]
        fn rational_always_lowest_terms(a in -10_000i64..10_000, b in 1i64..10_000) {
            let r = Rational::new(a, b);
            prop_assert!(r.denom() > &BigInt::zero());
            prop_assert!(r.numer().gcd(r.denom()).is_one());
        }
    }
}
