use std::collections::HashMap;
use std::sync::OnceLock;

use proptest::prelude::*;

use sqrtp::arith::{self, Rational};
use sqrtp::cmfield::CmTag;
use sqrtp::orders::OrderLabel;
use sqrtp::quaternion::{self, EichlerContext, EichlerInput};
use sqrtp::realquad::{self, QuadBasis, QuadInt};

fn contexts() -> &'static HashMap<u64, EichlerContext> {
    static CTX: OnceLock<HashMap<u64, EichlerContext>> = OnceLock::new();
    CTX.get_or_init(|| {
        arith::primes_up_to(400)
            .into_iter()
            .map(|p| (p, EichlerContext::new(p).unwrap()))
            .collect()
    })
}

fn prime_below(n: u64) -> impl Strategy<Value = u64> {
    let primes = arith::primes_up_to(n);
    (0..primes.len()).prop_map(move |i| primes[i])
}

proptest! {
    #[test]
    fn kronecker_is_multiplicative(a in -500i64..500, b in -500i64..500, n in 1i64..400) {
        let n = 2 * n + 1;
        let lhs = arith::kronecker(a * b, n).unwrap();
        let rhs = arith::kronecker(a, n).unwrap() * arith::kronecker(b, n).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = Rational::new(n, d);
        let s = r.to_string();
        prop_assert_eq!(s.parse::<Rational>().unwrap(), r.clone());
        let json = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r);
    }

    #[test]
    fn quadratic_norm_is_multiplicative(p in prime_below(200), a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
        let basis = if p % 4 == 1 { QuadBasis::HalfPlusSqrt } else { QuadBasis::Sqrt };
        let x = QuadInt::new(p, a.into(), b.into(), basis).unwrap();
        let y = QuadInt::new(p, c.into(), d.into(), basis).unwrap();
        prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!(x.mul(&x.conj()), QuadInt::from_int(p, x.norm()));
    }

    #[test]
    fn unit_powers_keep_unit_norm(p in prime_below(300), k in 1u32..6) {
        let f = realquad::build_field(p).unwrap();
        let n = f.eps.pow(k).norm();
        prop_assert_eq!(n, num_bigint::BigInt::from(f.norm_eps as i64).pow(k));
    }

    #[test]
    fn random_inputs_give_integral_class_numbers(
        p in prime_below(400),
        picks in proptest::collection::vec((0usize..64, any::<bool>()), 0..6),
    ) {
        let ctx = &contexts()[&p];
        let mut primes = Vec::new();
        for ell in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            primes.extend(realquad::factor_rational_prime(&ctx.field, ell).unwrap());
        }
        let mut disc = Vec::new();
        let mut level = Vec::new();
        for (i, in_disc) in picks {
            let q = primes[i % primes.len()];
            if disc.contains(&q) || level.contains(&q) {
                continue;
            }
            if in_disc { disc.push(q) } else { level.push(q) }
        }
        if disc.len() % 2 == 1 {
            disc.pop();
        }
        let input = EichlerInput::new(&ctx.field, disc, level).unwrap();
        let r = quaternion::class_number_eichler(ctx, &input).unwrap();
        prop_assert!(r.h_o >= 1);
        prop_assert_eq!(Rational::from_integer(r.h_o), r.mass + r.elliptic);
    }
}

/// For `p = 3 mod 4` the orders with 2-primary conductor have embedding product
/// `C` times the odd part of the field's.
#[test]
fn dyadic_factorization_of_embedding_products() {
    for (&p, ctx) in contexts().iter().filter(|(p, _)| **p % 4 == 3 && **p < 200) {
        let inputs = quaternion::input_family(&ctx.field, &[2, 3, 5, 7, 11, 13], 2).unwrap();
        for b in ctx.inventory.iter().filter(|b| matches!(b.label, OrderLabel::B12 | OrderLabel::B14)) {
            assert_eq!(b.field, CmTag::K1);
            for input in &inputs {
                let lhs = quaternion::embedding_product(input, |q| ctx.eichler(b, q)).unwrap();
                let odd = quaternion::embedding_product(&quaternion::odd_part(input), |q| ctx.artin(CmTag::K1, q)).unwrap();
                assert_eq!(lhs, quaternion::dyadic_c_factor(input) * odd, "p={p} {}", b.label);
            }
        }
    }
}

#[test]
fn input_family_shape() {
    let ctx = &contexts()[&13];
    let inputs = quaternion::input_family(&ctx.field, &[2, 3], 2).unwrap();
    // primes P2, P3:1, P3:2
    assert!(inputs.iter().all(|i| i.disc.len() % 2 == 0 && i.disc.len() <= 2 && i.level.len() <= 2));
    assert_eq!(inputs.len(), 7 + 3 * 2);
}
