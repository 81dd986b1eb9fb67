use ampsum_core::arith::{jacobi, primes_up_to};
use ampsum_core::quadcount::{
    ad_coupled_exact, formula_applies, local_factor_check, nu_brute, nu_fast, nu_prime_power, CharValue,
    QuadCountQuery, Quadratic,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Residues `x mod n` with `a x^2 - m x + b = 0 (mod n)`, in wide arithmetic.
fn oracle(n: u64, m: i64, a: i64, b: i64) -> u64 {
    let nn = n as i128;
    (0..nn).filter(|&x| (a as i128 * x * x - m as i128 * x + b as i128).rem_euclid(nn) == 0).count() as u64
}

fn q(n: u64, m: i64, a: i64, b: i64) -> QuadCountQuery {
    QuadCountQuery::new(n, m, a, b).unwrap()
}

#[test]
fn count_examples() {
    assert_eq!(nu_brute(&q(5, 0, 1, 1)), 2);
    assert_eq!(nu_brute(&q(3, 0, 1, 1)), 0);
    assert_eq!(nu_brute(&q(1, 4, -3, 9)), 1);
    assert_eq!(nu_fast(&q(343, 1, 1, 1)).count, 2);
    assert_eq!(nu_brute(&q(343, 1, 1, 1)), 2);
    assert_eq!(nu_fast(&q(15, 0, 1, 1)).count, 0);
}

#[test]
fn local_factor_examples() {
    let one = CharValue(Complex64::new(1.0, 0.0));
    let r = local_factor_check(7, one, 1, Complex64::new(2.0, 0.0), 1e-10).unwrap();
    assert!((r.closed_form.re - 25.0 / 24.0).abs() < 1e-14);
    assert_eq!(r.exact_equal, Some(true));
    let r = local_factor_check(7, one, -1, Complex64::new(2.0, 0.0), 1e-10).unwrap();
    assert!((r.closed_form - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    assert_eq!(r.exact_equal, Some(true));
    let third = CharValue(Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0));
    let r = local_factor_check(11, third, 1, Complex64::new(1.5, 0.0), 1e-10).unwrap();
    assert!(r.float_residual < 1e-10);
}

#[test]
fn coupled_sum_is_one() {
    let one = BigRational::from_integer(BigInt::from(1));
    for quad in [Quadratic { m: 3, a: 1, b: 1 }, Quadratic { m: 1, a: 1, b: -1 }, Quadratic { m: 5, a: 2, b: 1 }] {
        for n in [1u64, 2, 30, 120] {
            assert_eq!(ad_coupled_exact(quad, n, 2), one);
        }
    }
}

proptest! {
    #[test]
    fn brute_matches_oracle(n in 1u64..400, m in -20i64..20, a in -10i64..10, b in -10i64..10) {
        prop_assert_eq!(nu_brute(&q(n, m, a, b)), oracle(n, m, a, b));
    }

    #[test]
    fn fast_matches_brute(k in 0u64..250, m in 0i64..=10, a in 0i64..=10, b in 0i64..=10) {
        let query = q(2 * k + 1, m, a, b);
        prop_assume!(formula_applies(&query));
        prop_assert_eq!(nu_fast(&query).count, nu_brute(&query));
    }

    #[test]
    fn hensel_stability(i in 1usize..15, k in 1u32..=4, m in -10i64..10, a in 1i64..10, b in -10i64..10) {
        let p = primes_up_to(50)[i];
        prop_assume!(a % p as i64 != 0);
        let delta = m * m - 4 * a * b;
        let sym = jacobi(delta, p).unwrap();
        prop_assume!(sym != 0);
        let pk = p.pow(k);
        prop_assert_eq!(oracle(pk, m, a, b), (1 + sym) as u64);
        prop_assert_eq!(nu_prime_power(p, k, m, a, b), oracle(pk, m, a, b));
    }

    #[test]
    fn multiplicative(n1 in 1u64..40, n2 in 1u64..40, m in -10i64..10, a in -5i64..6, b in -10i64..10) {
        prop_assume!(gcd(n1, n2) == 1);
        prop_assert_eq!(nu_brute(&q(n1 * n2, m, a, b)), oracle(n1, m, a, b) * oracle(n2, m, a, b));
    }
}
