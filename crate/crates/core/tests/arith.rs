use std::f64::consts::TAU;

use ampsum_core::arith::{
    char_group, gauss_sum, jacobi, mobius, mod_inverse, ramanujan_f, ArithError, DirichletCharacter,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn trial_factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn pow_mod(b: u64, e: u64, m: u64) -> u64 {
    (0..e).fold(1 % m, |acc, _| acc * b % m)
}

#[test]
fn inverse_examples() {
    assert_eq!(mod_inverse(1, 7).unwrap().value(), 1);
    assert_eq!(mod_inverse(2, 5).unwrap().value(), 3);
    assert_eq!(mod_inverse(3, 7).unwrap().value(), 5);
    assert!(matches!(mod_inverse(6, 9), Err(ArithError::NonInvertible { .. })));
}

#[test]
fn jacobi_examples_and_euler_criterion() {
    assert_eq!(jacobi(1, 3).unwrap(), 1);
    assert_eq!(jacobi(2, 3).unwrap(), -1);
    assert_eq!(jacobi(-4, 5).unwrap(), 1);
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 97] {
        for a in 0..p {
            let e = pow_mod(a, (p - 1) / 2, p);
            let want = match e {
                0 => 0,
                1 => 1,
                _ => -1,
            };
            assert_eq!(jacobi(a as i64, p).unwrap(), want, "({a}/{p})");
        }
    }
}

#[test]
fn mobius_matches_factorization() {
    assert_eq!(mobius(1), 1);
    assert_eq!(mobius(6), 1);
    assert_eq!(mobius(12), 0);
    for n in 1..2000u64 {
        let f = trial_factor(n);
        let square = f.windows(2).any(|w| w[0] == w[1]);
        let want = if square { 0 } else if f.len() % 2 == 0 { 1 } else { -1 };
        assert_eq!(mobius(n), want, "n = {n}");
    }
}

#[test]
fn ramanujan_matches_unit_cosine_sum() {
    assert_eq!(ramanujan_f(1, 17), 1);
    assert_eq!(ramanujan_f(2, 3), -1);
    assert_eq!(ramanujan_f(6, 4), -1);
    for n in 1..=40u64 {
        for m in -20i64..=20 {
            let direct: f64 = (1..=n)
                .filter(|&x| gcd(x, n) == 1)
                .map(|x| (TAU * (x as f64) * (m as f64) / n as f64).cos())
                .sum();
            assert!((direct - ramanujan_f(n, m) as f64).abs() < 1e-9, "n={n} m={m}");
        }
    }
}

#[test]
fn character_groups() {
    let g1 = char_group(1).unwrap();
    assert_eq!(g1.len(), 1);
    assert!(g1[0].is_principal());
    let g5 = char_group(5).unwrap();
    assert_eq!(g5.len(), 4);
    assert_eq!(g5.iter().filter(|c| c.is_principal()).count(), 1);
    assert_eq!(g5.iter().filter(|c| c.is_real() && !c.is_principal()).count(), 1);
    assert_eq!(char_group(8).unwrap().len(), 4);
}

#[test]
fn character_tables_are_multiplicative() {
    for q in 1..=200u64 {
        for chi in char_group(q).unwrap() {
            let step = if q > 50 { 11 } else { 1 };
            for a in (1..q).filter(|&a| gcd(a, q) == 1) {
                for b in (1..q).step_by(step).filter(|&b| gcd(b, q) == 1) {
                    let lhs = chi.value_u(a) * chi.value_u(b);
                    assert!((lhs - chi.value_u(a * b % q)).norm() < 1e-12, "q={q}");
                }
            }
        }
    }
}

#[test]
fn gauss_sums_by_direct_summation() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let g = gauss_sum(&DirichletCharacter::principal(p));
        assert!((g - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }
    let quad = char_group(5).unwrap().into_iter().find(|c| c.order() == 2).unwrap();
    let g = gauss_sum(&quad);
    assert!((g - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
    for q in [7u64, 9, 12, 16, 21] {
        for chi in char_group(q).unwrap() {
            let direct: Complex64 =
                (0..q).map(|a| chi.value_u(a) * Complex64::from_polar(1.0, TAU * a as f64 / q as f64)).sum();
            assert!((direct - gauss_sum(&chi)).norm() < 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn inverse_is_inverse(a in -10_000i64..10_000, c in 1u64..5_000) {
        match mod_inverse(a, c) {
            Ok(b) => prop_assert_eq!((a.rem_euclid(c as i64) as u64 * b.value()) % c, 1 % c),
            Err(_) => prop_assert!(gcd(a.unsigned_abs(), c) > 1),
        }
    }

    #[test]
    fn jacobi_is_multiplicative_in_top(a in -500i64..500, b in -500i64..500, n in (1u64..400).prop_map(|n| 2 * n + 1)) {
        prop_assert_eq!(jacobi(a * b, n).unwrap(), jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
    }
}
