use std::collections::BTreeMap;

use ampsum_core::amplifier::{
    amplifier_lower_bound_check, hecke_square_expand, kmv_coefficients, satake_sequence, AmplifierVector,
    HeckeSequence, Provenance,
};
use ampsum_core::arith::{primes_up_to, DirichletCharacter};
use num_complex::Complex64;
use proptest::prelude::*;

fn flat(cap: u64) -> HeckeSequence {
    let values: BTreeMap<u64, Complex64> = primes_up_to(cap).into_iter().map(|p| (p, Complex64::new(2.0, 0.0))).collect();
    HeckeSequence::from_prime_values(DirichletCharacter::principal(1), &values, Provenance::SyntheticSatake { seed: 0 })
        .unwrap()
}

#[test]
fn zero_satake_angles() {
    let l = flat(50);
    for p in [2u64, 3, 5, 47] {
        assert_eq!(l.lambda(p).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(l.lambda(p * p).unwrap(), Complex64::new(3.0, 0.0));
    }
    assert_eq!(l.lambda(6).unwrap(), l.lambda(2).unwrap() * l.lambda(3).unwrap());
    assert!(l.ramanujan_ok);
    assert_eq!(l.recursion_residual(50), 0.0);
}

#[test]
fn zero_vector_and_edge_lengths() {
    let l = satake_sequence(7, 100, DirichletCharacter::principal(1)).unwrap();
    let zero = AmplifierVector { length: 10, x: BTreeMap::new() };
    let r = hecke_square_expand(&zero, &l).unwrap();
    assert_eq!(r.direct, 0.0);
    assert_eq!(r.residual, 0.0);

    let one = kmv_coefficients(&l, 1).unwrap();
    assert!(one.vector.x.is_empty());
    assert_eq!(one.prime_count, 0);
    assert_eq!(one.sum, Complex64::new(0.0, 0.0));

    let hundred = kmv_coefficients(&l, 100).unwrap();
    assert_eq!(hundred.prime_count, 4);
    assert_eq!(hundred.sum.norm_sqr(), 16.0);
    assert!(kmv_coefficients(&l, 0).is_err());
}

#[test]
fn square_of_single_prime() {
    let l = satake_sequence(3, 30, DirichletCharacter::principal(1)).unwrap();
    for p in primes_up_to(30) {
        let lp = l.lambda(p).unwrap();
        assert!((lp * lp - (l.lambda(p * p).unwrap() + 1.0)).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn amplifier_collapses_to_prime_count(seed in any::<u64>(), length in 1u64..20_000) {
        let l = satake_sequence(seed, 200, DirichletCharacter::principal(1)).unwrap();
        let report = amplifier_lower_bound_check(&l, &[length]).unwrap();
        let row = report.rows[0];
        prop_assert!(row.exact);
        prop_assert_eq!(row.square, (row.prime_count * row.prime_count) as f64);
    }

    #[test]
    fn hecke_square_expansion_matches(seed in any::<u64>(), n in 1usize..12) {
        let l = satake_sequence(seed, 100, DirichletCharacter::principal(1)).unwrap();
        // Primes and prime squares, so every product stays within the tabulated powers.
        let pool: Vec<u64> = primes_up_to(10).into_iter().flat_map(|p| [p, p * p]).chain(primes_up_to(100)).collect();
        let support: Vec<u64> = pool.into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().step_by(1 + seed as usize % 3).take(n).collect();
        let x = AmplifierVector::random(seed ^ 0x5a5a, 100, &support);
        let r = hecke_square_expand(&x, &l).unwrap();
        prop_assert!(r.residual < 1e-10 * r.direct.max(1.0));
    }
}
