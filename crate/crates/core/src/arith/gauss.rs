//! Gauss sums and root-of-unity tables.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::modular::rem_euclid;
use super::DirichletCharacter;

/// Precomputed `e(k / c)` for `k = 0..c`.
#[derive(Debug, Clone)]
pub struct RootTable {
    c: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(c: u64) -> Self {
        assert!(c > 0, "root table needs a positive modulus");
        let roots = (0..c)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / c as f64))
            .collect();
        RootTable { c, roots }
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// `e(a / c)`, with `a` reduced mod `c` first.
    #[inline]
    pub fn e(&self, a: i64) -> Complex64 {
        self.roots[rem_euclid(a, self.c) as usize]
    }

    #[inline]
    pub fn e_u(&self, a: u64) -> Complex64 {
        self.roots[(a % self.c) as usize]
    }
}

/// `tau(chi) = sum_{x mod q} chi(x) e(x / q)`.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus();
    let roots = RootTable::new(q);
    (0..q).map(|x| chi.value_u(x) * roots.e_u(x)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{char_group, mobius};

    #[test]
    fn principal_prime_is_mobius() {
        for p in [2u64, 3, 5, 7, 11, 101] {
            let chi = DirichletCharacter::principal(p);
            let g = gauss_sum(&chi);
            assert!((g.re - mobius(p) as f64).abs() < 1e-10 && g.im.abs() < 1e-10);
        }
    }

    #[test]
    fn quadratic_mod_five() {
        let g5 = char_group(5).unwrap();
        let quad = g5.iter().find(|c| c.order() == 2).unwrap();
        let g = gauss_sum(quad);
        assert!((g.re - 5f64.sqrt()).abs() < 1e-12 && g.im.abs() < 1e-12);
    }

    #[test]
    fn primitive_modulus_gives_sqrt_q() {
        for q in 1..=200u64 {
            for chi in char_group(q).unwrap() {
                if chi.is_primitive() {
                    assert!((gauss_sum(&chi).norm() - (q as f64).sqrt()).abs() < 1e-9);
                }
            }
        }
    }
}
