//! Twisted Kloosterman sums and the Gauss-sum factorization of the
//! diagonal branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{
    gauss_sum, gcd, gcd_i, is_prime, mod_inverse, ramanujan_f, rem_euclid, DirichletCharacter,
    RootTable,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpSumError {
    #[error("character modulus {chi_modulus} does not divide {c}")]
    BadTwist { chi_modulus: u64, c: u64 },
    #[error("r = {r} is not coprime to {pq}")]
    NotCoprime { r: u64, pq: u64 },
    #[error("invalid modulus: {0}")]
    BadModulus(&'static str),
}

/// Value of a finite exponential sum with its exact term count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSumValue {
    pub value: Complex64,
    pub modulus: u64,
    pub term_count: u64,
}

/// Units mod `c` with their inverses and the root table `e(k / c)`.
///
/// Building this once per modulus amortizes across `(l, n)` grids.
#[derive(Debug, Clone)]
pub struct KloostermanTable {
    c: u64,
    roots: RootTable,
    units: Vec<(u64, u64)>,
}

impl KloostermanTable {
    pub fn new(c: u64) -> Self {
        assert!(c > 0, "Kloosterman modulus must be positive");
        let units = (0..c)
            .filter(|&x| gcd(x, c) == 1)
            .map(|x| (x, mod_inverse(x as i64, c).expect("unit").value()))
            .collect();
        KloostermanTable {
            c,
            roots: RootTable::new(c),
            units,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// `S_chi(l, n, c) = sum_{x mod c, (x, c) = 1} chi(x) e((l x + n xbar) / c)`.
    pub fn sum(
        &self,
        chi: &DirichletCharacter,
        l: i64,
        n: i64,
    ) -> Result<ExpSumValue, ExpSumError> {
        let c = self.c;
        if c % chi.modulus() != 0 {
            return Err(ExpSumError::BadTwist {
                chi_modulus: chi.modulus(),
                c,
            });
        }
        let (lr, nr) = (rem_euclid(l, c) as u128, rem_euclid(n, c) as u128);
        let value = self
            .units
            .iter()
            .map(|&(x, xb)| {
                let a = (lr * x as u128 + nr * xb as u128) % c as u128;
                chi.value_u(x) * self.roots.e_u(a as u64)
            })
            .sum();
        Ok(ExpSumValue {
            value,
            modulus: c,
            term_count: self.units.len() as u64,
        })
    }
}

/// The twisted Kloosterman sum `S_chi(l, n, c)` by direct summation.
pub fn kloosterman(
    chi: &DirichletCharacter,
    l: i64,
    n: i64,
    c: u64,
) -> Result<ExpSumValue, ExpSumError> {
    if c == 0 {
        return Err(ExpSumError::BadModulus("c must be positive"));
    }
    if c % chi.modulus() != 0 {
        return Err(ExpSumError::BadTwist {
            chi_modulus: chi.modulus(),
            c,
        });
    }
    KloostermanTable::new(c).sum(chi, l, n)
}

/// Outcome of [`gauss_reduction_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussReductionReport {
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub arg: i64,
    /// The full sum over units mod `pqr`.
    pub direct: Complex64,
    /// `psi(-1)` times the product of the three CRT factor sums.
    pub crt_product: Complex64,
    /// `psi(-1) chi(qr) psi(pr) conj(chi psi)(arg) tau(chi) tau(psi) f_r(arg)`.
    pub closed_form: Complex64,
    pub crt_residual: f64,
    pub closed_residual: f64,
    /// Residuals of the same identities with the conjugated prefactor
    /// and without the `psi(-1)` sign. Diagnostic only.
    pub conjugate_form_crt_residual: f64,
    pub conjugate_form_closed_residual: f64,
    /// Whether `gcd(arg, pq) > 1`, where the sum must vanish.
    pub vanishing_case: bool,
    pub tolerance: f64,
}

impl GaussReductionReport {
    pub fn passed(&self) -> bool {
        self.crt_residual < self.tolerance
            && self.closed_residual < self.tolerance
            && (!self.vanishing_case || self.direct.norm() < self.tolerance)
    }
}

/// Checks the factorization of
/// `sum_{x mod pqr, unit} chi(xbar) psi(-xbar) e(xbar arg / (pqr))`
/// into local sums mod `p`, `q`, `r` and its Gauss-sum closed form.
pub fn gauss_reduction_check(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    r: u64,
    arg: i64,
    tolerance: f64,
) -> Result<GaussReductionReport, ExpSumError> {
    let (p, q) = (chi.modulus(), psi.modulus());
    if p == q || p % 2 == 0 || q % 2 == 0 || !is_prime(p) || !is_prime(q) {
        return Err(ExpSumError::BadModulus("p and q must be distinct odd primes"));
    }
    if r == 0 {
        return Err(ExpSumError::BadModulus("r must be positive"));
    }
    if gcd(r, p * q) != 1 {
        return Err(ExpSumError::NotCoprime { r, pq: p * q });
    }
    let c = p * q * r;
    let roots = RootTable::new(c);
    let arg_c = rem_euclid(arg, c) as u128;
    let mut direct = Complex64::new(0.0, 0.0);
    for x in (1..c).chain(std::iter::once(0)).filter(|&x| gcd(x, c) == 1) {
        let xb = mod_inverse(x as i64, c).expect("unit").value();
        let w = chi.value_u(xb) * psi.value(-(xb as i64));
        direct += w * roots.e_u(((xb as u128 * arg_c) % c as u128) as u64);
    }

    let inv = |a: u64, m: u64| mod_inverse(a as i64, m).expect("coprime").value() as i64;
    let local = |chi: &DirichletCharacter, m: u64, twist: i64| -> Complex64 {
        let rt = RootTable::new(m);
        (1..m)
            .filter(|&x| gcd(x, m) == 1)
            .map(|x| {
                let xb = inv(x, m);
                chi.value(xb) * rt.e(((twist as i128 * xb as i128 * arg as i128) % m as i128) as i64)
            })
            .sum()
    };
    let fp = local(chi, p, inv((q * r) % p, p));
    let fq = local(psi, q, inv((p * r) % q, q));
    let fr: Complex64 = if r == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        let rt = RootTable::new(r);
        let t = inv((p * q) % r, r);
        (1..r)
            .filter(|&z| gcd(z, r) == 1)
            .map(|z| {
                let zb = inv(z, r);
                rt.e(((t as i128 * zb as i128 * arg as i128) % r as i128) as i64)
            })
            .sum()
    };
    let conj_crt = fp * fq * fr;
    let sign = psi.value(-1);
    let crt_product = sign * conj_crt;

    let tau = gauss_sum(chi) * gauss_sum(psi);
    let f = ramanujan_f(r, arg) as f64;
    let qr = (q * r) as i64;
    let pr = (p * r) as i64;
    let a_conj = (chi.value(arg) * psi.value(arg)).conj();
    let closed_form = sign * chi.value(qr) * psi.value(pr) * a_conj * tau * f;
    let conj_closed = chi.value(qr).conj() * psi.value(pr).conj() * a_conj * tau * f;

    Ok(GaussReductionReport {
        p,
        q,
        r,
        arg,
        direct,
        crt_product,
        closed_form,
        crt_residual: (direct - crt_product).norm(),
        closed_residual: (direct - closed_form).norm(),
        conjugate_form_crt_residual: (direct - conj_crt).norm(),
        conjugate_form_closed_residual: (direct - conj_closed).norm(),
        vanishing_case: gcd_i(arg, (p * q) as i64) > 1,
        tolerance,
    })
}

/// Outcome of [`weil_check`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WeilReport {
    pub value: ExpSumValue,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `|S(l, n, p)|` with `2 sqrt(p)`.
pub fn weil_check(l: i64, n: i64, p: u64) -> Result<WeilReport, ExpSumError> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(ExpSumError::BadModulus("p must be an odd prime"));
    }
    let value = kloosterman(&DirichletCharacter::principal(1), l, n, p)?;
    let bound = 2.0 * (p as f64).sqrt();
    Ok(WeilReport {
        value,
        bound,
        holds: value.value.norm() <= bound + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::char_group;

    fn one() -> DirichletCharacter {
        DirichletCharacter::principal(1)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn small_examples() {
        let s = kloosterman(&one(), 1, 1, 2).unwrap();
        assert!(close(s.value, Complex64::new(1.0, 0.0)));
        let s = kloosterman(&one(), 1, 1, 3).unwrap();
        assert!(close(s.value, Complex64::new(-1.0, 0.0)));
        for c in 1..40 {
            let s = kloosterman(&one(), 0, 0, c).unwrap();
            assert_eq!(s.term_count, crate::arith::totient(c));
            assert!(close(s.value, Complex64::new(s.term_count as f64, 0.0)));
        }
    }

    #[test]
    fn bad_twist() {
        let chi = &char_group(5).unwrap()[1];
        assert!(matches!(
            kloosterman(chi, 1, 1, 7),
            Err(ExpSumError::BadTwist { .. })
        ));
        assert!(kloosterman(chi, 1, 1, 10).is_ok());
    }

    #[test]
    fn crt_multiplicativity() {
        for c1 in 1..=20u64 {
            for c2 in 1..=20u64 {
                if gcd(c1, c2) != 1 {
                    continue;
                }
                let b1 = mod_inverse(c1 as i64, c2).unwrap().value() as i64;
                let b2 = mod_inverse(c2 as i64, c1).unwrap().value() as i64;
                for (l, n) in [(1i64, 1i64), (2, 3), (0, 5), (-3, 7)] {
                    let lhs = kloosterman(&one(), l, n, c1 * c2).unwrap().value;
                    let a = kloosterman(&one(), l * b2, n * b2, c1).unwrap().value;
                    let b = kloosterman(&one(), l * b1, n * b1, c2).unwrap().value;
                    assert!((lhs - a * b).norm() < 1e-9, "c1={c1} c2={c2}");
                }
            }
        }
    }

    #[test]
    fn twisted_symmetries() {
        for c in [5u64, 8, 12, 15] {
            for chi in char_group(c).unwrap() {
                for (l, n) in [(1i64, 2i64), (3, -1), (4, 7)] {
                    let s = kloosterman(&chi, l, n, c).unwrap().value;
                    let t = kloosterman(&chi.conj(), -l, -n, c).unwrap().value;
                    assert!(close(s.conj(), t));
                    for u in (1..c as i64).filter(|&u| gcd_i(u, c as i64) == 1) {
                        let ub = mod_inverse(u, c).unwrap().value() as i64;
                        let su = kloosterman(&chi, l * ub, n * u, c).unwrap().value;
                        assert!(close(su, chi.value(u) * s));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_l_reduces_to_gauss_sums() {
        for q in (3..=200u64).step_by(7) {
            for chi in char_group(q).unwrap().iter().take(6) {
                for n in [1i64, 2, 5, -1] {
                    if gcd_i(n, q as i64) != 1 {
                        continue;
                    }
                    let s = kloosterman(chi, 0, n, q).unwrap().value;
                    let want = chi.value(n) * gauss_sum(&chi.conj());
                    assert!((s - want).norm() < 1e-9, "q={q}");
                }
            }
        }
    }

    #[test]
    fn weil_examples() {
        assert!(weil_check(1, 1, 5).unwrap().holds);
        assert!(weil_check(1, 1, 101).unwrap().holds);
        for p in [3u64, 7, 11, 13] {
            let w = weil_check(0, 1, p).unwrap();
            assert!((w.value.value.norm() - 1.0).abs() < 1e-10);
            assert!(w.holds);
        }
    }

    #[test]
    fn gauss_reduction_examples() {
        let g3 = char_group(3).unwrap();
        let g5 = char_group(5).unwrap();
        let (chi, psi) = (&g3[1], &g5[1]);
        let rep = gauss_reduction_check(chi, psi, 1, 1, 1e-10).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let rep = gauss_reduction_check(chi, psi, 1, 6, 1e-10).unwrap();
        assert!(rep.vanishing_case && rep.direct.norm() < 1e-10);
        let g7 = char_group(7).unwrap();
        let rep = gauss_reduction_check(&g5[2], &g7[3], 2, 3, 1e-10).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(matches!(
            gauss_reduction_check(chi, psi, 3, 1, 1e-10),
            Err(ExpSumError::NotCoprime { .. })
        ));
    }
}
