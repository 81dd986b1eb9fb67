//! Synthetic Hecke eigenvalue sequences, the Hecke-square expansion of an
//! amplified sum, and the amplifier `x_l = lambda(l)` on primes `l <= sqrt(L)`,
//! `x_{l^2} = -1`.
//!
//! Synthetic eigenvalues `lambda(p) = 2 cos(theta_p)` are rounded to the grid
//! `2^-8 Z`. Every value then built by the Hecke recursion up to `p^4`, and
//! every amplified sum, is a dyadic rational computed exactly in `f64`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, isqrt, prime_pi, primes_up_to, DirichletCharacter};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AmpError {
    #[error("the Hecke-square identity is only asserted for the trivial character")]
    NontrivialCharacter,
    #[error("lambda({n}) is outside the tabulated range (primes <= {prime_cap}, exponents <= {max_power})")]
    OutOfRange { n: u64, prime_cap: u64, max_power: u32 },
    #[error("prime cap {0} must be at least 2")]
    BadPrimeCap(u64),
    #[error("amplifier length must be positive")]
    ZeroLength,
}

/// Largest exponent tabulated at each prime.
pub const MAX_POWER: u32 = 4;
/// Eigenvalues at primes are multiples of `2^-QUANT_BITS`.
pub const QUANT_BITS: i32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SyntheticSatake { seed: u64 },
    User,
}

/// A multiplicative `lambda` satisfying the Hecke relation with nebentypus `chi`.
#[derive(Debug, Clone)]
pub struct HeckeSequence {
    character: DirichletCharacter,
    prime_cap: u64,
    /// `lambda(p^j)`, `j = 0..=MAX_POWER`.
    powers: BTreeMap<u64, Vec<Complex64>>,
    pub provenance: Provenance,
    /// `|lambda(p)| <= 2` at every tabulated prime; recorded, never used.
    pub ramanujan_ok: bool,
}

fn quantize(v: f64) -> f64 {
    let s = 2f64.powi(QUANT_BITS);
    (v * s).round() / s
}

impl HeckeSequence {
    /// Extends prime values by
    /// `lambda(p^{j+1}) = lambda(p) lambda(p^j) - chi(p) lambda(p^{j-1})`.
    pub fn from_prime_values(
        character: DirichletCharacter,
        prime_values: &BTreeMap<u64, Complex64>,
        provenance: Provenance,
    ) -> Result<Self, AmpError> {
        let prime_cap = prime_values.keys().copied().max().unwrap_or(0);
        if prime_cap < 2 {
            return Err(AmpError::BadPrimeCap(prime_cap));
        }
        let mut powers = BTreeMap::new();
        let mut ramanujan_ok = true;
        for (&p, &lp) in prime_values {
            let chi = character.value_u(p);
            let mut seq = vec![Complex64::new(1.0, 0.0), lp];
            for j in 1..MAX_POWER as usize {
                let next = lp * seq[j] - chi * seq[j - 1];
                seq.push(next);
            }
            ramanujan_ok &= lp.norm() <= 2.0;
            powers.insert(p, seq);
        }
        Ok(HeckeSequence {
            character,
            prime_cap,
            powers,
            provenance,
            ramanujan_ok,
        })
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn prime_cap(&self) -> u64 {
        self.prime_cap
    }

    /// The character modulo 1. A principal character of larger modulus
    /// vanishes at the primes dividing it and does not count.
    pub fn is_trivial_character(&self) -> bool {
        self.character.modulus() == 1
    }

    /// `lambda(n)` by multiplicativity.
    pub fn lambda(&self, n: u64) -> Result<Complex64, AmpError> {
        let out_of_range = || AmpError::OutOfRange {
            n,
            prime_cap: self.prime_cap,
            max_power: MAX_POWER,
        };
        if n == 0 {
            return Err(out_of_range());
        }
        let mut v = Complex64::new(1.0, 0.0);
        for (p, e) in factorize(n) {
            let seq = self.powers.get(&p).ok_or_else(out_of_range)?;
            v *= *seq.get(e as usize).ok_or_else(out_of_range)?;
        }
        Ok(v)
    }

    /// Largest `|lambda(p) lambda(p^j) - lambda(p^{j+1}) - chi(p) lambda(p^{j-1})|`
    /// over tabulated primes `p <= cap` and `1 <= j < MAX_POWER`.
    pub fn recursion_residual(&self, cap: u64) -> f64 {
        let mut worst = 0.0f64;
        for (&p, seq) in self.powers.range(..=cap) {
            let chi = self.character.value_u(p);
            for j in 1..MAX_POWER as usize {
                let r = seq[1] * seq[j] - seq[j + 1] - chi * seq[j - 1];
                worst = worst.max(r.norm());
            }
        }
        worst
    }
}

/// Satake parameters `theta_p` uniform in `[0, pi]` from a ChaCha8 stream,
/// one draw per prime in increasing order. With `chi(p) != 0` the prime value
/// is `chi(p)^{1/2} q(2 cos theta_p)`, with `chi(p) = 0` it is
/// `q(cos theta_p)`, where `q` rounds to `2^-8 Z`.
pub fn satake_sequence(seed: u64, prime_cap: u64, character: DirichletCharacter) -> Result<HeckeSequence, AmpError> {
    if prime_cap < 2 {
        return Err(AmpError::BadPrimeCap(prime_cap));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = BTreeMap::new();
    for p in primes_up_to(prime_cap) {
        let theta: f64 = rng.gen_range(0.0..PI);
        let chi = character.value_u(p);
        let v = if chi.norm() == 0.0 {
            Complex64::new(quantize(theta.cos()), 0.0)
        } else if character.modulus() == 1 {
            Complex64::new(quantize(2.0 * theta.cos()), 0.0)
        } else {
            chi.sqrt() * quantize(2.0 * theta.cos())
        };
        values.insert(p, v);
    }
    HeckeSequence::from_prime_values(character, &values, Provenance::SyntheticSatake { seed })
}

/// Coefficients `x_l` of an amplified sum `sum_l x_l lambda(l)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AmplifierVector {
    pub length: u64,
    pub x: BTreeMap<u64, Complex64>,
}

impl AmplifierVector {
    pub fn norm_sq(&self) -> f64 {
        self.x.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn apply(&self, lambda: &HeckeSequence) -> Result<Complex64, AmpError> {
        let mut s = Complex64::new(0.0, 0.0);
        for (&l, &x) in &self.x {
            s += x * lambda.lambda(l)?;
        }
        Ok(s)
    }

    /// Random coefficients with real and imaginary parts uniform in
    /// `[-1, 1]`, on the given support.
    pub fn random(seed: u64, length: u64, support: &[u64]) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = support
            .iter()
            .map(|&l| (l, Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))))
            .collect();
        AmplifierVector { length, x }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeckeSquareReport {
    /// `|sum_l x_l lambda(l)|^2`.
    pub direct: f64,
    /// `sum_{l1, l2} x_{l1} conj(x_{l2}) sum_{k | (l1, l2)} lambda(l1 l2 / k^2)`.
    pub expanded: Complex64,
    pub residual: f64,
    pub asserted: bool,
}

/// `|sum x_l lambda(l)|^2 = sum_{l1, l2} x_{l1} conj(x_{l2}) sum_{k | (l1, l2)} lambda(l1 l2 / k^2)`
/// for a trivial-character sequence.
pub fn hecke_square_expand(x: &AmplifierVector, lambda: &HeckeSequence) -> Result<HeckeSquareReport, AmpError> {
    if !lambda.is_trivial_character() {
        return Err(AmpError::NontrivialCharacter);
    }
    let direct = x.apply(lambda)?.norm_sqr();
    let expanded = expand(x, lambda, false, true)?;
    Ok(HeckeSquareReport {
        direct,
        residual: (expanded - direct).norm(),
        expanded,
        asserted: true,
    })
}

/// `sum_{l1, l2} x_{l1} x'_{l2} sum_{k | (l1, l2)} [chi(k)] lambda(l1 l2 / k^2)`
/// with `x' = conj(x)` or `x`.
fn expand(x: &AmplifierVector, lambda: &HeckeSequence, twist: bool, conjugate: bool) -> Result<Complex64, AmpError> {
    let mut total = Complex64::new(0.0, 0.0);
    for (&l1, &x1) in &x.x {
        for (&l2, &x2) in &x.x {
            let g = gcd(l1, l2);
            let mut inner = Complex64::new(0.0, 0.0);
            for k in 1..=g {
                if g % k == 0 {
                    let w = if twist { lambda.character().value_u(k) } else { Complex64::new(1.0, 0.0) };
                    inner += w * lambda.lambda(l1 / k * (l2 / k))?;
                }
            }
            let x2 = if conjugate { x2.conj() } else { x2 };
            total += x1 * x2 * inner;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistedSquareReport {
    pub direct: f64,
    /// The expansion without character factors, as for trivial character.
    pub untwisted: Complex64,
    pub untwisted_residual: f64,
    /// `(sum x_l lambda(l))^2` against the expansion with `chi(k)` inserted.
    pub bilinear_direct: Complex64,
    pub bilinear_twisted: Complex64,
    pub bilinear_residual: f64,
}

/// Report-only diagnostics of the expansion for any character.
pub fn hecke_square_diagnostics(x: &AmplifierVector, lambda: &HeckeSequence) -> Result<TwistedSquareReport, AmpError> {
    let s = x.apply(lambda)?;
    let untwisted = expand(x, lambda, false, true)?;
    let bilinear_twisted = expand(x, lambda, true, false)?;
    Ok(TwistedSquareReport {
        direct: s.norm_sqr(),
        untwisted_residual: (untwisted - s.norm_sqr()).norm(),
        untwisted,
        bilinear_direct: s * s,
        bilinear_residual: (bilinear_twisted - s * s).norm(),
        bilinear_twisted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmvAmplifier {
    pub vector: AmplifierVector,
    /// `sum_l x_l lambda(l)`.
    pub sum: Complex64,
    pub norm_sq: f64,
    /// `sum_{p <= sqrt L} (|lambda(p)|^2 + 1)`.
    pub norm_bound: f64,
    /// `pi(sqrt L)`.
    pub prime_count: u64,
}

/// `x_p = lambda(p)` and `x_{p^2} = -1` for primes `p <= sqrt(L)`.
pub fn kmv_coefficients(lambda: &HeckeSequence, length: u64) -> Result<KmvAmplifier, AmpError> {
    if length == 0 {
        return Err(AmpError::ZeroLength);
    }
    let root = isqrt(length);
    let mut x = BTreeMap::new();
    let mut norm_bound = 0.0;
    for p in primes_up_to(root) {
        let lp = lambda.lambda(p)?;
        x.insert(p, lp);
        x.insert(p * p, Complex64::new(-1.0, 0.0));
        norm_bound += lp.norm_sqr() + 1.0;
    }
    let vector = AmplifierVector { length, x };
    Ok(KmvAmplifier {
        sum: vector.apply(lambda)?,
        norm_sq: vector.norm_sq(),
        norm_bound,
        prime_count: prime_pi(root) as u64,
        vector,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub length: u64,
    pub prime_count: u64,
    /// `|sum x_l lambda(l)|^2`.
    pub square: f64,
    /// `|sum|^2 / L`.
    pub ratio: f64,
    /// `0.1 (pi(sqrt L) / sqrt L)^2`.
    pub floor: f64,
    /// `|sum|^2 == pi(sqrt L)^2` exactly.
    pub exact: bool,
}

impl LowerBoundRow {
    pub fn passed(&self) -> bool {
        self.exact && self.ratio >= self.floor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub rows: Vec<LowerBoundRow>,
    /// Ladder steps where `pi(sqrt L)^2 / L` increased.
    pub ratio_increases: usize,
}

impl LowerBoundReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(LowerBoundRow::passed)
    }
}

pub const FLOOR_FACTOR: f64 = 0.1;

/// `|sum x_l lambda(l)|^2 / L` for the amplifier at each length of the ladder.
pub fn amplifier_lower_bound_check(lambda: &HeckeSequence, ladder: &[u64]) -> Result<LowerBoundReport, AmpError> {
    let mut rows = Vec::with_capacity(ladder.len());
    for &length in ladder {
        let amp = kmv_coefficients(lambda, length)?;
        let square = amp.sum.norm_sqr();
        let pc = amp.prime_count as f64;
        let l = length as f64;
        rows.push(LowerBoundRow {
            length,
            prime_count: amp.prime_count,
            square,
            ratio: square / l,
            floor: FLOOR_FACTOR * pc * pc / l,
            exact: square == pc * pc,
        });
    }
    let ratio_increases = rows
        .windows(2)
        .filter(|w| {
            let r = |row: &LowerBoundRow| (row.prime_count * row.prime_count) as f64 / row.length as f64;
            r(&w[1]) > r(&w[0])
        })
        .count();
    Ok(LowerBoundReport { rows, ratio_increases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::char_group;

    fn trivial() -> DirichletCharacter {
        DirichletCharacter::principal(1)
    }

    #[test]
    fn flat_angles() {
        let values = primes_up_to(50).into_iter().map(|p| (p, Complex64::new(2.0, 0.0))).collect();
        let s = HeckeSequence::from_prime_values(trivial(), &values, Provenance::User).unwrap();
        assert_eq!(s.lambda(7).unwrap().re, 2.0);
        assert_eq!(s.lambda(49).unwrap().re, 3.0);
        // lambda = d(n) on cube-free n
        assert_eq!(s.lambda(12).unwrap().re, 6.0);
    }

    #[test]
    fn synthetic_sequence_exact() {
        let s = satake_sequence(7, 100, trivial()).unwrap();
        assert_eq!(s.recursion_residual(50), 0.0);
        assert_eq!(s.lambda(6).unwrap(), s.lambda(2).unwrap() * s.lambda(3).unwrap());
        assert!(s.ramanujan_ok);
        let again = satake_sequence(7, 100, trivial()).unwrap();
        assert_eq!(s.lambda(97).unwrap(), again.lambda(97).unwrap());
        assert!(matches!(s.lambda(101), Err(AmpError::OutOfRange { .. })));
    }

    #[test]
    fn twisted_sequence_relation() {
        let chi = char_group(5).unwrap().remove(1);
        let s = satake_sequence(3, 50, chi).unwrap();
        assert!(s.recursion_residual(50) < 1e-13);
        assert!(!s.is_trivial_character());
        let x = AmplifierVector::random(1, 49, &[2, 3, 7, 4, 9]);
        assert_eq!(hecke_square_expand(&x, &s), Err(AmpError::NontrivialCharacter));
        let d = hecke_square_diagnostics(&x, &s).unwrap();
        assert!(d.bilinear_residual < 1e-10);
    }

    #[test]
    fn square_expansion() {
        let s = satake_sequence(11, 50, trivial()).unwrap();
        let one = AmplifierVector {
            length: 4,
            x: [(5u64, Complex64::new(1.0, 0.0))].into_iter().collect(),
        };
        let r = hecke_square_expand(&one, &s).unwrap();
        let l5 = s.lambda(5).unwrap().re;
        assert_eq!(r.direct, l5 * l5);
        assert_eq!(r.expanded.re, s.lambda(25).unwrap().re + 1.0);
        let zero = AmplifierVector::default();
        assert_eq!(hecke_square_expand(&zero, &s).unwrap().residual, 0.0);
        for seed in 0..10 {
            let x = AmplifierVector::random(seed, 49, &[2, 3, 5, 7, 4, 9, 25, 49]);
            assert!(hecke_square_expand(&x, &s).unwrap().residual < 1e-10);
        }
    }

    #[test]
    fn kmv_collapse() {
        let s = satake_sequence(5, 100, trivial()).unwrap();
        let a = kmv_coefficients(&s, 100).unwrap();
        assert_eq!(a.sum, Complex64::new(4.0, 0.0));
        assert!(a.norm_sq <= a.norm_bound);
        let empty = kmv_coefficients(&s, 1).unwrap();
        assert!(empty.vector.x.is_empty());
        assert_eq!(empty.sum, Complex64::new(0.0, 0.0));
        let r = amplifier_lower_bound_check(&s, &[100, 1000, 10_000]).unwrap();
        assert!(r.passed());
        assert_eq!(r.rows[0].square, 16.0);
    }
}
