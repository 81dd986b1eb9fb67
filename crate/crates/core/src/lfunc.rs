//! Dirichlet L-values, the ratio `C(s1, s2, w)` of L-values and the `b`-sum,
//! and empirical scans of `max |L(1/2 + it, chi)|` against the modulus.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arith::{
    factorize, gauss_sum, is_prime, pow_mod, primes_up_to, primitive_root, ArithError,
    DirichletCharacter, Parity, TABLE_LIMIT,
};
use crate::quadcount::{euler_product_eval, EulerKind, QuadError, Quadratic, SArgs, Truncation};
use crate::special::{hurwitz_regular, ln_gamma, upper_gamma};

/// Smallest real part accepted by the smoothed sum.
pub const SMOOTHED_MIN_RE: f64 = 0.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LError {
    #[error("principal character has a pole at s = 1")]
    PoleAt1,
    #[error("character modulo {modulus} is induced from conductor {conductor}")]
    NotPrimitive { modulus: u64, conductor: u64 },
    #[error("Re(s) = {re} outside the domain of {method:?}")]
    OutOfDomain { method: Method, re: f64 },
    #[error("factor {factor} hits a pole or vanishes")]
    PoleHit { factor: String },
    #[error("{0} is not a discriminant")]
    BadDiscriminant(i64),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Partial sums over residue classes with an Euler-Maclaurin tail.
    SmoothedSum,
    /// Theta-weighted approximate functional equation, exact up to
    /// truncation. Needs a primitive character.
    FunctionalEquation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterId {
    pub modulus: u64,
    pub index: Option<usize>,
}

impl CharacterId {
    pub fn of(chi: &DirichletCharacter) -> Self {
        CharacterId {
            modulus: chi.modulus(),
            index: chi.index(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub s: Complex64,
    pub character_id: CharacterId,
    pub value: Complex64,
    pub error_bound: f64,
    pub method: Method,
}

/// `L(s, chi)` by the chosen method.
pub fn dirichlet_l(chi: &DirichletCharacter, s: Complex64, method: Method) -> Result<LValue, LError> {
    if chi.is_principal() && s == Complex64::new(1.0, 0.0) {
        return Err(LError::PoleAt1);
    }
    let (value, error_bound) = match method {
        Method::SmoothedSum => smoothed_sum(chi, s)?,
        Method::FunctionalEquation => functional_equation(chi, s)?,
    };
    Ok(LValue {
        s,
        character_id: CharacterId::of(chi),
        value,
        error_bound,
        method,
    })
}

/// `L(s, chi) = q^{-s} sum_r chi(r) zeta(s, r/q)`.
fn smoothed_sum(chi: &DirichletCharacter, s: Complex64) -> Result<(Complex64, f64), LError> {
    if s.re < SMOOTHED_MIN_RE {
        return Err(LError::OutOfDomain {
            method: Method::SmoothedSum,
            re: s.re,
        });
    }
    let q = chi.modulus();
    let mut total = Complex64::new(0.0, 0.0);
    let mut mass = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for r in 1..=q {
        let v = chi.value_u(r);
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let h = hurwitz_regular(s, r as f64 / q as f64);
        total += v * h.regular;
        mass += v;
        err += h.error;
    }
    // The pole parts cancel unless the character is principal.
    if mass.norm() > 0.5 {
        total += mass / (s - 1.0);
    }
    let scale = Complex64::new(q as f64, 0.0).powc(-s);
    Ok((total * scale, err * scale.norm()))
}

/// Exponents `z = (s + a)/2` and `z' = (1 - s + a)/2`.
fn gamma_args(s: Complex64, parity: Parity) -> (Complex64, Complex64) {
    let a = if parity == Parity::Odd { 1.0 } else { 0.0 };
    ((s + a) / 2.0, (1.0 - s + a) / 2.0)
}

/// Root number `tau(chi) / (i^a sqrt q)`.
pub fn root_number(chi: &DirichletCharacter) -> Complex64 {
    let ia = match chi.parity() {
        Parity::Even => Complex64::new(1.0, 0.0),
        Parity::Odd => Complex64::i(),
    };
    gauss_sum(chi) / (ia * (chi.modulus() as f64).sqrt())
}

/// Upper bound on the summation range: the cap `10 sqrt(q (1 + |t|))`
/// or the point where `pi n^2 / q` exceeds `|z| + 45`, whichever is smaller.
fn afe_terms(q: u64, s: Complex64) -> usize {
    let cap = 10.0 * ((q as f64) * (1.0 + s.im.abs())).sqrt();
    let decay = ((q as f64) * (s.norm() / 2.0 + 46.0) / PI).sqrt();
    cap.min(decay).ceil().max(2.0) as usize
}

fn functional_equation(chi: &DirichletCharacter, s: Complex64) -> Result<(Complex64, f64), LError> {
    let q = chi.modulus();
    let conductor = chi.conductor();
    if conductor != q {
        return Err(LError::NotPrimitive { modulus: q, conductor });
    }
    if q == 1 && s.norm() < 1e-12 {
        return Err(LError::OutOfDomain {
            method: Method::FunctionalEquation,
            re: s.re,
        });
    }
    let (z, zc) = gamma_args(s, chi.parity());
    let eps = root_number(chi);
    let qf = q as f64;
    let lg = ln_gamma(z);
    // (q/pi)^{z' - z} / Gamma(z)
    let ratio = ((zc - z) * (qf / PI).ln() - lg).exp();
    let n_max = afe_terms(q, s);
    let term = |n: usize| -> (Complex64, f64) {
        let x = PI * (n * n) as f64 / qf;
        let ln_n = (n as f64).ln();
        let a = chi.value_u(n as u64) * (-s * ln_n - lg).exp() * upper_gamma(z, x);
        let b = eps * ratio * chi.value_u(n as u64).conj() * ((s - 1.0) * ln_n).exp() * upper_gamma(zc, x);
        (a + b, a.norm() + b.norm())
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut abs_total = 0.0;
    for n in 1..=n_max {
        let (v, m) = term(n);
        total += v;
        abs_total += m;
    }
    if q == 1 {
        // pole terms of pi^{-s/2} Gamma(s/2) zeta(s)
        total += -(1.0 / s + 1.0 / (1.0 - s)) * (s / 2.0 * PI.ln() - lg).exp();
    }
    let block: f64 = (n_max + 1..=n_max + 10).map(|n| term(n).1).sum();
    // Each term carries absolute phase errors of order eps |s| ln n from
    // n^{-s} and eps |ln Gamma(z)| from the gamma factors.
    let condition = 16.0 + s.norm() * ((n_max + 1) as f64).ln() + lg.norm() + 2.0 * z.norm().max(zc.norm());
    Ok((total, 10.0 * block + condition * f64::EPSILON * abs_total.max(total.norm())))
}

/// `L(s, chi)` for any character through its primitive inducing character:
/// `L(s, chi*) prod_{p | q} (1 - chi*(p) p^{-s})`.
pub fn dirichlet_l_induced(chi: &DirichletCharacter, s: Complex64) -> Result<LValue, LError> {
    let prim = chi.primitive();
    let base = dirichlet_l(&prim, s, Method::FunctionalEquation)?;
    let mut factor = Complex64::new(1.0, 0.0);
    for (p, _) in factorize(chi.modulus()) {
        factor *= 1.0 - prim.value_u(p) * Complex64::new(p as f64, 0.0).powc(-s);
    }
    Ok(LValue {
        s,
        character_id: CharacterId::of(chi),
        value: base.value * factor,
        error_bound: base.error_bound * factor.norm(),
        method: Method::FunctionalEquation,
    })
}

/// Inputs of the ratio `C(s1, s2, w)`.
#[derive(Debug, Clone)]
pub struct CFactorInput {
    pub s1: Complex64,
    pub s2: Complex64,
    pub w: Complex64,
    pub delta: i64,
    pub chi: DirichletCharacter,
    pub psi: DirichletCharacter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CFactorTerm {
    pub name: String,
    pub value: Complex64,
    pub error_bound: f64,
    /// `true` for factors in the numerator.
    pub numerator: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CFactor {
    pub value: Complex64,
    pub error_bound: f64,
    pub terms: Vec<CFactorTerm>,
}

impl CFactor {
    /// Recombines the factors, each shifted by `shifts[i]`.
    pub fn recombine(&self, shifts: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .zip(shifts.iter().chain(std::iter::repeat(&Complex64::new(0.0, 0.0))))
            .fold(Complex64::new(1.0, 0.0), |acc, (t, d)| {
                if t.numerator {
                    acc * (t.value + d)
                } else {
                    acc / (t.value + d)
                }
            })
    }
}

impl Quadratic {
    /// A monic quadratic with discriminant `delta`.
    pub fn with_discriminant(delta: i64) -> Option<Self> {
        match delta.rem_euclid(4) {
            0 => Some(Quadratic { m: 0, a: 1, b: -delta / 4 }),
            1 => Some(Quadratic { m: 1, a: 1, b: (1 - delta) / 4 }),
            _ => None,
        }
    }
}

/// Truncation used for the `b`-sum inside [`c_factor`].
pub const B_TRUNCATION: Truncation = Truncation {
    terms: 20_000,
    primes: 5_000,
};

/// `C = [L(s2, chi) L(s1, psi) / L(s1 + s2, chi psi)]
///    * [L(u, (D/.) chi) / L(u, chi)]
///    * [L(v, conj psi) / L(v, (D/.) conj psi)] * B(u)`
/// with `u = s1 + 2 s2 + 1 + w`, `v = s2 + 1 + w`.
pub fn c_factor(input: &CFactorInput) -> Result<CFactor, LError> {
    let CFactorInput { s1, s2, w, delta, .. } = *input;
    let (chi, psi) = (&input.chi, &input.psi);
    let quad = Quadratic::with_discriminant(delta).ok_or(LError::BadDiscriminant(delta))?;
    if delta == 0 {
        return Err(LError::BadDiscriminant(delta));
    }
    let kron = DirichletCharacter::kronecker(delta)?;
    let u = s1 + 2.0 * s2 + 1.0 + w;
    let v = s2 + 1.0 + w;
    let psi_bar = psi.conj();
    let specs: Vec<(&str, DirichletCharacter, Complex64, bool)> = vec![
        ("L(s2, chi)", chi.clone(), s2, true),
        ("L(s1, psi)", psi.clone(), s1, true),
        ("L(s1 + s2, chi psi)", chi.mul(psi)?, s1 + s2, false),
        ("L(s1 + 2s2 + 1 + w, (D/.) chi)", kron.mul(chi)?, u, true),
        ("L(s1 + 2s2 + 1 + w, chi)", chi.clone(), u, false),
        ("L(s2 + 1 + w, conj psi)", psi_bar.clone(), v, true),
        ("L(s2 + 1 + w, (D/.) conj psi)", kron.mul(&psi_bar)?, v, false),
    ];
    let mut terms = Vec::with_capacity(8);
    for (name, ch, s, numerator) in specs {
        if ch.is_principal() && (s - 1.0).norm() < 1e-12 {
            return Err(LError::PoleHit { factor: name.into() });
        }
        let l = dirichlet_l(&ch, s, Method::SmoothedSum)?;
        if !numerator && l.value.norm() <= l.error_bound {
            return Err(LError::PoleHit { factor: name.into() });
        }
        terms.push(CFactorTerm {
            name: name.into(),
            value: l.value,
            error_bound: l.error_bound,
            numerator,
        });
    }
    let b = euler_product_eval(EulerKind::BSum, SArgs { s1, s2, w }, quad, chi, psi, B_TRUNCATION, f64::INFINITY)?;
    terms.push(CFactorTerm {
        name: "B(s1 + 2s2 + 1 + w)".into(),
        value: b.series,
        error_bound: 2.0 * b.residual + 1e-15 * b.series.norm(),
        numerator: true,
    });
    let cf = CFactor {
        value: Complex64::new(0.0, 0.0),
        error_bound: 0.0,
        terms,
    };
    let value = cf.recombine(&[]);
    // Worst case over simultaneous perturbations of every factor.
    let mut growth = 1.0;
    for t in &cf.terms {
        let rel = t.error_bound / t.value.norm();
        growth *= if t.numerator { 1.0 + rel } else { 1.0 / (1.0 - rel) };
    }
    Ok(CFactor {
        value,
        error_bound: value.norm() * (growth - 1.0) + 4.0 * f64::EPSILON * value.norm(),
        ..cf
    })
}

/// Per-modulus maxima of a convexity scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityPoint {
    pub q: u64,
    pub max_abs: f64,
    /// Exponent `k` of the maximizing character, `chi(g) = e(k / (q - 1))`
    /// for the least primitive root `g`.
    pub argmax_k: u64,
    pub argmax_t: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub points: Vec<ConvexityPoint>,
    /// Least-squares slope of `ln max |L|` against `ln q`.
    pub exponent: f64,
    /// Convexity exponent `1/4` plus slack.
    pub threshold: f64,
    /// Largest relative change of a per-modulus maximum when the `t` grid is
    /// refined by midpoints.
    pub refinement_change: f64,
}

impl ConvexityReport {
    pub fn within_threshold(&self) -> bool {
        self.exponent <= self.threshold
    }
}

/// Exponent slack for empirical bounds.
pub const EXPONENT_SLACK: f64 = 0.05;

/// `L(1/2 + it, chi)` for all characters mod a prime `q` at once, indexed by
/// `k` in `chi(g^j) = e(kj / (q - 1))`.
pub fn critical_values_prime(q: u64, t: f64) -> Vec<Complex64> {
    assert!(is_prime(q) && q >= 3);
    let n = (q - 1) as usize;
    let g = primitive_root(q).expect("prime");
    let mut ind = vec![0usize; q as usize];
    let mut pw = 1u64;
    for j in 0..n {
        ind[pw as usize] = j;
        pw = pw * g % q;
    }
    let s = Complex64::new(0.5, t);
    let qf = q as f64;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    // tau(chi_k) = sum_j e(kj/(q-1)) e(g^j/q)
    let mut tau: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * pow_mod(g, j as u64, q) as f64 / qf))
        .collect();
    inv.process(&mut tau);

    let n_max = afe_terms(q, s);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for parity in [Parity::Even, Parity::Odd] {
        let (z, zc) = gamma_args(s, parity);
        let lg = ln_gamma(z);
        let ratio = ((zc - z) * (qf / PI).ln() - lg).exp();
        let mut f = vec![Complex64::new(0.0, 0.0); n];
        let mut h = vec![Complex64::new(0.0, 0.0); n];
        for m in 1..=n_max {
            if m as u64 % q == 0 {
                continue;
            }
            let x = PI * (m * m) as f64 / qf;
            let ln_m = (m as f64).ln();
            let j = ind[m % q as usize];
            f[j] += (-s * ln_m - lg).exp() * upper_gamma(z, x);
            h[j] += ((s - 1.0) * ln_m).exp() * upper_gamma(zc, x);
        }
        inv.process(&mut f);
        fwd.process(&mut h);
        let ia = if parity == Parity::Odd { Complex64::i() } else { Complex64::new(1.0, 0.0) };
        for k in 0..n {
            if (k % 2 == 1) != (parity == Parity::Odd) {
                continue;
            }
            let eps = tau[k] / (ia * qf.sqrt());
            out[k] = f[k] + eps * ratio * h[k];
        }
    }
    out
}

fn scan_prime(q: u64, t_grid: &[f64]) -> ConvexityPoint {
    let mut best = ConvexityPoint {
        q,
        max_abs: 0.0,
        argmax_k: 1,
        argmax_t: t_grid.first().copied().unwrap_or(0.0),
    };
    for &t in t_grid {
        let vals = critical_values_prime(q, t);
        for (k, v) in vals.iter().enumerate().skip(1) {
            if v.norm() > best.max_abs {
                best.max_abs = v.norm();
                best.argmax_k = k as u64;
                best.argmax_t = t;
            }
        }
    }
    best
}

fn slope(points: &[ConvexityPoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.q as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.max_abs.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Scans all primes `3 <= q <= q_max`, maximizing `|L(1/2 + it, chi)|` over
/// nonprincipal characters and the `t` grid.
pub fn convexity_scan(q_max: u64, t_grid: &[f64]) -> Result<ConvexityReport, LError> {
    if q_max > TABLE_LIMIT {
        return Err(ArithError::Overflow { modulus: q_max }.into());
    }
    let primes: Vec<u64> = primes_up_to(q_max).into_iter().filter(|&p| p >= 3).collect();
    let mids: Vec<f64> = t_grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let rows: Vec<(ConvexityPoint, ConvexityPoint)> = primes
        .par_iter()
        .map(|&q| (scan_prime(q, t_grid), scan_prime(q, &mids)))
        .collect();
    let mut change: f64 = 0.0;
    let points: Vec<ConvexityPoint> = rows
        .into_iter()
        .map(|(coarse, mid)| {
            if mid.max_abs > coarse.max_abs {
                change = change.max(mid.max_abs / coarse.max_abs - 1.0);
                mid
            } else {
                coarse
            }
        })
        .collect();
    Ok(ConvexityReport {
        exponent: slope(&points),
        threshold: 0.25 + EXPONENT_SLACK,
        refinement_change: change,
        points,
    })
}

/// Evenly spaced grid on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| t_max * i as f64 / steps.max(1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::char_group;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn classical_values() {
        let z = dirichlet_l(&DirichletCharacter::principal(1), c(2.0), Method::SmoothedSum).unwrap();
        assert!((z.value.re - PI * PI / 6.0).abs() < 1e-9);
        let chi4 = char_group(4).unwrap().into_iter().find(|c| !c.is_principal()).unwrap();
        let l = dirichlet_l(&chi4, c(1.0), Method::SmoothedSum).unwrap();
        assert!((l.value - PI / 4.0).norm() < 1e-9);
        let l = dirichlet_l(&chi4, c(1.0), Method::FunctionalEquation).unwrap();
        assert!((l.value - PI / 4.0).norm() < 1e-9);
        assert_eq!(
            dirichlet_l(&DirichletCharacter::principal(3), c(1.0), Method::SmoothedSum),
            Err(LError::PoleAt1)
        );
    }

    #[test]
    fn zeta_by_both_methods() {
        let one = DirichletCharacter::principal(1);
        for s in [Complex64::new(0.5, 14.134_725_141_734_693), Complex64::new(2.0, 3.0), c(0.5)] {
            let a = dirichlet_l(&one, s, Method::SmoothedSum).unwrap();
            let b = dirichlet_l(&one, s, Method::FunctionalEquation).unwrap();
            assert!((a.value - b.value).norm() < 1e-10, "s={s} {} {}", a.value, b.value);
        }
    }

    #[test]
    fn quadratic_mod5_methods_agree() {
        let chi = char_group(5).unwrap().into_iter().find(|c| c.order() == 2).unwrap();
        let a = dirichlet_l(&chi, c(0.5), Method::SmoothedSum).unwrap();
        let b = dirichlet_l(&chi, c(0.5), Method::FunctionalEquation).unwrap();
        assert!((a.value - b.value).norm() < 1e-6);
        assert!(a.value.im.abs() < 1e-12);
    }

    #[test]
    fn imprimitive_rejected_and_induced() {
        let chi = char_group(4).unwrap()[1].lift(12).unwrap();
        assert!(matches!(
            dirichlet_l(&chi, c(0.5), Method::FunctionalEquation),
            Err(LError::NotPrimitive { .. })
        ));
        let s = Complex64::new(0.5, 2.0);
        let a = dirichlet_l_induced(&chi, s).unwrap();
        let b = dirichlet_l(&chi, s, Method::SmoothedSum).unwrap();
        assert!((a.value - b.value).norm() < 1e-10);
    }

    #[test]
    fn fft_scan_matches_direct() {
        for q in [5u64, 7, 11] {
            for t in [0.0, 3.5] {
                let vals = critical_values_prime(q, t);
                let mut a: Vec<f64> = vals.iter().skip(1).map(|v| v.norm()).collect();
                let mut b: Vec<f64> = char_group(q)
                    .unwrap()
                    .iter()
                    .filter(|c| !c.is_principal())
                    .map(|c| dirichlet_l(c, Complex64::new(0.5, t), Method::SmoothedSum).unwrap().value.norm())
                    .collect();
                a.sort_by(f64::total_cmp);
                b.sort_by(f64::total_cmp);
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-9, "q={q} t={t}");
                }
            }
        }
    }

    #[test]
    fn c_factor_principal_reduces_to_zeta() {
        let one = DirichletCharacter::principal(1);
        let (s1, s2, w) = (c(2.5), c(2.0), c(0.3));
        let delta = 5;
        let cf = c_factor(&CFactorInput { s1, s2, w, delta, chi: one.clone(), psi: one.clone() }).unwrap();
        let z = |s: Complex64| crate::special::hurwitz_zeta(s, 1.0);
        let kron = DirichletCharacter::kronecker(delta).unwrap();
        let lk = |s: Complex64| -> Complex64 {
            (1..200_000u64).map(|n| kron.value_u(n) * c(n as f64).powc(-s)).sum()
        };
        let u = s1 + 2.0 * s2 + 1.0 + w;
        let v = s2 + 1.0 + w;
        let b = euler_product_eval(
            EulerKind::BSum,
            SArgs { s1, s2, w },
            Quadratic::with_discriminant(delta).unwrap(),
            &one,
            &one,
            B_TRUNCATION,
            1.0,
        )
        .unwrap()
        .product;
        let want = z(s2) * z(s1) / z(s1 + s2) * lk(u) / z(u) * z(v) / lk(v) * b;
        assert!((cf.value - want).norm() < 1e-9 * want.norm());
        assert!(cf.error_bound < 1e-6 * want.norm());
    }

    #[test]
    fn c_factor_pole_is_named() {
        let one = DirichletCharacter::principal(1);
        let err = c_factor(&CFactorInput {
            s1: c(2.0),
            s2: c(1.0),
            w: c(0.1),
            delta: 5,
            chi: one.clone(),
            psi: one,
        })
        .unwrap_err();
        assert_eq!(err, LError::PoleHit { factor: "L(s2, chi)".into() });
    }

    #[test]
    fn c_factor_error_covers_perturbations() {
        let chi = char_group(5).unwrap()[1].clone();
        let psi = char_group(7).unwrap()[2].clone();
        let s = Complex64::new(0.5, 3.0);
        let cf = c_factor(&CFactorInput { s1: s, s2: s, w: c(0.0), delta: -3, chi, psi }).unwrap();
        for i in 0..cf.terms.len() {
            for dir in [1.0, -1.0] {
                let mut shifts = vec![c(0.0); cf.terms.len()];
                shifts[i] = c(dir * cf.terms[i].error_bound);
                assert!((cf.recombine(&shifts) - cf.value).norm() <= cf.error_bound);
            }
        }
        // square discriminant: the two symbol ratios become finite removals
        let chi = char_group(5).unwrap()[1].clone();
        let psi = char_group(7).unwrap()[2].clone();
        let cf = c_factor(&CFactorInput { s1: s, s2: s, w: c(0.0), delta: 9, chi, psi }).unwrap();
        assert!(cf.value.norm().is_finite());
    }

    #[test]
    fn small_scan() {
        let r = convexity_scan(60, &uniform_grid(4.0, 4)).unwrap();
        assert_eq!(r.points.first().unwrap().q, 3);
        assert!(r.exponent.is_finite());
    }
}
