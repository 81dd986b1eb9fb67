//! Bessel functions of complex order and positive real argument.
//!
//! `J_nu(x)` is evaluated in four regimes, each with an error estimate from
//! magnitude tracking or the size of the first neglected term:
//!
//! * power series, accurate unless the terms cancel heavily (large `x`);
//! * Hankel's large-argument expansion, for `x` well above `|nu|^2`;
//! * the Debye expansion for orders of large modulus off the real axis,
//!   `J_nu(x) ~ sum_{+-} exp(zeta - nu ln((nu + zeta)/x)) / sqrt(2 pi zeta) sum u_k(nu/zeta)/nu^k`
//!   over `zeta = +- i sqrt(x^2 - nu^2)`;
//! * Schläfli's integral, filling the gap at moderate order and argument.
//!
//! A regime is only accepted if its estimate meets the requested tolerance;
//! otherwise the evaluation fails with `RegimeGap`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::gauss_kronrod;
use super::ArchError;
use crate::special::ln_gamma;

pub const DEFAULT_TOL: f64 = 1e-10;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Series,
    Hankel,
    Debye,
    Schlafli,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::Series, Regime::Hankel, Regime::Debye, Regime::Schlafli];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselValue {
    pub value: Complex64,
    /// Estimated relative error; infinite when the regime does not apply.
    pub rel_error: f64,
    pub regime: Regime,
}

impl BesselValue {
    fn unusable(regime: Regime) -> Self {
        BesselValue {
            value: Complex64::new(f64::NAN, f64::NAN),
            rel_error: f64::INFINITY,
            regime,
        }
    }
}

/// Neumaier-compensated complex accumulator that also tracks `sum |terms|`.
#[derive(Default)]
struct Compensated {
    sum: Complex64,
    comp: Complex64,
    magnitude: f64,
}

impl Compensated {
    fn add(&mut self, t: Complex64) {
        let re = two_sum(self.sum.re, t.re);
        let im = two_sum(self.sum.im, t.im);
        self.sum = Complex64::new(re.0, im.0);
        self.comp += Complex64::new(re.1, im.1);
        self.magnitude += t.norm();
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn negative_integer(nu: Complex64) -> Option<i64> {
    (nu.im == 0.0 && nu.re < 0.0 && nu.re == nu.re.round()).then_some(nu.re as i64)
}

/// Power series `sum (-x^2/4)^k (x/2)^nu / (k! Gamma(nu + k + 1))`.
pub fn series(nu: Complex64, x: f64) -> BesselValue {
    if let Some(n) = negative_integer(nu) {
        let mut v = series(-nu, x);
        if n % 2 != 0 {
            v.value = -v.value;
        }
        return v;
    }
    let lg = ln_gamma(nu + 1.0);
    let mut t = (nu * (x / 2.0).ln() - lg).exp();
    let q = -x * x / 4.0;
    let mut acc = Compensated::default();
    acc.add(t);
    let mut k = 0usize;
    while k < 2000 {
        k += 1;
        t *= q / (k as f64 * (nu + k as f64));
        acc.add(t);
        if t.norm() <= 1e-17 * acc.total().norm() && (k as f64) > x.max(nu.norm()) {
            break;
        }
    }
    let value = acc.total();
    let rounding = 2.0 * f64::EPSILON * acc.magnitude / value.norm();
    BesselValue {
        value,
        rel_error: rounding + 2.0 * f64::EPSILON * (1.0 + lg.norm()),
        regime: Regime::Series,
    }
}

/// Hankel's expansion `sqrt(2/(pi x)) (P cos w - Q sin w)`.
pub fn hankel(nu: Complex64, x: f64) -> BesselValue {
    let (p, q, err) = hankel_pq(nu, x);
    let w = x - nu * (PI / 2.0) - PI / 4.0;
    let (c, s) = (w.cos(), w.sin());
    let value = (p * c - q * s) * (2.0 / (PI * x)).sqrt();
    let scale = (c.norm() + s.norm()) * (2.0 / (PI * x)).sqrt();
    BesselValue {
        value,
        rel_error: err * scale / value.norm() + 4.0 * f64::EPSILON * (1.0 + nu.im.abs() * PI),
        regime: Regime::Hankel,
    }
}

/// Asymptotic series `P`, `Q` and the size of the first omitted term.
fn hankel_pq(nu: Complex64, x: f64) -> (Complex64, Complex64, f64) {
    let mu = nu * nu * 4.0;
    let mut a = Complex64::new(1.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200usize {
        let m = (2 * k - 1) as f64;
        a *= (mu - m * m) / (8.0 * k as f64 * x);
        let size = a.norm();
        if size > last && k as f64 > nu.norm() {
            return (p, q, last);
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += a * sign;
        } else {
            q += a * sign;
        }
        last = size;
        if size < 1e-17 {
            return (p, q, size);
        }
    }
    (p, q, last)
}

fn debye_u(k: usize, t: Complex64) -> Complex64 {
    let t2 = t * t;
    let poly = |c: &[f64]| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * t2 + v);
    match k {
        0 => Complex64::new(1.0, 0.0),
        1 => t * poly(&[3.0, -5.0]) / 24.0,
        2 => t2 * poly(&[81.0, -462.0, 385.0]) / 1152.0,
        3 => t * t2 * poly(&[30375.0, -369603.0, 765765.0, -425425.0]) / 414720.0,
        4 => {
            t2 * t2
                * poly(&[4465125.0, -94121676.0, 349922430.0, -446185740.0, 185910725.0])
                / 39813120.0
        }
        _ => unreachable!(),
    }
}

/// One saddle of the Debye expansion; `sign` selects `zeta` or `-zeta`.
/// Returns the value and the size of the last term used.
fn debye_saddle(nu: Complex64, x: f64, sign: f64) -> (Complex64, f64, bool) {
    let zeta = Complex64::i() * (Complex64::new(x * x, 0.0) - nu * nu).sqrt() * sign;
    let lead = (zeta - nu * ((nu + zeta) / x).ln()).exp() / (zeta * 2.0 * PI).sqrt();
    let t = nu / zeta;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut nu_pow = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 0..=4 {
        let term = debye_u(k, t) / nu_pow;
        if term.norm() > last {
            return (lead * sum, f64::INFINITY, false);
        }
        sum += term;
        last = term.norm();
        nu_pow *= nu;
    }
    (lead * sum, last * lead.norm(), true)
}

/// Debye expansion for `|nu|` large and `nu` away from the positive axis,
/// summed over both saddles.
pub fn debye(nu: Complex64, x: f64) -> BesselValue {
    if nu.im < 0.0 {
        let mut v = debye(nu.conj(), x);
        v.value = v.value.conj();
        return v;
    }
    if nu.norm() < 1.0 || nu.re > nu.im {
        return BesselValue::unusable(Regime::Debye);
    }
    let (a, ea, ok_a) = debye_saddle(nu, x, 1.0);
    let (b, eb, ok_b) = debye_saddle(nu, x, -1.0);
    let value = a + b;
    let rel_error = if ok_a && ok_b {
        (ea + eb) / value.norm() + 8.0 * f64::EPSILON * (1.0 + nu.norm()) * a.norm() / value.norm()
    } else {
        f64::INFINITY
    };
    BesselValue {
        value,
        rel_error,
        regime: Regime::Debye,
    }
}

/// Schläfli's integral
/// `J_nu(x) = (1/pi) int_0^pi cos(nu t - x sin t) dt - (sin(nu pi)/pi) int_0^inf exp(-x sinh t - nu t) dt`.
pub fn schlafli(nu: Complex64, x: f64) -> BesselValue {
    if nu.im.abs() > 12.0 {
        return BesselValue::unusable(Regime::Schlafli);
    }
    let first = gauss_kronrod(|t| (nu * t - x * t.sin()).cos(), 0.0, PI, 1e-15, 1e-14, 40);
    let weight = (nu * PI).sin();
    // cut where x sinh t - |Re nu| t > 60
    let mut upper = 1.0f64;
    while x * upper.sinh() - nu.re.abs() * upper < 60.0 && upper < 100.0 {
        upper *= 1.5;
    }
    let second = gauss_kronrod(|t| (-x * t.sinh() - nu * t).exp(), 0.0, upper, 1e-16, 1e-14, 40);
    let (Ok(a), Ok(b)) = (first, second) else {
        return BesselValue::unusable(Regime::Schlafli);
    };
    let value = (a.value - weight * b.value) / PI;
    // integrand scale e^{|Im nu| pi} drives the rounding loss
    let mag = ((nu.im.abs() * PI).exp() + weight.norm() * b.value.norm()) / PI;
    BesselValue {
        value,
        rel_error: (a.error + weight.norm() * b.error) / PI / value.norm() + 64.0 * f64::EPSILON * mag / value.norm(),
        regime: Regime::Schlafli,
    }
}

pub fn bessel_j_regime(nu: Complex64, x: f64, regime: Regime) -> BesselValue {
    match regime {
        Regime::Series => series(nu, x),
        Regime::Hankel => hankel(nu, x),
        Regime::Debye => debye(nu, x),
        Regime::Schlafli => schlafli(nu, x),
    }
}

/// Amplitude `sqrt(2/(pi x)) cosh(pi Im nu / 2)` of the oscillation when
/// `x >= |nu|`; errors there are measured against it so that values near
/// real zeros are judged by absolute accuracy.
fn envelope(nu: Complex64, x: f64) -> f64 {
    if x >= nu.norm() {
        (2.0 / (PI * x)).sqrt() * (PI * nu.im / 2.0).cosh()
    } else {
        0.0
    }
}

/// Error of `v` relative to `max(|J|, envelope)`.
fn scaled_error(v: &BesselValue, env: f64) -> f64 {
    let mag = v.value.norm();
    if mag >= env {
        v.rel_error
    } else {
        v.rel_error * mag / env
    }
}

/// `J_nu(x)` from the cheapest regime meeting `tol`, relative to
/// `max(|J_nu(x)|, envelope)`.
pub fn bessel_j_tol(nu: Complex64, x: f64, tol: f64) -> Result<BesselValue, ArchError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(ArchError::BadSpec("Bessel argument must be positive and finite"));
    }
    let env = envelope(nu, x);
    let mut best = BesselValue::unusable(Regime::Series);
    let mut best_err = f64::INFINITY;
    let mut consider = |v: BesselValue| -> bool {
        let err = scaled_error(&v, env);
        if v.value.re.is_finite() && v.value.im.is_finite() && err < best_err {
            best = v;
            best_err = err;
        }
        best_err <= tol
    };
    if x <= 40.0 + 0.5 * nu.norm() && consider(series(nu, x)) {
        return Ok(best);
    }
    if x >= 4.0 && consider(hankel(nu, x)) {
        return Ok(best);
    }
    if nu.norm() >= 1.0 && consider(debye(nu, x)) {
        return Ok(best);
    }
    if consider(schlafli(nu, x)) {
        return Ok(best);
    }
    Err(ArchError::RegimeGap {
        nu,
        x,
        best: best_err,
    })
}

/// `J_nu(x)` to [`DEFAULT_TOL`].
pub fn bessel_j(nu: Complex64, x: f64) -> Result<Complex64, ArchError> {
    bessel_j_tol(nu, x, DEFAULT_TOL).map(|v| v.value)
}

/// `Y_0(x)` from its logarithmic series or Hankel's expansion.
pub fn bessel_y0(x: f64) -> Result<f64, ArchError> {
    if !(x > 0.0) {
        return Err(ArchError::BadSpec("Y_0 needs a positive argument"));
    }
    if x >= 14.0 {
        let (p, q, _) = hankel_pq(Complex64::new(0.0, 0.0), x);
        let w = x - PI / 4.0;
        return Ok((2.0 / (PI * x)).sqrt() * (p.re * w.sin() + q.re * w.cos()));
    }
    let j0 = series(Complex64::new(0.0, 0.0), x).value.re;
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut acc = 0.0;
    for k in 1..200 {
        term *= -q / (k * k) as f64;
        harmonic += 1.0 / k as f64;
        let t = -term * harmonic;
        acc += t;
        if t.abs() < 1e-18 * acc.abs() && k as f64 > x {
            break;
        }
    }
    Ok(2.0 / PI * (((x / 2.0).ln() + EULER_GAMMA) * j0 + acc))
}

/// `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`.
pub fn bessel_k(nu: Complex64, x: f64) -> Result<Complex64, ArchError> {
    if !(x > 0.0) {
        return Err(ArchError::BadSpec("K needs a positive argument"));
    }
    let mut upper = 1.0f64;
    while x * (upper.cosh() - 1.0) - nu.re.abs() * upper < 45.0 && upper < 200.0 {
        upper *= 1.5;
    }
    let r = gauss_kronrod(
        |t| (nu * t).cosh() * (-x * t.cosh()).exp(),
        0.0,
        upper,
        1e-300,
        1e-13,
        40,
    )?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    pub nu: Complex64,
    pub x: f64,
    pub first: Regime,
    pub second: Regime,
    pub first_value: Complex64,
    pub second_value: Complex64,
    /// `|first - second| / max(|first|, envelope)`.
    pub rel_diff: f64,
}

/// Twenty points on the borders between adjacent regimes, five per border.
pub fn regime_boundary_points() -> Vec<(Complex64, f64, Regime, Regime)> {
    let c = Complex64::new;
    let mut out = Vec::with_capacity(20);
    for (i, x) in [14.0, 16.0, 18.0, 20.0, 24.0].into_iter().enumerate() {
        out.push((c(0.25 * i as f64, 0.5), x, Regime::Series, Regime::Hankel));
    }
    for (g, x) in [(2.0, 5.0), (3.0, 6.0), (4.0, 4.0), (6.0, 8.0), (8.0, 8.0)] {
        out.push((c(0.0, g), x, Regime::Series, Regime::Debye));
    }
    for (g, x) in [(2.0, 30.0), (3.0, 35.0), (1.5, 40.0), (2.5, 45.0), (4.0, 60.0)] {
        out.push((c(0.0, g), x, Regime::Debye, Regime::Hankel));
    }
    for (nu, x) in [(c(0.5, 2.0), 8.0), (c(-0.3, 1.0), 10.0), (c(1.5, -3.0), 12.0), (c(0.2, 0.2), 6.0), (c(2.5, 4.0), 9.0)] {
        out.push((nu, x, Regime::Schlafli, Regime::Series));
    }
    out
}

/// Evaluates both adjacent regimes at each boundary point.
pub fn regime_boundary_audit() -> Vec<RegimeCheck> {
    regime_boundary_points()
        .into_iter()
        .map(|(nu, x, first, second)| {
            let a = bessel_j_regime(nu, x, first).value;
            let b = bessel_j_regime(nu, x, second).value;
            let scale = a.norm().max(envelope(nu, x));
            RegimeCheck {
                nu,
                x,
                first,
                second,
                first_value: a,
                second_value: b,
                rel_diff: (a - b).norm() / scale,
            }
        })
        .collect()
}

/// Leading magnitude `exp(pi g) / (2 sqrt(pi z))`, `z = sqrt(T^2 + g^2)`, of
/// the uniform expansion of `J_{2ig}(T)`.
pub fn imaginary_order_leading(gamma: f64, t: f64) -> f64 {
    let z = (t * t + gamma * gamma).sqrt();
    (PI * gamma).exp() / (2.0 * (PI * z).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn boundary_audit() {
        let audit = regime_boundary_audit();
        assert_eq!(audit.len(), 20);
        for r in &audit {
            assert!(r.rel_diff < 1e-3, "{r:?}");
        }
    }

    #[test]
    fn known_values() {
        assert!((bessel_j(c(0.0, 0.0), 1e-12).unwrap().re - 1.0).abs() < 1e-15);
        assert!((bessel_j(c(0.0, 0.0), 1.0).unwrap().re - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(c(1.0, 0.0), 10.0).unwrap().re - 0.043_472_746_168_861_44).abs() < 1e-13);
        assert!((bessel_j(c(0.0, 0.0), 100.0).unwrap().re - 0.019_985_850_304_223_12).abs() < 1e-13);
        assert!((bessel_j(c(-1.0, 0.0), 2.0).unwrap().re + 0.576_724_807_756_873_4).abs() < 1e-14);
        assert!((bessel_y0(1.0).unwrap() - 0.088_256_964_215_676_96).abs() < 1e-14);
        assert!((bessel_y0(20.0).unwrap() - 0.062_640_596_809_384_6).abs() < 1e-12);
        assert!((bessel_y0(10.0).unwrap() - 0.055_671_167_283_599_4).abs() < 1e-13);
        assert!((bessel_k(c(0.0, 0.0), 1.0).unwrap().re - 0.421_024_438_240_708_3).abs() < 1e-13);
        assert!((bessel_k(c(0.5, 0.0), 2.0).unwrap().re - (PI / 4.0).sqrt() * (-2f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn conjugate_symmetry_and_wronskian() {
        for (nu, x) in [(c(0.3, 2.0), 5.0), (c(0.0, 7.0), 3.0), (c(0.2, -1.5), 30.0)] {
            let a = bessel_j(nu, x).unwrap();
            let b = bessel_j(nu.conj(), x).unwrap();
            assert!((a - b.conj()).norm() < 1e-9 * a.norm());
        }
        // J_nu J_{-nu+1} + J_{-nu} J_{nu-1} = 2 sin(nu pi)/(pi x)
        for (nu, x) in [(c(0.3, 0.4), 2.0), (c(0.1, 2.0), 8.0), (c(0.0, 1.0), 25.0)] {
            let lhs = bessel_j(nu, x).unwrap() * bessel_j(1.0 - nu, x).unwrap()
                + bessel_j(-nu, x).unwrap() * bessel_j(nu - 1.0, x).unwrap();
            let rhs = (nu * PI).sin() * 2.0 / (PI * x);
            assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()), "nu={nu} x={x}");
        }
    }

    #[test]
    fn series_vs_debye_at_2i_5() {
        let s = series(c(0.0, 2.0), 5.0);
        let d = debye(c(0.0, 2.0), 5.0);
        assert!((s.value - d.value).norm() / s.value.norm() < 1e-4);
    }

    #[test]
    fn large_imaginary_order_magnitude() {
        let (g, t) = (50.0, 5.0);
        let v = bessel_j(c(0.0, 2.0 * g), t).unwrap();
        let lead = imaginary_order_leading(g, t);
        assert!((v.norm() / lead - 1.0).abs() < 0.1);
    }

    #[test]
    fn regimes_overlap() {
        // Hankel against series at moderate arguments
        for (nu, x) in [(c(0.5, 0.5), 16.0), (c(0.0, 1.0), 14.0)] {
            let a = series(nu, x).value;
            let b = hankel(nu, x).value;
            assert!((a - b).norm() < 1e-8 * a.norm(), "{nu} {x}");
        }
        // Schläfli against series
        for (nu, x) in [(c(0.3, 3.0), 7.0), (c(1.5, -2.0), 12.0)] {
            let a = series(nu, x).value;
            let b = schlafli(nu, x).value;
            assert!((a - b).norm() < 1e-9 * a.norm(), "{nu} {x}");
        }
    }
}
