//! Mellin transforms, the Mellin-Barnes separation of `(1 + x)^{-s}`, and the
//! Stirling decay of the gamma ratio that appears in it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate_checked, Checked, QuadratureSpec};
use super::testfn::CompactWeight;
use super::ArchError;
use crate::special::{ln_gamma, near_gamma_pole};

/// `int_0^inf f(x) x^{s - 1} dx` over the support of `f`.
pub fn mellin(f: &impl CompactWeight, s: Complex64, spec: &QuadratureSpec) -> Result<Checked, ArchError> {
    let Some((a, b)) = f.support() else {
        return Ok(Checked::zero());
    };
    if a < 0.0 {
        return Err(ArchError::BadSupport { center: 0.5 * (a + b), width: 0.5 * (b - a) });
    }
    integrate_checked(|x| f.eval(x) * ((s - 1.0) * x.ln()).exp(), a.max(f64::MIN_POSITIVE), b, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinBarnesReport {
    pub x: f64,
    pub s: Complex64,
    pub contour_real_part: f64,
    pub height_cap: f64,
    pub direct: Complex64,
    pub contour: Checked,
    /// Estimated contribution of `|Im w| > height_cap`.
    pub tail_bound: f64,
    pub residual: f64,
}

fn gamma_ratio(w: Complex64, s: Complex64, ln_gamma_s: Complex64) -> Complex64 {
    (ln_gamma(w) + ln_gamma(s - w) - ln_gamma_s).exp()
}

/// `(1 + x)^{-s} = (1 / 2 pi i) int_(c) Gamma(w) Gamma(s - w) / Gamma(s) x^{-w} dw`
/// with `c = spec.contour.real_part`, which must lie in `(0, Re s)`.
pub fn mellin_barnes_check(x: f64, s: Complex64, spec: &QuadratureSpec) -> Result<MellinBarnesReport, ArchError> {
    spec.validate()?;
    let c = spec.contour.real_part;
    if !(c > 0.0 && c < s.re) {
        return Err(ArchError::ContourOutOfStrip {
            real_part: c,
            lo: 0.0,
            hi: s.re,
        });
    }
    if !(x > 0.0) {
        return Err(ArchError::BadSpec("Mellin-Barnes needs x > 0"));
    }
    let cap = spec.contour.height_cap;
    let lgs = ln_gamma(s);
    let lx = x.ln();
    // w = c + i tau, dw = i dtau, so the 1/(2 pi i) becomes 1/(2 pi).
    let f = |tau: f64| {
        let w = Complex64::new(c, tau);
        gamma_ratio(w, s, lgs) * (-w * lx).exp() / (2.0 * PI)
    };
    // Split where the two gamma factors peak so the rule sees both humps.
    let mut cuts = vec![-cap, 0.0, s.im, cap];
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut contour = Checked::zero();
    for pair in cuts.windows(2) {
        if pair[0] < pair[1] && pair[0] >= -cap && pair[1] <= cap {
            contour = contour.add(integrate_checked(f, pair[0], pair[1], spec)?);
        }
    }
    // The integrand decays like exp(-pi |tau|); bound each tail by
    // |f(T)| / (decay rate) from a two-point fit.
    let tail = |t: f64, dir: f64| {
        let (f0, f1) = (f(t).norm(), f(t - dir).norm());
        if f0 == 0.0 {
            return 0.0;
        }
        let rate = (f1 / f0).ln().max(0.1);
        f0 / rate
    };
    let tail_bound = tail(cap, 1.0) + tail(-cap, -1.0);
    let direct = (-s * (1.0 + x).ln()).exp();
    Ok(MellinBarnesReport {
        x,
        s,
        contour_real_part: c,
        height_cap: cap,
        direct,
        contour,
        tail_bound,
        residual: (contour.value - direct).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRatioSample {
    pub t: f64,
    /// `|Gamma(alpha) Gamma(s2 - alpha) / Gamma(s2)|` at `alpha = line + i t`.
    pub ratio: f64,
    /// `|1 + t2 - t|^{-1/2}`.
    pub bound: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRatioReport {
    pub alpha_line: f64,
    pub s2: Complex64,
    pub samples: Vec<GammaRatioSample>,
    pub max_quotient: f64,
    /// Set when a quotient exceeds `GROWTH_FACTOR` times the first one. Near
    /// `t = t2` the quotient grows like `1 / (1/2 - Re s2)`, so the flag is
    /// meaningful for `Re s2` not too close to `1/2`.
    pub growth_flag: bool,
}

/// Quotient growth that counts as a failure of the bound's shape.
pub const GROWTH_FACTOR: f64 = 10.0;

const POLE_TOL: f64 = 1e-9;

/// Samples `|Gamma(alpha) Gamma(s2 - alpha) / Gamma(s2)|` against
/// `|1 + t2 - t|^{-1/2}` along `Re alpha = alpha_line`.
pub fn gamma_ratio_decay(alpha_line: f64, s2: Complex64, t_samples: &[f64]) -> Result<GammaRatioReport, ArchError> {
    if near_gamma_pole(s2, POLE_TOL) {
        return Err(ArchError::PoleHit(format!("Gamma(s2) at s2 = {s2}")));
    }
    let lgs = ln_gamma(s2);
    let mut samples = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let alpha = Complex64::new(alpha_line, t);
        if near_gamma_pole(alpha, POLE_TOL) {
            return Err(ArchError::PoleHit(format!("Gamma(alpha) at alpha = {alpha}")));
        }
        if near_gamma_pole(s2 - alpha, POLE_TOL) {
            return Err(ArchError::PoleHit(format!("Gamma(s2 - alpha) at alpha = {alpha}")));
        }
        let ratio = gamma_ratio(alpha, s2, lgs).norm();
        let bound = (1.0 + s2.im - t).abs().powf(-0.5);
        samples.push(GammaRatioSample {
            t,
            ratio,
            bound,
            quotient: ratio / bound,
        });
    }
    let max_quotient = samples.iter().map(|s| s.quotient).fold(0.0, f64::max);
    let growth_flag = samples
        .first()
        .is_some_and(|first| max_quotient > GROWTH_FACTOR * first.quotient);
    Ok(GammaRatioReport {
        alpha_line,
        s2,
        samples,
        max_quotient,
        growth_flag,
    })
}

#[cfg(test)]
mod tests {
    use super::super::quadrature::fixed_rule;
    use super::super::testfn::{BumpCombination, TestFunction};
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn mellin_scaling_and_linearity() {
        let f = TestFunction::bump(2.0, 1.0, 4).unwrap();
        // f(2x) is the bump centered at 1 with width 1/2.
        let g = TestFunction::bump(1.0, 0.5, 4).unwrap();
        let s = Complex64::new(0.7, 3.0);
        let mf = mellin(&f, s, &spec()).unwrap();
        let mg = mellin(&g, s, &spec()).unwrap();
        let scale = Complex64::new(2.0, 0.0).powc(-s);
        assert!((mg.value - scale * mf.value).norm() < 1e-12);

        let h = TestFunction::bump(5.0, 2.0, 4).unwrap();
        let mh = mellin(&h, s, &spec()).unwrap();
        let combo = BumpCombination::zero().plus(2.0, f).plus(-3.0, h);
        let mc = mellin(&combo, s, &spec()).unwrap();
        assert!((mc.value - (2.0 * mf.value - 3.0 * mh.value)).norm() < 1e-12);
        assert_eq!(mellin(&BumpCombination::zero(), s, &spec()).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn mellin_oracle() {
        let f = TestFunction::bump(3.0, 2.0, 4).unwrap();
        let s = Complex64::new(1.5, -7.0);
        let m = mellin(&f, s, &spec()).unwrap();
        assert!(m.oracle_gap < 1e-10, "{}", m.oracle_gap);
        let dense = fixed_rule(|x| f.eval(x) * ((s - 1.0) * x.ln()).exp(), 1.0, 5.0, 20, 200);
        assert!((dense.value - m.value).norm() < 1e-10);
    }

    #[test]
    fn mellin_barnes_values() {
        let sp = spec();
        let r = mellin_barnes_check(1.0, Complex64::new(2.0, 0.0), &sp).unwrap();
        assert!((r.direct.re - 0.25).abs() < 1e-15);
        assert!(r.residual < 1e-10, "{}", r.residual);
        let r = mellin_barnes_check(3.0, Complex64::new(1.0, 0.0), &sp).unwrap();
        assert!((r.direct.re - 0.25).abs() < 1e-15);
        assert!(r.residual < 1e-10, "{}", r.residual);
        let s = Complex64::new(0.5, 3.0);
        assert!(matches!(
            mellin_barnes_check(0.1, s, &sp),
            Err(ArchError::ContourOutOfStrip { .. })
        ));
        let mut inside = sp;
        inside.contour.real_part = 0.25;
        let r = mellin_barnes_check(0.1, s, &inside).unwrap();
        assert!(r.residual < 1e-8, "{}", r.residual);
        assert!(r.tail_bound < 1e-12);
    }

    #[test]
    fn gamma_ratio_shape() {
        // s2 = 1/2 - delta + i t2; near t = t2 the ratio carries |Gamma(-delta)| ~ 1/delta.
        let s2 = Complex64::new(0.4, 20.0);
        let r = gamma_ratio_decay(0.5, s2, &[5.0, 19.9, 50.0]).unwrap();
        assert!(!r.growth_flag, "{r:?}");
        assert!(r.max_quotient < 20.0);
        let r0 = gamma_ratio_decay(0.5, s2, &[0.0]).unwrap();
        let direct = (ln_gamma(Complex64::new(0.5, 0.0)) + ln_gamma(s2 - 0.5) - ln_gamma(s2)).exp().norm();
        assert!((r0.samples[0].ratio - direct).abs() < 1e-14 * direct);
        let r = gamma_ratio_decay(0.5, s2, &[50.0, 100.0]).unwrap();
        assert!(r.samples[1].ratio < r.samples[0].ratio);
        assert!(matches!(
            gamma_ratio_decay(0.5, Complex64::new(-2.0, 0.0), &[1.0]),
            Err(ArchError::PoleHit(_))
        ));
    }
}
