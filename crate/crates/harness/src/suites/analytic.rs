//! Archimedean suites: Mellin-Barnes, Bessel pair integrals and regimes,
//! D-factor and decay audits, twisted Poisson summation, partitions of unity.

use std::f64::consts::PI;

use ampsum_core::archimedean::bessel::{bessel_j, bessel_y0, regime_boundary_audit};
use ampsum_core::archimedean::integrals::{
    bessel_pair_closed_form, bessel_pair_integral, bessel_pair_quadrature, d_factor_bound_check, dyadic_weight,
    kuznetsov_h, mconv_decay_audit, ncc_decay_audit, DecayAudit, Geometry, IParams, SpectralTag,
};
use ampsum_core::archimedean::mellin::{self as mt, gamma_ratio_decay, mellin_barnes_check};
use ampsum_core::archimedean::partition::partition_unity;
use ampsum_core::archimedean::poisson::{poisson_twisted_check, poisson_twisted_check_with, ResidueWeight, TransformTable};
use ampsum_core::archimedean::{BumpCombination, ContourSpec, QuadratureSpec, TestFunction};
use ampsum_core::arith::char_group;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::{check, cx, err, CheckResult, Ctx, Outcome, Timed};
use crate::config::SuiteName;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

pub fn mellin(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.mellin;
    let mut jobs = Vec::new();
    for &x in &g.xs {
        for &s in &g.ss {
            jobs.push((x, s));
        }
    }
    let mut out: Vec<Timed> = jobs
        .par_iter()
        .map(|&(x, s)| {
            let s = cx(s);
            let c = s.re / 2.0;
            check(
                SuiteName::Mellin,
                format!("mellin/barnes/x={x}/s={},{}", s.re, s.im),
                json!({"x": x, "s": [s.re, s.im], "contour_real_part": c, "height_cap": g.height_cap}),
                || {
                    let mut sp = spec();
                    sp.contour = ContourSpec { real_part: c, height_cap: g.height_cap };
                    let r = mellin_barnes_check(x, s, &sp).map_err(err)?;
                    Ok(Outcome::within(r.residual, g.tolerance, 1).with(json!({
                        "tail_bound": r.tail_bound,
                        "oracle_gap": r.contour.oracle_gap,
                    })))
                },
            )
        })
        .collect();

    out.push(check(
        SuiteName::Mellin,
        "mellin/gamma_ratio".into(),
        json!({"line": g.gamma_line, "s2": g.gamma_s2, "t": g.gamma_t}),
        || {
            let r = gamma_ratio_decay(g.gamma_line, cx(g.gamma_s2), &g.gamma_t).map_err(err)?;
            Ok(Outcome::verdict(!r.growth_flag, r.max_quotient, r.samples.len() as u64).with(json!({
                "quotients": r.samples.iter().map(|s| s.quotient).collect::<Vec<_>>(),
            })))
        },
    ));

    out.push(check(
        SuiteName::Mellin,
        "mellin/scaling_and_linearity".into(),
        json!({"s": [0.7, 3.0]}),
        || {
            let s = Complex64::new(0.7, 3.0);
            let f = TestFunction::bump(2.0, 1.0, 4).map_err(err)?;
            let half = TestFunction::bump(1.0, 0.5, 4).map_err(err)?;
            let h = TestFunction::bump(5.0, 2.0, 4).map_err(err)?;
            let mf = mt::mellin(&f, s, &spec()).map_err(err)?.value;
            let mg = mt::mellin(&half, s, &spec()).map_err(err)?.value;
            let mh = mt::mellin(&h, s, &spec()).map_err(err)?.value;
            let combo = BumpCombination::zero().plus(2.0, f).plus(-3.0, h);
            let mc = mt::mellin(&combo, s, &spec()).map_err(err)?.value;
            let scaling = (mg - Complex64::new(2.0, 0.0).powc(-s) * mf).norm();
            let linear = (mc - (2.0 * mf - 3.0 * mh)).norm();
            Ok(Outcome::within(scaling.max(linear), 1e-12, 2))
        },
    ));
    out
}

pub fn bessel(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.bessel;
    let mut out: Vec<Timed> = g
        .pair_samples
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b, w))| {
            check(
                SuiteName::Bessel,
                format!("bessel/pair/{i}"),
                json!({"a": a, "b": b, "w": w}),
                || {
                    let r = bessel_pair_integral(a, b, cx(w), &spec()).map_err(err)?;
                    let residual = r.residual.ok_or("no closed form for this sample")?;
                    Ok(Outcome::within(residual, g.pair_tolerance, 1).with(json!({
                        "rotated_gap": r.rotated_gap,
                        "displayed_form_residual": r.displayed_form_residual,
                        "ladder_error": r.quadrature.error,
                    })))
                },
            )
        })
        .collect();

    let displayed: Vec<f64> = out
        .iter()
        .filter_map(|t| t.record.details.get("displayed_form_residual").and_then(|v| v.as_f64()))
        .collect();
    out.push(check(
        SuiteName::Bessel,
        "bessel/pair/displayed_bracket".into(),
        json!({"samples": displayed.len()}),
        || Ok(Outcome::report(Some(displayed.iter().copied().fold(0.0, f64::max)), displayed.len() as u64)),
    ));

    out.extend(g.nonpositive_samples.par_iter().enumerate().map(|(i, &(a, b, w))| {
        check(
            SuiteName::Bessel,
            format!("bessel/pair_nonpositive/{i}"),
            json!({"a": a, "b": b, "w": w}),
            || {
                let r = bessel_pair_integral(a, b, cx(w), &spec()).map_err(err)?;
                let form = r.nonpositive_form.ok_or("no K-Bessel or gamma form")?;
                Ok(Outcome::within((form - r.quadrature.value).norm(), g.pair_tolerance, 1)
                    .with(json!({"degenerate": r.degenerate})))
            },
        )
    }).collect::<Vec<_>>());

    for &(a, b) in &g.limit_points {
        out.push(check(
            SuiteName::Bessel,
            format!("bessel/w_limit/a={a}/b={b}"),
            json!({"a": a, "b": b, "step": g.limit_step}),
            || {
                let lim = bessel_pair_closed_form(a, b, Complex64::new(0.0, 0.0)).map_err(err)?;
                let mut worst: f64 = 0.0;
                for w in [Complex64::new(g.limit_step, 0.0), Complex64::new(0.0, g.limit_step)] {
                    let near = bessel_pair_closed_form(a, b, w).map_err(err)?;
                    worst = worst.max((near - lim).norm());
                }
                let quad = bessel_pair_quadrature(a, b, Complex64::new(0.0, 0.0), &spec()).map_err(err)?;
                Ok(Outcome::within(worst, g.limit_tolerance, 2)
                    .and(Outcome::within((quad.value - lim).norm(), g.pair_tolerance, 1))
                    .with(json!({"quadrature_gap": (quad.value - lim).norm()})))
            },
        ));
        let x = 4.0 * PI * (a * b).sqrt();
        out.push(check(
            SuiteName::Bessel,
            format!("bessel/w_limit_bracket/a={a}/b={b}"),
            json!({"x": x, "step": g.limit_step}),
            || {
                let (bracket, y0, j0) = bracket_near_zero(x, g.limit_step)?;
                Ok(Outcome::within((bracket - (y0 + j0)).abs(), g.limit_tolerance, 1))
            },
        ));
        out.push(check(
            SuiteName::Bessel,
            format!("bessel/w_limit_half_y0_reading/a={a}/b={b}"),
            json!({"x": x, "step": g.limit_step}),
            || {
                let (bracket, y0, j0) = bracket_near_zero(x, g.limit_step)?;
                Ok(Outcome::report(Some((bracket - (0.5 * y0 + j0)).abs()), 1))
            },
        ));
    }

    for (i, rc) in regime_boundary_audit().into_iter().enumerate() {
        out.push(check(
            SuiteName::Bessel,
            format!("bessel/regime/{i}"),
            json!({"nu": [rc.nu.re, rc.nu.im], "x": rc.x, "regimes": [rc.first, rc.second]}),
            || Ok(Outcome::within(rc.rel_diff, g.regime_tolerance, 1)),
        ));
    }

    let v = TestFunction::bump(3.0, 1.5, 4);
    for tag in [
        SpectralTag::Holomorphic { k: 2 },
        SpectralTag::Holomorphic { k: 12 },
        SpectralTag::Maass { t: 0.0 },
        SpectralTag::Maass { t: 1.3 },
        SpectralTag::Maass { t: 9.5 },
    ] {
        let label = match tag {
            SpectralTag::Holomorphic { k } => format!("k={k}"),
            SpectralTag::Maass { t } => format!("t={t}"),
        };
        let v = v.clone();
        out.push(check(
            SuiteName::Bessel,
            format!("bessel/kuznetsov_h/{label}"),
            json!({"tag": tag, "v": [3.0, 1.5]}),
            || {
                let h = kuznetsov_h(&v.map_err(err)?, tag, &spec()).map_err(err)?;
                let tol = 1e-9 * (1.0 + h.value.norm());
                Ok(Outcome::within(h.oracle_gap, tol, 1).with(json!({"value": [h.value.re, h.value.im]})))
            },
        ));
    }
    out
}

/// `[(J_w - J_-w) / (2 sin(pi w/2)) + (J_w + J_-w) / (2 cos(pi w/2))]` at a
/// small real `w`, with `Y_0` and `J_0` at the same argument.
fn bracket_near_zero(x: f64, step: f64) -> Result<(f64, f64, f64), String> {
    let w = Complex64::new(step, 0.0);
    let jp = bessel_j(w, x).map_err(err)?;
    let jm = bessel_j(-w, x).map_err(err)?;
    let h = PI * step / 2.0;
    let bracket = (jp - jm).re / (2.0 * h.sin()) + (jp + jm).re / (2.0 * h.cos());
    let j0 = bessel_j(Complex64::new(0.0, 0.0), x).map_err(err)?.re;
    Ok((bracket, bessel_y0(x).map_err(err)?, j0))
}

fn decay_outcome(a: &DecayAudit) -> Outcome {
    let shortfall = if a.fitted_exponent.is_finite() {
        (a.required - a.fitted_exponent).max(0.0)
    } else {
        a.required
    };
    Outcome::verdict(a.passed(), shortfall, a.ladder.len() as u64).with(json!({
        "fitted_exponent": a.fitted_exponent,
        "required": a.required,
        "points_used": a.points_used,
        "noise_floor": a.noise_floor,
        "magnitudes": a.ladder.iter().map(|p| p.magnitude).collect::<Vec<_>>(),
    }))
}

pub fn dfactor(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.dfactor;
    let mut out: Vec<Timed> = g
        .geometries
        .iter()
        .map(|&(d0, k, l1, l2, m)| {
            let geom = Geometry { d0, k, l1, l2, m };
            check(
                SuiteName::Dfactor,
                format!("dfactor/bound/geometry=({d0},{k},{l1},{l2},{m})"),
                json!({"geometry": geom, "sigma1": g.sigma1, "sigma2": g.sigma2, "t": g.t_samples, "gamma": g.gammas}),
                || d_bound(ctx, geom),
            )
        })
        .collect();

    out.push(check(
        SuiteName::Dfactor,
        "dfactor/ncc_decay".into(),
        json!({"params": [1, 15, 2, 3, 1, 3, 5], "x": "2 pi", "y": "2 pi sqrt 6"}),
        || {
            let params = IParams { d0: 1, m: 15, l1: 2, l2: 3, k: 1, p: 3, q: 5 };
            let f_m = dyadic_weight(1.0, 4).map_err(err)?;
            let v = TestFunction::bump(2.0, 1.0, 4).map_err(err)?;
            let (x, y) = (2.0 * PI, 2.0 * PI * 6f64.sqrt());
            let a = ncc_decay_audit(x, y, &params, &f_m, &v, &v, &spec()).map_err(err)?;
            Ok(decay_outcome(&a))
        },
    ));
    out.push(check(
        SuiteName::Dfactor,
        "dfactor/mconv_decay".into(),
        json!({"geometry": [1, 4, 1, 1], "x": "sqrt 5", "y": "16 sqrt 5", "w": [0.0, 1.0], "rungs": g.mconv_rungs}),
        || {
            let geom = Geometry { d0: 1, k: 4, l1: 1, l2: 1, m: 0 };
            let x = 5f64.sqrt();
            let a = mconv_decay_audit(x, 16.0 * x, &geom, Complex64::new(0.0, 1.0), g.mconv_rungs, &spec())
                .map_err(err)?;
            Ok(decay_outcome(&a))
        },
    ));
    out
}

fn d_bound(ctx: &Ctx, geom: Geometry) -> CheckResult {
    let g = &ctx.cfg.grid.dfactor;
    let v = TestFunction::bump(2.0, 1.0, 4).map_err(err)?;
    let r = d_factor_bound_check(g.sigma1, g.sigma2, &g.t_samples, &g.t_samples, &g.gammas, &v, &v, &geom)
        .map_err(err)?;
    let scale = 1.0 + r.samples.iter().map(|s| s.value.value.norm()).fold(0.0, f64::max);
    let rel_gap = r.max_oracle_gap / scale;
    Ok(Outcome::within(rel_gap, g.oracle_tolerance, r.samples.len() as u64).with(json!({
        "bound_constant": r.constant,
        "epsilon": r.epsilon,
        "max_a_over_b": r.max_a_over_b,
    })))
}

pub fn poisson(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.poisson;
    let (a, b) = g.quadratic;
    let mut out: Vec<Timed> = (1..=g.c_max)
        .into_par_iter()
        .map(|c| {
            check(
                SuiteName::Poisson,
                format!("poisson/quadratic/c={c}"),
                json!({"c": c, "a": a, "b": b, "bump": g.bump}),
                || {
                    let f = TestFunction::bump(g.bump.0, g.bump.1, 4).map_err(err)?;
                    let r = poisson_twisted_check(&f, &ResidueWeight::quadratic_roots(c, a, b), &spec()).map_err(err)?;
                    Ok(Outcome::within(r.residual, g.tolerance, r.dual_terms).with(json!({"tail_bound": r.tail_bound})))
                },
            )
        })
        .collect();
    out.extend((2..=g.c_max).into_par_iter().map(|q| {
        check(
            SuiteName::Poisson,
            format!("poisson/character/q={q}"),
            json!({"q": q, "bump": g.bump, "characters": "primitive"}),
            || {
                let f = TestFunction::bump(g.bump.0, g.bump.1, 4).map_err(err)?;
                let (mut worst, mut gauss, mut cases) = (0.0f64, 0.0f64, 0u64);
                let mut table = TransformTable::new(&f, q, &spec()).map_err(err)?;
                for chi in char_group(q).map_err(err)?.iter().filter(|c| c.is_primitive()) {
                    let r = poisson_twisted_check_with(&ResidueWeight::character(chi), &mut table).map_err(err)?;
                    worst = worst.max(r.residual);
                    gauss = gauss.max(r.gauss_dual_residual.unwrap_or(0.0));
                    cases += 1;
                }
                Ok(Outcome::within(worst, g.tolerance, cases)
                    .and(Outcome::within(gauss, g.tolerance, cases))
                    .with(json!({"max_gauss_dual_residual": gauss})))
            },
        )
    }).collect::<Vec<_>>());
    out
}

pub fn partition(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.partition;
    g.x_caps
        .iter()
        .map(|&x_cap| {
            check(
                SuiteName::Partition,
                format!("partition/x_cap={x_cap:e}"),
                json!({"x_cap": x_cap}),
                || {
                    let p = partition_unity(x_cap);
                    let count_ok = p.count() as f64 <= p.count_bound();
                    Ok(Outcome::within(p.residual, g.tolerance, p.grid_points as u64)
                        .and(Outcome::verdict(count_ok && p.supports_ok, 0.0, 1))
                        .with(json!({
                            "blocks": p.count(),
                            "count_bound": p.count_bound(),
                            "supports_ok": p.supports_ok,
                            "derivative_bounds": p.derivative_bounds,
                        })))
                },
            )
        })
        .collect()
}
