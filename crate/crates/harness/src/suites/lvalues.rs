//! Dirichlet L-value suites. L-values and convexity scans go through the cache.

use ampsum_core::arith::{char_group, factorize, DirichletCharacter};
use ampsum_core::lfunc::{convexity_scan, dirichlet_l, uniform_grid, ConvexityReport, LValue, Method};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::{check, cx, err, Ctx, Outcome, Timed};
use crate::cache::CacheKey;
use crate::config::SuiteName;

fn point_text(s: Complex64) -> String {
    format!("{:e},{:e}", s.re, s.im)
}

fn cached_l(ctx: &Ctx, chi: &DirichletCharacter, s: Complex64, method: Method) -> Result<LValue, String> {
    let kind = match method {
        Method::SmoothedSum => "l_value/smoothed_sum",
        Method::FunctionalEquation => "l_value/functional_equation",
    };
    let index = chi.index().map(|i| i as u64);
    let key = CacheKey::new(kind, chi.modulus(), index, point_text(s));
    // Only enumerated characters have a stable identity to cache under.
    if index.is_none() {
        return dirichlet_l(chi, s, method).map_err(err);
    }
    ctx.cache.get_or_compute(&key, || dirichlet_l(chi, s, method).map_err(err))
}

pub fn lfunc(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.lfunc;
    let half = Complex64::new(0.5, 0.0);
    let mut out: Vec<Timed> = (1..=g.q_max)
        .into_par_iter()
        .filter(|&q| q % 4 != 2)
        .map(|q| {
            check(
                SuiteName::Lfunc,
                format!("lfunc/dual/q={q}"),
                json!({"q": q, "s": [0.5, 0.0], "slack": g.rounding_slack}),
                || {
                    let (mut worst, mut cases, mut max_gap) = (0.0f64, 0u64, 0.0f64);
                    for chi in char_group(q).map_err(err)?.iter().filter(|c| c.is_primitive()) {
                        let a = cached_l(ctx, chi, half, Method::SmoothedSum)?;
                        let b = cached_l(ctx, chi, half, Method::FunctionalEquation)?;
                        let gap = (a.value - b.value).norm();
                        let bound = a.error_bound + b.error_bound + g.rounding_slack;
                        worst = worst.max(gap / bound);
                        max_gap = max_gap.max(gap);
                        cases += 1;
                    }
                    // Quotient of the disagreement by the combined error bound.
                    Ok(Outcome::within(worst, 1.0, cases).with(json!({"max_gap": max_gap})))
                },
            )
        })
        .collect();

    let zeta = DirichletCharacter::principal(1);
    out.extend((1..=g.q_max).into_par_iter().map(|q| {
        check(
            SuiteName::Lfunc,
            format!("lfunc/zeta_relation/q={q}"),
            json!({"q": q, "points": g.zeta_points}),
            || {
                let chi0 = DirichletCharacter::principal(q);
                let mut worst: f64 = 0.0;
                for &p in &g.zeta_points {
                    let s = cx(p);
                    let l = cached_l(ctx, &chi0, s, Method::SmoothedSum)?;
                    let z = cached_l(ctx, &zeta, s, Method::FunctionalEquation)?;
                    let euler: Complex64 = factorize(q)
                        .into_iter()
                        .map(|(p, _)| 1.0 - Complex64::new(p as f64, 0.0).powc(-s))
                        .product();
                    worst = worst.max((l.value - z.value * euler).norm());
                }
                Ok(Outcome::within(worst, g.zeta_tolerance, g.zeta_points.len() as u64))
            },
        )
    }).collect::<Vec<_>>());
    out
}

pub fn convexity(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.convexity;
    let grid = uniform_grid(g.t_max, g.steps);
    let digest = hex::encode(Sha256::digest(serde_json::to_string(&grid).unwrap_or_default().as_bytes()));
    let params = json!({"q_max": g.q_max, "t_max": g.t_max, "steps": g.steps});
    let key = CacheKey::new("convexity_scan", g.q_max, None, digest);
    let mut out = Vec::new();
    let mut scan: Option<ConvexityReport> = None;
    out.push(check(SuiteName::Convexity, "convexity/exponent".into(), params.clone(), || {
        let rep = ctx.cache.get_or_compute(&key, || convexity_scan(g.q_max, &grid).map_err(err))?;
        let o = Outcome::report(Some(rep.exponent), rep.points.len() as u64).with(json!({
            "threshold": rep.threshold,
            "within_threshold": rep.within_threshold(),
            "refinement_change": rep.refinement_change,
        }));
        scan = Some(rep);
        Ok(o)
    }));
    if let Some(rep) = scan {
        let q = rep.points.iter().map(|p| p.q).collect::<Vec<_>>();
        let m = rep.points.iter().map(|p| p.max_abs).collect::<Vec<_>>();
        out.push(check(SuiteName::Convexity, "convexity/maxima".into(), params, || {
            Ok(Outcome::report(None, q.len() as u64).with(json!({"q": q, "max_abs": m})))
        }));
    }
    out
}

/// Convexity scan for the CLI, through the same cache.
pub fn scan(ctx: &Ctx, q_max: u64, t_max: f64, steps: usize) -> Result<ConvexityReport, String> {
    let grid = uniform_grid(t_max, steps);
    let digest = hex::encode(Sha256::digest(serde_json::to_string(&grid).unwrap_or_default().as_bytes()));
    let key = CacheKey::new("convexity_scan", q_max, None, digest);
    ctx.cache.get_or_compute(&key, || convexity_scan(q_max, &grid).map_err(err))
}
