//! Exact-arithmetic suites: reparametrization, phases, Gauss-sum reduction,
//! reindexing, quadratic counts and Euler products.

use ampsum_core::archimedean::TestFunction;
use ampsum_core::arith::{char_group, factorize, gcd, jacobi, mobius, primes_up_to, totient};
use ampsum_core::expsums::gauss_reduction_check;
use ampsum_core::quadcount::{
    ad_coupled_exact, euler_product_eval, formula_applies, local_factor_check, nu_brute, nu_fast, CharValue,
    EulerKind, QuadCountQuery, Quadratic, SArgs, Truncation,
};
use ampsum_core::reparam::{
    bijection_check, enumerate_x, phase_identity_check, reindex_sum_check, zero_n_classify, Caps, RClass,
    ReindexKernel,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{check, cx, err, CheckResult, Ctx, Outcome, Timed};
use crate::config::SuiteName;

fn pairs(c_max: u64) -> Vec<(u64, u64)> {
    (1..=c_max).flat_map(|a| (1..=c_max).map(move |b| (a, b))).collect()
}

/// Nonzero `n` with `|n| <= n_max` divisible by `d`.
fn admissible_n(n_max: u64, d: u64) -> impl Iterator<Item = i64> {
    let n_max = n_max as i64;
    (-n_max..=n_max).filter(move |&n| n != 0 && n % d as i64 == 0)
}

pub fn bijection(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.bijection;
    let mut out: Vec<Timed> = pairs(g.c_max)
        .par_iter()
        .map(|&(c1, c2)| {
            check(
                SuiteName::Bijection,
                format!("bijection/c1={c1}/c2={c2}"),
                json!({"c1": c1, "c2": c2, "n_max": g.n_max}),
                || {
                    let (mut bad, mut cases, mut classes) = (0u64, 0u64, 0usize);
                    for n in admissible_n(g.n_max, gcd(c1, c2)) {
                        let r = bijection_check(c1, c2, n).map_err(err)?;
                        cases += 1;
                        classes += r.x_count;
                        bad += u64::from(!r.passed());
                    }
                    Ok(Outcome::exact(bad, cases).with(json!({"classes": classes})))
                },
            )
        })
        .collect();
    out.extend((1..=g.zero_c_max).into_par_iter().map(|c1| {
        check(
            SuiteName::Bijection,
            format!("bijection/zero_n/c1={c1}"),
            json!({"c1": c1, "c2_max": g.zero_c_max}),
            || zero_n_row(c1, g.zero_c_max),
        )
    }).collect::<Vec<_>>());
    out
}

/// `X(c1, c2, 0)` is empty unless `c1 = c2`, where it is `{(x, -x)}`.
fn zero_n_row(c1: u64, c2_max: u64) -> CheckResult {
    let mut bad = 0u64;
    for c2 in 1..=c2_max {
        let xs = zero_n_classify(c1, c2).map_err(err)?;
        if c1 != c2 {
            bad += u64::from(!xs.is_empty());
            continue;
        }
        bad += u64::from(xs.len() as u64 != totient(c1));
        bad += xs.iter().filter(|cl| (cl.x.value() + cl.y.value()) % c1 != 0).count() as u64;
    }
    Ok(Outcome::exact(bad, c2_max))
}

pub fn phase(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.phase;
    let mut out: Vec<Timed> = pairs(g.c_max)
        .par_iter()
        .map(|&(c1, c2)| {
            check(
                SuiteName::Phase,
                format!("phase/c1={c1}/c2={c2}"),
                json!({"c1": c1, "c2": c2, "n_max": g.n_max, "twists": g.twists}),
                || {
                    let d = gcd(c1, c2);
                    let (mut bad, mut cases) = (0u64, 0u64);
                    let mut worst: f64 = 0.0;
                    for n in admissible_n(g.n_max, d) {
                        for cl in enumerate_x(c1, c2, n).map_err(err)? {
                            let r = RClass { r: cl.r1(), d };
                            for &(l, l2) in &g.twists {
                                let rep = phase_identity_check(&cl, &r, l, l2).map_err(err)?;
                                cases += 1;
                                bad += u64::from(!rep.exact_equal);
                                worst = worst.max(rep.complex_residual);
                            }
                        }
                    }
                    Ok(Outcome::exact(bad, cases).with(json!({"max_complex_residual": worst})))
                },
            )
        })
        .collect();
    out.extend(gauss(ctx));
    out
}

fn gauss(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.phase;
    let mut triples = Vec::new();
    for &p in &g.gauss_primes {
        for &q in &g.gauss_primes {
            for &r in &g.gauss_r {
                if p != q && gcd(r, p * q) == 1 {
                    triples.push((p, q, r));
                }
            }
        }
    }
    let rows: Vec<(Timed, f64)> = triples
        .par_iter()
        .map(|&(p, q, r)| {
            let mut rng = ctx.rng(&format!("gauss/{p}/{q}/{r}"));
            let bound = (p * q * r) as i64 * 50;
            let mut args: Vec<i64> = (0..g.gauss_arguments).map(|_| rng.gen_range(-bound..=bound)).collect();
            args.push(p as i64 * rng.gen_range(1..=50));
            args.push(-(q as i64) * rng.gen_range(1..=50));
            let mut literal: f64 = 0.0;
            let t = check(
                SuiteName::Phase,
                format!("phase/gauss/p={p}/q={q}/r={r}"),
                json!({"p": p, "q": q, "r": r, "arguments": args}),
                || {
                    let chis = char_group(p).map_err(err)?;
                    let psis = char_group(q).map_err(err)?;
                    let (mut worst, mut vanish, mut cases) = (0.0f64, 0.0f64, 0u64);
                    for chi in chis.iter().filter(|c| !c.is_principal()) {
                        for psi in psis.iter().filter(|c| !c.is_principal()) {
                            for &a in &args {
                                let rep = gauss_reduction_check(chi, psi, r, a, g.tolerance).map_err(err)?;
                                cases += 1;
                                worst = worst.max(rep.crt_residual).max(rep.closed_residual);
                                if rep.vanishing_case {
                                    vanish = vanish.max(rep.direct.norm());
                                }
                                literal = literal
                                    .max(rep.conjugate_form_crt_residual)
                                    .max(rep.conjugate_form_closed_residual);
                            }
                        }
                    }
                    Ok(Outcome::within(worst.max(vanish), g.tolerance, cases)
                        .with(json!({"max_identity_residual": worst, "max_vanishing_abs": vanish})))
                },
            );
            (t, literal)
        })
        .collect();
    let literal = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut out: Vec<Timed> = rows.into_iter().map(|r| r.0).collect();
    out.push(check(
        SuiteName::Phase,
        "phase/gauss/conjugate_prefactor_form".into(),
        json!({"triples": triples.len()}),
        || Ok(Outcome::report(Some(literal), triples.len() as u64)),
    ));
    out
}

pub fn reindex(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.reindex;
    let params = json!({
        "p": g.p, "q": g.q, "chi_index": g.chi_index, "psi_index": g.psi_index,
        "l": g.l, "l2": g.l2, "caps": g.caps,
    });
    let report = || {
        let chi = char_group(g.p).map_err(err)?.get(g.chi_index).cloned().ok_or("chi index out of range")?;
        let psi = char_group(g.q).map_err(err)?.get(g.psi_index).cloned().ok_or("psi index out of range")?;
        let kernel = ReindexKernel::new(
            TestFunction::bump(g.kernel_c1.0, g.kernel_c1.1, 0).map_err(err)?,
            TestFunction::bump(g.kernel_c2.0, g.kernel_c2.1, 0).map_err(err)?,
            g.kernel_n_width,
        );
        let caps: Vec<Caps> = g.caps.iter().map(|c| Caps { c1: c.c1, c2: c.c2, n: c.n }).collect();
        reindex_sum_check(&chi, &psi, g.l, g.l2, &caps, &kernel, g.tolerance).map_err(err)
    };
    let start = std::time::Instant::now();
    let rep = report();
    let secs = start.elapsed().as_secs_f64();
    let mut out = Vec::new();
    match rep {
        Err(e) => out.push(check(SuiteName::Reindex, "reindex".into(), params, || Err(e))),
        Ok(rep) => {
            let last = rep.levels.last().map(|l| l.source).unwrap_or_default();
            for (i, lv) in rep.levels.iter().enumerate() {
                let mut t = check(
                    SuiteName::Reindex,
                    format!("reindex/level={i}"),
                    json!({"caps": lv.caps, "l": g.l, "l2": g.l2}),
                    || {
                        Ok(Outcome::within(lv.difference, g.tolerance, lv.source_terms).with(json!({
                            "source": [lv.source.re, lv.source.im],
                            "target_nonzero": [lv.target_nonzero.re, lv.target_nonzero.im],
                            "target_zero": [lv.target_zero.re, lv.target_zero.im],
                            "target_terms": lv.target_terms,
                            "frontier_mass": lv.frontier_mass,
                        })))
                    },
                );
                t.seconds = secs / rep.levels.len() as f64;
                out.push(t);
            }
            let nested = rep.levels.iter().map(|l| (l.source - last).norm()).fold(0.0, f64::max);
            out.push(check(SuiteName::Reindex, "reindex/nested".into(), params.clone(), || {
                Ok(Outcome::within(nested, g.tolerance, rep.levels.len() as u64))
            }));
            out.push(check(SuiteName::Reindex, "reindex/boundary".into(), params, || {
                let mass = rep.levels.last().map(|l| l.frontier_mass).unwrap_or(f64::INFINITY);
                Ok(Outcome::verdict(rep.boundary_clean(), mass, 1))
            }));
        }
    }
    out
}

pub fn nu(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.nu;
    let cm = g.coefficient_max;
    let odd: Vec<u64> = (1..=g.n_max).filter(|n| n % 2 == 1).collect();
    let mut out: Vec<Timed> = odd
        .par_iter()
        .map(|&n| {
            check(
                SuiteName::Nu,
                format!("nu/fast_vs_brute/n={n}"),
                json!({"n": n, "coefficient_max": cm}),
                || {
                    let (mut bad, mut cases) = (0u64, 0u64);
                    for a in 0..=cm {
                        if gcd((2 * a).unsigned_abs(), n) != 1 {
                            continue;
                        }
                        for m in 0..=cm {
                            for b in 0..=cm {
                                let q = QuadCountQuery::new(n, m, a, b).map_err(err)?;
                                cases += 1;
                                bad += u64::from(nu_fast(&q).count != nu_brute(&q));
                            }
                        }
                    }
                    Ok(Outcome::exact(bad, cases))
                },
            )
        })
        .collect();

    let primes: Vec<u64> = primes_up_to(g.hensel_p_max).into_iter().filter(|&p| p > 2).collect();
    out.extend(primes.par_iter().map(|&p| {
        check(
            SuiteName::Nu,
            format!("nu/hensel/p={p}"),
            json!({"p": p, "k_max": g.hensel_k_max, "triples": g.sample_triples}),
            || {
                let (mut bad, mut cases) = (0u64, 0u64);
                for &(m, a, b) in &g.sample_triples {
                    let delta = m * m - 4 * a * b;
                    let sym = jacobi(delta, p).map_err(err)?;
                    let stable = a % p as i64 != 0 && sym != 0;
                    for k in 1..=g.hensel_k_max {
                        let q = QuadCountQuery::new(p.pow(k), m, a, b).map_err(err)?;
                        let brute = nu_brute(&q);
                        cases += 1;
                        bad += u64::from(nu_fast(&q).count != brute);
                        if stable {
                            bad += u64::from(brute != (1 + sym) as u64);
                        }
                    }
                }
                Ok(Outcome::exact(bad, cases))
            },
        )
    }).collect::<Vec<_>>());

    let squarefree: Vec<u64> = (2..=g.multiplicative_n_max).filter(|&n| mobius(n) != 0).collect();
    let blocks: Vec<&[u64]> = squarefree.chunks(100).collect();
    out.extend(blocks.par_iter().map(|block| {
        let (lo, hi) = (block[0], block[block.len() - 1]);
        check(
            SuiteName::Nu,
            format!("nu/multiplicative/n={lo}..{hi}"),
            json!({"n_min": lo, "n_max": hi, "squarefree_only": true, "triples": g.sample_triples}),
            || {
                let (mut bad, mut cases) = (0u64, 0u64);
                for &n in *block {
                    for &(m, a, b) in &g.sample_triples {
                        let whole = nu_brute(&QuadCountQuery::new(n, m, a, b).map_err(err)?);
                        let mut prod = 1u64;
                        for (p, _) in factorize(n) {
                            prod *= nu_brute(&QuadCountQuery::new(p, m, a, b).map_err(err)?);
                        }
                        cases += 1;
                        bad += u64::from(whole != prod);
                        let q = QuadCountQuery::new(n, m, a, b).map_err(err)?;
                        if formula_applies(&q) {
                            bad += u64::from(nu_fast(&q).count != whole);
                        }
                    }
                }
                Ok(Outcome::exact(bad, cases))
            },
        )
    }).collect::<Vec<_>>());
    out
}

pub fn euler(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.euler;
    let trunc = Truncation { terms: g.terms, primes: g.primes };
    let chars = || -> Result<_, String> {
        let chi = char_group(g.chi.0).map_err(err)?.get(g.chi.1).cloned().ok_or("chi index out of range")?;
        let psi = char_group(g.psi.0).map_err(err)?.get(g.psi.1).cloned().ok_or("psi index out of range")?;
        Ok((chi, psi))
    };
    let mut jobs = Vec::new();
    for &(m, a, b) in &g.quadratics {
        for (i, &(s1, s2, w)) in g.points.iter().enumerate() {
            for kind in [EulerKind::ESum, EulerKind::NSum, EulerKind::BSum] {
                jobs.push((Quadratic { m, a, b }, i, SArgs { s1: cx(s1), s2: cx(s2), w: cx(w) }, kind));
            }
        }
    }
    let mut out: Vec<Timed> = jobs
        .par_iter()
        .map(|&(quad, i, s, kind)| {
            let name = match kind {
                EulerKind::ESum => "e_sum",
                EulerKind::NSum => "n_sum",
                EulerKind::BSum => "b_sum",
                EulerKind::AdCancel => "ad_cancel",
            };
            check(
                SuiteName::Euler,
                format!("euler/{name}/quad=({},{},{})/point={i}", quad.m, quad.a, quad.b),
                json!({"kind": kind, "quadratic": quad, "s": s, "truncation": trunc}),
                || {
                    let (chi, psi) = chars()?;
                    match euler_product_eval(kind, s, quad, &chi, &psi, trunc, g.tolerance) {
                        Ok(r) => Ok(Outcome::within(r.residual, g.tolerance, 1).with(json!({
                            "series": [r.series.re, r.series.im],
                            "product": [r.product.re, r.product.im],
                            "s_primes": r.s_factors.iter().map(|f| f.0).collect::<Vec<_>>(),
                            "s_factor_ratio_gap": (r.s_factor_ratio - r.s_product()).norm(),
                            "displayed_form_residual": r.displayed_form_residual,
                        }))),
                        Err(e @ ampsum_core::quadcount::QuadError::Divergent { .. }) => {
                            Ok(Outcome::report(None, 0).with(json!({"skipped": e.to_string()})))
                        }
                        Err(e) => Err(err(e)),
                    }
                },
            )
        })
        .collect();

    let ad_trunc = Truncation { terms: g.terms, primes: g.ad_prime_cap };
    out.extend(g.quadratics.par_iter().map(|&(m, a, b)| {
        let quad = Quadratic { m, a, b };
        check(
            SuiteName::Euler,
            format!("euler/ad_cancel/quad=({m},{a},{b})"),
            json!({"quadratic": quad, "prime_cap": g.ad_prime_cap, "exact_n": g.ad_exact_n}),
            || {
                let (chi, psi) = chars()?;
                let s = SArgs::real(3.0, 1.0, 0.2);
                let r = euler_product_eval(EulerKind::AdCancel, s, quad, &chi, &psi, ad_trunc, g.tolerance)
                    .map_err(err)?;
                let ad = r.ad_cancel.clone().ok_or("missing a/d audit")?;
                let one = BigRational::from_integer(BigInt::from(1));
                let coupled_bad = (1..=g.ad_exact_n).filter(|&n| ad_coupled_exact(quad, n, 2) != one).count() as u64;
                let exact = Outcome::exact(coupled_bad + u64::from(!ad.coupled_exact), ad.primes_checked as u64 + g.ad_exact_n);
                Ok(exact
                    .and(Outcome::within(r.residual, g.tolerance, 1))
                    .with(json!({
                        "series_residual": r.residual,
                        "primes_checked": ad.primes_checked,
                        "separate_product_deviation": ad.separate_product_deviation,
                    })))
            },
        )
    }).collect::<Vec<_>>());

    let primes = primes_up_to(g.local_prime_cap);
    for (label, psi) in [("1", 1.0), ("-1", -1.0), ("0", 0.0)] {
        out.push(check(
            SuiteName::Euler,
            format!("euler/local_factor/psi={label}"),
            json!({"psi": psi, "prime_cap": g.local_prime_cap, "r": [1, 2, 3], "symbols": [-1, 0, 1]}),
            || {
                let (mut bad, mut cases, mut worst) = (0u64, 0u64, 0.0f64);
                for &p in &primes {
                    for sym in [-1i8, 0, 1] {
                        for r in [1.0, 2.0, 3.0] {
                            let rep = local_factor_check(p, CharValue(Complex64::new(psi, 0.0)), sym, Complex64::new(r, 0.0), g.tolerance)
                                .map_err(err)?;
                            cases += 1;
                            bad += u64::from(rep.exact_equal != Some(true));
                            worst = worst.max(rep.float_residual);
                        }
                    }
                }
                Ok(Outcome::exact(bad, cases).and(Outcome::within(worst, g.tolerance, cases)).with(json!({"max_float_residual": worst})))
            },
        ));
    }
    out.push(check(
        SuiteName::Euler,
        "euler/local_factor/complex".into(),
        json!({"psi": "e(k/6)", "prime_cap": 100, "r": [1.5, 0.75]}),
        || {
            let mut worst: f64 = 0.0;
            let mut cases = 0;
            for p in primes_up_to(100) {
                for k in 0..6 {
                    let psi = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 6.0);
                    for sym in [-1i8, 0, 1] {
                        for r in [Complex64::new(1.5, 0.0), Complex64::new(0.75, 4.0)] {
                            let rep = local_factor_check(p, CharValue(psi), sym, r, g.tolerance).map_err(err)?;
                            worst = worst.max(rep.float_residual);
                            cases += 1;
                        }
                    }
                }
            }
            Ok(Outcome::within(worst, g.tolerance, cases))
        },
    ));
    out
}
