//! Amplifier suite on synthetic Hecke sequences.

use ampsum_core::amplifier::{
    amplifier_lower_bound_check, hecke_square_diagnostics, hecke_square_expand, kmv_coefficients, satake_sequence,
    AmpError, AmplifierVector,
};
use ampsum_core::arith::{char_group, isqrt, prime_pi, primes_up_to, DirichletCharacter};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde_json::json;

use super::{check, err, Ctx, Outcome, Timed};
use crate::config::SuiteName;

pub fn amplifier(ctx: &Ctx) -> Vec<Timed> {
    let g = &ctx.cfg.grid.amplifier;
    let seed = ctx.cfg.seed;
    let cap = isqrt(g.length_max).max(2);
    let seq = match satake_sequence(seed, cap, DirichletCharacter::principal(1)) {
        Ok(s) => s,
        Err(e) => {
            return vec![check(SuiteName::Amplifier, "amplifier/sequence".into(), json!({"seed": seed}), || {
                Err(err(e))
            })]
        }
    };
    let mut out = vec![check(
        SuiteName::Amplifier,
        "amplifier/hecke_recursion".into(),
        json!({"seed": seed, "prime_cap": cap}),
        || {
            let r = seq.recursion_residual(cap);
            Ok(Outcome::exact(u64::from(r != 0.0), 1).with(json!({"residual": r, "ramanujan_ok": seq.ramanujan_ok})))
        },
    )];

    // Decades 1..=10, 11..=100, ... up to the maximal length.
    let mut blocks = Vec::new();
    let (mut lo, mut hi) = (1u64, 10u64);
    while lo <= g.length_max {
        blocks.push((lo, hi.min(g.length_max)));
        lo = hi + 1;
        hi = hi.saturating_mul(10);
    }
    out.extend(blocks.par_iter().map(|&(lo, hi)| {
        check(
            SuiteName::Amplifier,
            format!("amplifier/collapse/L={lo}..{hi}"),
            json!({"seed": seed, "l_min": lo, "l_max": hi}),
            || {
                let mut bad = 0u64;
                for l in lo..=hi {
                    let a = kmv_coefficients(&seq, l).map_err(err)?;
                    let pc = prime_pi(isqrt(l)) as f64;
                    bad += u64::from(a.sum != Complex64::new(pc, 0.0));
                    bad += u64::from(a.norm_sq > a.norm_bound);
                }
                Ok(Outcome::exact(bad, hi - lo + 1))
            },
        )
    }).collect::<Vec<_>>());

    out.push(check(
        SuiteName::Amplifier,
        "amplifier/collapse/L=100".into(),
        json!({"seed": seed, "length": 100}),
        || {
            let a = kmv_coefficients(&seq, 100.min(g.length_max)).map_err(err)?;
            let square = a.sum.norm_sqr();
            let bad = u64::from(a.sum != Complex64::new(4.0, 0.0)) + u64::from(square != 16.0);
            Ok(Outcome::exact(bad, 1).with(json!({"sum": [a.sum.re, a.sum.im], "square": square})))
        },
    ));

    let mut candidates: Vec<u64> = Vec::new();
    for p in primes_up_to(cap) {
        candidates.push(p);
        candidates.push(p * p);
    }
    out.extend((0..g.random_vectors).into_par_iter().map(|i| {
        let mut rng = ctx.rng(&format!("amplifier/vector/{i}"));
        let support: Vec<u64> = candidates
            .choose_multiple(&mut rng, g.support_size.min(candidates.len()))
            .copied()
            .collect();
        check(
            SuiteName::Amplifier,
            format!("amplifier/square/{i}"),
            json!({"seed": seed, "vector": i, "support": support}),
            || {
                let x = AmplifierVector::random(seed.wrapping_add(i as u64), g.length_max, &support);
                let r = hecke_square_expand(&x, &seq).map_err(err)?;
                Ok(Outcome::within(r.residual, g.tolerance, 1))
            },
        )
    }).collect::<Vec<_>>());

    out.push(check(
        SuiteName::Amplifier,
        "amplifier/lower_bound".into(),
        json!({"seed": seed, "ladder": g.lower_bound_ladder}),
        || {
            let ladder: Vec<u64> = g.lower_bound_ladder.iter().copied().filter(|&l| l <= g.length_max).collect();
            let r = amplifier_lower_bound_check(&seq, &ladder).map_err(err)?;
            let worst = r.rows.iter().map(|row| row.floor / row.ratio.max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
            Ok(Outcome::verdict(r.passed(), worst, r.rows.len() as u64).with(json!({
                "squares": r.rows.iter().map(|row| row.square).collect::<Vec<_>>(),
                "ratio_increases": r.ratio_increases,
            })))
        },
    ));

    let (tq, ti) = g.twisted_character;
    out.push(check(
        SuiteName::Amplifier,
        "amplifier/twisted".into(),
        json!({"seed": seed, "character": [tq, ti]}),
        || {
            let chi = char_group(tq).map_err(err)?.get(ti).cloned().ok_or("character index out of range")?;
            let s = satake_sequence(seed, 50, chi).map_err(err)?;
            let x = AmplifierVector::random(seed, 49, &[2, 3, 7, 4, 9]);
            let refused = matches!(hecke_square_expand(&x, &s), Err(AmpError::NontrivialCharacter));
            let d = hecke_square_diagnostics(&x, &s).map_err(err)?;
            Ok(Outcome::exact(u64::from(!refused), 1)
                .and(Outcome::within(d.bilinear_residual, g.tolerance, 1))
                .with(json!({
                    "bilinear_residual": d.bilinear_residual,
                    "untwisted_residual": d.untwisted_residual,
                })))
        },
    ));
    out
}
