//! End-to-end acceptance run: `ampsum verify all --seed 7` twice against a
//! fresh cache, one line per criterion, tolerances pinned here.

use std::io::Write;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

struct Run {
    text: String,
    json: Value,
}

impl Run {
    fn checks(&self) -> &[Value] {
        self.json["body"]["checks"].as_array().expect("checks array")
    }

    fn prefixed<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Value> + 'a {
        self.checks().iter().filter(move |c| c["id"].as_str().is_some_and(|id| id.starts_with(prefix)))
    }

    fn graded<'a>(&'a self, prefix: &'a str) -> Vec<&'a Value> {
        self.prefixed(prefix).filter(|c| c["status"] != "report-only").collect()
    }

    fn seconds(&self, suite: &str) -> f64 {
        self.json["timing"]["suite_seconds"][suite].as_f64().unwrap_or(f64::INFINITY)
    }

    /// Report text up to the timing section.
    fn body_bytes(&self) -> &str {
        let end = self.text.find("\n  \"timing\"").expect("timing section");
        &self.text[..end]
    }
}

fn run(cache: &Path, out: &Path) -> Run {
    let status = Command::new(env!("CARGO_BIN_EXE_ampsum"))
        .args(["verify", "all", "--seed", "7", "--out"])
        .arg(out)
        .env("AMPSUM_CACHE_DIR", cache)
        .status()
        .expect("spawn ampsum");
    assert!(status.code().is_some_and(|c| c == 0 || c == 1), "ampsum exited with {status}");
    let text = std::fs::read_to_string(out).expect("report written");
    let json = serde_json::from_str(&text).expect("report parses");
    Run { text, json }
}

fn residual(c: &Value) -> f64 {
    c["residual"].as_f64().unwrap_or(f64::INFINITY)
}

fn passed(c: &Value) -> bool {
    c["status"] == "pass"
}

/// Largest residual over `records`, and whether all are below `tol` and passed.
fn within(records: &[&Value], tol: f64) -> (bool, f64) {
    let worst = records.iter().map(|c| residual(c)).fold(0.0, f64::max);
    (!records.is_empty() && records.iter().all(|c| passed(c) && residual(c) < tol), worst)
}

fn exact(records: &[&Value]) -> (bool, f64) {
    let worst = records.iter().map(|c| residual(c)).fold(0.0, f64::max);
    (!records.is_empty() && records.iter().all(|c| passed(c) && residual(c) == 0.0), worst)
}

struct Line {
    number: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn criteria(r: &Run, second: &Run) -> Vec<Line> {
    let mut out = Vec::new();
    let mut push = |number, name, pass, detail: String| out.push(Line { number, name, pass, detail });

    let bij = r.graded("bijection/c1=");
    let phase = r.graded("phase/c1=");
    let (ok_b, _) = exact(&bij);
    let (ok_p, _) = exact(&phase);
    let secs = r.seconds("bijection") + r.seconds("phase");
    push(
        1,
        "bijection and phase",
        ok_b && ok_p && bij.len() == 900 && phase.len() == 900 && secs < 120.0,
        format!("{} + {} records exact, {secs:.1} s", bij.len(), phase.len()),
    );

    let zero = r.graded("bijection/zero_n/");
    let (ok, _) = exact(&zero);
    push(2, "n = 0 classification", ok && zero.len() == 50, format!("c <= {}", zero.len()));

    let nu = r.graded("nu/");
    let (ok, _) = exact(&nu);
    let secs = r.seconds("nu");
    let families = ["nu/fast_vs_brute/", "nu/hensel/", "nu/multiplicative/"].iter().all(|p| r.prefixed(p).count() > 0);
    push(3, "nu counts", ok && families && secs < 120.0, format!("{} records exact, {secs:.1} s", nu.len()));

    let gauss = r.graded("phase/gauss/");
    let (ok, worst) = within(&gauss, 1e-10);
    push(4, "Gauss-sum reduction", ok && gauss.len() == 60, format!("{} triples, max residual {worst:.2e}", gauss.len()));

    let levels = r.graded("reindex/level=");
    let (ok_l, worst) = within(&levels, 1e-9);
    let audit = r.prefixed("reindex/boundary").all(passed) && r.prefixed("reindex/nested").all(passed);
    let secs = r.seconds("reindex");
    push(
        5,
        "reindexing",
        ok_l && levels.len() == 3 && audit && secs < 300.0,
        format!("max difference {worst:.2e}, boundary audit {}, {secs:.2} s", if audit { "clean" } else { "dirty" }),
    );

    let series: Vec<&Value> = ["euler/e_sum/", "euler/n_sum/", "euler/b_sum/"].iter().flat_map(|p| r.graded(p)).collect();
    let (ok_s, worst) = within(&series, 1e-8);
    let (ok_ad, _) = exact(&r.graded("euler/ad_cancel/"));
    let local = r.graded("euler/local_factor/");
    let ok_local = !local.is_empty() && local.iter().all(|c| passed(c));
    push(6, "Euler products", ok_s && ok_ad && ok_local, format!("max series residual {worst:.2e}"));

    let (ok_mb, mb) = within(&r.graded("mellin/barnes/"), 1e-8);
    let pair: Vec<&Value> = r.graded("bessel/pair/");
    let (ok_pair, pw) = within(&pair, 1e-6);
    let limit: Vec<&Value> = r.graded("bessel/w_limit/");
    let (ok_lim, lw) = within(&limit, 1e-5);
    let regime = r.graded("bessel/regime/");
    let (ok_reg, rw) = within(&regime, 1e-3);
    let parts = r.graded("partition/");
    let (ok_part, partw) = within(&parts, 1e-12);
    let blocks_ok = parts.iter().all(|c| {
        let x_cap = c["params"]["x_cap"].as_f64().unwrap_or(f64::NAN);
        c["details"]["blocks"].as_f64().is_some_and(|b| b <= 2.0 + x_cap.log2())
    });
    push(
        7,
        "archimedean identities",
        ok_mb && ok_pair && pair.len() >= 10 && ok_lim && ok_reg && regime.len() == 20 && ok_part && blocks_ok,
        format!("barnes {mb:.1e}, pair {pw:.1e}, w-limit {lw:.1e}, regime {rw:.1e}, partition {partw:.1e}"),
    );

    let fit = |id: &str| {
        r.prefixed(id)
            .next()
            .and_then(|c| c["details"]["fitted_exponent"].as_f64())
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (ncc, mconv) = (fit("dfactor/ncc_decay"), fit("dfactor/mconv_decay"));
    push(8, "decay fits", ncc >= 2.0 && mconv >= 2.0, format!("ladder exponent {ncc:.2}, m exponent {mconv:.2}"));

    let (ok_q, qw) = within(&r.graded("poisson/quadratic/"), 1e-9);
    let (ok_c, cw) = within(&r.graded("poisson/character/"), 1e-9);
    push(9, "twisted Poisson", ok_q && ok_c, format!("quadratic {qw:.1e}, character {cw:.1e}"));

    let dual = r.graded("lfunc/dual/");
    let (ok_d, dw) = within(&dual, 1.0);
    let (ok_z, zw) = within(&r.graded("lfunc/zeta_relation/"), 1e-10);
    let exponent = r.prefixed("convexity/exponent").next().map(residual).unwrap_or(f64::NAN);
    let secs = r.seconds("lfunc") + r.seconds("convexity");
    push(
        10,
        "L-functions",
        ok_d && ok_z && secs < 600.0,
        format!(
            "dual quotient {dw:.2e} over {} moduli, zeta relation {zw:.1e}, convexity exponent {exponent:.3} (report-only, {} 0.30), {secs:.1} s",
            dual.len(),
            if exponent <= 0.30 { "<=" } else { ">" }
        ),
    );

    let collapse = r.graded("amplifier/collapse/");
    let (ok_col, _) = exact(&collapse);
    let hundred = r.prefixed("amplifier/collapse/L=100").find(|c| c["params"]["length"] == 100);
    let ok_100 = hundred.is_some_and(|c| c["details"]["square"].as_f64() == Some(16.0));
    let squares = r.graded("amplifier/square/");
    let (ok_sq, sw) = within(&squares, 1e-10);
    push(
        11,
        "amplifier",
        ok_col && ok_100 && ok_sq && squares.len() == 100,
        format!("collapse exact up to 10^4, L = 100 squared 16, square residual {sw:.1e}"),
    );

    let same = r.body_bytes() == second.body_bytes();
    let hits = second.json["timing"]["cache_hits"].as_u64().unwrap_or(0);
    push(12, "determinism", same, format!("bodies identical: {same}, warm run cache hits {hits}"));

    out
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let first = run(&cache, &dir.path().join("first.json"));
    let second = run(&cache, &dir.path().join("second.json"));
    let lines = criteria(&first, &second);
    // Written to the raw handle so the lines show without --nocapture.
    let mut err = std::io::stderr().lock();
    for l in &lines {
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        writeln!(err, "criterion {:>2} {:<24} {verdict}  {}", l.number, l.name, l.detail).unwrap();
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.number).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
