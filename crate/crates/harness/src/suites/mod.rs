//! Suite implementations. Each suite maps its grid to records in a fixed
//! order; grid points run on the worker pool and are collected in order.

mod analytic;
mod exact;
mod lvalues;
mod amp;

pub use lvalues::scan;

use std::fmt::Display;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::cache::Cache;
use crate::config::{SuiteConfig, SuiteName};
use crate::report::{CheckRecord, Status};

pub struct Ctx<'a> {
    pub cfg: &'a SuiteConfig,
    pub cache: &'a Cache,
}

impl Ctx<'_> {
    /// Generator for one grid point, fixed by the seed and a tag.
    pub fn rng(&self, tag: &str) -> ChaCha8Rng {
        // FNV-1a keeps the stream independent of std's hasher.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in tag.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ h)
    }
}

/// What a check measured.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub cases: u64,
    pub details: Value,
}

impl Outcome {
    /// Pass iff `residual < tolerance`; NaN fails.
    pub fn within(residual: f64, tolerance: f64, cases: u64) -> Self {
        Outcome {
            status: if residual < tolerance { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            tolerance: Some(tolerance),
            cases,
            details: Value::Null,
        }
    }

    /// Exact check: pass iff there are no mismatches.
    pub fn exact(mismatches: u64, cases: u64) -> Self {
        Outcome {
            status: if mismatches == 0 { Status::Pass } else { Status::Fail },
            residual: Some(mismatches as f64),
            tolerance: Some(0.0),
            cases,
            details: Value::Null,
        }
    }

    /// Pass/fail decided by the caller; `residual` is a shortfall or quotient.
    pub fn verdict(passed: bool, residual: f64, cases: u64) -> Self {
        Outcome {
            status: if passed { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            tolerance: None,
            cases,
            details: Value::Null,
        }
    }

    pub fn report(residual: Option<f64>, cases: u64) -> Self {
        Outcome {
            status: Status::ReportOnly,
            residual,
            tolerance: None,
            cases,
            details: Value::Null,
        }
    }

    pub fn with(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    /// Combines exact and tolerance checks: fails if either fails.
    pub fn and(mut self, other: Outcome) -> Self {
        if other.status == Status::Fail {
            self.status = Status::Fail;
        }
        self
    }
}

pub type CheckResult = Result<Outcome, String>;

pub fn err<E: Display>(e: E) -> String {
    e.to_string()
}

pub struct Timed {
    pub record: CheckRecord,
    pub seconds: f64,
}

/// Runs one check, capturing module errors as a failed record.
pub fn check(suite: SuiteName, id: String, params: Value, f: impl FnOnce() -> CheckResult) -> Timed {
    let start = Instant::now();
    let result = f();
    let seconds = start.elapsed().as_secs_f64();
    let record = match result {
        Ok(o) => CheckRecord {
            id,
            suite,
            params,
            status: o.status,
            residual: o.residual.map(clean),
            tolerance: o.tolerance,
            cases: o.cases,
            error: None,
            details: o.details,
        },
        Err(e) => CheckRecord {
            id,
            suite,
            params,
            status: Status::Fail,
            residual: None,
            tolerance: None,
            cases: 0,
            error: Some(e),
            details: Value::Null,
        },
    };
    Timed { record, seconds }
}

/// Non-finite residuals are not representable in JSON.
fn clean(r: f64) -> f64 {
    if r.is_finite() {
        r
    } else {
        f64::MAX
    }
}

pub fn run(suite: SuiteName, ctx: &Ctx) -> Vec<Timed> {
    match suite {
        SuiteName::Bijection => exact::bijection(ctx),
        SuiteName::Phase => exact::phase(ctx),
        SuiteName::Reindex => exact::reindex(ctx),
        SuiteName::Nu => exact::nu(ctx),
        SuiteName::Euler => exact::euler(ctx),
        SuiteName::Lfunc => lvalues::lfunc(ctx),
        SuiteName::Convexity => lvalues::convexity(ctx),
        SuiteName::Mellin => analytic::mellin(ctx),
        SuiteName::Bessel => analytic::bessel(ctx),
        SuiteName::Dfactor => analytic::dfactor(ctx),
        SuiteName::Poisson => analytic::poisson(ctx),
        SuiteName::Partition => analytic::partition(ctx),
        SuiteName::Amplifier => amp::amplifier(ctx),
        SuiteName::All => SuiteName::CONCRETE.iter().flat_map(|&s| run(s, ctx)).collect(),
    }
}

/// Complex number from its `[re, im]` config form.
pub fn cx(v: [f64; 2]) -> num_complex::Complex64 {
    num_complex::Complex64::new(v[0], v[1])
}
