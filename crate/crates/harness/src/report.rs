//! Verification reports. The `body` is a pure function of the config; wall
//! clock times and cache statistics live in the separate `timing` section.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::{SuiteConfig, SuiteName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub suite: SuiteName,
    pub params: serde_json::Value,
    pub status: Status,
    /// Residual, mismatch count or bound quotient, depending on the check.
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    /// Elementary cases covered by this record.
    pub cases: u64,
    /// Module error captured instead of a value.
    pub error: Option<String>,
    /// Extra values reported alongside the residual.
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub cases: u64,
    /// Largest residual over pass/fail records.
    pub max_residual: f64,
    pub failures: usize,
    pub report_only: usize,
}

impl Summary {
    pub fn of(checks: &[CheckRecord]) -> Self {
        let graded = checks.iter().filter(|c| c.status != Status::ReportOnly);
        Summary {
            records: checks.len(),
            cases: checks.iter().map(|c| c.cases).sum(),
            max_residual: graded.filter_map(|c| c.residual).filter(|r| r.is_finite()).fold(0.0, f64::max),
            failures: checks.iter().filter(|c| c.status == Status::Fail).count(),
            report_only: checks.iter().filter(|c| c.status == Status::ReportOnly).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub suite: SuiteName,
    pub version: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub suite_seconds: BTreeMap<String, f64>,
    /// Runtime of each record, keyed by record id.
    pub check_seconds: BTreeMap<String, f64>,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub cache_recomputed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub body: ReportBody,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.body.summary.failures == 0
    }

    pub fn find(&self, id: &str) -> Option<&CheckRecord> {
        self.body.checks.iter().find(|c| c.id == id)
    }

    /// Records whose id starts with `prefix`.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.body.checks.iter().filter(move |c| c.id.starts_with(prefix))
    }

    /// Pretty JSON with the body first, so bodies compare byte for byte.
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// The body alone, as written by [`Self::to_json`].
    pub fn body_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&self.body)
    }

    /// One row per record.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["id", "suite", "status", "residual", "tolerance", "cases", "error", "params"])?;
        for c in &self.body.checks {
            w.write_record([
                c.id.clone(),
                c.suite.to_string(),
                status_str(c.status).to_string(),
                c.residual.map(|r| format!("{r:e}")).unwrap_or_default(),
                c.tolerance.map(|r| format!("{r:e}")).unwrap_or_default(),
                c.cases.to_string(),
                c.error.clone().unwrap_or_default(),
                c.params.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable summary lines.
    pub fn summary_text(&self) -> String {
        let b = &self.body;
        let mut out = format!(
            "suite {} (version {}, seed {}): {} records, {} cases, {} failures, {} report-only, max residual {:e}\n",
            b.suite,
            b.version,
            b.config.seed,
            b.summary.records,
            b.summary.cases,
            b.summary.failures,
            b.summary.report_only,
            b.summary.max_residual
        );
        for c in b.checks.iter().filter(|c| c.status == Status::Fail) {
            out.push_str(&format!(
                "  FAIL {} residual {} tolerance {}{}\n",
                c.id,
                c.residual.map(|r| format!("{r:e}")).unwrap_or_else(|| "-".into()),
                c.tolerance.map(|r| format!("{r:e}")).unwrap_or_else(|| "-".into()),
                c.error.as_deref().map(|e| format!(" error: {e}")).unwrap_or_default()
            ));
        }
        for (suite, secs) in &self.timing.suite_seconds {
            out.push_str(&format!("  {suite}: {secs:.2} s\n"));
        }
        out
    }
}

pub fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::ReportOnly => "report-only",
    }
}
