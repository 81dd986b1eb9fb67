//! Verification suites, persistent cache, reports and CLI plumbing for the
//! `ampsum` toolkit.

pub mod cache;
pub mod config;
pub mod report;
mod suites;

use std::time::Instant;

use cache::{Cache, CacheError};
use config::{ConfigError, SuiteConfig, SuiteName};
use report::{ReportBody, Summary, Timing, VerificationReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Scan(String),
}

/// Validates the config, opens the cache and runs the named suite.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport, HarnessError> {
    config.validate()?;
    let cache = Cache::open(config.resolved_cache_dir())?;
    run_suite_with_cache(config, &cache)
}

pub fn run_suite_with_cache(config: &SuiteConfig, cache: &Cache) -> Result<VerificationReport, HarnessError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let ctx = suites::Ctx { cfg: config, cache };
    let order: Vec<SuiteName> = match config.suite {
        SuiteName::All => SuiteName::CONCRETE.to_vec(),
        s => vec![s],
    };
    let start = Instant::now();
    let mut timing = Timing::default();
    let mut checks = Vec::new();
    pool.install(|| {
        for suite in order {
            let t = Instant::now();
            for timed in suites::run(suite, &ctx) {
                timing.check_seconds.insert(timed.record.id.clone(), timed.seconds);
                checks.push(timed.record);
            }
            timing.suite_seconds.insert(suite.to_string(), t.elapsed().as_secs_f64());
        }
    });
    timing.total_seconds = start.elapsed().as_secs_f64();
    let stats = &cache.stats;
    use std::sync::atomic::Ordering::Relaxed;
    timing.cache_hits = stats.hits.load(Relaxed);
    timing.cache_misses = stats.misses.load(Relaxed);
    timing.cache_recomputed = stats.recomputed.load(Relaxed);
    let summary = Summary::of(&checks);
    Ok(VerificationReport {
        body: ReportBody {
            suite: config.suite,
            version: VERSION.into(),
            config: config.clone(),
            checks,
            summary,
        },
        timing,
    })
}

/// Convexity scan over primes `q <= q_max` on `uniform_grid(t_max, steps)`.
pub fn scan_convexity(
    config: &SuiteConfig,
    q_max: u64,
    t_max: f64,
    steps: usize,
) -> Result<ampsum_core::lfunc::ConvexityReport, HarnessError> {
    let cache = Cache::open(config.resolved_cache_dir())?;
    let ctx = suites::Ctx { cfg: config, cache: &cache };
    suites::scan(&ctx, q_max, t_max, steps).map_err(HarnessError::Scan)
}
