//! Suite configuration. Every grid is written out in full and echoed into the
//! report, so a report can be re-run from its own config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config field {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Bijection,
    Phase,
    Reindex,
    Nu,
    Euler,
    Lfunc,
    Convexity,
    Mellin,
    Bessel,
    Dfactor,
    Poisson,
    Partition,
    Amplifier,
    All,
}

impl SuiteName {
    /// Every concrete suite, in the order `all` runs them.
    pub const CONCRETE: [SuiteName; 13] = [
        SuiteName::Bijection,
        SuiteName::Phase,
        SuiteName::Reindex,
        SuiteName::Nu,
        SuiteName::Euler,
        SuiteName::Lfunc,
        SuiteName::Convexity,
        SuiteName::Mellin,
        SuiteName::Bessel,
        SuiteName::Dfactor,
        SuiteName::Poisson,
        SuiteName::Partition,
        SuiteName::Amplifier,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Bijection => "bijection",
            SuiteName::Phase => "phase",
            SuiteName::Reindex => "reindex",
            SuiteName::Nu => "nu",
            SuiteName::Euler => "euler",
            SuiteName::Lfunc => "lfunc",
            SuiteName::Convexity => "convexity",
            SuiteName::Mellin => "mellin",
            SuiteName::Bessel => "bessel",
            SuiteName::Dfactor => "dfactor",
            SuiteName::Poisson => "poisson",
            SuiteName::Partition => "partition",
            SuiteName::Amplifier => "amplifier",
            SuiteName::All => "all",
        }
    }
}

impl std::fmt::Display for SuiteName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: SuiteName,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `0` lets the pool choose.
    #[serde(default)]
    pub workers: usize,
    /// Cache location; `AMPSUM_CACHE_DIR` takes precedence.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: Grid,
}

impl SuiteConfig {
    pub fn new(suite: SuiteName) -> Self {
        SuiteConfig {
            suite,
            seed: 0,
            workers: 0,
            cache_dir: None,
            grid: Grid::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate()
    }

    /// `AMPSUM_CACHE_DIR`, then the configured directory, then a temp-dir default.
    pub fn resolved_cache_dir(&self) -> PathBuf {
        if let Some(dir) = std::env::var_os("AMPSUM_CACHE_DIR").filter(|v| !v.is_empty()) {
            return PathBuf::from(dir);
        }
        self.cache_dir
            .clone()
            .unwrap_or_else(|| std::env::temp_dir().join("ampsum-cache"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub bijection: BijectionGrid,
    pub phase: PhaseGrid,
    pub reindex: ReindexGrid,
    pub nu: NuGrid,
    pub euler: EulerGrid,
    pub lfunc: LfuncGrid,
    pub convexity: ConvexityGrid,
    pub mellin: MellinGrid,
    pub bessel: BesselGrid,
    pub dfactor: DfactorGrid,
    pub poisson: PoissonGrid,
    pub partition: PartitionGrid,
    pub amplifier: AmplifierGrid,
}

fn positive(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            field,
            reason: format!("tolerance {v} must be positive"),
        })
    }
}

fn capped(field: &'static str, v: u64, lo: u64, hi: u64) -> Result<(), ConfigError> {
    if (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            field,
            reason: format!("{v} outside [{lo}, {hi}]"),
        })
    }
}

fn nonempty<T>(field: &'static str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() {
        Err(ConfigError::Invalid {
            field,
            reason: "list must not be empty".into(),
        })
    } else {
        Ok(())
    }
}

/// A complex number written as `[re, im]`.
pub type C = [f64; 2];

impl Grid {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let b = &self.bijection;
        capped("bijection.c_max", b.c_max, 1, 200)?;
        capped("bijection.n_max", b.n_max, 1, 2000)?;
        capped("bijection.zero_c_max", b.zero_c_max, 1, 500)?;

        let p = &self.phase;
        capped("phase.c_max", p.c_max, 1, 200)?;
        capped("phase.n_max", p.n_max, 1, 2000)?;
        nonempty("phase.twists", &p.twists)?;
        nonempty("phase.gauss_primes", &p.gauss_primes)?;
        for &q in &p.gauss_primes {
            capped("phase.gauss_primes", q, 3, 1000)?;
            if !ampsum_core::arith::is_prime(q) {
                return Err(ConfigError::Invalid {
                    field: "phase.gauss_primes",
                    reason: format!("{q} is not prime"),
                });
            }
        }
        capped("phase.gauss_arguments", p.gauss_arguments as u64, 1, 1000)?;
        positive("phase.tolerance", p.tolerance)?;

        let r = &self.reindex;
        nonempty("reindex.caps", &r.caps)?;
        for c in &r.caps {
            capped("reindex.caps.c1", c.c1, 1, 200)?;
            capped("reindex.caps.c2", c.c2, 1, 200)?;
            capped("reindex.caps.n", c.n, 1, 200)?;
        }
        positive("reindex.tolerance", r.tolerance)?;
        positive("reindex.kernel_n_width", r.kernel_n_width)?;

        let n = &self.nu;
        capped("nu.n_max", n.n_max, 1, 20_000)?;
        capped("nu.coefficient_max", n.coefficient_max as u64, 0, 100)?;
        capped("nu.hensel_p_max", n.hensel_p_max, 3, 200)?;
        capped("nu.hensel_k_max", n.hensel_k_max as u64, 1, 6)?;
        capped("nu.multiplicative_n_max", n.multiplicative_n_max, 1, 100_000)?;
        nonempty("nu.sample_triples", &n.sample_triples)?;

        let e = &self.euler;
        nonempty("euler.quadratics", &e.quadratics)?;
        capped("euler.terms", e.terms, 10, 10_000_000)?;
        capped("euler.primes", e.primes, 2, 1_000_000)?;
        capped("euler.ad_prime_cap", e.ad_prime_cap, 2, 100_000)?;
        capped("euler.local_prime_cap", e.local_prime_cap, 2, 100_000)?;
        positive("euler.tolerance", e.tolerance)?;

        let l = &self.lfunc;
        capped("lfunc.q_max", l.q_max, 1, 2000)?;
        nonempty("lfunc.zeta_points", &l.zeta_points)?;
        positive("lfunc.zeta_tolerance", l.zeta_tolerance)?;
        positive("lfunc.rounding_slack", l.rounding_slack)?;

        let c = &self.convexity;
        capped("convexity.q_max", c.q_max, 5, ampsum_core::arith::TABLE_LIMIT)?;
        capped("convexity.steps", c.steps as u64, 1, 10_000)?;
        positive("convexity.t_max", c.t_max)?;

        let m = &self.mellin;
        nonempty("mellin.xs", &m.xs)?;
        nonempty("mellin.ss", &m.ss)?;
        positive("mellin.height_cap", m.height_cap)?;
        positive("mellin.tolerance", m.tolerance)?;

        let b = &self.bessel;
        nonempty("bessel.pair_samples", &b.pair_samples)?;
        positive("bessel.pair_tolerance", b.pair_tolerance)?;
        positive("bessel.limit_tolerance", b.limit_tolerance)?;
        positive("bessel.regime_tolerance", b.regime_tolerance)?;

        let d = &self.dfactor;
        nonempty("dfactor.t_samples", &d.t_samples)?;
        positive("dfactor.oracle_tolerance", d.oracle_tolerance)?;
        capped("dfactor.mconv_rungs", d.mconv_rungs as u64, 2, 12)?;

        let p = &self.poisson;
        capped("poisson.c_max", p.c_max, 1, 200)?;
        positive("poisson.tolerance", p.tolerance)?;

        let pa = &self.partition;
        nonempty("partition.x_caps", &pa.x_caps)?;
        for &x in &pa.x_caps {
            positive("partition.x_caps", x)?;
        }
        positive("partition.tolerance", pa.tolerance)?;

        let a = &self.amplifier;
        capped("amplifier.length_max", a.length_max, 1, 1_000_000)?;
        capped("amplifier.random_vectors", a.random_vectors as u64, 1, 100_000)?;
        positive("amplifier.tolerance", a.tolerance)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BijectionGrid {
    pub c_max: u64,
    pub n_max: u64,
    pub zero_c_max: u64,
}

impl Default for BijectionGrid {
    fn default() -> Self {
        BijectionGrid {
            c_max: 30,
            n_max: 60,
            zero_c_max: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseGrid {
    pub c_max: u64,
    pub n_max: u64,
    /// Pairs `(l, l')` in the phase identity.
    pub twists: Vec<(i64, i64)>,
    pub gauss_primes: Vec<u64>,
    pub gauss_r: Vec<u64>,
    /// Random arguments per `(p, q, r)`, besides the vanishing ones.
    pub gauss_arguments: usize,
    pub tolerance: f64,
}

impl Default for PhaseGrid {
    fn default() -> Self {
        PhaseGrid {
            c_max: 30,
            n_max: 60,
            twists: vec![(1, 1), (3, -2), (7, 5)],
            gauss_primes: vec![3, 5, 7, 11, 13],
            gauss_r: vec![1, 2, 4],
            gauss_arguments: 10,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsConfig {
    pub c1: u64,
    pub c2: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReindexGrid {
    pub p: u64,
    pub q: u64,
    pub chi_index: usize,
    pub psi_index: usize,
    pub l: i64,
    pub l2: i64,
    /// Bumps `(center, width)` for the `c1` and `c2` weights.
    pub kernel_c1: (f64, f64),
    pub kernel_c2: (f64, f64),
    pub kernel_n_width: f64,
    pub caps: Vec<CapsConfig>,
    pub tolerance: f64,
}

impl Default for ReindexGrid {
    fn default() -> Self {
        ReindexGrid {
            p: 3,
            q: 5,
            chi_index: 1,
            psi_index: 2,
            l: 2,
            l2: 7,
            kernel_c1: (9.0, 8.0),
            kernel_c2: (10.0, 9.0),
            kernel_n_width: 8.0,
            caps: vec![
                CapsConfig { c1: 18, c2: 20, n: 9 },
                CapsConfig { c1: 24, c2: 25, n: 12 },
                CapsConfig { c1: 30, c2: 30, n: 16 },
            ],
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NuGrid {
    /// Odd moduli `n <= n_max` for the fast/brute comparison.
    pub n_max: u64,
    /// Coefficients `m, a, b` range over `[0, coefficient_max]`.
    pub coefficient_max: i64,
    pub hensel_p_max: u64,
    pub hensel_k_max: u32,
    pub multiplicative_n_max: u64,
    /// `(m, a, b)` used for the Hensel and multiplicativity checks.
    pub sample_triples: Vec<(i64, i64, i64)>,
}

impl Default for NuGrid {
    fn default() -> Self {
        NuGrid {
            n_max: 500,
            coefficient_max: 10,
            hensel_p_max: 50,
            hensel_k_max: 4,
            multiplicative_n_max: 1000,
            sample_triples: vec![(3, 1, 1), (1, 1, -1), (5, 2, 1), (0, 1, 1), (4, 3, 7), (6, 1, 9), (2, 5, 10)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EulerGrid {
    /// `(modulus, index)` of `chi` and `psi`.
    pub chi: (u64, usize),
    pub psi: (u64, usize),
    pub quadratics: Vec<(i64, i64, i64)>,
    /// `(s1, s2, w)` points; each kind uses those inside its region.
    pub points: Vec<(C, C, C)>,
    pub terms: u64,
    pub primes: u64,
    pub ad_prime_cap: u64,
    pub ad_exact_n: u64,
    pub local_prime_cap: u64,
    pub tolerance: f64,
}

impl Default for EulerGrid {
    fn default() -> Self {
        EulerGrid {
            chi: (5, 1),
            psi: (7, 2),
            quadratics: vec![(3, 1, 1), (1, 1, -1), (5, 2, 1)],
            points: vec![
                ([3.0, 0.0], [2.0, 0.0], [0.2, 0.0]),
                ([2.5, 1.0], [2.2, -3.0], [0.1, 2.0]),
            ],
            terms: 20_000,
            primes: 2_000,
            ad_prime_cap: 1000,
            ad_exact_n: 300,
            local_prime_cap: 1000,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LfuncGrid {
    /// Primitive characters of modulus `<= q_max` are compared at `s = 1/2`.
    pub q_max: u64,
    /// Points for the principal-character relation with zeta.
    pub zeta_points: Vec<C>,
    pub zeta_tolerance: f64,
    /// Added to the combined error bound to absorb rounding.
    pub rounding_slack: f64,
}

impl Default for LfuncGrid {
    fn default() -> Self {
        LfuncGrid {
            q_max: 100,
            zeta_points: vec![[0.5, 0.0], [2.0, 0.0], [0.5, 3.0]],
            zeta_tolerance: 1e-10,
            rounding_slack: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvexityGrid {
    pub q_max: u64,
    pub t_max: f64,
    pub steps: usize,
}

impl Default for ConvexityGrid {
    fn default() -> Self {
        ConvexityGrid {
            q_max: 2000,
            t_max: 10.0,
            steps: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MellinGrid {
    pub xs: Vec<f64>,
    /// The contour sits at `Re w = Re s / 2`.
    pub ss: Vec<C>,
    pub height_cap: f64,
    pub tolerance: f64,
    pub gamma_line: f64,
    pub gamma_s2: C,
    pub gamma_t: Vec<f64>,
}

impl Default for MellinGrid {
    fn default() -> Self {
        MellinGrid {
            xs: vec![0.1, 1.0, 3.0],
            ss: vec![[2.0, 0.0], [1.0, 0.0], [0.5, 3.0]],
            height_cap: 200.0,
            tolerance: 1e-8,
            gamma_line: 0.5,
            gamma_s2: [0.4, 20.0],
            gamma_t: vec![1.0, 5.0, 10.0, 15.0, 19.9, 25.0, 50.0, 100.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BesselGrid {
    /// `(A, B, w)` with `A > 0`.
    pub pair_samples: Vec<(f64, f64, C)>,
    /// `(A, B, w)` with `A <= 0`, compared with the K-Bessel and gamma forms.
    pub nonpositive_samples: Vec<(f64, f64, C)>,
    pub pair_tolerance: f64,
    /// `(A, B)` for the `w -> 0` limit.
    pub limit_points: Vec<(f64, f64)>,
    pub limit_step: f64,
    pub limit_tolerance: f64,
    pub regime_tolerance: f64,
}

impl Default for BesselGrid {
    fn default() -> Self {
        BesselGrid {
            pair_samples: vec![
                (1.0, 1.0, [0.0, 0.3]),
                (0.5, 2.0, [0.2, 1.0]),
                (2.0, 0.3, [-0.3, -0.5]),
                (0.7, 1.3, [0.0, 0.0]),
                (1.5, 0.8, [0.4, 0.0]),
                (0.3, 0.3, [0.0, 1.5]),
                (3.0, 1.0, [0.1, -1.0]),
                (0.2, 4.0, [-0.2, 0.7]),
                (1.2, 2.5, [0.3, 2.0]),
                (5.0, 0.5, [0.0, -0.4]),
            ],
            nonpositive_samples: vec![(-0.8, 1.1, [0.1, 0.4]), (0.0, 1.0, [0.4, 0.2]), (-2.0, 0.5, [0.0, 1.0])],
            pair_tolerance: 1e-6,
            limit_points: vec![(0.7, 1.3), (1.0, 1.0), (2.0, 0.5)],
            limit_step: 1e-6,
            limit_tolerance: 1e-5,
            regime_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DfactorGrid {
    pub sigma1: f64,
    pub sigma2: f64,
    pub t_samples: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `(d0, k, l1, l2, m)`.
    pub geometries: Vec<(u64, u64, u64, u64, u64)>,
    pub oracle_tolerance: f64,
    pub mconv_rungs: usize,
}

impl Default for DfactorGrid {
    fn default() -> Self {
        DfactorGrid {
            sigma1: 0.5,
            sigma2: 0.5,
            t_samples: vec![-2.0, 1.0, 4.0],
            gammas: vec![0.5, 1.5],
            geometries: vec![(1, 1, 2, 2, 1), (1, 1, 2, 2, 8)],
            oracle_tolerance: 1e-6,
            mconv_rungs: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoissonGrid {
    pub c_max: u64,
    /// `F` is the bump `(center, width)`.
    pub bump: (f64, f64),
    /// `(a, b)` of the quadratic-root weight.
    pub quadratic: (i64, i64),
    pub tolerance: f64,
}

impl Default for PoissonGrid {
    fn default() -> Self {
        PoissonGrid {
            c_max: 30,
            bump: (9.0, 6.5),
            quadratic: (2, 3),
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionGrid {
    pub x_caps: Vec<f64>,
    pub tolerance: f64,
}

impl Default for PartitionGrid {
    fn default() -> Self {
        PartitionGrid {
            x_caps: vec![1.0, 10.0, 1e3, 1e6, 1e9],
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmplifierGrid {
    /// Every length `L <= length_max` is checked.
    pub length_max: u64,
    pub random_vectors: usize,
    /// Random vectors are supported on this many primes and prime squares.
    pub support_size: usize,
    pub tolerance: f64,
    pub lower_bound_ladder: Vec<u64>,
    /// `(modulus, index)` of a nontrivial nebentypus for the twisted diagnostics.
    pub twisted_character: (u64, usize),
}

impl Default for AmplifierGrid {
    fn default() -> Self {
        AmplifierGrid {
            length_max: 10_000,
            random_vectors: 100,
            support_size: 8,
            tolerance: 1e-10,
            lower_bound_ladder: vec![100, 1000, 10_000],
            twisted_character: (5, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_default_grid() {
        let cfg = SuiteConfig::from_json(r#"{"suite": "nu", "seed": 3}"#).unwrap();
        assert_eq!(cfg.suite, SuiteName::Nu);
        assert_eq!(cfg.grid, Grid::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            SuiteConfig::from_json(r#"{"suite": "nu", "colour": 1}"#),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            SuiteConfig::from_json(r#"{"suite": "nu", "grid": {"nu": {"n_mx": 5}}}"#),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn bad_values_rejected() {
        assert!(matches!(
            SuiteConfig::from_json(r#"{"suite": "phase", "grid": {"phase": {"tolerance": -1}}}"#),
            Err(ConfigError::Invalid { field: "phase.tolerance", .. })
        ));
        assert!(matches!(
            SuiteConfig::from_json(r#"{"suite": "lfunc", "grid": {"lfunc": {"q_max": 5000}}}"#),
            Err(ConfigError::Invalid { .. })
        ));
        assert!(SuiteConfig::from_json(r#"{"suite": "bogus"}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = SuiteConfig::new(SuiteName::All);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(SuiteConfig::from_json(&text).unwrap(), cfg);
    }
}
