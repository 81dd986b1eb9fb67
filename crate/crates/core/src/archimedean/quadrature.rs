//! Adaptive Gauss-Kronrod and fixed Gauss-Legendre quadrature for complex
//! integrands on finite intervals.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ArchError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Adaptive,
    /// Composite Gauss-Legendre with `nodes` points on each of `panels` panels.
    FixedNode { nodes: usize, panels: usize },
}

/// Vertical line `Re = real_part`, truncated at `|Im| <= height_cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub real_part: f64,
    pub height_cap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub contour: ContourSpec,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rule: Rule::Adaptive,
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_depth: 40,
            contour: ContourSpec {
                real_part: 0.5,
                height_cap: 200.0,
            },
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), ArchError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(ArchError::BadSpec("tolerances must be positive"));
        }
        if !self.contour.height_cap.is_finite() || self.contour.height_cap <= 0.0 {
            return Err(ArchError::BadSpec("height cap must be finite and positive"));
        }
        if let Rule::FixedNode { nodes, panels } = self.rule {
            if nodes == 0 || panels == 0 {
                return Err(ArchError::BadSpec("fixed rule needs nodes and panels"));
            }
        }
        Ok(())
    }

    /// An independent fixed rule with roughly four times the node density
    /// of a typical adaptive run, for cross-checks.
    pub fn dense_fixed(panels: usize) -> Self {
        QuadratureSpec {
            rule: Rule::FixedNode { nodes: 20, panels },
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// G7-K15 on `[a, b]`: value, error estimate and `int |f|`.
fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (l, r) = (f(c - dx), f(c + dx));
        abs += (l.norm() + r.norm()) * WGK[j];
        let s = l + r;
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm(), abs * h.abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    abs: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Rounding floor of an adaptive run, relative to `int |f|`.
pub const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Globally adaptive G7-K15 on `[a, b]`.
pub fn gauss_kronrod<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Result<QuadResult, ArchError> {
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let (v, e, abs) = kronrod(&f, a, b);
    let mut total = v;
    let mut err = e;
    let mut abs_total = abs;
    let mut evals = 15;
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
        abs,
        depth: 0,
    });
    let max_segments = 1usize << 14;
    // Nothing below the rounding floor of the summation is resolvable.
    let target = |total: Complex64, abs_total: f64| abs_tol.max(rel_tol * total.norm()).max(ROUNDING_FLOOR * abs_total);
    while err > target(total, abs_total) {
        let seg = heap.pop().expect("heap is never empty");
        if seg.depth >= max_depth || heap.len() >= max_segments {
            return Err(ArchError::QuadratureFailure {
                error: err,
                evaluations: evals,
            });
        }
        let m = 0.5 * (seg.a + seg.b);
        let (v1, e1, a1) = kronrod(&f, seg.a, m);
        let (v2, e2, a2) = kronrod(&f, m, seg.b);
        evals += 30;
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        abs_total += a1 + a2 - seg.abs;
        heap.push(Segment {
            a: seg.a,
            b: m,
            value: v1,
            error: e1,
            abs: a1,
            depth: seg.depth + 1,
        });
        heap.push(Segment {
            a: m,
            b: seg.b,
            value: v2,
            error: e2,
            abs: a2,
            depth: seg.depth + 1,
        });
        if err < 0.0 {
            err = heap.iter().map(|s| s.error).sum();
        }
    }
    // Resum to limit drift from incremental updates.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations: evals,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n == 1 {
        w[0] = 2.0;
    }
    (x, w)
}

/// Composite Gauss-Legendre rule.
pub fn fixed_rule<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    nodes: usize,
    panels: usize,
) -> QuadResult {
    let (x, w) = gauss_legendre(nodes);
    let h = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        let mut s = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            s += f(c + 0.5 * h * xi) * *wi;
        }
        total += s * (0.5 * h);
    }
    QuadResult {
        value: total,
        error: f64::NAN,
        evaluations: nodes * panels,
    }
}

/// Integrates with the rule selected by `spec`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult, ArchError> {
    spec.validate()?;
    match spec.rule {
        Rule::Adaptive => gauss_kronrod(f, a, b, spec.abs_tol, spec.rel_tol, spec.max_depth),
        Rule::FixedNode { nodes, panels } => Ok(fixed_rule(f, a, b, nodes, panels)),
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, ArchError> {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, spec).map(|r| r.value.re)
}

/// A quadrature value together with an independent cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checked {
    pub value: Complex64,
    /// Error estimate of the primary rule (NaN for fixed rules).
    pub error: f64,
    /// The same integral from a composite Gauss-Legendre rule with at least
    /// four times as many nodes.
    pub oracle: Complex64,
    pub oracle_gap: f64,
}

impl Checked {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Checked {
            value: z,
            error: 0.0,
            oracle: z,
            oracle_gap: 0.0,
        }
    }

    /// Whether the oracle agrees within `abs_tol + rel_tol |value|`.
    pub fn agrees(&self, abs_tol: f64, rel_tol: f64) -> bool {
        self.oracle_gap <= abs_tol + rel_tol * self.value.norm()
    }

    pub fn scale(self, c: Complex64) -> Self {
        Checked {
            value: self.value * c,
            error: self.error * c.norm(),
            oracle: self.oracle * c,
            oracle_gap: self.oracle_gap * c.norm(),
        }
    }

    pub fn add(self, other: Checked) -> Self {
        let value = self.value + other.value;
        let oracle = self.oracle + other.oracle;
        Checked {
            value,
            error: self.error + other.error,
            oracle,
            oracle_gap: (value - oracle).norm(),
        }
    }
}

/// Integrates with `spec` and repeats with a composite 20-point rule at four
/// times the primary node count.
pub fn integrate_checked<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Checked, ArchError> {
    let primary = integrate(&f, a, b, spec)?;
    let panels = (4 * primary.evaluations).div_ceil(20).max(8);
    let oracle = fixed_rule(&f, a, b, 20, panels);
    Ok(Checked {
        value: primary.value,
        error: primary.error,
        oracle: oracle.value,
        oracle_gap: (primary.value - oracle.value).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exact_on_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((s - want).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn kronrod_known_integrals() {
        let r = gauss_kronrod(|x| Complex64::new(x.exp(), 0.0), 0.0, 1.0, 1e-14, 1e-14, 30).unwrap();
        assert!((r.value.re - (1f64.exp() - 1.0)).abs() < 1e-14);
        let r = gauss_kronrod(|x| Complex64::new(0.0, x).exp(), 0.0, 20.0, 1e-13, 1e-13, 30).unwrap();
        let want = Complex64::new(0.0, -1.0) * (Complex64::new(0.0, 20.0).exp() - 1.0);
        assert!((r.value - want).norm() < 1e-12);
        let r = gauss_kronrod(|x| Complex64::new(x.sqrt(), 0.0), 0.0, 1.0, 1e-12, 1e-12, 40).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn fixed_and_adaptive_agree() {
        let f = |x: f64| Complex64::new((3.0 * x).sin() * (-x * x).exp(), x.cos());
        let a = gauss_kronrod(f, -2.0, 3.0, 1e-14, 1e-14, 30).unwrap();
        let b = fixed_rule(f, -2.0, 3.0, 20, 8);
        assert!((a.value - b.value).norm() < 1e-13);
    }
}
