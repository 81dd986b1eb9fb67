//! Real and complex analytic components: test functions, quadrature,
//! Mellin transforms, Bessel functions and the oscillatory integrals built
//! from them.

pub mod bessel;
pub mod integrals;
pub mod mellin;
pub mod partition;
pub mod poisson;
pub mod quadrature;
pub mod testfn;

pub use quadrature::{integrate, integrate_checked, Checked, ContourSpec, QuadResult, QuadratureSpec, Rule};
pub use testfn::{bump_profile, BumpCombination, CompactWeight, TestFunction};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArchError {
    #[error("quadrature did not converge (error {error:e} after {evaluations} evaluations)")]
    QuadratureFailure { error: f64, evaluations: usize },
    #[error("invalid quadrature spec: {0}")]
    BadSpec(&'static str),
    #[error("bump support [{center} - {width}, {center} + {width}] must lie in [0, inf)")]
    BadSupport { center: f64, width: f64 },
    #[error("derivative of order {requested} requested, smoothness order is {order}")]
    OrderTooHigh { requested: usize, order: usize },
    #[error("contour Re(w) = {real_part} outside the strip ({lo}, {hi})")]
    ContourOutOfStrip { real_part: f64, lo: f64, hi: f64 },
    #[error("pole of {0}")]
    PoleHit(String),
    #[error("no Bessel regime reaches tolerance at nu = {nu}, x = {x} (best {best:e})")]
    RegimeGap { nu: num_complex::Complex64, x: f64, best: f64 },
    #[error("no closed form for A = {a} <= 0")]
    Degenerate { a: f64 },
    #[error("bad spectral parameter: {0}")]
    BadSpectralTag(String),
}
