//! Dyadic partition of unity `eta(x) = sum_M eta_M(x)`.
//!
//! With the smooth step `rho(x) = int_{-1}^{4x - 3} b / int_{-1}^{1} b` (zero
//! below `1/2`, one above `1`), each block is `eta_M(x) = phi(x / M)` with
//! `phi(x) = rho(x) - rho(x / 2)`, supported in `[M/2, 2M]`. The blocks
//! telescope, so `sum_{M = 2^j <= 2^J} eta_M = rho(x) - rho(x / 2^{J+1})`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::quadrature::{fixed_rule, gauss_legendre};
use super::testfn::{bump_profile, TestFunction};

/// Smoothness order used for derivative bounds.
pub const DERIVATIVE_ORDER: usize = 4;

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        fixed_rule(|u| num_complex::Complex64::new(bump_profile(u), 0.0), -1.0, 1.0, 20, 16)
            .value
            .re
    })
}

/// `int_{-1}^{v} b / int_{-1}^{1} b`.
fn smooth_cdf(v: f64) -> f64 {
    if v <= -1.0 {
        return 0.0;
    }
    if v >= 1.0 {
        return 1.0;
    }
    // Integrate over the shorter side for accuracy near 1.
    let (x, w) = gauss_legendre(20);
    let panel = |a: f64, b: f64| -> f64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        x.iter().zip(&w).map(|(xi, wi)| wi * bump_profile(c + h * xi)).sum::<f64>() * h
    };
    let composite = |a: f64, b: f64| -> f64 {
        let n = 8;
        let step = (b - a) / n as f64;
        (0..n).map(|i| panel(a + i as f64 * step, a + (i + 1) as f64 * step)).sum()
    };
    if v <= 0.0 {
        composite(-1.0, v) / bump_mass()
    } else {
        1.0 - composite(v, 1.0) / bump_mass()
    }
}

/// The smooth step `rho`.
pub fn smooth_step(x: f64) -> f64 {
    smooth_cdf(4.0 * x - 3.0)
}

/// `rho^{(i)}(x)` for `i >= 1`.
fn smooth_step_derivative(i: usize, x: f64, bump: &TestFunction) -> f64 {
    if i == 0 {
        return smooth_step(x);
    }
    let v = 4.0 * x - 3.0;
    4f64.powi(i as i32) * bump.derivative(i - 1, v).unwrap_or(0.0) / bump_mass()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionSpec {
    /// Dyadic centers `M = 2^j`, `j = 0..=J`.
    pub m_list: Vec<f64>,
    pub x_cap: f64,
    /// Largest `|sum_M eta_M(x) - eta(x)|` on the audit grid, plus the largest
    /// deviation of the sum from 1 on `[1, X_cap]`.
    pub residual: f64,
    /// Largest `|x^i eta_M^{(i)}(x)|` on the audit grid, `i = 0..=4`.
    pub derivative_bounds: Vec<f64>,
    /// Every block vanishes outside `[M/2, 2M]` on the grid.
    pub supports_ok: bool,
    pub grid_points: usize,
}

impl PartitionSpec {
    pub fn count(&self) -> usize {
        self.m_list.len()
    }

    /// Count bound `2 + log2(X_cap)`.
    pub fn count_bound(&self) -> f64 {
        2.0 + self.x_cap.log2()
    }

    /// `eta_M(x) = phi(x / M)`.
    pub fn block(&self, m: f64, x: f64) -> f64 {
        phi(x / m)
    }

    /// `sum_M eta_M(x)`.
    pub fn sum(&self, x: f64) -> f64 {
        self.m_list.iter().map(|&m| self.block(m, x)).sum()
    }

    /// Target `eta`: zero below `1/2`, one from `1` up to `X_cap`.
    pub fn eta(&self, x: f64) -> f64 {
        smooth_step(x)
    }
}

fn phi(x: f64) -> f64 {
    smooth_step(x) - smooth_step(x / 2.0)
}

fn phi_derivative(i: usize, x: f64, bump: &TestFunction) -> f64 {
    smooth_step_derivative(i, x, bump) - 0.5f64.powi(i as i32) * smooth_step_derivative(i, x / 2.0, bump)
}

/// Builds the partition for `[1/2, X_cap]` and audits it on a log-spaced grid
/// of 1000 points in `[1/4, 2 X_cap]`.
pub fn partition_unity(x_cap: f64) -> PartitionSpec {
    let x_cap = x_cap.max(1.0);
    let top = x_cap.log2().ceil().max(0.0) as i32;
    let m_list: Vec<f64> = (0..=top).map(|j| 2f64.powi(j)).collect();
    let bump = TestFunction::symmetric_bump(1.0, DERIVATIVE_ORDER);
    let grid_points = 1000;
    let (lo, hi) = (0.25f64.ln(), (2.0 * x_cap).ln());
    let mut spec = PartitionSpec {
        m_list,
        x_cap,
        residual: 0.0,
        derivative_bounds: vec![0.0; DERIVATIVE_ORDER + 1],
        supports_ok: true,
        grid_points,
    };
    for g in 0..grid_points {
        let x = (lo + (hi - lo) * g as f64 / (grid_points - 1) as f64).exp();
        let total = spec.sum(x);
        if x <= x_cap {
            spec.residual = spec.residual.max((total - spec.eta(x)).abs());
            if x >= 1.0 {
                spec.residual = spec.residual.max((total - 1.0).abs());
            }
            if x <= 0.5 {
                spec.residual = spec.residual.max(total.abs());
            }
        }
        for &m in &spec.m_list {
            let u = x / m;
            if !(0.5..=2.0).contains(&u) && phi(u) != 0.0 {
                spec.supports_ok = false;
            }
            // x^i d^i/dx^i phi(x/M) = u^i phi^{(i)}(u)
            for i in 0..=DERIVATIVE_ORDER {
                let v = (u.powi(i as i32) * phi_derivative(i, u, &bump)).abs();
                spec.derivative_bounds[i] = spec.derivative_bounds[i].max(v);
            }
        }
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_values() {
        assert_eq!(smooth_step(0.5), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.75) - 0.5).abs() < 1e-15);
        // mass of the bump
        assert!((bump_mass() - 0.443_993_816_168_079_4).abs() < 1e-14);
    }

    #[test]
    fn partition_1024() {
        let p = partition_unity(1024.0);
        assert!(p.count() <= 12);
        assert!((p.count() as f64) <= p.count_bound());
        assert!(p.residual < 1e-12, "{}", p.residual);
        assert!(p.supports_ok);
        assert_eq!(p.sum(0.3), 0.0);
        assert!(p.derivative_bounds.iter().all(|c| c.is_finite()));
    }

    #[test]
    fn derivative_matches_difference() {
        let bump = TestFunction::symmetric_bump(1.0, DERIVATIVE_ORDER);
        let h = 1e-6;
        for &x in &[0.6, 0.8, 1.1, 1.5, 1.9] {
            let fd = (phi(x + h) - phi(x - h)) / (2.0 * h);
            assert!((fd - phi_derivative(1, x, &bump)).abs() < 1e-7);
        }
    }
}
