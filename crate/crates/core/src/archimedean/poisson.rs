//! Poisson summation twisted by a periodic weight:
//! `sum_m w(m) F(m) = (1/c) sum_k w^(k) F^(k/c)` with
//! `w^(k) = sum_{a mod c} w(a) e(ak/c)` and `F^(xi) = int F(x) e(-x xi) dx`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_kronrod, QuadratureSpec};
use super::testfn::CompactWeight;
use super::ArchError;
use crate::arith::{gauss_sum, rem_euclid, DirichletCharacter, RootTable};

/// A function on residues modulo `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueWeight {
    pub label: String,
    pub values: Vec<Complex64>,
}

impl ResidueWeight {
    pub fn modulus(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn constant(c: u64) -> Self {
        ResidueWeight {
            label: "constant".into(),
            values: vec![Complex64::new(1.0, 0.0); c as usize],
        }
    }

    /// `w(m) = #{x mod c : a x^2 - m x + b = 0 mod c}`.
    pub fn quadratic_roots(c: u64, a: i64, b: i64) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); c as usize];
        let ci = c as i128;
        for x in 0..ci {
            for m in 0..ci {
                let v = (a as i128 * x * x - m * x + b as i128).rem_euclid(ci);
                if v == 0 {
                    values[m as usize] += 1.0;
                }
            }
        }
        ResidueWeight {
            label: format!("roots of {a} x^2 - m x + {b}"),
            values,
        }
    }

    pub fn character(chi: &DirichletCharacter) -> Self {
        ResidueWeight {
            label: format!("character mod {}", chi.modulus()),
            values: chi.values().to_vec(),
        }
    }

    pub fn at(&self, m: i64) -> Complex64 {
        self.values[rem_euclid(m, self.modulus()) as usize]
    }

    /// All dual weights `w^(k)`, `k = 0..c`.
    pub fn dual(&self) -> Vec<Complex64> {
        let c = self.modulus();
        let roots = RootTable::new(c);
        (0..c)
            .map(|k| {
                self.values
                    .iter()
                    .enumerate()
                    .map(|(a, w)| w * roots.e_u((a as u64 * k) % c))
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub modulus: u64,
    pub weight: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Dual frequencies `|k| <= dual_terms` were summed.
    pub dual_terms: u64,
    /// Largest `|F^(k/c)|` over the last block of `c` frequencies.
    pub tail_bound: f64,
    /// For a primitive character weight: `max_k |w^(k) - conj(chi(k)) tau(chi)|`.
    pub gauss_dual_residual: Option<f64>,
}

/// Negligible size of the Fourier transform relative to `int |F|`.
const TAIL_TOL: f64 = 1e-14;
/// Absolute accuracy of each transform relative to `int |F|`.
const TRANSFORM_TOL: f64 = 1e-15;
const MAX_FREQUENCY: u64 = 1 << 20;

/// Values `F^(k/c)` for one modulus `c`, computed on demand and shared by
/// every weight modulo `c`.
pub struct TransformTable<'a, F: CompactWeight> {
    f: &'a F,
    c: u64,
    support: Option<(f64, f64)>,
    mass: f64,
    max_depth: u32,
    values: Vec<Complex64>,
}

impl<'a, F: CompactWeight> TransformTable<'a, F> {
    pub fn new(f: &'a F, c: u64, spec: &QuadratureSpec) -> Result<Self, ArchError> {
        if c == 0 {
            return Err(ArchError::BadSpec("weight needs a positive modulus"));
        }
        let support = f.support();
        let mass = match support {
            Some((lo, hi)) => gauss_kronrod(|x| Complex64::new(f.eval(x), 0.0), lo, hi, 1e-300, 1e-14, spec.max_depth)?
                .value
                .re,
            None => 0.0,
        };
        Ok(TransformTable { f, c, support, mass, max_depth: spec.max_depth, values: Vec::new() })
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// `F^(k/c)`.
    pub fn at(&mut self, k: u64) -> Result<Complex64, ArchError> {
        let Some((lo, hi)) = self.support else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        while self.values.len() as u64 <= k {
            let xi = self.values.len() as f64 / self.c as f64;
            let f = self.f;
            let r = gauss_kronrod(
                |x| Complex64::from_polar(f.eval(x), -TAU * x * xi),
                lo,
                hi,
                TRANSFORM_TOL * self.mass,
                1e-13,
                self.max_depth,
            )?;
            self.values.push(r.value);
        }
        Ok(self.values[k as usize])
    }
}

/// Compares both sides of twisted Poisson summation for `F` with compact
/// support in `(0, inf)`.
pub fn poisson_twisted_check(
    f: &impl CompactWeight,
    weight: &ResidueWeight,
    spec: &QuadratureSpec,
) -> Result<PoissonReport, ArchError> {
    let mut table = TransformTable::new(f, weight.modulus(), spec)?;
    poisson_twisted_check_with(weight, &mut table)
}

/// As [`poisson_twisted_check`], reusing transforms already in `table`.
pub fn poisson_twisted_check_with<F: CompactWeight>(
    weight: &ResidueWeight,
    table: &mut TransformTable<'_, F>,
) -> Result<PoissonReport, ArchError> {
    let c = weight.modulus();
    if c != table.modulus() {
        return Err(ArchError::BadSpec("weight and transform table moduli differ"));
    }
    let Some((lo, hi)) = table.support else {
        return Ok(PoissonReport {
            modulus: c,
            weight: weight.label.clone(),
            lhs: Complex64::new(0.0, 0.0),
            rhs: Complex64::new(0.0, 0.0),
            residual: 0.0,
            dual_terms: 0,
            tail_bound: 0.0,
            gauss_dual_residual: None,
        });
    };
    let f = table.f;
    let lhs: Complex64 = (lo.ceil() as i64..=hi.floor() as i64)
        .map(|m| weight.at(m) * f.eval(m as f64))
        .sum();
    let mass = table.mass;
    let dual = weight.dual();
    // F real gives F^(-xi) = conj F^(xi).
    let mut rhs = dual[0] * table.at(0)?;
    let mut k = 1u64;
    let mut block_max = 0.0f64;
    let mut tail_bound;
    loop {
        let v = table.at(k)?;
        let plus = dual[(k % c) as usize];
        let minus = dual[((c - k % c) % c) as usize];
        rhs += plus * v + minus * v.conj();
        block_max = block_max.max(v.norm());
        if k % c == 0 || k == MAX_FREQUENCY {
            tail_bound = block_max;
            if block_max < TAIL_TOL * mass || k >= MAX_FREQUENCY {
                break;
            }
            block_max = 0.0;
        }
        k += 1;
    }
    let rhs = rhs / c as f64;

    let gauss_dual_residual = weight_character(weight).map(|chi| {
        let tau = gauss_sum(&chi);
        (0..c)
            .map(|k| (dual[k as usize] - chi.value_u(k).conj() * tau).norm())
            .fold(0.0, f64::max)
    });
    Ok(PoissonReport {
        modulus: c,
        weight: weight.label.clone(),
        residual: (lhs - rhs).norm(),
        lhs,
        rhs,
        dual_terms: k,
        tail_bound,
        gauss_dual_residual,
    })
}

/// Recovers a primitive character from a character weight table.
fn weight_character(weight: &ResidueWeight) -> Option<DirichletCharacter> {
    if !weight.label.starts_with("character") {
        return None;
    }
    let q = weight.modulus();
    crate::arith::char_group(q)
        .ok()?
        .into_iter()
        .find(|chi| chi.is_primitive() && chi.values().iter().zip(&weight.values).all(|(a, b)| (a - b).norm() < 1e-12))
}
