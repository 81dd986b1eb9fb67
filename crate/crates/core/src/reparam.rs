//! The pair classes `X(c1, c2, n)`, the r-classes `Y(c1, c2, n)`, the
//! bijection between them and the reindexing of the double Kloosterman sum.
//!
//! `X(c1, c2, n)` is the set of classes `(x mod c1, y mod c2)` of units
//! admitting integer representatives with `c2 x + c1 y = n`. Shifting the
//! representatives moves `c2 x + c1 y` by multiples of `c1 c2`, so membership
//! is the congruence `c2 x + c1 y = n (mod c1 c2)`.
//!
//! For `d = gcd(c1, c2)` dividing `n != 0`, `Y(c1, c2, n)` is the set of units
//! `r mod n` with `(c1/d) r + c2/d = 0 (mod n/d)` such that the congruence
//! fails modulo `n/d'` for every proper divisor `d'` of `d`. A class maps to
//! `r1 = (n xbar - c2) / c1 mod n`, and then
//! `xbar = (c2 + c1 r1) / n`, `ybar = (c1 + c2 r2) / n` with `r1 r2 = 1 (mod n)`.

use std::f64::consts::TAU;
use std::ops::Add;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archimedean::TestFunction;
use crate::arith::{divisors, gcd, gcd_i, is_prime, mod_inverse, DirichletCharacter, Residue};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReparamError {
    #[error("gcd({c1}, {c2}) does not divide n = {n}")]
    DNotDividesN { c1: u64, c2: u64, n: i64 },
    #[error("n = 0 has no r-classes; use zero_n_classify")]
    ZeroN,
    #[error("moduli must be positive")]
    ZeroModulus,
    #[error("r = {r} mod {n} is not the bijection partner of the given pair class")]
    MismatchedClasses { r: u64, n: i64 },
    #[error("lambda window misses terms at c1 = {c1}, n = {n}")]
    TruncationMismatch { c1: u64, n: i64 },
    #[error("invalid parameters: {0}")]
    BadParameters(&'static str),
}

/// A phase `e(a / b)` stored as a reduced fraction in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(Ratio<i128>);

impl Phase {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "phase denominator must be nonzero");
        let r = Ratio::new(num, den);
        let d = *r.denom();
        Phase(Ratio::new(r.numer().rem_euclid(d), d))
    }

    pub fn zero() -> Self {
        Phase(Ratio::new(0, 1))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * (self.numer() as f64 / self.denom() as f64))
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        let s = self.0 + rhs.0;
        Phase::new(*s.numer(), *s.denom())
    }
}

/// One class of `X(c1, c2, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairClass {
    pub c1: u64,
    pub c2: u64,
    pub n: i64,
    pub x: Residue,
    pub y: Residue,
}

impl PairClass {
    /// Integer inverse of `x` modulo `c1`, in `[0, c1)`.
    pub fn x_inverse(&self) -> i128 {
        mod_inverse(self.x.value() as i64, self.c1)
            .expect("class representatives are units")
            .value() as i128
    }

    pub fn y_inverse(&self) -> i128 {
        mod_inverse(self.y.value() as i64, self.c2)
            .expect("class representatives are units")
            .value() as i128
    }

    /// `r1 = (n xbar - c2) / c1 mod |n|`.
    pub fn r1(&self) -> Residue {
        let (c1, c2, n) = (self.c1 as i128, self.c2 as i128, self.n as i128);
        let t = n * self.x_inverse() - c2;
        debug_assert_eq!(t % c1, 0);
        Residue::new(((t / c1).rem_euclid(n.abs())) as i64, self.n.unsigned_abs())
    }

    /// `r2 = (n ybar - c1) / c2 mod |n|`.
    pub fn r2(&self) -> Residue {
        let (c1, c2, n) = (self.c1 as i128, self.c2 as i128, self.n as i128);
        let t = n * self.y_inverse() - c1;
        debug_assert_eq!(t % c2, 0);
        Residue::new(((t / c2).rem_euclid(n.abs())) as i64, self.n.unsigned_abs())
    }
}

/// One class of `Y(c1, c2, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RClass {
    pub r: Residue,
    pub d: u64,
}

/// All classes of `X(c1, c2, n)`, ordered by `x`.
pub fn enumerate_x(c1: u64, c2: u64, n: i64) -> Result<Vec<PairClass>, ReparamError> {
    if c1 == 0 || c2 == 0 {
        return Err(ReparamError::ZeroModulus);
    }
    let mut out = Vec::new();
    for x in 0..c1 {
        if gcd(x, c1) != 1 {
            continue;
        }
        let t = n as i128 - c2 as i128 * x as i128;
        if t.rem_euclid(c1 as i128) != 0 {
            continue;
        }
        let y = (t / c1 as i128).rem_euclid(c2 as i128) as u64;
        if gcd(y, c2) == 1 {
            out.push(PairClass {
                c1,
                c2,
                n,
                x: Residue::new(x as i64, c1),
                y: Residue::new(y as i64, c2),
            });
        }
    }
    Ok(out)
}

fn check_d(c1: u64, c2: u64, n: i64) -> Result<u64, ReparamError> {
    if c1 == 0 || c2 == 0 {
        return Err(ReparamError::ZeroModulus);
    }
    if n == 0 {
        return Err(ReparamError::ZeroN);
    }
    let d = gcd(c1, c2);
    if n.unsigned_abs() % d != 0 {
        return Err(ReparamError::DNotDividesN { c1, c2, n });
    }
    Ok(d)
}

/// All classes of `Y(c1, c2, n)` in increasing order of `r`.
pub fn enumerate_y(c1: u64, c2: u64, n: i64) -> Result<Vec<RClass>, ReparamError> {
    let d = check_d(c1, c2, n)?;
    let nn = n.unsigned_abs();
    let (a, b) = ((c1 / d) as u128, (c2 / d) as u128);
    let proper: Vec<u64> = divisors(d).into_iter().filter(|&e| e < d).collect();
    let mut out = Vec::new();
    for r in 0..nn {
        if gcd(r, nn) != 1 {
            continue;
        }
        let v = a * r as u128 + b;
        if v % (nn / d) as u128 != 0 {
            continue;
        }
        if proper.iter().any(|&e| v % (nn / e) as u128 == 0) {
            continue;
        }
        out.push(RClass {
            r: Residue::new(r as i64, nn),
            d,
        });
    }
    Ok(out)
}

/// Outcome of [`bijection_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BijectionReport {
    pub c1: u64,
    pub c2: u64,
    pub n: i64,
    pub x_count: usize,
    pub y_count: usize,
    /// The image of `X` under `(x, y) -> r1` equals `Y` without repeats.
    pub bijective: bool,
    /// `n` divides `c2 + c1 r1` and `c1 + c2 r2` for every class.
    pub lifts_integral: bool,
    /// The lifts are inverses of `x` mod `c1` and `y` mod `c2`.
    pub inverse_formula: bool,
    /// `r1 r2 = 1 (mod n)` for every class.
    pub reciprocal: bool,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.x_count == self.y_count
            && self.bijective
            && self.lifts_integral
            && self.inverse_formula
            && self.reciprocal
    }
}

/// Verifies the bijection `X(c1, c2, n) -> Y(c1, c2, n)` and the inverse
/// formulas exactly.
pub fn bijection_check(c1: u64, c2: u64, n: i64) -> Result<BijectionReport, ReparamError> {
    let ys = enumerate_y(c1, c2, n)?;
    let xs = enumerate_x(c1, c2, n)?;
    let nn = n as i128;
    let mut image: Vec<u64> = Vec::with_capacity(xs.len());
    let (mut lifts_integral, mut inverse_formula, mut reciprocal) = (true, true, true);
    for cl in &xs {
        let r1 = cl.r1().value() as i128;
        let r2 = cl.r2().value() as i128;
        image.push(r1 as u64);
        reciprocal &= (r1 * r2).rem_euclid(nn.abs()) == 1 % nn.abs();
        let (a, b) = (c2 as i128 + c1 as i128 * r1, c1 as i128 + c2 as i128 * r2);
        if a % nn != 0 || b % nn != 0 {
            lifts_integral = false;
            continue;
        }
        let (xb, yb) = (a / nn, b / nn);
        inverse_formula &= (xb * cl.x.value() as i128).rem_euclid(c1 as i128) == 1 % c1 as i128;
        inverse_formula &= (yb * cl.y.value() as i128).rem_euclid(c2 as i128) == 1 % c2 as i128;
    }
    image.sort_unstable();
    let target: Vec<u64> = ys.iter().map(|c| c.r.value()).collect();
    Ok(BijectionReport {
        c1,
        c2,
        n,
        x_count: xs.len(),
        y_count: ys.len(),
        bijective: image == target,
        lifts_integral,
        inverse_formula,
        reciprocal,
    })
}

/// `X(c1, c2, 0)`, computed directly from the pair-class definition.
pub fn zero_n_classify(c1: u64, c2: u64) -> Result<Vec<PairClass>, ReparamError> {
    enumerate_x(c1, c2, 0)
}

/// Outcome of [`phase_identity_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseReport {
    /// `l xbar / c1 + l' ybar / c2 mod 1` as `(numerator, denominator)`.
    pub lhs: (i64, i64),
    /// `(l r + l' rbar) / n + (l c2^2 + l' c1^2) / (n c1 c2) mod 1`.
    pub rhs: (i64, i64),
    pub exact_equal: bool,
    pub complex_residual: f64,
}

impl PhaseReport {
    pub fn passed(&self) -> bool {
        self.exact_equal && self.complex_residual < 1e-12
    }
}

/// Checks `e(l xbar/c1 + l' ybar/c2) = e((l r + l' rbar)/n) e((l c2^2 + l' c1^2)/(n c1 c2))`
/// in exact rational arithmetic, with `xbar`, `ybar` computed as inverses
/// independently of `r`.
pub fn phase_identity_check(
    class: &PairClass,
    r: &RClass,
    l: i64,
    l2: i64,
) -> Result<PhaseReport, ReparamError> {
    let n = class.n;
    if n == 0 {
        return Err(ReparamError::ZeroN);
    }
    if r.r.modulus() != n.unsigned_abs() || class.r1() != r.r || r.d != gcd(class.c1, class.c2) {
        return Err(ReparamError::MismatchedClasses {
            r: r.r.value(),
            n,
        });
    }
    let (c1, c2, nn) = (class.c1 as i128, class.c2 as i128, n as i128);
    let (l, l2) = (l as i128, l2 as i128);
    let lhs = Phase::new(l * class.x_inverse(), c1) + Phase::new(l2 * class.y_inverse(), c2);
    let rv = r.r.value() as i128;
    let rb = mod_inverse(rv as i64, n.unsigned_abs())
        .expect("r is a unit")
        .value() as i128;
    let rhs = Phase::new(l * rv + l2 * rb, nn) + Phase::new(l * c2 * c2 + l2 * c1 * c1, nn * c1 * c2);
    Ok(PhaseReport {
        lhs: (lhs.numer() as i64, lhs.denom() as i64),
        rhs: (rhs.numer() as i64, rhs.denom() as i64),
        exact_equal: lhs == rhs,
        complex_residual: (lhs.to_complex() - rhs.to_complex()).norm(),
    })
}

/// Truncation box for the reindexing check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub c1: u64,
    pub c2: u64,
    pub n: u64,
}

/// Weight `G(n, c1, c2) = scale * F1(c1) F2(c2) b(n / n_width)` with `b` the
/// canonical bump profile.
#[derive(Debug, Clone)]
pub struct ReindexKernel {
    c1: Option<TestFunction>,
    c2: Option<TestFunction>,
    n: TestFunction,
    scale: f64,
}

impl ReindexKernel {
    pub fn new(c1: TestFunction, c2: TestFunction, n_width: f64) -> Self {
        ReindexKernel {
            c1: Some(c1),
            c2: Some(c2),
            n: TestFunction::symmetric_bump(n_width, 0),
            scale: 1.0,
        }
    }

    pub fn zero() -> Self {
        ReindexKernel {
            c1: None,
            c2: None,
            n: TestFunction::symmetric_bump(1.0, 0),
            scale: 0.0,
        }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    #[inline]
    pub fn eval(&self, n: i64, c1: u64, c2: u64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let a = self.c1.as_ref().map_or(1.0, |f| f.eval(c1 as f64));
        let b = self.c2.as_ref().map_or(1.0, |f| f.eval(c2 as f64));
        self.scale * a * b * self.n.eval(n as f64)
    }
}

/// One truncation level of [`reindex_sum_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReindexLevel {
    pub caps: Caps,
    /// Sum over `(c1, c2, x, y, k)`.
    pub source: Complex64,
    /// Sum over `(n, r, d, c1, lambda)` with `n != 0`.
    pub target_nonzero: Complex64,
    /// The `n = 0` branch over `c1 = c2 = 0 (pq)` and `y = -x`.
    pub target_zero: Complex64,
    pub difference: f64,
    pub source_terms: u64,
    pub target_terms: u64,
    /// Largest `|G|` on lattice points just outside the caps.
    pub frontier_mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReindexReport {
    pub p: u64,
    pub q: u64,
    pub l: i64,
    pub l2: i64,
    pub levels: Vec<ReindexLevel>,
    pub tolerance: f64,
}

impl ReindexReport {
    pub fn max_difference(&self) -> f64 {
        self.levels.iter().map(|l| l.difference).fold(0.0, f64::max)
    }

    /// Whether the outermost caps contain the kernel support.
    pub fn boundary_clean(&self) -> bool {
        self.levels.last().is_some_and(|l| l.frontier_mass == 0.0)
    }

    pub fn passed(&self) -> bool {
        self.max_difference() < self.tolerance && self.boundary_clean()
    }
}

struct Pair {
    value: Complex64,
    terms: u64,
}

fn source_sum(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    l: i64,
    l2: i64,
    caps: Caps,
    kernel: &ReindexKernel,
) -> Pair {
    let (p, q) = (chi.modulus(), psi.modulus());
    let c1s: Vec<u64> = (1..=caps.c1).filter(|c| c % p == 0).collect();
    let parts: Vec<Pair> = c1s
        .par_iter()
        .map(|&c1| {
            let mut value = Complex64::new(0.0, 0.0);
            let mut terms = 0u64;
            let xs: Vec<(u64, u64)> = (0..c1)
                .filter(|&x| gcd(x, c1) == 1)
                .map(|x| (x, mod_inverse(x as i64, c1).unwrap().value()))
                .collect();
            for c2 in (1..=caps.c2).filter(|c| c % q == 0) {
                let m = (c1 * c2) as i64;
                for y in (0..c2).filter(|&y| gcd(y, c2) == 1) {
                    let yb = mod_inverse(y as i64, c2).unwrap().value();
                    for &(x, xb) in &xs {
                        let base = (c2 * x + c1 * y) as i64;
                        // n = base - k c1 c2 with |n| <= cap
                        let mut n = (base + caps.n as i64).rem_euclid(m) - caps.n as i64;
                        while n <= caps.n as i64 {
                            let g = kernel.eval(n, c1, c2);
                            terms += 1;
                            if g != 0.0 {
                                let ph = Phase::new(l as i128 * xb as i128, c1 as i128)
                                    + Phase::new(l2 as i128 * yb as i128, c2 as i128);
                                value += chi.value_u(xb) * psi.value_u(yb) * ph.to_complex() * g;
                            }
                            n += m;
                        }
                    }
                }
            }
            Pair { value, terms }
        })
        .collect();
    parts.into_iter().fold(
        Pair {
            value: Complex64::new(0.0, 0.0),
            terms: 0,
        },
        |a, b| Pair {
            value: a.value + b.value,
            terms: a.terms + b.terms,
        },
    )
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

fn target_nonzero(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    l: i64,
    l2: i64,
    caps: Caps,
    kernel: &ReindexKernel,
) -> Result<Pair, ReparamError> {
    let (p, q) = (chi.modulus(), psi.modulus());
    let ns: Vec<i64> = (-(caps.n as i64)..=caps.n as i64).filter(|&n| n != 0).collect();
    let parts: Vec<Result<Pair, ReparamError>> = ns
        .par_iter()
        .map(|&n| {
            let nn = n.unsigned_abs();
            let mut value = Complex64::new(0.0, 0.0);
            let mut terms = 0u64;
            for r in (0..nn).filter(|&r| gcd(r, nn) == 1) {
                let rb = mod_inverse(r as i64, nn).unwrap().value() as i64;
                let r = r as i64;
                let base_phase = Phase::new((l as i128) * r as i128 + (l2 as i128) * rb as i128, n as i128);
                for d in divisors(nn) {
                    let m = n / d as i64; // n / d, signed
                    let cap2 = (caps.c2 / d) as i64;
                    if cap2 == 0 {
                        continue;
                    }
                    for c1p in 1..=caps.c1 / d {
                        if gcd(c1p, nn / d) != 1 || (d * c1p) % p != 0 {
                            continue;
                        }
                        let a = c1p as i64 * r;
                        // c2' = -(a + lambda m) must lie in [1, cap2]
                        let (lo, hi) = if m > 0 {
                            (ceil_div(-(cap2 + a), m), floor_div(-(1 + a), m))
                        } else {
                            let mm = -m;
                            (ceil_div(1 + a, mm), floor_div(cap2 + a, mm))
                        };
                        for edge in [lo - 1, hi + 1] {
                            let c2p = -(a + edge * m);
                            if (1..=cap2).contains(&c2p) {
                                return Err(ReparamError::TruncationMismatch { c1: d * c1p, n });
                            }
                        }
                        for lambda in lo..=hi {
                            let c2p = -(a + lambda * m);
                            if gcd_i(lambda, (c1p * d) as i64) != 1 || (d * c2p as u64) % q != 0 {
                                continue;
                            }
                            let (c1, c2) = (d * c1p, d * c2p as u64);
                            debug_assert_eq!(gcd(c1, c2), d);
                            terms += 1;
                            let g = kernel.eval(n, c1, c2);
                            if g == 0.0 {
                                continue;
                            }
                            let (c1i, c2i) = (c1 as i128, c2 as i128);
                            let xb = (c2i + c1i * r as i128) / n as i128;
                            let yb = (c1i + c2i * rb as i128) / n as i128;
                            let ph = base_phase
                                + Phase::new(
                                    l as i128 * c2i * c2i + l2 as i128 * c1i * c1i,
                                    n as i128 * c1i * c2i,
                                );
                            value += chi.value(xb as i64) * psi.value(yb as i64) * ph.to_complex() * g;
                        }
                    }
                }
            }
            Ok(Pair { value, terms })
        })
        .collect();
    let mut total = Pair {
        value: Complex64::new(0.0, 0.0),
        terms: 0,
    };
    for part in parts {
        let part = part?;
        total.value += part.value;
        total.terms += part.terms;
    }
    Ok(total)
}

fn target_zero(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    l: i64,
    l2: i64,
    caps: Caps,
    kernel: &ReindexKernel,
) -> Pair {
    let pq = crate::arith::lcm(chi.modulus(), psi.modulus());
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    let mut c = pq;
    while c <= caps.c1.min(caps.c2) {
        let g = kernel.eval(0, c, c);
        for cl in zero_n_classify(c, c).expect("positive moduli") {
            terms += 1;
            if g != 0.0 {
                let xb = cl.x_inverse() as i64;
                let ph = Phase::new((l - l2) as i128 * xb as i128, c as i128);
                value += chi.value(xb) * psi.value(-xb) * ph.to_complex() * g;
            }
        }
        c += pq;
    }
    Pair { value, terms }
}

fn frontier_mass(p: u64, q: u64, caps: Caps, kernel: &ReindexKernel) -> f64 {
    let mut worst: f64 = 0.0;
    let n_ext = 2 * caps.n as i64 + 2;
    for c1 in (p..=2 * caps.c1 + p).step_by(p as usize) {
        for c2 in (q..=2 * caps.c2 + q).step_by(q as usize) {
            let inside = c1 <= caps.c1 && c2 <= caps.c2;
            for n in -n_ext..=n_ext {
                if inside && n.unsigned_abs() <= caps.n {
                    continue;
                }
                worst = worst.max(kernel.eval(n, c1, c2).abs());
            }
        }
    }
    worst
}

/// Compares the double Kloosterman sum over `(c1, c2, x, y, k)` with its
/// reorganization over `(n, r, d, c1, lambda)` plus the `n = 0` branch, at
/// each truncation level.
///
/// `chi` and `psi` are characters modulo distinct primes `p` and `q`; `c1`
/// runs over multiples of `p` and `c2` over multiples of `q`.
pub fn reindex_sum_check(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    l: i64,
    l2: i64,
    caps: &[Caps],
    kernel: &ReindexKernel,
    tolerance: f64,
) -> Result<ReindexReport, ReparamError> {
    let (p, q) = (chi.modulus(), psi.modulus());
    if p == q || !is_prime(p) || !is_prime(q) {
        return Err(ReparamError::BadParameters("p and q must be distinct primes"));
    }
    if caps.is_empty() {
        return Err(ReparamError::BadParameters("at least one truncation level"));
    }
    let mut levels = Vec::with_capacity(caps.len());
    for &cap in caps {
        let src = source_sum(chi, psi, l, l2, cap, kernel);
        let tn = target_nonzero(chi, psi, l, l2, cap, kernel)?;
        let tz = target_zero(chi, psi, l, l2, cap, kernel);
        levels.push(ReindexLevel {
            caps: cap,
            source: src.value,
            target_nonzero: tn.value,
            target_zero: tz.value,
            difference: (src.value - tn.value - tz.value).norm(),
            source_terms: src.terms,
            target_terms: tn.terms + tz.terms,
            frontier_mass: frontier_mass(p, q, cap, kernel),
        });
    }
    Ok(ReindexReport {
        p,
        q,
        l,
        l2,
        levels,
        tolerance,
    })
}
