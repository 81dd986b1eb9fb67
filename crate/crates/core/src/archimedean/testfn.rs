//! The canonical smooth bump `exp(-1/(1 - u^2))` and its affine copies.

use serde::{Deserialize, Serialize};

use super::ArchError;

/// `b(u) = exp(-1 / (1 - u^2))` on `(-1, 1)`, zero elsewhere.
#[inline]
pub fn bump_profile(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// Polynomials `p_k` with `b^{(k)}(u) = p_k(u) (1 - u^2)^{-2k} b(u)`.
///
/// `p_{k+1} = (1 - u^2)^2 p_k' + 4 k u (1 - u^2) p_k - 2 u p_k`.
fn derivative_polys(order: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    for k in 0..order {
        let p = &out[k];
        let mut next = vec![0.0; p.len() + 3];
        // (1 - 2u^2 + u^4) p'
        for (i, &c) in p.iter().enumerate().skip(1) {
            let d = c * i as f64;
            next[i - 1] += d;
            next[i + 1] -= 2.0 * d;
            next[i + 3] += d;
        }
        // 4k u (1 - u^2) p - 2u p
        for (i, &c) in p.iter().enumerate() {
            next[i + 1] += (4.0 * k as f64 - 2.0) * c;
            next[i + 3] -= 4.0 * k as f64 * c;
        }
        while next.len() > 1 && *next.last().unwrap() == 0.0 {
            next.pop();
        }
        out.push(next);
    }
    out
}

fn horner(p: &[f64], u: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Bump,
}

/// `x -> b((x - center) / width)`, supported in `[center - width, center + width]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub family: Family,
    center: f64,
    width: f64,
    order: usize,
    #[serde(skip)]
    polys: Vec<Vec<f64>>,
}

impl TestFunction {
    /// A bump with derivatives available up to `order`. The support must lie
    /// in `(0, inf)`.
    pub fn bump(center: f64, width: f64, order: usize) -> Result<Self, ArchError> {
        if !(width > 0.0) || !(center - width >= 0.0) || !center.is_finite() {
            return Err(ArchError::BadSupport { center, width });
        }
        Ok(TestFunction {
            family: Family::Bump,
            center,
            width,
            order,
            polys: derivative_polys(order),
        })
    }

    /// Same family on an arbitrary interval, for kernels over signed
    /// variables. Not a valid `V` or `W`.
    pub fn symmetric_bump(width: f64, order: usize) -> Self {
        TestFunction {
            family: Family::Bump,
            center: 0.0,
            width,
            order,
            polys: derivative_polys(order),
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        bump_profile((x - self.center) / self.width)
    }

    /// `k`-th derivative; `k` may not exceed the smoothness order.
    pub fn derivative(&self, k: usize, x: f64) -> Result<f64, ArchError> {
        if k > self.order {
            return Err(ArchError::OrderTooHigh {
                requested: k,
                order: self.order,
            });
        }
        let u = (x - self.center) / self.width;
        if u.abs() >= 1.0 {
            return Ok(0.0);
        }
        let g = 1.0 - u * u;
        let b = (-1.0 / g).exp();
        if b == 0.0 {
            return Ok(0.0);
        }
        let v = horner(&self.polys[k], u) * b / g.powi(2 * k as i32);
        Ok(v / self.width.powi(k as i32))
    }
}

/// A real function with compact support in `(0, inf)`, as taken by the
/// integral transforms.
pub trait CompactWeight: Sync {
    fn eval(&self, x: f64) -> f64;
    /// Closed support, or `None` for the zero function.
    fn support(&self) -> Option<(f64, f64)>;
}

impl CompactWeight for TestFunction {
    fn eval(&self, x: f64) -> f64 {
        TestFunction::eval(self, x)
    }

    fn support(&self) -> Option<(f64, f64)> {
        Some(TestFunction::support(self))
    }
}

/// A finite linear combination of bumps; the empty combination is zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BumpCombination {
    pub terms: Vec<(f64, TestFunction)>,
}

impl BumpCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn plus(mut self, coefficient: f64, f: TestFunction) -> Self {
        self.terms.push((coefficient, f));
        self
    }
}

impl CompactWeight for BumpCombination {
    fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.eval(x)).sum()
    }

    fn support(&self) -> Option<(f64, f64)> {
        self.terms
            .iter()
            .filter(|(c, _)| *c != 0.0)
            .map(|(_, f)| f.support())
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_polys() {
        let p = derivative_polys(2);
        assert_eq!(p[1], vec![0.0, -2.0]);
        // p_2 = -2 (1 - u^2)^2 + (4u(1 - u^2) - 2u)(-2u) = 6u^4 - 2
        assert_eq!(p[2], vec![-2.0, 0.0, 0.0, 0.0, 6.0]);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = TestFunction::bump(2.0, 1.0, 5).unwrap();
        let h = 1e-5;
        for &x in &[1.3, 1.8, 2.0, 2.4, 2.7] {
            for k in 0..4 {
                let fd = (f.derivative(k, x + h).unwrap() - f.derivative(k, x - h).unwrap()) / (2.0 * h);
                let d = f.derivative(k + 1, x).unwrap();
                assert!((fd - d).abs() < 1e-5 * (1.0 + d.abs()), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn support_checks() {
        assert!(TestFunction::bump(1.0, 2.0, 2).is_err());
        let f = TestFunction::bump(3.0, 1.0, 2).unwrap();
        assert_eq!(f.eval(1.9), 0.0);
        assert!(f.eval(3.0) > 0.0);
        assert!(f.derivative(3, 3.0).is_err());
    }
}
