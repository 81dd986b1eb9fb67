//! Complex gamma, upper incomplete gamma and Hurwitz zeta.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `ln sin(pi z)`, stable for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    if w.im.abs() < 1.0 {
        return w.sin().ln();
    }
    let i = Complex64::i();
    if w.im > 0.0 {
        // sin w = e^{-iw} (e^{2iw} - 1) / (2i)
        -i * w + ((i * w * 2.0).exp() - 1.0).ln() - (i * 2.0).ln()
    } else {
        i * w + (1.0 - (-i * w * 2.0).exp()).ln() - (i * 2.0).ln()
    }
}

/// `ln Gamma(z)` (some branch), via Lanczos with reflection.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return c(PI.ln()) - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut a = c(LANCZOS[0]);
    for (k, &coef) in LANCZOS.iter().enumerate().skip(1) {
        a += coef / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    c(0.5 * (2.0 * PI).ln()) + (z + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Whether `z` is within `tol` of a pole `0, -1, -2, ...` of Gamma.
pub fn near_gamma_pole(z: Complex64, tol: f64) -> bool {
    z.re < 0.5 && z.im.abs() < tol && (z.re - z.re.round()).abs() < tol
}

/// Upper incomplete gamma `Gamma(z, x)` for `x > 0`.
pub fn upper_gamma(z: Complex64, x: f64) -> Complex64 {
    assert!(x > 0.0, "upper_gamma needs x > 0");
    let pref = (z * x.ln() - x).exp();
    if x > 1.0 + z.norm() {
        // Modified Lentz on the Legendre continued fraction.
        let tiny = 1e-300;
        let mut b = c(x + 1.0) - z;
        let mut cc = c(1.0 / tiny);
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..2000 {
            let an = -(i as f64) * (c(i as f64) - z);
            b += 2.0;
            d = an * d + b;
            if d.norm() < tiny {
                d = c(tiny);
            }
            cc = b + an / cc;
            if cc.norm() < tiny {
                cc = c(tiny);
            }
            d = 1.0 / d;
            let del = d * cc;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        pref * h
    } else if let Some((k, delta)) = near_pole(z) {
        upper_gamma_near_pole(k, delta, x)
    } else {
        // Gamma(z) - gamma(z, x), lower part by its power series.
        let mut term = 1.0 / z;
        let mut sum = term;
        let mut ap = z;
        for _ in 0..5000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.norm() < sum.norm() * 1e-17 {
                break;
            }
        }
        gamma(z) - pref * sum
    }
}

/// `z = -k + delta` with `|delta| < 0.1`, where `Gamma(z)` and `gamma(z, x)`
/// both carry the pole `(-1)^k / (k! delta)`.
fn near_pole(z: Complex64) -> Option<(u32, Complex64)> {
    let k = -z.re.round();
    // The alternating series loses about e^x, and x <= 1 + |z| here.
    if !(0.0..=8.0).contains(&k) {
        return None;
    }
    let delta = z + k;
    (delta.norm() < 0.1).then_some((k as u32, delta))
}

const ZETA_2_TO_10: [f64; 9] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
];
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln Gamma(1 + delta) / delta` for `|delta| < 0.1`, by its Taylor series.
fn ln_gamma_1p_over(delta: Complex64) -> Complex64 {
    let mut sum = c(-EULER_GAMMA);
    let mut power = c(1.0);
    for m in 2..=24u32 {
        power *= -delta;
        let zeta = if m <= 10 {
            ZETA_2_TO_10[(m - 2) as usize]
        } else {
            (1..=20).map(|n| (n as f64).powi(-(m as i32))).sum()
        };
        // (-1)^m delta^{m-1} = -(-delta)^{m-1}
        sum -= power * (zeta / m as f64);
    }
    sum
}

/// `ln(1 + u) / u`, accurate near 0.
fn ln1p_over(u: Complex64) -> Complex64 {
    if u.norm() < 1e-3 {
        1.0 - u / 2.0 + u * u / 3.0 - u * u * u / 4.0
    } else {
        (1.0 + u).ln() / u
    }
}

/// `Gamma(-k + delta, x)` with the pole cancelled analytically:
/// `Gamma(z) - (-1)^k/(k! delta) = (-1)^k/k! expm1(E)/delta` with
/// `E = ln Gamma(1 + delta) - sum_{j<=k} ln(1 - delta/j)`, and the `j = k`
/// term of `gamma(z, x) = x^z sum_j (-x)^j / (j! (z + j))` leaves
/// `(-1)^k/k! (1 - x^delta)/delta`.
fn upper_gamma_near_pole(k: u32, delta: Complex64, x: f64) -> Complex64 {
    let z = delta - k as f64;
    let mut e_over = ln_gamma_1p_over(delta);
    for j in 1..=k {
        e_over += ln1p_over(-delta / j as f64) / j as f64;
    }
    let e = e_over * delta;
    let lx = x.ln();
    let sign_fact = (1..=k).fold(if k % 2 == 0 { 1.0 } else { -1.0 }, |acc, j| acc / j as f64);
    let regular = sign_fact * (e_over * expm1_over(e) - lx * expm1_over(delta * lx));
    let xz = (z * lx).exp();
    let mut rest = c(0.0);
    let mut coef = 1.0;
    for j in 0..400u32 {
        if j > 0 {
            coef *= -x / j as f64;
        }
        if j != k {
            let t = coef / (z + j as f64);
            rest += t;
            if j > k && t.norm() < 1e-17 * rest.norm().max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }
    regular - xz * rest
}

const BERNOULLI_2K: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

/// `(e^z - 1) / z`, accurate near 0.
fn expm1_over(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// A Hurwitz value with its pole part separated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzValue {
    /// `zeta(s, a) - 1 / (s - 1)`.
    pub regular: Complex64,
    /// Estimated truncation and rounding error.
    pub error: f64,
}

/// `zeta(s, a) - 1/(s - 1)` by Euler-Maclaurin, finite at `s = 1`.
pub fn hurwitz_regular(s: Complex64, a: f64) -> HurwitzValue {
    assert!(a > 0.0, "Hurwitz parameter must be positive");
    let n = (s.norm() + 15.0 - a).max(10.0).ceil() as usize;
    let mut sum = c(0.0);
    let mut abs_sum = 0.0;
    for k in 0..n {
        let t = (-s * (k as f64 + a).ln()).exp();
        sum += t;
        abs_sum += t.norm();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xs = (-s * lx).exp();
    // x^{1-s}/(s-1) - 1/(s-1) = -ln x * (e^{(1-s) ln x} - 1) / ((1-s) ln x)
    let one_minus = 1.0 - s;
    sum += -lx * expm1_over(one_minus * lx);
    sum += xs * 0.5;
    // Tail corrections B_{2j}/(2j)! s(s+1)...(s+2j-2) x^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = xs / x;
    let mut last = 0.0;
    for (j, &b) in BERNOULLI_2K.iter().enumerate() {
        let term = rising * xpow * (b / fact);
        sum += term;
        last = term.norm();
        let k = 2 * j + 2;
        rising *= (s + (k - 1) as f64) * (s + k as f64);
        fact *= ((k + 1) * (k + 2)) as f64;
        xpow /= x * x;
    }
    HurwitzValue {
        regular: sum,
        error: last + 4.0 * f64::EPSILON * (abs_sum + sum.norm()),
    }
}

/// `zeta(s, a)` for `s != 1`.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Complex64 {
    hurwitz_regular(s, a).regular + 1.0 / (s - 1.0)
}
