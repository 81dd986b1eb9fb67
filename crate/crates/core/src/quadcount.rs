//! Root counts of `a x^2 - m x + b` modulo `n` and the Euler products built
//! from them.
//!
//! For an odd prime `p` not dividing `a` or `D = m^2 - 4ab`, the count is
//! `1 + (D/p)` and is stable under Hensel lifting to `p^k`. Primes dividing
//! `2aD` (or the modulus of the twisting character) form the exceptional set
//! `S`, where local factors are summed numerically from exact counts.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, gcd_i, jacobi, mobius, primes_up_to, DirichletCharacter};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("series diverges: real part {re} of {what} is not above {bound}")]
    Divergent {
        what: &'static str,
        re: f64,
        bound: f64,
    },
    #[error("discriminant m^2 - 4ab vanishes")]
    ZeroDiscriminant,
    #[error("invalid parameters: {0}")]
    BadParameters(&'static str),
}

/// Arguments of `nu_b(n, m, a) = #{x mod n : a x^2 - m x + b = 0 (mod n)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadCountQuery {
    pub n: u64,
    pub m: i64,
    pub a: i64,
    pub b: i64,
}

impl QuadCountQuery {
    pub fn new(n: u64, m: i64, a: i64, b: i64) -> Result<Self, QuadError> {
        if n == 0 {
            return Err(QuadError::BadParameters("modulus must be positive"));
        }
        Ok(QuadCountQuery { n, m, a, b })
    }

    /// `m^2 - 4ab`.
    pub fn discriminant(&self) -> i64 {
        discriminant(self.m, self.a, self.b)
    }
}

pub fn discriminant(m: i64, a: i64, b: i64) -> i64 {
    m * m - 4 * a * b
}

fn poly_mod(x: u64, n: u64, m: i64, a: i64, b: i64) -> u64 {
    let n = n as i128;
    let x = x as i128;
    let v = (a as i128 * x % n * x - m as i128 * x + b as i128).rem_euclid(n);
    v as u64
}

/// Exact count by enumerating every residue.
pub fn nu_brute(q: &QuadCountQuery) -> u64 {
    (0..q.n)
        .filter(|&x| poly_mod(x, q.n, q.m, q.a, q.b) == 0)
        .count() as u64
}

/// Count modulo `p^k` by lifting roots one power at a time.
pub fn nu_prime_power(p: u64, k: u32, m: i64, a: i64, b: i64) -> u64 {
    let mut roots: Vec<u64> = vec![0];
    let mut modulus = 1u64;
    for _ in 0..k {
        let next = modulus * p;
        let mut lifted = Vec::new();
        for &r in &roots {
            for t in 0..p {
                let x = r + t * modulus;
                if poly_mod(x, next, m, a, b) == 0 {
                    lifted.push(x);
                }
            }
        }
        roots = lifted;
        modulus = next;
        if roots.is_empty() {
            break;
        }
    }
    roots.len() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Product of `1 + (D/p)` over all prime powers.
    Formula,
    /// Formula where it applies, exact counts at primes dividing `D`.
    FormulaWithExactFactors,
    /// `gcd(2a, n) > 1`: full enumeration.
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuCount {
    pub count: u64,
    pub provenance: Provenance,
}

/// `nu_b(n, m, a)` as a product of local counts `1 + (D/p)`.
pub fn nu_fast(q: &QuadCountQuery) -> NuCount {
    if gcd_i(2 * q.a, q.n as i64) != 1 {
        return NuCount {
            count: nu_brute(q),
            provenance: Provenance::BruteForce,
        };
    }
    let delta = q.discriminant();
    let mut count = 1u64;
    let mut provenance = Provenance::Formula;
    for (p, k) in factorize(q.n) {
        let sym = jacobi(delta, p).expect("p is odd");
        if sym == 0 {
            provenance = Provenance::FormulaWithExactFactors;
            count *= nu_prime_power(p, k, q.m, q.a, q.b);
        } else {
            count *= (1 + sym) as u64;
        }
        if count == 0 {
            break;
        }
    }
    NuCount { count, provenance }
}

/// A character value that is either exactly `0, 1, -1` or a general complex unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharValue(pub Complex64);

impl CharValue {
    fn as_integer(&self) -> Option<i64> {
        let z = self.0;
        (z.im == 0.0 && (z.re == 0.0 || z.re == 1.0 || z.re == -1.0)).then_some(z.re as i64)
    }
}

/// Outcome of [`local_factor_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalFactorReport {
    pub p: u64,
    pub closed_form: Complex64,
    pub truncated: Complex64,
    pub truncation_terms: u32,
    pub float_residual: f64,
    /// Exact rational comparison, available for integer `r` and real
    /// character values.
    pub exact_equal: Option<bool>,
    pub tolerance: f64,
}

impl LocalFactorReport {
    pub fn passed(&self) -> bool {
        self.float_residual < self.tolerance && self.exact_equal != Some(false)
    }
}

/// Checks `1 + sum_{k>=1} (1 + D_sym) psi^k / p^{kr} = (1 + psi D_sym p^{-r}) / (1 - psi p^{-r})`.
pub fn local_factor_check(
    p: u64,
    psi: CharValue,
    delta_sym: i8,
    r: Complex64,
    tolerance: f64,
) -> Result<LocalFactorReport, QuadError> {
    if r.re <= 0.0 {
        return Err(QuadError::Divergent {
            what: "r",
            re: r.re,
            bound: 0.0,
        });
    }
    if !(-1..=1).contains(&delta_sym) || p < 2 {
        return Err(QuadError::BadParameters("need a prime p and a symbol in {-1, 0, 1}"));
    }
    let nu = (1 + delta_sym) as f64;
    let x = psi.0 * Complex64::new(p as f64, 0.0).powc(-r);
    let closed_form = (1.0 + x * delta_sym as f64) / (1.0 - x);
    let mut truncated = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k < 10_000 {
        k += 1;
        term *= x;
        truncated += term * nu;
        if term.norm() * nu.max(1.0) < 1e-18 {
            break;
        }
    }
    let exact_equal = match (psi.as_integer(), r.im == 0.0 && r.re.fract() == 0.0) {
        (Some(c), true) if r.re <= 64.0 => {
            let pr = BigInt::from(p).pow(r.re as u32);
            let x = BigRational::new(BigInt::from(c), pr);
            let one = BigRational::one();
            let nu = BigRational::from_integer(BigInt::from(1 + delta_sym as i64));
            let ds = BigRational::from_integer(BigInt::from(delta_sym as i64));
            let series = &one + nu * &x / (&one - &x);
            let closed = (&one + ds * &x) / (&one - &x);
            Some(series == closed)
        }
        _ => None,
    };
    Ok(LocalFactorReport {
        p,
        closed_form,
        truncated,
        truncation_terms: k,
        float_residual: (closed_form - truncated).norm(),
        exact_equal,
        tolerance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerKind {
    /// `sum mu(e) chi(e) nu(e) e^{-(s1 + 2 s2 + 1 + w)}`.
    ESum,
    /// `sum_{n >= 1} conj(psi)(n) nu(n) n^{-(s2 + 1 + w)}`.
    NSum,
    /// `sum mu^2(b) chi(b) nu(b) b^{-(s1 + 2 s2 + 1 + w)}`.
    BSum,
    /// `sum_{a, d} mu(a) nu(ad) (ad)^{-(s1 + s2 + 1 + w)}`.
    AdCancel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SArgs {
    pub s1: Complex64,
    pub s2: Complex64,
    pub w: Complex64,
}

impl SArgs {
    pub fn real(s1: f64, s2: f64, w: f64) -> Self {
        SArgs {
            s1: Complex64::new(s1, 0.0),
            s2: Complex64::new(s2, 0.0),
            w: Complex64::new(w, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Dirichlet series terms `n <= terms`.
    pub terms: u64,
    /// Euler product over primes `<= primes`.
    pub primes: u64,
}

impl Truncation {
    pub fn doubled(&self) -> Self {
        Truncation {
            terms: self.terms * 2,
            primes: self.primes * 2,
        }
    }
}

/// The quadratic `a x^2 - m x + b` whose counts weight the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadratic {
    pub m: i64,
    pub a: i64,
    pub b: i64,
}

impl Quadratic {
    pub fn discriminant(&self) -> i64 {
        discriminant(self.m, self.a, self.b)
    }
}

impl EulerKind {
    /// Exponent of the series for this kind.
    pub fn exponent(&self, s: &SArgs) -> Complex64 {
        match self {
            EulerKind::ESum | EulerKind::BSum => s.s1 + 2.0 * s.s2 + 1.0 + s.w,
            EulerKind::NSum => s.s2 + 1.0 + s.w,
            EulerKind::AdCancel => s.s1 + s.s2 + 1.0 + s.w,
        }
    }

    fn check_region(&self, s: &SArgs) -> Result<(), QuadError> {
        let (what, re) = match self {
            EulerKind::ESum | EulerKind::BSum => ("s1 + 2 s2 + w", (s.s1 + 2.0 * s.s2 + s.w).re),
            EulerKind::NSum => ("s2 + w", (s.s2 + s.w).re),
            EulerKind::AdCancel => ("s1 + s2 + w", (s.s1 + s.s2 + s.w).re),
        };
        if re > 1.0 {
            Ok(())
        } else {
            Err(QuadError::Divergent {
                what,
                re,
                bound: 1.0,
            })
        }
    }
}

/// Exact local counts `nu(p^k)`, cached per prime power.
struct NuTable {
    quad: Quadratic,
    delta: i64,
    cache: HashMap<(u64, u32), u64>,
}

impl NuTable {
    fn new(quad: Quadratic) -> Self {
        NuTable {
            quad,
            delta: quad.discriminant(),
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, p: u64, k: u32) -> u64 {
        if k == 0 {
            return 1;
        }
        let Quadratic { m, a, b } = self.quad;
        let delta = self.delta;
        *self.cache.entry((p, k)).or_insert_with(|| {
            if p != 2 && gcd_i(a, p as i64) == 1 && gcd_i(delta, p as i64) == 1 {
                (1 + jacobi(delta, p).expect("odd")) as u64
            } else {
                nu_prime_power(p, k, m, a, b)
            }
        })
    }
}

/// Local coefficient `c(p^k)` of the series of each kind.
fn local_coefficient(
    kind: EulerKind,
    p: u64,
    k: u32,
    nu: &mut NuTable,
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    match kind {
        EulerKind::ESum => {
            if k == 1 {
                -chi.value_u(p) * nu.get(p, 1) as f64
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        EulerKind::BSum => {
            if k == 1 {
                chi.value_u(p) * nu.get(p, 1) as f64
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        EulerKind::NSum => psi.value_u(p).conj().powu(k) * nu.get(p, k) as f64,
        // sum over a | p^k of mu(a) nu(p^k) vanishes for k >= 1
        EulerKind::AdCancel => Complex64::new(0.0, 0.0),
    }
}

fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// `sum_k c(p^k) p^{-ks}` until terms drop below `1e-18`.
fn numeric_local_sum(
    kind: EulerKind,
    p: u64,
    s: Complex64,
    nu: &mut NuTable,
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
) -> Complex64 {
    let ps = Complex64::new(p as f64, 0.0).powc(-s);
    let mut total = Complex64::new(1.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut pk = 1u128;
    for k in 1..200u32 {
        pow *= ps;
        pk *= p as u128;
        // nu(p^k) <= 2 p^{k/2} for p not dividing everything; stop on tiny terms
        if pow.norm() * (pk as f64).sqrt() * 2.0 < 1e-18 || pk > 10_000_000 {
            break;
        }
        total += local_coefficient(kind, p, k, nu, chi, psi) * pow;
    }
    total
}

/// Closed local factor at a prime outside `S`, with `D_sym = (D/p)`.
fn closed_local(kind: EulerKind, x_chi: Complex64, x_psi: Complex64, dsym: f64) -> Complex64 {
    match kind {
        EulerKind::ESum => 1.0 - x_chi * (1.0 + dsym),
        EulerKind::BSum => {
            let y = x_chi * (1.0 + dsym);
            (1.0 - y * y) / (1.0 - y)
        }
        EulerKind::NSum => (1.0 + x_psi * dsym) / (1.0 - x_psi),
        EulerKind::AdCancel => Complex64::new(1.0, 0.0),
    }
}

/// Alternative closed forms of the local factors, evaluated for comparison
/// only.
fn displayed_local(kind: EulerKind, chi_p: Complex64, psi_p: Complex64, p: f64, s: &SArgs, dsym: f64) -> Option<Complex64> {
    let pc = Complex64::new(p, 0.0);
    match kind {
        EulerKind::ESum => {
            let x = chi_p * pc.powc(-(s.s1 + 2.0 * s.s2 + s.w));
            Some((1.0 - x) / (1.0 + x * dsym))
        }
        EulerKind::BSum => {
            let top = chi_p * chi_p * (1.0 + dsym).powi(2) * pc.powc(-(2.0 * s.s1 + 4.0 * s.s2 + 1.0 + 2.0 * s.w));
            let bot = chi_p * (1.0 + dsym) * pc.powc(-(s.s1 + 2.0 * s.s2 + 1.0 + s.w));
            Some((1.0 - top) / (1.0 - bot))
        }
        EulerKind::NSum => {
            let x = psi_p.conj() * pc.powc(-(s.s2 + 1.0 + s.w));
            Some((1.0 + x * dsym) / (1.0 - x))
        }
        EulerKind::AdCancel => None,
    }
}

/// Extra diagnostics for the `a`/`d` cancellation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdCancelReport {
    /// Every coupled local polynomial `sum_{j+k=n} mu(p^j) nu(p^{j+k})` is
    /// exactly `1` at `n = 0` and `0` above, for all primes checked.
    pub coupled_exact: bool,
    pub primes_checked: usize,
    /// Largest `|a-local * d-local - 1|` when the sums are factored
    /// separately as `nu(a) nu(d)`. Diagnostic only.
    pub separate_product_deviation: f64,
}

/// Outcome of [`euler_product_eval`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EulerReport {
    pub kind: EulerKind,
    pub exponent: Complex64,
    pub delta: i64,
    pub truncation: Truncation,
    /// Truncated Dirichlet series.
    pub series: Complex64,
    /// Closed local factors outside `S` times numeric local sums on `S`.
    pub product: Complex64,
    pub residual: f64,
    /// Primes of `S` and their numerically summed local factors.
    pub s_factors: Vec<(u64, Complex64)>,
    /// `series / prod_{p not in S} closed local factor`; should match the
    /// product of `s_factors`.
    pub s_factor_ratio: Complex64,
    /// Residual of the displayed product forms against the series.
    pub displayed_form_residual: Option<f64>,
    pub ad_cancel: Option<AdCancelReport>,
    pub tolerance: f64,
}

impl EulerReport {
    pub fn passed(&self) -> bool {
        self.residual < self.tolerance && self.ad_cancel.as_ref().is_none_or(|a| a.coupled_exact)
    }

    pub fn s_product(&self) -> Complex64 {
        self.s_factors.iter().map(|(_, v)| *v).product()
    }
}

/// Primes in the exceptional set for `quad` and the twisting moduli.
pub fn exceptional_primes(quad: &Quadratic, moduli: &[u64]) -> Vec<u64> {
    let mut ps: Vec<u64> = vec![2];
    for v in [quad.discriminant().unsigned_abs(), quad.a.unsigned_abs()]
        .into_iter()
        .chain(moduli.iter().copied())
    {
        ps.extend(factorize(v).into_iter().map(|(p, _)| p));
    }
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// Compares a truncated Dirichlet series with its truncated Euler product.
pub fn euler_product_eval(
    kind: EulerKind,
    s: SArgs,
    quad: Quadratic,
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    trunc: Truncation,
    tolerance: f64,
) -> Result<EulerReport, QuadError> {
    kind.check_region(&s)?;
    let delta = quad.discriminant();
    if delta == 0 {
        return Err(QuadError::ZeroDiscriminant);
    }
    if quad.a == 0 {
        return Err(QuadError::BadParameters("a must be nonzero"));
    }
    if trunc.terms < 1 || trunc.primes < 2 {
        return Err(QuadError::BadParameters("truncation too small"));
    }
    let exponent = kind.exponent(&s);
    let mut nu = NuTable::new(quad);
    let s_primes = exceptional_primes(&quad, &[chi.modulus(), psi.modulus()]);

    // Series via multiplicative coefficients.
    let n = trunc.terms as usize;
    let spf = smallest_prime_factors(n);
    let mut coef = vec![Complex64::new(0.0, 0.0); n + 1];
    if n >= 1 {
        coef[1] = Complex64::new(1.0, 0.0);
    }
    let mut series = if n >= 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    for i in 2..=n {
        let p = spf[i] as usize;
        let mut rest = i;
        let mut k = 0u32;
        let mut pk = 1usize;
        while rest % p == 0 {
            rest /= p;
            pk *= p;
            k += 1;
        }
        let c = if rest == 1 {
            local_coefficient(kind, p as u64, k, &mut nu, chi, psi)
        } else {
            coef[pk] * coef[rest]
        };
        coef[i] = c;
        if c != Complex64::new(0.0, 0.0) {
            series += c * (-exponent * (i as f64).ln()).exp();
        }
    }

    let mut outside = Complex64::new(1.0, 0.0);
    let mut displayed = Complex64::new(1.0, 0.0);
    for p in primes_up_to(trunc.primes) {
        if s_primes.binary_search(&p).is_ok() {
            continue;
        }
        let dsym = jacobi(delta, p).expect("odd") as f64;
        let ps = Complex64::new(p as f64, 0.0).powc(-exponent);
        let x_chi = chi.value_u(p) * ps;
        let x_psi = psi.value_u(p).conj() * ps;
        outside *= closed_local(kind, x_chi, x_psi, dsym);
        if let Some(d) = displayed_local(kind, chi.value_u(p), psi.value_u(p), p as f64, &s, dsym) {
            displayed *= d;
        }
    }
    let s_factors: Vec<(u64, Complex64)> = s_primes
        .iter()
        .map(|&p| (p, numeric_local_sum(kind, p, exponent, &mut nu, chi, psi)))
        .collect();
    let s_prod: Complex64 = s_factors.iter().map(|(_, v)| *v).product();
    let product = outside * s_prod;
    let displayed_form_residual = match kind {
        EulerKind::AdCancel => None,
        // The displayed e-sum carries the S-part as a reciprocal.
        EulerKind::ESum => Some((displayed / s_prod - series).norm()),
        _ => Some((displayed * s_prod - series).norm()),
    };
    let ad_cancel = (kind == EulerKind::AdCancel).then(|| {
        ad_cancel_audit(&mut nu, trunc.primes, exponent)
    });
    Ok(EulerReport {
        kind,
        exponent,
        delta,
        truncation: trunc,
        series,
        product,
        residual: (series - product).norm(),
        s_factors,
        s_factor_ratio: series / outside,
        displayed_form_residual,
        ad_cancel,
        tolerance,
    })
}

fn ad_cancel_audit(nu: &mut NuTable, prime_cap: u64, s: Complex64) -> AdCancelReport {
    const DEGREE: u32 = 4;
    let mut coupled_exact = true;
    let mut deviation: f64 = 0.0;
    let primes = primes_up_to(prime_cap);
    for &p in &primes {
        // Coupled: coefficient of X^n is sum_{j in {0,1}, j <= n} mu(p^j) nu(p^n).
        for n in 0..=DEGREE {
            let mut c: i64 = 0;
            for j in 0..=n.min(1) {
                c += mobius(p.pow(j)) as i64 * nu.get(p, n) as i64;
            }
            if c != i64::from(n == 0) {
                coupled_exact = false;
            }
        }
        // Separate: (1 - nu(p) X) * sum_k nu(p^k) X^k.
        let x = Complex64::new(p as f64, 0.0).powc(-s);
        let a_local = 1.0 - x * nu.get(p, 1) as f64;
        let mut d_local = Complex64::new(1.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 1..=12 {
            pow *= x;
            if pow.norm() < 1e-18 || p.checked_pow(k).is_none_or(|v| v > 10_000_000) {
                break;
            }
            d_local += pow * nu.get(p, k) as f64;
        }
        deviation = deviation.max((a_local * d_local - 1.0).norm());
    }
    AdCancelReport {
        coupled_exact,
        primes_checked: primes.len(),
        separate_product_deviation: deviation,
    }
}

/// Exact coupled double sum `sum_{ad <= n} mu(a) nu(ad) (ad)^{-s}` at integer
/// `s`, in rationals. Equals `1` for every `n`.
pub fn ad_coupled_exact(quad: Quadratic, n: u64, s: u32) -> BigRational {
    let mut total = BigRational::zero();
    for k in 1..=n {
        let nu_k = nu_fast(&QuadCountQuery {
            n: k,
            m: quad.m,
            a: quad.a,
            b: quad.b,
        })
        .count as i64;
        if nu_k == 0 {
            continue;
        }
        let mut w: i64 = 0;
        for a in crate::arith::divisors(k) {
            w += mobius(a) as i64;
        }
        if w != 0 {
            total += BigRational::new(BigInt::from(w * nu_k), BigInt::from(k).pow(s));
        }
    }
    total
}

/// Whether `gcd(n, 2a) = 1`, the domain of the counting formula.
pub fn formula_applies(q: &QuadCountQuery) -> bool {
    gcd(q.n, (2 * q.a).unsigned_abs()) == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{char_group, is_prime};

    fn q(n: u64, m: i64, a: i64, b: i64) -> QuadCountQuery {
        QuadCountQuery::new(n, m, a, b).unwrap()
    }

    #[test]
    fn brute_examples() {
        assert_eq!(nu_brute(&q(5, 0, 1, 1)), 2);
        assert_eq!(nu_brute(&q(3, 0, 1, 1)), 0);
        for (m, a, b) in [(0, 1, 1), (3, -2, 7), (5, 0, 0)] {
            assert_eq!(nu_brute(&q(1, m, a, b)), 1);
        }
    }

    #[test]
    fn fast_examples() {
        let r = nu_fast(&q(343, 1, 1, 1));
        assert_eq!(r.count, 2);
        assert_eq!(r.provenance, Provenance::Formula);
        assert_eq!(nu_fast(&q(15, 0, 1, 1)).count, 0);
        assert_eq!(nu_fast(&q(8, 1, 1, 1)).provenance, Provenance::BruteForce);
    }

    #[test]
    fn fast_matches_brute_small_sweep() {
        for n in (1..=151u64).step_by(2) {
            for m in 0..=10 {
                for a in [1i64, 2, 5, 7, 10] {
                    for b in [0i64, 1, 3, 9] {
                        let qq = q(n, m, a, b);
                        if !formula_applies(&qq) {
                            continue;
                        }
                        assert_eq!(nu_fast(&qq).count, nu_brute(&qq), "{qq:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn lifting_matches_brute() {
        for p in [2u64, 3, 5, 7] {
            for k in 1..=4 {
                for (m, a, b) in [(0, 1, 1), (2, 1, 1), (0, 3, 0), (6, 3, 3), (0, 0, 0), (1, 2, 3)] {
                    assert_eq!(
                        nu_prime_power(p, k, m, a, b),
                        nu_brute(&q(p.pow(k), m, a, b)),
                        "p={p} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn local_factor_examples() {
        let one = CharValue(Complex64::new(1.0, 0.0));
        let r = local_factor_check(7, one, 1, Complex64::new(2.0, 0.0), 1e-10).unwrap();
        assert!((r.closed_form.re - 25.0 / 24.0).abs() < 1e-14);
        assert_eq!(r.exact_equal, Some(true));
        assert!(r.passed());
        let r = local_factor_check(7, one, -1, Complex64::new(2.0, 0.0), 1e-10).unwrap();
        assert!((r.closed_form.re - 1.0).abs() < 1e-15);
        let w = CharValue(Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0));
        let r = local_factor_check(5, w, 1, Complex64::new(1.5, 0.0), 1e-10).unwrap();
        assert!(r.passed() && r.exact_equal.is_none());
        assert!(matches!(
            local_factor_check(5, w, 1, Complex64::new(0.0, 1.0), 1e-10),
            Err(QuadError::Divergent { .. })
        ));
    }

    fn chars() -> (DirichletCharacter, DirichletCharacter) {
        (char_group(5).unwrap()[1].clone(), char_group(7).unwrap()[2].clone())
    }

    #[test]
    fn euler_kinds_agree() {
        let (chi, psi) = chars();
        let quad = Quadratic { m: 3, a: 1, b: 1 };
        let t = Truncation {
            terms: 20_000,
            primes: 2_000,
        };
        for kind in [EulerKind::ESum, EulerKind::BSum] {
            let r = euler_product_eval(kind, SArgs::real(3.0, 1.0, 0.2), quad, &chi, &psi, t, 1e-8).unwrap();
            assert!(r.passed(), "{kind:?} {}", r.residual);
        }
        let r = euler_product_eval(EulerKind::NSum, SArgs::real(3.0, 2.0, 0.2), quad, &chi, &psi, t, 1e-8).unwrap();
        assert!(r.passed(), "n-sum {}", r.residual);
        assert!(r.displayed_form_residual.unwrap() < 1e-8);
        let r = euler_product_eval(EulerKind::AdCancel, SArgs::real(3.0, 1.0, 0.2), quad, &chi, &psi, t, 1e-8).unwrap();
        assert!(r.passed());
        assert!(r.ad_cancel.as_ref().unwrap().separate_product_deviation > 0.0);
    }

    #[test]
    fn divergent_region() {
        let (chi, psi) = chars();
        let quad = Quadratic { m: 3, a: 1, b: 1 };
        let t = Truncation { terms: 100, primes: 100 };
        assert!(matches!(
            euler_product_eval(EulerKind::NSum, SArgs::real(1.0, 0.5, 0.2), quad, &chi, &psi, t, 1e-8),
            Err(QuadError::Divergent { .. })
        ));
    }

    #[test]
    fn coupled_ad_sum_is_one() {
        let quad = Quadratic { m: 3, a: 2, b: 5 };
        for n in [1u64, 10, 60] {
            assert_eq!(ad_coupled_exact(quad, n, 2), BigRational::one());
        }
    }

    #[test]
    fn exceptional_set_contains_a() {
        let quad = Quadratic { m: 1, a: 3, b: 1 };
        let s = exceptional_primes(&quad, &[7]);
        assert!(s.contains(&3) && s.contains(&2) && s.contains(&7) && s.contains(&11));
        assert!(s.iter().all(|&p| is_prime(p)));
    }
}
