//! Integer helpers: gcd, inverses, symbols, Möbius, factorization.

use serde::{Deserialize, Serialize};

use super::ArithError;

/// Default upper bound on moduli accepted by symbol computations.
pub const SYMBOL_LIMIT: u64 = 1_000_000;

/// A residue class `value mod modulus` with `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Reduces `a` into `[0, modulus)`.
    pub fn new(a: i64, modulus: u64) -> Self {
        assert!(modulus > 0, "residue modulus must be positive");
        Residue {
            value: rem_euclid(a, modulus),
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

/// `a mod m` as a value in `[0, m)`, for signed `a`.
#[inline]
pub fn rem_euclid(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

#[inline]
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of the absolute values.
#[inline]
pub fn gcd_i(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Returns `(g, x, y)` with `a x + b y = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `c`.
pub fn mod_inverse(a: i64, c: u64) -> Result<Residue, ArithError> {
    if c == 0 {
        return Err(ArithError::ZeroModulus);
    }
    if c == 1 {
        return Ok(Residue::new(0, 1));
    }
    let ar = rem_euclid(a, c);
    let (g, x, _) = ext_gcd(ar as i128, c as i128);
    if g != 1 {
        return Err(ArithError::NonInvertible { a, modulus: c });
    }
    Ok(Residue {
        value: x.rem_euclid(c as i128) as u64,
        modulus: c,
    })
}

/// Multiplies modulo `m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> Result<i8, ArithError> {
    if n % 2 == 0 {
        return Err(ArithError::EvenModulus(n));
    }
    if n > SYMBOL_LIMIT * SYMBOL_LIMIT {
        return Err(ArithError::Overflow { modulus: n });
    }
    let mut a = rem_euclid(a, n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let f = factorize(n);
    f.len() == 1 && f[0].1 == 1
}

/// Möbius function.
pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn totient(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, k) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Primes up to and including `n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

/// Number of primes `<= x`.
pub fn prime_pi(x: u64) -> usize {
    primes_up_to(x).len()
}

/// Largest integer whose square is `<= n`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Multiplicative order of `a` modulo `m` (requires `gcd(a, m) = 1`).
pub fn mult_order(a: u64, m: u64) -> u64 {
    let lam = totient(m);
    let mut ord = lam;
    for (p, _) in factorize(lam) {
        while ord % p == 0 && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

/// Smallest primitive root modulo `m`, when `(Z/m)^*` is cyclic.
pub fn primitive_root(m: u64) -> Option<u64> {
    if m == 1 || m == 2 {
        return Some(1);
    }
    let phi = totient(m);
    (2..m).find(|&g| gcd(g, m) == 1 && mult_order(g, m) == phi)
}

/// `f_n(m) = sum_{b | (m, n)} mu(n / b) b`; the Ramanujan sum `c_n(m)`.
pub fn ramanujan_f(n: u64, m: i64) -> i64 {
    assert!(n >= 1, "ramanujan_f needs n >= 1");
    let g = if m == 0 { n } else { gcd(n, m.unsigned_abs()) };
    divisors(g)
        .into_iter()
        .map(|b| mobius(n / b) as i64 * b as i64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 7).unwrap().value(), 1);
        assert_eq!(mod_inverse(2, 5).unwrap().value(), 3);
        assert_eq!(mod_inverse(3, 7).unwrap().value(), 5);
        assert_eq!(mod_inverse(-2, 5).unwrap().value(), 2);
        assert!(matches!(
            mod_inverse(4, 6),
            Err(ArithError::NonInvertible { .. })
        ));
    }

    #[test]
    fn inverse_exhaustive() {
        for c in 1..60u64 {
            for a in -70i64..70 {
                match mod_inverse(a, c) {
                    Ok(b) => assert_eq!(rem_euclid(a * b.value() as i64, c), 1 % c),
                    Err(_) => assert!(gcd_i(a, c as i64) > 1),
                }
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(1, 3).unwrap(), 1);
        assert_eq!(jacobi(2, 3).unwrap(), -1);
        assert_eq!(jacobi(-4, 5).unwrap(), 1);
        assert_eq!(jacobi(6, 9).unwrap(), 0);
        assert!(matches!(jacobi(3, 8), Err(ArithError::EvenModulus(8))));
    }

    #[test]
    fn jacobi_matches_square_detection() {
        for p in primes_up_to(100).into_iter().filter(|&p| p > 2) {
            let squares: Vec<bool> = {
                let mut s = vec![false; p as usize];
                for x in 1..p {
                    s[(x * x % p) as usize] = true;
                }
                s
            };
            for a in 0..p {
                let want = if a == 0 {
                    0
                } else if squares[a as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(jacobi(a as i64, p).unwrap(), want, "({a}/{p})");
            }
        }
    }

    #[test]
    fn jacobi_multiplicative_in_modulus() {
        for m in (1..60u64).step_by(2) {
            for n in (1..60u64).step_by(2) {
                for a in -20i64..20 {
                    assert_eq!(
                        jacobi(a, m * n).unwrap(),
                        jacobi(a, m).unwrap() * jacobi(a, n).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
    }

    #[test]
    fn ramanujan_examples() {
        for m in -5..20 {
            assert_eq!(ramanujan_f(1, m), 1);
        }
        assert_eq!(ramanujan_f(2, 3), -1);
        assert_eq!(ramanujan_f(6, 4), -1);
    }

    #[test]
    fn ramanujan_is_multiplicative_in_n() {
        for n1 in 1..=100u64 {
            for n2 in 1..=(100 / n1) {
                if gcd(n1, n2) != 1 {
                    continue;
                }
                for m in -12i64..=12 {
                    assert_eq!(
                        ramanujan_f(n1 * n2, m),
                        ramanujan_f(n1, m) * ramanujan_f(n2, m)
                    );
                }
            }
        }
    }

    #[test]
    fn divisors_and_totient() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(totient(8), 4);
        assert_eq!(totient(1), 1);
        assert_eq!(primitive_root(7), Some(3));
        assert_eq!(primitive_root(8), None);
        assert_eq!(prime_pi(10), 4);
        assert_eq!(isqrt(99), 9);
    }
}
