//! Dirichlet characters as full value tables.
//!
//! Every value of a character mod `q` is a root of unity `e(k / den)` where
//! `den` is a common denominator (the exponent of the unit group for group
//! characters). Tables keep both the exact exponent `k` and the complex value,
//! so multiplicativity can be checked exactly.
//!
//! Group characters are labelled `0..phi(q)` by the lexicographic order of
//! their exponent vectors on a fixed generator set: the smallest primitive
//! root of each odd prime power component, and `-1`, `5` for `2^k` (`k >= 3`).

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::modular::{divisors, factorize, gcd, jacobi, lcm, primitive_root, rem_euclid, totient};
use super::ArithError;

/// Default upper bound for character tables.
pub const TABLE_LIMIT: u64 = 100_000;

const NON_UNIT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// A Dirichlet character modulo `modulus`.
#[derive(Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    index: Option<usize>,
    den: u32,
    exps: Arc<[u32]>,
    values: Arc<[Complex64]>,
    order: u32,
}

impl std::fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.modulus)
            .field("index", &self.index)
            .field("order", &self.order)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        if self.modulus != other.modulus {
            return false;
        }
        let l = lcm(self.den as u64, other.den as u64);
        let (sa, sb) = (l / self.den as u64, l / other.den as u64);
        self.exps.iter().zip(other.exps.iter()).all(|(&a, &b)| {
            match (a == NON_UNIT, b == NON_UNIT) {
                (true, true) => true,
                (false, false) => a as u64 * sa == b as u64 * sb,
                _ => false,
            }
        })
    }
}

fn root_table(den: u32) -> Vec<Complex64> {
    (0..den)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / den as f64))
        .collect()
}

impl DirichletCharacter {
    /// Builds a character from exponents `e(exps[n] / den)`; `None` marks
    /// non-units. Returns an error if the table is not a character.
    pub fn from_exponents(
        modulus: u64,
        den: u32,
        exps: Vec<Option<u32>>,
    ) -> Result<Self, ArithError> {
        if modulus == 0 || den == 0 {
            return Err(ArithError::ZeroModulus);
        }
        if exps.len() as u64 != modulus {
            return Err(ArithError::NotACharacter("table length differs from modulus"));
        }
        let raw: Vec<u32> = exps
            .iter()
            .map(|e| e.map_or(NON_UNIT, |k| k % den))
            .collect();
        let chi = Self::from_raw(modulus, None, den, raw);
        chi.validate()?;
        Ok(chi)
    }

    fn from_raw(modulus: u64, index: Option<usize>, den: u32, raw: Vec<u32>) -> Self {
        let roots = root_table(den);
        let values: Vec<Complex64> = raw
            .iter()
            .map(|&k| {
                if k == NON_UNIT {
                    Complex64::new(0.0, 0.0)
                } else {
                    roots[k as usize]
                }
            })
            .collect();
        let g = raw
            .iter()
            .filter(|&&k| k != NON_UNIT)
            .fold(den as u64, |acc, &k| gcd(acc, k as u64));
        let order = (den as u64 / g) as u32;
        DirichletCharacter {
            modulus,
            index,
            den,
            exps: raw.into(),
            values: values.into(),
            order,
        }
    }

    fn validate(&self) -> Result<(), ArithError> {
        let q = self.modulus;
        for n in 0..q {
            let unit = gcd(n, q) == 1;
            if unit != (self.exps[n as usize] != NON_UNIT) {
                return Err(ArithError::NotACharacter("zero pattern differs from non-units"));
            }
        }
        if self.exps[(1 % q) as usize] != 0 {
            return Err(ArithError::NotACharacter("chi(1) != 1"));
        }
        let units: Vec<u64> = (0..q).filter(|&n| gcd(n, q) == 1).collect();
        for &a in &units {
            for &b in &units {
                let ab = (a as u128 * b as u128 % q as u128) as usize;
                let lhs = (self.exps[a as usize] as u64 + self.exps[b as usize] as u64)
                    % self.den as u64;
                if lhs != self.exps[ab] as u64 {
                    return Err(ArithError::NotACharacter("not multiplicative"));
                }
            }
        }
        Ok(())
    }

    /// The principal character modulo `q`.
    pub fn principal(q: u64) -> Self {
        let raw = (0..q)
            .map(|n| if gcd(n, q) == 1 { 0 } else { NON_UNIT })
            .collect();
        Self::from_raw(q, Some(0), 1, raw)
    }

    /// The symbol `n -> (delta / n)` as a real character modulo `4|delta|`.
    ///
    /// On odd `n` coprime to `delta` this is the Jacobi symbol with `delta`
    /// on top, so it agrees with the Legendre symbol at odd primes.
    pub fn kronecker(delta: i64) -> Result<Self, ArithError> {
        if delta == 0 {
            return Err(ArithError::ZeroModulus);
        }
        let q = 4 * delta.unsigned_abs();
        if q > TABLE_LIMIT {
            return Err(ArithError::Overflow { modulus: q });
        }
        let raw = (0..q)
            .map(|n| {
                if gcd(n, q) != 1 {
                    NON_UNIT
                } else {
                    match jacobi(delta, n).expect("n is odd") {
                        1 => 0,
                        _ => 1,
                    }
                }
            })
            .collect();
        Ok(Self::from_raw(q, None, 2, raw))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Position in [`char_group`] order, for group characters.
    pub fn index(&self) -> Option<usize> {
        self.index
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Common denominator of the exponent table.
    pub fn denominator(&self) -> u32 {
        self.den
    }

    #[inline]
    pub fn value(&self, n: i64) -> Complex64 {
        self.values[rem_euclid(n, self.modulus) as usize]
    }

    #[inline]
    pub fn value_u(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    /// Exact exponent `k` with `chi(n) = e(k / den)`, or `None` off the units.
    pub fn exponent(&self, n: i64) -> Option<u32> {
        let k = self.exps[rem_euclid(n, self.modulus) as usize];
        (k != NON_UNIT).then_some(k)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn parity(&self) -> Parity {
        match self.exponent(-1) {
            Some(0) | None => Parity::Even,
            Some(_) => Parity::Odd,
        }
    }

    /// Whether all values are real (`order <= 2`).
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn conj(&self) -> Self {
        let raw = self
            .exps
            .iter()
            .map(|&k| if k == NON_UNIT { NON_UNIT } else { (self.den - k) % self.den })
            .collect();
        Self::from_raw(self.modulus, None, self.den, raw)
    }

    /// Product character modulo `lcm` of the two moduli.
    pub fn mul(&self, other: &Self) -> Result<Self, ArithError> {
        let q = lcm(self.modulus, other.modulus);
        if q > TABLE_LIMIT {
            return Err(ArithError::Overflow { modulus: q });
        }
        let den = lcm(self.den as u64, other.den as u64);
        let (sa, sb) = (den / self.den as u64, den / other.den as u64);
        let raw = (0..q)
            .map(|n| {
                let a = self.exps[(n % self.modulus) as usize];
                let b = other.exps[(n % other.modulus) as usize];
                if a == NON_UNIT || b == NON_UNIT {
                    NON_UNIT
                } else {
                    ((a as u64 * sa + b as u64 * sb) % den) as u32
                }
            })
            .collect();
        Ok(Self::from_raw(q, None, den as u32, raw))
    }

    /// Smallest modulus `f | q` such that the character is trivial on
    /// units congruent to 1 mod `f`.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        'outer: for f in divisors(q) {
            let mut n = 1 % q;
            loop {
                if gcd(n, q) == 1 && self.exps[n as usize] != 0 {
                    continue 'outer;
                }
                n += f;
                if n >= q {
                    break;
                }
            }
            return f;
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let f = self.conductor();
        if f == self.modulus {
            return self.clone();
        }
        let q = self.modulus;
        let raw = (0..f)
            .map(|m| {
                if gcd(m, f) != 1 {
                    return NON_UNIT;
                }
                let mut n = m;
                while gcd(n, q) != 1 {
                    n += f;
                }
                self.exps[(n % q) as usize]
            })
            .collect();
        Self::from_raw(f, None, self.den, raw)
    }

    /// Same character viewed modulo a multiple `m` of its modulus.
    pub fn lift(&self, m: u64) -> Result<Self, ArithError> {
        if m % self.modulus != 0 {
            return Err(ArithError::NotACharacter("lift target is not a multiple"));
        }
        let raw = (0..m)
            .map(|n| {
                if gcd(n, m) != 1 {
                    NON_UNIT
                } else {
                    self.exps[(n % self.modulus) as usize]
                }
            })
            .collect();
        Ok(Self::from_raw(m, None, self.den, raw))
    }
}

/// One cyclic factor of `(Z/q)^*`: generator `g` of order `ord` inside the
/// component modulo `pk`.
#[derive(Debug, Clone)]
struct Component {
    pk: u64,
    gen: u64,
    ord: u64,
}

fn components(q: u64) -> Vec<Component> {
    let mut out = Vec::new();
    for (p, k) in factorize(q) {
        let pk = p.pow(k);
        if p == 2 {
            match k {
                1 => {}
                2 => out.push(Component { pk, gen: 3, ord: 2 }),
                _ => {
                    out.push(Component { pk, gen: pk - 1, ord: 2 });
                    out.push(Component { pk, gen: 5, ord: pk / 4 });
                }
            }
        } else {
            let gen = primitive_root(pk).expect("odd prime powers are cyclic");
            out.push(Component { pk, gen, ord: totient(pk) });
        }
    }
    out
}

/// The unit group `(Z/q)^*` with discrete logarithms on the fixed generators.
pub struct UnitGroup {
    q: u64,
    comps: Vec<Component>,
    // logs[n][i] = discrete log of n in component i
    logs: Vec<Vec<u32>>,
    den: u64,
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<Self, ArithError> {
        if q == 0 {
            return Err(ArithError::ZeroModulus);
        }
        if q > TABLE_LIMIT {
            return Err(ArithError::Overflow { modulus: q });
        }
        let comps = components(q);
        let den = comps.iter().fold(1, |acc, c| lcm(acc, c.ord));
        let mut logs = vec![Vec::new(); q as usize];
        // Discrete logs per component; the 2-power part uses (-1)^a 5^b.
        let mut comp_logs: Vec<Vec<Option<(u32, u32)>>> = Vec::new();
        let mut i = 0;
        while i < comps.len() {
            let c = &comps[i];
            let pk = c.pk;
            let mut table = vec![None; pk as usize];
            if pk % 2 == 0 && pk >= 8 {
                let ord5 = comps[i + 1].ord;
                let mut x = 1u64;
                for b in 0..ord5 {
                    table[x as usize] = Some((0, b as u32));
                    table[(pk - x) as usize] = Some((1, b as u32));
                    x = x * 5 % pk;
                }
                comp_logs.push(table);
                i += 2;
            } else {
                let mut x = 1u64;
                for a in 0..c.ord {
                    table[x as usize] = Some((a as u32, 0));
                    x = x * c.gen % pk;
                }
                comp_logs.push(table);
                i += 1;
            }
        }
        for n in 0..q {
            if gcd(n, q) != 1 {
                continue;
            }
            let mut v = Vec::with_capacity(comps.len());
            let mut j = 0;
            for table in &comp_logs {
                let pk = comps[j].pk;
                let (a, b) = table[(n % pk) as usize].expect("unit has a log");
                if pk % 2 == 0 && pk >= 8 {
                    v.push(a);
                    v.push(b);
                    j += 2;
                } else {
                    v.push(a);
                    j += 1;
                }
            }
            logs[n as usize] = v;
        }
        Ok(UnitGroup { q, comps, logs, den })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Number of characters, `phi(q)`.
    pub fn size(&self) -> usize {
        self.comps.iter().map(|c| c.ord as usize).product()
    }

    /// Orders of the fixed generators.
    pub fn generator_orders(&self) -> Vec<u64> {
        self.comps.iter().map(|c| c.ord).collect()
    }

    /// Exponent vector of the character with the given label.
    pub fn exponent_vector(&self, index: usize) -> Vec<u64> {
        let mut rest = index;
        let mut v = vec![0u64; self.comps.len()];
        for i in (0..self.comps.len()).rev() {
            let o = self.comps[i].ord as usize;
            v[i] = (rest % o) as u64;
            rest /= o;
        }
        v
    }

    pub fn character(&self, index: usize) -> Result<DirichletCharacter, ArithError> {
        if index >= self.size() {
            return Err(ArithError::BadIndex { modulus: self.q, index });
        }
        let ev = self.exponent_vector(index);
        let den = self.den;
        let raw = (0..self.q)
            .map(|n| {
                let l = &self.logs[n as usize];
                if gcd(n, self.q) != 1 {
                    return NON_UNIT;
                }
                let mut acc = 0u64;
                for (i, c) in self.comps.iter().enumerate() {
                    acc += ev[i] * l[i] as u64 * (den / c.ord);
                }
                (acc % den) as u32
            })
            .collect();
        Ok(DirichletCharacter::from_raw(
            self.q,
            Some(index),
            den as u32,
            raw,
        ))
    }
}

/// All `phi(q)` characters modulo `q` in label order.
pub fn char_group(q: u64) -> Result<Vec<DirichletCharacter>, ArithError> {
    let g = UnitGroup::new(q)?;
    (0..g.size()).map(|i| g.character(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_sizes() {
        assert_eq!(char_group(1).unwrap().len(), 1);
        let g5 = char_group(5).unwrap();
        assert_eq!(g5.len(), 4);
        assert_eq!(g5.iter().filter(|c| c.is_principal()).count(), 1);
        assert_eq!(
            g5.iter().filter(|c| c.is_real() && !c.is_principal()).count(),
            1
        );
        assert_eq!(char_group(8).unwrap().len(), 4);
    }

    #[test]
    fn group_is_exhaustive_and_closed() {
        for q in 1..=120u64 {
            let g = char_group(q).unwrap();
            assert_eq!(g.len() as u64, totient(q), "q = {q}");
            assert!(g[0].is_principal());
            for a in &g {
                assert!(g.iter().any(|b| b == &a.conj()), "q = {q} conj");
            }
            if q <= 40 {
                for a in &g {
                    for b in &g {
                        let ab = a.mul(b).unwrap();
                        assert!(g.iter().any(|c| c == &ab), "q = {q} closure");
                    }
                }
            }
            // distinct
            for i in 0..g.len() {
                for j in 0..i {
                    assert!(g[i] != g[j]);
                }
            }
        }
    }

    #[test]
    fn order_divides_phi() {
        for q in 1..=200u64 {
            for chi in char_group(q).unwrap() {
                assert_eq!(totient(q) % chi.order() as u64, 0);
            }
        }
    }

    #[test]
    fn multiplicativity_tables() {
        for q in 1..=200u64 {
            for chi in char_group(q).unwrap() {
                for a in 0..q {
                    for b in (0..q).step_by(if q > 60 { 7 } else { 1 }) {
                        let ab = a * b % q;
                        let lhs = chi.exponent(a as i64).zip(chi.exponent(b as i64));
                        match (lhs, chi.exponent(ab as i64)) {
                            (Some((x, y)), Some(z)) => {
                                assert_eq!((x + y) % chi.denominator(), z)
                            }
                            (None, None) => {}
                            _ => panic!("zero pattern broken q={q}"),
                        }
                    }
                }
                assert_eq!(chi.value(1 + q as i64), chi.value(1));
                assert!((chi.value(1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kronecker_character() {
        let k = DirichletCharacter::kronecker(-4).unwrap();
        assert_eq!(k.modulus(), 16);
        assert_eq!(k.value(3).re, -1.0);
        assert_eq!(k.value(5).re, 1.0);
        let sq = DirichletCharacter::kronecker(9).unwrap();
        assert!(sq.is_principal());
        for p in [3u64, 5, 7, 11, 13] {
            for d in [-7i64, -3, 2, 5, 12] {
                if (d.rem_euclid(p as i64)) != 0 {
                    let kd = DirichletCharacter::kronecker(d).unwrap();
                    if gcd(p, kd.modulus()) == 1 {
                        assert_eq!(kd.value(p as i64).re as i8, jacobi(d, p).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn conductor_and_primitive() {
        let g = char_group(12).unwrap();
        let conds: Vec<u64> = g.iter().map(|c| c.conductor()).collect();
        let mut sorted = conds.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 3, 4, 12]);
        for c in &g {
            let p = c.primitive();
            assert!(p.is_primitive());
            for n in 0..12i64 {
                if gcd(n as u64, 12) == 1 {
                    assert!((p.value(n) - c.value(n)).norm() < 1e-12);
                }
            }
        }
        let chi5 = char_group(5).unwrap();
        assert!(chi5[1..].iter().all(|c| c.is_primitive()));
    }

    #[test]
    fn parity() {
        let g = char_group(5).unwrap();
        let odd = g.iter().filter(|c| c.parity() == Parity::Odd).count();
        assert_eq!(odd, 2);
    }
}
