//! Exact modular arithmetic, Dirichlet characters and Gauss sums.

mod character;
mod gauss;
mod modular;

pub use character::{char_group, DirichletCharacter, Parity, UnitGroup, TABLE_LIMIT};
pub use gauss::{gauss_sum, RootTable};
pub use modular::{
    divisors, ext_gcd, factorize, gcd, gcd_i, is_prime, isqrt, jacobi, lcm, mobius, mod_inverse,
    mul_mod, mult_order, pow_mod, prime_pi, primes_up_to, primitive_root, ramanujan_f, rem_euclid,
    totient, Residue, SYMBOL_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{a} is not invertible modulo {modulus}")]
    NonInvertible { a: i64, modulus: u64 },
    #[error("Jacobi symbol needs an odd modulus, got {0}")]
    EvenModulus(u64),
    #[error("modulus {modulus} exceeds the table limit")]
    Overflow { modulus: u64 },
    #[error("no character with index {index} modulo {modulus}")]
    BadIndex { modulus: u64, index: usize },
    #[error("table is not a Dirichlet character: {0}")]
    NotACharacter(&'static str),
}
