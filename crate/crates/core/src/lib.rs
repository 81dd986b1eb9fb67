//! Exact arithmetic and numerical identity checks around twisted Kloosterman
//! sums, quadratic congruence counts, Euler products, Dirichlet L-values,
//! Bessel and Mellin integrals, and the amplifier.

pub mod arith;
pub mod expsums;
pub mod archimedean;
pub mod reparam;
pub mod quadcount;
pub mod special;
pub mod lfunc;
pub mod amplifier;
