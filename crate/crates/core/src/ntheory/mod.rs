//! Exact modular and polynomial arithmetic over arbitrary-precision integers.

mod hminus;
mod poly;
mod prime;

use thiserror::Error;

pub use hminus::{hminus_precision, relative_class_number_minus, HMINUS_MAX_P};
pub use poly::{
    has_root_mod_by_evaluation, has_root_mod_by_gcd, poly_has_root_mod, IntPolynomial,
    DIRECT_EVALUATION_LIMIT,
};
pub use prime::{
    euler_phi, factor_u64, is_prime, is_prime_bigint, is_prime_u64, is_self_conjugate,
    legendre_symbol, legendre_symbol_u64, multiplicative_order, multiplicative_order_u64,
    primitive_roots, smallest_primitive_root, PROBABILISTIC_ROUNDS,
};
pub(crate) use prime::pow_mod;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NtError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{value} is not coprime to {modulus}")]
    NotCoprime { value: String, modulus: u64 },
    #[error("polynomial vanishes identically modulo {0}")]
    DegenerateReduction(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial degree must be at least 1")]
    DegreeTooSmall,
    #[error("p = {0} is outside the supported range")]
    OutOfEnvelope(u64),
    #[error("numeric precision failure for p = {p} at {bits} bits")]
    Precision { p: u64, bits: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Writes `p^a * m'` with `p` coprime to `m'`.
pub fn split_prime_power(p: u64, mut m: u64) -> (u32, u64) {
    let mut a = 0;
    while m.is_multiple_of(p) {
        m /= p;
        a += 1;
    }
    (a, m)
}
