use num_bigint::BigInt;
use num_rational::Ratio;
use thiserror::Error;

use crate::ntheory::{euler_phi, is_prime_u64};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DensityError {
    #[error("{0} is not a prime congruent to 5 mod 8")]
    BadPrime(u64),
    #[error("class numbers must be positive")]
    ZeroClassNumber,
}

/// phi((p-1)/4)/(p-1) * (1/h_F - 1/h_E), exact and reduced.
pub fn density_bound(p: u64, h_f: u64, h_e: u64) -> Result<Ratio<BigInt>, DensityError> {
    if p % 8 != 5 || !is_prime_u64(p) {
        return Err(DensityError::BadPrime(p));
    }
    if h_f == 0 || h_e == 0 {
        return Err(DensityError::ZeroClassNumber);
    }
    let share = Ratio::new(BigInt::from(euler_phi((p - 1) / 4)), BigInt::from(p - 1));
    let gap = Ratio::new(BigInt::from(1), BigInt::from(h_f)) - Ratio::new(BigInt::from(1), BigInt::from(h_e));
    Ok(share * gap)
}
