//! Integer and modular arithmetic used throughout the crate.
//!
//! Everything here works on machine integers. Moduli are bounded by `2^32`
//! wherever products are formed in `u64`, and by `2^63` where `u128`
//! intermediates are used; the individual functions state which.

mod cornacchia;
mod modular;
mod sieve;

pub use cornacchia::{cornacchia, cornacchia_factored, factorize, FormSolution};
pub use modular::{
    gcd, is_prime, jacobi, kronecker, legendre, modular_inverse, mul_mod, pow_mod, sqrt_mod,
    sqrt_mod_prime_power,
};
pub use sieve::{sieve, PrimeTable, SIEVE_CEILING};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("sieve bound {0} outside [2, {SIEVE_CEILING}]")]
    BoundOutOfRange(u64),
    #[error("Kronecker symbol with lower entry 0")]
    ZeroModulus,
}
