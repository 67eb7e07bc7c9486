//! Purification dynamics of monitored two-qudit-gate chains.
//!
//! The pipeline runs from a microscopic coupling H ([`micro_rates`]) to
//! the effective two-replica chain ([`replica_algebra`],
//! [`spin_oracle`]), its free-fermion solution ([`gaussian_fermions`]),
//! and the exact and asymptotic forms of the order parameter Θ and the
//! Rényi-2 entropy S = log((1+Θ)/(1−Θ)) for periodic
//! ([`pbc_analytics`]) and open ([`obc_analytics`]) chains.

pub mod error;
pub mod fock_oracle;
pub mod gaussian_fermions;
pub mod linalg;
pub mod micro_rates;
pub mod obc_analytics;
pub mod pbc_analytics;
pub mod replica_algebra;
pub mod roots;
pub mod spin_oracle;
pub mod theta;

pub use error::{Error, Result};
pub use spin_oracle::{Boundary, ChainSpec};
pub use theta::{theta_to_entropy, Theta};
