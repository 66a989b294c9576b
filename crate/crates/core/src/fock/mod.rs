//! Brute-force Fock-space model of collective depolarization.
//!
//! Every slot holds two modes, H and V. A basis state is the flattened
//! occupation vector `(n_{1,H}, n_{1,V}, ..., n_{N,H}, n_{N,V})`. The channel
//! applies the same U(2) element to every slot and averages over the Haar
//! measure.

mod basis;
mod spectral;
mod state;
mod twirl;
mod u2;
mod unitary;

pub use basis::{FockBasis, PhotonRange};
pub use spectral::{
    apply_lowering, apply_raising, noiseless_basis, sector_multiplicity_numeric, NoiselessBasis,
    RANK_THRESHOLD,
};
pub use state::{random_amplitudes, DensityOperator, StateVector};
pub use twirl::{
    logical_fidelity_check, twirl_exact, twirl_monte_carlo, ExactTwirl, FidelityReport,
};
pub use u2::{HaarSampler, U2Element};
pub use unitary::{collective_unitary, slot_unitary};

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Named random streams. Every randomized routine draws from its own stream
/// so adding one consumer never shifts another's samples.
pub mod stream {
    pub const TWIRL: u64 = 1;
    pub const FIDELITY: u64 = 2;
    pub const STATE: u64 = 3;
}

/// Largest basis size the dense routines will build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimGuard(pub usize);

impl DimGuard {
    pub const DEFAULT: usize = 20_000;

    pub fn check(self, size: &BigUint) -> Result<()> {
        if *size > BigUint::from(self.0) {
            Err(Error::DimensionGuard {
                size: size.clone(),
                guard: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for DimGuard {
    fn default() -> Self {
        DimGuard(Self::DEFAULT)
    }
}
