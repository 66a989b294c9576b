//! Noiseless subsystems of multiphoton optical states under collective
//! depolarization.
//!
//! A train of `N` temporal slots, each carrying two polarization modes, is
//! hit by one random U(2) transformation applied identically to every slot.
//! The Fock space splits into isotypic sectors labeled by the total photon
//! number `L` and the total spin `j`; the multiplicity `K` of the spin-`j`
//! representation in a sector is the dimension of a subsystem the channel
//! cannot touch.
//!
//! * [`multiplicity`] counts those dimensions exactly, both for trains with
//!   at most one photon per slot and for arbitrary occupancy, and carries an
//!   independent weight-counting oracle.
//! * [`capacity`] turns them into per-slot quantum and classical capacities
//!   and fits their approach to `log2(3)`.
//! * [`fock`] is a brute-force Fock-space model of the channel used to check
//!   everything numerically.
//! * [`tables`] renders multiplicity tables and figure data, and reads and
//!   writes the on-disk formats.

pub mod capacity;
mod error;
pub mod fock;
pub mod multiplicity;
mod spin;
pub mod tables;

pub use capacity::{CapacityKind, CapacityPoint, FitResult};
pub use error::{Error, Result};
pub use fock::{
    DensityOperator, DimGuard, FockBasis, HaarSampler, NoiselessBasis, PhotonRange, StateVector,
    U2Element,
};
pub use multiplicity::{MultiplicityTable, TableEntry};
pub use spin::{OccupancyMode, SectorKey, SpinLabel};

/// Crate version, embedded in generated file headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
