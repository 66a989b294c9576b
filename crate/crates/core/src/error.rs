use std::path::PathBuf;

use num_bigint::BigUint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("number of slots must be positive")]
    ZeroSlots,

    #[error("spin 2j = {twice_j} is not allowed for L = {photons} photons: 2j must not exceed L")]
    SpinTooLarge { photons: u32, twice_j: u32 },

    #[error("spin 2j = {twice_j} is not allowed for L = {photons} photons: 2j and L must have equal parity")]
    SpinParity { photons: u32, twice_j: u32 },

    #[error("weight 2m = {twice_m} is not allowed for L = {photons} photons: need |2m| <= L and equal parity")]
    InvalidWeight { photons: u32, twice_m: i64 },

    #[error(
        "restricted occupancy allows at most one photon per slot, but L = {photons} > N = {slots}"
    )]
    PhotonsExceedSlots { slots: u32, photons: u32 },

    #[error("basis dimension {size} exceeds the dimension guard {guard}")]
    DimensionGuard { size: BigUint, guard: usize },

    #[error("sector N = {n_slots}, L = {photons}, 2j = {twice_j} has multiplicity zero")]
    EmptySector {
        n_slots: u32,
        photons: u32,
        twice_j: u32,
    },

    #[error("{0}")]
    Domain(String),

    #[error("failed to parse {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(what: impl Into<String>, reason: impl ToString) -> Self {
        Error::Parse {
            what: what.into(),
            reason: reason.to_string(),
        }
    }
}
