//! Continuous-time quantum spatial search on `d`-dimensional periodic
//! hypercubic lattices with power-law hopping `1/r^α`.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: zeta, gamma, hypergeometric and exponential-integral
//!   functions needed by the closed-form asymptotics.
//! * [`lattice`]: the lattice, its couplings and the Laplacian dispersion
//!   over the Brillouin zone.
//! * [`spectrum`]: the exact search eigensystem from the secular equation,
//!   transfer amplitude, search time and ground-state profile.
//! * [`asymptotics`]: closed-form large-`N` predictions for the gap, the
//!   spectral dimension and the order parameter `χ`.
//! * [`oracle`]: dense brute-force references used to validate the fast paths.
//! * [`fit`]: least-squares helpers for log-log scaling fits.

pub mod asymptotics;
pub mod error;
pub mod fit;
pub mod lattice;
pub mod oracle;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
pub use lattice::{DispersionTable, LatticeSpec, Norm};
pub use spectrum::{SearchParams, SearchSpectrum};

/// Version of this crate, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
