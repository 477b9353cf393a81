//! Simulation and analysis of checkerboard-lattice Ising square ice.
//!
//! The crate is organized bottom-up:
//!
//! - [`ice`]: lattice geometry, vertex taxonomy, energies and charges.
//! - [`sampler`]: Metropolis, loop and path-integral engines driven by a
//!   strobed relaxation protocol.
//! - [`pinning`]: boundary clamps, flux injection and pinned monopoles.
//! - [`observables`]: vertex statistics, structure factors, monopole maps,
//!   entropic screening and mixing metrics.
//! - [`embedding`]: Chimera hardware graphs, four-qubit-chain embeddings and
//!   calibration refinement.
//! - [`experiment`]: declarative experiment files, the result bundle on disk
//!   and re-analysis of stored chains.

pub mod embedding;
pub mod error;
pub mod experiment;
pub mod ice;
pub mod observables;
pub mod pinning;
pub mod sampler;

pub use error::{Error, Result};
