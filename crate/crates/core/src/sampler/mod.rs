//! Fluctuation engines and the strobed sampling protocol.

pub mod loops;
pub mod metropolis;
pub mod model;
pub mod pimc;
pub mod problem;
pub mod protocol;

pub use loops::{loop_update, loop_update_thermal, LoopOutcome, LoopRejection, LoopSettings};
pub use metropolis::metropolis_sweep;
pub use model::{lattice_bonds, BondKind, IsingModel, LatticeBond};
pub use pimc::{default_slices, pimc_sweep, quench_readout, PimcMoves, Worldlines};
pub use problem::{FrozenSpins, Problem};
pub use protocol::{
    chain_rng, run_protocol, run_repetitions, ChainRng, Engine, EngineOptions, ExposureParams, Exposer, InitialState,
    ProtocolSpec, SampleChain, StepRecord, LONG_SWEEPS, SHORT_SWEEPS,
};
