//! Chimera hardware graphs, four-qubit-chain embeddings of the lattice,
//! qubit-level simulation and calibration refinement.

pub mod chimera;
pub mod disorder;
pub mod embed;
pub mod refine;
pub mod sim;
pub mod validate;

pub use chimera::{build_chimera, random_defects, reference_defects, ChimeraGraph, ChimeraSpec, Defects, QubitCoord, Side};
pub use disorder::{DisorderModel, DisorderRealization, Spread};
pub use embed::{
    embed_family, embed_ice, embed_with_vacancies, Coupler, CouplerKind, Embedding, AFM_BASE, CHAIN_COUPLING,
    COUPLER_RANGE, J_MAX_PHYSICAL,
};
pub use refine::{
    bond_classes, refine_bonds, refine_calibration, Calibration, Estimate, Estimator, IterationRecord,
    LatticeEstimator, RefineSettings, RefinementReport, SamplerHandle,
};
pub use sim::{rigid_problem, run_chimera_protocol, ChainMode, ChimeraModel};
pub use validate::{validate_embedding, ValidityReport};
