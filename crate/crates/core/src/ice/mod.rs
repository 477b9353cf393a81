//! Lattice geometry, the Ising mapping of dipoles, vertex classification,
//! energetics and charge accounting.

pub mod coupling;
pub mod gauss;
pub mod lattice;
pub mod state;
pub mod vertex;

pub use coupling::{CouplingSpec, FieldMap};
pub use gauss::{
    boundary_flux, charge_map, monopole_count, total_charge, total_energy, vertex_class, vertex_spins,
    vertex_type_counts,
};
pub use lattice::{Direction, Edge, IceLattice, LatticeDescriptor, Orientation, Sublattice, Topology, VertexCoord};
pub use state::{Spin, SpinState, StateDocument};
pub use vertex::{
    all_configurations, classify_vertex, type_energy, vertex_energy, vertex_report, VertexClass, VertexReport,
    VertexType,
};
