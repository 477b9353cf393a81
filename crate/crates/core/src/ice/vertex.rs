use serde::{Deserialize, Serialize};

use super::coupling::CouplingSpec;
use super::lattice::Sublattice;
use super::state::Spin;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexType {
    I,
    II,
    III,
    IV,
}

impl VertexType {
    pub const ALL: [VertexType; 4] = [VertexType::I, VertexType::II, VertexType::III, VertexType::IV];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// True for the ice-rule types I and II.
    pub fn obeys_ice_rule(self) -> bool {
        matches!(self, VertexType::I | VertexType::II)
    }

    pub fn is_monopole(self) -> bool {
        !self.obeys_ice_rule()
    }

    pub fn label(self) -> &'static str {
        match self {
            VertexType::I => "I",
            VertexType::II => "II",
            VertexType::III => "III",
            VertexType::IV => "IV",
        }
    }
}

/// Topology of one vertex configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VertexClass {
    pub kind: VertexType,
    /// In-pointing minus out-pointing dipoles.
    pub charge: i8,
}

impl VertexClass {
    /// Classifies four present spins given in N, E, S, W order.
    #[inline]
    pub fn from_spins(spins: [Spin; 4], sublattice: Sublattice) -> Self {
        let [n, e, s, w] = spins;
        let charge = sublattice.sign() * (n + e + s + w);
        let kind = match charge.abs() {
            0 if n * s == 1 => VertexType::I,
            0 => VertexType::II,
            2 => VertexType::III,
            _ => VertexType::IV,
        };
        VertexClass { kind, charge }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VertexReport {
    pub kind: VertexType,
    pub charge: i8,
    pub energy: f64,
}

/// Classifies a vertex whose spins may be missing; any missing spin makes
/// the vertex unclassifiable. `(row, col)` is only used in the error.
pub fn classify_vertex(
    spins: [Option<Spin>; 4],
    sublattice: Sublattice,
    (row, col): (usize, usize),
) -> Result<VertexClass> {
    match spins {
        [Some(n), Some(e), Some(s), Some(w)] => Ok(VertexClass::from_spins([n, e, s, w], sublattice)),
        _ => Err(Error::InactiveVertex { row, col }),
    }
}

/// Pairwise vertex energy with collinear pairs weighted by `J_par` and
/// perpendicular pairs by `J_perp`.
#[inline]
pub fn vertex_energy(spins: [Spin; 4], coupling: &CouplingSpec) -> f64 {
    let [n, e, s, w] = spins.map(f64::from);
    coupling.par() * (n * s + e * w) + coupling.perp() * (n * e + n * w + s * e + s * w)
}

pub fn vertex_report(spins: [Spin; 4], sublattice: Sublattice, coupling: &CouplingSpec) -> VertexReport {
    let class = VertexClass::from_spins(spins, sublattice);
    VertexReport { kind: class.kind, charge: class.charge, energy: vertex_energy(spins, coupling) }
}

/// Nominal energy of each vertex type for the given couplings.
pub fn type_energy(kind: VertexType, coupling: &CouplingSpec) -> f64 {
    let (par, perp) = (coupling.par(), coupling.perp());
    match kind {
        VertexType::I => -4.0 * perp + 2.0 * par,
        VertexType::II => -2.0 * par,
        VertexType::III => 0.0,
        VertexType::IV => 4.0 * perp + 2.0 * par,
    }
}

/// All sixteen N, E, S, W configurations.
pub fn all_configurations() -> impl Iterator<Item = [Spin; 4]> {
    (0u8..16).map(|bits| {
        let f = |k: u8| if bits >> k & 1 == 1 { 1 } else { -1 };
        [f(0), f(1), f(2), f(3)]
    })
}
