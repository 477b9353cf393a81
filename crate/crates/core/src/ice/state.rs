use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lattice::{IceLattice, LatticeDescriptor, Orientation};
use crate::error::{Error, Result};

/// Ising value on a site: `+1` or `-1`.
pub type Spin = i8;

/// One classical configuration. Vacant sites are stored as `0` and never
/// read through the public accessors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinState {
    spins: Vec<Spin>,
}

impl SpinState {
    /// All present sites set to `value`.
    pub fn uniform(lattice: &IceLattice, value: Spin) -> Self {
        let spins = (0..lattice.num_sites())
            .map(|s| if lattice.is_vacant(s) { 0 } else { value })
            .collect();
        SpinState { spins }
    }

    pub fn random<R: Rng + ?Sized>(lattice: &IceLattice, rng: &mut R) -> Self {
        let spins = (0..lattice.num_sites())
            .map(|s| {
                if lattice.is_vacant(s) {
                    0
                } else if rng.random::<bool>() {
                    1
                } else {
                    -1
                }
            })
            .collect();
        SpinState { spins }
    }

    /// Type-I tiling: vertical spins `phase`, horizontal spins `-phase`.
    pub fn neel(lattice: &IceLattice, phase: Spin) -> Self {
        let spins = (0..lattice.num_sites())
            .map(|s| {
                if lattice.is_vacant(s) {
                    0
                } else {
                    match lattice.edge(s).orientation {
                        Orientation::Vertical => phase,
                        Orientation::Horizontal => -phase,
                    }
                }
            })
            .collect();
        SpinState { spins }
    }

    /// Builds a state from raw values; vacant sites must hold `0`, others `±1`.
    pub fn from_values(lattice: &IceLattice, spins: Vec<Spin>) -> Result<Self> {
        if spins.len() != lattice.num_sites() {
            return Err(Error::Lattice(format!(
                "state has {} sites, lattice has {}",
                spins.len(),
                lattice.num_sites()
            )));
        }
        for (s, &v) in spins.iter().enumerate() {
            let ok = if lattice.is_vacant(s) { v == 0 } else { v == 1 || v == -1 };
            if !ok {
                return Err(Error::Lattice(format!("site {s} holds invalid value {v}")));
            }
        }
        Ok(SpinState { spins })
    }

    pub(crate) fn from_raw(spins: Vec<Spin>) -> Self {
        SpinState { spins }
    }

    #[inline]
    pub fn get(&self, site: usize) -> Option<Spin> {
        let v = self.spins[site];
        (v != 0).then_some(v)
    }

    /// Raw value, `0` on vacancies.
    #[inline]
    pub fn value(&self, site: usize) -> Spin {
        self.spins[site]
    }

    #[inline]
    pub fn set(&mut self, site: usize, value: Spin) {
        debug_assert!(self.spins[site] != 0 && (value == 1 || value == -1));
        self.spins[site] = value;
    }

    #[inline]
    pub fn flip(&mut self, site: usize) {
        debug_assert!(self.spins[site] != 0);
        self.spins[site] = -self.spins[site];
    }

    pub fn values(&self) -> &[Spin] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// Number of sites where the two states differ, restricted to `sites`.
    pub fn hamming_on(&self, other: &SpinState, sites: &[usize]) -> usize {
        sites.iter().filter(|&&s| self.spins[s] != other.spins[s]).count()
    }

    pub fn to_json_values(&self) -> Vec<Option<Spin>> {
        self.spins.iter().map(|&v| (v != 0).then_some(v)).collect()
    }

    pub fn from_json_values(lattice: &IceLattice, values: &[Option<Spin>]) -> Result<Self> {
        Self::from_values(lattice, values.iter().map(|v| v.unwrap_or(0)).collect())
    }
}

/// Lattice plus one state, as stored on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateDocument {
    pub lattice: LatticeDescriptor,
    /// Horizontal edges row-major, then vertical edges row-major; `null` on vacancies.
    pub spins: Vec<Option<Spin>>,
}

impl StateDocument {
    pub fn new(lattice: &IceLattice, state: &SpinState) -> Self {
        StateDocument { lattice: lattice.descriptor(), spins: state.to_json_values() }
    }

    pub fn into_parts(self) -> Result<(IceLattice, SpinState)> {
        let lattice = IceLattice::try_from(self.lattice)?;
        let state = SpinState::from_json_values(&lattice, &self.spins)?;
        Ok((lattice, state))
    }
}
