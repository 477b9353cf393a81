use std::collections::BTreeMap;

use rand::Rng;

use super::model::IsingModel;
use crate::error::{Error, Result};
use crate::ice::{CouplingSpec, IceLattice, Spin, SpinState};

/// Frozen spin values keyed by site.
pub type FrozenSpins = BTreeMap<usize, Spin>;

/// Everything an engine needs: geometry, couplings, and which spins may move.
#[derive(Clone, Debug)]
pub struct Problem {
    lattice: IceLattice,
    coupling: CouplingSpec,
    model: IsingModel,
    frozen: Vec<Option<Spin>>,
    mobile: Vec<usize>,
}

impl Problem {
    pub fn new(lattice: IceLattice, coupling: CouplingSpec) -> Result<Self> {
        Self::build(lattice, coupling, &FrozenSpins::new(), None)
    }

    pub fn with_frozen(lattice: IceLattice, coupling: CouplingSpec, frozen: &FrozenSpins) -> Result<Self> {
        Self::build(lattice, coupling, frozen, None)
    }

    /// As [`Problem::with_frozen`], with per-bond multipliers over [`super::model::lattice_bonds`].
    pub fn build(
        lattice: IceLattice,
        coupling: CouplingSpec,
        frozen: &FrozenSpins,
        bond_scale: Option<&[f64]>,
    ) -> Result<Self> {
        coupling.validate(lattice.num_sites())?;
        if let Some(&s) = coupling.fields.keys().find(|&&s| lattice.is_vacant(s)) {
            return Err(Error::Config(format!("field assigned to vacant site {:?}", lattice.edge(s))));
        }
        let mut fz = vec![None; lattice.num_sites()];
        for (&s, &v) in frozen {
            if s >= lattice.num_sites() || lattice.is_vacant(s) {
                return Err(Error::Config(format!("frozen spin on missing site {s}")));
            }
            if v != 1 && v != -1 {
                return Err(Error::Config(format!("frozen value {v} on site {s}")));
            }
            fz[s] = Some(v);
        }
        let model = IsingModel::from_lattice(&lattice, &coupling, bond_scale)?;
        let mobile = lattice
            .present_sites()
            .filter(|&s| fz[s].is_none() && (lattice.active_degree(s) > 0 || coupling.field(s) != 0.0))
            .collect();
        Ok(Problem { lattice, coupling, model, frozen: fz, mobile })
    }

    pub fn lattice(&self) -> &IceLattice {
        &self.lattice
    }

    pub fn coupling(&self) -> &CouplingSpec {
        &self.coupling
    }

    pub fn model(&self) -> &IsingModel {
        &self.model
    }

    /// Sites the engines are allowed to update.
    pub fn mobile_sites(&self) -> &[usize] {
        &self.mobile
    }

    #[inline]
    pub fn is_frozen(&self, site: usize) -> bool {
        self.frozen[site].is_some()
    }

    pub fn frozen(&self) -> FrozenSpins {
        self.frozen.iter().enumerate().filter_map(|(s, v)| v.map(|v| (s, v))).collect()
    }

    /// Overwrites frozen sites with their pinned values.
    pub fn impose(&self, state: &mut SpinState) {
        for (s, v) in self.frozen.iter().enumerate() {
            if let Some(v) = v {
                state.set(s, *v);
            }
        }
    }

    /// Uniformly random over the unpinned sites.
    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinState {
        let mut s = SpinState::random(&self.lattice, rng);
        self.impose(&mut s);
        s
    }

    pub fn energy(&self, state: &SpinState) -> f64 {
        self.model.state_energy(state)
    }

    pub fn respects_frozen(&self, state: &SpinState) -> bool {
        self.frozen.iter().enumerate().all(|(s, v)| v.is_none_or(|v| state.value(s) == v))
    }
}
