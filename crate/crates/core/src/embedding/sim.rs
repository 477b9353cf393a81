//! Sampling the embedded problem, either qubit by qubit with explicit chain
//! couplers or with every chain collapsed to one rigid logical spin.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::disorder::DisorderRealization;
use super::embed::{Embedding, J_MAX_PHYSICAL};
use crate::error::{Error, Result};
use crate::ice::{monopole_count, CouplingSpec, FieldMap, IceLattice, Spin, SpinState};
use crate::sampler::metropolis::accept;
use crate::sampler::{chain_rng, FrozenSpins, IsingModel, Problem, ProtocolSpec, SampleChain, StepRecord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    /// Chains are rigid logical spins.
    #[default]
    Rigid,
    /// Every qubit is simulated with its chain couplers.
    Explicit,
}

/// Logical problem whose bonds and fields are those programmed on the
/// device (with optional disorder), for rigid chains.
pub fn rigid_problem(
    embedding: &Embedding,
    coupling: &CouplingSpec,
    frozen: &FrozenSpins,
    disorder: Option<&DisorderRealization>,
) -> Result<Problem> {
    let lattice = embedding.logical_lattice()?;
    let scale = embedding.bond_scale(coupling, disorder.map(|d| d.coupler.as_slice()))?;
    let mut c = coupling.clone();
    for (s, h) in embedding.logical_fields(disorder.map(|d| d.field.as_slice())) {
        *c.fields.entry(s).or_insert(0.0) += h;
    }
    Problem::build(lattice, c, frozen, Some(&scale))
}

/// Qubit-level Ising model in `J_MAX` units.
#[derive(Clone, Debug)]
pub struct ChimeraModel {
    model: IsingModel,
    chains: Vec<Option<[usize; 4]>>,
    chain_of: Vec<Option<usize>>,
    mobile_qubits: Vec<usize>,
    mobile_chains: Vec<usize>,
    frozen: BTreeMap<usize, Spin>,
}

impl ChimeraModel {
    /// Programmed couplers, offsets and logical `fields` spread evenly over
    /// each chain. Frozen logical spins freeze their whole chain.
    pub fn new(
        embedding: &Embedding,
        fields: &FieldMap,
        frozen: &FrozenSpins,
        disorder: Option<&DisorderRealization>,
    ) -> Result<Self> {
        let g = embedding.graph()?;
        let n = g.num_qubits();
        let bonds: Vec<(usize, usize, f64)> = embedding
            .couplers
            .iter()
            .enumerate()
            .map(|(k, c)| (c.a, c.b, c.value * disorder.map_or(1.0, |d| d.coupler[k]) / J_MAX_PHYSICAL))
            .collect();
        let mut h: BTreeMap<usize, f64> = BTreeMap::new();
        for (&q, &o) in &embedding.offsets {
            *h.entry(q).or_default() += o / J_MAX_PHYSICAL;
        }
        if let Some(d) = disorder {
            for (q, &x) in d.field.iter().enumerate() {
                if x != 0.0 {
                    *h.entry(q).or_default() += x / J_MAX_PHYSICAL;
                }
            }
        }
        let mut chain_of = vec![None; n];
        for (s, c) in embedding.chains.iter().enumerate() {
            if let Some(q) = c {
                for &x in q {
                    chain_of[x] = Some(s);
                }
            }
        }
        for (&s, &f) in fields {
            let q = embedding
                .chains
                .get(s)
                .copied()
                .flatten()
                .ok_or_else(|| Error::Config(format!("field on site {s} which has no chain")))?;
            for x in q {
                *h.entry(x).or_default() += f / 4.0;
            }
        }
        let mut frozen_q = BTreeMap::new();
        for (&s, &v) in frozen {
            let q = embedding
                .chains
                .get(s)
                .copied()
                .flatten()
                .ok_or_else(|| Error::Config(format!("frozen site {s} has no chain")))?;
            for x in q {
                frozen_q.insert(x, v);
            }
        }
        let model = IsingModel::from_bonds(n, &bonds, &h);
        let mobile_qubits =
            (0..n).filter(|&q| chain_of[q].is_some() && !frozen_q.contains_key(&q) && model.has_terms(q)).collect();
        let mobile_chains =
            (0..embedding.chains.len()).filter(|&s| embedding.chains[s].is_some() && !frozen.contains_key(&s)).collect();
        Ok(ChimeraModel { model, chains: embedding.chains.clone(), chain_of, mobile_qubits, mobile_chains, frozen: frozen_q })
    }

    pub fn num_qubits(&self) -> usize {
        self.model.num_spins()
    }

    /// Qubit configuration with every chain set to its logical value.
    pub fn lift(&self, state: &SpinState) -> Vec<Spin> {
        let mut q = vec![1; self.num_qubits()];
        for (s, c) in self.chains.iter().enumerate() {
            if let Some(c) = c {
                for &x in c {
                    q[x] = state.value(s);
                }
            }
        }
        for (&x, &v) in &self.frozen {
            q[x] = v;
        }
        q
    }

    /// Majority vote per chain, ties broken by the first qubit.
    pub fn readout(&self, qubits: &[Spin], lattice: &IceLattice) -> SpinState {
        let mut out = SpinState::uniform(lattice, 1);
        for (s, c) in self.chains.iter().enumerate() {
            if let Some(c) = c {
                let sum: i32 = c.iter().map(|&x| i32::from(qubits[x])).sum();
                let v = match sum.signum() {
                    1 => 1,
                    -1 => -1,
                    _ => qubits[c[0]],
                };
                out.set(s, v);
            }
        }
        out
    }

    /// Chains whose qubits disagree.
    pub fn chain_breaks(&self, qubits: &[Spin]) -> usize {
        self.chains.iter().flatten().filter(|c| c.iter().any(|&x| qubits[x] != qubits[c[0]])).count()
    }

    pub fn energy(&self, qubits: &[Spin]) -> f64 {
        self.model.energy(qubits)
    }

    fn chain_delta(&self, q: &[Spin], site: usize) -> f64 {
        let c = self.chains[site].expect("mobile chain");
        let mut d = 0.0;
        for &x in &c {
            let mut local = self.model.field(x);
            for &(n, j) in self.model.neighbours(x) {
                let n = n as usize;
                if self.chain_of[n] != Some(site) {
                    local += j * f64::from(q[n]);
                }
            }
            d += -2.0 * f64::from(q[x]) * local;
        }
        d
    }

    /// One sweep: a single-qubit Metropolis pass followed by one attempted
    /// flip of every whole chain.
    pub fn sweep<R: Rng + ?Sized>(&self, q: &mut [Spin], temperature: f64, rng: &mut R) {
        let n = self.mobile_qubits.len();
        for _ in 0..n {
            let x = self.mobile_qubits[rng.random_range(0..n)];
            if accept(self.model.flip_delta(q, x), temperature, rng) {
                q[x] = -q[x];
            }
        }
        let m = self.mobile_chains.len();
        for _ in 0..m {
            let s = self.mobile_chains[rng.random_range(0..m)];
            if accept(self.chain_delta(q, s), temperature, rng) {
                for &x in &self.chains[s].expect("mobile chain") {
                    q[x] = -q[x];
                }
            }
        }
    }
}

/// Strobed chain sampled at the qubit level. `logical` supplies energies,
/// mobile sites and the initial state; readouts are chain majorities.
pub fn run_chimera_protocol(
    model: &ChimeraModel,
    logical: &Problem,
    protocol: &ProtocolSpec,
    temperature: f64,
    sweeps: usize,
    repetition: u64,
) -> Result<SampleChain> {
    protocol.validate()?;
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::Config(format!("temperature must be positive, got {temperature}")));
    }
    let mut rng = chain_rng(protocol.seed, repetition);
    let lattice = logical.lattice();
    let initial = logical.random_state(&mut rng);
    let mut qubits = model.lift(&initial);
    let mut previous = initial.clone();
    let mut states = Vec::with_capacity(protocol.chain_length);
    let mut steps = Vec::with_capacity(protocol.chain_length);
    for step in 0..protocol.chain_length {
        for _ in 0..sweeps {
            model.sweep(&mut qubits, temperature, &mut rng);
        }
        let state = model.readout(&qubits, lattice);
        steps.push(StepRecord {
            step,
            energy: logical.energy(&state),
            monopoles: monopole_count(&state, lattice),
            hamming: state.hamming_on(&previous, logical.mobile_sites()),
            burn_in: step < protocol.burn_in,
        });
        previous = state.clone();
        states.push(state);
    }
    Ok(SampleChain { initial, states, steps, burn_in: protocol.burn_in, traces: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{embed_ice, ChimeraGraph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn intact_chains_reproduce_logical_energy() {
        let g = ChimeraGraph::ideal(5, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (mut e, lattice) = embed_ice(&g, &mut rng).unwrap();
        let coupling = CouplingSpec::with_ratio(1.02, 0.5);
        e.program(&coupling);
        let logical = rigid_problem(&e, &coupling, &FrozenSpins::new(), None).unwrap();
        let direct = Problem::new(lattice.clone(), coupling.clone()).unwrap();
        let model = ChimeraModel::new(&e, &FieldMap::new(), &FrozenSpins::new(), None).unwrap();
        let fm = -2.0 / J_MAX_PHYSICAL * 3.0 * lattice.num_sites() as f64;
        for _ in 0..20 {
            let s = SpinState::random(&lattice, &mut rng);
            let q = model.lift(&s);
            assert_eq!(model.chain_breaks(&q), 0);
            assert_eq!(model.readout(&q, &lattice), s);
            assert!((logical.energy(&s) - direct.energy(&s)).abs() < 1e-9);
            assert!((model.energy(&q) - fm - direct.energy(&s)).abs() < 1e-9);
        }
    }
}
