use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ice::{vertex_type_counts, IceLattice, SpinState, VertexType};

/// Fractions of active vertices of each type, averaged over states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexFrequencies {
    /// Indexed by [`VertexType::index`].
    pub fractions: [f64; 4],
    pub samples: usize,
}

impl VertexFrequencies {
    pub fn get(&self, kind: VertexType) -> f64 {
        self.fractions[kind.index()]
    }

    /// Type-III plus Type-IV fraction.
    pub fn monopole_fraction(&self) -> f64 {
        self.fractions[2] + self.fractions[3]
    }
}

/// Running tallies, mergeable across chains.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FrequencyCounts {
    counts: [u64; 4],
    vertices: u64,
    samples: usize,
}

impl FrequencyCounts {
    pub fn add(&mut self, state: &SpinState, lattice: &IceLattice) {
        let c = vertex_type_counts(state, lattice);
        for k in 0..4 {
            self.counts[k] += c[k] as u64;
        }
        self.vertices += c.iter().sum::<usize>() as u64;
        self.samples += 1;
    }

    pub fn merge(&mut self, other: &FrequencyCounts) {
        for k in 0..4 {
            self.counts[k] += other.counts[k];
        }
        self.vertices += other.vertices;
        self.samples += other.samples;
    }

    pub fn finish(&self) -> Result<VertexFrequencies> {
        if self.samples == 0 || self.vertices == 0 {
            return Err(Error::Empty("no states with active vertices"));
        }
        let n = self.vertices as f64;
        Ok(VertexFrequencies { fractions: self.counts.map(|c| c as f64 / n), samples: self.samples })
    }
}

/// Vertex-type fractions over `states`; pass post-burn-in states.
pub fn vertex_frequencies(states: &[SpinState], lattice: &IceLattice) -> Result<VertexFrequencies> {
    let mut acc = FrequencyCounts::default();
    for s in states {
        acc.add(s, lattice);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neel_is_all_type_one() {
        let l = IceLattice::open(5, 4).unwrap();
        let f = vertex_frequencies(&[SpinState::neel(&l, 1), SpinState::neel(&l, -1)], &l).unwrap();
        assert_eq!(f.fractions, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_chain_is_an_error() {
        let l = IceLattice::open(2, 2).unwrap();
        assert!(vertex_frequencies(&[], &l).is_err());
    }

    #[test]
    fn merge_matches_single_pass() {
        let l = IceLattice::open(3, 3).unwrap();
        let mut rng = rand::rng();
        let states: Vec<_> = (0..10).map(|_| SpinState::random(&l, &mut rng)).collect();
        let whole = vertex_frequencies(&states, &l).unwrap();
        let mut a = FrequencyCounts::default();
        let mut b = FrequencyCounts::default();
        states[..4].iter().for_each(|s| a.add(s, &l));
        states[4..].iter().for_each(|s| b.add(s, &l));
        a.merge(&b);
        assert_eq!(a.finish().unwrap(), whole);
    }
}
