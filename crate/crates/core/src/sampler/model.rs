//! Sparse Ising representation shared by every engine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ice::{CouplingSpec, IceLattice, Spin, SpinState};

/// Which vertex coupling a lattice bond realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondKind {
    Par,
    Perp,
}

/// A pairwise term inside one active vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeBond {
    pub vertex: usize,
    pub a: usize,
    pub b: usize,
    pub kind: BondKind,
}

/// The six bonds of every active vertex, in a fixed order.
pub fn lattice_bonds(lattice: &IceLattice) -> Vec<LatticeBond> {
    const PAIRS: [(usize, usize, BondKind); 6] = [
        (0, 2, BondKind::Par),
        (1, 3, BondKind::Par),
        (0, 1, BondKind::Perp),
        (0, 3, BondKind::Perp),
        (2, 1, BondKind::Perp),
        (2, 3, BondKind::Perp),
    ];
    let mut out = Vec::with_capacity(6 * lattice.num_active());
    for v in lattice.active_vertices() {
        let sites = lattice.vertex_sites(v);
        for &(i, j, kind) in &PAIRS {
            out.push(LatticeBond { vertex: v, a: sites[i], b: sites[j], kind });
        }
    }
    out
}

/// `E = sum_ij J_ij S_i S_j + sum_i h_i S_i` in compressed adjacency form.
#[derive(Clone, Debug)]
pub struct IsingModel {
    offsets: Vec<usize>,
    neighbours: Vec<(u32, f64)>,
    fields: Vec<f64>,
}

impl IsingModel {
    pub fn from_bonds(num_spins: usize, bonds: &[(usize, usize, f64)], fields: &BTreeMap<usize, f64>) -> Self {
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); num_spins];
        for &(a, b, j) in bonds {
            if j == 0.0 {
                continue;
            }
            adj[a].push((b as u32, j));
            adj[b].push((a as u32, j));
        }
        let mut offsets = Vec::with_capacity(num_spins + 1);
        let mut neighbours = Vec::new();
        offsets.push(0);
        for list in adj {
            neighbours.extend(list);
            offsets.push(neighbours.len());
        }
        let mut f = vec![0.0; num_spins];
        for (&s, &h) in fields {
            f[s] = h;
        }
        IsingModel { offsets, neighbours, fields: f }
    }

    /// Checkerboard model of `lattice`; `bond_scale[k]` multiplies bond `k`
    /// of [`lattice_bonds`] when given.
    pub fn from_lattice(lattice: &IceLattice, coupling: &CouplingSpec, bond_scale: Option<&[f64]>) -> Result<Self> {
        let bonds = lattice_bonds(lattice);
        if let Some(scale) = bond_scale {
            if scale.len() != bonds.len() {
                return Err(Error::Config(format!(
                    "{} bond multipliers for {} bonds",
                    scale.len(),
                    bonds.len()
                )));
            }
        }
        let weighted: Vec<(usize, usize, f64)> = bonds
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let j = match b.kind {
                    BondKind::Par => coupling.par(),
                    BondKind::Perp => coupling.perp(),
                };
                (b.a, b.b, j * bond_scale.map_or(1.0, |s| s[k]))
            })
            .collect();
        let fields: BTreeMap<usize, f64> =
            coupling.fields.iter().filter(|(&s, _)| !lattice.is_vacant(s)).map(|(&s, &h)| (s, h)).collect();
        Ok(Self::from_bonds(lattice.num_sites(), &weighted, &fields))
    }

    pub fn num_spins(&self) -> usize {
        self.fields.len()
    }

    #[inline]
    pub fn neighbours(&self, i: usize) -> &[(u32, f64)] {
        &self.neighbours[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn field(&self, i: usize) -> f64 {
        self.fields[i]
    }

    pub fn has_terms(&self, i: usize) -> bool {
        self.offsets[i + 1] > self.offsets[i] || self.fields[i] != 0.0
    }

    /// `sum_j J_ij S_j + h_i`.
    #[inline]
    pub fn local_field(&self, spins: &[Spin], i: usize) -> f64 {
        let mut acc = self.fields[i];
        for &(j, w) in self.neighbours(i) {
            acc += w * f64::from(spins[j as usize]);
        }
        acc
    }

    /// Energy change from flipping spin `i`.
    #[inline]
    pub fn flip_delta(&self, spins: &[Spin], i: usize) -> f64 {
        -2.0 * f64::from(spins[i]) * self.local_field(spins, i)
    }

    pub fn energy(&self, spins: &[Spin]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.num_spins() {
            let si = f64::from(spins[i]);
            e += self.fields[i] * si;
            for &(j, w) in self.neighbours(i) {
                if (j as usize) > i {
                    e += w * si * f64::from(spins[j as usize]);
                }
            }
        }
        e
    }

    pub fn state_energy(&self, state: &SpinState) -> f64 {
        self.energy(state.values())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ice::total_energy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_vertex_energy() {
        let l = IceLattice::open(3, 4).unwrap();
        let mut c = CouplingSpec::new(0.9, 1.1, 0.5);
        c.fields.insert(3, 0.25);
        c.fields.insert(10, -1.5);
        let m = IsingModel::from_lattice(&l, &c, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = SpinState::random(&l, &mut rng);
            assert!((m.state_energy(&s) - total_energy(&s, &l, &c)).abs() < 1e-9);
            let mut t = s.clone();
            t.flip(5);
            let d = m.flip_delta(s.values(), 5);
            assert!((m.state_energy(&t) - m.state_energy(&s) - d).abs() < 1e-9);
        }
    }

    #[test]
    fn six_bonds_per_active_vertex() {
        let l = IceLattice::open(2, 3).unwrap();
        assert_eq!(lattice_bonds(&l).len(), 36);
    }
}
