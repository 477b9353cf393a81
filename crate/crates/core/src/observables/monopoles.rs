use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ice::{charge_map, IceLattice, SpinState};

/// Per-vertex monopole statistics on the vertex grid, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonopoleMap {
    pub rows: usize,
    pub cols: usize,
    /// Fraction of samples with `|Q| >= 2`; `None` on inactive vertices.
    pub frequency: Vec<Option<f64>>,
    /// Mean charge per vertex; `None` on inactive vertices.
    pub mean_charge: Vec<Option<f64>>,
    /// Vertex held by pinning fields, drawn distinctly and excluded from
    /// screening statistics.
    pub pinned: Option<usize>,
    pub samples: usize,
}

impl MonopoleMap {
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.frequency[row * self.cols + col]
    }

    /// Mean frequency over active vertices other than the pinned one.
    pub fn mean_frequency(&self) -> Option<f64> {
        let vals: Vec<f64> = self
            .frequency
            .iter()
            .enumerate()
            .filter(|&(v, _)| Some(v) != self.pinned)
            .filter_map(|(_, f)| *f)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    /// Sum of mean charges over the map.
    pub fn net_charge(&self) -> f64 {
        self.mean_charge.iter().flatten().sum()
    }
}

/// Mergeable per-vertex counts.
#[derive(Clone, Debug, PartialEq)]
pub struct MonopoleCounts {
    rows: usize,
    cols: usize,
    active: Vec<bool>,
    monopoles: Vec<u64>,
    charge: Vec<i64>,
    samples: usize,
}

impl MonopoleCounts {
    pub fn new(lattice: &IceLattice) -> Self {
        let n = lattice.num_vertices();
        MonopoleCounts {
            rows: lattice.rows(),
            cols: lattice.cols(),
            active: (0..n).map(|v| lattice.is_active(v)).collect(),
            monopoles: vec![0; n],
            charge: vec![0; n],
            samples: 0,
        }
    }

    pub fn add(&mut self, state: &SpinState, lattice: &IceLattice) {
        for (v, q) in charge_map(state, lattice).into_iter().enumerate() {
            if let Some(q) = q {
                self.monopoles[v] += u64::from(q.abs() >= 2);
                self.charge[v] += i64::from(q);
            }
        }
        self.samples += 1;
    }

    pub fn merge(&mut self, other: &MonopoleCounts) -> Result<()> {
        if self.active != other.active || self.cols != other.cols {
            return Err(Error::Analysis("monopole counts from different lattices".into()));
        }
        for v in 0..self.monopoles.len() {
            self.monopoles[v] += other.monopoles[v];
            self.charge[v] += other.charge[v];
        }
        self.samples += other.samples;
        Ok(())
    }

    pub fn finish(&self, pinned: Option<usize>) -> Result<MonopoleMap> {
        if self.samples == 0 {
            return Err(Error::Empty("no states for monopole map"));
        }
        let n = self.samples as f64;
        let per = |x: f64, v: usize| self.active[v].then_some(x / n);
        Ok(MonopoleMap {
            rows: self.rows,
            cols: self.cols,
            frequency: (0..self.active.len()).map(|v| per(self.monopoles[v] as f64, v)).collect(),
            mean_charge: (0..self.active.len()).map(|v| per(self.charge[v] as f64, v)).collect(),
            pinned,
            samples: self.samples,
        })
    }
}

/// Monopole frequency and mean charge per vertex over `states`.
pub fn monopole_map(states: &[SpinState], lattice: &IceLattice, pinned: Option<usize>) -> Result<MonopoleMap> {
    let mut acc = MonopoleCounts::new(lattice);
    for s in states {
        acc.add(s, lattice);
    }
    acc.finish(pinned)
}
