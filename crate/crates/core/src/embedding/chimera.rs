//! Chimera hardware graphs: a grid of `K4,4` cells with inter-cell links.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Qubits per cell side.
pub const SHORE: usize = 4;
pub const CELL_QUBITS: usize = 2 * SHORE;

/// Vertical qubits couple to the cell below, horizontal ones to the cell to
/// the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Vertical,
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitCoord {
    pub row: usize,
    pub col: usize,
    pub side: Side,
    pub index: usize,
}

/// Inoperable devices. Couplers are unordered qubit pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Defects {
    #[serde(default)]
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub couplers: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ChimeraSpec", into = "ChimeraSpec")]
pub struct ChimeraGraph {
    rows: usize,
    cols: usize,
    dead_qubits: BTreeSet<usize>,
    dead_couplers: BTreeSet<(usize, usize)>,
}

/// Serialized form of a [`ChimeraGraph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChimeraSpec {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub defects: Defects,
}

impl TryFrom<ChimeraSpec> for ChimeraGraph {
    type Error = Error;
    fn try_from(s: ChimeraSpec) -> Result<Self> {
        build_chimera(s.rows, s.cols, &s.defects)
    }
}

impl From<ChimeraGraph> for ChimeraSpec {
    fn from(g: ChimeraGraph) -> Self {
        ChimeraSpec { rows: g.rows, cols: g.cols, defects: g.defects() }
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b { (a, b) } else { (b, a) }
}

/// Chimera graph of `rows × cols` cells with the given devices disabled.
pub fn build_chimera(rows: usize, cols: usize, defects: &Defects) -> Result<ChimeraGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::Config(format!("chimera grid must be non-empty, got {rows}x{cols}")));
    }
    let mut g = ChimeraGraph { rows, cols, dead_qubits: BTreeSet::new(), dead_couplers: BTreeSet::new() };
    for &q in &defects.qubits {
        if q >= g.num_qubits() {
            return Err(Error::Config(format!("defective qubit {q} out of range")));
        }
        g.dead_qubits.insert(q);
    }
    for &(a, b) in &defects.couplers {
        if !g.is_edge(a, b) {
            return Err(Error::Config(format!("defective coupler ({a}, {b}) is not a chimera edge")));
        }
        g.dead_couplers.insert(ordered(a, b));
    }
    Ok(g)
}

impl ChimeraGraph {
    pub fn ideal(rows: usize, cols: usize) -> Result<Self> {
        build_chimera(rows, cols, &Defects::default())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_qubits(&self) -> usize {
        self.rows * self.cols * CELL_QUBITS
    }

    pub fn qubit(&self, row: usize, col: usize, side: Side, index: usize) -> usize {
        debug_assert!(row < self.rows && col < self.cols && index < SHORE);
        let s = match side {
            Side::Vertical => 0,
            Side::Horizontal => 1,
        };
        ((row * self.cols + col) * 2 + s) * SHORE + index
    }

    pub fn coord(&self, q: usize) -> QubitCoord {
        let index = q % SHORE;
        let rest = q / SHORE;
        let side = if rest % 2 == 0 { Side::Vertical } else { Side::Horizontal };
        let cell = rest / 2;
        QubitCoord { row: cell / self.cols, col: cell % self.cols, side, index }
    }

    /// True if `a` and `b` share a coupler on the ideal device.
    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        if a >= self.num_qubits() || b >= self.num_qubits() || a == b {
            return false;
        }
        let (ca, cb) = (self.coord(a), self.coord(b));
        if (ca.row, ca.col) == (cb.row, cb.col) {
            return ca.side != cb.side;
        }
        if ca.side != cb.side || ca.index != cb.index {
            return false;
        }
        match ca.side {
            Side::Vertical => ca.col == cb.col && ca.row.abs_diff(cb.row) == 1,
            Side::Horizontal => ca.row == cb.row && ca.col.abs_diff(cb.col) == 1,
        }
    }

    /// Every coupler of the ideal device, as ordered pairs.
    pub fn couplers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                for i in 0..SHORE {
                    for j in 0..SHORE {
                        out.push(ordered(self.qubit(r, c, Side::Vertical, i), self.qubit(r, c, Side::Horizontal, j)));
                    }
                }
                for i in 0..SHORE {
                    if r + 1 < self.rows {
                        out.push((self.qubit(r, c, Side::Vertical, i), self.qubit(r + 1, c, Side::Vertical, i)));
                    }
                    if c + 1 < self.cols {
                        out.push((self.qubit(r, c, Side::Horizontal, i), self.qubit(r, c + 1, Side::Horizontal, i)));
                    }
                }
            }
        }
        out
    }

    pub fn num_couplers(&self) -> usize {
        16 * self.rows * self.cols + SHORE * (self.rows - 1) * self.cols + SHORE * self.rows * (self.cols - 1)
    }

    pub fn qubit_ok(&self, q: usize) -> bool {
        q < self.num_qubits() && !self.dead_qubits.contains(&q)
    }

    /// Coupler exists, is not disabled, and joins two working qubits.
    pub fn coupler_ok(&self, a: usize, b: usize) -> bool {
        self.is_edge(a, b) && self.qubit_ok(a) && self.qubit_ok(b) && !self.dead_couplers.contains(&ordered(a, b))
    }

    pub fn operational_qubits(&self) -> usize {
        self.num_qubits() - self.dead_qubits.len()
    }

    pub fn operational_couplers(&self) -> usize {
        self.couplers().into_iter().filter(|&(a, b)| self.coupler_ok(a, b)).count()
    }

    pub fn defects(&self) -> Defects {
        Defects {
            qubits: self.dead_qubits.iter().copied().collect(),
            couplers: self.dead_couplers.iter().copied().collect(),
        }
    }

    pub fn has_defects(&self) -> bool {
        !self.dead_qubits.is_empty() || !self.dead_couplers.is_empty()
    }
}

/// Fixed pattern of seven isolated interior qubit defects on a 16 × 16
/// device, leaving 2041 qubits and 5974 couplers.
pub fn reference_defects() -> Defects {
    let g = ChimeraGraph::ideal(16, 16).expect("valid dims");
    let sites = [
        (2, 3, Side::Vertical, 1),
        (4, 10, Side::Horizontal, 2),
        (7, 6, Side::Vertical, 0),
        (9, 13, Side::Horizontal, 3),
        (11, 2, Side::Horizontal, 0),
        (12, 8, Side::Vertical, 2),
        (14, 12, Side::Vertical, 3),
    ];
    Defects { qubits: sites.iter().map(|&(r, c, s, i)| g.qubit(r, c, s, i)).collect(), couplers: Vec::new() }
}

/// `qubits` dead qubits and `couplers` dead couplers drawn uniformly.
pub fn random_defects<R: Rng + ?Sized>(rows: usize, cols: usize, qubits: usize, couplers: usize, rng: &mut R) -> Result<Defects> {
    let g = ChimeraGraph::ideal(rows, cols)?;
    if qubits > g.num_qubits() || couplers > g.num_couplers() {
        return Err(Error::Config("more defects than devices".into()));
    }
    let all = g.couplers();
    let mut q: Vec<usize> = sample(rng, g.num_qubits(), qubits).into_iter().collect();
    q.sort_unstable();
    let mut c: Vec<(usize, usize)> = sample(rng, all.len(), couplers).into_iter().map(|k| all[k]).collect();
    c.sort_unstable();
    Ok(Defects { qubits: q, couplers: c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn device_counts() {
        let g = ChimeraGraph::ideal(16, 16).unwrap();
        assert_eq!(g.num_qubits(), 2048);
        assert_eq!(g.couplers().len(), 6016);
        assert_eq!(g.num_couplers(), 6016);
        let one = ChimeraGraph::ideal(1, 1).unwrap();
        assert_eq!((one.num_qubits(), one.couplers().len()), (8, 16));
    }

    #[test]
    fn reference_pattern_counts() {
        let g = build_chimera(16, 16, &reference_defects()).unwrap();
        assert_eq!(g.operational_qubits(), 2041);
        assert_eq!(g.operational_couplers(), 5974);
    }

    #[test]
    fn dead_qubit_kills_its_couplers() {
        let ideal = ChimeraGraph::ideal(3, 3).unwrap();
        let q = ideal.qubit(1, 1, Side::Horizontal, 2);
        let g = build_chimera(3, 3, &Defects { qubits: vec![q], couplers: vec![] }).unwrap();
        let incident: Vec<_> = g.couplers().into_iter().filter(|&(a, b)| a == q || b == q).collect();
        assert_eq!(incident.len(), 6);
        assert!(incident.iter().all(|&(a, b)| !g.coupler_ok(a, b)));
        assert_eq!(g.operational_couplers(), ideal.num_couplers() - 6);
    }

    #[test]
    fn malformed_defects_rejected() {
        assert!(build_chimera(2, 2, &Defects { qubits: vec![32], couplers: vec![] }).is_err());
        assert!(build_chimera(2, 2, &Defects { qubits: vec![], couplers: vec![(0, 1)] }).is_err());
    }

    #[test]
    fn coords_round_trip() {
        let g = ChimeraGraph::ideal(3, 5).unwrap();
        for q in 0..g.num_qubits() {
            let c = g.coord(q);
            assert_eq!(g.qubit(c.row, c.col, c.side, c.index), q);
        }
        assert!(g.couplers().iter().all(|&(a, b)| g.is_edge(a, b)));
    }
}
