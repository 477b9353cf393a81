//! Four-qubit-chain embeddings of the open checkerboard lattice.
//!
//! Vertex `(r, c)` lives in cell `(r + 1, c + 1)`. A horizontal spin spans
//! the two cells it joins: in each it holds the horizontal qubit of its
//! link index plus one vertical qubit, so the chain is
//! `v - h - h - v` with three ferromagnetic couplers. Vertical spins are the
//! mirror image. Inside a vertex cell the four chains use all eight qubits
//! and every pair of chains meets on exactly two couplers.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chimera::{ChimeraGraph, ChimeraSpec, Side, SHORE};
use crate::error::{Error, Result};
use crate::ice::{CouplingSpec, Edge, FieldMap, IceLattice, LatticeDescriptor, Orientation, Topology};
use crate::sampler::{lattice_bonds, BondKind};

/// Programmed value of every chain coupler.
pub const CHAIN_COUPLING: f64 = -2.0;
/// Programmable coupler range.
pub const COUPLER_RANGE: (f64, f64) = (-2.0, 1.0);
/// AFM coupler value realizing `J = J_MAX` with two couplers.
pub const AFM_BASE: f64 = 0.96;
/// Total inter-chain coupling at `J = J_MAX`.
pub const J_MAX_PHYSICAL: f64 = 2.0 * AFM_BASE;

const REFERENCE_TRIES: usize = 16;
const REFERENCE_STEPS: usize = 400;
const MAX_RESAMPLES: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplerKind {
    Fm,
    Par,
    Perp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupler {
    pub a: usize,
    pub b: usize,
    pub kind: CouplerKind,
    /// Index into the logical bond list for AFM couplers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bond: Option<usize>,
    /// Calibration multiplier on the base value.
    #[serde(default = "unit")]
    pub trim: f64,
    pub value: f64,
}

fn unit() -> f64 {
    1.0
}

/// Logical-to-physical map with programmed couplers and per-qubit offsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub chimera: ChimeraSpec,
    pub lattice: LatticeDescriptor,
    /// Qubits of each logical site, `null` for vacancies.
    pub chains: Vec<Option<[usize; 4]>>,
    pub couplers: Vec<Coupler>,
    /// Flux-bias offsets by qubit, in coupler units.
    #[serde(default)]
    pub offsets: BTreeMap<usize, f64>,
    /// Multiplier on every perpendicular gadget.
    #[serde(default = "unit")]
    pub perp_gadget: f64,
}

impl Embedding {
    pub fn logical_lattice(&self) -> Result<IceLattice> {
        IceLattice::try_from(self.lattice.clone())
    }

    pub fn graph(&self) -> Result<ChimeraGraph> {
        ChimeraGraph::try_from(self.chimera.clone())
    }

    pub fn vacancies(&self) -> BTreeSet<usize> {
        self.chains.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(s, _)| s).collect()
    }

    /// Number of logical bonds the AFM couplers refer to.
    pub fn num_bonds(&self) -> usize {
        self.couplers.iter().filter_map(|c| c.bond).max().map_or(0, |b| b + 1)
    }

    /// Sets every coupler from `coupling` and the stored trims, clamped to
    /// the programmable range.
    pub fn program(&mut self, coupling: &CouplingSpec) {
        let (lo, hi) = COUPLER_RANGE;
        for c in &mut self.couplers {
            c.value = match c.kind {
                CouplerKind::Fm => CHAIN_COUPLING,
                CouplerKind::Par => (AFM_BASE * coupling.par() * c.trim).clamp(lo, hi),
                CouplerKind::Perp => (AFM_BASE * coupling.perp() * c.trim * self.perp_gadget).clamp(lo, hi),
            };
        }
    }

    /// Logical coupling per bond in `J_MAX` units, `Σ values / 1.92`,
    /// with optional per-coupler multipliers.
    pub fn logical_bonds(&self, coupler_factor: Option<&[f64]>) -> Vec<f64> {
        let mut j = vec![0.0; self.num_bonds()];
        for (k, c) in self.couplers.iter().enumerate() {
            if let Some(b) = c.bond {
                j[b] += c.value * coupler_factor.map_or(1.0, |f| f[k]) / J_MAX_PHYSICAL;
            }
        }
        j
    }

    /// Multipliers over the logical bond list that reproduce the programmed
    /// couplers relative to `coupling`.
    pub fn bond_scale(&self, coupling: &CouplingSpec, coupler_factor: Option<&[f64]>) -> Result<Vec<f64>> {
        let lattice = self.logical_lattice()?;
        let bonds = lattice_bonds(&lattice);
        let j = self.logical_bonds(coupler_factor);
        if j.len() != bonds.len() {
            return Err(Error::Embedding(format!("{} embedded bonds for {} logical bonds", j.len(), bonds.len())));
        }
        Ok(bonds
            .iter()
            .zip(j)
            .map(|(b, j)| {
                let base = match b.kind {
                    BondKind::Par => coupling.par(),
                    BondKind::Perp => coupling.perp(),
                };
                if base > 0.0 { j / base } else { 1.0 }
            })
            .collect())
    }

    /// Chain-summed offsets as logical fields in `J_MAX` units.
    pub fn logical_fields(&self, extra: Option<&[f64]>) -> FieldMap {
        let mut out = FieldMap::new();
        for (s, chain) in self.chains.iter().enumerate() {
            if let Some(q) = chain {
                let h: f64 = q
                    .iter()
                    .map(|q| self.offsets.get(q).copied().unwrap_or(0.0) + extra.map_or(0.0, |e| e[*q]))
                    .sum();
                if h != 0.0 {
                    out.insert(s, h / J_MAX_PHYSICAL);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::json("embedding", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json("embedding", e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(BufWriter::new(f), self).map_err(|e| Error::json(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_reader(BufReader::new(f)).map_err(|e| Error::json(path.display().to_string(), e))
    }
}

/// A cell whose random choices can be redrawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Cell {
    Vertex(usize, usize),
    West(usize),
    East(usize),
    North(usize),
    South(usize),
}

/// Random choices fixing every chain.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Assignment {
    rows: usize,
    cols: usize,
    /// Link index of horizontal site `(r, c)`, `rows × (cols + 1)`.
    hl: Vec<usize>,
    /// Link index of vertical site `(r, c)`, `(rows + 1) × cols`.
    vl: Vec<usize>,
    /// Swap the free horizontal qubits between N and S.
    hperm: Vec<bool>,
    /// Swap the free vertical qubits between W and E.
    vperm: Vec<bool>,
    end_w: Vec<usize>,
    end_e: Vec<usize>,
    end_n: Vec<usize>,
    end_s: Vec<usize>,
}

fn pick_other<R: Rng + ?Sized>(avoid: &[usize], rng: &mut R) -> usize {
    let options: Vec<usize> = (0..SHORE).filter(|k| !avoid.contains(k)).collect();
    options[rng.random_range(0..options.len())]
}

fn free_pair(a: usize, b: usize) -> [usize; 2] {
    let mut it = (0..SHORE).filter(|&k| k != a && k != b);
    [it.next().unwrap(), it.next().unwrap()]
}

impl Assignment {
    fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut a = Assignment {
            rows,
            cols,
            hl: vec![0; rows * (cols + 1)],
            vl: vec![0; (rows + 1) * cols],
            hperm: (0..rows * cols).map(|_| rng.random()).collect(),
            vperm: (0..rows * cols).map(|_| rng.random()).collect(),
            end_w: (0..rows).map(|_| rng.random_range(0..SHORE)).collect(),
            end_e: (0..rows).map(|_| rng.random_range(0..SHORE)).collect(),
            end_n: (0..cols).map(|_| rng.random_range(0..SHORE)).collect(),
            end_s: (0..cols).map(|_| rng.random_range(0..SHORE)).collect(),
        };
        for r in 0..rows {
            for c in 0..=cols {
                a.redraw_h(r, c, rng);
            }
        }
        for c in 0..cols {
            for r in 0..=rows {
                a.redraw_v(r, c, rng);
            }
        }
        a
    }

    fn h(&self, r: usize, c: usize) -> usize {
        self.hl[r * (self.cols + 1) + c]
    }

    fn v(&self, r: usize, c: usize) -> usize {
        self.vl[r * self.cols + c]
    }

    fn redraw_h<R: Rng + ?Sized>(&mut self, r: usize, c: usize, rng: &mut R) {
        let mut avoid = Vec::new();
        if c > 0 {
            avoid.push(self.h(r, c - 1));
        }
        if c < self.cols {
            avoid.push(self.h(r, c + 1));
        }
        self.hl[r * (self.cols + 1) + c] = pick_other(&avoid, rng);
    }

    fn redraw_v<R: Rng + ?Sized>(&mut self, r: usize, c: usize, rng: &mut R) {
        let mut avoid = Vec::new();
        if r > 0 {
            avoid.push(self.v(r - 1, c));
        }
        if r < self.rows {
            avoid.push(self.v(r + 1, c));
        }
        self.vl[r * self.cols + c] = pick_other(&avoid, rng);
    }

    /// Uniform new link index; a neighbour that now clashes is redrawn.
    fn scramble_h<R: Rng + ?Sized>(&mut self, r: usize, c: usize, rng: &mut R) {
        let x = rng.random_range(0..SHORE);
        self.hl[r * (self.cols + 1) + c] = x;
        if c > 0 && self.h(r, c - 1) == x {
            self.redraw_h(r, c - 1, rng);
        }
        if c < self.cols && self.h(r, c + 1) == x {
            self.redraw_h(r, c + 1, rng);
        }
    }

    fn scramble_v<R: Rng + ?Sized>(&mut self, r: usize, c: usize, rng: &mut R) {
        let x = rng.random_range(0..SHORE);
        self.vl[r * self.cols + c] = x;
        if r > 0 && self.v(r - 1, c) == x {
            self.redraw_v(r - 1, c, rng);
        }
        if r < self.rows && self.v(r + 1, c) == x {
            self.redraw_v(r + 1, c, rng);
        }
    }

    fn redraw<R: Rng + ?Sized>(&mut self, cell: Cell, rng: &mut R) {
        match cell {
            Cell::Vertex(r, c) => {
                self.scramble_h(r, c, rng);
                self.scramble_h(r, c + 1, rng);
                self.scramble_v(r, c, rng);
                self.scramble_v(r + 1, c, rng);
                self.hperm[r * self.cols + c] = rng.random();
                self.vperm[r * self.cols + c] = rng.random();
            }
            Cell::West(r) => {
                self.scramble_h(r, 0, rng);
                self.end_w[r] = rng.random_range(0..SHORE);
            }
            Cell::East(r) => {
                self.scramble_h(r, self.cols, rng);
                self.end_e[r] = rng.random_range(0..SHORE);
            }
            Cell::North(c) => {
                self.scramble_v(0, c, rng);
                self.end_n[c] = rng.random_range(0..SHORE);
            }
            Cell::South(c) => {
                self.scramble_v(self.rows, c, rng);
                self.end_s[c] = rng.random_range(0..SHORE);
            }
        }
    }

    /// In-cell (vertical, horizontal) qubit indices of the four chains of
    /// vertex `(r, c)` in N, E, S, W order.
    fn vertex_slots(&self, r: usize, c: usize) -> [(usize, usize); 4] {
        let (lw, le) = (self.h(r, c), self.h(r, c + 1));
        let (ln, ls) = (self.v(r, c), self.v(r + 1, c));
        let fh = free_pair(lw, le);
        let fv = free_pair(ln, ls);
        let k = r * self.cols + c;
        let (hn, hs) = if self.hperm[k] { (fh[1], fh[0]) } else { (fh[0], fh[1]) };
        let (vw, ve) = if self.vperm[k] { (fv[1], fv[0]) } else { (fv[0], fv[1]) };
        [(ln, hn), (ve, le), (ls, hs), (vw, lw)]
    }

    /// Qubits of the chain for `edge`, in path order.
    fn chain(&self, g: &ChimeraGraph, edge: Edge) -> [usize; 4] {
        let (r, c) = (edge.row, edge.col);
        match edge.orientation {
            Orientation::Horizontal => {
                let l = self.h(r, c);
                let va = if c == 0 { self.end_w[r] } else { self.vertex_slots(r, c - 1)[1].0 };
                let vb = if c == self.cols { self.end_e[r] } else { self.vertex_slots(r, c)[3].0 };
                [
                    g.qubit(r + 1, c, Side::Vertical, va),
                    g.qubit(r + 1, c, Side::Horizontal, l),
                    g.qubit(r + 1, c + 1, Side::Horizontal, l),
                    g.qubit(r + 1, c + 1, Side::Vertical, vb),
                ]
            }
            Orientation::Vertical => {
                let l = self.v(r, c);
                let ha = if r == 0 { self.end_n[c] } else { self.vertex_slots(r - 1, c)[2].1 };
                let hb = if r == self.rows { self.end_s[c] } else { self.vertex_slots(r, c)[0].1 };
                [
                    g.qubit(r, c + 1, Side::Horizontal, ha),
                    g.qubit(r, c + 1, Side::Vertical, l),
                    g.qubit(r + 1, c + 1, Side::Vertical, l),
                    g.qubit(r + 1, c + 1, Side::Horizontal, hb),
                ]
            }
        }
    }

    fn cell_of(&self, g: &ChimeraGraph, q: usize) -> Option<Cell> {
        let qc = g.coord(q);
        let (rr, cc) = (qc.row, qc.col);
        let inner_r = rr >= 1 && rr <= self.rows;
        let inner_c = cc >= 1 && cc <= self.cols;
        match (inner_r, inner_c) {
            (true, true) => Some(Cell::Vertex(rr - 1, cc - 1)),
            (true, false) if cc == 0 => Some(Cell::West(rr - 1)),
            (true, false) if cc == self.cols + 1 => Some(Cell::East(rr - 1)),
            (false, true) if rr == 0 => Some(Cell::North(cc - 1)),
            (false, true) if rr == self.rows + 1 => Some(Cell::South(cc - 1)),
            _ => None,
        }
    }
}

/// Chains plus the AFM gadget couplers of every active vertex.
struct Layout {
    chains: Vec<[usize; 4]>,
}

impl Layout {
    fn new(a: &Assignment, g: &ChimeraGraph, lattice: &IceLattice) -> Self {
        Layout { chains: (0..lattice.num_sites()).map(|s| a.chain(g, lattice.edge(s))).collect() }
    }

    /// In-cell (vertical, horizontal) qubits of the chain of `site` in the
    /// cell of vertex `v`.
    fn slot(&self, g: &ChimeraGraph, site: usize, v: (usize, usize)) -> (usize, usize) {
        let q = self.chains[site];
        let in_cell: Vec<usize> = q
            .into_iter()
            .filter(|&x| {
                let c = g.coord(x);
                (c.row, c.col) == (v.0 + 1, v.1 + 1)
            })
            .collect();
        let (mut vq, mut hq) = (0, 0);
        for x in in_cell {
            match g.coord(x).side {
                Side::Vertical => vq = x,
                Side::Horizontal => hq = x,
            }
        }
        (vq, hq)
    }

    fn fm_couplers(&self, site: usize) -> [(usize, usize); 3] {
        let q = self.chains[site];
        [(q[0], q[1]), (q[1], q[2]), (q[2], q[3])]
    }

    /// The two couplers joining sites `x` and `y` around vertex `v`.
    fn afm_pair(&self, g: &ChimeraGraph, lattice: &IceLattice, v: usize, x: usize, y: usize) -> [(usize, usize); 2] {
        let vc = lattice.vertex_coord(v);
        let (vx, hx) = self.slot(g, x, (vc.row, vc.col));
        let (vy, hy) = self.slot(g, y, (vc.row, vc.col));
        [(hx, vy), (vx, hy)]
    }
}

fn chain_ok(g: &ChimeraGraph, layout: &Layout, site: usize) -> Option<usize> {
    let q = layout.chains[site];
    if let Some(&bad) = q.iter().find(|&&x| !g.qubit_ok(x)) {
        return Some(bad);
    }
    layout.fm_couplers(site).into_iter().find(|&(a, b)| !g.coupler_ok(a, b)).map(|(a, _)| a)
}

const PAIRS: [(usize, usize); 6] = [(0, 2), (1, 3), (0, 1), (0, 3), (2, 1), (2, 3)];

/// First broken gadget coupler at vertex `v`.
fn vertex_ok(g: &ChimeraGraph, lattice: &IceLattice, layout: &Layout, v: usize) -> Option<(usize, usize, usize)> {
    let sites = lattice.vertex_sites(v);
    for (i, j) in PAIRS {
        for (a, b) in layout.afm_pair(g, lattice, v, sites[i], sites[j]) {
            if !g.coupler_ok(a, b) {
                return Some((sites[i], sites[j], a));
            }
        }
    }
    None
}

/// Sites that must be removed for this assignment, and the cells to blame.
fn forced_vacancies(a: &Assignment, g: &ChimeraGraph, full: &IceLattice) -> (BTreeSet<usize>, BTreeSet<Cell>) {
    let layout = Layout::new(a, g, full);
    let mut vacant = BTreeSet::new();
    let mut cells = BTreeSet::new();
    for s in 0..full.num_sites() {
        if let Some(q) = chain_ok(g, &layout, s) {
            vacant.insert(s);
            cells.extend(a.cell_of(g, q));
        }
    }
    loop {
        let mut changed = false;
        for v in 0..full.num_vertices() {
            let sites = full.vertex_sites(v);
            if sites.iter().any(|s| vacant.contains(s)) {
                continue;
            }
            if let Some((x, y, q)) = vertex_ok(g, full, &layout, v) {
                vacant.insert(x.min(y));
                cells.extend(a.cell_of(g, q));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (vacant, cells)
}

/// Cells violating validity when `lattice`'s vacancies are kept fixed.
fn violations(a: &Assignment, g: &ChimeraGraph, lattice: &IceLattice) -> BTreeSet<Cell> {
    let layout = Layout::new(a, g, lattice);
    let mut cells = BTreeSet::new();
    for s in lattice.present_sites() {
        if let Some(q) = chain_ok(g, &layout, s) {
            cells.extend(a.cell_of(g, q));
        }
    }
    for v in lattice.active_vertices() {
        if vertex_ok(g, lattice, &layout, v).is_some() {
            let c = lattice.vertex_coord(v);
            cells.insert(Cell::Vertex(c.row, c.col));
        }
    }
    cells
}

fn logical_dims(g: &ChimeraGraph) -> Result<(usize, usize)> {
    if g.rows() < 3 || g.cols() < 3 {
        return Err(Error::Embedding(format!("{}x{} cells cannot hold a vertex with its chains", g.rows(), g.cols())));
    }
    Ok((g.rows() - 2, g.cols() - 2))
}

fn build(a: &Assignment, g: &ChimeraGraph, lattice: &IceLattice) -> Embedding {
    let layout = Layout::new(a, g, lattice);
    let chains: Vec<Option<[usize; 4]>> =
        (0..lattice.num_sites()).map(|s| (!lattice.is_vacant(s)).then_some(layout.chains[s])).collect();
    let mut couplers = Vec::new();
    for s in lattice.present_sites() {
        for (x, y) in layout.fm_couplers(s) {
            couplers.push(Coupler { a: x, b: y, kind: CouplerKind::Fm, bond: None, trim: 1.0, value: CHAIN_COUPLING });
        }
    }
    let index: HashMap<(usize, usize, usize), (usize, BondKind)> = lattice_bonds(lattice)
        .into_iter()
        .enumerate()
        .map(|(k, b)| ((b.vertex, b.a, b.b), (k, b.kind)))
        .collect();
    for v in lattice.active_vertices() {
        let sites = lattice.vertex_sites(v);
        for (i, j) in PAIRS {
            let (x, y) = (sites[i], sites[j]);
            let &(bond, kind) = index
                .get(&(v, x, y))
                .or_else(|| index.get(&(v, y, x)))
                .expect("every vertex pair is a logical bond");
            let kind = match kind {
                BondKind::Par => CouplerKind::Par,
                BondKind::Perp => CouplerKind::Perp,
            };
            for (qa, qb) in layout.afm_pair(g, lattice, v, x, y) {
                couplers.push(Coupler { a: qa, b: qb, kind, bond: Some(bond), trim: 1.0, value: AFM_BASE });
            }
        }
    }
    Embedding {
        chimera: g.clone().into(),
        lattice: lattice.descriptor(),
        chains,
        couplers,
        offsets: BTreeMap::new(),
        perp_gadget: 1.0,
    }
}

/// Embeds the largest open lattice the graph holds, removing as few chains
/// as a randomized local search finds. Returns the embedding programmed at
/// `J = J_MAX` and the logical lattice with its vacancies.
pub fn embed_ice<R: Rng + ?Sized>(graph: &ChimeraGraph, rng: &mut R) -> Result<(Embedding, IceLattice)> {
    let (rows, cols) = logical_dims(graph)?;
    let full = IceLattice::open(rows, cols)?;
    let mut best: Option<(Assignment, BTreeSet<usize>)> = None;
    let tries = if graph.has_defects() { REFERENCE_TRIES } else { 1 };
    for _ in 0..tries {
        let mut a = Assignment::random(rows, cols, rng);
        let (mut vac, mut cells) = forced_vacancies(&a, graph, &full);
        for _ in 0..REFERENCE_STEPS {
            if cells.is_empty() {
                break;
            }
            let pool: Vec<Cell> = cells.iter().copied().collect();
            let mut b = a.clone();
            b.redraw(pool[rng.random_range(0..pool.len())], rng);
            let (bv, bc) = forced_vacancies(&b, graph, &full);
            if bv.len() <= vac.len() {
                a = b;
                vac = bv;
                cells = bc;
            }
        }
        if best.as_ref().is_none_or(|(_, v)| vac.len() < v.len()) {
            best = Some((a, vac));
        }
    }
    let (a, vac) = best.expect("at least one try");
    let vacancies: Vec<Edge> = vac.iter().map(|&s| full.edge(s)).collect();
    let lattice = IceLattice::with_vacancies(rows, cols, Topology::Open, &vacancies)?;
    Ok((build(&a, graph, &lattice), lattice))
}

/// A fresh random embedding that realizes exactly `lattice`'s vacancies.
pub fn embed_with_vacancies<R: Rng + ?Sized>(graph: &ChimeraGraph, lattice: &IceLattice, rng: &mut R) -> Result<Embedding> {
    let (rows, cols) = logical_dims(graph)?;
    if lattice.rows() != rows || lattice.cols() != cols || lattice.topology() != Topology::Open {
        return Err(Error::Embedding(format!(
            "lattice {}x{} does not match the {}x{} vertex grid of the device",
            lattice.rows(),
            lattice.cols(),
            rows,
            cols
        )));
    }
    let mut a = Assignment::random(rows, cols, rng);
    for _ in 0..MAX_RESAMPLES {
        let bad = violations(&a, graph, lattice);
        if bad.is_empty() {
            return Ok(build(&a, graph, lattice));
        }
        let mut pool: Vec<Cell> = bad.into_iter().collect();
        pool.shuffle(rng);
        a.redraw(pool[0], rng);
    }
    Err(Error::Embedding("vacancy set is unsatisfiable on this device".into()))
}

/// `count` embeddings sharing one vacancy set, the first being the
/// reference that fixed it.
pub fn embed_family<R: Rng + ?Sized>(graph: &ChimeraGraph, count: usize, rng: &mut R) -> Result<(IceLattice, Vec<Embedding>)> {
    let (first, lattice) = embed_ice(graph, rng)?;
    let mut out = vec![first];
    while out.len() < count {
        out.push(embed_with_vacancies(graph, &lattice, rng)?);
    }
    out.truncate(count.max(1));
    Ok((lattice, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::chimera::{build_chimera, reference_defects};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ideal_device_has_no_vacancies() {
        let g = ChimeraGraph::ideal(6, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (e, l) = embed_ice(&g, &mut rng).unwrap();
        assert!(!l.has_vacancies());
        assert_eq!((l.rows(), l.cols()), (4, 4));
        let fm = e.couplers.iter().filter(|c| c.kind == CouplerKind::Fm).count();
        assert_eq!(fm, 3 * l.num_sites());
        assert_eq!(e.couplers.len() - fm, 12 * 16);
        let used: BTreeSet<usize> = e.chains.iter().flatten().flatten().copied().collect();
        assert_eq!(used.len(), 4 * l.num_sites());
    }

    #[test]
    fn vertex_cells_use_all_sixteen_couplers() {
        let g = ChimeraGraph::ideal(4, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (e, _) = embed_ice(&g, &mut rng).unwrap();
        for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let inside: BTreeSet<(usize, usize)> = e
                .couplers
                .iter()
                .filter(|k| {
                    let (a, b) = (g.coord(k.a), g.coord(k.b));
                    (a.row, a.col) == (r, c) && (b.row, b.col) == (r, c)
                })
                .map(|k| (k.a.min(k.b), k.a.max(k.b)))
                .collect();
            assert_eq!(inside.len(), 16);
        }
    }

    #[test]
    fn reference_defects_share_vacancies() {
        let g = build_chimera(16, 16, &reference_defects()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (l, family) = embed_family(&g, 3, &mut rng).unwrap();
        assert!(l.has_vacancies());
        assert!(family.iter().all(|e| e.vacancies() == l.vacant_set()));
        assert_ne!(family[1].chains, family[2].chains);
    }
}
