//! Geometry of the checkerboard ice lattice.
//!
//! Vertices sit on an `rows x cols` grid. Spins live on the edges between
//! vertices. With [`Topology::Open`] every vertex still has four edges: edges
//! on the outer ring dangle and belong to a single vertex. A spin value of
//! `+1` means the dipole on that edge points toward its A-sublattice end.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    /// `+1` for A, `-1` for B.
    #[inline]
    pub fn sign(self) -> i8 {
        match self {
            Sublattice::A => 1,
            Sublattice::B => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    #[default]
    Open,
    Periodic,
}

/// Edge address: a horizontal edge `(r, c)` is the west edge of vertex
/// `(r, c)`; a vertical edge `(r, c)` is the north edge of vertex `(r, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub row: usize,
    pub col: usize,
    pub orientation: Orientation,
}

impl Edge {
    pub fn horizontal(row: usize, col: usize) -> Self {
        Edge { row, col, orientation: Orientation::Horizontal }
    }

    pub fn vertical(row: usize, col: usize) -> Self {
        Edge { row, col, orientation: Orientation::Vertical }
    }
}

/// Compass slot of a spin around a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexCoord {
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "LatticeDescriptor", into = "LatticeDescriptor")]
pub struct IceLattice {
    rows: usize,
    cols: usize,
    topology: Topology,
    vacant: Vec<bool>,
    // NESW site ids per vertex
    vertex_sites: Vec<[usize; 4]>,
    // (first, second) end vertices per site: (west, east) or (north, south)
    site_vertices: Vec<[Option<usize>; 2]>,
    active: Vec<bool>,
    active_neighbours: Vec<u8>,
}

/// Serialized form of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDescriptor {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub topology: Topology,
    #[serde(default)]
    pub vacancies: Vec<Edge>,
}

impl TryFrom<LatticeDescriptor> for IceLattice {
    type Error = Error;

    fn try_from(d: LatticeDescriptor) -> Result<Self> {
        IceLattice::with_vacancies(d.rows, d.cols, d.topology, &d.vacancies)
    }
}

impl From<IceLattice> for LatticeDescriptor {
    fn from(l: IceLattice) -> Self {
        l.descriptor()
    }
}

impl PartialEq for IceLattice {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.topology == other.topology
            && self.vacant == other.vacant
    }
}

impl IceLattice {
    pub fn open(rows: usize, cols: usize) -> Result<Self> {
        Self::with_vacancies(rows, cols, Topology::Open, &[])
    }

    pub fn periodic(rows: usize, cols: usize) -> Result<Self> {
        Self::with_vacancies(rows, cols, Topology::Periodic, &[])
    }

    pub fn with_vacancies(
        rows: usize,
        cols: usize,
        topology: Topology,
        vacancies: &[Edge],
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Lattice(format!("empty vertex grid {rows}x{cols}")));
        }
        if topology == Topology::Periodic && (rows % 2 != 0 || cols % 2 != 0 || rows < 2 || cols < 2)
        {
            return Err(Error::Lattice(format!(
                "periodic lattice needs even dimensions >= 2, got {rows}x{cols}"
            )));
        }
        let mut lattice = IceLattice {
            rows,
            cols,
            topology,
            vacant: Vec::new(),
            vertex_sites: Vec::with_capacity(rows * cols),
            site_vertices: Vec::new(),
            active: Vec::new(),
            active_neighbours: Vec::new(),
        };
        let n = lattice.num_sites();
        lattice.vacant = vec![false; n];
        lattice.site_vertices = vec![[None, None]; n];
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                let north = lattice.vertical_index(r, c);
                let south = lattice.vertical_index(lattice.wrap_row(r + 1), c);
                let west = lattice.horizontal_index(r, c);
                let east = lattice.horizontal_index(r, lattice.wrap_col(c + 1));
                lattice.vertex_sites.push([north, east, south, west]);
                lattice.site_vertices[west][1] = Some(v);
                lattice.site_vertices[east][0] = Some(v);
                lattice.site_vertices[north][1] = Some(v);
                lattice.site_vertices[south][0] = Some(v);
            }
        }
        for e in vacancies {
            let s = lattice
                .site_index(*e)
                .ok_or_else(|| Error::Lattice(format!("vacancy {e:?} is outside the lattice")))?;
            lattice.vacant[s] = true;
        }
        lattice.refresh_activity();
        Ok(lattice)
    }

    fn refresh_activity(&mut self) {
        self.active = self
            .vertex_sites
            .iter()
            .map(|sites| sites.iter().all(|&s| !self.vacant[s]))
            .collect();
        self.active_neighbours = self
            .site_vertices
            .iter()
            .map(|ends| ends.iter().flatten().filter(|&&v| self.active[v]).count() as u8)
            .collect();
    }

    #[inline]
    fn wrap_row(&self, r: usize) -> usize {
        match self.topology {
            Topology::Open => r,
            Topology::Periodic => r % self.rows,
        }
    }

    #[inline]
    fn wrap_col(&self, c: usize) -> usize {
        match self.topology {
            Topology::Open => c,
            Topology::Periodic => c % self.cols,
        }
    }

    fn horizontal_cols(&self) -> usize {
        match self.topology {
            Topology::Open => self.cols + 1,
            Topology::Periodic => self.cols,
        }
    }

    fn vertical_rows(&self) -> usize {
        match self.topology {
            Topology::Open => self.rows + 1,
            Topology::Periodic => self.rows,
        }
    }

    fn num_horizontal(&self) -> usize {
        self.rows * self.horizontal_cols()
    }

    #[inline]
    fn horizontal_index(&self, r: usize, c: usize) -> usize {
        r * self.horizontal_cols() + c
    }

    #[inline]
    fn vertical_index(&self, r: usize, c: usize) -> usize {
        self.num_horizontal() + r * self.cols + c
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Total number of spin sites, vacant ones included.
    pub fn num_sites(&self) -> usize {
        self.num_horizontal() + self.vertical_rows() * self.cols
    }

    pub fn num_vertices(&self) -> usize {
        self.rows * self.cols
    }

    pub fn site_index(&self, e: Edge) -> Option<usize> {
        match e.orientation {
            Orientation::Horizontal => (e.row < self.rows && e.col < self.horizontal_cols())
                .then(|| self.horizontal_index(e.row, e.col)),
            Orientation::Vertical => (e.row < self.vertical_rows() && e.col < self.cols)
                .then(|| self.vertical_index(e.row, e.col)),
        }
    }

    pub fn edge(&self, site: usize) -> Edge {
        let nh = self.num_horizontal();
        if site < nh {
            let hc = self.horizontal_cols();
            Edge::horizontal(site / hc, site % hc)
        } else {
            let s = site - nh;
            Edge::vertical(s / self.cols, s % self.cols)
        }
    }

    #[inline]
    pub fn vertex_index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    #[inline]
    pub fn vertex_coord(&self, v: usize) -> VertexCoord {
        VertexCoord { row: v / self.cols, col: v % self.cols }
    }

    #[inline]
    pub fn sublattice(&self, v: usize) -> Sublattice {
        let VertexCoord { row, col } = self.vertex_coord(v);
        if (row + col) % 2 == 0 {
            Sublattice::A
        } else {
            Sublattice::B
        }
    }

    /// Site ids around vertex `v` in N, E, S, W order.
    #[inline]
    pub fn vertex_sites(&self, v: usize) -> [usize; 4] {
        self.vertex_sites[v]
    }

    /// The (up to two) vertices bordering a site.
    #[inline]
    pub fn site_vertices(&self, site: usize) -> impl Iterator<Item = usize> + '_ {
        self.site_vertices[site].iter().flatten().copied()
    }

    #[inline]
    pub fn is_vacant(&self, site: usize) -> bool {
        self.vacant[site]
    }

    #[inline]
    pub fn is_active(&self, v: usize) -> bool {
        self.active[v]
    }

    pub fn active_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(|&v| self.active[v])
    }

    pub fn num_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn present_sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_sites()).filter(|&s| !self.vacant[s])
    }

    pub fn vacancies(&self) -> Vec<Edge> {
        (0..self.num_sites()).filter(|&s| self.vacant[s]).map(|s| self.edge(s)).collect()
    }

    pub fn has_vacancies(&self) -> bool {
        self.vacant.iter().any(|&v| v)
    }

    /// Number of active vertices bordering `site`.
    #[inline]
    pub fn active_degree(&self, site: usize) -> usize {
        self.active_neighbours[site] as usize
    }

    /// Present sites bordering exactly one active vertex, including the
    /// interior boundaries opened up by vacancies.
    pub fn boundary_sites(&self) -> Vec<usize> {
        self.present_sites().filter(|&s| self.active_degree(s) == 1).collect()
    }

    /// The active vertex a boundary site belongs to.
    pub fn boundary_owner(&self, site: usize) -> Option<usize> {
        let mut it = self.site_vertices(site).filter(|&v| self.active[v]);
        match (it.next(), it.next()) {
            (Some(v), None) => Some(v),
            _ => None,
        }
    }

    /// True if the vertex is active and all four of its spins are shared
    /// with other active vertices.
    pub fn is_interior(&self, v: usize) -> bool {
        self.active[v] && self.vertex_sites[v].iter().all(|&s| self.active_degree(s) == 2)
    }

    /// `+1` when spin value `+1` on `site` points into vertex `v`.
    #[inline]
    pub fn inward_sign(&self, v: usize) -> i8 {
        self.sublattice(v).sign()
    }

    /// Midpoint of the edge in vertex-spacing units, `(x, y) = (col, row)`.
    pub fn site_position(&self, site: usize) -> (f64, f64) {
        let e = self.edge(site);
        match e.orientation {
            Orientation::Horizontal => (e.col as f64 - 0.5, e.row as f64),
            Orientation::Vertical => (e.col as f64, e.row as f64 - 0.5),
        }
    }

    /// Unit vector the dipole takes when the spin value is `+1`.
    pub fn site_axis(&self, site: usize) -> (f64, f64) {
        let e = self.edge(site);
        // the second end ((r, c) itself) is A when r + c is even
        let toward_second = (e.row + e.col) % 2 == 0;
        let s = if toward_second { 1.0 } else { -1.0 };
        match e.orientation {
            Orientation::Horizontal => (s, 0.0),
            Orientation::Vertical => (0.0, s),
        }
    }

    pub fn vertex_position(&self, v: usize) -> (f64, f64) {
        let c = self.vertex_coord(v);
        (c.col as f64, c.row as f64)
    }

    pub fn descriptor(&self) -> LatticeDescriptor {
        LatticeDescriptor {
            rows: self.rows,
            cols: self.cols,
            topology: self.topology,
            vacancies: self.vacancies(),
        }
    }

    /// Copy of this lattice with extra vacant sites.
    pub fn with_extra_vacancies(&self, extra: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        for &s in extra {
            if s >= out.num_sites() {
                return Err(Error::Lattice(format!("site {s} out of range")));
            }
            out.vacant[s] = true;
        }
        out.refresh_activity();
        Ok(out)
    }

    pub fn vacant_set(&self) -> BTreeSet<usize> {
        (0..self.num_sites()).filter(|&s| self.vacant[s]).collect()
    }
}
