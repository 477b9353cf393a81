//! Reference computations for the integration tests. Everything here works
//! from edge positions and dipole axes only, never from the library's own
//! vertex tables.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use spinice::ice::{CouplingSpec, IceLattice, Topology};

/// Offsets from an edge midpoint to the vertex it borders, for the N, E, S
/// and W slots of that vertex.
const TO_VERTEX: [(f64, f64); 4] = [(0.0, 0.5), (-0.5, 0.0), (0.0, -0.5), (0.5, 0.0)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    I,
    II,
    III,
    IV,
}

impl Kind {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Geometry rebuilt from `site_position` and `site_axis`.
pub struct Geometry {
    pub rows: usize,
    pub cols: usize,
    /// N, E, S, W present sites for every vertex whose four edges exist.
    pub vertices: Vec<Option<[usize; 4]>>,
    /// Dipole vector of each site at spin value `+1`, `None` when vacant.
    pub axis: Vec<Option<(f64, f64)>>,
}

impl Geometry {
    pub fn new(l: &IceLattice) -> Self {
        let (rows, cols) = (l.rows(), l.cols());
        let periodic = l.topology() == Topology::Periodic;
        let key = |x2: i64, y2: i64| {
            if periodic {
                (x2.rem_euclid(2 * cols as i64), y2.rem_euclid(2 * rows as i64))
            } else {
                (x2, y2)
            }
        };
        let mut at = HashMap::new();
        let mut axis = vec![None; l.num_sites()];
        for s in 0..l.num_sites() {
            if l.is_vacant(s) {
                continue;
            }
            let (x, y) = l.site_position(s);
            at.insert(key((2.0 * x).round() as i64, (2.0 * y).round() as i64), s);
            axis[s] = Some(l.site_axis(s));
        }
        let vertices = (0..rows * cols)
            .map(|v| {
                let (r, c) = ((v / cols) as i64, (v % cols) as i64);
                let slots = [(2 * c, 2 * r - 1), (2 * c + 1, 2 * r), (2 * c, 2 * r + 1), (2 * c - 1, 2 * r)];
                let found: Vec<usize> = slots.iter().filter_map(|&(x, y)| at.get(&key(x, y)).copied()).collect();
                <[usize; 4]>::try_from(found).ok()
            })
            .collect();
        Geometry { rows, cols, vertices, axis }
    }

    fn inward(&self, spins: &[i8], site: usize, slot: usize) -> bool {
        let (ax, ay) = self.axis[site].expect("present site");
        let m = f64::from(spins[site]);
        let (dx, dy) = TO_VERTEX[slot];
        m * (ax * dx + ay * dy) > 0.0
    }

    /// In minus out dipoles, `None` for inactive vertices.
    pub fn charge(&self, spins: &[i8], v: usize) -> Option<i64> {
        let sites = self.vertices[v]?;
        Some((0..4).map(|k| if self.inward(spins, sites[k], k) { 1 } else { -1 }).sum())
    }

    pub fn kind(&self, spins: &[i8], v: usize) -> Option<Kind> {
        let sites = self.vertices[v]?;
        let inn: Vec<bool> = (0..4).map(|k| self.inward(spins, sites[k], k)).collect();
        let n_in = inn.iter().filter(|&&b| b).count();
        Some(match n_in {
            2 if inn[0] == inn[2] => Kind::I,
            2 => Kind::II,
            1 | 3 => Kind::III,
            _ => Kind::IV,
        })
    }

    /// How many active vertices each site borders.
    pub fn degree(&self) -> Vec<usize> {
        let mut d = vec![0; self.axis.len()];
        for sites in self.vertices.iter().flatten() {
            for &s in sites {
                d[s] += 1;
            }
        }
        d
    }

    /// Net inward flux over sites bordering exactly one active vertex.
    pub fn boundary_flux(&self, spins: &[i8]) -> i64 {
        let d = self.degree();
        let mut flux = 0;
        for sites in self.vertices.iter().flatten() {
            for (k, &s) in sites.iter().enumerate() {
                if d[s] == 1 {
                    flux += if self.inward(spins, s, k) { 1 } else { -1 };
                }
            }
        }
        flux
    }

    pub fn type_counts(&self, spins: &[i8]) -> [usize; 4] {
        let mut c = [0; 4];
        for v in 0..self.vertices.len() {
            if let Some(k) = self.kind(spins, v) {
                c[k.index()] += 1;
            }
        }
        c
    }

    /// Energy from the vertex-type table plus `h s` fields.
    pub fn energy(&self, spins: &[i8], c: &CouplingSpec) -> f64 {
        let eps = type_energies(c);
        let vertices: f64 = (0..self.vertices.len()).filter_map(|v| self.kind(spins, v)).map(|k| eps[k.index()]).sum();
        let fields: f64 = c.fields.iter().map(|(&s, &h)| h * f64::from(spins[s])).sum();
        vertices + fields
    }

    /// Pair couplings `J_ij s_i s_j` implied by the vertices: collinear
    /// pairs get `J_par`, perpendicular ones `J_perp`. Repeated pairs add.
    pub fn bonds(&self, c: &CouplingSpec) -> Vec<(usize, usize, f64)> {
        let mut acc: HashMap<(usize, usize), f64> = HashMap::new();
        for sites in self.vertices.iter().flatten() {
            for a in 0..4 {
                for b in a + 1..4 {
                    let j = if (b - a) % 2 == 0 { c.par() } else { c.perp() };
                    let (i, k) = (sites[a].min(sites[b]), sites[a].max(sites[b]));
                    *acc.entry((i, k)).or_default() += j;
                }
            }
        }
        let mut v: Vec<_> = acc.into_iter().map(|((i, k), j)| (i, k, j)).collect();
        v.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        v
    }
}

/// Energies of Types I to IV.
pub fn type_energies(c: &CouplingSpec) -> [f64; 4] {
    let (p, q) = (c.par(), c.perp());
    [-4.0 * q + 2.0 * p, -2.0 * p, 0.0, 4.0 * q + 2.0 * p]
}

/// All `2^n` assignments of `sites`, others fixed to `base`.
pub fn enumerate(base: &[i8], sites: &[usize]) -> Vec<Vec<i8>> {
    assert!(sites.len() <= 20);
    (0..1u32 << sites.len())
        .map(|bits| {
            let mut s = base.to_vec();
            for (k, &i) in sites.iter().enumerate() {
                s[i] = if bits >> k & 1 == 1 { 1 } else { -1 };
            }
            s
        })
        .collect()
}

/// Index of a configuration among `enumerate(_, sites)`.
pub fn config_index(spins: &[i8], sites: &[usize]) -> usize {
    sites.iter().enumerate().map(|(k, &i)| usize::from(spins[i] == 1) << k).sum()
}

pub fn boltzmann(energies: &[f64], t: f64) -> Vec<f64> {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|e| (-(e - e0) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Thermal `<z_i z_j>` of `H = Σ J z z + Σ h z - Γ Σ x` by exact
/// diagonalization, for every pair `i < j`.
pub fn tfim_correlations(
    n: usize,
    bonds: &[(usize, usize, f64)],
    fields: &[f64],
    gamma: f64,
    t: f64,
) -> HashMap<(usize, usize), f64> {
    assert!(n <= 12);
    let dim = 1usize << n;
    let z = |b: usize, i: usize| if b >> i & 1 == 1 { 1.0 } else { -1.0 };
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim {
        let mut d = 0.0;
        for &(i, j, jij) in bonds {
            d += jij * z(b, i) * z(b, j);
        }
        for (i, &hi) in fields.iter().enumerate() {
            d += hi * z(b, i);
        }
        h[(b, b)] = d;
        for i in 0..n {
            h[(b ^ (1 << i), b)] -= gamma;
        }
    }
    let eig = SymmetricEigen::new(h);
    let e0 = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = eig.eigenvalues.iter().map(|e| (-(e - e0) / t).exp()).collect();
    let zsum: f64 = w.iter().sum();
    // diagonal of the density matrix in the z basis
    let mut rho = vec![0.0; dim];
    for (k, &wk) in w.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        for b in 0..dim {
            rho[b] += wk * col[b] * col[b] / zsum;
        }
    }
    let mut out = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            out.insert((i, j), (0..dim).map(|b| rho[b] * z(b, i) * z(b, j)).sum());
        }
    }
    out
}

/// Every charge-neutral state of a lattice with no dangling edges, by
/// depth-first search with a check at each completed vertex.
pub fn ice_states(l: &IceLattice) -> Vec<Vec<i8>> {
    let g = Geometry::new(l);
    let n = l.num_sites();
    // vertices completed by assigning site k
    let mut last = vec![0; g.vertices.len()];
    for (v, sites) in g.vertices.iter().enumerate() {
        if let Some(s) = sites {
            last[v] = *s.iter().max().unwrap();
        }
    }
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, sites) in g.vertices.iter().enumerate() {
        if sites.is_some() {
            closes[last[v]].push(v);
        }
    }
    let mut out = Vec::new();
    let mut spins = vec![1i8; n];
    fn go(k: usize, spins: &mut Vec<i8>, g: &Geometry, closes: &[Vec<usize>], out: &mut Vec<Vec<i8>>) {
        if k == spins.len() {
            out.push(spins.clone());
            return;
        }
        for v in [1, -1] {
            spins[k] = v;
            if closes[k].iter().all(|&u| g.charge(spins, u) == Some(0)) {
                go(k + 1, spins, g, closes, out);
            }
        }
    }
    go(0, &mut spins, &g, &closes, &mut out);
    out
}

/// `S(q) = |F⊥(q)|² / N` by a direct sum, with dipole directions taken from
/// which end of each edge lies on an even vertex.
pub fn structure_factor_direct(l: &IceLattice, states: &[Vec<i8>], qx: f64, qy: f64) -> f64 {
    let mut acc = 0.0;
    let sites: Vec<usize> = (0..l.num_sites()).filter(|&s| !l.is_vacant(s)).collect();
    let dirs: Vec<(f64, f64, f64, f64)> = sites
        .iter()
        .map(|&s| {
            let (x, y) = l.site_position(s);
            let horizontal = (y - y.round()).abs() < 1e-9;
            let (a, b) = if horizontal { ((x - 0.5, y), (x + 0.5, y)) } else { ((x, y - 0.5), (x, y + 0.5)) };
            let even = |p: (f64, f64)| (p.0.round() as i64 + p.1.round() as i64).rem_euclid(2) == 0;
            let toward = if even(b) { b } else { a };
            (x, y, 2.0 * (toward.0 - x), 2.0 * (toward.1 - y))
        })
        .collect();
    let q2 = qx * qx + qy * qy;
    for st in states {
        let (mut fxr, mut fxi, mut fyr, mut fyi) = (0.0, 0.0, 0.0, 0.0);
        for (k, &s) in sites.iter().enumerate() {
            let (x, y, dx, dy) = dirs[k];
            let m = f64::from(st[s]);
            let ph = qx * x + qy * y;
            fxr += m * dx * ph.cos();
            fxi += m * dx * ph.sin();
            fyr += m * dy * ph.cos();
            fyi += m * dy * ph.sin();
        }
        let full = fxr * fxr + fxi * fxi + fyr * fyr + fyi * fyi;
        let pr = (qx * fxr + qy * fyr) / q2.sqrt();
        let pi = (qx * fxi + qy * fyi) / q2.sqrt();
        acc += full - pr * pr - pi * pi;
    }
    acc / (sites.len() * states.len()) as f64
}

/// `K0(x) = ∫₀^∞ exp(-x cosh t) dt` by Simpson's rule.
pub fn k0_quadrature(x: f64) -> f64 {
    let top = (60.0 / x).acosh().max(1.0);
    let n = 20_000;
    let h = top / n as f64;
    let f = |t: f64| (-x * t.cosh()).exp();
    let mut s = f(0.0) + f(top);
    for k in 1..n {
        s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Pearson chi-square of `observed` against `expected` probabilities, bins
/// with fewer than five expected counts pooled. Returns `(chi2, dof, z)`
/// where `z = (chi2 - dof) / sqrt(2 dof)`.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, usize, f64) {
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let (mut chi2, mut bins) = (0.0, 0usize);
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = n * p;
        if e < 5.0 {
            pool_o += o as f64;
            pool_e += e;
        } else {
            chi2 += (o as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pool_e >= 5.0 {
        chi2 += (pool_o - pool_e).powi(2) / pool_e;
        bins += 1;
    }
    let dof = bins.saturating_sub(1).max(1);
    (chi2, dof, (chi2 - dof as f64) / (2.0 * dof as f64).sqrt())
}

pub fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}
