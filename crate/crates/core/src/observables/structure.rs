//! Vector magnetic structure factor and pinch-point cross sections.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ice::{IceLattice, Orientation, SpinState};

pub const DEFAULT_Q_POINTS: usize = 128;

/// Square reciprocal-space grid, `points` values per axis spaced evenly over
/// `[-extent, extent)`. With the default `extent = 2π` this is one full
/// period of S(q), so cuts wrap around.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    pub points: usize,
    pub extent: f64,
}

impl Default for QGrid {
    fn default() -> Self {
        QGrid { points: DEFAULT_Q_POINTS, extent: 2.0 * PI }
    }
}

impl QGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    pub fn value(&self, k: usize) -> f64 {
        -self.extent + k as f64 * self.spacing()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.value(k)).collect()
    }

    /// Index of the grid value nearest `q`.
    pub fn nearest(&self, q: f64) -> usize {
        let k = ((q + self.extent) / self.spacing()).round();
        k.clamp(0.0, (self.points - 1) as f64) as usize
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 || !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::Config(format!("bad q grid: {} points, extent {}", self.points, self.extent)));
        }
        Ok(())
    }
}

/// S(q) on a [`QGrid`], stored row-major with `qy` as the row index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureFactorGrid {
    pub grid: QGrid,
    pub values: Vec<f64>,
    pub samples: usize,
}

impl StructureFactorGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.points + ix]
    }

    /// Value at the grid point nearest `(qx, qy)`.
    pub fn at_q(&self, qx: f64, qy: f64) -> f64 {
        self.at(self.grid.nearest(qx), self.grid.nearest(qy))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Separable DFT plan for one lattice and q grid.
struct Plan {
    n: usize,
    q: Vec<f64>,
    // per orientation: distinct x and y coordinates and the sites on them
    groups: [Group; 2],
}

struct Group {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // (site, x index, y index, axis sign)
    sites: Vec<(usize, usize, usize, f64)>,
}

impl Plan {
    fn new(lattice: &IceLattice, grid: QGrid) -> Result<Self> {
        grid.validate()?;
        let groups = [Orientation::Horizontal, Orientation::Vertical].map(|o| {
            let mut xs: Vec<f64> = Vec::new();
            let mut ys: Vec<f64> = Vec::new();
            let mut raw = Vec::new();
            for s in lattice.present_sites().filter(|&s| lattice.edge(s).orientation == o) {
                let (x, y) = lattice.site_position(s);
                let (ax, ay) = lattice.site_axis(s);
                raw.push((s, x, y, ax + ay));
                xs.push(x);
                ys.push(y);
            }
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            ys.sort_by(f64::total_cmp);
            ys.dedup();
            let find = |v: &[f64], t: f64| v.iter().position(|&u| u == t).unwrap();
            let sites = raw.into_iter().map(|(s, x, y, a)| (s, find(&xs, x), find(&ys, y), a)).collect();
            Group { xs, ys, sites }
        });
        let n = groups.iter().map(|g| g.sites.len()).sum();
        if n == 0 {
            return Err(Error::Empty("lattice has no present sites"));
        }
        Ok(Plan { n, q: grid.values(), groups })
    }

    /// Adds `|F⊥(q)|²` for one state onto `acc`.
    fn accumulate(&self, state: &SpinState, acc: &mut [f64]) {
        let nq = self.q.len();
        // F_x from horizontal dipoles, F_y from vertical ones
        let f: Vec<Vec<(f64, f64)>> = self.groups.iter().map(|g| self.transform(g, state)).collect();
        for iy in 0..nq {
            for ix in 0..nq {
                let (qx, qy) = (self.q[ix], self.q[iy]);
                let (fxr, fxi) = f[0][iy * nq + ix];
                let (fyr, fyi) = f[1][iy * nq + ix];
                let full = fxr * fxr + fxi * fxi + fyr * fyr + fyi * fyi;
                let q2 = qx * qx + qy * qy;
                let value = if q2 < 1e-24 {
                    0.5 * full
                } else {
                    let pr = (qx * fxr + qy * fyr) / q2.sqrt();
                    let pi = (qx * fxi + qy * fyi) / q2.sqrt();
                    full - (pr * pr + pi * pi)
                };
                acc[iy * nq + ix] += value.max(0.0);
            }
        }
    }

    fn transform(&self, g: &Group, state: &SpinState) -> Vec<(f64, f64)> {
        let nq = self.q.len();
        // stage one: sum along x for every (y, qx)
        let mut rows = vec![(0.0, 0.0); g.ys.len() * nq];
        let phase_x: Vec<(f64, f64)> = g
            .xs
            .iter()
            .flat_map(|&x| self.q.iter().map(move |&q| ((q * x).cos(), (q * x).sin())))
            .collect();
        for &(s, xi, yi, a) in &g.sites {
            let m = a * f64::from(state.value(s));
            let row = &mut rows[yi * nq..(yi + 1) * nq];
            let ph = &phase_x[xi * nq..(xi + 1) * nq];
            for (r, &(c, si)) in row.iter_mut().zip(ph) {
                r.0 += m * c;
                r.1 += m * si;
            }
        }
        // stage two: sum over y
        let mut out = vec![(0.0, 0.0); nq * nq];
        for (yi, &y) in g.ys.iter().enumerate() {
            let row = &rows[yi * nq..(yi + 1) * nq];
            for iy in 0..nq {
                let (c, s) = ((self.q[iy] * y).cos(), (self.q[iy] * y).sin());
                let dst = &mut out[iy * nq..(iy + 1) * nq];
                for (d, &(re, im)) in dst.iter_mut().zip(row) {
                    d.0 += re * c - im * s;
                    d.1 += re * s + im * c;
                }
            }
        }
        out
    }
}

/// Vector structure factor `S(q) = |F⊥(q)|² / N` averaged over `states`,
/// where `F = Σ mᵢ e^{iq·rᵢ}` runs over present dipoles and `⊥` removes the
/// component along `q`. At `q = 0` the two axis limits are averaged.
pub fn structure_factor(states: &[SpinState], lattice: &IceLattice, grid: QGrid) -> Result<StructureFactorGrid> {
    if states.is_empty() {
        return Err(Error::Empty("no states for structure factor"));
    }
    let plan = Plan::new(lattice, grid)?;
    let mut acc = vec![0.0; grid.points * grid.points];
    for s in states {
        plan.accumulate(s, &mut acc);
    }
    let norm = (plan.n * states.len()) as f64;
    acc.iter_mut().for_each(|v| *v /= norm);
    Ok(StructureFactorGrid { grid, values: acc, samples: states.len() })
}

/// Direction of a one-dimensional cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutAxis {
    Qx,
    Qy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub centre: (f64, f64),
    pub axis: CutAxis,
    /// Offsets from the centre along the cut.
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
    pub fwhm: Option<f64>,
}

impl CrossSection {
    /// Reciprocal of the width, when the peak was resolved.
    pub fn correlation_length(&self) -> Option<f64> {
        self.fwhm.map(|w| 1.0 / w)
    }
}

/// Peak must exceed the profile minimum by this fraction of the peak.
const MIN_CONTRAST: f64 = 0.1;

/// Cut through the grid point nearest `centre` along `axis`, wrapping
/// periodically, with offsets in `[-extent, extent)`.
pub fn pinch_cross_section(sf: &StructureFactorGrid, centre: (f64, f64), axis: CutAxis) -> CrossSection {
    let g = sf.grid;
    let n = g.points;
    let (cx, cy) = (g.nearest(centre.0), g.nearest(centre.1));
    let half = n / 2;
    let mut offsets = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let d = k as isize - half as isize;
        let idx = |c: usize| (c as isize + d).rem_euclid(n as isize) as usize;
        let v = match axis {
            CutAxis::Qx => sf.at(idx(cx), cy),
            CutAxis::Qy => sf.at(cx, idx(cy)),
        };
        offsets.push(d as f64 * g.spacing());
        values.push(v);
    }
    let fwhm = fwhm(&offsets, &values, half);
    CrossSection { centre: (g.value(cx), g.value(cy)), axis, offsets, values, fwhm }
}

/// Full width at half maximum of the peak nearest index `centre`, above the
/// profile minimum, with linear interpolation at both crossings. `None` if
/// there is no clear peak or a crossing falls off the profile.
pub fn fwhm(x: &[f64], y: &[f64], centre: usize) -> Option<f64> {
    let n = y.len();
    if n < 3 || centre >= n {
        return None;
    }
    let lo = centre.saturating_sub(2);
    let hi = (centre + 2).min(n - 1);
    let peak = (lo..=hi).max_by(|&a, &b| y[a].total_cmp(&y[b]))?;
    let base = y.iter().copied().fold(f64::INFINITY, f64::min);
    let top = y[peak];
    if !(top - base > MIN_CONTRAST * top.abs()) {
        return None;
    }
    let half = base + 0.5 * (top - base);
    let mut right = None;
    for k in peak..n - 1 {
        if y[k + 1] <= half {
            right = Some(x[k] + (x[k + 1] - x[k]) * (y[k] - half) / (y[k] - y[k + 1]));
            break;
        }
    }
    let mut left = None;
    for k in (1..=peak).rev() {
        if y[k - 1] <= half {
            left = Some(x[k] - (x[k] - x[k - 1]) * (y[k] - half) / (y[k] - y[k - 1]));
            break;
        }
    }
    Some(right? - left?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_zero_and_pi() {
        let g = QGrid::default();
        assert_eq!(g.value(g.nearest(0.0)), 0.0);
        assert!((g.value(g.nearest(PI)) - PI).abs() < 1e-12);
        assert!((g.value(0) + 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_width_is_recovered() {
        let x: Vec<f64> = (0..129).map(|k| (k as f64 - 64.0) * 0.05).collect();
        for w in [0.3, 0.55, 1.0] {
            let y: Vec<f64> = x.iter().map(|&t| 1.0 / (1.0 + (2.0 * t / w).powi(2))).collect();
            let got = fwhm(&x, &y, 64).unwrap();
            assert!((got - w).abs() < 0.05, "{got} vs {w}");
        }
    }

    #[test]
    fn flat_profile_has_no_width() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(fwhm(&x, &[1.0; 20], 10).is_none());
    }

    #[test]
    fn non_negative() {
        let l = IceLattice::open(4, 4).unwrap();
        let mut rng = rand::rng();
        let states: Vec<_> = (0..3).map(|_| SpinState::random(&l, &mut rng)).collect();
        let sf = structure_factor(&states, &l, QGrid { points: 32, extent: 2.0 * PI }).unwrap();
        assert!(sf.values.iter().all(|&v| v >= 0.0));
    }
}
