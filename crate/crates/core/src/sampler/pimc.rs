//! Path-integral Monte Carlo for the transverse-field model.
//!
//! The Suzuki-Trotter mapping replaces each spin by a periodic worldline of
//! `M` slices. Slices share the classical energy scaled by `dtau = 1/(M T)`
//! and neighbouring slices of one site are ferromagnetically bound with
//! `K = -ln(tanh(dtau * gamma)) / 2`.
//!
//! Local moves alone tunnel between ice states only through multi-spin
//! kink sequences, which become rare at low `T`. Ice loops found on one
//! slice are therefore also proposed as whole-worldline flips. Those leave
//! every temporal bond unchanged.

use rand::Rng;

use super::loops::{revert, walk, LoopSettings};
use super::problem::Problem;
use crate::error::{Error, Result};
use crate::ice::{Spin, SpinState};

/// Default slice count: `max(16, ceil(4 max(gamma, 1) / T))`, so `dtau`
/// is at most a quarter of both `1/gamma` and the coupling scale.
pub fn default_slices(gamma: f64, temperature: f64) -> usize {
    ((4.0 * gamma.max(1.0) / temperature).ceil() as usize).max(16)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Worldlines {
    slices: usize,
    // site-major: spins[site * slices + k]
    spins: Vec<Spin>,
}

impl Worldlines {
    /// Every slice equal to `state`.
    pub fn from_state(state: &SpinState, slices: usize) -> Self {
        assert!(slices >= 1);
        let mut spins = Vec::with_capacity(state.len() * slices);
        for &v in state.values() {
            spins.extend(std::iter::repeat_n(v, slices));
        }
        Worldlines { slices, spins }
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn num_sites(&self) -> usize {
        self.spins.len() / self.slices
    }

    #[inline]
    pub fn get(&self, site: usize, slice: usize) -> Spin {
        self.spins[site * self.slices + slice]
    }

    pub fn worldline(&self, site: usize) -> &[Spin] {
        &self.spins[site * self.slices..(site + 1) * self.slices]
    }

    pub fn slice(&self, k: usize) -> Vec<Spin> {
        (0..self.num_sites()).map(|s| self.get(s, k)).collect()
    }

    /// Mean of `S_a S_b` over slices.
    pub fn correlation(&self, a: usize, b: usize) -> f64 {
        let (wa, wb) = (self.worldline(a), self.worldline(b));
        wa.iter().zip(wb).map(|(&x, &y)| f64::from(x * y)).sum::<f64>() / self.slices as f64
    }

    /// Trotter estimator of `<sigma^x>` at `site`.
    pub fn transverse_estimator(&self, site: usize, gamma: f64, temperature: f64) -> f64 {
        let a = gamma / (temperature * self.slices as f64);
        let (t, ct) = (a.tanh(), 1.0 / a.tanh());
        let w = self.worldline(site);
        let m = self.slices;
        (0..m).map(|k| if w[k] == w[(k + 1) % m] { t } else { ct }).sum::<f64>() / m as f64
    }

    #[inline]
    fn slice_local_field(&self, problem: &Problem, site: usize, k: usize) -> f64 {
        let model = problem.model();
        let mut acc = model.field(site);
        for &(j, w) in model.neighbours(site) {
            acc += w * f64::from(self.spins[j as usize * self.slices + k]);
        }
        acc
    }
}

/// Move set of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PimcMoves {
    /// Allow temporal clusters that wrap the whole worldline and
    /// whole-worldline loop flips. Disabling them leaves the stationary
    /// distribution unchanged but makes every spin change go through kinks,
    /// so update rates grow with `gamma`.
    pub worldline_flips: bool,
}

impl Default for PimcMoves {
    fn default() -> Self {
        PimcMoves { worldline_flips: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PimcStats {
    pub local_accepted: usize,
    pub cluster_accepted: usize,
    pub loops_accepted: usize,
}

/// One sweep: `M` local slice-flip attempts per mobile site, one
/// temporal-cluster attempt per mobile site and, with worldline flips, one
/// loop attempt per four mobile sites.
pub fn pimc_sweep<R: Rng + ?Sized>(
    worldlines: &mut Worldlines,
    problem: &Problem,
    gamma: f64,
    temperature: f64,
    moves: PimcMoves,
    rng: &mut R,
) -> Result<PimcStats> {
    if !(gamma > 0.0) {
        return Err(Error::Config(format!("path-integral sweep needs gamma > 0, got {gamma}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::Config(format!("temperature must be positive, got {temperature}")));
    }
    let m = worldlines.slices;
    if m < 2 {
        return Err(Error::Config("path-integral sweep needs at least two slices".into()));
    }
    let sites = problem.mobile_sites();
    let mut stats = PimcStats::default();
    if sites.is_empty() {
        return Ok(stats);
    }
    let dtau = 1.0 / (temperature * m as f64);
    let k_bond = -0.5 * (dtau * gamma).tanh().ln();
    let p_bond = -(-2.0 * k_bond).exp_m1();

    for _ in 0..sites.len() * m {
        let s = sites[rng.random_range(0..sites.len())];
        let k = rng.random_range(0..m);
        let idx = s * m + k;
        let v = f64::from(worldlines.spins[idx]);
        let prev = f64::from(worldlines.spins[s * m + (k + m - 1) % m]);
        let next = f64::from(worldlines.spins[s * m + (k + 1) % m]);
        let de = -2.0 * v * worldlines.slice_local_field(problem, s, k);
        let action = dtau * de + 2.0 * k_bond * v * (prev + next);
        if action <= 0.0 || rng.random::<f64>() < (-action).exp() {
            worldlines.spins[idx] = -worldlines.spins[idx];
            stats.local_accepted += 1;
        }
    }

    let mut members = Vec::with_capacity(m);
    for _ in 0..sites.len() {
        let s = sites[rng.random_range(0..sites.len())];
        let base = s * m;
        let k0 = rng.random_range(0..m);
        let value = worldlines.spins[base + k0];
        members.clear();
        members.push(k0);
        let mut k = k0;
        while members.len() < m {
            let nk = (k + 1) % m;
            if worldlines.spins[base + nk] != value || rng.random::<f64>() >= p_bond {
                break;
            }
            members.push(nk);
            k = nk;
        }
        let mut k = k0;
        while members.len() < m {
            let pk = (k + m - 1) % m;
            if worldlines.spins[base + pk] != value || rng.random::<f64>() >= p_bond {
                break;
            }
            members.push(pk);
            k = pk;
        }
        if members.len() == m && !moves.worldline_flips {
            continue;
        }
        let de: f64 = members
            .iter()
            .map(|&k| -2.0 * f64::from(value) * worldlines.slice_local_field(problem, s, k))
            .sum();
        let action = dtau * de;
        if action <= 0.0 || rng.random::<f64>() < (-action).exp() {
            for &k in &members {
                worldlines.spins[base + k] = -value;
            }
            stats.cluster_accepted += 1;
        }
    }

    if moves.worldline_flips {
        let settings = LoopSettings::for_problem(problem);
        let mut path = Vec::new();
        let mut flips = Vec::new();
        for _ in 0..sites.len().div_ceil(4) {
            let k0 = rng.random_range(0..m);
            let mut slice = SpinState::from_raw(worldlines.slice(k0));
            path.clear();
            if walk(&mut slice, problem, settings, rng, &mut path).is_err() {
                revert(&mut slice, &path);
                continue;
            }
            path.sort_unstable();
            flips.clear();
            for chunk in path.chunk_by(|a, b| a == b) {
                if chunk.len() % 2 == 1 {
                    flips.push(chunk[0]);
                }
            }
            let mut de = 0.0;
            for &s in &flips {
                for k in 0..m {
                    let idx = s * m + k;
                    de += -2.0 * f64::from(worldlines.spins[idx]) * worldlines.slice_local_field(problem, s, k);
                    worldlines.spins[idx] = -worldlines.spins[idx];
                }
            }
            let action = dtau * de;
            if action <= 0.0 || rng.random::<f64>() < (-action).exp() {
                stats.loops_accepted += 1;
            } else {
                for &s in &flips {
                    for v in &mut worldlines.spins[s * m..(s + 1) * m] {
                        *v = -*v;
                    }
                }
            }
        }
    }
    Ok(stats)
}

/// Projects onto one uniformly chosen slice.
pub fn quench_readout<R: Rng + ?Sized>(worldlines: &Worldlines, rng: &mut R) -> SpinState {
    let k = if worldlines.slices == 1 { 0 } else { rng.random_range(0..worldlines.slices) };
    SpinState::from_raw(worldlines.slice(k))
}
