//! Closed-loop updates on the ice manifold.
//!
//! A walk starts at a charge-neutral vertex, repeatedly reverses one of the
//! two outgoing arrows at the head and moves along it, and stops when it
//! returns to the start. Every traversed vertex keeps its charge, and the
//! proposal probability of a loop equals that of its reverse, so uniform
//! acceptance samples the ice states uniformly and Metropolis acceptance on
//! the energy change samples their Boltzmann weights.

use rand::Rng;

use super::metropolis::accept;
use super::problem::Problem;
use crate::ice::SpinState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopRejection {
    /// The starting vertex is inactive or charged.
    NoStart,
    /// The walk reached a dangling edge or an inactive vertex.
    Boundary,
    Frozen,
    /// The walk entered a monopole.
    Charged,
    TooLong,
    /// Metropolis rejection of the finished loop.
    Energy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopOutcome {
    /// Loop flipped; `flipped` is the number of spins whose value changed.
    Flipped { flipped: usize },
    Rejected(LoopRejection),
}

impl LoopOutcome {
    pub fn is_flipped(&self) -> bool {
        matches!(self, LoopOutcome::Flipped { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopSettings {
    /// Walks longer than this many steps are abandoned.
    pub max_steps: usize,
}

impl LoopSettings {
    pub fn for_problem(problem: &Problem) -> Self {
        LoopSettings { max_steps: 16 * problem.lattice().num_sites().max(4) }
    }
}

fn current_charge(state: &SpinState, problem: &Problem, v: usize) -> i8 {
    let l = problem.lattice();
    l.inward_sign(v) * l.vertex_sites(v).iter().map(|&s| state.value(s)).sum::<i8>()
}

/// Pointing out of `v` in the current state?
#[inline]
fn points_out(state: &SpinState, problem: &Problem, v: usize, site: usize) -> bool {
    state.value(site) * problem.lattice().inward_sign(v) == -1
}

/// Runs one walk, leaving the flips applied. Returns the sites in
/// traversal order plus the accumulated energy change, or the reason the
/// walk failed (the caller reverts).
pub(super) fn walk<R: Rng + ?Sized>(
    state: &mut SpinState,
    problem: &Problem,
    settings: LoopSettings,
    rng: &mut R,
    path: &mut Vec<usize>,
) -> Result<f64, LoopRejection> {
    let lattice = problem.lattice();
    let model = problem.model();
    let start = rng.random_range(0..lattice.num_vertices());
    if !lattice.is_active(start) || current_charge(state, problem, start) != 0 {
        return Err(LoopRejection::NoStart);
    }
    let mut head = start;
    let mut arrived_by = usize::MAX;
    let mut delta = 0.0;
    loop {
        if path.len() >= settings.max_steps {
            return Err(LoopRejection::TooLong);
        }
        let mut candidates = [0usize; 4];
        let mut n = 0;
        for s in lattice.vertex_sites(head) {
            if s != arrived_by && points_out(state, problem, head, s) {
                candidates[n] = s;
                n += 1;
            }
        }
        debug_assert_eq!(n, 2, "ice vertex must offer two exits");
        let site = candidates[rng.random_range(0..n)];
        if problem.is_frozen(site) {
            return Err(LoopRejection::Frozen);
        }
        let next = lattice.site_vertices(site).find(|&u| u != head);
        let Some(next) = next.filter(|&u| lattice.is_active(u)) else {
            return Err(LoopRejection::Boundary);
        };
        delta += model.flip_delta(state.values(), site);
        state.flip(site);
        path.push(site);
        if next == start {
            return Ok(delta);
        }
        // arriving removed one inward arrow, so a neutral vertex now reads -2
        if current_charge(state, problem, next) != -2 {
            return Err(LoopRejection::Charged);
        }
        head = next;
        arrived_by = site;
    }
}

pub(super) fn revert(state: &mut SpinState, path: &[usize]) {
    for &s in path.iter().rev() {
        state.flip(s);
    }
}

fn net_flips(path: &mut [usize]) -> usize {
    path.sort_unstable();
    let mut count = 0;
    let mut i = 0;
    while i < path.len() {
        let mut j = i;
        while j < path.len() && path[j] == path[i] {
            j += 1;
        }
        count += (j - i) % 2;
        i = j;
    }
    count
}

fn attempt<R: Rng + ?Sized>(
    state: &mut SpinState,
    problem: &Problem,
    temperature: Option<f64>,
    settings: LoopSettings,
    rng: &mut R,
) -> LoopOutcome {
    let mut path = Vec::new();
    match walk(state, problem, settings, rng, &mut path) {
        Ok(delta) => {
            if let Some(t) = temperature {
                if !accept(delta, t, rng) {
                    revert(state, &path);
                    return LoopOutcome::Rejected(LoopRejection::Energy);
                }
            }
            LoopOutcome::Flipped { flipped: net_flips(&mut path) }
        }
        Err(why) => {
            revert(state, &path);
            LoopOutcome::Rejected(why)
        }
    }
}

/// Energy-blind loop flip: samples the ice manifold uniformly.
pub fn loop_update<R: Rng + ?Sized>(
    state: &mut SpinState,
    problem: &Problem,
    settings: LoopSettings,
    rng: &mut R,
) -> LoopOutcome {
    attempt(state, problem, None, settings, rng)
}

/// Loop flip accepted with the Metropolis rule on its energy change.
pub fn loop_update_thermal<R: Rng + ?Sized>(
    state: &mut SpinState,
    problem: &Problem,
    temperature: f64,
    settings: LoopSettings,
    rng: &mut R,
) -> LoopOutcome {
    attempt(state, problem, Some(temperature), settings, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ice::{charge_map, CouplingSpec, IceLattice, SpinState};
    use crate::sampler::metropolis::metropolis_sweep;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn preserves_charges_on_torus() {
        let l = IceLattice::periodic(6, 6).unwrap();
        let p = Problem::new(l.clone(), CouplingSpec::degenerate(1.0)).unwrap();
        let mut s = SpinState::neel(&l, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let settings = LoopSettings::for_problem(&p);
        let mut flipped = 0;
        for _ in 0..2000 {
            let before = charge_map(&s, &l);
            if loop_update(&mut s, &p, settings, &mut rng).is_flipped() {
                flipped += 1;
            }
            assert_eq!(charge_map(&s, &l), before);
        }
        assert!(flipped > 1000);
    }

    #[test]
    fn monopoles_stay_put() {
        let l = IceLattice::open(8, 8).unwrap();
        let p = Problem::new(l.clone(), CouplingSpec::degenerate(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = SpinState::random(&l, &mut rng);
        for _ in 0..5 {
            metropolis_sweep(&mut s, &p, 0.5, &mut rng);
        }
        let settings = LoopSettings::for_problem(&p);
        let before = charge_map(&s, &l);
        for _ in 0..500 {
            loop_update(&mut s, &p, settings, &mut rng);
        }
        assert_eq!(charge_map(&s, &l), before);
    }

    #[test]
    fn fully_frozen_region_yields_flag() {
        let l = IceLattice::open(1, 1).unwrap();
        let frozen = (0..4).map(|s| (s, SpinState::neel(&l, 1).value(s))).collect();
        let p = Problem::with_frozen(l.clone(), CouplingSpec::degenerate(1.0), &frozen).unwrap();
        let mut s = SpinState::neel(&l, 1);
        let before = s.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = loop_update(&mut s, &p, LoopSettings::for_problem(&p), &mut rng);
        assert!(matches!(out, LoopOutcome::Rejected(_)));
        assert_eq!(s, before);
    }
}
