use rand::Rng;

use super::problem::Problem;
use crate::ice::SpinState;

/// Metropolis acceptance for an energy change `delta` at temperature `t`.
#[inline]
pub fn accept<R: Rng + ?Sized>(delta: f64, t: f64, rng: &mut R) -> bool {
    delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp()
}

/// One sweep of single-spin Metropolis updates: as many attempts as there
/// are mobile sites, each on a uniformly chosen site. Returns the number of
/// accepted flips.
pub fn metropolis_sweep<R: Rng + ?Sized>(state: &mut SpinState, problem: &Problem, t: f64, rng: &mut R) -> usize {
    let sites = problem.mobile_sites();
    if sites.is_empty() {
        return 0;
    }
    let model = problem.model();
    let mut accepted = 0;
    for _ in 0..sites.len() {
        let s = sites[rng.random_range(0..sites.len())];
        let delta = model.flip_delta(state.values(), s);
        if accept(delta, t, rng) {
            state.flip(s);
            accepted += 1;
        }
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ice::{CouplingSpec, IceLattice};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_temperature_keeps_neel() {
        let l = IceLattice::open(4, 4).unwrap();
        let p = Problem::new(l.clone(), CouplingSpec::degenerate(1.0)).unwrap();
        let mut s = SpinState::neel(&l, 1);
        let before = s.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(metropolis_sweep(&mut s, &p, 1e-6, &mut rng), 0);
        }
        assert_eq!(s, before);
    }

    #[test]
    fn zero_delta_always_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..1000).all(|_| accept(0.0, 0.01, &mut rng)));
    }
}
