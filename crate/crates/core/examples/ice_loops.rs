//! Energy-blind loop updates wander uniformly over the ice states of a torus.
use std::collections::HashSet;

use spinice::ice::{monopole_count, CouplingSpec, IceLattice, SpinState};
use spinice::sampler::{chain_rng, loop_update, LoopSettings, Problem};

fn main() -> spinice::Result<()> {
    let l = IceLattice::periodic(4, 4)?;
    let p = Problem::new(l.clone(), CouplingSpec::degenerate(1.0))?;
    let settings = LoopSettings::for_problem(&p);
    let mut rng = chain_rng(4, 0);
    let mut s = SpinState::neel(&l, 1);
    let mut seen = HashSet::new();
    let mut flipped = 0;
    for _ in 0..200_000 {
        flipped += usize::from(loop_update(&mut s, &p, settings, &mut rng).is_flipped());
        seen.insert(s.values().to_vec());
    }
    println!("{} distinct ice states, {flipped} loops accepted, monopoles {}", seen.len(), monopole_count(&s, &l));
    Ok(())
}
