//! Pinned monopole against a clamped background, fitted with A K0(x/xi).
use spinice::ice::{CouplingSpec, IceLattice};
use spinice::observables::{screening_profile, MonopoleCounts};
use spinice::pinning::{central_interior_vertex, resolve, BoundaryCondition};
use spinice::sampler::{chain_rng, run_protocol, ExposureParams, InitialState, ProtocolSpec};

fn counts(l: &IceLattice, c: &CouplingSpec, bc: &BoundaryCondition, seed: u64) -> spinice::Result<MonopoleCounts> {
    let protocol = ProtocolSpec { chain_length: 4096, burn_in: 32, repetitions: 1, seed, ..Default::default() };
    let mut acc = MonopoleCounts::new(l);
    for r in 0..16 {
        let p = resolve(l, c, bc, &mut chain_rng(seed, 100 + r))?.problem(l, c)?;
        for s in run_protocol(&p, &protocol, &ExposureParams::classical(0.089, 2), &InitialState::Random, r)?.equilibrium() {
            acc.add(s, l);
        }
    }
    Ok(acc)
}

fn main() -> spinice::Result<()> {
    let l = IceLattice::open(12, 12)?;
    let c = CouplingSpec::degenerate(0.125);
    let pinned = central_interior_vertex(&l);
    let d = counts(&l, &c, &BoundaryCondition::pinned_monopole(pinned), 8)?.finish(pinned)?;
    let b = counts(&l, &c, &BoundaryCondition::zero_flux(), 9)?.finish(None)?;
    let profile = screening_profile(&d, &b)?;
    for bin in profile.bins.iter().take(8) {
        println!("r={:.2} excess {:+.3}", bin.distance, bin.mean);
    }
    println!("fit: {:?}", profile.fit);
    Ok(())
}
