//! Type-I fraction across the degeneracy point with the Metropolis engine.
use spinice::ice::{CouplingSpec, IceLattice};
use spinice::observables::vertex_frequencies;
use spinice::sampler::{run_protocol, ExposureParams, InitialState, Problem, ProtocolSpec};

fn main() -> spinice::Result<()> {
    let l = IceLattice::open(8, 8)?;
    let protocol = ProtocolSpec { chain_length: 64, burn_in: 16, repetitions: 1, seed: 3, ..Default::default() };
    for ratio in [0.96, 0.98, 1.0, 1.02, 1.04] {
        let p = Problem::new(l.clone(), CouplingSpec::with_ratio(ratio, 1.0))?;
        let chain = run_protocol(&p, &protocol, &ExposureParams::classical(0.3, 64), &InitialState::Random, 0)?;
        let f = vertex_frequencies(chain.equilibrium(), &l)?.fractions;
        println!("J_perp/J_par {ratio:.2}: I {:.3} II {:.3} III {:.3} IV {:.3}", f[0], f[1], f[2], f[3]);
    }
    Ok(())
}
