//! S(q) of the degenerate ensemble and the pinch-point width.
use std::f64::consts::PI;

use spinice::ice::{CouplingSpec, IceLattice};
use spinice::observables::{pinch_cross_section, structure_factor, CutAxis, QGrid};
use spinice::sampler::{run_protocol, Engine, ExposureParams, InitialState, Problem, ProtocolSpec};

fn main() -> spinice::Result<()> {
    let l = IceLattice::open(8, 8)?;
    let protocol = ProtocolSpec { chain_length: 264, burn_in: 8, repetitions: 1, seed: 7, engine: Engine::Loop, ..Default::default() };
    for j in [0.125, 0.25, 1.0] {
        let p = Problem::new(l.clone(), CouplingSpec::degenerate(j))?;
        let chain = run_protocol(&p, &protocol, &ExposureParams::classical(0.089, 8), &InitialState::Random, 0)?;
        let sf = structure_factor(chain.equilibrium(), &l, QGrid::default())?;
        let cut = pinch_cross_section(&sf, (-2.0 * PI, 0.0), CutAxis::Qy);
        println!("J={j}: max/mean {:.2}, pinch FWHM {:?}", sf.max() / sf.mean(), cut.fwhm);
    }
    Ok(())
}
