//! Zero-flux clamp versus flux injection: the injected monopole stays put.
use spinice::ice::{boundary_flux, charge_map, CouplingSpec, IceLattice};
use spinice::pinning::{resolve, BoundaryCondition};
use spinice::sampler::{chain_rng, run_protocol, Engine, ExposureParams, InitialState, ProtocolSpec, LONG_SWEEPS};

fn main() -> spinice::Result<()> {
    let l = IceLattice::open(8, 8)?;
    let c = CouplingSpec::degenerate(1.0);
    let protocol = ProtocolSpec { chain_length: 10, burn_in: 2, repetitions: 1, seed: 6, engine: Engine::Loop, ..Default::default() };
    for bc in [BoundaryCondition::zero_flux(), BoundaryCondition::flux_injected(None)] {
        let pin = resolve(&l, &c, &bc, &mut chain_rng(6, 1))?;
        let chain = run_protocol(&pin.problem(&l, &c)?, &protocol, &ExposureParams::classical(0.089, LONG_SWEEPS), &InitialState::Random, 0)?;
        let last = chain.states.last().unwrap();
        let charges: Vec<(usize, i8)> = charge_map(last, &l).into_iter().enumerate().filter_map(|(v, q)| q.filter(|&q| q != 0).map(|q| (v, q))).collect();
        println!("{}: flux {} monopoles {charges:?}", bc.kind.label(), boundary_flux(last, &l));
    }
    Ok(())
}
