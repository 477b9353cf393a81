//! Short exposures: sample-to-sample change with and without free monopoles.
use spinice::ice::{CouplingSpec, IceLattice};
use spinice::observables::{mixing_metrics, summarize_mixing};
use spinice::pinning::{resolve, BoundaryCondition};
use spinice::sampler::{chain_rng, run_protocol, Engine, EngineOptions, ExposureParams, InitialState, ProtocolSpec, SHORT_SWEEPS};

fn main() -> spinice::Result<()> {
    let l = IceLattice::open(8, 8)?;
    let c = CouplingSpec::degenerate(1.0);
    let exposure = ExposureParams { gamma: 0.08, temperature: 0.089, sweeps: SHORT_SWEEPS };
    let protocol = ProtocolSpec {
        chain_length: 64,
        burn_in: 16,
        repetitions: 1,
        seed: 10,
        engine: Engine::Pimc,
        options: EngineOptions { kinetic: true, ..Default::default() },
    };
    for bc in [BoundaryCondition::zero_flux(), BoundaryCondition::flux_injected(None), BoundaryCondition::pinned_monopole(None)] {
        let mut metrics = Vec::new();
        for r in 0..6 {
            let p = resolve(&l, &c, &bc, &mut chain_rng(10, r))?.problem(&l, &c)?;
            metrics.push(mixing_metrics(&run_protocol(&p, &protocol, &exposure, &InitialState::Random, r)?, bc.kind));
        }
        let s = summarize_mixing(&metrics, &mut chain_rng(10, 99))?;
        println!("{:>16}: hamming {:.2} [{:.2}, {:.2}], surplus {:.2}", bc.kind.label(), s.hamming.mean, s.hamming.lo, s.hamming.hi, s.surplus.mean);
    }
    Ok(())
}
