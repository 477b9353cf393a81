//! Path-integral exposure: worldlines, the transverse estimator and readouts.
use spinice::ice::{vertex_type_counts, CouplingSpec, IceLattice};
use spinice::sampler::{chain_rng, default_slices, pimc_sweep, quench_readout, PimcMoves, Problem, Worldlines};

fn main() -> spinice::Result<()> {
    let l = IceLattice::open(6, 6)?;
    let p = Problem::new(l.clone(), CouplingSpec::degenerate(1.0))?;
    let (gamma, t) = (0.34, 0.089);
    let m = default_slices(gamma, t);
    let mut rng = chain_rng(5, 0);
    let mut w = Worldlines::from_state(&p.random_state(&mut rng), m);
    for sweep in 1..=400 {
        pimc_sweep(&mut w, &p, gamma, t, PimcMoves::default(), &mut rng)?;
        if sweep % 100 == 0 {
            let sx: f64 = (0..w.num_sites()).map(|s| w.transverse_estimator(s, gamma, t)).sum::<f64>() / w.num_sites() as f64;
            let readout = quench_readout(&w, &mut rng);
            println!("sweep {sweep}: M={m} <sx>={sx:.3} readout types {:?}", vertex_type_counts(&readout, &l));
        }
    }
    Ok(())
}
