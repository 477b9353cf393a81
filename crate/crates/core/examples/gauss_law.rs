//! Total charge equals boundary flux, vacancies included.
use spinice::ice::{boundary_flux, total_charge, Edge, IceLattice, SpinState, Topology};
use spinice::sampler::chain_rng;

fn main() -> spinice::Result<()> {
    let holes = [Edge::horizontal(2, 3), Edge::vertical(4, 1), Edge::vertical(5, 5)];
    let l = IceLattice::with_vacancies(8, 8, Topology::Open, &holes)?;
    let mut rng = chain_rng(1, 0);
    let mut worst = 0;
    for _ in 0..100_000 {
        let s = SpinState::random(&l, &mut rng);
        worst = worst.max((total_charge(&s, &l) - boundary_flux(&s, &l)).abs());
    }
    println!("{} sites, {} active vertices, largest violation {worst}", l.num_sites(), l.num_active());
    Ok(())
}
