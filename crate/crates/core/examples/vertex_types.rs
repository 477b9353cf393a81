//! The sixteen vertex configurations with their type, charge and energy.
use spinice::ice::{all_configurations, vertex_energy, CouplingSpec, Sublattice, VertexClass};

fn main() {
    let c = CouplingSpec::with_ratio(1.02, 1.0);
    println!("  N  E  S  W  type  Q(A)  energy");
    for s in all_configurations() {
        let class = VertexClass::from_spins(s, Sublattice::A);
        println!(
            "{:>3}{:>3}{:>3}{:>3}  {:>4}  {:>4}  {:+.3}",
            s[0], s[1], s[2], s[3], class.kind.label(), class.charge, vertex_energy(s, &c)
        );
    }
}
