//! Charges, energy and the lattice form of Gauss' law.

use super::coupling::CouplingSpec;
use super::lattice::IceLattice;
use super::state::{Spin, SpinState};
use super::vertex::{vertex_energy, VertexClass, VertexType};

/// Spins of vertex `v` in N, E, S, W order. Only meaningful for active vertices.
#[inline]
pub fn vertex_spins(state: &SpinState, lattice: &IceLattice, v: usize) -> [Spin; 4] {
    lattice.vertex_sites(v).map(|s| state.value(s))
}

#[inline]
pub fn vertex_class(state: &SpinState, lattice: &IceLattice, v: usize) -> Option<VertexClass> {
    lattice
        .is_active(v)
        .then(|| VertexClass::from_spins(vertex_spins(state, lattice, v), lattice.sublattice(v)))
}

/// Per-vertex charge, `None` where the vertex is inactive.
pub fn charge_map(state: &SpinState, lattice: &IceLattice) -> Vec<Option<i8>> {
    (0..lattice.num_vertices())
        .map(|v| vertex_class(state, lattice, v).map(|c| c.charge))
        .collect()
}

pub fn total_charge(state: &SpinState, lattice: &IceLattice) -> i64 {
    charge_map(state, lattice).into_iter().flatten().map(i64::from).sum()
}

/// Net inward flux through the boundary of the active region: each site
/// touching exactly one active vertex adds `+1` if its dipole points into
/// that vertex and `-1` otherwise.
pub fn boundary_flux(state: &SpinState, lattice: &IceLattice) -> i64 {
    lattice
        .present_sites()
        .filter_map(|s| lattice.boundary_owner(s).map(|v| (s, v)))
        .map(|(s, v)| i64::from(state.value(s) * lattice.inward_sign(v)))
        .sum()
}

/// Sum of vertex energies over active vertices plus the field terms.
pub fn total_energy(state: &SpinState, lattice: &IceLattice, coupling: &CouplingSpec) -> f64 {
    let vertices: f64 = lattice
        .active_vertices()
        .map(|v| vertex_energy(vertex_spins(state, lattice, v), coupling))
        .sum();
    let fields: f64 = coupling
        .fields
        .iter()
        .filter(|(&s, _)| !lattice.is_vacant(s))
        .map(|(&s, &h)| h * f64::from(state.value(s)))
        .sum();
    vertices + fields
}

/// Counts of each vertex type over active vertices.
pub fn vertex_type_counts(state: &SpinState, lattice: &IceLattice) -> [usize; 4] {
    let mut counts = [0; 4];
    for v in lattice.active_vertices() {
        let c = VertexClass::from_spins(vertex_spins(state, lattice, v), lattice.sublattice(v));
        counts[c.kind.index()] += 1;
    }
    counts
}

/// Number of active vertices hosting a monopole (`|Q| >= 2`).
pub fn monopole_count(state: &SpinState, lattice: &IceLattice) -> usize {
    let c = vertex_type_counts(state, lattice);
    c[VertexType::III.index()] + c[VertexType::IV.index()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ice::lattice::{Edge, Topology};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn neel_tiling_is_type_one() {
        let l = IceLattice::open(2, 2).unwrap();
        let s = SpinState::neel(&l, 1);
        assert_eq!(vertex_type_counts(&s, &l), [4, 0, 0, 0]);
        assert!(charge_map(&s, &l).iter().all(|q| *q == Some(0)));
        assert_eq!(total_energy(&s, &l, &CouplingSpec::degenerate(1.0)), -8.0);
    }

    #[test]
    fn single_flip_changes_energy_locally() {
        let l = IceLattice::open(2, 2).unwrap();
        let c = CouplingSpec::degenerate(1.0);
        let mut s = SpinState::neel(&l, 1);
        let site = l.site_index(Edge::horizontal(0, 1)).unwrap();
        let before: Vec<f64> = l.site_vertices(site).map(|v| vertex_energy(vertex_spins(&s, &l, v), &c)).collect();
        let e0 = total_energy(&s, &l, &c);
        s.flip(site);
        let after: Vec<f64> = l.site_vertices(site).map(|v| vertex_energy(vertex_spins(&s, &l, v), &c)).collect();
        let delta: f64 = after.iter().zip(&before).map(|(a, b)| a - b).sum();
        assert_eq!(total_energy(&s, &l, &c) - e0, delta);
        assert_eq!(delta, 4.0);
    }

    #[test]
    fn flipping_a_clamped_boundary_spin_injects_two() {
        let l = IceLattice::open(4, 4).unwrap();
        let mut s = SpinState::neel(&l, 1);
        assert_eq!(boundary_flux(&s, &l), 0);
        let b = l.boundary_sites()[3];
        s.flip(b);
        assert_eq!(boundary_flux(&s, &l).abs(), 2);
        assert_eq!(total_charge(&s, &l), boundary_flux(&s, &l));
    }

    #[test]
    fn gauss_holds_with_vacancies() {
        let vac = [Edge::horizontal(1, 2), Edge::vertical(3, 0), Edge::vertical(2, 3)];
        let l = IceLattice::with_vacancies(5, 4, Topology::Open, &vac).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let s = SpinState::random(&l, &mut rng);
            assert_eq!(total_charge(&s, &l), boundary_flux(&s, &l));
        }
    }

    #[test]
    fn torus_without_vacancies_has_no_boundary() {
        let l = IceLattice::periodic(4, 4).unwrap();
        assert!(l.boundary_sites().is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = SpinState::random(&l, &mut rng);
        assert_eq!(total_charge(&s, &l), 0);
    }
}
