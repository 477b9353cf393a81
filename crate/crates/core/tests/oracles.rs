//! Checks of the test oracles against each other and against closed forms.

mod common;

use common::Geometry;
use spinice::ice::{CouplingSpec, FieldMap, IceLattice};
use spinice::observables::bessel_k0;

#[test]
fn diagonalization_without_transverse_field_is_boltzmann() {
    let l = IceLattice::open(1, 2).unwrap();
    let g = Geometry::new(&l);
    let mut fields = FieldMap::new();
    fields.insert(2, 0.4);
    fields.insert(5, -0.7);
    let c = CouplingSpec::new(0.9, 1.1, 1.0).with_fields(fields);
    let n = l.num_sites();
    let h: Vec<f64> = (0..n).map(|s| c.field(s)).collect();
    let t = 0.8;
    let ed = common::tfim_correlations(n, &g.bonds(&c), &h, 0.0, t);
    let sites: Vec<usize> = (0..n).collect();
    let states = common::enumerate(&vec![1; n], &sites);
    let p = common::boltzmann(&states.iter().map(|s| g.energy(s, &c)).collect::<Vec<_>>(), t);
    for (&(a, b), &v) in &ed {
        let want: f64 = states.iter().zip(&p).map(|(s, p)| p * f64::from(s[a] * s[b])).sum();
        assert!((v - want).abs() < 1e-10, "({a},{b}): {v} vs {want}");
    }
}

#[test]
fn uncoupled_spins_in_transverse_field() {
    let (h, gamma, t) = (0.3, 0.5, 0.4);
    let ed = common::tfim_correlations(2, &[], &[h, h], gamma, t);
    let e = (h * h + gamma * gamma).sqrt();
    let z = -h / e * (e / t).tanh();
    assert!((ed[&(0, 1)] - z * z).abs() < 1e-10);
}

#[test]
fn bessel_matches_quadrature() {
    for x in [0.01, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 5.0, 12.0, 30.0] {
        let (k, q) = (bessel_k0(x), common::k0_quadrature(x));
        assert!((k / q - 1.0).abs() < 1e-6, "K0({x}): {k} vs {q}");
    }
}

fn brute_force_ice(l: &IceLattice) -> Vec<Vec<i8>> {
    let g = Geometry::new(l);
    let sites: Vec<usize> = (0..l.num_sites()).collect();
    common::enumerate(&vec![1; l.num_sites()], &sites)
        .into_iter()
        .filter(|s| (0..l.num_vertices()).all(|v| g.charge(s, v) == Some(0)))
        .collect()
}

#[test]
fn ice_search_matches_brute_force() {
    for l in [IceLattice::periodic(2, 2).unwrap(), IceLattice::periodic(2, 4).unwrap()] {
        let mut a = common::ice_states(&l);
        let mut b = brute_force_ice(&l);
        a.sort();
        b.sort();
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }
}

#[test]
fn type_table_orders_energies() {
    let e = common::type_energies(&CouplingSpec::with_ratio(1.02, 1.0));
    assert!(e[0] < e[1] && e[1] < e[2] && e[2] < e[3]);
    let e = common::type_energies(&CouplingSpec::with_ratio(0.98, 1.0));
    assert!(e[1] < e[0]);
    let e = common::type_energies(&CouplingSpec::degenerate(1.0));
    assert_eq!(e[0], e[1]);
}

#[test]
fn chi_square_of_exact_counts_is_small() {
    let p = [0.1, 0.2, 0.3, 0.4];
    let counts: Vec<u64> = p.iter().map(|x| (x * 1e5) as u64).collect();
    let (chi2, dof, _) = common::chi_square(&counts, &p);
    assert_eq!(dof, 3);
    assert!(chi2 < 1e-9);
    let (_, _, z) = common::chi_square(&[40_000, 20_000, 20_000, 20_000], &p);
    assert!(z > 100.0);
}
