mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::Geometry;
use spinice::embedding::{build_chimera, embed_family, random_defects, validate_embedding};
use spinice::ice::{
    boundary_flux, charge_map, total_charge, total_energy, vertex_class, CouplingSpec, FieldMap, IceLattice, SpinState,
    Topology,
};
use spinice::observables::{d4_average, d4_images, screening_profile, structure_factor, MonopoleMap, QGrid};
use spinice::pinning::{resolve, BoundaryCondition};
use spinice::sampler::{
    chain_rng, loop_update, Engine, EngineOptions, ExposureParams, Exposer, FrozenSpins, LoopSettings, Problem,
    ProtocolSpec, SampleChain,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Open lattice with a few random vacancies.
fn holey(rows: usize, cols: usize, holes: usize, seed: u64) -> IceLattice {
    use rand::Rng;
    let full = IceLattice::open(rows, cols).unwrap();
    let mut r = rng(seed);
    let extra: BTreeSet<usize> = (0..holes).map(|_| r.random_range(0..full.num_sites())).collect();
    full.with_extra_vacancies(&extra.into_iter().collect::<Vec<_>>()).unwrap()
}

fn ice_state(l: &IceLattice) -> SpinState {
    SpinState::neel(l, 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn charge_sums_to_flux(rows in 1usize..7, cols in 1usize..7, holes in 0usize..6, seed: u64) {
        let l = holey(rows, cols, holes, seed);
        let g = Geometry::new(&l);
        let s = SpinState::random(&l, &mut rng(seed ^ 1));
        let q: i64 = (0..l.num_vertices()).filter_map(|v| g.charge(s.values(), v)).sum();
        prop_assert_eq!(total_charge(&s, &l), q);
        prop_assert_eq!(boundary_flux(&s, &l), g.boundary_flux(s.values()));
        prop_assert_eq!(q, g.boundary_flux(s.values()));
    }

    #[test]
    fn classification_matches_geometry(rows in 1usize..6, cols in 1usize..6, holes in 0usize..4, seed: u64) {
        let l = holey(rows, cols, holes, seed);
        let g = Geometry::new(&l);
        let s = SpinState::random(&l, &mut rng(seed));
        for v in 0..l.num_vertices() {
            let ours = vertex_class(&s, &l, v).map(|c| (c.kind.index(), i64::from(c.charge)));
            let theirs = g.kind(s.values(), v).map(|k| (k.index(), g.charge(s.values(), v).unwrap()));
            prop_assert_eq!(ours, theirs, "vertex {}", v);
        }
    }

    #[test]
    fn energy_matches_vertex_table(
        rows in 1usize..6, cols in 1usize..6, par in 0.2f64..1.5, perp in 0.2f64..1.5,
        scale in 0.05f64..1.0, h in -2.0f64..2.0, seed: u64,
    ) {
        let l = IceLattice::open(rows, cols).unwrap();
        let g = Geometry::new(&l);
        let mut fields = FieldMap::new();
        fields.insert(0, h);
        let c = CouplingSpec::new(par, perp, scale).with_fields(fields);
        let s = SpinState::random(&l, &mut rng(seed));
        let (a, b) = (total_energy(&s, &l, &c), g.energy(s.values(), &c));
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        let p = Problem::new(l.clone(), c).unwrap();
        prop_assert!((p.energy(&s) - b).abs() < 1e-9);
    }

    #[test]
    fn loops_keep_every_charge(rows in 2usize..7, cols in 2usize..7, periodic: bool, seed: u64) {
        let l = if periodic && rows % 2 == 0 && cols % 2 == 0 {
            IceLattice::periodic(rows, cols).unwrap()
        } else {
            IceLattice::open(rows, cols).unwrap()
        };
        let p = Problem::new(l.clone(), CouplingSpec::degenerate(1.0)).unwrap();
        let mut s = SpinState::random(&l, &mut rng(seed));
        let before = charge_map(&s, &l);
        let mut r = rng(seed ^ 7);
        for _ in 0..50 {
            loop_update(&mut s, &p, LoopSettings::for_problem(&p), &mut r);
        }
        prop_assert_eq!(charge_map(&s, &l), before);
    }

    #[test]
    fn screening_of_identical_maps_is_zero(n in 5usize..12, seed: u64) {
        use rand::Rng;
        let mut r = rng(seed);
        let freq: Vec<Option<f64>> = (0..n * n).map(|_| Some(r.random_range(0.01..0.3))).collect();
        let map = |pinned| MonopoleMap {
            rows: n, cols: n, frequency: freq.clone(), mean_charge: vec![Some(0.0); n * n], pinned, samples: 10,
        };
        let centre = (n / 2) * n + n / 2;
        let prof = screening_profile(&map(Some(centre)), &map(None)).unwrap();
        prop_assert!(!prof.bins.is_empty());
        for b in &prof.bins {
            prop_assert!(b.mean.abs() < 1e-12);
        }
    }

    #[test]
    fn d4_average_is_invariant(n in 2usize..9, k in 0usize..8, seed: u64) {
        use rand::Rng;
        let mut r = rng(seed);
        let v: Vec<f64> = (0..n * n).map(|_| r.random()).collect();
        let mut moved = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = d4_images(n, i, j)[k];
                moved[a * n + b] = v[i * n + j];
            }
        }
        let (x, y) = (d4_average(&v, n), d4_average(&moved, n));
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for i in 0..n {
            for j in 0..n {
                for (a, b) in d4_images(n, i, j) {
                    prop_assert!((x[a * n + b] - x[i * n + j]).abs() < 1e-12);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn frozen_spins_never_move(engine in 0usize..3, seed: u64) {
        use rand::Rng;
        let l = IceLattice::open(4, 4).unwrap();
        let mut r = rng(seed);
        let frozen: FrozenSpins = (0..6).map(|_| (r.random_range(0..l.num_sites()), if r.random() { 1 } else { -1 })).collect();
        let p = Problem::with_frozen(l.clone(), CouplingSpec::degenerate(1.0), &frozen).unwrap();
        let (engine, exposure) = match engine {
            0 => (Engine::Metropolis, ExposureParams::classical(0.5, 4)),
            1 => (Engine::Loop, ExposureParams::classical(0.5, 4)),
            _ => (Engine::Pimc, ExposureParams { gamma: 0.3, temperature: 0.5, sweeps: 4 }),
        };
        let x = Exposer::new(&p, engine, exposure, EngineOptions::default()).unwrap();
        let mut s = p.random_state(&mut r);
        let mut cr = chain_rng(seed, 0);
        for _ in 0..5 {
            x.expose(&mut s, &mut cr, None).unwrap();
            for (&site, &v) in &frozen {
                prop_assert_eq!(s.value(site), v);
            }
        }
    }

    #[test]
    fn chains_roundtrip_through_ndjson(holes in 0usize..5, seed: u64) {
        let l = holey(5, 5, holes, seed);
        let p = Problem::new(l.clone(), CouplingSpec::degenerate(0.5)).unwrap();
        let protocol = ProtocolSpec { chain_length: 6, burn_in: 2, repetitions: 1, seed, ..Default::default() };
        let chain = spinice::sampler::run_protocol(&p, &protocol, &ExposureParams::classical(1.0, 2), &spinice::sampler::InitialState::Random, 0).unwrap();
        let mut buf = Vec::new();
        chain.write_ndjson(&mut buf).unwrap();
        let back = SampleChain::read_ndjson(&l, buf.as_slice()).unwrap();
        prop_assert_eq!(&back.states, &chain.states);
        prop_assert_eq!(&back.steps, &chain.steps);
        prop_assert_eq!(back.burn_in, chain.burn_in);
    }

    #[test]
    fn pinned_boundaries_carry_their_flux(rows in 3usize..8, cols in 3usize..8, seed: u64) {
        let l = IceLattice::open(rows, cols).unwrap();
        let c = CouplingSpec::degenerate(1.0);
        for (bc, want) in [(BoundaryCondition::zero_flux(), 0i64), (BoundaryCondition::flux_injected(None), 2)] {
            let pin = resolve(&l, &c, &bc, &mut rng(seed)).unwrap();
            // favoured value of each pinned spin under the field term h s
            let mut s = ice_state(&l);
            for (&site, &h) in &pin.fields {
                s.set(site, if h > 0.0 { -1 } else { 1 });
            }
            for (&site, &v) in &pin.frozen {
                s.set(site, v);
            }
            prop_assert_eq!(boundary_flux(&s, &l).abs(), want);
        }
    }

    #[test]
    fn periodic_lattices_have_no_flux(half_r in 1usize..4, half_c in 1usize..4, seed: u64) {
        let l = IceLattice::periodic(2 * half_r, 2 * half_c).unwrap();
        prop_assert_eq!(l.topology(), Topology::Periodic);
        let s = SpinState::random(&l, &mut rng(seed));
        prop_assert_eq!(boundary_flux(&s, &l), 0);
        prop_assert_eq!(total_charge(&s, &l), 0);
    }

    #[test]
    fn structure_factor_matches_direct_sum(holes in 0usize..4, seed: u64) {
        let l = holey(3, 4, holes, seed);
        let mut r = rng(seed);
        let states: Vec<SpinState> = (0..3).map(|_| SpinState::random(&l, &mut r)).collect();
        let grid = QGrid { points: 6, extent: std::f64::consts::PI };
        let sf = structure_factor(&states, &l, grid).unwrap();
        let raw: Vec<Vec<i8>> = states.iter().map(|s| s.values().to_vec()).collect();
        for iy in 0..grid.points {
            for ix in 0..grid.points {
                let (qx, qy) = (grid.value(ix), grid.value(iy));
                if qx == 0.0 && qy == 0.0 {
                    continue;
                }
                let want = common::structure_factor_direct(&l, &raw, qx, qy);
                prop_assert!((sf.at(ix, iy) - want).abs() < 1e-9, "q=({}, {}): {} vs {}", qx, qy, sf.at(ix, iy), want);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn embeddings_of_defective_graphs_are_valid(qubits in 0usize..12, couplers in 0usize..12, seed: u64) {
        let d = random_defects(6, 6, qubits, couplers, &mut rng(seed)).unwrap();
        let g = build_chimera(6, 6, &d).unwrap();
        let (lattice, family) = embed_family(&g, 3, &mut rng(seed ^ 3)).unwrap();
        for e in &family {
            let report = validate_embedding(e).unwrap();
            prop_assert!(report.is_valid(), "{:?}", report.problems);
            prop_assert_eq!(e.vacancies(), lattice.vacant_set());
        }
    }
}
