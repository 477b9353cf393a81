//! Boundary clamps, flux injection and pinned monopoles.
//!
//! Clamped boundary spins are frozen during sampling and also carry a
//! longitudinal field that selects the same value, so the field map alone
//! describes the intended configuration. The pinned monopole is a pure field
//! term: it makes four charged configurations of one vertex degenerate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ice::{CouplingSpec, FieldMap, IceLattice, Spin, SpinState, Topology};
use crate::sampler::{FrozenSpins, Problem};

/// Clamp fields are this multiple of the mean effective coupling.
pub const CLAMP_FIELD_FACTOR: f64 = 4.0;
/// Pinning fields on a forced monopole are this multiple of `J`.
pub const PIN_FIELD_FACTOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Open,
    ZeroFlux,
    FluxInjected,
    PinnedMonopole,
}

impl BoundaryKind {
    /// Monopoles present in every ground state.
    pub fn forced_monopoles(self) -> usize {
        match self {
            BoundaryKind::Open | BoundaryKind::ZeroFlux => 0,
            BoundaryKind::FluxInjected => 1,
            BoundaryKind::PinnedMonopole => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BoundaryKind::Open => "open",
            BoundaryKind::ZeroFlux => "zero-flux",
            BoundaryKind::FluxInjected => "flux-injected",
            BoundaryKind::PinnedMonopole => "pinned-monopole",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub kind: BoundaryKind,
    /// Boundary site flipped away from the background; drawn uniformly per
    /// repetition when absent.
    #[serde(default)]
    pub flipped_site: Option<usize>,
    /// Pinned vertex; the interior vertex nearest the centre when absent.
    #[serde(default)]
    pub pinned_vertex: Option<usize>,
    /// Sign of the pinned charge.
    #[serde(default = "positive")]
    pub pinned_sign: i8,
    /// Which of the two Type-I tilings the clamp follows.
    #[serde(default = "positive")]
    pub phase: Spin,
}

fn positive() -> i8 {
    1
}

impl BoundaryCondition {
    pub fn new(kind: BoundaryKind) -> Self {
        BoundaryCondition { kind, flipped_site: None, pinned_vertex: None, pinned_sign: 1, phase: 1 }
    }

    pub fn open() -> Self {
        Self::new(BoundaryKind::Open)
    }

    pub fn zero_flux() -> Self {
        Self::new(BoundaryKind::ZeroFlux)
    }

    pub fn flux_injected(site: Option<usize>) -> Self {
        BoundaryCondition { flipped_site: site, ..Self::new(BoundaryKind::FluxInjected) }
    }

    pub fn pinned_monopole(vertex: Option<usize>) -> Self {
        BoundaryCondition { pinned_vertex: vertex, ..Self::new(BoundaryKind::PinnedMonopole) }
    }
}

/// Resolved fields and frozen spins for one boundary condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pinning {
    pub kind: BoundaryKind,
    pub fields: FieldMap,
    pub frozen: FrozenSpins,
    pub flipped_site: Option<usize>,
    pub pinned_vertex: Option<usize>,
}

impl Pinning {
    pub fn open() -> Self {
        Pinning {
            kind: BoundaryKind::Open,
            fields: FieldMap::new(),
            frozen: FrozenSpins::new(),
            flipped_site: None,
            pinned_vertex: None,
        }
    }

    pub fn forced_monopoles(&self) -> usize {
        self.kind.forced_monopoles()
    }

    /// Sampling problem with these fields added to `coupling`.
    pub fn problem(&self, lattice: &IceLattice, coupling: &CouplingSpec) -> Result<Problem> {
        let mut c = coupling.clone();
        for (&s, &h) in &self.fields {
            *c.fields.entry(s).or_insert(0.0) += h;
        }
        Problem::with_frozen(lattice.clone(), c, &self.frozen)
    }

    /// Same clamp with every field and frozen value negated.
    pub fn reversed(&self) -> Self {
        Pinning {
            fields: self.fields.iter().map(|(&s, &h)| (s, -h)).collect(),
            frozen: self.frozen.iter().map(|(&s, &v)| (s, -v)).collect(),
            ..self.clone()
        }
    }
}

fn require_boundary(lattice: &IceLattice) -> Result<Vec<usize>> {
    let sites = lattice.boundary_sites();
    if lattice.topology() == Topology::Periodic || sites.is_empty() {
        return Err(Error::Unsupported("boundary clamps need an open lattice".into()));
    }
    Ok(sites)
}

/// Freezes every boundary site (vacancy boundaries included) to the Type-I
/// tiling of the given phase. Bulk sites get no field.
pub fn clamp_boundary(lattice: &IceLattice, coupling: &CouplingSpec, phase: Spin) -> Result<Pinning> {
    let sites = require_boundary(lattice)?;
    let background = SpinState::neel(lattice, phase);
    let magnitude = CLAMP_FIELD_FACTOR * coupling.energy_scale().max(f64::MIN_POSITIVE);
    let mut fields = FieldMap::new();
    let mut frozen = FrozenSpins::new();
    for s in sites {
        let v = background.value(s);
        frozen.insert(s, v);
        fields.insert(s, -magnitude * f64::from(v));
    }
    Ok(Pinning { kind: BoundaryKind::ZeroFlux, fields, frozen, flipped_site: None, pinned_vertex: None })
}

/// Zero-flux clamp with one boundary site reversed, forcing net charge ±2.
pub fn inject_flux(lattice: &IceLattice, coupling: &CouplingSpec, phase: Spin, site: usize) -> Result<Pinning> {
    let mut p = clamp_boundary(lattice, coupling, phase)?;
    let v = p
        .frozen
        .get_mut(&site)
        .ok_or_else(|| Error::Config(format!("site {site} is not a boundary site")))?;
    *v = -*v;
    if let Some(h) = p.fields.get_mut(&site) {
        *h = -*h;
    }
    p.kind = BoundaryKind::FluxInjected;
    p.flipped_site = Some(site);
    Ok(p)
}

/// Fields of magnitude `2J` on the four spins of `vertex` that make its
/// four charge-`2 * sign` Type-III configurations the degenerate minima.
pub fn pin_monopole(lattice: &IceLattice, vertex: usize, coupling: &CouplingSpec, sign: i8) -> Result<FieldMap> {
    if vertex >= lattice.num_vertices() || !lattice.is_interior(vertex) {
        let c = lattice.vertex_coord(vertex.min(lattice.num_vertices().saturating_sub(1)));
        return Err(Error::Config(format!(
            "pinned vertex ({}, {}) must be active and interior",
            c.row, c.col
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Config(format!("pinned charge sign must be ±1, got {sign}")));
    }
    let magnitude = PIN_FIELD_FACTOR * coupling.energy_scale();
    let inward = f64::from(lattice.inward_sign(vertex) * sign);
    Ok(lattice.vertex_sites(vertex).into_iter().map(|s| (s, -magnitude * inward)).collect())
}

/// Interior vertex closest to the geometric centre.
pub fn central_interior_vertex(lattice: &IceLattice) -> Option<usize> {
    let cy = (lattice.rows() as f64 - 1.0) / 2.0;
    let cx = (lattice.cols() as f64 - 1.0) / 2.0;
    (0..lattice.num_vertices()).filter(|&v| lattice.is_interior(v)).min_by(|&a, &b| {
        let d = |v: usize| {
            let (x, y) = lattice.vertex_position(v);
            (x - cx).powi(2) + (y - cy).powi(2)
        };
        d(a).total_cmp(&d(b)).then(a.cmp(&b))
    })
}

/// Resolves a boundary condition, drawing the flipped site when needed.
pub fn resolve<R: Rng + ?Sized>(
    lattice: &IceLattice,
    coupling: &CouplingSpec,
    bc: &BoundaryCondition,
    rng: &mut R,
) -> Result<Pinning> {
    match bc.kind {
        BoundaryKind::Open => Ok(Pinning::open()),
        BoundaryKind::ZeroFlux => clamp_boundary(lattice, coupling, bc.phase),
        BoundaryKind::FluxInjected => {
            let site = match bc.flipped_site {
                Some(s) => s,
                None => {
                    let sites = require_boundary(lattice)?;
                    sites[rng.random_range(0..sites.len())]
                }
            };
            inject_flux(lattice, coupling, bc.phase, site)
        }
        BoundaryKind::PinnedMonopole => {
            let mut p = clamp_boundary(lattice, coupling, bc.phase)?;
            let v = match bc.pinned_vertex {
                Some(v) => v,
                None => central_interior_vertex(lattice)
                    .ok_or_else(|| Error::Config("lattice has no interior vertex to pin".into()))?,
            };
            for (s, h) in pin_monopole(lattice, v, coupling, bc.pinned_sign)? {
                *p.fields.entry(s).or_insert(0.0) += h;
            }
            p.kind = BoundaryKind::PinnedMonopole;
            p.pinned_vertex = Some(v);
            Ok(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ice::{all_configurations, boundary_flux, vertex_energy, Sublattice, VertexClass, VertexType};

    #[test]
    fn clamp_gives_zero_flux_and_flip_gives_two() {
        let l = IceLattice::open(6, 6).unwrap();
        let c = CouplingSpec::degenerate(1.0);
        let p = clamp_boundary(&l, &c, 1).unwrap();
        let mut s = SpinState::uniform(&l, 1);
        for (&site, &v) in &p.frozen {
            s.set(site, v);
        }
        assert_eq!(boundary_flux(&s, &l), 0);
        assert!(p.fields.iter().all(|(site, h)| h.abs() >= 2.0 && p.frozen.contains_key(site)));

        let site = l.boundary_sites()[5];
        let q = inject_flux(&l, &c, 1, site).unwrap();
        s.set(site, q.frozen[&site]);
        assert_eq!(boundary_flux(&s, &l).abs(), 2);
    }

    #[test]
    fn torus_cannot_be_clamped() {
        let l = IceLattice::periodic(4, 4).unwrap();
        assert!(clamp_boundary(&l, &CouplingSpec::degenerate(1.0), 1).is_err());
    }

    #[test]
    fn pinned_vertex_prefers_four_type_three_states() {
        let l = IceLattice::open(5, 5).unwrap();
        let c = CouplingSpec::degenerate(1.0);
        for v in [l.vertex_index(2, 2), l.vertex_index(2, 1)] {
            let fields = pin_monopole(&l, v, &c, 1).unwrap();
            let sites = l.vertex_sites(v);
            let sub = l.sublattice(v);
            let energies: Vec<(f64, VertexClass)> = all_configurations()
                .map(|cfg| {
                    let field: f64 = (0..4).map(|k| fields[&sites[k]] * f64::from(cfg[k])).sum();
                    (vertex_energy(cfg, &c) + field, VertexClass::from_spins(cfg, sub))
                })
                .collect();
            let min = energies.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
            let minima: Vec<_> = energies.iter().filter(|e| (e.0 - min).abs() < 1e-12).collect();
            assert_eq!(minima.len(), 4);
            assert!(minima.iter().all(|e| e.1.kind == VertexType::III && e.1.charge == 2));
            assert!(fields.values().all(|h| (h.abs() - 2.0).abs() < 1e-12));
            let _ = Sublattice::A;
        }
    }

    #[test]
    fn pinning_the_rim_is_rejected() {
        let l = IceLattice::open(5, 5).unwrap();
        assert!(pin_monopole(&l, l.vertex_index(0, 2), &CouplingSpec::degenerate(1.0), 1).is_err());
    }

    #[test]
    fn centre_of_odd_lattice() {
        let l = IceLattice::open(9, 9).unwrap();
        assert_eq!(central_interior_vertex(&l), Some(l.vertex_index(4, 4)));
    }

    #[test]
    fn field_on_vacancy_is_a_config_error() {
        use crate::ice::{Edge, Topology};
        let l = IceLattice::with_vacancies(3, 3, Topology::Open, &[Edge::horizontal(1, 1)]).unwrap();
        let mut c = CouplingSpec::degenerate(1.0);
        c.fields.insert(l.site_index(Edge::horizontal(1, 1)).unwrap(), 1.0);
        assert!(Problem::new(l, c).is_err());
    }
}
