//! Calibration refinement: per-bond coupler trims toward homogeneous
//! correlations, per-site offsets toward zero magnetization, and an optional
//! global perpendicular-gadget multiplier toward a target Type-I fraction.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::disorder::DisorderRealization;
use super::embed::{CouplerKind, Embedding, J_MAX_PHYSICAL};
use crate::error::{Error, Result};
use crate::ice::{vertex_type_counts, CouplingSpec, FieldMap, IceLattice};
use crate::sampler::{
    lattice_bonds, run_protocol, BondKind, ExposureParams, FrozenSpins, InitialState, Problem, ProtocolSpec,
};

/// Corrections applied on top of the programmed problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Multiplier per logical bond.
    pub trims: Vec<f64>,
    /// Additive field per logical site, `J_MAX` units.
    pub offsets: Vec<f64>,
    pub perp_gadget: f64,
}

impl Calibration {
    pub fn identity(bonds: usize, sites: usize) -> Self {
        Calibration { trims: vec![1.0; bonds], offsets: vec![0.0; sites], perp_gadget: 1.0 }
    }
}

/// Measured response of the (disordered) device to a calibration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// `<s_a s_b>` per logical bond.
    pub correlation: Vec<f64>,
    /// `<s>` per logical site.
    pub magnetization: Vec<f64>,
    pub type1: f64,
}

/// Anything that can measure correlations for a trial calibration.
pub trait Estimator {
    fn estimate(&mut self, calibration: &Calibration) -> Result<Estimate>;
}

/// Samples the logical model with hidden disorder multiplied into every bond.
#[derive(Clone, Debug)]
pub struct LatticeEstimator {
    pub lattice: IceLattice,
    pub coupling: CouplingSpec,
    /// Bond multipliers already programmed (before disorder).
    pub base_scale: Vec<f64>,
    pub base_fields: FieldMap,
    pub disorder: DisorderRealization,
    pub protocol: ProtocolSpec,
    pub exposure: ExposureParams,
    calls: u64,
}

impl LatticeEstimator {
    pub fn new(
        lattice: IceLattice,
        coupling: CouplingSpec,
        disorder: DisorderRealization,
        protocol: ProtocolSpec,
        exposure: ExposureParams,
    ) -> Result<Self> {
        let n = lattice_bonds(&lattice).len();
        if disorder.coupler.len() != n || disorder.field.len() != lattice.num_sites() {
            return Err(Error::Config("disorder does not match the lattice".into()));
        }
        Ok(LatticeEstimator {
            base_scale: vec![1.0; n],
            base_fields: FieldMap::new(),
            lattice,
            coupling,
            disorder,
            protocol,
            exposure,
            calls: 0,
        })
    }

    pub fn problem(&self, cal: &Calibration) -> Result<Problem> {
        let bonds = lattice_bonds(&self.lattice);
        let scale: Vec<f64> = bonds
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let g = if b.kind == BondKind::Perp { cal.perp_gadget } else { 1.0 };
                self.base_scale[k] * self.disorder.coupler[k] * cal.trims[k] * g
            })
            .collect();
        let mut c = self.coupling.clone();
        c.fields = self.base_fields.clone();
        for s in self.lattice.present_sites() {
            let h = self.disorder.field[s] + cal.offsets[s];
            if h != 0.0 {
                *c.fields.entry(s).or_insert(0.0) += h;
            }
        }
        Problem::build(self.lattice.clone(), c, &FrozenSpins::new(), Some(&scale))
    }
}

impl Estimator for LatticeEstimator {
    fn estimate(&mut self, cal: &Calibration) -> Result<Estimate> {
        let problem = self.problem(cal)?;
        let mut protocol = self.protocol.clone();
        protocol.seed = self.protocol.seed.wrapping_add(self.calls.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        self.calls += 1;
        let chains: Vec<_> = (0..protocol.repetitions as u64)
            .into_par_iter()
            .map(|r| run_protocol(&problem, &protocol, &self.exposure, &InitialState::Random, r))
            .collect::<Result<_>>()?;
        let bonds = lattice_bonds(&self.lattice);
        let mut corr = vec![0.0; bonds.len()];
        let mut mag = vec![0.0; self.lattice.num_sites()];
        let mut counts = [0usize; 4];
        let mut n = 0usize;
        for chain in &chains {
            for s in chain.equilibrium() {
                let v = s.values();
                for (k, b) in bonds.iter().enumerate() {
                    corr[k] += f64::from(v[b.a] * v[b.b]);
                }
                for (m, &x) in mag.iter_mut().zip(v) {
                    *m += f64::from(x);
                }
                let c = vertex_type_counts(s, &self.lattice);
                for k in 0..4 {
                    counts[k] += c[k];
                }
                n += 1;
            }
        }
        if n == 0 {
            return Err(Error::Empty("estimator produced no samples"));
        }
        let nf = n as f64;
        corr.iter_mut().for_each(|c| *c /= nf);
        mag.iter_mut().for_each(|m| *m /= nf);
        let total: usize = counts.iter().sum();
        Ok(Estimate { correlation: corr, magnetization: mag, type1: counts[0] as f64 / total.max(1) as f64 })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineSettings {
    pub max_iterations: usize,
    /// Largest relative trim away from the base value.
    pub max_trim: f64,
    /// Correlation deviations below this are left alone.
    pub deadband: f64,
    /// Initial trim change per unit correlation deviation; adapted by a
    /// secant estimate of the response.
    pub coupler_gain: f64,
    /// Field change per unit magnetization.
    pub field_gain: f64,
    /// Stop once the pooled correlation spread falls below this.
    pub tolerance: f64,
    /// Target Type-I fraction for the perpendicular gadget, if any.
    pub type1_target: Option<f64>,
    pub gadget_gain: f64,
}

impl Default for RefineSettings {
    fn default() -> Self {
        RefineSettings {
            max_iterations: 8,
            max_trim: 0.04,
            deadband: 0.0,
            coupler_gain: 1.0,
            field_gain: 0.1,
            tolerance: 0.0,
            type1_target: None,
            gadget_gain: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Root-mean-square deviation of bond correlations from their class mean.
    pub spread: f64,
    pub magnetization_spread: f64,
    pub type1: f64,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub calibration: Calibration,
    pub history: Vec<IterationRecord>,
    /// Iteration whose calibration is returned.
    pub best: usize,
    pub converged: bool,
}

impl RefinementReport {
    pub fn initial_spread(&self) -> f64 {
        self.history[0].spread
    }

    pub fn final_spread(&self) -> f64 {
        self.history[self.best].spread
    }
}

/// Groups bonds whose correlations should agree on a clean device: same
/// kind, same number of boundary sites, same interior status.
pub fn bond_classes(lattice: &IceLattice) -> Vec<usize> {
    let mut ids: BTreeMap<(bool, usize, usize, bool), usize> = BTreeMap::new();
    lattice_bonds(lattice)
        .into_iter()
        .map(|b| {
            let (da, db) = (lattice.active_degree(b.a), lattice.active_degree(b.b));
            let key = (b.kind == BondKind::Par, da.min(db), da.max(db), lattice.is_interior(b.vertex));
            let next = ids.len();
            *ids.entry(key).or_insert(next)
        })
        .collect()
}

fn deviations(classes: &[usize], corr: &[f64]) -> Vec<f64> {
    let k = classes.iter().copied().max().map_or(0, |m| m + 1);
    let mut sum = vec![0.0; k];
    let mut n = vec![0usize; k];
    for (&c, &x) in classes.iter().zip(corr) {
        sum[c] += x;
        n[c] += 1;
    }
    classes.iter().zip(corr).map(|(&c, &x)| x - sum[c] / n[c] as f64).collect()
}

fn rms(v: &[f64]) -> f64 {
    if v.is_empty() { 0.0 } else { (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt() }
}

/// Iterative refinement over logical bonds. Returns the iterate with the
/// smallest correlation spread.
pub fn refine_bonds<E: Estimator>(
    classes: &[usize],
    kinds: &[BondKind],
    mobile_sites: &[usize],
    num_sites: usize,
    estimator: &mut E,
    settings: &RefineSettings,
) -> Result<RefinementReport> {
    if classes.len() != kinds.len() {
        return Err(Error::Config("one class per bond required".into()));
    }
    let mut cal = Calibration::identity(kinds.len(), num_sites);
    let mut history = Vec::new();
    let mut best: Option<(usize, f64, Calibration)> = None;
    let mut gain = settings.coupler_gain;
    let mut last: Option<(Vec<f64>, Vec<f64>)> = None;
    let (lo, hi) = (1.0 - settings.max_trim, 1.0 + settings.max_trim);
    let mut converged = false;

    for it in 0..=settings.max_iterations {
        let est = estimator.estimate(&cal)?;
        if est.correlation.len() != kinds.len() {
            return Err(Error::Analysis("estimator returned the wrong number of bonds".into()));
        }
        let dev = deviations(classes, &est.correlation);
        let spread = rms(&dev);
        let mags: Vec<f64> = mobile_sites.iter().map(|&s| est.magnetization[s]).collect();

        // secant update of the response from the last applied step
        if let Some((prev_dev, step)) = &last {
            let (mut num, mut den) = (0.0, 0.0);
            for k in 0..dev.len() {
                num += (dev[k] - prev_dev[k]) * step[k];
                den += step[k] * step[k];
            }
            if den > 0.0 {
                let chi = -num / den;
                if chi.is_finite() && chi > 0.0 {
                    gain = (0.8 / chi).clamp(settings.coupler_gain / 10.0, settings.coupler_gain * 10.0);
                }
            }
        }
        history.push(IterationRecord { iteration: it, spread, magnetization_spread: rms(&mags), type1: est.type1, gain });
        if best.as_ref().is_none_or(|b| spread < b.1) {
            best = Some((it, spread, cal.clone()));
        }
        if spread <= settings.tolerance {
            converged = true;
            break;
        }
        if it == settings.max_iterations {
            break;
        }

        let mut step = vec![0.0; dev.len()];
        for k in 0..dev.len() {
            if dev[k].abs() > settings.deadband {
                let old = cal.trims[k];
                cal.trims[k] = (old * (1.0 + gain * dev[k])).clamp(lo, hi);
                step[k] = cal.trims[k] - old;
            }
        }
        for &s in mobile_sites {
            cal.offsets[s] += settings.field_gain * est.magnetization[s];
        }
        if let Some(target) = settings.type1_target {
            cal.perp_gadget = (cal.perp_gadget * (1.0 - settings.gadget_gain * (est.type1 - target))).clamp(lo, hi);
        }
        last = Some((dev, step));
    }
    let (best, _, calibration) = best.expect("at least one estimate");
    Ok(RefinementReport { calibration, history, best, converged })
}

/// How the refinement loop samples the device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerHandle {
    pub coupling: CouplingSpec,
    pub protocol: ProtocolSpec,
    pub exposure: ExposureParams,
}

/// Refines an embedding on its open lattice with rigid chains under the
/// given disorder, and writes trims, offsets and the gadget multiplier back
/// into a reprogrammed copy.
pub fn refine_calibration(
    embedding: &Embedding,
    disorder: &DisorderRealization,
    handle: &SamplerHandle,
    settings: &RefineSettings,
) -> Result<(Embedding, RefinementReport)> {
    let lattice = embedding.logical_lattice()?;
    let bonds = lattice_bonds(&lattice);
    if disorder.coupler.len() != embedding.couplers.len() {
        return Err(Error::Config("disorder does not match the embedding".into()));
    }
    // fold coupler disorder into per-bond factors
    let mut nominal = vec![0.0; bonds.len()];
    let mut actual = vec![0.0; bonds.len()];
    for (k, c) in embedding.couplers.iter().enumerate() {
        if let Some(b) = c.bond {
            nominal[b] += c.value;
            actual[b] += c.value * disorder.coupler[k];
        }
    }
    let bond_factor: Vec<f64> =
        nominal.iter().zip(&actual).map(|(&n, &a)| if n != 0.0 { a / n } else { 1.0 }).collect();
    let mut site_field = vec![0.0; lattice.num_sites()];
    for (s, chain) in embedding.chains.iter().enumerate() {
        if let Some(q) = chain {
            site_field[s] = q.iter().map(|&x| disorder.field.get(x).copied().unwrap_or(0.0)).sum::<f64>() / J_MAX_PHYSICAL;
        }
    }
    let mut estimator = LatticeEstimator::new(
        lattice.clone(),
        handle.coupling.clone(),
        DisorderRealization { coupler: bond_factor, field: site_field },
        handle.protocol.clone(),
        handle.exposure,
    )?;
    estimator.base_scale = embedding.bond_scale(&handle.coupling, None)?;
    estimator.base_fields = embedding.logical_fields(None);

    let kinds: Vec<BondKind> = bonds.iter().map(|b| b.kind).collect();
    let mobile: Vec<usize> = lattice.present_sites().collect();
    let report = refine_bonds(&bond_classes(&lattice), &kinds, &mobile, lattice.num_sites(), &mut estimator, settings)?;

    let mut out = embedding.clone();
    let cal = &report.calibration;
    for c in &mut out.couplers {
        if let Some(b) = c.bond {
            c.trim *= cal.trims[b];
        }
    }
    out.perp_gadget *= cal.perp_gadget;
    for (s, chain) in embedding.chains.iter().enumerate() {
        if let (Some(q), h) = (chain, cal.offsets[s]) {
            if h != 0.0 {
                for &x in q {
                    *out.offsets.entry(x).or_insert(0.0) += h * J_MAX_PHYSICAL / 4.0;
                }
            }
        }
    }
    out.program(&handle.coupling);
    debug_assert!(out.couplers.iter().all(|c| c.kind == CouplerKind::Fm || c.trim > 0.0));
    Ok((out, report))
}
