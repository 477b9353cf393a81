//! Observables of stored chains, per cell and across cells.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bundle::{create_dir, write_json, write_with, CellMeta};
use super::config::AnalysisSpec;
use crate::error::{Error, Result};
use crate::ice::{IceLattice, SpinState};
use crate::observables::{
    mixing_metrics, pinch_cross_section, screening_profile, structure_factor, summarize_mixing, symmetry_average,
    write_bins_csv, write_cross_section_csv, CrossSection, FrequencyCounts, GridDocument, MixingMetrics,
    MixingSummary, MonopoleCounts, MonopoleMap, ScreeningProfile, StructureFactorGrid, VertexFrequencies,
};
use crate::pinning::BoundaryKind;
use crate::sampler::{chain_rng, SampleChain};

/// Stream reserved for bootstrap resampling.
const BOOTSTRAP_STREAM: u64 = 1 << 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisKind {
    All,
    Frequencies,
    StructureFactor,
    Monopoles,
    Screening,
    Mixing,
    Symmetry,
}

impl AnalysisKind {
    pub const ALL: [AnalysisKind; 7] = [
        AnalysisKind::All,
        AnalysisKind::Frequencies,
        AnalysisKind::StructureFactor,
        AnalysisKind::Monopoles,
        AnalysisKind::Screening,
        AnalysisKind::Mixing,
        AnalysisKind::Symmetry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnalysisKind::All => "all",
            AnalysisKind::Frequencies => "frequencies",
            AnalysisKind::StructureFactor => "structure-factor",
            AnalysisKind::Monopoles => "monopoles",
            AnalysisKind::Screening => "screening",
            AnalysisKind::Mixing => "mixing",
            AnalysisKind::Symmetry => "symmetry",
        }
    }

    fn wants(self, k: AnalysisKind) -> bool {
        self == AnalysisKind::All || self == k
    }

    fn wants_monopoles(self) -> bool {
        matches!(self, AnalysisKind::All | AnalysisKind::Monopoles | AnalysisKind::Screening | AnalysisKind::Symmetry)
    }
}

impl FromStr for AnalysisKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown analysis kind {s:?}")))
    }
}

impl std::fmt::Display for AnalysisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureSummary {
    pub grid: StructureFactorGrid,
    pub cut: CrossSection,
    /// `S(q)` at the pinch point.
    pub pinch: f64,
    /// `S(q)` at `(π, π)`, where Néel order peaks.
    pub neel: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub summary: MixingSummary,
    pub chains: Vec<MixingMetrics>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellObservables {
    pub frequencies: Option<VertexFrequencies>,
    pub monopoles: Option<MonopoleMap>,
    pub structure: Option<StructureSummary>,
    pub mixing: Option<MixingReport>,
    pub symmetry: Option<Vec<f64>>,
}

impl CellObservables {
    pub fn compute(
        lattice: &IceLattice,
        meta: &CellMeta,
        chains: &[SampleChain],
        spec: &AnalysisSpec,
        kind: AnalysisKind,
    ) -> Result<Self> {
        if chains.is_empty() {
            return Err(Error::Empty("cell has no chains"));
        }
        let mut out = CellObservables::default();
        let states = || chains.iter().flat_map(|c| c.equilibrium());
        if kind.wants(AnalysisKind::Frequencies) {
            let mut acc = FrequencyCounts::default();
            for s in states() {
                acc.add(s, lattice);
            }
            out.frequencies = Some(acc.finish()?);
        }
        if kind.wants_monopoles() {
            let mut acc = MonopoleCounts::new(lattice);
            for s in states() {
                acc.add(s, lattice);
            }
            out.monopoles = Some(acc.finish(meta.pinned_vertex())?);
        }
        if kind.wants(AnalysisKind::StructureFactor) && spec.structure_factor {
            let picked: Vec<SpinState> = states().step_by(spec.stride).cloned().collect();
            let grid = structure_factor(&picked, lattice, spec.grid())?;
            let [qx, qy] = spec.pinch_point;
            let cut = pinch_cross_section(&grid, (qx, qy), spec.cut_axis);
            out.structure = Some(StructureSummary { pinch: grid.at_q(qx, qy), neel: grid.at_q(PI, PI), cut, grid });
        }
        if kind.wants(AnalysisKind::Mixing) {
            let metrics: Vec<MixingMetrics> = chains.iter().map(|c| mixing_metrics(c, meta.kind())).collect();
            let mut rng = chain_rng(meta.protocol.seed, BOOTSTRAP_STREAM);
            out.mixing = Some(MixingReport { summary: summarize_mixing(&metrics, &mut rng)?, chains: metrics });
        }
        if kind.wants(AnalysisKind::Symmetry) {
            if let (Some(sub), Some(map)) = (spec.subgrid, &out.monopoles) {
                out.symmetry = Some(symmetry_average(map, sub)?);
            }
        }
        Ok(out)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        if let Some(f) = &self.frequencies {
            write_json(&dir.join("frequencies.json"), f)?;
        }
        if let Some(m) = &self.monopoles {
            write_json(&dir.join("monopole_map.json"), m)?;
            write_json(&dir.join("monopole_grid.json"), &GridDocument::from(m))?;
        }
        if let Some(s) = &self.structure {
            write_json(&dir.join("structure_factor.json"), &GridDocument::from(&s.grid))?;
            write_with(&dir.join("cross_section.csv"), |w| write_cross_section_csv(&s.cut, w))?;
        }
        if let Some(m) = &self.mixing {
            write_json(&dir.join("mixing.json"), m)?;
        }
        if let Some(v) = &self.symmetry {
            write_json(&dir.join("symmetry.json"), v)?;
        }
        Ok(())
    }
}

/// Screening profile of a pinned-monopole cell against a flux-injected or
/// zero-flux cell at the same couplings and exposure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningEntry {
    pub pinned: String,
    pub background: String,
    pub background_kind: BoundaryKind,
    pub scale: f64,
    pub ratio: f64,
    pub gamma: f64,
    pub profile: ScreeningProfile,
}

/// Pairs every pinned-monopole cell with each matching background. A
/// background without any monopoles has no normalization and is skipped.
pub fn screening_entries(cells: &[(CellMeta, CellObservables)]) -> Vec<ScreeningEntry> {
    let mut out = Vec::new();
    for (d, od) in cells.iter().filter(|(m, _)| m.kind() == BoundaryKind::PinnedMonopole) {
        for kind in [BoundaryKind::FluxInjected, BoundaryKind::ZeroFlux] {
            let Some((c, oc)) = cells.iter().find(|(m, _)| m.kind() == kind && m.same_point(d)) else {
                continue;
            };
            let (Some(md), Some(mc)) = (&od.monopoles, &oc.monopoles) else { continue };
            let Ok(profile) = screening_profile(md, mc) else { continue };
            out.push(ScreeningEntry {
                pinned: d.id.clone(),
                background: c.id.clone(),
                background_kind: kind,
                scale: d.scale,
                ratio: d.ratio,
                gamma: d.exposure.gamma,
                profile,
            });
        }
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

fn prefix(m: &CellMeta) -> String {
    format!("{},{},{},{},{}", m.id, m.scale, m.ratio, m.exposure.gamma, m.kind().label())
}

/// Cross-cell tables under `tables/` and screening profiles under
/// `screening/`.
pub fn write_tables(root: &Path, cells: &[(CellMeta, CellObservables)], kind: AnalysisKind) -> Result<()> {
    let tables = root.join("tables");
    create_dir(&tables)?;
    let head = "cell,scale,ratio,gamma,boundary";
    if kind.wants(AnalysisKind::Frequencies) {
        let mut s = format!("{head},type1,type2,type3,type4,monopole_fraction,samples\n");
        for (m, o) in cells {
            if let Some(f) = &o.frequencies {
                let [a, b, c, d] = f.fractions;
                let _ = writeln!(s, "{},{a},{b},{c},{d},{},{}", prefix(m), f.monopole_fraction(), f.samples);
            }
        }
        write_with(&tables.join("frequencies.csv"), |w| std::io::Write::write_all(w, s.as_bytes()))?;
    }
    if kind.wants(AnalysisKind::StructureFactor) {
        let mut s = format!("{head},fwhm,correlation_length,s_pinch,s_neel,s_max\n");
        for (m, o) in cells {
            if let Some(st) = &o.structure {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    prefix(m),
                    opt(st.cut.fwhm),
                    opt(st.cut.correlation_length()),
                    st.pinch,
                    st.neel,
                    st.grid.max()
                );
            }
        }
        write_with(&tables.join("structure.csv"), |w| std::io::Write::write_all(w, s.as_bytes()))?;
    }
    if kind.wants(AnalysisKind::Monopoles) {
        let mut s = format!("{head},mean_frequency,net_charge,samples\n");
        for (m, o) in cells {
            if let Some(map) = &o.monopoles {
                let _ = writeln!(s, "{},{},{},{}", prefix(m), opt(map.mean_frequency()), map.net_charge(), map.samples);
            }
        }
        write_with(&tables.join("monopoles.csv"), |w| std::io::Write::write_all(w, s.as_bytes()))?;
    }
    if kind.wants(AnalysisKind::Mixing) {
        let mut s = format!("{head},hamming,hamming_lo,hamming_hi,surplus,surplus_lo,surplus_hi,repetitions\n");
        for (m, o) in cells {
            if let Some(r) = &o.mixing {
                let (h, u) = (r.summary.hamming, r.summary.surplus);
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    prefix(m),
                    h.mean,
                    h.lo,
                    h.hi,
                    u.mean,
                    u.lo,
                    u.hi,
                    r.summary.repetitions
                );
            }
        }
        write_with(&tables.join("mixing.csv"), |w| std::io::Write::write_all(w, s.as_bytes()))?;
    }
    if kind.wants(AnalysisKind::Screening) {
        let entries = screening_entries(cells);
        let dir = root.join("screening");
        create_dir(&dir)?;
        let mut s = "pinned,background,background_kind,scale,ratio,gamma,amplitude,xi,residual,converged\n".to_string();
        for e in &entries {
            let name = format!("{}-vs-{}", e.pinned, e.background_kind.label());
            write_with(&dir.join(format!("{name}.csv")), |w| write_bins_csv(&e.profile.bins, w))?;
            write_json(&dir.join(format!("{name}.json")), e)?;
            let f = e.profile.fit;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                e.pinned,
                e.background,
                e.background_kind.label(),
                e.scale,
                e.ratio,
                e.gamma,
                opt(f.map(|f| f.amplitude)),
                opt(f.map(|f| f.xi)),
                opt(f.map(|f| f.residual)),
                f.is_some_and(|f| f.converged)
            );
        }
        write_with(&tables.join("screening.csv"), |w| std::io::Write::write_all(w, s.as_bytes()))?;
    }
    Ok(())
}
