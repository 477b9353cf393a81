//! Declarative experiment files.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embedding::{ChainMode, Defects, DisorderModel};
use crate::error::{Error, Result};
use crate::ice::{Edge, IceLattice, Topology};
use crate::observables::{CutAxis, QGrid, SubGrid, DEFAULT_Q_POINTS};
use crate::pinning::{BoundaryCondition, BoundaryKind};
use crate::sampler::{Engine, EngineOptions, ExposureParams, ProtocolSpec, LONG_SWEEPS, SHORT_SWEEPS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub lattice: LatticeSpec,
    pub coupling: CouplingSweep,
    #[serde(default)]
    pub exposure: ExposureSpec,
    #[serde(default)]
    pub protocol: ProtocolSection,
    #[serde(default = "default_boundaries")]
    pub boundaries: Vec<BoundaryCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderModel>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    /// Multiplier on the number of repetitions.
    #[serde(default = "unit")]
    pub budget: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_boundaries() -> Vec<BoundaryCondition> {
    vec![BoundaryCondition::open()]
}

fn unit() -> f64 {
    1.0
}

/// Where the logical lattice comes from. Exactly one of explicit
/// dimensions, a stored embedding, or a generated Chimera family.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default)]
    pub topology: Topology,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vacancies: Vec<Edge>,
    /// An embedding file, or a directory of `embedding-*.json` files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chimera: Option<ChimeraSource>,
    #[serde(default)]
    pub chain_mode: ChainMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChimeraSource {
    #[serde(default = "sixteen")]
    pub rows: usize,
    #[serde(default = "sixteen")]
    pub cols: usize,
    #[serde(default)]
    pub defects: DefectSource,
    #[serde(default = "twenty")]
    pub embeddings: usize,
}

fn sixteen() -> usize {
    16
}

fn twenty() -> usize {
    20
}

impl Default for ChimeraSource {
    fn default() -> Self {
        ChimeraSource { rows: 16, cols: 16, defects: DefectSource::Reference, embeddings: 20 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectSource {
    /// The built-in defect pattern of a 16×16 device.
    #[default]
    Reference,
    None,
    Custom(Defects),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSweep {
    /// `J / J_MAX` values.
    pub scales: Vec<f64>,
    /// `J_perp / J_par` values.
    #[serde(default = "unit_list")]
    pub ratios: Vec<f64>,
}

fn unit_list() -> Vec<f64> {
    vec![1.0]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExposureProfile {
    #[default]
    Classical,
    ChimeraScale,
    LogicalScale,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pause {
    #[default]
    Long,
    Short,
}

/// Exposure strengths. Explicit values override the profile; `gammas`
/// turns the exposure into a sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExposureSpec {
    #[serde(default)]
    pub profile: ExposureProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub pause: Pause,
    /// Overrides the sweep count implied by `pause`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
}

impl ExposureSpec {
    pub fn resolve(&self) -> Vec<ExposureParams> {
        let sweeps = self.sweeps.unwrap_or(match self.pause {
            Pause::Long => LONG_SWEEPS,
            Pause::Short => SHORT_SWEEPS,
        });
        let base = match self.profile {
            ExposureProfile::Classical => ExposureParams::classical(0.089, sweeps),
            ExposureProfile::ChimeraScale => ExposureParams::chimera_scale(sweeps),
            ExposureProfile::LogicalScale => ExposureParams::logical_scale(sweeps),
        };
        let temperature = self.temperature.unwrap_or(base.temperature);
        let gammas = match (&self.gammas, self.gamma) {
            (Some(g), _) => g.clone(),
            (None, Some(g)) => vec![g],
            (None, None) => vec![base.gamma],
        };
        gammas.into_iter().map(|gamma| ExposureParams { gamma, temperature, sweeps }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    #[serde(default = "chain_length")]
    pub chain_length: usize,
    #[serde(default = "burn_in")]
    pub burn_in: usize,
    /// Repetitions per embedding at budget 1.
    #[serde(default = "repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "engine")]
    pub engine: Engine,
    #[serde(default)]
    pub options: EngineOptions,
}

fn chain_length() -> usize {
    128
}

fn burn_in() -> usize {
    16
}

fn repetitions() -> usize {
    200
}

fn engine() -> Engine {
    Engine::Loop
}

impl Default for ProtocolSection {
    fn default() -> Self {
        ProtocolSection {
            chain_length: chain_length(),
            burn_in: burn_in(),
            repetitions: repetitions(),
            seed: 0,
            engine: engine(),
            options: EngineOptions::default(),
        }
    }
}

impl ProtocolSection {
    pub fn spec(&self, repetitions: usize, seed: u64) -> ProtocolSpec {
        ProtocolSpec {
            chain_length: self.chain_length,
            burn_in: self.burn_in,
            repetitions,
            seed,
            engine: self.engine,
            options: self.options,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default = "yes")]
    pub structure_factor: bool,
    #[serde(default = "q_points")]
    pub q_points: usize,
    /// Use every n-th equilibrium state for the structure factor.
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default = "pinch_point")]
    pub pinch_point: [f64; 2],
    #[serde(default = "cut_axis")]
    pub cut_axis: CutAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgrid: Option<SubGrid>,
}

fn yes() -> bool {
    true
}

fn q_points() -> usize {
    DEFAULT_Q_POINTS
}

fn one() -> usize {
    1
}

fn pinch_point() -> [f64; 2] {
    [-2.0 * PI, 0.0]
}

fn cut_axis() -> CutAxis {
    CutAxis::Qy
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            structure_factor: true,
            q_points: q_points(),
            stride: 1,
            pinch_point: pinch_point(),
            cut_axis: cut_axis(),
            subgrid: None,
        }
    }
}

impl AnalysisSpec {
    pub fn grid(&self) -> QGrid {
        QGrid { points: self.q_points, ..QGrid::default() }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Repetitions per embedding after applying the budget.
    pub fn repetitions(&self) -> usize {
        ((self.protocol.repetitions as f64 * self.budget).round() as usize).max(1)
    }

    /// Every problem found in the file; empty when it is runnable.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.name.trim().is_empty() {
            out.push("name must not be empty".to_string());
        }
        let l = &self.lattice;
        let sources = usize::from(l.rows.is_some() || l.cols.is_some())
            + usize::from(l.embedding.is_some())
            + usize::from(l.chimera.is_some());
        if sources != 1 {
            out.push("lattice needs exactly one of rows/cols, embedding or chimera".to_string());
        }
        match (l.rows, l.cols) {
            (Some(r), Some(c)) => {
                if let Err(e) = IceLattice::with_vacancies(r, c, l.topology, &l.vacancies) {
                    out.push(e.detail());
                }
            }
            (None, None) => {}
            _ => out.push("lattice needs both rows and cols".to_string()),
        }
        if (l.embedding.is_some() || l.chimera.is_some()) && (!l.vacancies.is_empty() || l.topology != Topology::Open) {
            out.push("embedded lattices are open and take their vacancies from the embedding".to_string());
        }
        if let Some(c) = &l.chimera {
            if c.rows < 3 || c.cols < 3 {
                out.push(format!("chimera grid {}x{} is too small to hold a vertex", c.rows, c.cols));
            }
            if c.embeddings == 0 {
                out.push("chimera.embeddings must be positive".to_string());
            }
        }
        if l.chain_mode == ChainMode::Explicit && l.embedding.is_none() && l.chimera.is_none() {
            out.push("explicit chains need an embedded lattice".to_string());
        }

        check_list(&mut out, "coupling.scales", &self.coupling.scales, |x| x > 0.0 && x <= 1.0, "in (0, 1]");
        check_list(&mut out, "coupling.ratios", &self.coupling.ratios, |x| x > 0.0 && x <= 2.0, "in (0, 2]");
        let exposures = self.exposure.resolve();
        check_list(
            &mut out,
            "exposure gammas",
            &exposures.iter().map(|e| e.gamma).collect::<Vec<_>>(),
            |g| g >= 0.0,
            "non-negative",
        );
        for e in &exposures {
            if let Err(err) = e.validate() {
                out.push(err.detail());
                break;
            }
            if self.protocol.engine == Engine::Pimc && e.gamma <= 0.0 {
                out.push("the pimc engine needs gamma > 0".to_string());
                break;
            }
            if l.chain_mode == ChainMode::Explicit && e.gamma > 0.0 {
                out.push("explicit chains are sampled classically; set gamma to 0".to_string());
                break;
            }
        }
        if let Err(e) = self.protocol.spec(self.repetitions(), self.protocol.seed).validate() {
            out.push(e.detail());
        }
        if self.boundaries.is_empty() {
            out.push("boundaries must not be empty".to_string());
        }
        let periodic = l.topology == Topology::Periodic && l.chimera.is_none() && l.embedding.is_none();
        if periodic && self.boundaries.iter().any(|b| b.kind != BoundaryKind::Open) {
            out.push("boundary clamps need an open lattice".to_string());
        }
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            out.push(format!("budget must be positive, got {}", self.budget));
        }
        if let Some(d) = &self.disorder {
            if let Err(e) = d.validate() {
                out.push(e.detail());
            }
        }
        let a = &self.analysis;
        if a.q_points < 2 {
            out.push("analysis.q_points must be at least 2".to_string());
        }
        if a.stride == 0 {
            out.push("analysis.stride must be positive".to_string());
        }
        if a.pinch_point.iter().any(|q| !q.is_finite()) {
            out.push("analysis.pinch_point must be finite".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.diagnostics();
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(d.join("; ")))
        }
    }
}

fn check_list(out: &mut Vec<String>, name: &str, values: &[f64], ok: impl Fn(f64) -> bool, range: &str) {
    if values.is_empty() {
        out.push(format!("{name} must not be empty"));
    }
    if let Some(x) = values.iter().find(|&&x| !(x.is_finite() && ok(x))) {
        out.push(format!("{name} value {x} is not {range}"));
    }
}
