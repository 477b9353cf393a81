//! Executing an experiment into a result bundle.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{write_tables, AnalysisKind, CellObservables};
use super::bundle::{
    cell_dir, chain_file, create_dir, write_json, write_with, CellMeta, CellRecord, CellStatus, ChainMeta, Manifest,
    CHAINS_DIR, CONFIG_FILE, EMBEDDINGS_DIR, LATTICE_FILE, MANIFEST_FILE,
};
use super::config::{ChimeraSource, DefectSource, ExperimentConfig};
use super::tools::{load_embeddings, write_family};
use crate::embedding::{
    build_chimera, embed_family, reference_defects, rigid_problem, run_chimera_protocol, ChainMode, ChimeraGraph,
    ChimeraModel, DisorderRealization, Embedding,
};
use crate::error::{Error, Result};
use crate::ice::{CouplingSpec, IceLattice};
use crate::pinning::{resolve, BoundaryCondition, Pinning};
use crate::sampler::{
    chain_rng, lattice_bonds, run_protocol, BondKind, ExposureParams, InitialState, Problem, ProtocolSpec,
    SampleChain,
};

const EMBEDDING_STREAM: u64 = 1 << 40;
const DISORDER_STREAM: u64 = 2 << 40;
const PINNING_STREAM: u64 = 3 << 40;

/// One point of the parameter grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellPlan {
    pub index: usize,
    pub id: String,
    pub scale: f64,
    pub ratio: f64,
    pub exposure: ExposureParams,
    pub boundary: BoundaryCondition,
    pub seed: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of cell `index`, independent of scheduling.
pub fn cell_seed(seed: u64, index: usize) -> u64 {
    splitmix(seed ^ splitmix(index as u64))
}

/// Cells in sweep order: scale, ratio, gamma, boundary.
pub fn plan_cells(config: &ExperimentConfig) -> Vec<CellPlan> {
    let mut out = Vec::new();
    for &scale in &config.coupling.scales {
        for &ratio in &config.coupling.ratios {
            for exposure in config.exposure.resolve() {
                for boundary in &config.boundaries {
                    let index = out.len();
                    out.push(CellPlan {
                        index,
                        id: format!("{index:03}-j{scale}-r{ratio}-g{}-{}", exposure.gamma, boundary.kind.label()),
                        scale,
                        ratio,
                        exposure,
                        boundary: boundary.clone(),
                        seed: cell_seed(config.protocol.seed, index),
                    });
                }
            }
        }
    }
    out
}

/// The sampled system: a bare logical lattice, or a family of embeddings
/// sharing one logical lattice.
#[derive(Clone, Debug)]
pub enum Device {
    Logical {
        lattice: IceLattice,
        disorder: Option<DisorderRealization>,
    },
    Embedded {
        lattice: IceLattice,
        embeddings: Vec<Embedding>,
        disorder: Vec<Option<DisorderRealization>>,
        mode: ChainMode,
    },
}

pub fn chimera_graph(source: &ChimeraSource) -> Result<ChimeraGraph> {
    match &source.defects {
        DefectSource::Reference => build_chimera(source.rows, source.cols, &reference_defects()),
        DefectSource::None => ChimeraGraph::ideal(source.rows, source.cols),
        DefectSource::Custom(d) => build_chimera(source.rows, source.cols, d),
    }
}

impl Device {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        let l = &config.lattice;
        let seed = config.protocol.seed;
        let (lattice, embeddings) = if let Some(src) = &l.chimera {
            let graph = chimera_graph(src)?;
            let (lattice, family) = embed_family(&graph, src.embeddings, &mut chain_rng(seed, EMBEDDING_STREAM))?;
            (lattice, Some(family))
        } else if let Some(path) = &l.embedding {
            let family = load_embeddings(path)?;
            let lattice = family[0].logical_lattice()?;
            (lattice, Some(family))
        } else {
            let (rows, cols) = (l.rows.unwrap_or(0), l.cols.unwrap_or(0));
            (IceLattice::with_vacancies(rows, cols, l.topology, &l.vacancies)?, None)
        };
        match embeddings {
            None => {
                let disorder = match &config.disorder {
                    Some(d) => {
                        let kinds: Vec<BondKind> = lattice_bonds(&lattice).iter().map(|b| b.kind).collect();
                        Some(d.realize_bonds(&kinds, lattice.num_sites(), &mut chain_rng(seed, DISORDER_STREAM))?)
                    }
                    None => None,
                };
                Ok(Device::Logical { lattice, disorder })
            }
            Some(family) => {
                let disorder = family
                    .iter()
                    .enumerate()
                    .map(|(k, e)| match &config.disorder {
                        Some(d) => {
                            let n = e.graph()?.num_qubits();
                            d.realize(e, n, &mut chain_rng(seed, DISORDER_STREAM + 1 + k as u64)).map(Some)
                        }
                        None => Ok(None),
                    })
                    .collect::<Result<_>>()?;
                Ok(Device::Embedded { lattice, embeddings: family, disorder, mode: l.chain_mode })
            }
        }
    }

    pub fn lattice(&self) -> &IceLattice {
        match self {
            Device::Logical { lattice, .. } | Device::Embedded { lattice, .. } => lattice,
        }
    }

    pub fn embeddings(&self) -> &[Embedding] {
        match self {
            Device::Logical { .. } => &[],
            Device::Embedded { embeddings, .. } => embeddings,
        }
    }

    /// Independent device realizations chains are spread over.
    pub fn realizations(&self) -> usize {
        self.embeddings().len().max(1)
    }

    /// Chain `chain` of a cell; chains are grouped by realization in
    /// blocks of `per_realization`.
    pub fn run_chain(
        &self,
        plan: &CellPlan,
        protocol: &ProtocolSpec,
        chain: usize,
        per_realization: usize,
    ) -> Result<(SampleChain, ChainMeta)> {
        let coupling = CouplingSpec::with_ratio(plan.ratio, plan.scale);
        let lattice = self.lattice();
        let mut rng = chain_rng(plan.seed, PINNING_STREAM + chain as u64);
        let pinning = resolve(lattice, &coupling, &plan.boundary, &mut rng)?;
        let mut meta = ChainMeta {
            chain,
            file: chain_file(chain),
            embedding: None,
            flipped_site: pinning.flipped_site,
            pinned_vertex: pinning.pinned_vertex,
        };
        let with_pins = with_fields(&coupling, &pinning);
        let sampled = match self {
            Device::Logical { lattice, disorder } => {
                let mut c = with_pins;
                if let Some(d) = disorder {
                    for s in lattice.present_sites() {
                        if d.field[s] != 0.0 {
                            *c.fields.entry(s).or_insert(0.0) += d.field[s];
                        }
                    }
                }
                let problem =
                    Problem::build(lattice.clone(), c, &pinning.frozen, disorder.as_ref().map(|d| d.coupler.as_slice()))?;
                run_protocol(&problem, protocol, &plan.exposure, &InitialState::Random, chain as u64)?
            }
            Device::Embedded { embeddings, disorder, mode, .. } => {
                let k = (chain / per_realization.max(1)).min(embeddings.len() - 1);
                meta.embedding = Some(k);
                let mut e = embeddings[k].clone();
                e.program(&coupling);
                let d = disorder[k].as_ref();
                let logical = rigid_problem(&e, &with_pins, &pinning.frozen, d)?;
                match mode {
                    ChainMode::Rigid => {
                        run_protocol(&logical, protocol, &plan.exposure, &InitialState::Random, chain as u64)?
                    }
                    ChainMode::Explicit => {
                        let model = ChimeraModel::new(&e, &pinning.fields, &pinning.frozen, d)?;
                        let t = plan.exposure.temperature;
                        run_chimera_protocol(&model, &logical, protocol, t, plan.exposure.sweeps, chain as u64)?
                    }
                }
            }
        };
        Ok((sampled, meta))
    }
}

fn with_fields(coupling: &CouplingSpec, pinning: &Pinning) -> CouplingSpec {
    let mut c = coupling.clone();
    for (&s, &h) in &pinning.fields {
        *c.fields.entry(s).or_insert(0.0) += h;
    }
    c
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Worker threads; the rayon default when absent.
    pub workers: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out: PathBuf,
    pub manifest: Manifest,
}

impl RunSummary {
    pub fn failures(&self) -> usize {
        self.manifest.failed().count()
    }
}

/// Resolves where a run writes: the explicit path, else the configured
/// one, else `results/<name>`; relative paths are taken under `root`.
pub fn output_dir(explicit: Option<&Path>, config: &ExperimentConfig, root: Option<&Path>) -> PathBuf {
    let base = explicit
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| Path::new("results").join(&config.name));
    match root {
        Some(r) if base.is_relative() => r.join(base),
        _ => base,
    }
}

/// Runs every cell onto a bounded pool. A failing cell is recorded in the
/// manifest and does not stop the others.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<RunSummary> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(|| run_in_pool(config, &options.out))
}

fn run_in_pool(config: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    let device = Device::build(config)?;
    create_dir(out)?;
    let text = config.to_toml()?;
    write_with(&out.join(CONFIG_FILE), |w| std::io::Write::write_all(w, text.as_bytes()))?;
    write_json(&out.join(LATTICE_FILE), &device.lattice().descriptor())?;
    if !device.embeddings().is_empty() {
        write_family(&out.join(EMBEDDINGS_DIR), device.lattice(), device.embeddings())?;
    }

    let reps = config.repetitions();
    let plans = plan_cells(config);
    let results: Vec<(CellRecord, Option<(CellMeta, CellObservables)>)> = plans
        .par_iter()
        .map(|plan| {
            let chains = reps * device.realizations();
            let mut record = CellRecord {
                id: plan.id.clone(),
                scale: plan.scale,
                ratio: plan.ratio,
                gamma: plan.exposure.gamma,
                boundary: plan.boundary.kind,
                seed: plan.seed,
                chains,
                status: CellStatus::Ok,
                error: None,
            };
            match run_cell(config, &device, plan, reps, out) {
                Ok(done) => (record, Some(done)),
                Err(e) => {
                    record.status = CellStatus::Failed;
                    record.error = Some(e.to_string());
                    (record, None)
                }
            }
        })
        .collect();

    let done: Vec<(CellMeta, CellObservables)> = results.iter().filter_map(|(_, d)| d.clone()).collect();
    write_tables(out, &done, AnalysisKind::All)?;
    let manifest = Manifest {
        name: config.name.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.protocol.seed,
        budget: config.budget,
        repetitions: reps,
        embeddings: device.embeddings().len(),
        lattice: device.lattice().descriptor(),
        cells: results.into_iter().map(|(r, _)| r).collect(),
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(RunSummary { out: out.to_path_buf(), manifest })
}

fn run_cell(
    config: &ExperimentConfig,
    device: &Device,
    plan: &CellPlan,
    reps: usize,
    out: &Path,
) -> Result<(CellMeta, CellObservables)> {
    let dir = cell_dir(out, &plan.id);
    create_dir(&dir.join(CHAINS_DIR))?;
    let total = reps * device.realizations();
    let protocol = config.protocol.spec(total, plan.seed);
    let sampled: Vec<(SampleChain, ChainMeta)> =
        (0..total).into_par_iter().map(|k| device.run_chain(plan, &protocol, k, reps)).collect::<Result<_>>()?;
    let mut chains = Vec::with_capacity(total);
    let mut metas = Vec::with_capacity(total);
    for (chain, meta) in sampled {
        write_with(&dir.join(&meta.file), |w| chain.write_ndjson(w))?;
        if !chain.traces.is_empty() {
            write_json(&dir.join(format!("{CHAINS_DIR}/trace-{:04}.json", meta.chain)), &chain.traces)?;
        }
        chains.push(chain);
        metas.push(meta);
    }
    let meta = CellMeta {
        id: plan.id.clone(),
        scale: plan.scale,
        ratio: plan.ratio,
        exposure: plan.exposure,
        boundary: plan.boundary.clone(),
        protocol,
        chains: metas,
    };
    write_json(&dir.join(super::bundle::CELL_FILE), &meta)?;
    let obs = CellObservables::compute(device.lattice(), &meta, &chains, &config.analysis, AnalysisKind::All)?;
    obs.write(&dir)?;
    Ok((meta, obs))
}
