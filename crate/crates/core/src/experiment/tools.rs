//! Embedding generation and file validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bundle::{create_dir, read_json, write_json, LATTICE_FILE};
use super::config::{ChimeraSource, ExperimentConfig};
use super::run::{chimera_graph, plan_cells};
use crate::embedding::{embed_family, validate_embedding, Embedding, ValidityReport};
use crate::error::{Error, Result};
use crate::ice::{IceLattice, LatticeDescriptor};
use crate::sampler::chain_rng;

/// What `write_family` put on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub lattice: LatticeDescriptor,
    pub vacancies: usize,
    pub files: Vec<String>,
    pub reports: Vec<ValidityReport>,
}

impl FamilySummary {
    pub fn all_valid(&self) -> bool {
        self.reports.iter().all(ValidityReport::is_valid)
    }
}

/// A fresh family of embeddings sharing one vacancy set.
pub fn generate_family(source: &ChimeraSource, seed: u64) -> Result<(IceLattice, Vec<Embedding>)> {
    if source.embeddings == 0 {
        return Err(Error::Config("at least one embedding is required".into()));
    }
    let graph = chimera_graph(source)?;
    embed_family(&graph, source.embeddings, &mut chain_rng(seed, 0))
}

/// Writes `embedding-NN.json`, the shared lattice and a validity report.
pub fn write_family(dir: &Path, lattice: &IceLattice, family: &[Embedding]) -> Result<FamilySummary> {
    create_dir(dir)?;
    let mut files = Vec::new();
    let mut reports = Vec::new();
    for (k, e) in family.iter().enumerate() {
        let name = format!("embedding-{k:02}.json");
        e.save(&dir.join(&name))?;
        files.push(name);
        reports.push(validate_embedding(e)?);
    }
    write_json(&dir.join(LATTICE_FILE), &lattice.descriptor())?;
    let summary =
        FamilySummary { lattice: lattice.descriptor(), vacancies: lattice.vacancies().len(), files, reports };
    write_json(&dir.join("validity.json"), &summary)?;
    Ok(summary)
}

/// One embedding file, or every `embedding-*.json` in a directory in name
/// order. All must describe the same logical lattice.
pub fn load_embeddings(path: &Path) -> Result<Vec<Embedding>> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut v: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|d| d.ok().map(|d| d.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("embedding-") && n.ends_with(".json"))
            })
            .collect();
        v.sort();
        v
    } else {
        vec![path.to_path_buf()]
    };
    let family = files.iter().map(|f| Embedding::load(f)).collect::<Result<Vec<_>>>()?;
    let Some(first) = family.first() else {
        return Err(Error::Config(format!("no embeddings found in {}", path.display())));
    };
    if family.iter().any(|e| e.lattice != first.lattice) {
        return Err(Error::Config("embeddings do not share one logical lattice".into()));
    }
    Ok(family)
}

/// What a file turned out to be.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Validated {
    Experiment { name: String, cells: usize, chains_per_cell: usize, samples: usize },
    Embedding { report: ValidityReport },
    Lattice { sites: usize, vacancies: usize },
}

impl Validated {
    pub fn is_valid(&self) -> bool {
        match self {
            Validated::Embedding { report } => report.is_valid(),
            _ => true,
        }
    }
}

pub fn validate_config(config: &ExperimentConfig) -> Result<Validated> {
    config.validate()?;
    let realizations = match (&config.lattice.chimera, &config.lattice.embedding) {
        (Some(c), _) => c.embeddings,
        (None, Some(p)) => load_embeddings(p)?.len(),
        _ => 1,
    };
    let chains = config.repetitions() * realizations;
    let kept = config.protocol.chain_length - config.protocol.burn_in;
    Ok(Validated::Experiment {
        name: config.name.clone(),
        cells: plan_cells(config).len(),
        chains_per_cell: chains,
        samples: chains * kept,
    })
}

/// Checks an experiment file (`.toml`) or an embedding or lattice (`.json`).
pub fn validate_file(path: &Path) -> Result<Validated> {
    if path.extension().is_some_and(|e| e == "json") {
        let value: serde_json::Value = read_json(path)?;
        if value.get("chains").is_some() {
            let e = Embedding::load(path)?;
            return Ok(Validated::Embedding { report: validate_embedding(&e)? });
        }
        let d: LatticeDescriptor =
            serde_json::from_value(value).map_err(|e| Error::json(path.display().to_string(), e))?;
        let l = IceLattice::try_from(d)?;
        return Ok(Validated::Lattice { sites: l.num_sites(), vacancies: l.vacancies().len() });
    }
    validate_config(&ExperimentConfig::load(path)?)
}
