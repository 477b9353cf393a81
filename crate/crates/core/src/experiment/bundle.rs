//! Layout of a result bundle on disk.
//!
//! ```text
//! <out>/config.toml         resolved experiment file
//! <out>/lattice.json        logical lattice
//! <out>/manifest.json       seeds, versions and cell status
//! <out>/embeddings/         embeddings used, when embedded
//! <out>/cells/<id>/cell.json
//! <out>/cells/<id>/chains/chain-NNNN.ndjson
//! <out>/cells/<id>/*.json, *.csv   per-cell observables
//! <out>/tables/*.csv        one row per cell
//! <out>/screening/          pinned-monopole profiles
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ice::LatticeDescriptor;
use crate::pinning::{BoundaryCondition, BoundaryKind};
use crate::sampler::{ExposureParams, ProtocolSpec};

pub const CONFIG_FILE: &str = "config.toml";
pub const LATTICE_FILE: &str = "lattice.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CELL_FILE: &str = "cell.json";
pub const CELLS_DIR: &str = "cells";
pub const CHAINS_DIR: &str = "chains";
pub const EMBEDDINGS_DIR: &str = "embeddings";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub version: String,
    pub seed: u64,
    pub budget: f64,
    /// Repetitions per embedding.
    pub repetitions: usize,
    pub embeddings: usize,
    pub lattice: LatticeDescriptor,
    pub cells: Vec<CellRecord>,
}

impl Manifest {
    pub fn failed(&self) -> impl Iterator<Item = &CellRecord> {
        self.cells.iter().filter(|c| c.status == CellStatus::Failed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub id: String,
    pub scale: f64,
    pub ratio: f64,
    pub gamma: f64,
    pub boundary: BoundaryKind,
    pub seed: u64,
    pub chains: usize,
    pub status: CellStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainMeta {
    pub chain: usize,
    pub file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flipped_site: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned_vertex: Option<usize>,
}

/// Everything needed to re-analyze one cell from its chains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellMeta {
    pub id: String,
    pub scale: f64,
    pub ratio: f64,
    pub exposure: ExposureParams,
    pub boundary: BoundaryCondition,
    pub protocol: ProtocolSpec,
    pub chains: Vec<ChainMeta>,
}

impl CellMeta {
    pub fn kind(&self) -> BoundaryKind {
        self.boundary.kind
    }

    pub fn pinned_vertex(&self) -> Option<usize> {
        self.chains.iter().find_map(|c| c.pinned_vertex)
    }

    /// Cells sharing couplings and exposure.
    pub fn same_point(&self, other: &CellMeta) -> bool {
        self.scale == other.scale && self.ratio == other.ratio && self.exposure == other.exposure
    }
}

pub fn cell_dir(root: &Path, id: &str) -> PathBuf {
    root.join(CELLS_DIR).join(id)
}

pub fn chain_file(chain: usize) -> String {
    format!("{CHAINS_DIR}/chain-{chain:04}.ndjson")
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::json(path.display().to_string(), e))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| Error::json(path.display().to_string(), e))
}

/// Writes through a buffered file, mapping I/O errors to `path`.
pub fn write_with(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
