//! Recomputing observables from a stored bundle.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::analysis::{write_tables, AnalysisKind, CellObservables};
use super::bundle::{
    cell_dir, read_json, CellMeta, CellStatus, Manifest, CELLS_DIR, CELL_FILE, CONFIG_FILE, LATTICE_FILE,
    MANIFEST_FILE,
};
use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::ice::{IceLattice, LatticeDescriptor};
use crate::sampler::SampleChain;

/// Metadata and chains of one stored cell.
pub fn load_cell(root: &Path, id: &str, lattice: &IceLattice) -> Result<(CellMeta, Vec<SampleChain>)> {
    let dir = cell_dir(root, id);
    let meta: CellMeta = read_json(&dir.join(CELL_FILE))?;
    let chains = meta
        .chains
        .iter()
        .map(|c| {
            let path = dir.join(&c.file);
            let f = File::open(&path).map_err(|e| Error::io(&path, e))?;
            SampleChain::read_ndjson(lattice, BufReader::new(f))
                .map_err(|e| Error::Analysis(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((meta, chains))
}

/// Recomputes `kind` for every completed cell from its chain files and
/// writes per-cell files under `out/cells/` plus the cross-cell tables.
/// The default output is `<results>/analysis`.
pub fn analyze(results: &Path, kind: AnalysisKind, out: Option<&Path>) -> Result<PathBuf> {
    let manifest: Manifest = read_json(&results.join(MANIFEST_FILE))?;
    let descriptor: LatticeDescriptor = read_json(&results.join(LATTICE_FILE))?;
    let lattice = IceLattice::try_from(descriptor)?;
    let config = ExperimentConfig::load(&results.join(CONFIG_FILE))?;
    let out = out.map_or_else(|| results.join("analysis"), Path::to_path_buf);
    let done: Vec<(CellMeta, CellObservables)> = manifest
        .cells
        .par_iter()
        .filter(|c| c.status == CellStatus::Ok)
        .map(|c| {
            let (meta, chains) = load_cell(results, &c.id, &lattice)?;
            let obs = CellObservables::compute(&lattice, &meta, &chains, &config.analysis, kind)?;
            obs.write(&out.join(CELLS_DIR).join(&c.id))?;
            Ok((meta, obs))
        })
        .collect::<Result<_>>()?;
    write_tables(&out, &done, kind)?;
    Ok(out)
}
