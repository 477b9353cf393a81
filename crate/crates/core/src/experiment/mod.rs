//! Declarative experiments: config files and presets, the runner over a
//! parameter grid, the on-disk result bundle and re-analysis of stored
//! chains.

pub mod analysis;
pub mod analyze;
pub mod bundle;
pub mod config;
pub mod presets;
pub mod run;
pub mod tools;

pub use analysis::{screening_entries, write_tables, AnalysisKind, CellObservables, ScreeningEntry};
pub use analyze::{analyze, load_cell};
pub use bundle::{CellMeta, CellRecord, CellStatus, ChainMeta, Manifest};
pub use config::{
    AnalysisSpec, ChimeraSource, CouplingSweep, DefectSource, ExperimentConfig, ExposureProfile, ExposureSpec,
    LatticeSpec, Pause, ProtocolSection,
};
pub use presets::{preset, preset_names, preset_text, PRESETS};
pub use run::{cell_seed, output_dir, plan_cells, run_experiment, CellPlan, Device, RunOptions, RunSummary};
pub use tools::{generate_family, load_embeddings, validate_config, validate_file, write_family, FamilySummary, Validated};
