//! Runs a small declarative experiment and re-analyzes the stored bundle.
use spinice::experiment::{analyze, run_experiment, AnalysisKind, ExperimentConfig, RunOptions};

const CONFIG: &str = r#"
name = "example"
boundaries = [{ kind = "open" }, { kind = "pinned-monopole" }]
[lattice]
rows = 6
cols = 6
[coupling]
scales = [0.25, 1.0]
[exposure]
sweeps = 16
[protocol]
chain_length = 32
burn_in = 4
repetitions = 4
seed = 12
"#;

fn main() -> spinice::Result<()> {
    let config = ExperimentConfig::from_toml(CONFIG)?;
    let out = std::env::temp_dir().join("spinice-example");
    let summary = run_experiment(&config, &RunOptions { out: out.clone(), workers: None })?;
    println!("{} cells written to {}", summary.manifest.cells.len(), summary.out.display());
    let tables = analyze(&out, AnalysisKind::All, None)?;
    println!("analysis in {}", tables.display());
    println!("{}", std::fs::read_to_string(out.join("tables/frequencies.csv")).unwrap_or_default());
    Ok(())
}
