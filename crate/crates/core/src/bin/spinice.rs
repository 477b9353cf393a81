use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinice::embedding::Defects;
use spinice::experiment::{
    analyze, generate_family, output_dir, preset, run_experiment, validate_config, validate_file, write_family,
    AnalysisKind, ChimeraSource, DefectSource, ExperimentConfig, RunOptions, Validated,
};
use spinice::Error;

const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 3;
const PARTIAL_FAILURE: u8 = 4;

/// Square-ice sampling experiments.
#[derive(Parser)]
#[command(name = "spinice", version, about)]
struct Cli {
    /// Root for relative output directories.
    #[arg(long, global = true, env = "SPINICE_OUTPUT_ROOT")]
    output_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file or preset and write a result bundle.
    Run(RunArgs),
    /// Recompute observables from a stored bundle.
    Analyze(AnalyzeArgs),
    /// Generate a family of Chimera embeddings sharing one vacancy set.
    Embed(EmbedArgs),
    /// Check experiment files, embeddings or lattices without running.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Source {
    /// Experiment file (TOML).
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment: fig2, fig3, fig4, figS4, figS5.
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        match (&self.preset, &self.config) {
            (Some(p), _) => preset(p),
            (None, Some(path)) => ExperimentConfig::load(path),
            (None, None) => Err(Error::Config("no experiment given".into())),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplier on the number of repetitions.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Result bundle written by `run`.
    results: PathBuf,
    /// all, frequencies, structure-factor, monopoles, screening, mixing or symmetry.
    #[arg(long, default_value = "all")]
    kind: AnalysisKind,
    /// Defaults to `<results>/analysis`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Chimera cell rows.
    #[arg(long, default_value_t = 16)]
    rows: usize,
    #[arg(long, default_value_t = 16)]
    cols: usize,
    /// `reference`, `none`, or a JSON file of dead qubits and couplers.
    #[arg(long, default_value = "reference")]
    defects: String,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "embeddings")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// `.toml` experiment files or `.json` embeddings and lattices.
    paths: Vec<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config() { CONFIG_ERROR } else { RUNTIME_ERROR })
}

fn rooted(path: &Path, root: Option<&Path>) -> PathBuf {
    match root {
        Some(r) if path.is_relative() => r.join(path),
        _ => path.to_path_buf(),
    }
}

fn run(args: &RunArgs, root: Option<&Path>) -> Result<ExitCode, Error> {
    let mut config = args.source.load()?;
    if let Some(s) = args.seed {
        config.protocol.seed = s;
    }
    if let Some(b) = args.budget {
        config.budget = b;
    }
    config.validate()?;
    let out = output_dir(args.out.as_deref(), &config, root);
    let summary = run_experiment(&config, &RunOptions { out, workers: args.workers })?;
    let m = &summary.manifest;
    println!("{}: {} cells, {} chains each, written to {}", m.name, m.cells.len(), m.cells[0].chains, summary.out.display());
    for c in m.failed() {
        eprintln!("cell {} failed: {}", c.id, c.error.as_deref().unwrap_or("unknown error"));
    }
    Ok(if summary.failures() > 0 { ExitCode::from(PARTIAL_FAILURE) } else { ExitCode::SUCCESS })
}

fn analyze_cmd(args: &AnalyzeArgs, root: Option<&Path>) -> Result<ExitCode, Error> {
    let out = args.out.as_deref().map(|p| rooted(p, root));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let written = pool.install(|| analyze(&args.results, args.kind, out.as_deref()))?;
    println!("{} analysis written to {}", args.kind, written.display());
    Ok(ExitCode::SUCCESS)
}

fn embed(args: &EmbedArgs, root: Option<&Path>) -> Result<ExitCode, Error> {
    let defects = match args.defects.as_str() {
        "reference" => DefectSource::Reference,
        "none" => DefectSource::None,
        file => {
            let text = std::fs::read_to_string(file).map_err(|e| Error::Config(format!("{file}: {e}")))?;
            let d: Defects = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{file}: {e}")))?;
            DefectSource::Custom(d)
        }
    };
    let source = ChimeraSource { rows: args.rows, cols: args.cols, defects, embeddings: args.count };
    let (lattice, family) = generate_family(&source, args.seed)?;
    let out = rooted(&args.out, root);
    let summary = write_family(&out, &lattice, &family)?;
    println!(
        "{} embeddings of a {}x{} lattice with {} vacancies written to {}",
        family.len(),
        lattice.rows(),
        lattice.cols(),
        summary.vacancies,
        out.display()
    );
    if summary.all_valid() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("some embeddings failed validation, see validity.json");
        Ok(ExitCode::from(RUNTIME_ERROR))
    }
}

fn report(name: &str, v: &Validated) -> bool {
    match v {
        Validated::Experiment { name: n, cells, chains_per_cell, samples } => {
            println!("{name}: ok, experiment {n}, {cells} cells x {chains_per_cell} chains, {samples} samples per cell")
        }
        Validated::Embedding { report } if report.is_valid() => {
            println!("{name}: ok, embedding with {} chains and {} couplers", report.chains, report.couplers)
        }
        Validated::Embedding { report } => {
            println!("{name}: invalid embedding");
            for p in &report.problems {
                println!("  {p}");
            }
        }
        Validated::Lattice { sites, vacancies } => println!("{name}: ok, lattice with {sites} sites, {vacancies} vacant"),
    }
    v.is_valid()
}

fn validate(args: &ValidateArgs) -> Result<ExitCode, Error> {
    if args.paths.is_empty() && args.preset.is_none() {
        return Err(Error::Config("nothing to validate".into()));
    }
    let mut ok = true;
    if let Some(p) = &args.preset {
        ok &= report(p, &validate_config(&preset(p)?)?);
    }
    for path in &args.paths {
        let name = path.display().to_string();
        match validate_file(path) {
            Ok(v) => ok &= report(&name, &v),
            Err(e) => {
                println!("{name}: {e}");
                ok = false;
            }
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(CONFIG_ERROR) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let root = cli.output_root.as_deref();
    let result = match &cli.command {
        Command::Run(a) => run(a, root),
        Command::Analyze(a) => analyze_cmd(a, root),
        Command::Embed(a) => embed(a, root),
        Command::Validate(a) => validate(a),
    };
    result.unwrap_or_else(|e| fail(&e))
}
