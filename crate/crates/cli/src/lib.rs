//! File formats, experiment runner and plotting for the `palmdt` command.

pub mod config;
pub mod csv;
pub mod exec;
pub mod experiments;
pub mod files;
pub mod manifest;
pub mod plot;

use std::fmt;
use std::path::{Path, PathBuf};

use config::{load_config, ExperimentConfig};
use csv::write_atomic;
use exec::RayonExecutor;
use manifest::{now, RunManifest};

/// Overrides `output=` from the config when set.
pub const OUTPUT_DIR_ENV: &str = "PALMDT_OUTPUT_DIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn runtime(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Runtime(e.into())
}

#[derive(Debug)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    /// File names written, manifest last.
    pub files: Vec<String>,
}

/// The output directory after the environment override.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => cfg.output_dir.clone(),
    }
}

/// Runs `cfg` and writes its CSVs and manifest into `dir`.
pub fn run_config(cfg: &ExperimentConfig, dir: &Path, threads: usize) -> Result<RunOutcome, CliError> {
    let started = now();
    let exec = RayonExecutor::new(threads).map_err(CliError::Runtime)?;
    let tables = experiments::run_experiment(cfg, &exec).map_err(CliError::Runtime)?;
    std::fs::create_dir_all(dir).map_err(runtime)?;
    let mut manifest = RunManifest::new(&cfg.entries, started);
    let mut files = Vec::new();
    for (name, table) in &tables {
        let body = table.render();
        write_atomic(&dir.join(name), body.as_bytes()).map_err(runtime)?;
        manifest.add_output(name, body.as_bytes());
        files.push(name.clone());
    }
    manifest.write(dir).map_err(runtime)?;
    files.push(manifest::MANIFEST_NAME.into());
    Ok(RunOutcome { output_dir: dir.to_path_buf(), files })
}

/// `palmdt run <config>`.
pub fn run(path: &Path, threads: usize) -> Result<RunOutcome, CliError> {
    let cfg = load_config(path)?;
    run_config(&cfg, &output_dir(&cfg), threads)
}

/// `palmdt plot --kind <k> <csv>`; returns the SVG path.
pub fn plot(kind: &str, csv_path: &Path, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let k = plot::PlotKind::parse(kind).ok_or_else(|| {
        let kinds: Vec<&str> = plot::PlotKind::ALL.iter().map(|k| k.tag()).collect();
        CliError::Usage(format!("unknown plot kind {kind:?} (one of {})", kinds.join(", ")))
    })?;
    let text = std::fs::read_to_string(csv_path)
        .map_err(|e| CliError::Config(format!("{}: {e}", csv_path.display())))?;
    let svg = plot::render(k, &csv::Table::parse(&text)).map_err(|e| CliError::Config(format!("{}: {e}", csv_path.display())))?;
    let out = out.map_or_else(|| csv_path.with_extension("svg"), Path::to_path_buf);
    write_atomic(&out, svg.as_bytes()).map_err(runtime)?;
    Ok(out)
}

/// `palmdt sample`: draws one configuration in the centred window of
/// half-side `half` and writes it as a point file.
pub fn sample(
    process: &str,
    params: &[(String, String)],
    potential: Option<&Path>,
    half: f64,
    seed: u64,
    out: &Path,
) -> Result<usize, CliError> {
    let mut text = format!("process={process}\n");
    for (k, v) in params {
        text += &format!("param.{k}={v}\n");
    }
    if let Some(p) = potential {
        text += &format!("potential={}\n", p.display());
    }
    let entries = config::tokenize(&text)?;
    let spec = config::parse_process(&entries, None)?;
    let window = palmdt::geom::AxisBox::centered(2, half).map_err(|e| CliError::Usage(e.to_string()))?;
    let pts = palmdt::process::sample(&spec, &window, &palmdt::rng::RngStream::new(seed, 0, "sample")).map_err(runtime)?;
    write_atomic(out, files::format_points(&pts).as_bytes()).map_err(runtime)?;
    Ok(pts.len())
}
