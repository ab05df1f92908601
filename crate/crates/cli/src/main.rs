use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use palmdt_cli::{experiments, CliError};

#[derive(Parser)]
#[command(name = "palmdt", version, about = "Monte Carlo experiments on Delaunay graphs of point processes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a key=value config file.
    Run {
        config: PathBuf,
        /// Worker threads; 0 uses all available cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Render an experiment CSV as SVG.
    Plot {
        #[arg(long)]
        kind: String,
        csv: PathBuf,
        /// Defaults to the CSV path with an .svg extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the deterministic geometry checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw one planar configuration and write it as a point file.
    Sample {
        #[arg(long)]
        process: String,
        /// Process parameter as name=value; repeatable.
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, String)>,
        /// Tabulated pair potential for the gibbs process.
        #[arg(long)]
        potential: Option<PathBuf>,
        /// Half-side of the centred window.
        #[arg(long, default_value_t = 10.0)]
        half: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    s.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string())).ok_or_else(|| format!("expected name=value, got {s:?}"))
}

fn dispatch(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Run { config, threads } => {
            let out = palmdt_cli::run(&config, threads)?;
            for f in &out.files {
                println!("{}", out.output_dir.join(f).display());
            }
        }
        Cmd::Plot { kind, csv, out } => {
            println!("{}", palmdt_cli::plot(&kind, &csv, out.as_deref())?.display());
        }
        Cmd::Selftest { seed } => {
            let table = experiments::selftest_table(seed).map_err(CliError::Runtime)?;
            print!("{}", table.render());
            if (0..table.rows.len()).any(|r| !table.flag(r, "pass")) {
                return Err(CliError::Runtime(anyhow::anyhow!("geometry selftest failed")));
            }
        }
        Cmd::Sample { process, params, potential, half, seed, out } => {
            let n = palmdt_cli::sample(&process, &params, potential.as_deref(), half, seed, &out)?;
            println!("{n} points -> {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
