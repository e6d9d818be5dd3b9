use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use levelbound::report::{
    error_exit_code, run_average, run_scan, run_verify, write_average_csv, RunConfig, ScanConfig,
};
use levelbound::Error;

#[derive(Parser)]
#[command(name = "levelbound", version, about = "Angle-averaged bounds on bound-state energies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct GridOverrides {
    /// Interior points per axis on the fine grid.
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// Box half-width.
    #[arg(long = "grid-L")]
    grid_l: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one potential and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Report file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        grid: GridOverrides,
    },
    /// Verify a batch of random Gaussian-sum potentials.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for summary.csv and reports/ (summary to stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Maximum number of potentials solved at once.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        grid: GridOverrides,
    },
    /// Tabulate V̄(r) and the zero-mean residual as CSV.
    Average {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_output(out: Option<&PathBuf>, text: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text)?,
    }
    Ok(())
}

fn verify(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>, grid: GridOverrides) -> Result<i32, Error> {
    let mut cfg = RunConfig::from_path(&config)?;
    cfg.override_grid(grid.grid_n, grid.grid_l)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    match run_verify(&cfg) {
        Ok(report) => {
            write_output(out.as_ref(), report.to_json().as_bytes())?;
            Ok(report.exit_code())
        }
        Err(failure) => {
            eprintln!("levelbound: {}", failure.error);
            if let Some(partial) = &failure.partial {
                write_output(out.as_ref(), partial.to_json().as_bytes())?;
            }
            Ok(failure.exit_code())
        }
    }
}

fn scan(
    config: PathBuf,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    seed: Option<u64>,
    grid: GridOverrides,
) -> Result<i32, Error> {
    let mut cfg = ScanConfig::from_path(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = grid.grid_n {
        cfg.grid.n = n;
        cfg.grid.n_coarse = None;
    }
    if let Some(l) = grid.grid_l {
        cfg.grid.half_width = l;
    }
    let outcome = run_scan(&cfg, jobs)?;
    match out {
        Some(dir) => outcome.write_to(&dir)?,
        None => outcome.write_summary(std::io::stdout())?,
    }
    for (i, r) in outcome.reports.iter().enumerate() {
        if let Err(f) = r {
            eprintln!("levelbound: spec {i}: {}", f.error);
        }
    }
    Ok(outcome.exit_code())
}

fn average(config: PathBuf, radii: Vec<f64>, out: Option<PathBuf>) -> Result<i32, Error> {
    let cfg = RunConfig::from_path(&config)?;
    let rows = run_average(&cfg, &radii)?;
    let mut buf = Vec::new();
    write_average_csv(&rows, &mut buf)?;
    write_output(out.as_ref(), &buf)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { config, out, seed, grid } => verify(config, out, seed, grid),
        Command::Scan { config, out, jobs, seed, grid } => scan(config, out, jobs, seed, grid),
        Command::Average { config, radii, out } => average(config, radii, out),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("levelbound: {e}");
            error_exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
