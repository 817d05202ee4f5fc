use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use relaygrid::experiment::{emit_complexity_table, emit_svg, run_experiment, ExperimentConfig, SvgStyle};
use relaygrid::{Error, Result};

#[derive(Parser)]
#[command(name = "relaygrid", version, about = "ASEP of amplify-and-forward relay clusters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its CSV (and SVG).
    Run {
        config: PathBuf,
        /// Directory for the output files, overriding the config's paths.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check analytic rows against their Monte-Carlo rows (exit 5 on mismatch).
        #[arg(long)]
        self_check: bool,
    },
    /// Write the protocol complexity table as CSV.
    Complexity {
        #[arg(long)]
        hops: usize,
        #[arg(long)]
        relays: usize,
        /// Comma-separated AP-n windows.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a result CSV as an SVG chart.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out, self_check } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = run_experiment(&cfg, out.as_deref(), self_check)?;
            eprintln!("wrote {} rows to {}", summary.rows.len(), summary.csv_path.display());
            if let Some(svg) = summary.svg_path {
                eprintln!("wrote {}", svg.display());
            }
            Ok(())
        }
        Command::Complexity { hops, relays, n, out } => write(&out, &emit_complexity_table(hops, relays, &n)?),
        Command::Plot { csv, out } => emit_svg(&csv, &out, &SvgStyle::default()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relaygrid: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
