use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qenc_cli::config::{ExperimentConfig, Scenario};
use qenc_cli::fetch::{fetch_mnist, DEFAULT_MIRROR};
use qenc_cli::grid::expand_grid;
use qenc_cli::{emit_plots, run_experiment, run_grid, RunError, RunResult};
use qenc_core::encoders::EncodingMethod;

#[derive(Parser)]
#[command(name = "qenc", version, about = "Swap-test classifier encoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate one configuration.
    Run(Overrides),
    /// Run every (scenario, encoding) cell of the config's grid section.
    Grid {
        #[command(flatten)]
        overrides: Overrides,
        /// Seeds per cell (seed, seed + 1, ...).
        #[arg(long)]
        repeats: Option<usize>,
    },
    /// Render training curves from metrics CSV files.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
    /// Download MNIST and verify checksums.
    FetchData {
        #[arg(long, default_value = "data/mnist")]
        dest: PathBuf,
        #[arg(long, default_value = DEFAULT_MIRROR)]
        mirror: String,
    },
}

#[derive(Args)]
struct Overrides {
    /// TOML experiment config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// basis, rotation or amplitude. For `grid`, restricts the grid to it.
    #[arg(long)]
    encoding: Option<EncodingMethod>,
    /// pure, noisy or noisy_dd. For `grid`, restricts the grid to it.
    #[arg(long)]
    scenario: Option<Scenario>,
}

impl Overrides {
    fn load(&self) -> RunResult<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(d) = &self.output_dir {
            c.output_dir = d.clone();
        }
        if let Some(e) = self.encoding {
            c.encoding = e;
            c.grid.encodings = vec![e];
        }
        if let Some(s) = self.scenario {
            c.scenario = s;
            c.grid.scenarios = vec![s];
        }
        Ok(c)
    }
}

fn execute(cli: Cli) -> RunResult<()> {
    match cli.command {
        Command::Run(o) => {
            let report = run_experiment(&o.load()?)?;
            println!(
                "final accuracy {:.4} ({} epochs), outputs in {}",
                report.final_accuracy,
                report.metrics.len(),
                report.config.output_dir.display()
            );
        }
        Command::Grid { overrides, repeats } => {
            let mut base = overrides.load()?;
            if let Some(r) = repeats {
                base.grid.repeats = r;
            }
            base.validate_grid()?;
            let summary = run_grid(&expand_grid(&base), &base.output_dir)?;
            print!(
                "{}",
                std::fs::read_to_string(&summary.summary_csv)
                    .map_err(|e| RunError::io(&summary.summary_csv, e))?
            );
            for c in &summary.cells {
                if let Err(msg) = &c.result {
                    eprintln!("cell {}/{} seed {} failed: {msg}", c.scenario, c.encoding, c.seed);
                }
            }
        }
        Command::Plot { csv } => {
            for svg in emit_plots(&csv)? {
                println!("{}", svg.display());
            }
        }
        Command::FetchData { dest, mirror } => {
            for path in fetch_mnist(&dest, &mirror)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
