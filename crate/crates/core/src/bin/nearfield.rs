use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nearfield::cidft::build_lookup_table;
use nearfield::codebook::{dft_codebook, polar_codebook};
use nearfield::experiment::{emit_report, run_sweep, ExperimentConfig, SweepKind, Workspace};
use nearfield::Error;

#[derive(Parser)]
#[command(
    name = "nearfield",
    version,
    about = "Near-field beam training experiments with DFT codebooks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Distance,
    Snr,
}

#[derive(Clone, Copy, ValueEnum)]
enum BookArg {
    Dft,
    Polar,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// TOML experiment configuration; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep and write trials.csv, aggregate.csv and overhead.csv.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum)]
        sweep: Option<SweepArg>,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated subset of PerfectCSI,Exhaustive,Hierarchical,FarField,CIDFT.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
        /// Reuse (or create) the lookup table at this path.
        #[arg(long)]
        table_cache: Option<PathBuf>,
    },
    /// Print the training-overhead table as CSV.
    Overhead {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Build the spread lookup table and write it to a file.
    Table {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export a codebook: `<out>.csv` metadata and `<out>.entries.csv` coefficients.
    Codebook {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum)]
        kind: BookArg,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(args: &ConfigArgs) -> nearfield::Result<ExperimentConfig> {
    match &args.config {
        Some(path) => ExperimentConfig::from_file(path),
        None => Ok(ExperimentConfig::default()),
    }
}

fn create(path: &PathBuf) -> nearfield::Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn execute(command: Command) -> nearfield::Result<()> {
    match command {
        Command::Run {
            config,
            seed,
            out,
            sweep,
            trials,
            schemes,
            table_cache,
        } => {
            let mut cfg = load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(sweep) = sweep {
                let kind = match sweep {
                    SweepArg::Distance => SweepKind::Distance,
                    SweepArg::Snr => SweepKind::Snr,
                };
                if kind != cfg.sweep.kind {
                    cfg.sweep.points.clear();
                }
                cfg.sweep.kind = kind;
            }
            if let Some(trials) = trials {
                cfg.sweep.trials = trials;
            }
            if let Some(schemes) = schemes {
                cfg.schemes = schemes;
            }
            let ws = Workspace::build(&cfg, table_cache.as_deref())?;
            let records = run_sweep(&cfg, &ws)?;
            let paths = emit_report(&records, &ws.overhead, &out)?;
            fs::write(out.join("config.toml"), cfg.to_toml_string())?;
            eprintln!(
                "{} records -> {}, {}, {}",
                records.len(),
                paths.trials.display(),
                paths.aggregate.display(),
                paths.overhead.display()
            );
            Ok(())
        }
        Command::Overhead { config } => {
            let mut cfg = load(&config)?;
            cfg.schemes = vec!["FarField".into()];
            let ws = Workspace::build(&cfg, None)?;
            nearfield::experiment::write_overhead_csv(&ws.overhead, std::io::stdout().lock())
        }
        Command::Table { config, out } => {
            let cfg = load(&config)?;
            cfg.validate()?;
            let array = cfg.array_config()?;
            let book = dft_codebook(&array, cfg.coverage.sin_min, cfg.coverage.sin_max)?;
            let table = build_lookup_table(&array, &book)?;
            table.save(&out)?;
            eprintln!(
                "{} cells over {} angles -> {}",
                table.entry_count(),
                table.columns().len(),
                out.display()
            );
            Ok(())
        }
        Command::Codebook { config, kind, out } => {
            let cfg = load(&config)?;
            cfg.validate()?;
            let array = cfg.array_config()?;
            let (lo, hi) = (cfg.coverage.sin_min, cfg.coverage.sin_max);
            let book = match kind {
                BookArg::Dft => dft_codebook(&array, lo, hi)?,
                BookArg::Polar => polar_codebook(&array, lo, hi)?,
            };
            book.write_csv(create(&out.with_extension("csv"))?)?;
            book.write_entries(create(&out.with_extension("entries.csv"))?)?;
            eprintln!("{} codewords -> {}", book.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config { .. } => ExitCode::from(2),
                Error::NonFinite(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
