//! `blockfade` — finite-blocklength rate bounds for noncoherent Rayleigh
//! block-fading channels, figure-dataset reproduction and slotted-ALOHA
//! slot optimization.
//!
//! Same seed and configuration produce byte-identical output regardless
//! of the worker count.

mod config;
mod output;
mod run;
mod selftest;

use clap::{Args, Parser, Subcommand};
use config::{Defaults, RawOptions, RunConfig};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "blockfade", version, about)]
struct Cli {
    /// Optional key=value defaults file (same keys as the long flags);
    /// explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate rate bounds over a (snr x coherence x blocks) grid
    Bounds(BoundsArgs),
    /// Emit the dataset behind one of the published figures (1-6)
    Figure(FigureArgs),
    /// Optimal slotted-ALOHA slot counts per channel model
    Aloha(AlohaArgs),
    /// Quick built-in sanity checks; exit code reports the verdict
    Selftest,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    opts: RawOptions,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure id, 1-6
    #[arg(long)]
    fig: u8,
    #[command(flatten)]
    opts: RawOptions,
}

#[derive(Args)]
struct AlohaArgs {
    /// Frame length in channel uses
    #[arg(long, default_value_t = 480)]
    frame: u32,
    /// Payload size in bits
    #[arg(long = "payload-bits", default_value_t = 256)]
    payload_bits: u32,
    /// Number of contending devices
    #[arg(long, default_value_t = 12)]
    devices: u32,
    #[command(flatten)]
    opts: RawOptions,
}

fn load_file_map(path: &Option<PathBuf>) -> Result<BTreeMap<String, String>, blockfade_core::Error> {
    match path {
        Some(p) => config::read_config_file(p),
        None => Ok(BTreeMap::new()),
    }
}

fn open_sink(cfg: &RunConfig) -> std::io::Result<Box<dyn Write>> {
    match &cfg.out {
        Some(path) => Ok(Box::new(std::io::BufWriter::new(std::fs::File::create(path)?))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn report(errors: &[run::RowError], warnings: &[String]) -> bool {
    for w in warnings {
        eprintln!("warning: {w}");
    }
    for e in errors {
        eprintln!("error: {}: {}", e.context, e.error);
    }
    errors.is_empty()
}

fn emit_rates(cfg: &RunConfig, ds: &run::RateDataset) -> std::io::Result<bool> {
    let mut sink = open_sink(cfg)?;
    output::write_rate_rows(&mut sink, cfg.format, &ds.comments, &ds.rows)?;
    sink.flush()?;
    Ok(report(&ds.errors, &ds.warnings))
}

fn real_main() -> Result<bool, Box<dyn std::error::Error>> {
    let cli = Cli::parse();
    let file = load_file_map(&cli.config)?;
    match cli.cmd {
        Command::Bounds(args) => {
            let cfg = config::resolve(&args.opts, &file, &Defaults::default())?;
            let ds = run::run_bounds(&cfg);
            Ok(emit_rates(&cfg, &ds)?)
        }
        Command::Figure(args) => {
            let spec = run::figure_spec(args.fig)?;
            let defaults = Defaults {
                samples: 1_000_000,
                snr_db: spec.snr_db.clone(),
                coherence: spec.coherence.clone(),
                blocks: vec![1], // placeholder; figure L grids come from the figure rule
                ..Defaults::default()
            };
            let blocks_overridden = args.opts.blocks.is_some() || file.contains_key("blocks");
            let cfg = config::resolve(&args.opts, &file, &defaults)?;
            let blocks = blocks_overridden.then(|| cfg.blocks.clone());
            let ds = run::run_figure(args.fig, &cfg, blocks.as_deref())?;
            Ok(emit_rates(&cfg, &ds)?)
        }
        Command::Aloha(args) => {
            let defaults = Defaults { coherence: vec![5, 20], ..Defaults::default() };
            let cfg = config::resolve(&args.opts, &file, &defaults)?;
            let ds = run::run_aloha(&cfg, args.frame, args.payload_bits, args.devices);
            let mut sink = open_sink(&cfg)?;
            output::write_aloha_rows(&mut sink, cfg.format, &ds.comments, &ds.rows)?;
            sink.flush()?;
            Ok(report(&ds.errors, &[]))
        }
        Command::Selftest => Ok(selftest::run()),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
