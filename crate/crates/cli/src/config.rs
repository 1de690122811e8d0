//! Run configuration: command-line flags merged over an optional
//! `key=value` config file (flags win).

use blockfade_core::{BoundKind, Error, McConfig, QuasistaticVariance, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Nats,
    Bits,
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub snr_db: Vec<f64>,
    pub coherence: Vec<u32>,
    pub blocks: Vec<u32>,
    pub epsilon: f64,
    pub samples: u64,
    pub seed: u64,
    pub workers: u32,
    pub confidence: f64,
    pub bounds: Vec<BoundKind>,
    pub units: Units,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub qs_variance: QuasistaticVariance,
}

impl RunConfig {
    pub fn mc_config(&self) -> McConfig {
        McConfig {
            n_samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            confidence: self.confidence,
            quasistatic_variance: self.qs_variance,
            ..McConfig::default()
        }
    }
}

/// Raw option values before defaulting; every field optional so the
/// config file can supply what the flags leave out.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct RawOptions {
    /// SNR grid in dB, comma separated
    #[arg(long = "snr-db", value_delimiter = ',', num_args = 1..)]
    pub snr_db: Option<Vec<f64>>,
    /// Coherence interval(s) T, comma separated
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub coherence: Option<Vec<u32>>,
    /// Number of coherence blocks L, comma separated
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub blocks: Option<Vec<u32>>,
    /// Target block-error probability
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Monte Carlo sample count
    #[arg(long)]
    pub samples: Option<u64>,
    /// RNG seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (never changes results, only wall time)
    #[arg(long)]
    pub workers: Option<u32>,
    /// Confidence level for Monte Carlo intervals
    #[arg(long)]
    pub confidence: Option<f64>,
    /// Bound kinds to evaluate, comma separated
    #[arg(long = "bound", value_delimiter = ',', num_args = 1..)]
    pub bound: Option<Vec<String>>,
    /// Rate units in the output: nats | bits
    #[arg(long)]
    pub units: Option<String>,
    /// Output format: csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Quasistatic variance form: as-written | alternative
    #[arg(long = "qs-variance")]
    pub qs_variance: Option<String>,
}

fn parse_list<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| Error::Domain {
            op: "config",
            msg: format!("cannot parse '{s}' in {key}"),
        }))
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim().parse::<T>().map_err(|_| Error::Domain {
        op: "config",
        msg: format!("cannot parse '{raw}' for {key}"),
    })
}

/// Reads a `key = value` file; `#` starts a comment. Keys use the flag
/// spelling without the leading dashes.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Domain {
        op: "config",
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Domain {
                op: "config",
                msg: format!("{}:{}: expected key=value", path.display(), lineno + 1),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_units(raw: &str) -> Result<Units> {
    match raw {
        "nats" => Ok(Units::Nats),
        "bits" => Ok(Units::Bits),
        other => Err(Error::Domain { op: "config", msg: format!("unknown units '{other}'") }),
    }
}

fn parse_format(raw: &str) -> Result<OutputFormat> {
    match raw {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(Error::Domain { op: "config", msg: format!("unknown format '{other}'") }),
    }
}

fn parse_qs_variance(raw: &str) -> Result<QuasistaticVariance> {
    match raw {
        "as-written" => Ok(QuasistaticVariance::AsWritten),
        "alternative" => Ok(QuasistaticVariance::Alternative),
        other => Err(Error::Domain { op: "config", msg: format!("unknown qs-variance '{other}'") }),
    }
}

/// Built-in defaults, varied per subcommand.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub samples: u64,
    pub bounds: Vec<BoundKind>,
    pub snr_db: Vec<f64>,
    pub coherence: Vec<u32>,
    pub blocks: Vec<u32>,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            samples: 100_000,
            bounds: BoundKind::ALL.to_vec(),
            snr_db: vec![15.0, 25.0],
            coherence: vec![20],
            blocks: vec![5, 10, 20, 40],
        }
    }
}

/// Merges flags over the file map over built-in defaults.
pub fn resolve(raw: &RawOptions, file: &BTreeMap<String, String>, defaults: &Defaults) -> Result<RunConfig> {
    macro_rules! list {
        ($flag:expr, $key:literal, $default:expr) => {
            match (&$flag, file.get($key)) {
                (Some(v), _) => v.clone(),
                (None, Some(raw)) => parse_list($key, raw)?,
                (None, None) => $default,
            }
        };
    }
    macro_rules! scalar {
        ($flag:expr, $key:literal, $default:expr) => {
            match (&$flag, file.get($key)) {
                (Some(v), _) => *v,
                (None, Some(raw)) => parse_scalar($key, raw)?,
                (None, None) => $default,
            }
        };
    }
    let snr_db: Vec<f64> = list!(raw.snr_db, "snr-db", defaults.snr_db.clone());
    let coherence: Vec<u32> = list!(raw.coherence, "coherence", defaults.coherence.clone());
    let blocks: Vec<u32> = list!(raw.blocks, "blocks", defaults.blocks.clone());
    let bound_names: Vec<String> = match (&raw.bound, file.get("bound")) {
        (Some(v), _) => v.clone(),
        (None, Some(raw)) => parse_list("bound", raw)?,
        (None, None) => defaults.bounds.iter().map(|k| k.as_str().to_string()).collect(),
    };
    let bounds = bound_names
        .iter()
        .map(|s| BoundKind::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let units_raw = match (&raw.units, file.get("units")) {
        (Some(v), _) => v.clone(),
        (None, Some(raw)) => raw.clone(),
        (None, None) => "nats".to_string(),
    };
    let format_raw = match (&raw.format, file.get("format")) {
        (Some(v), _) => v.clone(),
        (None, Some(raw)) => raw.clone(),
        (None, None) => "csv".to_string(),
    };
    let qs_raw = match (&raw.qs_variance, file.get("qs-variance")) {
        (Some(v), _) => v.clone(),
        (None, Some(raw)) => raw.clone(),
        (None, None) => "as-written".to_string(),
    };
    let out = match (&raw.out, file.get("out")) {
        (Some(v), _) => Some(v.clone()),
        (None, Some(raw)) => Some(PathBuf::from(raw)),
        (None, None) => None,
    };
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get() as u32);

    let cfg = RunConfig {
        snr_db,
        coherence,
        blocks,
        epsilon: scalar!(raw.epsilon, "epsilon", 1e-3),
        samples: scalar!(raw.samples, "samples", defaults.samples),
        seed: scalar!(raw.seed, "seed", 0),
        workers: scalar!(raw.workers, "workers", default_workers),
        confidence: scalar!(raw.confidence, "confidence", 0.95),
        bounds,
        units: parse_units(&units_raw)?,
        format: parse_format(&format_raw)?,
        out,
        qs_variance: parse_qs_variance(&qs_raw)?,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let usage = |msg: String| Error::Domain { op: "config", msg };
    if cfg.snr_db.is_empty() {
        return Err(usage("snr-db list is empty".into()));
    }
    if cfg.coherence.is_empty() {
        return Err(usage("coherence list is empty".into()));
    }
    if cfg.blocks.is_empty() {
        return Err(usage("blocks list is empty".into()));
    }
    if cfg.bounds.is_empty() {
        return Err(usage("bound list is empty".into()));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 0.5) {
        return Err(usage(format!("epsilon = {} must lie in (0, 1/2)", cfg.epsilon)));
    }
    if cfg.workers == 0 {
        return Err(usage("workers must be >= 1".into()));
    }
    Ok(())
}
