//! Run configuration: command-line flags merged over an optional flat
//! `key = value` file.
//!
//! Keys are the long flag names without the leading dashes (`encoder`,
//! `lr`, `train-limit`, ...). Blank lines and lines starting with `#` are
//! ignored. A flag given on the command line takes precedence over the
//! same key in the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hyperhd::{Backend, Binarization, EncoderConfig, EncoderVariant, TrainConfig, UpdateWeighting};

use crate::error::CliError;

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "dataset",
    "model",
    "image",
    "output",
    "encoder",
    "backend",
    "dim",
    "density",
    "seed",
    "split-seed",
    "train-limit",
    "test-limit",
    "trainer",
    "epochs",
    "lr",
    "weighting",
    "binarize",
    "patience",
    "runs",
    "format",
];

/// Values read from a config file.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", number + 1))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(format!("line {}: unknown key `{key}`", number + 1));
            }
            values.insert(key.to_owned(), value.trim().to_owned());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Resolves one setting: the flag if given, else the config file value,
/// else `None`.
pub fn pick<T>(file: &ConfigFile, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|raw| {
            raw.parse()
                .map_err(|e| CliError::Usage(format!("config key `{key}`: invalid value `{raw}`: {e}")))
        })
        .transpose()
}

/// Output format of every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// How `train` builds the class prototypes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Trainer {
    /// One-shot bundling followed by iterative OnlineHD refinement.
    #[default]
    Onlinehd,
    /// One-shot bundling of each class's encodings only.
    Bundle,
}

impl FromStr for Trainer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "onlinehd" => Ok(Trainer::Onlinehd),
            "bundle" => Ok(Trainer::Bundle),
            other => Err(format!("unknown trainer `{other}`")),
        }
    }
}

/// Flags shared by every command; all optional so that a config file can
/// supply them.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct RunArgs {
    /// Dataset directory: MNIST-style IDX files or one PGM subdirectory per class.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Model file to write (train) or read (other commands).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Binary PGM image.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Output file (export).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Encoder: naive, rewrite1, rewrite2, rewrite3 or hypercam [default: hypercam].
    #[arg(long)]
    pub encoder: Option<EncoderVariant>,
    /// Sparse bundling backend: bloom or count-sketch [default: count-sketch].
    #[arg(long)]
    pub backend: Option<Backend>,
    /// Hypervector dimension n [default: 10000].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Positions per sparse-bundled element d [default: 20].
    #[arg(long)]
    pub density: Option<usize>,
    /// Seed for codebooks, sparse bases and training order [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed of the 8:2 split for datasets without their own split [default: --seed].
    #[arg(long)]
    pub split_seed: Option<u64>,
    /// Use at most this many training examples.
    #[arg(long)]
    pub train_limit: Option<usize>,
    /// Use at most this many test examples.
    #[arg(long)]
    pub test_limit: Option<usize>,
    /// Prototype trainer [default: onlinehd].
    #[arg(long, value_enum)]
    pub trainer: Option<Trainer>,
    /// OnlineHD epochs [default: 20].
    #[arg(long)]
    pub epochs: Option<usize>,
    /// OnlineHD learning rate [default: 1.0].
    #[arg(long)]
    pub lr: Option<f64>,
    /// OnlineHD update weighting: flat or similarity [default: flat].
    #[arg(long)]
    pub weighting: Option<UpdateWeighting>,
    /// When binary prototypes are refreshed: per-update or per-epoch [default: per-update].
    #[arg(long)]
    pub binarize: Option<Binarization>,
    /// Stop after this many epochs without a gain in training accuracy.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Profiling repetitions [default: 10].
    #[arg(long)]
    pub runs: Option<usize>,
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub image: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub encoder: EncoderConfig,
    pub split_seed: u64,
    pub train_limit: Option<usize>,
    pub test_limit: Option<usize>,
    pub trainer: Trainer,
    pub train: TrainConfig,
    pub runs: usize,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(args: RunArgs, format: Option<Format>, file: &ConfigFile) -> Result<Self, CliError> {
        let defaults = EncoderConfig::default();
        let train_defaults = TrainConfig::default();
        let seed = pick(file, "seed", args.seed)?.unwrap_or(defaults.seed);
        let encoder = EncoderConfig {
            variant: pick(file, "encoder", args.encoder)?.unwrap_or(defaults.variant),
            backend: pick(file, "backend", args.backend)?.unwrap_or(defaults.backend),
            dim: pick(file, "dim", args.dim)?.unwrap_or(defaults.dim),
            density: pick(file, "density", args.density)?.unwrap_or(defaults.density),
            seed,
        };
        let train = TrainConfig {
            epochs: pick(file, "epochs", args.epochs)?.unwrap_or(train_defaults.epochs),
            learning_rate: pick(file, "lr", args.lr)?.unwrap_or(train_defaults.learning_rate),
            shuffle_seed: seed,
            early_stop_patience: pick(file, "patience", args.patience)?,
            weighting: pick(file, "weighting", args.weighting)?.unwrap_or(train_defaults.weighting),
            binarization: pick(file, "binarize", args.binarize)?.unwrap_or(train_defaults.binarization),
        };
        train.validate()?;
        let runs = pick(file, "runs", args.runs)?.unwrap_or(10);
        if runs == 0 {
            return Err(CliError::Usage("--runs must be at least 1".into()));
        }
        Ok(Self {
            dataset: pick(file, "dataset", args.dataset)?,
            model: pick(file, "model", args.model)?,
            image: pick(file, "image", args.image)?,
            output: pick(file, "output", args.output)?,
            encoder,
            split_seed: pick(file, "split-seed", args.split_seed)?.unwrap_or(seed),
            train_limit: pick(file, "train-limit", args.train_limit)?,
            test_limit: pick(file, "test-limit", args.test_limit)?,
            trainer: pick(file, "trainer", args.trainer)?.unwrap_or_default(),
            train,
            runs,
            format: pick(file, "format", format)?.unwrap_or_default(),
        })
    }

    pub fn require<'a>(&self, value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
        value
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("--{flag} is required (flag or config key `{flag}`)")))
    }
}
