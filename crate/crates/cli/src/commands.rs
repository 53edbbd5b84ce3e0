use std::io::Write;
use std::time::Instant;

use hyperhd::io::{export_c_header, read_pgm, FlashEstimate};
use hyperhd::{
    evaluate, profile as profile_image, train_bundle, train_onlinehd, EpochStats, GrayImage, ImageEncoder, ItemMemory,
    ModelArtifact, Splits,
};
use serde::Serialize;

use crate::config::{Format, RunConfig, Trainer};
use crate::error::CliError;

fn emit<T: Serialize + std::fmt::Display>(cfg: &RunConfig, value: &T) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match cfg.format {
        Format::Text => writeln!(out, "{value}")?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn open_splits(cfg: &RunConfig) -> Result<Splits, CliError> {
    let dir = cfg.require(&cfg.dataset, "dataset")?;
    Ok(Splits::open(dir, cfg.split_seed)?.limit(cfg.train_limit, cfg.test_limit)?)
}

#[derive(Debug, Serialize)]
struct TrainSummary {
    model: String,
    encoder: String,
    trainer: &'static str,
    train_examples: usize,
    test_examples: usize,
    canonical_split: bool,
    epochs: Vec<EpochStats>,
    test_accuracy: Option<f64>,
    encode_ms: f64,
    train_ms: f64,
}

impl std::fmt::Display for TrainSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "encoder    {} ({} training examples, {} split)",
            self.encoder,
            self.train_examples,
            if self.canonical_split {
                "canonical"
            } else {
                "seeded 8:2"
            }
        )?;
        for e in &self.epochs {
            writeln!(
                f,
                "epoch {:>3}  updates {:>7}  train accuracy {:.2}%",
                e.epoch,
                e.updates,
                100.0 * e.train_accuracy
            )?;
        }
        writeln!(
            f,
            "time       encode {:.0} ms, train {:.0} ms",
            self.encode_ms, self.train_ms
        )?;
        if let Some(acc) = self.test_accuracy {
            writeln!(f, "test       {:.2}% on {} examples", 100.0 * acc, self.test_examples)?;
        }
        write!(f, "wrote      {}", self.model)
    }
}

pub fn train(cfg: &RunConfig) -> Result<(), CliError> {
    let model_path = cfg.require(&cfg.model, "model")?;
    let splits = open_splits(cfg)?;
    let train = &splits.train;
    let encoder = ImageEncoder::new(cfg.encoder, train.width(), train.height())?;
    let started = Instant::now();
    let encoded = encoder.encode_batch(train.images())?;
    let encode_ms = started.elapsed().as_secs_f64() * 1e3;
    let started = Instant::now();
    let classes = train.class_names().to_vec();
    let (memory, epochs) = match cfg.trainer {
        Trainer::Bundle => (train_bundle(&encoded, train.labels(), classes)?, Vec::new()),
        Trainer::Onlinehd => train_onlinehd(&encoded, train.labels(), classes, &cfg.train)?,
    };
    let train_ms = started.elapsed().as_secs_f64() * 1e3;
    let test_accuracy = if splits.test.is_empty() {
        None
    } else {
        Some(memory.accuracy(&encoder.encode_batch(splits.test.images())?, splits.test.labels())?)
    };
    let model = ModelArtifact::new(encoder, memory)?;
    model.save(model_path)?;
    emit(
        cfg,
        &TrainSummary {
            model: model_path.display().to_string(),
            encoder: cfg.encoder.label(),
            trainer: match cfg.trainer {
                Trainer::Bundle => "bundle",
                Trainer::Onlinehd => "onlinehd",
            },
            train_examples: train.len(),
            test_examples: splits.test.len(),
            canonical_split: splits.canonical,
            epochs,
            test_accuracy,
            encode_ms,
            train_ms,
        },
    )
}

pub fn eval(cfg: &RunConfig) -> Result<(), CliError> {
    let model = ModelArtifact::load(cfg.require(&cfg.model, "model")?)?;
    let splits = open_splits(cfg)?;
    emit(cfg, &evaluate(&model, &splits.test)?)
}

#[derive(Debug, Serialize)]
struct PredictOutput {
    label: usize,
    class: String,
    distances: Vec<f64>,
}

impl std::fmt::Display for PredictOutput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "label {} (class {})", self.label, self.class)?;
        for (c, d) in self.distances.iter().enumerate() {
            write!(f, "\n  {c:>3} {d:.4}")?;
        }
        Ok(())
    }
}

pub fn predict(cfg: &RunConfig) -> Result<(), CliError> {
    let model = ModelArtifact::load(cfg.require(&cfg.model, "model")?)?;
    let img = read_pgm(cfg.require(&cfg.image, "image")?)?;
    let p = model.predict(&img)?;
    emit(
        cfg,
        &PredictOutput {
            class: model.memory().classes()[p.label].clone(),
            label: p.label,
            distances: p.distances,
        },
    )
}

fn profile_input(cfg: &RunConfig) -> Result<GrayImage, CliError> {
    if let Some(path) = &cfg.image {
        return Ok(read_pgm(path)?);
    }
    if cfg.dataset.is_some() {
        let splits = open_splits(cfg)?;
        return splits
            .test
            .images()
            .first()
            .cloned()
            .ok_or_else(|| CliError::Usage("the dataset has no test images".into()));
    }
    Err(CliError::Usage("profile needs --image or --dataset".into()))
}

pub fn profile(cfg: &RunConfig) -> Result<(), CliError> {
    let img = profile_input(cfg)?;
    let model = cfg.model.as_deref().map(ModelArtifact::load).transpose()?;
    let built;
    let (encoder, memory): (&ImageEncoder, Option<&ItemMemory>) = match &model {
        Some(m) => (m.encoder(), Some(m.memory())),
        None => {
            built = ImageEncoder::new(cfg.encoder, img.width(), img.height())?;
            (&built, None)
        }
    };
    emit(cfg, &profile_image(encoder, memory, &img, cfg.runs)?)
}

#[derive(Debug, Serialize)]
struct ExportOutput {
    output: String,
    flash: FlashEstimate,
    total_bytes: usize,
}

impl std::fmt::Display for ExportOutput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "wrote {}", self.output)?;
        write!(f, "{}", self.flash)
    }
}

pub fn export(cfg: &RunConfig) -> Result<(), CliError> {
    let model = ModelArtifact::load(cfg.require(&cfg.model, "model")?)?;
    let output = cfg.require(&cfg.output, "output")?;
    export_c_header(&model, output)?;
    let flash = FlashEstimate::of(&model);
    emit(
        cfg,
        &ExportOutput {
            output: output.display().to_string(),
            total_bytes: flash.total(),
            flash,
        },
    )
}
