//! Accuracy and latency reports.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::encoder::{EncodeProbe, EncoderVariant, ImageEncoder, OpCounts, PhaseTimes};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::io::{Dataset, ModelArtifact};
use crate::model::ItemMemory;

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Per-phase wall time in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseMillis {
    pub binning: f64,
    /// Present only for encoders with a count-sketch finalization step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantize: Option<f64>,
    pub bind_sum: f64,
    pub majority: f64,
    pub hamming: f64,
}

impl PhaseMillis {
    fn new(phases: &PhaseTimes, hamming: Duration, runs: usize) -> Self {
        let per = |d: Duration| ms(d) / runs as f64;
        Self {
            binning: per(phases.binning),
            quantize: phases.quantize.map(per),
            bind_sum: per(phases.bind_sum),
            majority: per(phases.majority),
            hamming: per(hamming),
        }
    }

    /// Encoding phases only, without the Hamming search.
    pub fn encode_total(&self) -> f64 {
        self.binning + self.quantize.unwrap_or(0.0) + self.bind_sum + self.majority
    }

    fn rows(&self) -> Vec<(&'static str, f64)> {
        let mut rows = vec![("binning", self.binning)];
        if let Some(q) = self.quantize {
            rows.push(("quantize", q));
        }
        rows.extend([
            ("bind & sum", self.bind_sum),
            ("majority vote", self.majority),
            ("hamming", self.hamming),
        ]);
        rows
    }
}

/// Test-set evaluation of a model.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub encoder: String,
    pub dim: usize,
    pub density: usize,
    pub seed: u64,
    pub examples: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub class_names: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    /// Summed over all examples.
    pub encode_ms: f64,
    pub predict_ms: f64,
    /// Summed over all examples.
    pub phases: PhaseMillis,
    /// Summed over all examples.
    pub op_counts: OpCounts,
}

/// Encodes and classifies every image in `data`.
pub fn evaluate(model: &ModelArtifact, data: &Dataset) -> Result<EvalReport> {
    let encoder = model.encoder();
    let memory = model.memory();
    if data.num_classes() > memory.num_classes() {
        return Err(Error::InvalidArgument(format!(
            "dataset has {} classes, model has {}",
            data.num_classes(),
            memory.num_classes()
        )));
    }
    let results = data
        .images()
        .par_iter()
        .map(|img| {
            let mut probe = EncodeProbe::timed();
            let started = Instant::now();
            let hv = encoder.encode_probed(img, &mut probe)?;
            let encode = started.elapsed();
            let started = Instant::now();
            let label = memory.predict(&hv)?.label;
            Ok((label, probe, encode, started.elapsed()))
        })
        .collect::<Result<Vec<_>>>()?;

    let classes = memory.num_classes();
    let mut confusion = vec![vec![0; classes]; classes];
    let mut phases = PhaseTimes::default();
    let mut counts = OpCounts::default();
    let (mut encode, mut predict) = (Duration::ZERO, Duration::ZERO);
    for ((label, probe, e, p), &truth) in results.iter().zip(data.labels()) {
        confusion[truth][*label] += 1;
        phases.accumulate(&probe.phases);
        counts.accumulate(&probe.counts);
        encode += *e;
        predict += *p;
    }
    let correct = (0..classes).map(|c| confusion[c][c]).sum();
    let cfg = encoder.config();
    Ok(EvalReport {
        encoder: cfg.label(),
        dim: cfg.dim,
        density: cfg.density,
        seed: cfg.seed,
        examples: data.len(),
        correct,
        accuracy: correct as f64 / data.len() as f64,
        class_names: memory.classes().to_vec(),
        confusion,
        encode_ms: ms(encode),
        predict_ms: ms(predict),
        phases: PhaseMillis::new(&phases, predict, 1),
        op_counts: counts,
    })
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "encoder    {} (n={}, d={}, seed={})",
            self.encoder, self.dim, self.density, self.seed
        )?;
        writeln!(
            f,
            "accuracy   {:.2}% ({}/{})",
            100.0 * self.accuracy,
            self.correct,
            self.examples
        )?;
        writeln!(
            f,
            "time       encode {:.1} ms, predict {:.1} ms",
            self.encode_ms, self.predict_ms
        )?;
        for (name, t) in self.phases.rows() {
            writeln!(f, "  {name:<14} {t:>10.1} ms")?;
        }
        let c = self.op_counts;
        writeln!(
            f,
            "operations codebook {}, binds {}, bundles {}, sparse bundles {}",
            c.codebook_vectors, c.binds, c.bundles, c.sparse_bundles
        )?;
        writeln!(f, "confusion (rows: true class, columns: predicted)")?;
        let width = self
            .confusion
            .iter()
            .flatten()
            .map(|v| v.to_string().len())
            .chain(self.class_names.iter().map(String::len))
            .max()
            .unwrap_or(1);
        write!(f, "  {:>width$}", "")?;
        for name in &self.class_names {
            write!(f, " {name:>width$}")?;
        }
        for (name, row) in self.class_names.iter().zip(&self.confusion) {
            write!(f, "\n  {name:>width$}")?;
            for v in row {
                write!(f, " {v:>width$}")?;
            }
        }
        Ok(())
    }
}

/// Latency breakdown and operation counts for encoding one image.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub encoder: String,
    pub width: usize,
    pub height: usize,
    pub runs: usize,
    /// Mean per run.
    pub phases: PhaseMillis,
    /// Mean encode time per run.
    pub encode_ms: f64,
    /// Per single encode.
    pub op_counts: OpCounts,
    /// Bind count under the per-pixel convention, where it differs from
    /// `op_counts.binds`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_pixel_binds: Option<u64>,
}

/// Encodes `img` `runs` times and reports mean phase times. The
/// sparse-bundling encoder is timed on its reference path, whose phases
/// are separate loops; the Hamming phase is measured only when `memory`
/// is given.
pub fn profile(
    encoder: &ImageEncoder,
    memory: Option<&ItemMemory>,
    img: &GrayImage,
    runs: usize,
) -> Result<ProfileReport> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    let hypercam = encoder.config().variant == EncoderVariant::HyperCam;
    let mut phases = PhaseTimes::default();
    let mut hamming = Duration::ZERO;
    let mut counts = OpCounts::default();
    for _ in 0..runs {
        let mut probe = EncodeProbe::timed();
        let hv = if hypercam {
            encoder.encode_reference(img, &mut probe)?
        } else {
            encoder.encode_probed(img, &mut probe)?
        };
        phases.accumulate(&probe.phases);
        counts = probe.counts;
        if let Some(memory) = memory {
            let started = Instant::now();
            memory.predict(&hv)?;
            hamming += started.elapsed();
        }
    }
    let phases = PhaseMillis::new(&phases, hamming, runs);
    Ok(ProfileReport {
        encoder: encoder.config().label(),
        width: img.width(),
        height: img.height(),
        runs,
        encode_ms: phases.encode_total(),
        phases,
        op_counts: counts,
        per_pixel_binds: hypercam.then_some(img.len() as u64),
    })
}

impl fmt::Display for ProfileReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "encoder    {} on a {}x{} image, mean of {} runs",
            self.encoder, self.width, self.height, self.runs
        )?;
        for (name, t) in self.phases.rows() {
            writeln!(f, "  {name:<14} {t:>10.3} ms")?;
        }
        writeln!(f, "  {:<14} {:>10.3} ms", "encode total", self.encode_ms)?;
        let c = self.op_counts;
        write!(
            f,
            "operations codebook {}, binds {}, bundles {}, sparse bundles {}",
            c.codebook_vectors, c.binds, c.bundles, c.sparse_bundles
        )?;
        if let Some(b) = self.per_pixel_binds {
            write!(
                f,
                "\nnote       counting one bind per pixel gives {b} binds; this encoder \
                 binds once per distinct pixel value ({})",
                c.binds
            )?;
        }
        Ok(())
    }
}
