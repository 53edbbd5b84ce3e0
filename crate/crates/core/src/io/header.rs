//! C header export for microcontroller firmware.
//!
//! The header defines `HYPERHD_N`, `HYPERHD_D`, `HYPERHD_NUM_CLASSES`,
//! `HYPERHD_WIDTH`, `HYPERHD_HEIGHT`, `HYPERHD_STEP`, `HYPERHD_PROTO_BYTES`
//! and `HYPERHD_COUNT_SKETCH`, and the arrays `hyperhd_prototypes`,
//! `hyperhd_sparse_indices`, `hyperhd_cs_signs`, `hyperhd_flip_order` and
//! `hyperhd_class_names`. Array contents are the corresponding sections
//! of the model file, value for value.

use std::fmt::{self, Write as _};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sparse::Backend;

use super::artifact::ModelArtifact;

/// Bytes of model data a firmware image has to carry, excluding code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlashEstimate {
    pub prototypes: usize,
    pub sparse_indices: usize,
    pub cs_signs: usize,
    pub flip_order: usize,
    /// Six scalar parameters (n, d, C, width, height, step), counted as `u32` each.
    pub constants: usize,
}

impl FlashEstimate {
    pub fn of(model: &ModelArtifact) -> Self {
        let cfg = model.config();
        let flip_width = if model.flip_order_is_u16() { 2 } else { 4 };
        Self {
            prototypes: model.memory().num_classes() * cfg.dim.div_ceil(8),
            sparse_indices: 4 * cfg.density,
            cs_signs: cfg.density,
            flip_order: flip_width * cfg.dim,
            constants: 6 * 4,
        }
    }

    pub fn total(&self) -> usize {
        self.prototypes + self.sparse_indices + self.cs_signs + self.flip_order + self.constants
    }
}

impl fmt::Display for FlashEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kb = |b: usize| b as f64 / 1024.0;
        writeln!(f, "flash estimate (model data only, no code):")?;
        writeln!(f, "  prototypes      {:>8} B", self.prototypes)?;
        writeln!(f, "  sparse indices  {:>8} B", self.sparse_indices)?;
        writeln!(f, "  signs           {:>8} B", self.cs_signs)?;
        writeln!(f, "  flip order      {:>8} B", self.flip_order)?;
        writeln!(f, "  constants       {:>8} B", self.constants)?;
        write!(
            f,
            "  total           {:>8} B ({:.2} KB)",
            self.total(),
            kb(self.total())
        )
    }
}

fn c_string(s: &str) -> String {
    let mut out = String::from("\"");
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || b" _-.".contains(&b) {
            out.push(char::from(b));
        } else {
            let _ = write!(out, "\\{b:03o}");
        }
    }
    out.push('"');
    out
}

/// Comma-separated values wrapped at about 100 columns, each line
/// starting with `indent`.
fn wrapped<T: fmt::Display>(indent: &str, values: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    let mut line = String::new();
    for v in values {
        let item = format!("{v},");
        if !line.is_empty() && indent.len() + line.len() + item.len() > 100 {
            let _ = writeln!(out, "{indent}{}", line.trim_end());
            line.clear();
        }
        line.push_str(&item);
        line.push(' ');
    }
    if !line.is_empty() {
        let _ = writeln!(out, "{indent}{}", line.trim_end());
    }
    out
}

fn array<T: fmt::Display>(out: &mut String, decl: &str, values: impl IntoIterator<Item = T>) {
    let _ = writeln!(out, "{decl} = {{\n{}}};\n", wrapped("    ", values));
}

/// Renders the model as C source.
pub fn render_c_header(model: &ModelArtifact) -> String {
    let cfg = model.config();
    let memory = model.memory();
    let proto_bytes = cfg.dim.div_ceil(8);
    let flip_type = if model.flip_order_is_u16() {
        "uint16_t"
    } else {
        "uint32_t"
    };
    let mut out = String::new();
    let _ = writeln!(out, "/* hyperhd model: {}, seed {} */", cfg.label(), cfg.seed);
    let _ = writeln!(
        out,
        "#ifndef HYPERHD_MODEL_H\n#define HYPERHD_MODEL_H\n\n#include <stdint.h>\n"
    );
    let defines = [
        ("HYPERHD_N", cfg.dim),
        ("HYPERHD_D", cfg.density),
        ("HYPERHD_NUM_CLASSES", memory.num_classes()),
        ("HYPERHD_WIDTH", model.encoder().width()),
        ("HYPERHD_HEIGHT", model.encoder().height()),
        ("HYPERHD_STEP", model.encoder().value_codebook().step()),
        ("HYPERHD_PROTO_BYTES", proto_bytes),
        ("HYPERHD_COUNT_SKETCH", usize::from(cfg.backend == Backend::CountSketch)),
    ];
    for (name, value) in defines {
        let _ = writeln!(out, "#define {name} {value}");
    }
    let _ = writeln!(out);

    let _ = writeln!(
        out,
        "static const uint8_t hyperhd_prototypes[HYPERHD_NUM_CLASSES][HYPERHD_PROTO_BYTES] = {{"
    );
    for proto in memory.prototypes() {
        let bytes = proto.to_bytes();
        let _ = writeln!(
            out,
            "    {{\n{}    }},",
            wrapped("        ", bytes.iter().map(|b| format!("0x{b:02x}")))
        );
    }
    let _ = writeln!(out, "}};\n");
    array(
        &mut out,
        "static const uint32_t hyperhd_sparse_indices[HYPERHD_D]",
        model.encoder().sparse_basis().indices().iter(),
    );
    array(
        &mut out,
        "static const int8_t hyperhd_cs_signs[HYPERHD_D]",
        model.stored_signs(),
    );
    array(
        &mut out,
        &format!("static const {flip_type} hyperhd_flip_order[HYPERHD_N]"),
        model.encoder().value_codebook().flip_order().iter(),
    );
    array(
        &mut out,
        "static const char *const hyperhd_class_names[HYPERHD_NUM_CLASSES]",
        memory.classes().iter().map(|c| c_string(c)),
    );
    let _ = writeln!(out, "#endif /* HYPERHD_MODEL_H */");
    out
}

pub fn export_c_header(model: &ModelArtifact, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_c_header(model)).map_err(|e| Error::io(path, e))
}
