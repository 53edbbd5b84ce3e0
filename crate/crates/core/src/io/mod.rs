//! Dataset readers, the binary model format, and C header export.

mod artifact;
mod dataset;
mod header;
mod idx;
mod pgm;

pub use artifact::{ModelArtifact, FORMAT_VERSION, MAGIC};
pub use dataset::{split_indices, Dataset, Splits};
pub use header::{export_c_header, render_c_header, FlashEstimate};
pub use idx::{load_idx, parse_idx_images, parse_idx_labels, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use pgm::{load_pgm_dir, parse_pgm, read_pgm, write_pgm};
