//! The `HHDM` binary model format.
//!
//! All integers are little-endian. Layout, in order:
//!
//! | field          | encoding                                                   |
//! |----------------|------------------------------------------------------------|
//! | magic          | `b"HHDM"`                                                  |
//! | version        | `u16`, currently 1                                         |
//! | flags          | `u16`; bit 0 set when the flip order is stored as `u16`    |
//! | n, d           | `u32` each                                                 |
//! | variant tag    | `u8` (naive 0, rewrite1 1, rewrite2 2, rewrite3 3, hypercam 4) |
//! | backend tag    | `u8` (bloom 0, count-sketch 1)                             |
//! | seed           | `u64`                                                      |
//! | width, height  | `u32` each                                                 |
//! | C              | `u16` class count                                          |
//! | class names    | C times: `u16` byte length, UTF-8 bytes                    |
//! | sparse indices | d × `u32`                                                  |
//! | signs          | d × `i8`; all zero for a Bloom model                       |
//! | flip order     | n × `u16` (flag bit 0) or n × `u32`                        |
//! | prototypes     | C × ceil(n/8) bytes, bit `i` in byte `i/8` at bit `i%8`    |
//! | checksum       | `u32` CRC-32 (IEEE) of every preceding byte                |
//!
//! The flip order, indices, and signs are fully determined by the seed;
//! loading regenerates them and refuses a file whose stored copies differ.

use std::path::Path;

use crate::encoder::{EncoderConfig, EncoderVariant, ImageEncoder};
use crate::error::{Error, Result};
use crate::hv::BinaryHypervector;
use crate::image::GrayImage;
use crate::model::{ItemMemory, Prediction};
use crate::sparse::Backend;

pub const MAGIC: [u8; 4] = *b"HHDM";
pub const FORMAT_VERSION: u16 = 1;
const FLAG_FLIP_U16: u16 = 1;

/// An encoder together with the item memory trained on its encodings.
#[derive(Debug, Clone)]
pub struct ModelArtifact {
    encoder: ImageEncoder,
    memory: ItemMemory,
}

impl ModelArtifact {
    pub fn new(encoder: ImageEncoder, memory: ItemMemory) -> Result<Self> {
        if encoder.dim() != memory.dim() {
            return Err(Error::DimensionMismatch {
                expected: encoder.dim(),
                actual: memory.dim(),
            });
        }
        if memory.num_classes() > usize::from(u16::MAX) {
            return Err(Error::InvalidArgument(format!(
                "{} classes do not fit the model format",
                memory.num_classes()
            )));
        }
        Ok(Self { encoder, memory })
    }

    pub fn encoder(&self) -> &ImageEncoder {
        &self.encoder
    }

    pub fn memory(&self) -> &ItemMemory {
        &self.memory
    }

    pub fn config(&self) -> &EncoderConfig {
        self.encoder.config()
    }

    pub fn predict(&self, img: &GrayImage) -> Result<Prediction> {
        self.memory.predict(&self.encoder.encode(img)?)
    }

    /// Whether the flip order is written with 16-bit entries.
    pub fn flip_order_is_u16(&self) -> bool {
        self.encoder.dim() <= usize::from(u16::MAX)
    }

    /// Signs as stored: the basis signs for count-sketch, zeros for Bloom.
    pub fn stored_signs(&self) -> Vec<i8> {
        let basis = self.encoder.sparse_basis();
        match basis.backend() {
            Backend::CountSketch => basis.signs().to_vec(),
            Backend::Bloom => vec![0; basis.density()],
        }
    }

    /// The prototype section: every prototype's bytes, concatenated.
    pub fn prototype_bytes(&self) -> Vec<u8> {
        self.memory
            .prototypes()
            .iter()
            .flat_map(BinaryHypervector::to_bytes)
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let cfg = self.encoder.config();
        let basis = self.encoder.sparse_basis();
        let u16_flip = self.flip_order_is_u16();
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(if u16_flip { FLAG_FLIP_U16 } else { 0 }).to_le_bytes());
        out.extend_from_slice(&(cfg.dim as u32).to_le_bytes());
        out.extend_from_slice(&(cfg.density as u32).to_le_bytes());
        out.push(cfg.variant.tag());
        out.push(backend_tag(cfg.backend));
        out.extend_from_slice(&cfg.seed.to_le_bytes());
        out.extend_from_slice(&(self.encoder.width() as u32).to_le_bytes());
        out.extend_from_slice(&(self.encoder.height() as u32).to_le_bytes());
        out.extend_from_slice(&(self.memory.num_classes() as u16).to_le_bytes());
        for name in self.memory.classes() {
            let bytes = name.as_bytes();
            let len = bytes.len().min(usize::from(u16::MAX));
            out.extend_from_slice(&(len as u16).to_le_bytes());
            out.extend_from_slice(&bytes[..len]);
        }
        for &i in basis.indices() {
            out.extend_from_slice(&i.to_le_bytes());
        }
        out.extend(self.stored_signs().iter().map(|&s| s as u8));
        for &f in self.encoder.value_codebook().flip_order() {
            if u16_flip {
                out.extend_from_slice(&(f as u16).to_le_bytes());
            } else {
                out.extend_from_slice(&f.to_le_bytes());
            }
        }
        out.extend(self.prototype_bytes());
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(4)?;
        if magic != MAGIC {
            return Err(Error::ModelFormat(format!("bad magic {magic:02x?}, expected \"HHDM\"")));
        }
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format version {version} (this build reads {FORMAT_VERSION})"
            )));
        }
        if bytes.len() < r.pos + 4 {
            return Err(truncated());
        }
        let (payload, stored) = bytes.split_at(bytes.len() - 4);
        let mut r = Reader {
            bytes: payload,
            pos: r.pos,
        };

        let flags = r.u16()?;
        if flags & !FLAG_FLIP_U16 != 0 {
            return Err(Error::ModelFormat(format!("unknown flags {flags:#06x}")));
        }
        let dim = r.u32()? as usize;
        let density = r.u32()? as usize;
        let variant_tag = r.u8()?;
        let variant = EncoderVariant::from_tag(variant_tag)
            .ok_or_else(|| Error::ModelFormat(format!("unknown encoder tag {variant_tag}")))?;
        let backend = backend_from_tag(r.u8()?)?;
        let seed = r.u64()?;
        let width = r.u32()? as usize;
        let height = r.u32()? as usize;
        let classes = usize::from(r.u16()?);
        let mut names = Vec::with_capacity(classes);
        for _ in 0..classes {
            let len = usize::from(r.u16()?);
            let name =
                std::str::from_utf8(r.take(len)?).map_err(|_| Error::ModelFormat("class name is not UTF-8".into()))?;
            names.push(name.to_owned());
        }
        let indices = (0..density).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let signs: Vec<i8> = r.take(density)?.iter().map(|&b| b as i8).collect();
        let flip_order = (0..dim)
            .map(|_| {
                if flags & FLAG_FLIP_U16 != 0 {
                    r.u16().map(u32::from)
                } else {
                    r.u32()
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let proto_len = dim.div_ceil(8);
        let prototypes = (0..classes)
            .map(|_| BinaryHypervector::from_bytes(dim, r.take(proto_len)?))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        if r.pos != payload.len() {
            return Err(Error::ModelFormat(format!(
                "{} unexpected bytes before the checksum",
                payload.len() - r.pos
            )));
        }
        let stored = u32::from_le_bytes(stored.try_into().expect("4 bytes"));
        let computed = crc32fast::hash(payload);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }

        let config = EncoderConfig {
            variant,
            backend,
            dim,
            density,
            seed,
        };
        let encoder = ImageEncoder::new(config, width, height).map_err(|e| Error::ModelFormat(e.to_string()))?;
        let regenerated = encoder.value_codebook();
        if regenerated.flip_order() != flip_order.as_slice() {
            return Err(Error::SeedMismatch {
                what: "flip order",
                seed,
            });
        }
        let basis = encoder.sparse_basis();
        if basis.indices() != indices.as_slice() {
            return Err(Error::SeedMismatch {
                what: "sparse indices",
                seed,
            });
        }
        let expected_signs: Vec<i8> = match backend {
            Backend::CountSketch => basis.signs().to_vec(),
            Backend::Bloom => vec![0; density],
        };
        if signs != expected_signs {
            return Err(Error::SeedMismatch {
                what: "count-sketch signs",
                seed,
            });
        }
        let memory = ItemMemory::from_prototypes(names, prototypes).map_err(|e| Error::ModelFormat(e.to_string()))?;
        Self::new(encoder, memory)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::model_io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::model_io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

fn backend_tag(backend: Backend) -> u8 {
    match backend {
        Backend::Bloom => 0,
        Backend::CountSketch => 1,
    }
}

fn backend_from_tag(tag: u8) -> Result<Backend> {
    match tag {
        0 => Ok(Backend::Bloom),
        1 => Ok(Backend::CountSketch),
        t => Err(Error::ModelFormat(format!("unknown backend tag {t}"))),
    }
}

fn truncated() -> Error {
    Error::ModelFormat("truncated model file".into())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let slice = self.bytes.get(self.pos..self.pos + len).ok_or_else(truncated)?;
        self.pos += len;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
