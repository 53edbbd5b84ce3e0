use crate::error::{Error, Result};

/// 8-bit grayscale image, row-major: pixel `(i, j)` is at `i * width + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimension(format!(
                "image must be non-empty, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    /// Pixel count per value.
    pub fn histogram(&self) -> [u32; 256] {
        let mut h = [0u32; 256];
        for &p in &self.pixels {
            h[usize::from(p)] += 1;
        }
        h
    }

    /// Pixel indices grouped by value: `(offsets, indices)` where the
    /// pixels of value `v` are `indices[offsets[v]..offsets[v + 1]]`, in
    /// increasing index order.
    pub fn value_bins(&self) -> ([usize; 257], Vec<u32>) {
        let hist = self.histogram();
        let mut offsets = [0usize; 257];
        for v in 0..256 {
            offsets[v + 1] = offsets[v] + hist[v] as usize;
        }
        let mut cursor = offsets;
        let mut indices = vec![0u32; self.pixels.len()];
        for (k, &p) in self.pixels.iter().enumerate() {
            let slot = &mut cursor[usize::from(p)];
            indices[*slot] = k as u32;
            *slot += 1;
        }
        (offsets, indices)
    }
}
