//! Encoders that bundle full-width pixel hypervectors.

use crate::accumulator::MajorityCounter;
use crate::codebook::PositionCodebook;
use crate::error::Result;
use crate::hv::{words_for, BinaryHypervector};
use crate::image::GrayImage;

use super::{EncodeProbe, ImageEncoder};

/// `majority_{i,j} R(i) ^ C(j) ^ V(img[i*w + j])`, two binds per pixel.
pub(super) fn encode_row_column(
    enc: &ImageEncoder,
    rows: &PositionCodebook,
    columns: &PositionCodebook,
    img: &GrayImage,
    probe: &mut EncodeProbe,
) -> Result<BinaryHypervector> {
    let n = enc.dim();
    let nw = words_for(n);
    let table = enc.values.table();
    let started = probe.start();

    let mut column_codes = vec![0u64; nw * enc.width];
    for (j, code) in column_codes.chunks_exact_mut(nw).enumerate() {
        columns.position_code_into(j, code)?;
    }
    let mut row = vec![0u64; nw];
    let mut pixel = vec![0u64; nw];
    let mut counter = MajorityCounter::new(n)?;
    for i in 0..enc.height {
        rows.position_code_into(i, &mut row)?;
        for (j, column) in column_codes.chunks_exact(nw).enumerate() {
            let value = table[usize::from(img.get(i, j))].words();
            for (((p, r), c), v) in pixel.iter_mut().zip(&row).zip(column).zip(value) {
                *p = r ^ c ^ v;
            }
            counter.add_words(&pixel, 1);
        }
    }
    let pixels = img.len() as u64;
    probe.counts.binds += 2 * pixels;
    probe.counts.bundles += pixels;
    probe.phases.bind_sum += probe.lap(started);

    let started = probe.start();
    let out = counter.majority();
    probe.phases.majority += probe.lap(started);
    Ok(out)
}

/// `majority_k X(k) ^ V(img[k])`, one bind per pixel.
pub(super) fn encode_coalesced(
    enc: &ImageEncoder,
    positions: &PositionCodebook,
    img: &GrayImage,
    probe: &mut EncodeProbe,
) -> Result<BinaryHypervector> {
    let n = enc.dim();
    let table = enc.values.table();
    let started = probe.start();

    let mut pixel = vec![0u64; words_for(n)];
    let mut counter = MajorityCounter::new(n)?;
    for (k, &v) in img.pixels().iter().enumerate() {
        positions.position_code_into(k, &mut pixel)?;
        for (p, v) in pixel.iter_mut().zip(table[usize::from(v)].words()) {
            *p ^= v;
        }
        counter.add_words(&pixel, 1);
    }
    let pixels = img.len() as u64;
    probe.counts.binds += pixels;
    probe.counts.bundles += pixels;
    probe.phases.bind_sum += probe.lap(started);

    let started = probe.start();
    let out = counter.majority();
    probe.phases.majority += probe.lap(started);
    Ok(out)
}

/// Value factoring: for each value `z` present, bundle the position codes
/// of `Pix(z)` (strict majority over `|Pix(z)|`), bind with `V(z)`, and add
/// to the outer sum with weight `|Pix(z)|`; threshold at half of `w*h`.
///
/// Binds are counted as `|Pix(z)|` per value: the weighted outer bundle
/// stands for `|Pix(z)|` copies of the bound vector.
pub(super) fn encode_factored(
    enc: &ImageEncoder,
    positions: &PositionCodebook,
    img: &GrayImage,
    probe: &mut EncodeProbe,
) -> Result<BinaryHypervector> {
    let n = enc.dim();
    let table = enc.values.table();
    let started = probe.start();

    let (offsets, indices) = img.value_bins();
    let mut code = vec![0u64; words_for(n)];
    let mut inner = MajorityCounter::new(n)?;
    let mut outer = MajorityCounter::new(n)?;
    for z in 0..256 {
        let bin = &indices[offsets[z]..offsets[z + 1]];
        if bin.is_empty() {
            continue;
        }
        inner.clear();
        for &k in bin {
            positions.position_code_into(k as usize, &mut code)?;
            inner.add_words(&code, 1);
        }
        let mut bound = inner.majority();
        bound.xor_assign(&table[z])?;
        outer.add_words(bound.words(), bin.len() as u32);

        probe.counts.bundles += bin.len() as u64 + 1;
        probe.counts.binds += bin.len() as u64;
    }
    probe.phases.bind_sum += probe.lap(started);

    let started = probe.start();
    let out = outer.majority();
    probe.phases.majority += probe.lap(started);
    Ok(out)
}
