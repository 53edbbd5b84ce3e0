//! Sparse-bundling image encoder.
//!
//! `hv = majority_z |Pix(z)| * (V(z) ^ SparseBundle(Pix(z)))` with the
//! outer threshold at half of `w*h`. Values with no pixels carry zero
//! weight and are skipped entirely.

use crate::accumulator::{AccumulatorVector, MajorityCounter};
use crate::hv::{words_for, BinaryHypervector};
use crate::image::GrayImage;
use crate::sparse::{Backend, SparseAccumulator, SparseScratch};

use super::{EncodeProbe, ImageEncoder};

pub(super) fn encode(enc: &ImageEncoder, img: &GrayImage, probe: &mut EncodeProbe) -> BinaryHypervector {
    let n = enc.dim();
    let basis = &enc.sparse;
    let table = enc.values.table();
    let count_sketch = basis.backend() == Backend::CountSketch;

    let started = probe.start();
    let (offsets, indices) = img.value_bins();
    probe.phases.binning += probe.lap(started);

    let mut scratch = SparseScratch::default();
    let mut bin_words = vec![0u64; words_for(n)];
    let mut counter = MajorityCounter::new(n).expect("encoder dim > 0");
    let mut quantize_time = std::time::Duration::ZERO;
    for z in 0..256 {
        let bin = &indices[offsets[z]..offsets[z + 1]];
        if bin.is_empty() {
            continue;
        }
        let t = probe.start();
        basis.scatter(bin, &mut scratch, &mut bin_words);
        probe.phases.binning += probe.lap(t);

        if count_sketch {
            let t = probe.start();
            basis.quantize(bin, &mut scratch, &mut bin_words);
            quantize_time += probe.lap(t);
        }

        let t = probe.start();
        for (w, v) in bin_words.iter_mut().zip(table[z].words()) {
            *w ^= v;
        }
        counter.add_words(&bin_words, bin.len() as u32);
        probe.phases.bind_sum += probe.lap(t);

        probe.counts.sparse_bundles += bin.len() as u64;
        probe.counts.binds += 1;
        probe.counts.bundles += 1;
    }
    if count_sketch {
        *probe.phases.quantize.get_or_insert_with(Default::default) += quantize_time;
    }

    let started = probe.start();
    let out = counter.majority();
    probe.phases.majority += probe.lap(started);
    out
}

pub(super) fn encode_reference(enc: &ImageEncoder, img: &GrayImage, probe: &mut EncodeProbe) -> BinaryHypervector {
    let n = enc.dim();
    let basis = &enc.sparse;

    // Binning: one pass over the image into 256 sum vectors.
    let started = probe.start();
    let mut sums: Vec<SparseAccumulator> = (0..256).map(|_| SparseAccumulator::new(basis)).collect();
    let mut counts = [0u32; 256];
    for (k, &v) in img.pixels().iter().enumerate() {
        let v = usize::from(v);
        sums[v]
            .add(basis, k as u64)
            .expect("accumulators built from this basis");
        counts[v] += 1;
        probe.counts.sparse_bundles += 1;
    }
    probe.phases.binning += probe.lap(started);

    // Quantize: count-sketch sums to binary. Bloom sums already are.
    let started = probe.start();
    let finalized: Vec<Option<BinaryHypervector>> = sums
        .iter()
        .zip(&counts)
        .map(|(acc, &c)| (c > 0).then(|| acc.finalize()))
        .collect();
    if basis.backend() == Backend::CountSketch {
        let elapsed = probe.lap(started);
        *probe.phases.quantize.get_or_insert_with(Default::default) += elapsed;
    }

    // Bind & sum: value code generated by flipping, weighted per-dimension sum.
    let started = probe.start();
    let mut sum = AccumulatorVector::new(n).expect("encoder dim > 0");
    for (v, hv) in finalized.iter().enumerate() {
        let Some(hv) = hv else { continue };
        let mut bound = hv.clone();
        enc.values.flip_in_place(v as u8, &mut bound);
        sum.add(&bound, counts[v]).expect("same dimension");
        probe.counts.binds += 1;
        probe.counts.bundles += 1;
    }
    probe.phases.bind_sum += probe.lap(started);

    let started = probe.start();
    let out = sum.majority();
    probe.phases.majority += probe.lap(started);
    out
}
