use super::*;
use crate::accumulator::{bundle, bundle_unweighted};
use crate::hv::{bind, hamming};
use crate::sparse::sparse_bundle;

fn gradient(width: usize, height: usize) -> GrayImage {
    let pixels = (0..width * height).map(|k| ((k * 7 + k / width) % 256) as u8).collect();
    GrayImage::new(width, height, pixels).unwrap()
}

fn small(variant: EncoderVariant) -> EncoderConfig {
    EncoderConfig::new(variant).with_dim(1000).with_density(8).with_seed(42)
}

#[test]
fn table1_operation_counts() {
    let img = gradient(160, 120);
    assert!(img.histogram().iter().all(|&c| c > 0));
    let expected = [
        (EncoderVariant::Naive, (536, 38_400, 19_200, 0)),
        (EncoderVariant::Rewrite1, (258, 38_400, 19_200, 0)),
        (EncoderVariant::Rewrite2, (258, 19_200, 19_200, 0)),
        (EncoderVariant::Rewrite3, (258, 19_200, 19_456, 0)),
        (EncoderVariant::HyperCam, (2, 256, 256, 19_200)),
    ];
    for (variant, counts) in expected {
        let enc = ImageEncoder::new(EncoderConfig::new(variant), 160, 120).unwrap();
        let mut probe = EncodeProbe::new();
        enc.encode_probed(&img, &mut probe).unwrap();
        assert_eq!(probe.counts.as_tuple(), counts, "{variant}");
    }
}

#[test]
fn hypercam_skips_absent_values() {
    let img = GrayImage::new(3, 1, vec![4, 4, 200]).unwrap();
    let enc = ImageEncoder::new(small(EncoderVariant::HyperCam), 3, 1).unwrap();
    let mut probe = EncodeProbe::new();
    enc.encode_probed(&img, &mut probe).unwrap();
    assert_eq!(probe.counts.as_tuple(), (1, 2, 2, 3));
}

#[test]
fn naive_matches_definition() {
    let (w, h) = (5, 3);
    let img = gradient(w, h);
    let enc = ImageEncoder::new(small(EncoderVariant::Naive), w, h).unwrap();
    let mut rng = SeededRng::stream(42, Stream::Positions);
    let rows: Vec<_> = (0..h)
        .map(|_| BinaryHypervector::random(&mut rng, 1000).unwrap())
        .collect();
    let cols: Vec<_> = (0..w)
        .map(|_| BinaryHypervector::random(&mut rng, 1000).unwrap())
        .collect();
    let values = enc.value_codebook();
    let pixels: Vec<_> = (0..h)
        .flat_map(|i| (0..w).map(move |j| (i, j)))
        .map(|(i, j)| {
            let v = values.value_code(usize::from(img.get(i, j))).unwrap();
            bind(&bind(&rows[i], &cols[j]).unwrap(), &v).unwrap()
        })
        .collect();
    assert_eq!(enc.encode(&img).unwrap(), bundle_unweighted(&pixels).unwrap());
}

#[test]
fn rewrite1_uses_permuted_row_and_column_codes() {
    let (w, h) = (4, 3);
    let img = gradient(w, h);
    let enc = ImageEncoder::new(small(EncoderVariant::Rewrite1), w, h).unwrap();
    let mut rng = SeededRng::stream(42, Stream::Positions);
    let r0 = BinaryHypervector::random(&mut rng, 1000).unwrap();
    let c0 = BinaryHypervector::random(&mut rng, 1000).unwrap();
    let values = enc.value_codebook();
    let pixels: Vec<_> = (0..w * h)
        .map(|k| {
            let pos = bind(&permute(&r0, (k / w) as i64), &permute(&c0, (k % w) as i64)).unwrap();
            assert_eq!(enc.position_code(k).unwrap(), pos);
            bind(&pos, &values.value_code(usize::from(img.pixels()[k])).unwrap()).unwrap()
        })
        .collect();
    assert_eq!(enc.encode(&img).unwrap(), bundle_unweighted(&pixels).unwrap());
}

use crate::hv::permute;

fn coalesced_reference(enc: &ImageEncoder, img: &GrayImage) -> BinaryHypervector {
    let values = enc.value_codebook();
    let pixels: Vec<_> = img
        .pixels()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            bind(
                &enc.position_code(k).unwrap(),
                &values.value_code(usize::from(v)).unwrap(),
            )
            .unwrap()
        })
        .collect();
    bundle_unweighted(&pixels).unwrap()
}

#[test]
fn rewrite2_matches_explicit_table() {
    // 40 pixels over n = 16 needs three permuted bases.
    let config = EncoderConfig::new(EncoderVariant::Rewrite2)
        .with_dim(16)
        .with_density(4)
        .with_seed(3);
    let img = gradient(8, 5);
    let enc = ImageEncoder::new(config, 8, 5).unwrap();
    assert_eq!(enc.codebook_vectors(), 3 + 256);
    let mut rng = SeededRng::stream(3, Stream::Positions);
    let bases: Vec<_> = (0..3)
        .map(|_| BinaryHypervector::random(&mut rng, 16).unwrap())
        .collect();
    for k in 0..40 {
        assert_eq!(enc.position_code(k).unwrap(), permute(&bases[k / 16], (k % 16) as i64));
    }
    assert_eq!(enc.encode(&img).unwrap(), coalesced_reference(&enc, &img));
}

#[test]
fn rewrite3_matches_factored_definition() {
    let (w, h) = (6, 4);
    let pixels = (0..w * h).map(|k| [0u8, 0, 3, 9, 0, 3][k % 6]).collect();
    let img = GrayImage::new(w, h, pixels).unwrap();
    let enc = ImageEncoder::new(small(EncoderVariant::Rewrite3), w, h).unwrap();
    let hist = img.histogram();
    let mut terms = Vec::new();
    for (z, _) in hist.iter().enumerate().filter(|(_, &count)| count > 0) {
        let codes: Vec<_> = (0..w * h)
            .filter(|&k| usize::from(img.pixels()[k]) == z)
            .map(|k| enc.position_code(k).unwrap())
            .collect();
        let inner = bundle_unweighted(&codes).unwrap();
        terms.push((
            bind(&inner, &enc.value_codebook().value_code(z).unwrap()).unwrap(),
            hist[z],
        ));
    }
    let items: Vec<_> = terms.iter().map(|(hv, c)| (hv, *c)).collect();
    assert_eq!(enc.encode(&img).unwrap(), bundle(&items).unwrap());
}

fn hypercam_definition(enc: &ImageEncoder, img: &GrayImage) -> BinaryHypervector {
    let hist = img.histogram();
    let terms: Vec<_> = (0..256)
        .filter(|&z| hist[z] > 0)
        .map(|z| {
            let members = (0..img.len() as u64).filter(|&k| usize::from(img.pixels()[k as usize]) == z);
            let sb = sparse_bundle(enc.sparse_basis(), members);
            (
                bind(&sb, &enc.value_codebook().value_code(z).unwrap()).unwrap(),
                hist[z],
            )
        })
        .collect();
    let items: Vec<_> = terms.iter().map(|(hv, c)| (hv, *c)).collect();
    bundle(&items).unwrap()
}

#[test]
fn hypercam_fast_reference_and_definition_agree() {
    for backend in [Backend::Bloom, Backend::CountSketch] {
        for (w, h) in [(1, 1), (7, 5), (28, 28)] {
            let img = gradient(w, h);
            let config = small(EncoderVariant::HyperCam).with_backend(backend);
            let enc = ImageEncoder::new(config, w, h).unwrap();
            let fast = enc.encode(&img).unwrap();
            let reference = enc.encode_reference(&img, &mut EncodeProbe::new()).unwrap();
            assert_eq!(fast, reference, "{backend} {w}x{h}");
            assert_eq!(fast, hypercam_definition(&enc, &img), "{backend} {w}x{h}");
            assert!(fast.padding_is_clear());
        }
    }
}

#[test]
fn reference_probe_counts_match_fast_path() {
    let img = gradient(160, 120);
    let enc = ImageEncoder::new(EncoderConfig::default(), 160, 120).unwrap();
    let mut fast = EncodeProbe::new();
    let mut reference = EncodeProbe::timed();
    enc.encode_probed(&img, &mut fast).unwrap();
    enc.encode_reference(&img, &mut reference).unwrap();
    assert_eq!(fast.counts, reference.counts);
    assert!(reference.phases.quantize.is_some());

    let bloom = ImageEncoder::new(EncoderConfig::default().with_backend(Backend::Bloom), 160, 120).unwrap();
    let mut probe = EncodeProbe::timed();
    bloom.encode_reference(&img, &mut probe).unwrap();
    assert!(probe.phases.quantize.is_none());
}

#[test]
fn constant_image_factors_out_its_value() {
    let img = GrayImage::filled(5, 5, 77).unwrap();
    for variant in EncoderVariant::ALL {
        let enc = ImageEncoder::new(small(variant), 5, 5).unwrap();
        let v = enc.value_codebook().value_code(77).unwrap();
        let unbound = bind(&enc.encode(&img).unwrap(), &v).unwrap();
        let expected = match variant {
            EncoderVariant::HyperCam => sparse_bundle(enc.sparse_basis(), 0..25),
            _ => {
                let codes: Vec<_> = (0..25).map(|k| enc.position_code(k).unwrap()).collect();
                bundle_unweighted(&codes).unwrap()
            }
        };
        assert_eq!(unbound, expected, "{variant}");
    }
}

#[test]
fn single_pixel_image() {
    let img = GrayImage::filled(1, 1, 200).unwrap();
    for variant in EncoderVariant::ALL {
        let enc = ImageEncoder::new(small(variant), 1, 1).unwrap();
        let hv = enc.encode(&img).unwrap();
        let v = enc.value_codebook().value_code(200).unwrap();
        let expected = match variant {
            EncoderVariant::HyperCam => bind(&sparse_bundle(enc.sparse_basis(), [0u64]), &v).unwrap(),
            _ => bind(&enc.position_code(0).unwrap(), &v).unwrap(),
        };
        assert_eq!(hv, expected, "{variant}");
    }
}

#[test]
fn encoding_is_deterministic_in_the_seed() {
    let img = gradient(12, 9);
    for variant in EncoderVariant::ALL {
        let a = ImageEncoder::new(small(variant), 12, 9).unwrap().encode(&img).unwrap();
        let b = ImageEncoder::new(small(variant), 12, 9).unwrap().encode(&img).unwrap();
        let c = ImageEncoder::new(small(variant).with_seed(43), 12, 9)
            .unwrap()
            .encode(&img)
            .unwrap();
        assert_eq!(a, b, "{variant}");
        assert_ne!(a, c, "{variant}");
    }
}

#[test]
fn batch_matches_sequential() {
    let images: Vec<_> = (0..6)
        .map(|s| {
            let px = (0..100).map(|k| ((k * (s + 3)) % 256) as u8).collect();
            GrayImage::new(10, 10, px).unwrap()
        })
        .collect();
    let enc = ImageEncoder::new(small(EncoderVariant::HyperCam), 10, 10).unwrap();
    let batch = enc.encode_batch(&images).unwrap();
    for (img, hv) in images.iter().zip(&batch) {
        assert_eq!(&enc.encode(img).unwrap(), hv);
    }
}

#[test]
fn similar_images_encode_closer_than_unrelated_ones() {
    let (w, h) = (28, 28);
    let base = gradient(w, h);
    let mut nudged = base.clone();
    for p in nudged.pixels_mut().iter_mut().step_by(9) {
        *p = p.saturating_add(4);
    }
    let mut rng = SeededRng::new(5);
    let unrelated = GrayImage::new(w, h, (0..w * h).map(|_| rng.below(256) as u8).collect()).unwrap();
    for variant in EncoderVariant::ALL {
        let enc = ImageEncoder::new(EncoderConfig::new(variant), w, h).unwrap();
        let a = enc.encode(&base).unwrap();
        let near = hamming(&a, &enc.encode(&nudged).unwrap()).unwrap();
        let far = hamming(&a, &enc.encode(&unrelated).unwrap()).unwrap();
        assert!(near < far, "{variant}: {near} vs {far}");
    }
}

#[test]
fn rejects_wrong_image_size() {
    let enc = ImageEncoder::new(small(EncoderVariant::HyperCam), 4, 4).unwrap();
    assert!(enc.encode(&GrayImage::filled(4, 5, 0).unwrap()).is_err());
    assert!(ImageEncoder::new(small(EncoderVariant::Naive), 0, 4).is_err());
}

#[test]
fn variant_names_round_trip() {
    for v in EncoderVariant::ALL {
        assert_eq!(v.name().parse::<EncoderVariant>().unwrap(), v);
        assert_eq!(EncoderVariant::from_tag(v.tag()), Some(v));
    }
    assert!("hyper".parse::<EncoderVariant>().is_err());
}
