mod common;

use hyperhd::{
    random_hv, train_bundle, train_onlinehd, Binarization, BinaryHypervector, EncoderConfig, ImageEncoder, ItemMemory,
    SeededRng, TrainConfig, UpdateWeighting,
};
use proptest::prelude::*;

#[test]
fn onlinehd_classifies_a_separable_image_set() {
    let train = common::synthetic_dataset(8, 20, 32, 24, 1);
    let test = common::synthetic_dataset(8, 10, 32, 24, 2);
    let encoder = ImageEncoder::new(EncoderConfig::default(), 32, 24).unwrap();
    let x = encoder.encode_batch(train.images()).unwrap();
    let q = encoder.encode_batch(test.images()).unwrap();
    for weighting in [UpdateWeighting::Flat, UpdateWeighting::Similarity] {
        for binarization in [Binarization::PerUpdate, Binarization::PerEpoch] {
            let cfg = TrainConfig {
                weighting,
                binarization,
                ..TrainConfig::default()
            };
            let (memory, log) = train_onlinehd(&x, train.labels(), train.class_names().to_vec(), &cfg).unwrap();
            assert!(!log.is_empty());
            assert_eq!(
                memory.accuracy(&q, test.labels()).unwrap(),
                1.0,
                "{weighting} {binarization}"
            );
        }
    }
}

#[test]
fn bundled_prototypes_are_class_majorities() {
    let mut rng = SeededRng::new(3);
    let x: Vec<_> = (0..9).map(|_| random_hv(&mut rng, 300).unwrap()).collect();
    let labels = [0, 1, 2, 0, 1, 2, 0, 1, 2];
    let memory = train_bundle(&x, &labels, vec!["a".into(), "b".into(), "c".into()]).unwrap();
    for c in 0..3 {
        let members: Vec<_> = x.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(v, _)| v).collect();
        for i in 0..300 {
            let ones = members.iter().filter(|v| v.get(i)).count();
            assert_eq!(
                memory.prototypes()[c].get(i),
                2 * ones >= members.len(),
                "class {c} bit {i}"
            );
        }
    }
}

fn memory_and_query() -> impl Strategy<Value = (Vec<Vec<bool>>, Vec<bool>)> {
    (1usize..130, 2usize..6).prop_flat_map(|(n, c)| {
        (
            prop::collection::vec(prop::collection::vec(any::<bool>(), n), c),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

proptest! {
    #[test]
    fn prediction_is_the_lowest_index_nearest_prototype((protos, query) in memory_and_query()) {
        let protos: Vec<_> = protos.iter().map(|p| BinaryHypervector::from_bits(p).unwrap()).collect();
        let names = (0..protos.len()).map(|c| c.to_string()).collect();
        let memory = ItemMemory::from_prototypes(names, protos.clone()).unwrap();
        let q = BinaryHypervector::from_bits(&query).unwrap();
        let p = memory.predict(&q).unwrap();
        let d: Vec<usize> = protos.iter().map(|x| hyperhd::hamming_bits(x, &q).unwrap()).collect();
        let best = *d.iter().min().unwrap();
        prop_assert_eq!(p.label, d.iter().position(|&x| x == best).unwrap());
        prop_assert_eq!(p.distances.len(), protos.len());
        prop_assert_eq!(memory.predict_batch(&[q]).unwrap(), vec![p.label]);
    }

    #[test]
    fn trained_binary_prototypes_threshold_the_real_ones(seed in any::<u64>(), lr in 0.0f64..8.0) {
        let mut rng = SeededRng::new(seed);
        let x: Vec<_> = (0..24).map(|_| random_hv(&mut rng, 200).unwrap()).collect();
        let labels: Vec<_> = (0..24).map(|i| i % 3).collect();
        let cfg = TrainConfig { epochs: 3, learning_rate: lr, ..TrainConfig::default() };
        let (memory, log) = train_onlinehd(&x, &labels, vec!["a".into(), "b".into(), "c".into()], &cfg).unwrap();
        for (binary, real) in memory.prototypes().iter().zip(memory.real_prototypes()) {
            for (i, &r) in real.iter().enumerate() {
                prop_assert_eq!(binary.get(i), r >= 0.0);
            }
        }
        for e in &log {
            prop_assert_eq!(e.train_accuracy, 1.0 - e.updates as f64 / 24.0);
        }
    }
}
