use std::collections::BTreeSet;

use boostbag::corpus::{Instance, LabelSet, LabelSpace, MultiLabelDataset, SparseBinaryVector};
use boostbag::multilabel::{self, train_adaboost_mh_traced, Algorithm, MultiLabelModel};
use boostbag::weak_learners::{WeakKind, WeakSpec};
use proptest::prelude::*;

fn datasets() -> impl Strategy<Value = MultiLabelDataset> {
    (2usize..=24, 1usize..=4, 2usize..=6).prop_flat_map(|(n, q, dim)| {
        proptest::collection::vec(
            (
                proptest::collection::vec(any::<bool>(), dim),
                proptest::collection::vec(any::<bool>(), q),
            ),
            n,
        )
        .prop_map(move |rows| {
            let instances = rows
                .into_iter()
                .map(|(bits, labels)| Instance {
                    vector: SparseBinaryVector::new((0..dim).filter(|&f| bits[f]).collect(), dim).unwrap(),
                    labels: (0..q).filter(|&l| labels[l]).collect(),
                })
                .collect();
            MultiLabelDataset::new(LabelSpace::numbered(q).unwrap(), dim, instances).unwrap()
        })
    })
}

fn kinds() -> impl Strategy<Value = WeakKind> {
    prop::sample::select(WeakKind::ALL.to_vec())
}

fn vectors(data: &MultiLabelDataset) -> Vec<&SparseBinaryVector> {
    data.instances().iter().map(|i| &i.vector).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prefix_predictions_equal_truncated_models(
        data in datasets(),
        kind in kinds(),
        algorithm in prop::sample::select(vec![Algorithm::AdaboostMh, Algorithm::BaggingBr, Algorithm::BaggingLp]),
        seed in 0u64..1000,
    ) {
        let model = multilabel::train(algorithm, &data, &WeakSpec::new(kind).with_seed(seed), 4, seed).unwrap();
        let xs = vectors(&data);
        let prefixes = model.prefix_predictions(&xs).unwrap();
        prop_assert_eq!(prefixes.len(), model.ensemble_size());
        for (k, preds) in prefixes.iter().enumerate() {
            let truncated = model.truncated(k + 1).unwrap();
            let direct: Vec<LabelSet> = xs.iter().map(|x| truncated.predict(x).unwrap().labels).collect();
            prop_assert_eq!(preds, &direct);
        }
    }

    #[test]
    fn boosting_follows_the_exponential_weight_law(data in datasets(), kind in kinds()) {
        let (model, trace) = train_adaboost_mh_traced(&data, &WeakSpec::new(kind), 5).unwrap();
        for d in &trace.distributions {
            prop_assert!((d.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        for (t, round) in model.rounds.iter().enumerate() {
            if t + 1 >= trace.distributions.len() {
                break;
            }
            let (before, after) = (&trace.distributions[t], &trace.distributions[t + 1]);
            let unnormalized: Vec<f64> = before
                .iter()
                .zip(&trace.correct[t])
                .map(|(w, &c)| w * if c { (-round.alpha).exp() } else { round.alpha.exp() })
                .collect();
            let z: f64 = unnormalized.iter().sum();
            for (u, a) in unnormalized.iter().zip(after) {
                prop_assert!((u / z - a).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn label_powerset_only_predicts_training_sets(data in datasets(), kind in kinds()) {
        let model = multilabel::train(Algorithm::Lp, &data, &WeakSpec::new(kind), 1, 0).unwrap();
        let seen: BTreeSet<LabelSet> = data.label_sets().into_iter().collect();
        for x in vectors(&data) {
            prop_assert!(seen.contains(&model.predict(x).unwrap().labels));
        }
        let empty = SparseBinaryVector::empty(data.dimension());
        prop_assert!(seen.contains(&model.predict(&empty).unwrap().labels));
    }

    #[test]
    fn training_is_deterministic(
        data in datasets(),
        kind in kinds(),
        algorithm in prop::sample::select(Algorithm::ALL.to_vec()),
        seed in 0u64..1000,
    ) {
        let spec = WeakSpec::new(kind).with_seed(seed);
        let a = multilabel::train(algorithm, &data, &spec, 3, seed).unwrap();
        let b = multilabel::train(algorithm, &data, &spec, 3, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn scores_have_one_entry_per_label(
        data in datasets(),
        kind in kinds(),
        algorithm in prop::sample::select(Algorithm::ALL.to_vec()),
    ) {
        let model: MultiLabelModel = multilabel::train(algorithm, &data, &WeakSpec::new(kind), 3, 1).unwrap();
        for x in vectors(&data) {
            let p = model.predict(x).unwrap();
            prop_assert_eq!(p.scores.len(), data.q());
            prop_assert!(p.labels.iter().all(|l| l < data.q()));
        }
    }
}
