use rand::Rng as _;

use super::*;
use crate::corpus::{Instance, LabelSet, LabelSpace, MultiLabelDataset, SparseBinaryVector};
use crate::seed;
use crate::weak_learners::{self, BinaryModel, WeakKind, WeakSpec, WeightedBinaryDataset};

fn dataset(q: usize, dim: usize, rows: &[(&[usize], &[usize])]) -> MultiLabelDataset {
    let instances = rows
        .iter()
        .map(|(idx, labels)| Instance {
            vector: SparseBinaryVector::new(idx.to_vec(), dim).unwrap(),
            labels: LabelSet::from_ids(labels.iter().copied()),
        })
        .collect();
    MultiLabelDataset::new(LabelSpace::numbered(q).unwrap(), dim, instances).unwrap()
}

fn random_dataset(seed_value: u64, n: usize, q: usize, dim: usize) -> MultiLabelDataset {
    let mut rng = seed::rng(seed_value);
    let instances = (0..n)
        .map(|_| {
            let labels: LabelSet = (0..q).filter(|_| rng.gen_bool(0.3)).collect();
            // Label-correlated features plus noise.
            let mut idx: Vec<usize> = labels.iter().filter(|_| rng.gen_bool(0.8)).map(|l| l % dim).collect();
            idx.extend((0..dim).filter(|_| rng.gen_bool(0.15)));
            Instance {
                vector: SparseBinaryVector::from_unsorted(idx, dim).unwrap(),
                labels,
            }
        })
        .collect();
    MultiLabelDataset::new(LabelSpace::numbered(q).unwrap(), dim, instances).unwrap()
}

fn spec(kind: WeakKind) -> WeakSpec {
    WeakSpec::new(kind).with_seed(11)
}

#[test]
fn br_single_label_matches_weak_learner() {
    let data = random_dataset(1, 30, 1, 6);
    for kind in WeakKind::ALL {
        let br = train(Algorithm::Br, &data, &spec(kind), 1, 0).unwrap();
        let targets = data
            .instances()
            .iter()
            .map(|i| if i.labels.contains(0) { 1 } else { -1 })
            .collect();
        let vectors = data.instances().iter().map(|i| i.vector.clone()).collect();
        let binary = WeightedBinaryDataset::uniform(vectors, targets).unwrap();
        let bare = weak_learners::train(&spec(kind).with_seed(seed::derive_seed(11, 0)), &binary).unwrap();
        for inst in data.instances() {
            let p = br.predict(&inst.vector).unwrap();
            assert_eq!(p.labels.contains(0), bare.predict(&inst.vector).unwrap().0 > 0);
        }
    }
}

#[test]
fn br_label_without_positives_is_never_predicted() {
    let data = dataset(2, 2, &[(&[0], &[0]), (&[1], &[]), (&[0, 1], &[0])]);
    let MultiLabelModel::Br(br) = train(Algorithm::Br, &data, &spec(WeakKind::Stump), 1, 0).unwrap() else {
        panic!()
    };
    assert_eq!(br.models[1], BinaryModel::constant(-1, 2));
}

#[test]
fn br_tree_reproduces_separable_labels() {
    let data = dataset(
        2,
        3,
        &[
            (&[0], &[0]),
            (&[1], &[1]),
            (&[0, 1], &[0, 1]),
            (&[2], &[]),
            (&[0, 2], &[0]),
            (&[], &[]),
        ],
    );
    let model = train(Algorithm::Br, &data, &spec(WeakKind::Tree), 1, 0).unwrap();
    assert_eq!(model.predict_dataset(&data).unwrap(), data.label_sets());
}

#[test]
fn lp_codebook_and_priors() {
    let data = dataset(2, 2, &[(&[0], &[0]), (&[1], &[0, 1]), (&[0], &[0])]);
    let lp = train_lp(&data, &spec(WeakKind::NaiveBayes)).unwrap();
    assert_eq!(lp.codebook, vec![LabelSet::from_ids([0]), LabelSet::from_ids([0, 1])]);
    assert!((lp.priors[0] - 2.0 / 3.0).abs() < 1e-15);
    assert!((lp.priors[1] - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn lp_single_set_is_always_predicted() {
    let data = dataset(3, 2, &[(&[0], &[1, 2]), (&[1], &[1, 2])]);
    for kind in WeakKind::ALL {
        let model = train(Algorithm::Lp, &data, &spec(kind), 1, 0).unwrap();
        for x in [&[][..], &[0], &[1], &[0, 1]] {
            let p = model.predict(&SparseBinaryVector::new(x.to_vec(), 2).unwrap()).unwrap();
            assert_eq!(p.labels, LabelSet::from_ids([1, 2]));
        }
    }
}

#[test]
fn lp_ties_prefer_higher_prior_then_lower_id() {
    let tie = |priors: Vec<f64>| LpModel {
        space: LabelSpace::numbered(2).unwrap(),
        dimension: 1,
        codebook: vec![LabelSet::from_ids([0]), LabelSet::from_ids([1])],
        priors,
        classifier: weak_learners::MulticlassModel::OneVsRest {
            models: vec![BinaryModel::constant(1, 1), BinaryModel::constant(1, 1)],
        },
    };
    let x = SparseBinaryVector::empty(1);
    assert_eq!(tie(vec![0.6, 0.4]).predict_class(&x), 0);
    assert_eq!(tie(vec![0.4, 0.6]).predict_class(&x), 1);
    assert_eq!(tie(vec![0.5, 0.5]).predict_class(&x), 0);
}

#[test]
fn lp_unpruned_tree_fits_training_data() {
    let data = random_dataset(5, 60, 4, 12);
    // Drop contradictory duplicates.
    let mut keep: Vec<Instance> = Vec::new();
    for inst in data.instances() {
        if !keep.iter().any(|k| k.vector == inst.vector) {
            keep.push(inst.clone());
        }
    }
    let data = MultiLabelDataset::new(data.space().clone(), data.dimension(), keep).unwrap();
    let mut s = spec(WeakKind::Tree);
    s.tree = weak_learners::TreeParams::unpruned();
    let model = train(Algorithm::Lp, &data, &s, 1, 0).unwrap();
    assert_eq!(model.predict_dataset(&data).unwrap(), data.label_sets());
}

#[test]
fn boosting_coefficients() {
    let (alpha, z) = BoostRound::coefficients(0.25);
    assert!((alpha - 0.5 * 3f64.ln()).abs() < 1e-12);
    assert!((alpha - 0.5493).abs() < 1e-4);
    assert!((z - 0.8660).abs() < 1e-4);
    let (alpha0, _) = BoostRound::coefficients(0.0);
    assert!(alpha0.is_finite() && alpha0 > 0.0);
}

#[test]
fn perfect_first_round_stops_boosting() {
    // Label 0 on every instance, label 1 on none: a label-identity stump is perfect.
    let data = dataset(2, 2, &[(&[0], &[0]), (&[1], &[0]), (&[], &[0])]);
    let model = train_adaboost_mh(&data, &spec(WeakKind::Stump), 10).unwrap();
    assert_eq!(model.rounds.len(), 1);
    assert_eq!(model.rounds[0].epsilon, 0.0);
    assert_eq!(model.stop, Some(StopReason::PerfectRound { round: 0 }));
    let preds = MultiLabelModel::AdaboostMh(model).predict_dataset(&data).unwrap();
    assert_eq!(preds, data.label_sets());
}

#[test]
fn useless_first_round_falls_back_to_constant() {
    let data = dataset(2, 1, &[(&[], &[0]), (&[], &[1])]);
    let model = train_adaboost_mh(&data, &spec(WeakKind::Stump), 5).unwrap();
    assert_eq!(model.stop, Some(StopReason::Fallback));
    assert_eq!(model.rounds.len(), 1);
    assert!(model.rounds[0].weak.is_constant());
    assert!(model.rounds[0].alpha > 0.0);
}

fn constant_round(t: usize, sign: i8, alpha: f64) -> BoostRound {
    BoostRound {
        t,
        weak: BinaryModel::constant(sign, 2),
        epsilon: 0.25,
        alpha,
        z: 0.866,
    }
}

#[test]
fn boosted_score_is_alpha_weighted_vote() {
    let model = AdaBoostMhModel {
        space: LabelSpace::numbered(1).unwrap(),
        dimension: 1,
        rounds: vec![constant_round(0, 1, 0.5493), constant_round(1, -1, 0.2)],
        requested_rounds: 2,
        stop: None,
    };
    let p = MultiLabelModel::AdaboostMh(model).predict(&SparseBinaryVector::empty(1)).unwrap();
    assert!((p.scores[0] - 0.3493).abs() < 1e-12);
    assert!(p.labels.contains(0));

    let cancel = AdaBoostMhModel {
        space: LabelSpace::numbered(1).unwrap(),
        dimension: 1,
        rounds: vec![constant_round(0, 1, 0.2), constant_round(1, -1, 0.2)],
        requested_rounds: 2,
        stop: None,
    };
    let p = MultiLabelModel::AdaboostMh(cancel).predict(&SparseBinaryVector::empty(1)).unwrap();
    assert_eq!(p.scores[0], 0.0);
    assert!(p.labels.is_empty());
}

#[test]
fn boosting_weight_law_and_training_bound() {
    for (s, kind) in [(3, WeakKind::Stump), (4, WeakKind::Tree), (6, WeakKind::NaiveBayes)] {
        let data = random_dataset(s, 40, 3, 8);
        let (model, trace) = train_adaboost_mh_traced(&data, &spec(kind), 8).unwrap();
        assert_eq!(trace.distributions.len(), model.rounds.len() + 1);
        for (t, round) in model.rounds.iter().enumerate() {
            let before = &trace.distributions[t];
            let after = &trace.distributions[t + 1];
            assert!((after.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let ratio = (2.0 * round.alpha).exp();
            let correct = &trace.correct[t];
            let (mut wrong_gain, mut right_gain) = (None, None);
            for p in 0..after.len() {
                let g = after[p] / before[p];
                if correct[p] {
                    right_gain = Some(g);
                } else {
                    wrong_gain = Some(g);
                }
            }
            if let (Some(w), Some(r)) = (wrong_gain, right_gain) {
                assert!(w > r);
                assert!((w / r - ratio).abs() < 1e-9 * ratio);
            }
        }
        let train_loss = crate::metrics::hamming_loss(
            &MultiLabelModel::AdaboostMh(model.clone()).predict_dataset(&data).unwrap(),
            &data.label_sets(),
            3,
        )
        .unwrap();
        assert!(train_loss <= model.z_product() + 1e-12);
    }
}

#[test]
fn rounds_below_one_is_an_argument_error() {
    let data = dataset(1, 1, &[(&[0], &[0])]);
    assert!(matches!(
        train_adaboost_mh(&data, &spec(WeakKind::Stump), 0),
        Err(Error::Argument(_))
    ));
    assert!(matches!(
        train_bagging(&data, BaseKind::Br, &spec(WeakKind::Stump), 0, 1, &BaggingOptions::default()),
        Err(Error::Argument(_))
    ));
}

#[test]
fn bagging_without_bootstrap_equals_base_model() {
    let data = random_dataset(8, 30, 3, 6);
    let options = BaggingOptions {
        disable_bootstrap: true,
        ..BaggingOptions::default()
    };
    for kind in WeakKind::ALL {
        for (base, algo) in [(BaseKind::Br, Algorithm::Br), (BaseKind::Lp, Algorithm::Lp)] {
            let bag = MultiLabelModel::Bagging(train_bagging(&data, base, &spec(kind), 3, 9, &options).unwrap());
            let single = train(algo, &data, &spec(kind), 1, 0).unwrap();
            assert_eq!(bag.predict_dataset(&data).unwrap(), single.predict_dataset(&data).unwrap());
        }
    }
}

#[test]
fn single_member_bagging_equals_member() {
    let data = random_dataset(9, 30, 3, 6);
    let bag = train_bagging(&data, BaseKind::Lp, &spec(WeakKind::Stump), 1, 4, &BaggingOptions::default()).unwrap();
    let BaggingMember::Lp(member) = bag.members[0].clone() else {
        panic!()
    };
    let bag = MultiLabelModel::Bagging(bag);
    let member = MultiLabelModel::Lp(member);
    assert_eq!(bag.predict_dataset(&data).unwrap(), member.predict_dataset(&data).unwrap());
}

#[test]
fn half_the_votes_is_enough() {
    let member = |sign: i8| {
        BaggingMember::Br(BrModel {
            space: LabelSpace::numbered(1).unwrap(),
            dimension: 1,
            models: vec![BinaryModel::constant(sign, 1)],
        })
    };
    let bag = BaggingModel {
        space: LabelSpace::numbered(1).unwrap(),
        dimension: 1,
        base: BaseKind::Br,
        vote_threshold: 0.5,
        members: vec![member(1), member(-1)],
    };
    let p = MultiLabelModel::Bagging(bag).predict(&SparseBinaryVector::empty(1)).unwrap();
    assert_eq!(p.scores, vec![0.5]);
    assert!(p.labels.contains(0));
}

#[test]
fn training_is_deterministic() {
    let data = random_dataset(10, 30, 3, 6);
    for algo in Algorithm::ALL {
        for kind in [WeakKind::Stump, WeakKind::Forest, WeakKind::Smo] {
            let a = train(algo, &data, &spec(kind), 3, 5).unwrap();
            let b = train(algo, &data, &spec(kind), 3, 5).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn prefix_predictions_match_truncation() {
    let data = random_dataset(12, 30, 3, 6);
    let xs: Vec<&SparseBinaryVector> = data.instances().iter().map(|i| &i.vector).collect();
    for algo in [Algorithm::AdaboostMh, Algorithm::BaggingBr, Algorithm::BaggingLp] {
        let model = train(algo, &data, &spec(WeakKind::Stump), 5, 2).unwrap();
        let prefixes = model.prefix_predictions(&xs).unwrap();
        assert_eq!(prefixes.len(), model.ensemble_size());
        for (k, preds) in prefixes.iter().enumerate() {
            let truncated = model.truncated(k + 1).unwrap();
            assert_eq!(preds, &truncated.predict_dataset(&data).unwrap());
        }
    }
}

#[test]
fn lp_predictions_stay_in_codebook() {
    let data = random_dataset(13, 40, 4, 8);
    let MultiLabelModel::Lp(lp) = train(Algorithm::Lp, &data, &spec(WeakKind::Smo), 1, 0).unwrap() else {
        panic!()
    };
    let mut rng = seed::rng(3);
    for _ in 0..50 {
        let idx = (0..8).filter(|_| rng.gen_bool(0.5)).collect();
        let x = SparseBinaryVector::new(idx, 8).unwrap();
        assert!(lp.codebook.contains(&lp.predict_unchecked(&x).labels));
    }
}

#[test]
fn algorithm_names_round_trip() {
    for a in Algorithm::ALL {
        assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
    }
    assert_eq!("adaboost_mh".parse::<Algorithm>().unwrap(), Algorithm::AdaboostMh);
    assert!("ml-knn".parse::<Algorithm>().is_err());
}
