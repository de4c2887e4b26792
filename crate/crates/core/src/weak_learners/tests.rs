use proptest::prelude::*;

use super::smo::{solve_dual, DenseRows};
use super::*;
use crate::corpus::SparseBinaryVector;

fn v(indices: &[usize], dim: usize) -> SparseBinaryVector {
    SparseBinaryVector::new(indices.to_vec(), dim).unwrap()
}

fn spec(kind: WeakKind) -> WeakSpec {
    WeakSpec::new(kind).with_seed(7)
}

#[test]
fn stump_hand_example() {
    let data = WeightedBinaryDataset::uniform(
        vec![v(&[0], 2), v(&[0], 2), v(&[], 2), v(&[1], 2)],
        vec![1, 1, -1, -1],
    )
    .unwrap();
    let model = train(&spec(WeakKind::Stump), &data).unwrap();
    assert_eq!(
        model.learner,
        BinaryLearner::Stump(Stump {
            feature: 0,
            present: 1,
            absent: -1
        })
    );
    assert_eq!(data.weighted_error(|x| model.sign_unchecked(x)), 0.0);
    assert_eq!(model.predict(&v(&[0], 2)).unwrap(), (1, 1.0));
}

#[test]
fn single_class_gives_constant_model() {
    let data = WeightedBinaryDataset::uniform(vec![v(&[0], 3), v(&[1, 2], 3), v(&[], 3)], vec![1, 1, 1]).unwrap();
    for kind in WeakKind::ALL {
        let model = train(&spec(kind), &data).unwrap();
        assert!(model.is_constant(), "{kind}");
        assert_eq!(model.predict(&v(&[2], 3)).unwrap().0, 1);
        assert_eq!(data.weighted_error(|x| model.sign_unchecked(x)), 0.0);
    }
}

#[test]
fn naive_bayes_smoothed_likelihoods() {
    let data = WeightedBinaryDataset::uniform(
        vec![v(&[0], 1), v(&[0], 1), v(&[], 1), v(&[], 1)],
        vec![1, 1, -1, -1],
    )
    .unwrap();
    let model = train(&spec(WeakKind::NaiveBayes), &data).unwrap();
    let BinaryLearner::NaiveBayes(nb) = &model.learner else {
        panic!("expected naive Bayes");
    };
    // Class 0 is +1, class 1 is -1.
    assert!((nb.likelihood(0, 0) - 0.75).abs() < 1e-12);
    assert!((nb.likelihood(1, 0) - 0.25).abs() < 1e-12);
    assert_eq!(model.predict(&v(&[0], 1)).unwrap().0, 1);
    assert_eq!(model.predict(&v(&[], 1)).unwrap().0, -1);
}

#[test]
fn forest_vote_fraction_maps_to_score() {
    let leaf = |c: usize| DecisionTree {
        n_classes: 2,
        nodes: vec![tree::TreeNode::Leaf {
            dist: if c == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] },
        }],
    };
    let model = BinaryModel {
        dimension: 1,
        learner: BinaryLearner::Forest(Forest {
            trees: vec![leaf(0), leaf(0), leaf(1)],
        }),
    };
    let (sign, score) = model.predict(&v(&[], 1)).unwrap();
    assert_eq!(sign, 1);
    assert!((score - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn zero_score_resolves_to_plus() {
    assert_eq!(sign_of(0.0), 1);
    assert_eq!(sign_of(-0.0), 1);
    assert_eq!(sign_of(-1e-300), -1);
}

#[test]
fn dimension_mismatch_is_an_argument_error() {
    let model = BinaryModel::constant(1, 3);
    assert!(matches!(model.predict(&v(&[], 4)), Err(Error::Argument(_))));
}

#[test]
fn invalid_hyperparameters_are_configuration_errors() {
    let data = WeightedBinaryDataset::uniform(vec![v(&[0], 1), v(&[], 1)], vec![1, -1]).unwrap();
    let mut s = spec(WeakKind::Smo);
    s.smo.c = 0.0;
    assert!(matches!(train(&s, &data), Err(Error::Config(_))));
    let mut s = spec(WeakKind::Smo);
    s.smo.tolerance = -1.0;
    assert!(matches!(train(&s, &data), Err(Error::Config(_))));
    let mut s = spec(WeakKind::Forest);
    s.forest.n_trees = 0;
    assert!(matches!(train(&s, &data), Err(Error::Config(_))));
    let mut s = spec(WeakKind::NaiveBayes);
    s.naive_bayes.laplace_alpha = 0.0;
    assert!(matches!(train(&s, &data), Err(Error::Config(_))));
}

#[test]
fn weighted_dataset_rejects_bad_weights() {
    let vs = vec![v(&[0], 1), v(&[], 1)];
    assert!(WeightedBinaryDataset::new(vs.clone(), vec![1, -1], vec![0.5, 0.6]).is_err());
    assert!(WeightedBinaryDataset::new(vs.clone(), vec![1, -1], vec![1.5, -0.5]).is_err());
    assert!(WeightedBinaryDataset::new(vs.clone(), vec![1, 0], vec![0.5, 0.5]).is_err());
    assert!(WeightedBinaryDataset::new(vs, vec![1], vec![1.0]).is_err());
}

#[test]
fn smo_two_point_closed_form() {
    let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
    let sol = solve_dual(&DenseRows(&rows), &[1.0, -1.0], &[1000.0, 1000.0], 1e-3, 10_000, true);
    assert!(sol.converged);
    assert!((sol.alpha[0] - 0.5).abs() < 1e-6);
    assert!((sol.alpha[1] - 0.5).abs() < 1e-6);
    assert!((sol.model.weights[0] - 1.0).abs() < 1e-6);
    assert!(sol.model.weights[1].abs() < 1e-6);
    assert!(sol.model.bias.abs() < 1e-6);
    assert!((sol.model.decision_dense(&[1.0, 0.0]) - 1.0).abs() < 1e-6);
}

/// Independent KKT check on the primal form: margins `y_i f(x_i)` against
/// the box position of each multiplier.
fn kkt_violation(margins: &[f64], alpha: &[f64], upper: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for ((&m, &a), &c) in margins.iter().zip(alpha).zip(upper) {
        let v = if a <= 0.0 {
            (1.0 - m).max(0.0)
        } else if a >= c {
            (m - 1.0).max(0.0)
        } else {
            (m - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}

#[test]
fn smo_binary_data_satisfies_kkt() {
    let vectors = vec![
        v(&[0, 2], 4),
        v(&[0], 4),
        v(&[0, 3], 4),
        v(&[1], 4),
        v(&[1, 2], 4),
        v(&[1, 3], 4),
        v(&[0, 1], 4),
    ];
    let targets = vec![1, 1, 1, -1, -1, -1, 1];
    let data = WeightedBinaryDataset::uniform(vectors, targets).unwrap();
    let params = SmoParams::default();
    let sol = smo::solve(&data, &params, true).unwrap();
    let ys: Vec<f64> = data.targets().iter().map(|&t| f64::from(t)).collect();
    let margins: Vec<f64> = data
        .vectors()
        .iter()
        .zip(&ys)
        .map(|(x, y)| y * sol.model.decision(x))
        .collect();
    assert!(kkt_violation(&margins, &sol.alpha, &sol.upper) <= params.tolerance);
    assert!(sol.equality_residual(&ys) <= 1e-8);
    for (a, c) in sol.alpha.iter().zip(&sol.upper) {
        assert!(*a >= 0.0 && a <= c);
    }
    for w in sol.objective_trace.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
    let model = train(&spec(WeakKind::Smo), &data).unwrap();
    assert_eq!(data.weighted_error(|x| model.sign_unchecked(x)), 0.0);
}

#[test]
fn naive_bayes_is_finite_on_extreme_counts() {
    let data = WeightedBinaryDataset::new(
        vec![v(&[0, 1], 3), v(&[0, 1], 3), v(&[2], 3)],
        vec![1, 1, -1],
        vec![0.5 - 1e-12, 0.5 - 1e-12, 2e-12],
    )
    .unwrap();
    let model = train(&spec(WeakKind::NaiveBayes), &data).unwrap();
    let BinaryLearner::NaiveBayes(nb) = &model.learner else {
        panic!("expected naive Bayes");
    };
    for row in nb.log_present.iter().chain(&nb.log_absent) {
        assert!(row.iter().all(|x| x.is_finite()));
    }
    assert!(nb.log_prior.iter().all(|x| x.is_finite()));
}

fn arb_dataset(max_dim: usize, max_n: usize) -> impl Strategy<Value = WeightedBinaryDataset> {
    (1..=max_dim, 1..=max_n).prop_flat_map(|(dim, n)| {
        (
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), dim), n),
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(1u32..=6, n),
        )
            .prop_map(move |(bits, ys, ws)| {
                let vectors = bits
                    .iter()
                    .map(|row| {
                        let idx = row.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
                        SparseBinaryVector::new(idx, dim).unwrap()
                    })
                    .collect();
                let targets = ys.iter().map(|&y| if y { 1 } else { -1 }).collect();
                let total: u32 = ws.iter().sum();
                let weights = ws.iter().map(|&w| f64::from(w) / f64::from(total)).collect();
                WeightedBinaryDataset::new(vectors, targets, weights).unwrap()
            })
    })
}

fn has_contradiction(data: &WeightedBinaryDataset) -> bool {
    let vs = data.vectors();
    let ts = data.targets();
    (0..vs.len()).any(|i| (0..i).any(|j| vs[i] == vs[j] && ts[i] != ts[j]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn stump_and_tree_dominate_majority(data in arb_dataset(4, 6)) {
        let (pos, neg) = data.class_mass();
        for kind in [WeakKind::Stump, WeakKind::Tree] {
            let model = train(&spec(kind), &data).unwrap();
            let err = data.weighted_error(|x| model.sign_unchecked(x));
            prop_assert!(err <= pos.min(neg) + 1e-12, "{kind}: {err} > {}", pos.min(neg));
        }
    }

    #[test]
    fn stump_is_optimal(data in arb_dataset(4, 6)) {
        let model = train(&spec(WeakKind::Stump), &data).unwrap();
        let err = data.weighted_error(|x| model.sign_unchecked(x));
        for f in 0..data.dimension() {
            for (p, a) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
                let s = Stump { feature: f, present: p, absent: a };
                prop_assert!(err <= data.weighted_error(|x| s.predict(x)) + 1e-12);
            }
        }
    }

    #[test]
    fn stump_follows_a_dominant_weight(data in arb_dataset(4, 6), pick in any::<prop::sample::Index>()) {
        let n = data.len();
        let i = pick.index(n);
        let mut weights = vec![1e-3 / n as f64; n];
        weights[i] = 1.0 - 1e-3 * (n - 1) as f64 / n as f64;
        let mut data = data;
        data.set_weights(weights).unwrap();
        let model = train(&spec(WeakKind::Stump), &data).unwrap();
        prop_assert_eq!(model.sign_unchecked(&data.vectors()[i]), data.targets()[i]);
    }

    #[test]
    fn unpruned_tree_is_consistent(data in arb_dataset(5, 12)) {
        prop_assume!(!has_contradiction(&data));
        let mut s = spec(WeakKind::Tree);
        s.tree = TreeParams::unpruned();
        let model = train(&s, &data).unwrap();
        prop_assert_eq!(data.weighted_error(|x| model.sign_unchecked(x)), 0.0);
    }

    #[test]
    fn training_is_deterministic(data in arb_dataset(5, 10)) {
        for kind in WeakKind::ALL {
            let a = train(&spec(kind), &data).unwrap();
            let b = train(&spec(kind), &data).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn smo_respects_dual_constraints(data in arb_dataset(5, 10)) {
        let params = SmoParams { c: 2.0, ..SmoParams::default() };
        let sol = smo::solve(&data, &params, true).unwrap();
        let ys: Vec<f64> = data.targets().iter().map(|&t| f64::from(t)).collect();
        prop_assert!(sol.equality_residual(&ys) <= 1e-8);
        for (a, c) in sol.alpha.iter().zip(&sol.upper) {
            prop_assert!(*a >= 0.0 && a <= c);
        }
        for w in sol.objective_trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        if data.single_class().is_none() && sol.converged {
            let margins: Vec<f64> = data.vectors().iter().zip(&ys).map(|(x, y)| y * sol.model.decision(x)).collect();
            prop_assert!(kkt_violation(&margins, &sol.alpha, &sol.upper) <= params.tolerance);
        }
    }

    #[test]
    fn naive_bayes_log_likelihoods_are_finite(data in arb_dataset(5, 10), alpha in 0.01f64..5.0) {
        let mut s = spec(WeakKind::NaiveBayes);
        s.naive_bayes.laplace_alpha = alpha;
        let model = train(&s, &data).unwrap();
        if let BinaryLearner::NaiveBayes(nb) = &model.learner {
            for row in nb.log_present.iter().chain(&nb.log_absent) {
                prop_assert!(row.iter().all(|x| x.is_finite()));
            }
        }
    }
}
