use std::sync::Arc;

use proptest::prelude::*;

use warpcone::actions::{ActionModel, Turn};
use warpcone::embed::kuratowski_embed;
use warpcone::spaces::{build_net, Model};
use warpcone::warp::{BaseEdgeRule, WarpedLevel};

fn turn() -> impl Strategy<Value = Turn> {
    prop_oneof![
        Just(Turn::golden()),
        (2i64..20).prop_flat_map(|q| (1..q, Just(q))).prop_map(|(p, q)| Turn::rational(p, q).unwrap()),
        (0.01f64..0.99).prop_map(Turn::Real),
    ]
}

fn circle_action() -> impl Strategy<Value = Arc<ActionModel>> {
    (3usize..20, prop::collection::vec(turn(), 1..=3)).prop_map(|(n, turns)| {
        let space = Arc::new(build_net(&Model::Torus { dim: 1 }, n, 0).unwrap());
        let vectors = turns.into_iter().map(|t| vec![t]).collect();
        Arc::new(ActionModel::translations(space, vectors).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn warped_distance_is_a_metric_below_both_bounds(action in circle_action(), r in 0.5f64..80.0) {
        let lv = WarpedLevel::build(Arc::clone(&action), r, BaseEdgeRule::Complete, 1000).unwrap();
        let space = action.space();
        let n = space.len();
        for i in 0..n {
            prop_assert_eq!(lv.dist(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(lv.dist(i, j), lv.dist(j, i));
                prop_assert!(lv.dist(i, j) <= r * space.dist(i, j) + 1e-12);
                for k in 0..n {
                    prop_assert!(lv.dist(i, k) <= lv.dist(i, j) + lv.dist(j, k) + 1e-9);
                }
            }
            for s in 0..action.generator_count() {
                prop_assert!(lv.dist(i, action.image(s, i)) <= 1.0);
            }
        }
    }

    #[test]
    fn warped_distance_grows_with_the_level(action in circle_action(), r in 0.5f64..40.0, factor in 1.0f64..4.0) {
        let low = WarpedLevel::build(Arc::clone(&action), r, BaseEdgeRule::Complete, 1000).unwrap();
        let high = WarpedLevel::build(Arc::clone(&action), r * factor, BaseEdgeRule::Complete, 1000).unwrap();
        for (a, b) in low.dmat().iter().zip(high.dmat()) {
            prop_assert!(a <= &(b + 1e-12));
        }
    }

    #[test]
    fn kuratowski_is_lipschitz(n in 2usize..40, p in 1.0f64..6.0) {
        let space = build_net(&Model::Torus { dim: 1 }, n, 0).unwrap();
        let table = kuratowski_embed(&space, p).unwrap();
        let bound = space.total_mass().powf(1.0 / p);
        for i in 0..n {
            for j in 0..n {
                prop_assert!(table.norm_diff(i, j) <= bound * space.dist(i, j) + 1e-9);
            }
        }
    }
}
