mod common;

use lpexcess::excess_lab::estimate_success;
use lpexcess::linear_code::hamming_7_4;
use lpexcess::lp::SolveStrategy;
use lpexcess::rational::{int, ratio, to_f64};
use lpexcess::{FundamentalPolytope, MsbChannel, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn hamming_polytope() -> FundamentalPolytope {
    FundamentalPolytope::from_graph(&hamming_7_4().tanner_graph()).unwrap()
}

fn llr_strategy(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-16i64..=32, 1i64..=8), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| ratio(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn status_is_scale_invariant(l in llr_strategy(7), num in 1i64..50, den in 1i64..50) {
        let p = hamming_polytope();
        let lambda = ratio(num, den);
        let scaled: Vec<Rational> = l.iter().map(|v| v * &lambda).collect();
        prop_assert_eq!(p.decode(&l).unwrap().status, p.decode(&scaled).unwrap().status);
    }

    #[test]
    fn adding_nonnegative_vectors_keeps_success(l in llr_strategy(7), extra in llr_strategy(7)) {
        let p = hamming_polytope();
        let bumped: Vec<Rational> = l.iter().zip(&extra).map(|(a, b)| a + b.abs()).collect();
        if p.decode(&l).unwrap().status.is_success() {
            prop_assert!(p.decode(&bumped).unwrap().status.is_success());
        }
    }

    #[test]
    fn excess_is_monotone(l in llr_strategy(7), e1 in 0i64..16, e2 in 0i64..16) {
        let p = hamming_polytope();
        let (lo, hi) = (ratio(e1.min(e2), 8), ratio(e1.max(e2), 8));
        if p.decode_with_excess(&l, &hi).unwrap().status.is_success() {
            prop_assert!(p.decode_with_excess(&l, &lo).unwrap().status.is_success());
        }
    }

    #[test]
    fn success_beats_every_codeword(l in llr_strategy(7)) {
        let h = hamming_7_4();
        let p = hamming_polytope();
        let ok = p.decode(&l).unwrap().status.is_success();
        let ml_unique = h
            .codewords()
            .unwrap()
            .iter()
            .filter(|w| !w.is_zero())
            .all(|w| common::dot(&l, &w.to_bits()).is_positive());
        // LP success implies the zero word is the unique ML codeword.
        prop_assert!(!ok || ml_unique);
    }

    #[test]
    fn strategies_agree(l in llr_strategy(7)) {
        let p = hamming_polytope();
        let a = p.decode_with(&l, SolveStrategy::ExactBland).unwrap();
        let b = p.decode_with(&l, SolveStrategy::FloatGuided).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.optimal_value, b.optimal_value);
    }

    #[test]
    fn vertices_are_closed_under_codeword_symmetry(c in proptest::collection::vec(-8i64..8, 7), word in 0usize..16) {
        let h = hamming_7_4();
        let p = hamming_polytope();
        let objective: Vec<Rational> = c.into_iter().map(int).collect();
        let x = p.minimize(&objective, SolveStrategy::default()).unwrap().point;
        prop_assert!(p.contains(&x));
        let codeword = &h.codewords().unwrap()[word];
        let flipped: Vec<Rational> = x
            .iter()
            .zip(codeword.to_bits())
            .map(|(v, b)| if b == 1 { int(1) - v } else { v.clone() })
            .collect();
        prop_assert!(p.contains(&flipped));
    }
}

#[test]
fn failure_points_are_certificates() {
    let mut rng = common::rng(17);
    for (name, h) in common::small_codes() {
        let p = FundamentalPolytope::from_graph(&h.tanner_graph()).unwrap();
        for _ in 0..30 {
            let l = common::random_llr(&mut rng, h.n());
            let out = p.decode(&l).unwrap();
            if out.status.is_success() {
                assert!(out.optimal_value.is_zero());
                assert!(out.witness_point.iter().all(Zero::is_zero));
            } else {
                let x = &out.witness_point;
                assert!(p.contains(x), "{name}");
                assert!(x.iter().any(|v| !v.is_zero()), "{name}");
                let cost: Rational = l.iter().zip(x).map(|(a, b)| a * b).sum();
                assert_eq!(cost, out.optimal_value, "{name}");
                assert!(!cost.is_positive());
            }
        }
    }
}

#[test]
fn exhaustive_oracle_agrees_with_monte_carlo() {
    // Single check over BSC(0.1): only the error-free output succeeds.
    let bsc = MsbChannel::bsc(&ratio(1, 10)).unwrap();
    let g = common::single_check().tanner_graph();
    let exact = common::exact_success_probability(&bsc, &g, &int(0));
    assert_eq!(exact, ratio(729, 1000));

    // Three-symbol channel on a repetition code.
    let ch = common::ternary_channel();
    let g = common::repetition(4).tanner_graph();
    let exact = to_f64(&common::exact_success_probability(&ch, &g, &int(0)));
    let est = estimate_success(&ch, &g, 0.0, 4000, 21).unwrap();
    assert!(est.contains(exact), "{exact} vs {est:?}");

    let exact_eps = to_f64(&common::exact_success_probability(&ch, &g, &ratio(1, 2)));
    let est = estimate_success(&ch, &g, 0.5, 4000, 21).unwrap();
    assert!(est.contains(exact_eps), "{exact_eps} vs {est:?}");
    assert!(exact_eps <= exact);
}

#[test]
fn zero_capacity_channel_never_succeeds() {
    let ch = MsbChannel::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)],
        vec![0, 2, 1],
    )
    .unwrap();
    let est = estimate_success(&ch, &hamming_7_4().tanner_graph(), 0.0, 200, 1).unwrap();
    assert_eq!(est.successes, 0);
}
