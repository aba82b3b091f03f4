mod common;

use lpexcess::excess_lab::{
    awgn_coupling_check, awgn_csv, estimate_success, estimates_csv, excess_curve, markov_bound_check,
    redundancy_csv, redundancy_experiment, MarkovVerdict,
};
use lpexcess::linear_code::hamming_7_4;
use lpexcess::rational::ratio;
use lpexcess::{ExperimentConfig, MsbChannel, ParityCheckMatrix};

#[test]
fn curves_are_monotone_on_a_small_ldpc_code() {
    let g = ParityCheckMatrix::random_regular(24, 3, 6, 2).unwrap().tanner_graph();
    let ch = MsbChannel::bsc(&ratio(1, 20)).unwrap();
    let grid = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
    let curve = excess_curve(&ch, &g, &grid, 120, 3).unwrap();
    assert_eq!(curve.monotonicity_violations, 0);
    assert!(curve.is_non_increasing());
    assert_eq!(curve.points[0], estimate_success(&ch, &g, 0.0, 120, 3).unwrap());
    // Past the largest LLR every shifted vector is negative.
    assert_eq!(curve.points[5].successes, 0);
}

#[test]
fn markov_bound_on_bsc() {
    let ch = MsbChannel::bsc(&ratio(1, 10)).unwrap();
    let r = markov_bound_check(&ch, &ratio(1, 10), &hamming_7_4().tanner_graph(), 300, 1).unwrap();
    assert!((r.rhs_factor - 40.0).abs() < 1e-9);
    assert!((r.rhs_hat - 40.0 * r.rhs_failures.p_hat).abs() < 1e-12);
    assert_eq!(r.verdict, MarkovVerdict::Holds);
    assert!(r.certificate.epsilon > 0.057 && r.certificate.epsilon < 0.058);
}

#[test]
fn awgn_coupling_on_hamming() {
    let r = awgn_coupling_check(0.5, 0.6, &hamming_7_4().tanner_graph(), 200, 5).unwrap();
    assert_eq!(r.mismatches, 0);
    assert!(r.max_identity_error <= 1e-12);
    assert!(r.success_rate() > 0.5);
    // sigma' -> sigma leaves both sides identical.
    let r = awgn_coupling_check(0.5, 0.5 + 1e-12, &hamming_7_4().tanner_graph(), 50, 5).unwrap();
    assert!(r.epsilon < 1e-11);
    assert_eq!(r.mismatches, 0);
}

#[test]
fn redundancy_experiment_on_hamming() {
    let ch = MsbChannel::bsc(&ratio(1, 10)).unwrap();
    let g = hamming_7_4().tanner_graph();
    let r = redundancy_experiment(&ch, &g, 4, 0.5, 200, 8).unwrap();
    assert_eq!(r.implication_violations, 0);
    assert!(r.full_excess_successes <= r.restricted_successes);
    // Negative control: no excess. Reported, not asserted.
    let control = redundancy_experiment(&ch, &g, 4, 0.0, 200, 8).unwrap();
    assert_eq!(control.trials, 200);

    let ext = common::extended_hamming().tanner_graph();
    let r = redundancy_experiment(&ch, &ext, 4, 0.5, 200, 8).unwrap();
    assert_eq!((r.checks_full, r.checks_k), (15, 14));
    assert_eq!(r.implication_violations, 0);
}

#[test]
fn same_seed_same_bytes() {
    let ch = common::ternary_channel();
    let g = common::repetition(5).tanner_graph();
    let run = |seed| {
        let curve = excess_curve(&ch, &g, &[0.0, 0.5, 1.0], 300, seed).unwrap();
        let mut out = estimates_csv(&curve.eps, &curve.points);
        out += &awgn_csv(&awgn_coupling_check(0.5, 0.6, &g, 50, seed).unwrap());
        out += &redundancy_csv(&redundancy_experiment(&ch, &g, 2, 0.25, 50, seed).unwrap());
        out
    };
    assert_eq!(run(4), run(4));
    assert_ne!(run(4), run(5));
}

#[test]
fn config_drives_experiments() {
    let dir = std::env::temp_dir().join(format!("lpexcess-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("code.alist"), hamming_7_4().to_alist()).unwrap();
    std::fs::write(dir.join("exp.cfg"), "channel = bsc:0.1\nalist = code.alist\ntrials = 50\nseed = 2\n").unwrap();
    let cfg = ExperimentConfig::load(&dir.join("exp.cfg")).unwrap();
    let g = cfg.load_code().unwrap().tanner_graph();
    let est = estimate_success(&cfg.load_channel().unwrap(), &g, cfg.eps, cfg.trials, cfg.seed).unwrap();
    assert_eq!(est.trials, 50);
    std::fs::remove_dir_all(&dir).unwrap();
}
