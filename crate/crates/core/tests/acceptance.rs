//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lpexcess::excess_lab::{
    application_k, awgn_coupling_check, awgn_csv, estimate_success, estimates_csv, excess_curve,
    markov_bound_check, markov_csv, redundancy_csv, redundancy_experiment, MarkovVerdict,
};
use lpexcess::linear_code::hamming_7_4;
use lpexcess::rational::{int, ratio, to_f64, to_grid};
use lpexcess::witness::{find_witness, trim};
use lpexcess::{FundamentalPolytope, MsbChannel, ParityCheckMatrix, Rational};
use num_traits::{One, Signed};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ldpc60() -> ParityCheckMatrix {
    ParityCheckMatrix::random_regular(60, 3, 6, 1).unwrap()
}

fn ac1_distortion_certificates() -> Outcome {
    let mut rng = common::rng(101);
    for trial in 0..100 {
        let ch = common::random_channel(&mut rng, 20);
        let alpha = ratio(rng.random_range(1..=50), 100);
        let cert = ch.distort(&alpha).map_err(|e| format!("channel {trial}: {e}"))?;
        let part = ch.sigma_partition();
        let total: Rational = cert.q.iter().sum();
        ensure(total.is_one(), || format!("channel {trial}: sum q = {total}"))?;
        for a in 0..ch.alphabet_size() {
            ensure(cert.q[a].is_positive() == part.minus.contains(&a), || {
                format!("channel {trial}: q({a}) = {} outside its class", cert.q[a])
            })?;
        }
        ensure(cert.l1 <= alpha, || format!("channel {trial}: l1 {} > alpha {alpha}", cert.l1))?;
        let err = cert.max_scaling_error(&ch);
        ensure(err <= 1e-10 * ch.llr_bound().max(1.0), || format!("channel {trial}: scaling error {err:e}"))?;
        let target = to_f64(&(&cert.delta / (Rational::one() - &cert.delta)));
        let residual = (ch.s_of_c(cert.c) - target).abs();
        ensure(residual <= 1e-12, || format!("channel {trial}: root residual {residual:e}"))?;
    }
    Ok("100 channels".into())
}

fn ac2_bsc_closed_form() -> Outcome {
    let beta = ratio(1, 10);
    let ch = MsbChannel::bsc(&beta).unwrap();
    let cert = ch.distort(&ratio(1, 10)).map_err(|e| e.to_string())?;
    ensure(cert.delta == ratio(1, 20), || format!("delta = {}", cert.delta))?;
    let beta_prime = &cert.distorted.probabilities()[1];
    ensure(*beta_prime == ratio(145, 1000), || format!("beta' = {beta_prime}"))?;
    // For a BSC the distorted channel is a BSC too, so c is the ratio of
    // the two LLR magnitudes.
    let bp = to_f64(beta_prime);
    let c_closed = ((1.0 - bp) / bp).ln() / 9f64.ln();
    ensure((cert.c - c_closed).abs() < 1e-6, || format!("c = {} vs closed form {c_closed}", cert.c))?;
    let eps_closed = 0.05 * 9f64.ln() / (2.0 * 0.95);
    ensure((cert.epsilon - eps_closed).abs() < 1e-9, || format!("eps = {}", cert.epsilon))?;
    ensure((cert.epsilon - 0.057822).abs() < 1e-6, || format!("eps = {}", cert.epsilon))?;
    let factor = cert.markov_factor(ch.llr_bound());
    ensure((factor - 40.0).abs() < 1e-9, || format!("factor = {factor}"))?;
    Ok(format!("c = {:.7}, eps = {:.7}, factor = {factor:.9}", cert.c, cert.epsilon))
}

fn ac3_decoder_oracle() -> Outcome {
    let mut rng = common::rng(103);
    let mut codes = common::small_codes();
    codes.push(("hamming-punctured-0", common::punctured(&hamming_7_4(), 0)));
    let mut successes = 0;
    let mut total = 0;
    for (name, h) in &codes {
        let p = FundamentalPolytope::from_graph(&h.tanner_graph()).unwrap();
        let words = h.codewords().unwrap();
        for _ in 0..200 {
            let l = common::random_llr(&mut rng, h.n());
            let status = p.decode(&l).unwrap().status;
            let lambda = common::random_rational(&mut rng, 1, 9);
            let scaled: Vec<Rational> = l.iter().map(|v| v * &lambda).collect();
            ensure(p.decode(&scaled).unwrap().status == status, || format!("{name}: scaling changed status"))?;
            let bumped: Vec<Rational> =
                l.iter().map(|v| v + common::random_rational(&mut rng, 0, 2)).collect();
            if status.is_success() {
                successes += 1;
                ensure(p.decode(&bumped).unwrap().status.is_success(), || {
                    format!("{name}: adding a nonnegative vector broke success")
                })?;
                for w in words.iter().filter(|w| !w.is_zero()) {
                    ensure(common::dot(&l, &w.to_bits()).is_positive(), || {
                        format!("{name}: success but codeword {:?} is not worse", w.to_bits())
                    })?;
                }
            }
            total += 1;
        }
    }
    Ok(format!("{} codes, {total} vectors, {successes} successes", codes.len()))
}

fn ac4_exhaustive_probability() -> Outcome {
    let ch = MsbChannel::bsc(&ratio(1, 10)).unwrap();
    let g = common::single_check().tanner_graph();
    let exact = common::exact_success_probability(&ch, &g, &int(0));
    ensure(exact == ratio(729, 1000), || format!("exact = {exact}"))?;
    let est = estimate_success(&ch, &g, 0.0, 100_000, 104).map_err(|e| e.to_string())?;
    let (lo, hi) = est.interval();
    ensure(est.contains(0.729), || format!("p_hat {} CI [{lo}, {hi}] misses 0.729", est.p_hat))?;
    Ok(format!("p_hat = {:.5}, CI [{lo:.5}, {hi:.5}], exact 0.729", est.p_hat))
}

fn ac5_excess_curve() -> Outcome {
    let g = ldpc60().tanner_graph();
    let ch = MsbChannel::bsc(&ratio(2, 100)).unwrap();
    let grid = [0.0, 0.5, 1.0, 2.0, 3.0, 4.0];
    let curve = excess_curve(&ch, &g, &grid, 200, 105).map_err(|e| e.to_string())?;
    ensure(curve.monotonicity_violations == 0, || format!("{} violations", curve.monotonicity_violations))?;
    ensure(curve.is_non_increasing(), || "curve increases".into())?;
    let counts: Vec<String> = curve.points.iter().map(|p| p.successes.to_string()).collect();
    Ok(format!("successes per grid point: {}", counts.join(" ")))
}

fn ac6_markov_bound() -> Outcome {
    let g = ldpc60().tanner_graph();
    let ch = MsbChannel::bsc(&ratio(2, 100)).unwrap();
    let r = markov_bound_check(&ch, &ratio(5, 100), &g, 400, 106).map_err(|e| e.to_string())?;
    ensure(r.verdict == MarkovVerdict::Holds, || format!("verdict {}", r.verdict.as_str()))?;
    Ok(format!(
        "lhs {:.4} <= rhs {:.4} (factor {:.1}), {}",
        r.lhs_hat,
        r.rhs_hat,
        r.rhs_factor,
        r.verdict.as_str()
    ))
}

fn ac7_witness_equivalence() -> Outcome {
    let mut rng = common::rng(107);
    let mut checked = 0;
    for (name, h) in common::small_codes() {
        let g = h.tanner_graph();
        let p = FundamentalPolytope::from_graph(&g).unwrap();
        for _ in 0..100 {
            let l = common::random_llr(&mut rng, h.n());
            let success = p.decode(&l).unwrap().status.is_success();
            let found = find_witness(&g, &l).unwrap();
            ensure(found.is_some() == success, || format!("{name}: witness/decoder mismatch on {l:?}"))?;
            if let Some((w, t)) = found {
                ensure(t.is_positive() && w.verify(&l), || format!("{name}: witness does not verify"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} vectors, 0 mismatches"))
}

fn ac8_trim_bound() -> Outcome {
    let h = hamming_7_4();
    let full = h.full_redundant_graph().unwrap();
    let d = h.tanner_graph().max_check_degree();
    let ch = MsbChannel::bsc(&ratio(1, 10)).unwrap();
    let inf = to_grid(ch.llr_bound());
    let eps = ratio(1, 2);
    let p = FundamentalPolytope::from_graph(&full).unwrap();
    let mut rng = common::rng(108);
    let (mut runs, mut flagged) = (0, 0);
    for _ in 0..10_000 {
        if runs == 100 {
            break;
        }
        let l = ch.exact_llr_of(&ch.sample_symbols(7, &mut rng));
        if !p.decode_with_excess(&l, &eps).unwrap().status.is_success() {
            continue;
        }
        let shifted: Vec<Rational> = l.iter().map(|v| v - &eps).collect();
        let (w, _) = find_witness(&full, &shifted).unwrap().ok_or("decoder succeeded but no witness")?;
        let (_, report) = trim(&w, d, 4, &eps, &inf).map_err(|e| e.to_string())?;
        let holds = report.risky_set.len() as f64 <= report.bound_rhs;
        ensure(holds == report.within_bound, || "report verdict disagrees with its numbers".into())?;
        flagged += report.flagged() as usize;
        runs += 1;
    }
    ensure(runs == 100, || format!("only {runs} successful trials"))?;
    ensure(flagged == 0, || format!("flagged fraction {}/100", flagged))?;
    Ok(format!("{runs} runs, flagged fraction 0/{runs}"))
}

fn ac9_awgn_coupling() -> Outcome {
    let mut parts = vec![];
    for (name, h) in [("single-check", common::single_check()), ("hamming-7-4", hamming_7_4())] {
        let r = awgn_coupling_check(0.5, 0.6, &h.tanner_graph(), 500, 109).map_err(|e| e.to_string())?;
        ensure(r.max_identity_error <= 1e-12, || format!("{name}: identity error {:e}", r.max_identity_error))?;
        ensure(r.mismatches == 0, || format!("{name}: {} mismatches", r.mismatches))?;
        ensure(r.boundary_trials * 50 <= r.trials, || format!("{name}: {} boundary trials", r.boundary_trials))?;
        parts.push(format!(
            "{name}: success {:.3}, boundary {}, max identity error {:.1e}",
            r.success_rate(),
            r.boundary_trials,
            r.max_identity_error
        ));
    }
    Ok(parts.join("; "))
}

fn ac10_k_formula() -> Outcome {
    let k = application_k(6, 0.057822, 2.197225, 0.1).map_err(|e| e.to_string())?;
    ensure(k == 761, || format!("k = {k}"))?;
    let k = application_k(6, 0.057822, 2.197225, 1e6).map_err(|e| e.to_string())?;
    ensure(k == 6, || format!("k = {k} for huge strength"))?;
    Ok("761 and d".into())
}

fn ac11_reproducibility() -> Outcome {
    let ch = MsbChannel::bsc(&ratio(1, 10)).unwrap();
    let g = hamming_7_4().tanner_graph();
    let run = || -> lpexcess::Result<String> {
        let est = estimate_success(&ch, &g, 0.1, 500, 111)?;
        let curve = excess_curve(&ch, &g, &[0.0, 0.5, 1.0], 300, 111)?;
        let mut out = estimates_csv(&[0.1], &[est]);
        out += &estimates_csv(&curve.eps, &curve.points);
        out += &markov_csv(&markov_bound_check(&ch, &ratio(1, 10), &g, 200, 111)?);
        out += &awgn_csv(&awgn_coupling_check(0.5, 0.6, &g, 200, 111)?);
        out += &redundancy_csv(&redundancy_experiment(&ch, &g, 4, 0.5, 200, 111)?);
        Ok(out)
    };
    let a = run().map_err(|e| e.to_string())?;
    let b = run().map_err(|e| e.to_string())?;
    ensure(a == b, || "outputs differ".into())?;
    Ok(format!("{} identical bytes across two runs", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("AC1", "distortion certificates", Duration::from_secs(10), ac1_distortion_certificates),
        ("AC2", "BSC closed form", Duration::from_secs(10), ac2_bsc_closed_form),
        ("AC3", "LP decoder oracle equivalence", Duration::from_secs(120), ac3_decoder_oracle),
        ("AC4", "exhaustive success probability", Duration::from_secs(60), ac4_exhaustive_probability),
        ("AC5", "excess curve monotonicity", Duration::from_secs(900), ac5_excess_curve),
        ("AC6", "Markov bound", Duration::from_secs(1800), ac6_markov_bound),
        ("AC7", "witness iff LP success", Duration::from_secs(600), ac7_witness_equivalence),
        ("AC8", "trim bound", Duration::from_secs(600), ac8_trim_bound),
        ("AC9", "AWGN coupling", Duration::from_secs(600), ac9_awgn_coupling),
        ("AC10", "k formula", Duration::from_secs(1), ac10_k_formula),
        ("AC11", "reproducibility", Duration::from_secs(600), ac11_reproducibility),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("{id} {name}: PASS ({detail}) [{:.2}s]", elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("{id} {name}: FAIL ({detail}) [{:.2}s]", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

