//! Monte Carlo experiments on LP decoding with excess.
//!
//! Every trial draws from its own ChaCha stream, seeded from the master seed,
//! a stream tag and the trial index, so results do not depend on thread
//! scheduling and related experiments can share or separate their samples
//! on purpose.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{DistortionCertificate, MsbChannel};
use crate::error::{Error, Result};
use crate::linear_code::TannerGraph;
use crate::polytope::FundamentalPolytope;
use crate::rational::{to_grid, Rational};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// Two-sided 99.9% normal quantile, used for the second Markov tier.
pub const Z_999: f64 = 3.290526731491926;

/// Shift applied on either side of an AWGN sample to detect decision
/// boundaries.
pub const AWGN_BOUNDARY_SHIFT: f64 = 1.0 / (1u64 << 30) as f64;

/// Stream tags. Excess curves reuse `SIMULATE`, which is what makes them
/// common-random-number experiments and `{0}` curves equal to
/// `estimate_success`.
pub mod stream {
    pub const SIMULATE: u64 = 0x51;
    pub const MARKOV_LHS: u64 = 0x4d4c;
    pub const MARKOV_RHS: u64 = 0x4d52;
    pub const AWGN: u64 = 0x4157;
    pub const REDUNDANCY: u64 = 0x5244;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream).wrapping_add(trial))
}

pub fn trial_rng(master: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, trial))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessEstimate {
    pub trials: usize,
    pub successes: usize,
    pub p_hat: f64,
    /// Half-width of the 95% Wilson interval.
    pub ci_halfwidth: f64,
}

impl SuccessEstimate {
    pub fn from_counts(successes: usize, trials: usize) -> Self {
        assert!(trials > 0 && successes <= trials);
        let p_hat = successes as f64 / trials as f64;
        let (lo, hi) = wilson_interval(successes, trials, Z_95);
        SuccessEstimate { trials, successes, p_hat, ci_halfwidth: (hi - lo) / 2.0 }
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, Z_95)
    }

    pub fn contains(&self, p: f64) -> bool {
        let (lo, hi) = self.interval();
        lo <= p && p <= hi
    }

    pub fn failures(&self) -> SuccessEstimate {
        SuccessEstimate::from_counts(self.trials - self.successes, self.trials)
    }
}

pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

fn excess_to_grid(eps: f64) -> Result<Rational> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!("excess must be finite and >= 0, got {eps}")));
    }
    Ok(to_grid(eps))
}

/// Runs `f` on every trial in parallel; results come back in trial order.
fn run_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(f).collect()
}

fn sample_llr(ch: &MsbChannel, n: usize, master: u64, tag: u64, trial: u64) -> Vec<Rational> {
    let mut rng = trial_rng(master, tag, trial);
    ch.exact_llr_of(&ch.sample_symbols(n, &mut rng))
}

fn estimate_on_stream(
    ch: &MsbChannel,
    polytope: &FundamentalPolytope,
    eps: &Rational,
    trials: usize,
    seed: u64,
    tag: u64,
) -> Result<SuccessEstimate> {
    check_trials(trials)?;
    let n = polytope.n();
    let outcomes = run_trials(trials, |t| {
        let l = sample_llr(ch, n, seed, tag, t);
        Ok(polytope.decode_with_excess(&l, eps)?.status.is_success())
    })?;
    Ok(SuccessEstimate::from_counts(outcomes.iter().filter(|&&s| s).count(), trials))
}

/// Fraction of all-zero transmissions the LP decoder recovers with excess
/// `eps`.
pub fn estimate_success(
    ch: &MsbChannel,
    graph: &TannerGraph,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<SuccessEstimate> {
    let polytope = FundamentalPolytope::from_graph(graph)?;
    estimate_on_stream(ch, &polytope, &excess_to_grid(eps)?, trials, seed, stream::SIMULATE)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcessCurve {
    pub eps: Vec<f64>,
    pub points: Vec<SuccessEstimate>,
    /// Trials whose success indicator went from failure back to success as
    /// `eps` grew. Always zero unless something is broken.
    pub monotonicity_violations: usize,
}

impl ExcessCurve {
    pub fn is_non_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].successes <= w[0].successes)
    }
}

/// Success probability along a sorted grid of excesses, reusing each
/// trial's LLR vector at every grid point.
pub fn excess_curve(
    ch: &MsbChannel,
    graph: &TannerGraph,
    eps_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ExcessCurve> {
    check_trials(trials)?;
    if eps_grid.is_empty() {
        return Err(Error::InvalidParameter("empty excess grid".into()));
    }
    if eps_grid.windows(2).any(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o.is_gt())) {
        return Err(Error::InvalidParameter("excess grid must be sorted ascending".into()));
    }
    let grid: Vec<Rational> = eps_grid.iter().map(|&e| excess_to_grid(e)).collect::<Result<_>>()?;
    let polytope = FundamentalPolytope::from_graph(graph)?;
    let n = polytope.n();
    let rows = run_trials(trials, |t| {
        let l = sample_llr(ch, n, seed, stream::SIMULATE, t);
        grid.iter()
            .map(|e| Ok(polytope.decode_with_excess(&l, e)?.status.is_success()))
            .collect::<Result<Vec<bool>>>()
    })?;
    let points = (0..grid.len())
        .map(|g| SuccessEstimate::from_counts(rows.iter().filter(|r| r[g]).count(), trials))
        .collect();
    let monotonicity_violations =
        rows.iter().filter(|r| r.windows(2).any(|w| !w[0] && w[1])).count();
    Ok(ExcessCurve { eps: eps_grid.to_vec(), points, monotonicity_violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovVerdict {
    /// `lhs - ci <= rhs + factor * ci'` at 95%.
    Holds,
    /// Fails at 95% but holds with 99.9% intervals.
    ViolatedWithinCi,
    Violated,
}

impl MarkovVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            MarkovVerdict::Holds => "holds",
            MarkovVerdict::ViolatedWithinCi => "violated-within-ci",
            MarkovVerdict::Violated => "violated",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MarkovBoundReport {
    pub certificate: DistortionCertificate,
    /// Failure rate on the original channel with excess `epsilon`.
    pub lhs: SuccessEstimate,
    pub lhs_hat: f64,
    /// Failure rate on the distorted channel without excess.
    pub rhs_failures: SuccessEstimate,
    pub rhs_factor: f64,
    pub rhs_hat: f64,
    pub verdict: MarkovVerdict,
}

fn markov_verdict(lhs: &SuccessEstimate, rhs: &SuccessEstimate, factor: f64) -> MarkovVerdict {
    let tier = |z: f64| {
        let (lhs_lo, _) = wilson_interval(lhs.successes, lhs.trials, z);
        let (_, rhs_hi) = wilson_interval(rhs.successes, rhs.trials, z);
        let lhs_ci = (lhs.p_hat - lhs_lo).max(0.0);
        let rhs_ci = (rhs_hi - rhs.p_hat).max(0.0);
        lhs.p_hat - lhs_ci <= factor * rhs.p_hat + factor * rhs_ci
    };
    if tier(Z_95) {
        MarkovVerdict::Holds
    } else if tier(Z_999) {
        MarkovVerdict::ViolatedWithinCi
    } else {
        MarkovVerdict::Violated
    }
}

/// Compares the failure rate at excess `epsilon` on `ch` with the scaled
/// failure rate of the `alpha`-distorted channel, on independent samples.
pub fn markov_bound_check(
    ch: &MsbChannel,
    alpha: &Rational,
    graph: &TannerGraph,
    trials: usize,
    seed: u64,
) -> Result<MarkovBoundReport> {
    check_trials(trials)?;
    let certificate = ch.distort(alpha)?;
    let polytope = FundamentalPolytope::from_graph(graph)?;
    let eps = excess_to_grid(certificate.epsilon)?;
    let lhs = estimate_on_stream(ch, &polytope, &eps, trials, seed, stream::MARKOV_LHS)?.failures();
    let rhs_failures = estimate_on_stream(
        &certificate.distorted,
        &polytope,
        &excess_to_grid(0.0)?,
        trials,
        seed,
        stream::MARKOV_RHS,
    )?
    .failures();
    let rhs_factor = certificate.markov_factor(ch.llr_bound());
    let verdict = markov_verdict(&lhs, &rhs_failures, rhs_factor);
    Ok(MarkovBoundReport {
        lhs_hat: lhs.p_hat,
        rhs_hat: rhs_factor * rhs_failures.p_hat,
        certificate,
        lhs,
        rhs_failures,
        rhs_factor,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AwgnCouplingReport {
    pub sigma: f64,
    pub sigma2: f64,
    /// `(sigma2 - sigma) / sigma2`.
    pub epsilon: f64,
    pub trials: usize,
    /// Largest `|(sigma / sigma2) y'_i - (y_i - epsilon)|` seen.
    pub max_identity_error: f64,
    /// Trials whose reference vector `y - epsilon` sits within
    /// `AWGN_BOUNDARY_SHIFT` of a decision boundary.
    pub boundary_trials: usize,
    /// Status disagreements among the other trials.
    pub mismatches: usize,
    pub boundary_mismatches: usize,
    /// Successes of the `y'` decoder over all trials.
    pub successes: usize,
}

impl AwgnCouplingReport {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Couples `y' = 1 + sigma2 z` with `y = 1 + sigma z` and checks that
/// decoding `y'` and `y - epsilon` agree. Decoding is scale invariant, so
/// the received values are fed to the decoder directly.
pub fn awgn_coupling_check(
    sigma: f64,
    sigma2: f64,
    graph: &TannerGraph,
    trials: usize,
    seed: u64,
) -> Result<AwgnCouplingReport> {
    check_trials(trials)?;
    if !(sigma.is_finite() && sigma > 0.0 && sigma2.is_finite() && sigma < sigma2) {
        return Err(Error::InvalidParameter(format!("need 0 < sigma < sigma2, got {sigma}, {sigma2}")));
    }
    let polytope = FundamentalPolytope::from_graph(graph)?;
    let n = polytope.n();
    let epsilon = (sigma2 - sigma) / sigma2;
    let eta = to_grid(AWGN_BOUNDARY_SHIFT);

    struct Trial {
        identity_error: f64,
        boundary: bool,
        agree: bool,
        success: bool,
    }
    let results = run_trials(trials, |t| {
        let mut rng = trial_rng(seed, stream::AWGN, t);
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y2: Vec<f64> = z.iter().map(|z| 1.0 + sigma2 * z).collect();
        let shifted: Vec<f64> = z.iter().map(|z| 1.0 + sigma * z - epsilon).collect();
        let identity_error = y2
            .iter()
            .zip(&shifted)
            .map(|(a, b)| (sigma / sigma2 * a - b).abs())
            .fold(0.0, f64::max);

        let lhs: Vec<Rational> = y2.iter().map(|&v| to_grid(v)).collect();
        let reference: Vec<Rational> = shifted.iter().map(|&v| to_grid(v)).collect();
        let success = polytope.decode(&lhs)?.status.is_success();
        let reference_success = polytope.decode(&reference)?.status.is_success();
        // The success region is a cone closed under adding positive vectors,
        // so one shift toward the other side decides whether the
        // reference sits on a boundary.
        let probe: Vec<Rational> = if reference_success {
            reference.iter().map(|v| v - &eta).collect()
        } else {
            reference.iter().map(|v| v + &eta).collect()
        };
        let boundary = polytope.decode(&probe)?.status.is_success() != reference_success;
        Ok(Trial { identity_error, boundary, agree: success == reference_success, success })
    })?;

    let mut report = AwgnCouplingReport {
        sigma,
        sigma2,
        epsilon,
        trials,
        max_identity_error: 0.0,
        boundary_trials: 0,
        mismatches: 0,
        boundary_mismatches: 0,
        successes: 0,
    };
    for r in &results {
        report.max_identity_error = report.max_identity_error.max(r.identity_error);
        report.successes += r.success as usize;
        if r.boundary {
            report.boundary_trials += 1;
            report.boundary_mismatches += !r.agree as usize;
        } else {
            report.mismatches += !r.agree as usize;
        }
    }
    Ok(report)
}

/// `max(d, ceil(2 ||L||_inf / (eps delta)) + 1)`, the check degree needed
/// for redundant checks to carry an excess-`eps` success over to a plain
/// decoder on a graph family of strength `delta`.
pub fn application_k(d: usize, eps: f64, llr_inf: f64, delta_strength: f64) -> Result<usize> {
    for (name, v) in [("eps", eps), ("llr_inf", llr_inf), ("delta_strength", delta_strength)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let raw = (2.0 * llr_inf / (eps * delta_strength)).ceil();
    if raw >= usize::MAX as f64 {
        return Err(Error::InvalidParameter("k overflows".into()));
    }
    Ok(d.max(raw as usize + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyReport {
    pub k: usize,
    pub eps: f64,
    pub trials: usize,
    pub checks_full: usize,
    pub checks_k: usize,
    /// Trials where the all-redundant decoder succeeds on `l - eps`.
    pub full_excess_successes: usize,
    /// Trials where the degree-`k` redundant decoder succeeds on `l`.
    pub restricted_successes: usize,
    /// Trials with the first success but not the second.
    pub implication_violations: usize,
}

/// Checks, per trial, that excess-`eps` success with every redundant check
/// carries over to plain success with the redundant checks of degree `<= k`.
pub fn redundancy_experiment(
    ch: &MsbChannel,
    graph: &TannerGraph,
    k: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<RedundancyReport> {
    check_trials(trials)?;
    let h = graph.parity_check_matrix();
    let full = h.full_redundant_graph()?;
    let restricted = h.redundant_graph(k)?;
    let p_full = FundamentalPolytope::from_graph(&full)?;
    let p_k = FundamentalPolytope::from_graph(&restricted)?;
    let e = excess_to_grid(eps)?;
    let n = graph.n();
    let pairs = run_trials(trials, |t| {
        let l = sample_llr(ch, n, seed, stream::REDUNDANCY, t);
        let a = p_full.decode_with_excess(&l, &e)?.status.is_success();
        let b = p_k.decode(&l)?.status.is_success();
        Ok((a, b))
    })?;
    Ok(RedundancyReport {
        k,
        eps,
        trials,
        checks_full: full.num_checks(),
        checks_k: restricted.num_checks(),
        full_excess_successes: pairs.iter().filter(|p| p.0).count(),
        restricted_successes: pairs.iter().filter(|p| p.1).count(),
        implication_violations: pairs.iter().filter(|p| p.0 && !p.1).count(),
    })
}

pub const ESTIMATE_CSV_HEADER: &str = "eps,trials,successes,p_hat,ci_halfwidth,ci_low,ci_high";
pub const MARKOV_CSV_HEADER: &str = "delta,c,s,epsilon,rhs_factor,trials,lhs_failures,lhs_hat,lhs_ci,rhs_failures,rhs_fail_hat,rhs_ci,rhs_hat,verdict";
pub const AWGN_CSV_HEADER: &str = "sigma,sigma2,epsilon,trials,max_identity_error,boundary_trials,mismatches,boundary_mismatches,successes,success_rate";
pub const REDUNDANCY_CSV_HEADER: &str = "k,eps,trials,checks_full,checks_k,full_excess_successes,restricted_successes,implication_violations";

pub fn estimates_csv(eps: &[f64], points: &[SuccessEstimate]) -> String {
    let mut out = format!("{ESTIMATE_CSV_HEADER}\n");
    for (e, p) in eps.iter().zip(points) {
        let (lo, hi) = p.interval();
        writeln!(out, "{e},{},{},{},{},{lo},{hi}", p.trials, p.successes, p.p_hat, p.ci_halfwidth).unwrap();
    }
    out
}

pub fn markov_csv(r: &MarkovBoundReport) -> String {
    let c = &r.certificate;
    format!(
        "{MARKOV_CSV_HEADER}\n{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        crate::rational::to_f64(&c.delta),
        c.c,
        c.s,
        c.epsilon,
        r.rhs_factor,
        r.lhs.trials,
        r.lhs.successes,
        r.lhs_hat,
        r.lhs.ci_halfwidth,
        r.rhs_failures.successes,
        r.rhs_failures.p_hat,
        r.rhs_failures.ci_halfwidth,
        r.rhs_hat,
        r.verdict.as_str()
    )
}

pub fn awgn_csv(r: &AwgnCouplingReport) -> String {
    format!(
        "{AWGN_CSV_HEADER}\n{},{},{},{},{:e},{},{},{},{},{}\n",
        r.sigma,
        r.sigma2,
        r.epsilon,
        r.trials,
        r.max_identity_error,
        r.boundary_trials,
        r.mismatches,
        r.boundary_mismatches,
        r.successes,
        r.success_rate()
    )
}

pub fn redundancy_csv(r: &RedundancyReport) -> String {
    format!(
        "{REDUNDANCY_CSV_HEADER}\n{},{},{},{},{},{},{},{}\n",
        r.k,
        r.eps,
        r.trials,
        r.checks_full,
        r.checks_k,
        r.full_excess_successes,
        r.restricted_successes,
        r.implication_violations
    )
}
