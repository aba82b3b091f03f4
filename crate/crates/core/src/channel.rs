//! Discrete binary-input memoryless symmetric channels with bounded LLRs.
//!
//! A channel is a finite output alphabet, the output distribution `p` given
//! that 0 was sent, and a pairing involution `*` with `Pr(a|1) = p(a*)`.
//! This module also builds the distorted channel whose LLR map is a constant
//! multiple `c` of the original one, together with the certificate
//! `(delta, c, q, s, epsilon)` describing it.

use std::fmt::{self, Write as _};

use num_traits::{One, Signed, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rational::{from_f64_exact, parse_rational, to_f64, to_grid, Rational};

/// Absolute tolerance on `|s(c) - delta/(1-delta)|` accepted by [`MsbChannel::solve_c`].
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Iteration cap of the bisection in [`MsbChannel::solve_c`].
pub const ROOT_MAX_ITERATIONS: usize = 200;

/// A validated discrete MSB channel `(Σ, p, *)`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MsbChannel {
    labels: Vec<String>,
    p: Vec<Rational>,
    pairing: Vec<usize>,
    llr: Vec<f64>,
    llr_grid: Vec<Rational>,
    weights: Vec<f64>,
}

/// The split of the alphabet by LLR sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaPartition {
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
    pub plus: Vec<usize>,
}

/// One LLR per variable node.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector(pub Vec<f64>);

impl LlrVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Rounds every entry to the 2^-40 grid used by the exact decoder.
    pub fn to_exact(&self) -> Vec<Rational> {
        self.0.iter().map(|&x| to_grid(x)).collect()
    }

    pub fn shifted(&self, eps: f64) -> LlrVector {
        LlrVector(self.0.iter().map(|x| x - eps).collect())
    }
}

/// Everything produced by the distortion construction.
#[derive(Debug, Clone)]
pub struct DistortionCertificate {
    pub delta: Rational,
    pub c: f64,
    /// Mixing distribution, indexed by symbol; zero outside `Σ-`.
    pub q: Vec<Rational>,
    /// `s = -E_{Z~q}[L(Z)]`.
    pub s: f64,
    pub epsilon: f64,
    pub distorted: MsbChannel,
    /// Exact `||p - p'||_1`.
    pub l1: Rational,
}

impl DistortionCertificate {
    /// `2 ||L||_inf / (delta s)`, the factor in front of the distorted
    /// channel's failure probability in the excess bound.
    pub fn markov_factor(&self, llr_bound: f64) -> f64 {
        2.0 * llr_bound / (to_f64(&self.delta) * self.s)
    }

    /// Largest `|L'(a) - c L(a)|` over the alphabet.
    pub fn max_scaling_error(&self, original: &MsbChannel) -> f64 {
        (0..original.alphabet_size())
            .map(|a| (self.distorted.llr(a) - self.c * original.llr(a)).abs())
            .fold(0.0, f64::max)
    }
}

impl MsbChannel {
    /// Validates `(labels, p, pairing)`. All checks run in exact arithmetic.
    pub fn new(labels: Vec<String>, p: Vec<Rational>, pairing: Vec<usize>) -> Result<Self> {
        let size = labels.len();
        if size < 2 || p.len() != size || pairing.len() != size {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 symbols and equal-length lists (labels {}, p {}, pairing {})",
                labels.len(),
                p.len(),
                pairing.len()
            )));
        }
        for (a, &b) in pairing.iter().enumerate() {
            if b >= size || pairing[b] != a {
                return Err(Error::NonInvolutivePairing(a));
            }
        }
        for (a, pa) in p.iter().enumerate() {
            if pa.is_negative() {
                return Err(Error::InvalidParameter(format!("negative probability at symbol {a}")));
            }
            if pa.is_zero() {
                return Err(Error::ZeroProbabilitySymbol(a));
            }
        }
        let total: Rational = p.iter().sum();
        if !total.is_one() {
            return Err(Error::ProbabilitiesDoNotSumToOne(total.to_string()));
        }

        let mut llr = vec![0.0; size];
        for a in 0..size {
            let b = pairing[a];
            if a < b {
                let value = to_f64(&(&p[a] / &p[b])).ln();
                llr[a] = value;
                llr[b] = -value;
            }
        }
        let llr_grid = llr.iter().map(|&x| to_grid(x)).collect();
        let weights = p.iter().map(to_f64).collect();
        Ok(MsbChannel { labels, p, pairing, llr, llr_grid, weights })
    }

    /// The beta-BSC: symbol "0" with probability 1-beta, "1" with beta.
    pub fn bsc(beta: &Rational) -> Result<Self> {
        let half = Rational::new(1.into(), 2.into());
        if !beta.is_positive() || beta >= &half {
            return Err(Error::InvalidParameter(format!("BSC crossover {beta} not in (0, 1/2)")));
        }
        MsbChannel::new(
            vec!["0".into(), "1".into()],
            vec![Rational::one() - beta, beta.clone()],
            vec![1, 0],
        )
    }

    /// Quantizes `Y = (-1)^x + sigma Z` into `2 * bins_per_side` bins mirrored
    /// around zero. Bins have width `clip / bins_per_side` on each side and the
    /// outermost bins absorb the tails. Each bin is paired with its mirror.
    ///
    /// Symbols are ordered from the most negative bin (`-B`) to the most
    /// positive one (`+B`).
    pub fn quantized_awgn(sigma: f64, bins_per_side: usize, clip: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if bins_per_side == 0 {
            return Err(Error::InvalidParameter("bins_per_side must be at least 1".into()));
        }
        if !(clip.is_finite() && (clip > 0.0 || (bins_per_side == 1 && clip == 0.0))) {
            return Err(Error::InvalidParameter(format!("clip must be positive, got {clip}")));
        }
        let normal = Normal::new(1.0, sigma).expect("valid normal");
        let mass = |lo: f64, hi: f64| -> f64 {
            // Upper-tail form for bins above the mean keeps tail masses accurate.
            if lo >= 1.0 {
                normal.sf(lo) - normal.sf(hi)
            } else {
                normal.cdf(hi) - normal.cdf(lo)
            }
        };
        let width = clip / bins_per_side as f64;
        let bins = bins_per_side;
        let mut masses = vec![0.0; 2 * bins];
        let mut labels = Vec::with_capacity(2 * bins);
        for (i, slot) in masses.iter_mut().enumerate() {
            let (lo, hi) = if i >= bins {
                let b = i - bins;
                let lo = b as f64 * width;
                let hi = if b + 1 == bins { f64::INFINITY } else { (b + 1) as f64 * width };
                labels.push(format!("+{}", b + 1));
                (lo, hi)
            } else {
                let b = bins - 1 - i;
                let hi = -(b as f64 * width);
                let lo = if b + 1 == bins { f64::NEG_INFINITY } else { -((b + 1) as f64 * width) };
                labels.push(format!("-{}", b + 1));
                (lo, hi)
            };
            *slot = mass(lo, hi);
        }
        if let Some(a) = masses.iter().position(|&m| m <= 0.0) {
            return Err(Error::ZeroProbabilitySymbol(a));
        }
        let mut p: Vec<Rational> = masses.iter().map(|&m| from_f64_exact(m)).collect();
        let total: Rational = p.iter().sum();
        for pa in &mut p {
            *pa /= &total;
        }
        let pairing = (0..2 * bins).map(|i| 2 * bins - 1 - i).collect();
        MsbChannel::new(labels, p, pairing)
    }

    pub fn alphabet_size(&self) -> usize {
        self.p.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.p
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn symbol_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `L(a) = ln(p(a) / p(a*))`.
    pub fn llr(&self, a: usize) -> f64 {
        self.llr[a]
    }

    pub fn llrs(&self) -> &[f64] {
        &self.llr
    }

    /// `L(a)` rounded to the exact decoding grid.
    pub fn llr_exact(&self, a: usize) -> &Rational {
        &self.llr_grid[a]
    }

    /// `||L||_inf`.
    pub fn llr_bound(&self) -> f64 {
        self.llr.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sigma_partition(&self) -> SigmaPartition {
        let mut part = SigmaPartition { minus: vec![], zero: vec![], plus: vec![] };
        for a in 0..self.alphabet_size() {
            let partner = &self.p[self.pairing[a]];
            match self.p[a].cmp(partner) {
                std::cmp::Ordering::Less => part.minus.push(a),
                std::cmp::Ordering::Equal => part.zero.push(a),
                std::cmp::Ordering::Greater => part.plus.push(a),
            }
        }
        part
    }

    /// `p(Σ+) - p(Σ-)`, exact.
    pub fn capacity_gap(&self) -> Rational {
        let part = self.sigma_partition();
        let plus: Rational = part.plus.iter().map(|&a| &self.p[a]).sum();
        let minus: Rational = part.minus.iter().map(|&a| &self.p[a]).sum();
        plus - minus
    }

    /// `s(c) = sum_{a in Σ-} p(a) [(p(a*)/p(a))^(1-c) - 1]`.
    pub fn s_of_c(&self, c: f64) -> f64 {
        self.sigma_partition()
            .minus
            .iter()
            .map(|&a| self.weights[a] * ((1.0 - c) * -self.llr[a]).exp_m1())
            .sum()
    }

    /// Finds `c` in (0, 1) with `s(c) = delta / (1 - delta)` by bisection.
    pub fn solve_c(&self, delta: &Rational) -> Result<f64> {
        if !delta.is_positive() || delta >= &Rational::one() {
            return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
        }
        if self.sigma_partition().minus.is_empty() {
            return Err(Error::ZeroCapacityChannel);
        }
        let target = delta / (Rational::one() - delta);
        if target >= self.capacity_gap() {
            return Err(Error::InfeasibleDelta(delta.to_string()));
        }
        let target = to_f64(&target);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut best = (f64::INFINITY, 0.5);
        for _ in 0..ROOT_MAX_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            let value = self.s_of_c(mid);
            let err = (value - target).abs();
            if err < best.0 {
                best = (err, mid);
            }
            if err <= ROOT_TOLERANCE || mid == lo || mid == hi {
                break;
            }
            if value > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(best.1)
    }

    /// Default distortion parameter: `min(alpha/2, g / (2(1+g)))` with
    /// `g = p(Σ+) - p(Σ-)`.
    pub fn default_delta(&self, alpha: &Rational) -> Result<Rational> {
        if !alpha.is_positive() {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if self.sigma_partition().minus.is_empty() {
            return Err(Error::ZeroCapacityChannel);
        }
        let g = self.capacity_gap();
        let two = Rational::from_integer(2.into());
        let cap = &g / (&two * (Rational::one() + &g));
        let half_alpha = alpha / &two;
        Ok(if half_alpha < cap { half_alpha } else { cap })
    }

    /// Builds an alpha-distortion whose LLR map is `c` times this one.
    pub fn distort(&self, alpha: &Rational) -> Result<DistortionCertificate> {
        let delta = self.default_delta(alpha)?;
        self.distort_with_delta(&delta)
    }

    /// As [`distort`](Self::distort) with an explicit `delta`; the result is
    /// a `2 delta`-distortion.
    pub fn distort_with_delta(&self, delta: &Rational) -> Result<DistortionCertificate> {
        let c = self.solve_c(delta)?;
        let part = self.sigma_partition();
        let d = to_f64(delta);
        let size = self.alphabet_size();

        let mut q = vec![Rational::zero(); size];
        for &a in &part.minus {
            let value = (1.0 - d) / d * self.weights[a] * ((1.0 - c) * -self.llr[a]).exp_m1();
            q[a] = from_f64_exact(value);
        }
        // Exact renormalization; the bisection residual is far below 1e-10.
        let total: Rational = q.iter().sum();
        for qa in &mut q {
            *qa /= &total;
        }

        let keep = Rational::one() - delta;
        let p_prime: Vec<Rational> =
            (0..size).map(|a| delta * &q[a] + &keep * &self.p[a]).collect();
        let distorted = MsbChannel::new(self.labels.clone(), p_prime, self.pairing.clone())?;
        let s = -part.minus.iter().map(|&a| to_f64(&q[a]) * self.llr[a]).sum::<f64>();
        let epsilon = d * s / (2.0 * (1.0 - d));
        let l1 = self.l1_distance(&distorted)?;
        Ok(DistortionCertificate { delta: delta.clone(), c, q, s, epsilon, distorted, l1 })
    }

    /// `||p - p'||_1` between channels sharing alphabet and pairing.
    pub fn l1_distance(&self, other: &MsbChannel) -> Result<Rational> {
        if self.labels != other.labels {
            return Err(Error::AlphabetMismatch);
        }
        if self.pairing != other.pairing {
            return Err(Error::PairingMismatch);
        }
        Ok(self.p.iter().zip(&other.p).map(|(a, b)| (a - b).abs()).sum())
    }

    /// Draws `n` i.i.d. output symbols given the all-zeros input.
    pub fn sample_symbols<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let dist = WeightedIndex::new(&self.weights).expect("positive weights");
        (0..n).map(|_| dist.sample(rng)).collect()
    }

    /// Draws `l = L(y)` with `y ~ p^n`.
    pub fn sample_llr<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> LlrVector {
        LlrVector(self.sample_symbols(n, rng).into_iter().map(|a| self.llr[a]).collect())
    }

    /// Exact (grid) LLR vector of a received word.
    pub fn exact_llr_of(&self, symbols: &[usize]) -> Vec<Rational> {
        symbols.iter().map(|&a| self.llr_grid[a].clone()).collect()
    }

    /// Parses the channel spec format:
    ///
    /// ```text
    /// # comment
    /// symbol 0 9/10
    /// symbol 1 0.1
    /// pair 0 1
    /// ```
    pub fn from_spec(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = vec![];
        let mut p = vec![];
        let mut pairs: Vec<(usize, String, String)> = vec![];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::MalformedChannelSpec { line: line_no, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["symbol", label, prob] => {
                    if labels.iter().any(|l| l == label) {
                        return Err(bad(format!("duplicate symbol {label}")));
                    }
                    let value = parse_rational(prob).map_err(|e| bad(e.to_string()))?;
                    labels.push(label.to_string());
                    p.push(value);
                }
                ["pair", a, b] => pairs.push((line_no, a.to_string(), b.to_string())),
                _ => return Err(bad(format!("unrecognized line {line:?}"))),
            }
        }
        let mut pairing = vec![usize::MAX; labels.len()];
        for (line, a, b) in pairs {
            let find = |l: &str| {
                labels.iter().position(|x| x == l).ok_or_else(|| Error::MalformedChannelSpec {
                    line,
                    msg: format!("unknown symbol {l}"),
                })
            };
            let (ia, ib) = (find(&a)?, find(&b)?);
            for (x, y) in [(ia, ib), (ib, ia)] {
                if pairing[x] != usize::MAX && pairing[x] != y {
                    return Err(Error::MalformedChannelSpec {
                        line,
                        msg: format!("symbol {} paired twice", labels[x]),
                    });
                }
                pairing[x] = y;
            }
        }
        if let Some(a) = pairing.iter().position(|&x| x == usize::MAX) {
            return Err(Error::MalformedChannelSpec {
                line: 0,
                msg: format!("symbol {} has no pair line", labels[a]),
            });
        }
        MsbChannel::new(labels, p, pairing)
    }

    pub fn to_spec(&self) -> String {
        let mut out = String::new();
        for (label, p) in self.labels.iter().zip(&self.p) {
            writeln!(out, "symbol {label} {p}").unwrap();
        }
        for (a, &b) in self.pairing.iter().enumerate() {
            if a <= b {
                writeln!(out, "pair {} {}", self.labels[a], self.labels[b]).unwrap();
            }
        }
        out
    }

    /// Parses the shorthands `bsc:<beta>` and `qawgn:<sigma>:<bins>:<clip>`.
    /// Returns `None` for anything else.
    pub fn from_shorthand(s: &str) -> Option<Result<Self>> {
        let mut parts = s.split(':');
        let kind = parts.next()?;
        let rest: Vec<&str> = parts.collect();
        match (kind, rest.as_slice()) {
            ("bsc", [beta]) => Some(parse_rational(beta).and_then(|b| MsbChannel::bsc(&b))),
            ("qawgn", [sigma, bins, clip]) => Some((|| {
                let bad = |what: &str| Error::InvalidParameter(format!("bad qawgn {what}"));
                let sigma: f64 = sigma.parse().map_err(|_| bad("sigma"))?;
                let bins: usize = bins.parse().map_err(|_| bad("bins"))?;
                let clip: f64 = clip.parse().map_err(|_| bad("clip"))?;
                MsbChannel::quantized_awgn(sigma, bins, clip)
            })()),
            _ => None,
        }
    }
}

impl fmt::Display for MsbChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MSB channel with {} symbols", self.alphabet_size())
    }
}
