//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use lpexcess::linear_code::hamming_7_4;
use lpexcess::rational::{int, ratio};
use lpexcess::{BitVector, FundamentalPolytope, MsbChannel, ParityCheckMatrix, Rational, TannerGraph};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn single_check() -> ParityCheckMatrix {
    ParityCheckMatrix::from_rows(&["111"]).unwrap()
}

pub fn repetition(n: usize) -> ParityCheckMatrix {
    let checks: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
    ParityCheckMatrix::from_supports(n, &checks).unwrap()
}

pub fn extended_hamming() -> ParityCheckMatrix {
    ParityCheckMatrix::from_rows(&["11110000", "00111100", "00001111", "10101010"]).unwrap()
}

/// Parity checks of the code obtained by deleting coordinate `drop`,
/// computed by brute force from the codeword list.
pub fn punctured(h: &ParityCheckMatrix, drop: usize) -> ParityCheckMatrix {
    let n = h.n() - 1;
    let words: Vec<Vec<u8>> = h
        .codewords()
        .unwrap()
        .iter()
        .map(|w| {
            let mut b = w.to_bits();
            b.remove(drop);
            b
        })
        .collect();
    let mut dual = vec![];
    for mask in 1u32..(1 << n) {
        let v: Vec<u8> = (0..n).map(|i| (mask >> i & 1) as u8).collect();
        if words.iter().all(|w| w.iter().zip(&v).map(|(a, b)| a & b).sum::<u8>() % 2 == 0) {
            dual.push(BitVector::from_bits(&v));
        }
    }
    let full = ParityCheckMatrix::new(n, dual).unwrap();
    ParityCheckMatrix::new(n, full.row_basis()).unwrap()
}

/// Codes with n <= 10 used across the decoder tests.
pub fn small_codes() -> Vec<(&'static str, ParityCheckMatrix)> {
    vec![
        ("single-check", single_check()),
        ("repetition-5", repetition(5)),
        ("hamming-7-4", hamming_7_4()),
        ("hamming-punctured", punctured(&hamming_7_4(), 6)),
        ("extended-hamming", extended_hamming()),
        ("ldpc-10", ParityCheckMatrix::random_regular(10, 2, 4, 3).unwrap()),
    ]
}

/// Random rational with denominator up to 8 in `[lo, hi]`.
pub fn random_rational(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    let den = rng.random_range(1..=8);
    ratio(rng.random_range(lo * den..=hi * den), den)
}

/// Mostly positive LLR vectors, so both decoder outcomes show up.
pub fn random_llr(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| random_rational(rng, -2, 4)).collect()
}

pub fn dot(l: &[Rational], bits: &[u8]) -> Rational {
    l.iter().zip(bits).filter(|(_, &b)| b == 1).map(|(v, _)| v.clone()).sum()
}

/// Random MSB channel with at most `max_symbols` outputs: a few pairs, a
/// few fixed points, integer weights normalized exactly, and at least one
/// asymmetric pair.
pub fn random_channel(rng: &mut impl Rng, max_symbols: usize) -> MsbChannel {
    let pairs = rng.random_range(1..=max_symbols / 2);
    let fixed = rng.random_range(0..=max_symbols - 2 * pairs);
    let mut weights = vec![];
    let mut pairing = vec![];
    for k in 0..pairs {
        let a: i64 = rng.random_range(1..=60);
        let mut b: i64 = rng.random_range(1..=60);
        if k == 0 && a == b {
            b = a + 1;
        }
        weights.extend([a, b]);
        pairing.extend([2 * k + 1, 2 * k]);
    }
    for f in 0..fixed {
        weights.push(rng.random_range(1..=20));
        pairing.push(2 * pairs + f);
    }
    let total: i64 = weights.iter().sum();
    let labels = (0..weights.len()).map(|i| format!("s{i}")).collect();
    let p = weights.iter().map(|&w| ratio(w, total)).collect();
    MsbChannel::new(labels, p, pairing).unwrap()
}

/// `sum over all |Σ|^n outputs of p^n(y) * 1{decoder succeeds on l(y) - eps}`.
pub fn exact_success_probability(ch: &MsbChannel, graph: &TannerGraph, eps: &Rational) -> Rational {
    let n = graph.n();
    let q = ch.alphabet_size();
    let polytope = FundamentalPolytope::from_graph(graph).unwrap();
    let mut total = Rational::zero();
    let mut symbols = vec![0usize; n];
    loop {
        let prob: Rational = symbols.iter().fold(Rational::one(), |acc, &a| acc * &ch.probabilities()[a]);
        let l = ch.exact_llr_of(&symbols);
        if polytope.decode_with_excess(&l, eps).unwrap().status.is_success() {
            total += prob;
        }
        let mut i = 0;
        loop {
            if i == n {
                return total;
            }
            symbols[i] += 1;
            if symbols[i] < q {
                break;
            }
            symbols[i] = 0;
            i += 1;
        }
    }
}

/// Binary erasure channel with a noisy unerased part: symbols `0`, `1`
/// paired, `e` fixed.
pub fn ternary_channel() -> MsbChannel {
    MsbChannel::new(
        vec!["0".into(), "1".into(), "e".into()],
        vec![ratio(7, 10), ratio(1, 10), ratio(1, 5)],
        vec![1, 0, 2],
    )
    .unwrap()
}

pub fn zero() -> Rational {
    int(0)
}
