use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use lpexcess::excess_lab::{stream, trial_rng};
use lpexcess::linear_code::hamming_7_4;
use lpexcess::rational::ratio;
use lpexcess::witness::find_witness;
use lpexcess::{FundamentalPolytope, MsbChannel, ParityCheckMatrix, Rational};

fn samples(ch: &MsbChannel, n: usize, count: u64) -> Vec<Vec<Rational>> {
    (0..count)
        .map(|t| ch.exact_llr_of(&ch.sample_symbols(n, &mut trial_rng(7, stream::SIMULATE, t))))
        .collect()
}

fn decode(c: &mut Criterion) {
    let g = ParityCheckMatrix::random_regular(60, 3, 6, 1).unwrap().tanner_graph();
    let p = FundamentalPolytope::from_graph(&g).unwrap();
    let ch = MsbChannel::bsc(&ratio(2, 100)).unwrap();
    let llrs = samples(&ch, 60, 64);
    let mut group = c.benchmark_group("decode-ldpc-60");
    group.sample_size(20);
    for (name, eps) in [("eps-0", ratio(0, 1)), ("eps-2", ratio(2, 1)), ("eps-4", ratio(4, 1))] {
        let mut i = 0;
        group.bench_function(name, |b| {
            b.iter_batched(
                || {
                    i = (i + 1) % llrs.len();
                    &llrs[i]
                },
                |l| p.decode_with_excess(l, &eps).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn witness(c: &mut Criterion) {
    let h = hamming_7_4();
    let ch = MsbChannel::bsc(&ratio(1, 10)).unwrap();
    let llrs = samples(&ch, 7, 64);
    let mut group = c.benchmark_group("witness-hamming");
    for (name, g) in [("base", h.tanner_graph()), ("full", h.full_redundant_graph().unwrap())] {
        let mut i = 0;
        group.bench_function(name, |b| {
            b.iter(|| {
                i = (i + 1) % llrs.len();
                find_witness(&g, &llrs[i]).unwrap()
            })
        });
    }
    group.finish();
}

fn distort(c: &mut Criterion) {
    let ch = MsbChannel::quantized_awgn(0.8, 8, 3.0).unwrap();
    c.bench_function("distort-qawgn-16", |b| b.iter(|| ch.distort(&ratio(1, 20)).unwrap()));
}

criterion_group!(benches, decode, witness, distort);
criterion_main!(benches);
