//! Binary linear codes given by parity-check matrices, their Tanner graphs,
//! and graphs extended with redundant checks drawn from the dual code.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Rank limit for enumerating a row space.
pub const MAX_ROW_SPACE_RANK: usize = 24;
/// Dimension limit for enumerating codewords.
pub const MAX_CODE_DIMENSION: usize = 20;

/// A packed vector over F2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = BitVector::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b != 0);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &BitVector) -> bool {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    fn leading_bit(&self) -> Option<usize> {
        (0..self.len).find(|&i| self.get(i))
    }
}

/// An `m x n` parity-check matrix over F2 with no all-zero row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    rows: Vec<BitVector>,
}

impl ParityCheckMatrix {
    pub fn new(n: usize, rows: Vec<BitVector>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("blocklength must be at least 1".into()));
        }
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            if row.is_zero() {
                return Err(Error::InvalidParameter(format!("check {j} is all-zero")));
            }
        }
        Ok(ParityCheckMatrix { n, rows })
    }

    pub fn from_supports(n: usize, checks: &[Vec<usize>]) -> Result<Self> {
        for check in checks {
            if let Some(&i) = check.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidParameter(format!("variable {i} out of range {n}")));
            }
        }
        let rows = checks.iter().map(|c| BitVector::from_support(n, c)).collect();
        ParityCheckMatrix::new(n, rows)
    }

    /// Parses rows given as strings of `0`/`1`.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        let bits = rows
            .iter()
            .map(|r| BitVector::from_bits(&r.bytes().map(|b| (b == b'1') as u8).collect::<Vec<_>>()))
            .collect();
        ParityCheckMatrix::new(n, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// A basis of the row space in reduced echelon form.
    pub fn row_basis(&self) -> Vec<BitVector> {
        let mut basis: Vec<BitVector> = vec![];
        let mut pivots: Vec<usize> = vec![];
        for row in &self.rows {
            let mut v = row.clone();
            for (b, &p) in basis.iter().zip(&pivots) {
                if v.get(p) {
                    v.xor_assign(b);
                }
            }
            if let Some(p) = v.leading_bit() {
                for b in basis.iter_mut() {
                    if b.get(p) {
                        b.xor_assign(&v);
                    }
                }
                basis.push(v);
                pivots.push(p);
            }
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.row_basis().len()
    }

    pub fn is_codeword(&self, x: &BitVector) -> bool {
        self.rows.iter().all(|r| !r.dot(x))
    }

    /// All `2^(n - rank)` codewords, in lexicographic order of their bits.
    pub fn codewords(&self) -> Result<Vec<BitVector>> {
        let basis = self.null_space_basis();
        if basis.len() > MAX_CODE_DIMENSION {
            return Err(Error::CodeTooLarge(basis.len()));
        }
        let mut words = span(&basis, self.n);
        words.sort_by_key(|w| w.to_bits());
        Ok(words)
    }

    fn null_space_basis(&self) -> Vec<BitVector> {
        let mut basis = self.row_basis();
        basis.sort_by_key(|b| b.leading_bit());
        let pivots: Vec<usize> = basis.iter().map(|b| b.leading_bit().unwrap()).collect();
        let free: Vec<usize> = (0..self.n).filter(|i| !pivots.contains(i)).collect();
        free.iter()
            .map(|&f| {
                let mut v = BitVector::zeros(self.n);
                v.set(f, true);
                for (b, &p) in basis.iter().zip(&pivots) {
                    if b.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Nonzero dual codewords of weight at most `k`, ordered lexicographically
    /// by support.
    pub fn dual_codewords_up_to_weight(&self, k: usize) -> Result<Vec<BitVector>> {
        let basis = self.row_basis();
        if basis.len() > MAX_ROW_SPACE_RANK {
            return Err(Error::RowSpaceTooLarge(basis.len()));
        }
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        // Gray-code sweep: consecutive combinations differ in one basis row.
        let mut acc = BitVector::zeros(self.n);
        for step in 1u64..(1u64 << basis.len()) {
            acc.xor_assign(&basis[step.trailing_zeros() as usize]);
            if acc.weight() <= k {
                found.insert(acc.support());
            }
        }
        Ok(found.into_iter().map(|s| BitVector::from_support(self.n, &s)).collect())
    }

    pub fn tanner_graph(&self) -> TannerGraph {
        TannerGraph::new(self.n, self.rows.iter().map(|r| r.support()).collect())
            .expect("valid matrix gives valid graph")
    }

    /// Tanner graph whose checks are the dual codewords of weight `<= k`.
    pub fn redundant_graph(&self, k: usize) -> Result<TannerGraph> {
        let checks = self.dual_codewords_up_to_weight(k)?;
        TannerGraph::new(self.n, checks.iter().map(|c| c.support()).collect())
    }

    /// Tanner graph with a check for every nonzero dual codeword.
    pub fn full_redundant_graph(&self) -> Result<TannerGraph> {
        self.redundant_graph(self.n)
    }

    /// Parses MacKay's alist format (1-indexed, zero padding allowed).
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut last_line = 0;
        let mut next = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, line) = lines.next().ok_or_else(|| Error::MalformedAlist {
                line: last_line + 1,
                msg: format!("unexpected end of file, expected {what}"),
            })?;
            last_line = no;
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::MalformedAlist {
                        line: no,
                        msg: format!("not a nonnegative integer: {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((no, nums))
        };
        let expect_len = |no: usize, nums: &[usize], len: usize, what: &str| -> Result<()> {
            if nums.len() != len {
                return Err(Error::MalformedAlist {
                    line: no,
                    msg: format!("expected {len} numbers for {what}, found {}", nums.len()),
                });
            }
            Ok(())
        };

        let (no, header) = next("header")?;
        expect_len(no, &header, 2, "n m")?;
        let (n, m) = (header[0], header[1]);
        let (no, maxes) = next("max degrees")?;
        expect_len(no, &maxes, 2, "max degrees")?;
        let (no, col_deg) = next("column degrees")?;
        expect_len(no, &col_deg, n, "column degrees")?;
        let (no, row_deg) = next("row degrees")?;
        expect_len(no, &row_deg, m, "row degrees")?;

        let mut col_sets: Vec<BTreeSet<usize>> = vec![];
        for (col, &deg) in col_deg.iter().enumerate() {
            let (no, entries) = next("column adjacency")?;
            let set = adjacency(no, &entries, deg, m, &format!("column {}", col + 1))?;
            col_sets.push(set);
        }
        let mut checks = vec![];
        for (row, &deg) in row_deg.iter().enumerate() {
            let (no, entries) = next("row adjacency")?;
            let set = adjacency(no, &entries, deg, n, &format!("row {}", row + 1))?;
            for &v in &set {
                if !col_sets[v].contains(&row) {
                    return Err(Error::MalformedAlist {
                        line: no,
                        msg: format!("row {} lists column {} but not vice versa", row + 1, v + 1),
                    });
                }
            }
            checks.push(set.into_iter().collect::<Vec<_>>());
        }
        let edges: usize = checks.iter().map(Vec::len).sum();
        if edges != col_sets.iter().map(BTreeSet::len).sum::<usize>() {
            return Err(Error::MalformedAlist {
                line: last_line,
                msg: "row and column adjacency disagree".into(),
            });
        }
        ParityCheckMatrix::from_supports(n, &checks).map_err(|e| Error::MalformedAlist {
            line: last_line,
            msg: e.to_string(),
        })
    }

    /// Writes the alist form: no zero padding, single spaces, trailing newline.
    pub fn to_alist(&self) -> String {
        let checks: Vec<Vec<usize>> = self.rows.iter().map(|r| r.support()).collect();
        let mut cols: Vec<Vec<usize>> = vec![vec![]; self.n];
        for (j, c) in checks.iter().enumerate() {
            for &i in c {
                cols[i].push(j);
            }
        }
        let join = |v: &[usize], offset: usize| {
            v.iter().map(|x| (x + offset).to_string()).collect::<Vec<_>>().join(" ")
        };
        let col_deg: Vec<usize> = cols.iter().map(Vec::len).collect();
        let row_deg: Vec<usize> = checks.iter().map(Vec::len).collect();
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.m()).unwrap();
        writeln!(
            out,
            "{} {}",
            col_deg.iter().max().copied().unwrap_or(0),
            row_deg.iter().max().copied().unwrap_or(0)
        )
        .unwrap();
        writeln!(out, "{}", join(&col_deg, 0)).unwrap();
        writeln!(out, "{}", join(&row_deg, 0)).unwrap();
        for c in &cols {
            writeln!(out, "{}", join(c, 1)).unwrap();
        }
        for r in &checks {
            writeln!(out, "{}", join(r, 1)).unwrap();
        }
        out
    }

    /// Random `(dv, dc)`-regular matrix from the configuration model, retried
    /// until no check touches a variable twice.
    pub fn random_regular(n: usize, dv: usize, dc: usize, seed: u64) -> Result<Self> {
        if dv == 0 || dc == 0 || !(n * dv).is_multiple_of(dc) {
            return Err(Error::InvalidParameter(format!(
                "n * dv must be a positive multiple of dc (n={n}, dv={dv}, dc={dc})"
            )));
        }
        let m = n * dv / dc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sockets: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, dv)).collect();
        for _ in 0..10_000 {
            sockets.shuffle(&mut rng);
            let checks: Vec<Vec<usize>> = sockets.chunks(dc).map(|c| c.to_vec()).collect();
            let simple = checks.iter().all(|c| {
                let set: BTreeSet<_> = c.iter().collect();
                set.len() == c.len()
            });
            if simple {
                let checks: Vec<Vec<usize>> = checks
                    .into_iter()
                    .map(|mut c| {
                        c.sort_unstable();
                        c
                    })
                    .collect();
                debug_assert_eq!(checks.len(), m);
                return ParityCheckMatrix::from_supports(n, &checks);
            }
        }
        Err(Error::InvalidParameter("could not sample a simple regular graph".into()))
    }
}

fn adjacency(
    line: usize,
    entries: &[usize],
    degree: usize,
    bound: usize,
    what: &str,
) -> Result<BTreeSet<usize>> {
    let nonzero: Vec<usize> = entries.iter().copied().filter(|&x| x != 0).collect();
    if nonzero.len() != degree || entries[nonzero.len()..].iter().any(|&x| x != 0) {
        return Err(Error::MalformedAlist {
            line,
            msg: format!("{what}: expected {degree} entries followed by zero padding"),
        });
    }
    let mut set = BTreeSet::new();
    for &x in &nonzero {
        if x > bound {
            return Err(Error::MalformedAlist { line, msg: format!("{what}: index {x} > {bound}") });
        }
        if !set.insert(x - 1) {
            return Err(Error::MalformedAlist { line, msg: format!("{what}: repeated index {x}") });
        }
    }
    Ok(set)
}

fn span(basis: &[BitVector], n: usize) -> Vec<BitVector> {
    let mut out = Vec::with_capacity(1 << basis.len());
    let mut acc = BitVector::zeros(n);
    out.push(acc.clone());
    for step in 1u64..(1u64 << basis.len()) {
        acc.xor_assign(&basis[step.trailing_zeros() as usize]);
        out.push(acc.clone());
    }
    out
}

/// Bipartite variable/check graph. Checks are sorted variable sets; edges are
/// numbered check by check in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    checks: Vec<Vec<usize>>,
    offsets: Vec<usize>,
}

impl TannerGraph {
    pub fn new(n: usize, mut checks: Vec<Vec<usize>>) -> Result<Self> {
        for (j, c) in checks.iter_mut().enumerate() {
            c.sort_unstable();
            c.dedup();
            if c.is_empty() {
                return Err(Error::InvalidParameter(format!("check {j} has degree 0")));
            }
            if let Some(&i) = c.last().filter(|&&i| i >= n) {
                return Err(Error::InvalidParameter(format!("variable {i} out of range {n}")));
            }
        }
        let mut offsets = Vec::with_capacity(checks.len() + 1);
        offsets.push(0);
        for c in &checks {
            offsets.push(offsets.last().unwrap() + c.len());
        }
        Ok(TannerGraph { n, checks, offsets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn check(&self, j: usize) -> &[usize] {
        &self.checks[j]
    }

    pub fn num_edges(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Index of the first edge of check `j`.
    pub fn edge_offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    /// `(check, variable)` pairs in edge order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.checks.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |&i| (j, i)))
    }

    pub fn max_check_degree(&self) -> usize {
        self.checks.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn find_check(&self, support: &[usize]) -> Option<usize> {
        self.checks.iter().position(|c| c.as_slice() == support)
    }

    pub fn parity_check_matrix(&self) -> ParityCheckMatrix {
        ParityCheckMatrix::from_supports(self.n, &self.checks).expect("graph checks are nonempty")
    }

    /// Sub-graph keeping checks of degree `<= k`, with the kept indices.
    pub fn restrict_degree(&self, k: usize) -> (TannerGraph, Vec<usize>) {
        let kept: Vec<usize> = (0..self.checks.len()).filter(|&j| self.checks[j].len() <= k).collect();
        let graph = TannerGraph::new(self.n, kept.iter().map(|&j| self.checks[j].clone()).collect())
            .expect("subset of a valid graph");
        (graph, kept)
    }
}

/// Hamming(7,4) with rows `1110100 / 0111010 / 1101001`.
pub fn hamming_7_4() -> ParityCheckMatrix {
    ParityCheckMatrix::from_rows(&["1110100", "0111010", "1101001"]).unwrap()
}
