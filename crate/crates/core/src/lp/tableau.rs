//! Dense dictionary-form simplex over a generic scalar.
//!
//! Only nonbasic columns are stored. Row `r` reads
//! `x_{basic[r]} = rhs[r] - sum_c a[r][c] x_{nonbasic[c]}` and the objective
//! (minimized) reads `z = z0 + sum_c d[c] x_{nonbasic[c]}`.
//! Labels: structural variables `0..n`, slacks `n..n+m`, auxiliary `n+m`.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use super::SparseRow;
use crate::rational::{to_f64, Rational};

pub(crate) trait Scalar: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Sign with the tolerance appropriate for the type.
    fn sign(&self) -> Ordering;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Comparison with tolerance, used for ratio tests.
    fn cmp_tol(&self, o: &Self) -> Ordering;
    fn magnitude(&self) -> f64;
    /// Structural zero, used to skip work in sparse rows.
    fn is_exact_zero(&self) -> bool;
    /// Flushes float round-off to zero; identity for exact types.
    fn cleaned(self) -> Self;

    fn is_zero_tol(&self) -> bool {
        self.sign() == Ordering::Equal
    }
    fn is_pos(&self) -> bool {
        self.sign() == Ordering::Greater
    }
    fn is_neg(&self) -> bool {
        self.sign() == Ordering::Less
    }
}

const FLOAT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn sign(&self) -> Ordering {
        if *self > FLOAT_TOL {
            Ordering::Greater
        } else if *self < -FLOAT_TOL {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn cmp_tol(&self, o: &Self) -> Ordering {
        let scale = 1.0f64.max(self.abs()).max(o.abs());
        if (self - o).abs() <= FLOAT_TOL * scale {
            Ordering::Equal
        } else {
            self.partial_cmp(o).unwrap_or(Ordering::Equal)
        }
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn cleaned(self) -> Self {
        if self.abs() < 1e-13 {
            0.0
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn sign(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn cmp_tol(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn magnitude(&self) -> f64 {
        to_f64(self).abs()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn cleaned(self) -> Self {
        self
    }
}

/// Entering-variable selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest eligible label enters, smallest label leaves on ties.
    /// Never cycles.
    Bland,
    /// Most negative reduced cost, switching to Bland after a run of
    /// degenerate pivots.
    Dantzig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;

#[derive(Debug, Clone)]
pub(crate) struct Tableau<T> {
    n: usize,
    a: Vec<Vec<T>>,
    rhs: Vec<T>,
    d: Vec<T>,
    z0: T,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    pub pivots: usize,
}

/// Result of a run: status, basis and the primal point.
#[derive(Debug, Clone)]
pub(crate) struct Run<T> {
    pub status: Status,
    pub nonbasic: Vec<usize>,
    pub x: Vec<T>,
    pub value: T,
}

impl Tableau<f64> {
    /// Loosens every row by a distinct amount of order `1e-7`. Breaks the
    /// massive degeneracy of polytope vertices; the exact certification
    /// downstream judges the basis against the true data.
    pub fn perturbed(mut self) -> Self {
        for (r, b) in self.rhs.iter_mut().enumerate() {
            let jitter = (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40;
            *b += 1e-7 * (1.0 + jitter as f64 / (1u64 << 24) as f64);
        }
        self
    }
}

impl<T: Scalar> Tableau<T> {
    /// One tableau row per `a_r x <= b_r`, slack basis.
    pub fn new(n: usize, rows: &[SparseRow]) -> Self {
        let a = rows
            .iter()
            .map(|row| {
                let mut dense = vec![T::zero(); n];
                for (j, v) in &row.coeffs {
                    dense[*j] = T::from_rational(v);
                }
                dense
            })
            .collect();
        let rhs = rows.iter().map(|row| T::from_rational(&row.rhs)).collect();
        Tableau {
            n,
            a,
            rhs,
            d: vec![T::zero(); n],
            z0: T::zero(),
            basic: (n..n + rows.len()).collect(),
            nonbasic: (0..n).collect(),
            pivots: 0,
        }
    }

    fn m(&self) -> usize {
        self.rhs.len()
    }


    fn pivot(&mut self, r: usize, c: usize) {
        let m = self.m();
        let width = self.nonbasic.len();
        let p = self.a[r][c].clone();
        let inv = T::one().div(&p);
        for k in 0..width {
            if k != c && !self.a[r][k].is_exact_zero() {
                self.a[r][k] = self.a[r][k].mul(&inv);
            }
        }
        self.a[r][c] = inv.clone();
        self.rhs[r] = self.rhs[r].mul(&inv);
        let pivot_row = self.a[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..m {
            if i == r {
                continue;
            }
            let factor = self.a[i][c].clone();
            if factor.is_exact_zero() {
                continue;
            }
            let row = &mut self.a[i];
            for k in 0..width {
                if k == c || pivot_row[k].is_exact_zero() {
                    continue;
                }
                row[k] = row[k].sub(&factor.mul(&pivot_row[k])).cleaned();
            }
            row[c] = factor.neg().mul(&inv);
            self.rhs[i] = self.rhs[i].sub(&factor.mul(&pivot_rhs)).cleaned();
        }
        let dc = self.d[c].clone();
        if !dc.is_exact_zero() {
            for (k, (dk, pk)) in self.d.iter_mut().zip(&pivot_row).enumerate() {
                if k == c || pk.is_exact_zero() {
                    continue;
                }
                *dk = dk.sub(&dc.mul(pk)).cleaned();
            }
            self.d[c] = dc.neg().mul(&inv);
            self.z0 = self.z0.add(&dc.mul(&pivot_rhs));
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[c]);
        self.pivots += 1;
    }

    fn entering(&self, rule: PivotRule) -> Option<usize> {
        let candidates = (0..self.nonbasic.len()).filter(|&c| self.d[c].is_neg());
        match rule {
            PivotRule::Bland => candidates.min_by_key(|&c| self.nonbasic[c]),
            PivotRule::Dantzig => candidates.min_by(|&x, &y| {
                self.d[x]
                    .cmp_tol(&self.d[y])
                    .then(self.nonbasic[x].cmp(&self.nonbasic[y]))
            }),
        }
    }

    fn leaving(&self, c: usize, rule: PivotRule) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for r in 0..self.m() {
            if !self.a[r][c].is_pos() {
                continue;
            }
            let ratio = self.rhs[r].div(&self.a[r][c]);
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => match ratio.cmp_tol(&bratio) {
                    Ordering::Less => Some((r, ratio)),
                    Ordering::Equal if self.prefer(r, br, c, rule) => Some((r, ratio)),
                    _ => Some((br, bratio)),
                },
            };
        }
        best.map(|(r, _)| r)
    }

    /// Tie-break between rows `r` and `incumbent` in the ratio test.
    fn prefer(&self, r: usize, incumbent: usize, c: usize, rule: PivotRule) -> bool {
        match rule {
            PivotRule::Bland => self.basic[r] < self.basic[incumbent],
            PivotRule::Dantzig => {
                let (x, y) = (self.a[r][c].magnitude(), self.a[incumbent][c].magnitude());
                x > y || (x == y && self.basic[r] < self.basic[incumbent])
            }
        }
    }

    fn optimize(&mut self, rule: PivotRule, max_pivots: usize) -> Status {
        let mut rule_now = rule;
        let mut degenerate_run = 0;
        loop {
            if self.pivots >= max_pivots {
                return Status::IterationLimit;
            }
            let Some(c) = self.entering(rule_now) else {
                return Status::Optimal;
            };
            let Some(r) = self.leaving(c, rule_now) else {
                return Status::Unbounded;
            };
            if self.rhs[r].is_zero_tol() {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND {
                    rule_now = PivotRule::Bland;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }

    /// Installs `min c.x` expressed through the current basis.
    fn set_objective(&mut self, c: &[T]) {
        let width = self.nonbasic.len();
        let cost = |label: usize| if label < self.n { c[label].clone() } else { T::zero() };
        let mut d: Vec<T> = self.nonbasic.iter().map(|&l| cost(l)).collect();
        let mut z0 = T::zero();
        for r in 0..self.m() {
            let cb = cost(self.basic[r]);
            if cb.is_exact_zero() {
                continue;
            }
            z0 = z0.add(&cb.mul(&self.rhs[r]));
            for (k, dk) in d.iter_mut().enumerate().take(width) {
                if !self.a[r][k].is_exact_zero() {
                    *dk = dk.sub(&cb.mul(&self.a[r][k]));
                }
            }
        }
        self.d = d;
        self.z0 = z0;
    }

    /// Phase 1 with a single auxiliary variable. Returns false if infeasible.
    fn make_feasible(&mut self, rule: PivotRule, max_pivots: usize) -> Option<bool> {
        let m = self.m();
        let Some(worst) = (0..m)
            .filter(|&r| self.rhs[r].is_neg())
            .min_by(|&x, &y| self.rhs[x].cmp_tol(&self.rhs[y]).then(x.cmp(&y)))
        else {
            return Some(true);
        };
        let aux = self.n + m;
        for row in &mut self.a {
            row.push(T::one().neg());
        }
        self.nonbasic.push(aux);
        let c = self.nonbasic.len() - 1;
        self.d = vec![T::zero(); self.nonbasic.len()];
        self.d[c] = T::one();
        self.z0 = T::zero();
        self.pivot(worst, c);
        match self.optimize(rule, max_pivots) {
            Status::Optimal => {}
            // Phase 1 is bounded below by zero; anything else is float trouble.
            _ => return None,
        }
        if self.z0.is_pos() {
            return Some(false);
        }
        if let Some(r) = self.basic.iter().position(|&l| l == aux) {
            let c = (0..self.nonbasic.len())
                .filter(|&k| !self.a[r][k].is_zero_tol())
                .max_by(|&x, &y| {
                    self.a[r][x]
                        .magnitude()
                        .partial_cmp(&self.a[r][y].magnitude())
                        .unwrap_or(Ordering::Equal)
                })
                .expect("auxiliary row has a nonzero entry");
            self.pivot(r, c);
        }
        let c = self.nonbasic.iter().position(|&l| l == aux).expect("aux is nonbasic");
        for row in &mut self.a {
            row.remove(c);
        }
        self.nonbasic.remove(c);
        self.d.remove(c);
        Some(true)
    }

    /// Solves `min c.x` over the rows given at construction with `x >= 0`.
    pub fn solve(mut self, c: &[Rational], rule: PivotRule, max_pivots: usize) -> Run<T> {
        let status = match self.make_feasible(rule, max_pivots) {
            None => Status::IterationLimit,
            Some(false) => Status::Infeasible,
            Some(true) => {
                let cost: Vec<T> = c.iter().map(T::from_rational).collect();
                self.set_objective(&cost);
                self.optimize(rule, max_pivots)
            }
        };
        let mut x = vec![T::zero(); self.n];
        for (r, &label) in self.basic.iter().enumerate() {
            if label < self.n {
                x[label] = self.rhs[r].clone();
            }
        }
        Run { status, nonbasic: self.nonbasic, x, value: self.z0 }
    }
}
