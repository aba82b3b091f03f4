//! The fundamental polytope of a Tanner graph and the LP decoder over it.
//!
//! For every check `j` and odd-size `S ⊆ N(j)`:
//! `sum_{i in S} x_i - sum_{i in N(j) \ S} x_i <= |S| - 1`, plus `0 <= x <= 1`.
//!
//! The decoder succeeds on `l` iff the zero word is the unique minimizer of
//! `<x, l>` over the polytope. This is decided exactly by two LPs: first
//! `min <x, l>`; if that is 0, then `max sum x` subject to `<x, l> <= 0`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linear_code::TannerGraph;
use crate::lp::{simplex_solve, LinearProgram, LpSolution, SolveStrategy, SparseRow};
use crate::rational::{int, Rational};

/// Largest check degree for which the odd-set description is generated.
pub const MAX_POLYTOPE_CHECK_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InequalityKind {
    OddSet { check: usize, odd_set: Vec<usize> },
    Upper(usize),
    Lower(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub kind: InequalityKind,
    pub row: SparseRow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalPolytope {
    n: usize,
    inequalities: Vec<Inequality>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Success,
    Failure,
}

impl DecodeStatus {
    pub fn is_success(self) -> bool {
        self == DecodeStatus::Success
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: DecodeStatus,
    /// `min <x, l>` over the polytope; zero on success.
    pub optimal_value: Rational,
    /// Zero on success; otherwise a nonzero point of the polytope with
    /// `<x, l> = optimal_value <= 0`.
    pub witness_point: Vec<Rational>,
}

impl FundamentalPolytope {
    pub fn from_graph(graph: &TannerGraph) -> Result<Self> {
        let d = graph.max_check_degree();
        if d > MAX_POLYTOPE_CHECK_DEGREE {
            return Err(Error::CheckDegreeTooLarge(d));
        }
        let mut inequalities = vec![];
        for (j, check) in graph.checks().iter().enumerate() {
            let deg = check.len();
            for mask in 0u32..(1 << deg) {
                if mask.count_ones() % 2 == 0 {
                    continue;
                }
                let mut coeffs = Vec::with_capacity(deg);
                let mut odd_set = vec![];
                for (pos, &i) in check.iter().enumerate() {
                    if mask >> pos & 1 == 1 {
                        coeffs.push((i, int(1)));
                        odd_set.push(i);
                    } else {
                        coeffs.push((i, int(-1)));
                    }
                }
                let rhs = int(odd_set.len() as i64 - 1);
                inequalities.push(Inequality {
                    kind: InequalityKind::OddSet { check: j, odd_set },
                    row: SparseRow::new(coeffs, rhs),
                });
            }
        }
        for i in 0..graph.n() {
            inequalities.push(Inequality {
                kind: InequalityKind::Upper(i),
                row: SparseRow::new(vec![(i, int(1))], int(1)),
            });
            inequalities.push(Inequality {
                kind: InequalityKind::Lower(i),
                row: SparseRow::new(vec![(i, int(-1))], int(0)),
            });
        }
        Ok(FundamentalPolytope { n: graph.n(), inequalities })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn num_odd_set_inequalities(&self) -> usize {
        self.inequalities
            .iter()
            .filter(|q| matches!(q.kind, InequalityKind::OddSet { .. }))
            .count()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.n && self.inequalities.iter().all(|q| q.row.eval(x) <= q.row.rhs)
    }

    /// `min c.x` over the polytope. Lower bounds are implicit in the LP.
    fn lp(&self, objective: Vec<Rational>) -> LinearProgram {
        let mut lp = LinearProgram::new(self.n, objective);
        lp.inequalities = self
            .inequalities
            .iter()
            .filter(|q| !matches!(q.kind, InequalityKind::Lower(_)))
            .map(|q| q.row.clone())
            .collect();
        lp
    }

    /// Exact minimum of `<x, c>` over the polytope and a vertex attaining it.
    pub fn minimize(&self, c: &[Rational], strategy: SolveStrategy) -> Result<LpSolution> {
        self.check_dim(c.len())?;
        simplex_solve(&self.lp(c.to_vec()), strategy)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got });
        }
        Ok(())
    }

    pub fn decode(&self, llr: &[Rational]) -> Result<LpOutcome> {
        self.decode_with(llr, SolveStrategy::default())
    }

    pub fn decode_with(&self, llr: &[Rational], strategy: SolveStrategy) -> Result<LpOutcome> {
        self.check_dim(llr.len())?;
        let stage1 = simplex_solve(&self.lp(llr.to_vec()), strategy)?;
        if stage1.value.is_negative() {
            return Ok(LpOutcome {
                status: DecodeStatus::Failure,
                optimal_value: stage1.value,
                witness_point: stage1.point,
            });
        }
        debug_assert!(stage1.value.is_zero(), "the zero word is feasible");

        let mut stage2 = self.lp(vec![-Rational::one(); self.n]);
        let coeffs = llr
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        stage2.inequalities.push(SparseRow::new(coeffs, Rational::zero()));
        let tie = simplex_solve(&stage2, strategy)?;
        if tie.value.is_negative() {
            Ok(LpOutcome {
                status: DecodeStatus::Failure,
                optimal_value: Rational::zero(),
                witness_point: tie.point,
            })
        } else {
            Ok(LpOutcome {
                status: DecodeStatus::Success,
                optimal_value: Rational::zero(),
                witness_point: vec![Rational::zero(); self.n],
            })
        }
    }

    /// Decodes `l - eps * 1`.
    pub fn decode_with_excess(&self, llr: &[Rational], eps: &Rational) -> Result<LpOutcome> {
        self.decode_with_excess_using(llr, eps, SolveStrategy::default())
    }

    pub fn decode_with_excess_using(
        &self,
        llr: &[Rational],
        eps: &Rational,
        strategy: SolveStrategy,
    ) -> Result<LpOutcome> {
        if eps.is_negative() {
            return Err(Error::InvalidParameter(format!("excess must be nonnegative, got {eps}")));
        }
        let shifted: Vec<Rational> = llr.iter().map(|v| v - eps).collect();
        self.decode_with(&shifted, strategy)
    }

    /// Whether `l` lies in the fundamental cone, i.e. decoding succeeds.
    pub fn in_fundamental_cone(&self, llr: &[Rational]) -> Result<bool> {
        Ok(self.decode(llr)?.status.is_success())
    }
}
