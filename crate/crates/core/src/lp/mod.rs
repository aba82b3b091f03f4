//! Exact-rational linear programming.
//!
//! Problems are `min c.x` subject to `A x <= b`, `E x = e` and `x >= 0`.
//! Two strategies are offered: a plain exact simplex with Bland's rule, and
//! a float simplex whose final basis is then certified (primal and dual
//! feasibility) in exact arithmetic, falling back to the exact simplex when
//! the certificate does not check out.

mod certify;
mod tableau;

use log::debug;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use certify::solve_exact;
pub use tableau::PivotRule;

use tableau::{Status, Tableau};

/// `sum coeffs[k].1 * x[coeffs[k].0] (<= or =) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl SparseRow {
    pub fn new(coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        SparseRow { coeffs, rhs }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, v)| v * &x[*j]).sum()
    }

    fn negated(&self) -> SparseRow {
        SparseRow {
            coeffs: self.coeffs.iter().map(|(j, v)| (*j, -v)).collect(),
            rhs: -&self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Minimized.
    pub objective: Vec<Rational>,
    pub inequalities: Vec<SparseRow>,
    pub equalities: Vec<SparseRow>,
}

impl LinearProgram {
    pub fn new(num_vars: usize, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), num_vars);
        LinearProgram { num_vars, objective, inequalities: vec![], equalities: vec![] }
    }

    pub fn le(mut self, coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        self.inequalities.push(SparseRow::new(coeffs, rhs));
        self
    }

    pub fn eq(mut self, coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        self.equalities.push(SparseRow::new(coeffs, rhs));
        self
    }

    /// Inequalities with each equality split into two.
    fn expanded_rows(&self) -> Vec<SparseRow> {
        let mut rows = self.inequalities.clone();
        for e in &self.equalities {
            rows.push(e.clone());
            rows.push(e.negated());
        }
        rows
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| v >= &Rational::from_integer(0.into()))
            && self.inequalities.iter().all(|r| r.eval(x) <= r.rhs)
            && self.equalities.iter().all(|r| r.eval(x) == r.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveStrategy {
    /// Exact simplex with Bland's rule from the slack basis.
    ExactBland,
    /// Float simplex, exact certification of its basis, exact fallback.
    #[default]
    FloatGuided,
}

/// An exact optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    pub point: Vec<Rational>,
    /// True when the answer came from a certified float basis.
    pub certified_float_basis: bool,
}

const FLOAT_PIVOT_LIMIT: usize = 100_000;

/// Solves `lp` exactly; returns the optimal value and a vertex optimizer.
pub fn simplex_solve(lp: &LinearProgram, strategy: SolveStrategy) -> Result<LpSolution> {
    for row in lp.inequalities.iter().chain(&lp.equalities) {
        if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= lp.num_vars) {
            return Err(Error::DimensionMismatch { expected: lp.num_vars, got: j + 1 });
        }
    }
    let rows = lp.expanded_rows();
    if strategy == SolveStrategy::FloatGuided {
        let run = Tableau::<f64>::new(lp.num_vars, &rows).perturbed().solve(
            &lp.objective,
            PivotRule::Dantzig,
            FLOAT_PIVOT_LIMIT,
        );
        if run.status == Status::Optimal {
            if let Some((value, point)) =
                certify::certify_basis(lp.num_vars, &rows, &lp.objective, &run.nonbasic)
            {
                return Ok(LpSolution { value, point, certified_float_basis: true });
            }
            debug!("float basis failed exact certification; falling back to exact simplex");
        } else {
            debug!("float simplex ended with {:?}; falling back to exact simplex", run.status);
        }
    }
    let run = Tableau::<Rational>::new(lp.num_vars, &rows).solve(
        &lp.objective,
        PivotRule::Bland,
        usize::MAX,
    );
    match run.status {
        Status::Optimal => Ok(LpSolution { value: run.value, point: run.x, certified_float_basis: false }),
        Status::Infeasible => Err(Error::Infeasible),
        Status::Unbounded => Err(Error::Unbounded),
        Status::IterationLimit => unreachable!("exact simplex has no pivot limit"),
    }
}
