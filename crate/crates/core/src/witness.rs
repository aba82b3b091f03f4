//! Dual witnesses: edge weights `w(i, j)` on a Tanner graph with
//! `w(i, j) + w(i', j) >= 0` for distinct neighbours of each check, whose
//! flow `F_i = sum_j w(i, j)` is strictly below the LLR vector.
//!
//! A check hands flow to variable `i` through a negative weight: dropping
//! the check raises `F_i` by `max(-w(i, j), 0)`.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linear_code::TannerGraph;
use crate::lp::{simplex_solve, LinearProgram, SolveStrategy, SparseRow};
use crate::rational::{int, to_f64, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct DualWitness {
    graph: TannerGraph,
    /// One weight per edge, in the graph's edge order.
    weights: Vec<Rational>,
}

impl DualWitness {
    pub fn new(graph: TannerGraph, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != graph.num_edges() {
            return Err(Error::DimensionMismatch { expected: graph.num_edges(), got: weights.len() });
        }
        Ok(DualWitness { graph, weights })
    }

    pub fn zero(graph: TannerGraph) -> Self {
        let weights = vec![Rational::zero(); graph.num_edges()];
        DualWitness { graph, weights }
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Weights of check `j`, aligned with `graph().check(j)`.
    pub fn check_weights(&self, j: usize) -> &[Rational] {
        let start = self.graph.edge_offset(j);
        &self.weights[start..start + self.graph.check(j).len()]
    }

    pub fn flow(&self) -> Vec<Rational> {
        let mut f = vec![Rational::zero(); self.graph.n()];
        for ((_, i), w) in self.graph.edges().zip(&self.weights) {
            f[i] += w;
        }
        f
    }

    /// Pairwise constraint at every check: the two smallest weights sum to
    /// something nonnegative.
    pub fn satisfies_check_constraints(&self) -> bool {
        (0..self.graph.num_checks()).all(|j| {
            let ws = self.check_weights(j);
            if ws.len() < 2 {
                return true;
            }
            let (mut a, mut b) = (&ws[0], &ws[1]);
            if b < a {
                std::mem::swap(&mut a, &mut b);
            }
            for w in &ws[2..] {
                if w < a {
                    b = a;
                    a = w;
                } else if w < b {
                    b = w;
                }
            }
            !(a + b).is_negative()
        })
    }

    pub fn verify(&self, llr: &[Rational]) -> bool {
        llr.len() == self.graph.n()
            && self.satisfies_check_constraints()
            && self.flow().iter().zip(llr).all(|(f, l)| f < l)
    }

    pub fn superpose(&self, other: &DualWitness) -> Result<DualWitness> {
        if self.graph != other.graph {
            return Err(Error::GraphMismatch);
        }
        let weights = self.weights.iter().zip(&other.weights).map(|(a, b)| a + b).collect();
        Ok(DualWitness { graph: self.graph.clone(), weights })
    }

    /// The same witness on a larger graph, zero on the new checks.
    pub fn extend_by_zeros(&self, target: &TannerGraph) -> Result<DualWitness> {
        if target.n() != self.graph.n() {
            return Err(Error::GraphMismatch);
        }
        let mut out = DualWitness::zero(target.clone());
        for j in 0..self.graph.num_checks() {
            let t = target.find_check(self.graph.check(j)).ok_or(Error::GraphMismatch)?;
            let start = target.edge_offset(t);
            let len = self.graph.check(j).len();
            out.weights[start..start + len].clone_from_slice(self.check_weights(j));
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: &Rational) -> DualWitness {
        DualWitness {
            graph: self.graph.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }
}

pub fn verify_witness(w: &DualWitness, llr: &[Rational]) -> bool {
    w.verify(llr)
}

/// Searches for the witness with the largest uniform slack `t` in
/// `F(w) <= l - t`. Returns it with `t` when `t > 0`.
///
/// The pairwise cone at a check is generated by the unit vectors and by
/// `-e_i + sum_{i' != i} e_i'`, so `w(i, j) = Y_j - 2 y_ji` with `y >= 0`
/// and `Y_j = sum_i y_ji` covers it exactly.
pub fn find_witness(graph: &TannerGraph, llr: &[Rational]) -> Result<Option<(DualWitness, Rational)>> {
    find_witness_with(graph, llr, SolveStrategy::default())
}

pub fn find_witness_with(
    graph: &TannerGraph,
    llr: &[Rational],
    strategy: SolveStrategy,
) -> Result<Option<(DualWitness, Rational)>> {
    let n = graph.n();
    if llr.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: llr.len() });
    }
    if n == 0 {
        return Ok(None);
    }
    let lo = llr.iter().min().unwrap().clone();
    let hi = llr.iter().max().unwrap().clone();
    let edges = graph.num_edges();
    let u = edges;

    // Variable k collects +y_ji from every other edge of its checks and
    // -y_jk from its own edge.
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![vec![]; n];
    for j in 0..graph.num_checks() {
        let check = graph.check(j);
        let start = graph.edge_offset(j);
        for &k in check {
            for (pos, &i) in check.iter().enumerate() {
                rows[k].push((start + pos, int(if i == k { -1 } else { 1 })));
            }
        }
    }
    let mut objective = vec![Rational::zero(); edges + 1];
    objective[u] = int(-1);
    let mut lp = LinearProgram::new(edges + 1, objective);
    for (k, mut row) in rows.into_iter().enumerate() {
        row.push((u, int(1)));
        lp.inequalities.push(SparseRow::new(row, &llr[k] - &lo));
    }
    // Only binds when degree-1 checks make the slack unbounded; it still
    // leaves t >= 1 in that case.
    lp.inequalities.push(SparseRow::new(vec![(u, int(1))], hi.abs() + lo.abs() + int(1)));

    let sol = simplex_solve(&lp, strategy)?;
    let slack = &lo + &sol.point[u];
    if !slack.is_positive() {
        return Ok(None);
    }
    let mut weights = Vec::with_capacity(edges);
    for j in 0..graph.num_checks() {
        let start = graph.edge_offset(j);
        let ys = &sol.point[start..start + graph.check(j).len()];
        let total: Rational = ys.iter().sum();
        weights.extend(ys.iter().map(|y| &total - y - y));
    }
    Ok(Some((DualWitness::new(graph.clone(), weights)?, slack)))
}

pub fn superpose(w1: &DualWitness, w2: &DualWitness) -> Result<DualWitness> {
    w1.superpose(w2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrimReport {
    pub k: usize,
    /// Check indices of the input witness's graph that were dropped.
    pub removed_checks: Vec<usize>,
    pub kept: DualWitness,
    /// Per variable, `sum over removed j of max(-w(i, j), 0)`.
    pub removed_flow: Vec<Rational>,
    /// Variables whose removed flow is at least `eps / 2`.
    pub risky_set: Vec<usize>,
    /// `2 n ||L||_inf / (eps (k - 1))`.
    pub bound_rhs: f64,
    pub within_bound: bool,
}

impl TrimReport {
    pub fn flagged(&self) -> bool {
        !self.within_bound
    }
}

/// Drops the checks of degree above `k` from `w`. `d` is the largest check
/// degree of the original (non-redundant) graph.
pub fn trim(
    w: &DualWitness,
    d: usize,
    k: usize,
    eps: &Rational,
    llr_inf: &Rational,
) -> Result<(DualWitness, TrimReport)> {
    if k < d {
        return Err(Error::KBelowMaxOriginalDegree { k, d });
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("trimming needs k >= 2, got {k}")));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("excess must be positive, got {eps}")));
    }
    let graph = w.graph();
    let (kept_graph, kept) = graph.restrict_degree(k);
    let mut kept_weights = Vec::with_capacity(kept_graph.num_edges());
    for &j in &kept {
        kept_weights.extend_from_slice(w.check_weights(j));
    }
    let kept_witness = DualWitness::new(kept_graph, kept_weights)?;

    let mut is_kept = vec![false; graph.num_checks()];
    for &j in &kept {
        is_kept[j] = true;
    }
    let removed_checks: Vec<usize> = (0..graph.num_checks()).filter(|&j| !is_kept[j]).collect();
    let mut removed_flow = vec![Rational::zero(); graph.n()];
    for &j in &removed_checks {
        for (&i, wij) in graph.check(j).iter().zip(w.check_weights(j)) {
            if wij.is_negative() {
                removed_flow[i] -= wij;
            }
        }
    }
    let half = eps / int(2);
    let risky_set: Vec<usize> = (0..graph.n()).filter(|&i| removed_flow[i] >= half).collect();
    let n = graph.n() as i64;
    let rhs = int(2 * n) * llr_inf / (eps * int(k as i64 - 1));
    let within_bound = int(risky_set.len() as i64) <= rhs;
    let report = TrimReport {
        k,
        removed_checks,
        kept: kept_witness.clone(),
        removed_flow,
        risky_set,
        bound_rhs: to_f64(&rhs),
        within_bound,
    };
    Ok((kept_witness, report))
}

/// `tau_i = -||L||_inf` on `risky`, `eps / 2` elsewhere.
pub fn build_tau(risky: &[usize], eps: &Rational, llr_inf: &Rational, n: usize) -> Vec<Rational> {
    let mut tau = vec![eps / int(2); n];
    for &i in risky {
        tau[i] = -llr_inf;
    }
    tau
}

/// How far `w` is from primitive with respect to `shifted` (`l - eps`):
/// flow received by variables with positive shifted LLR, and flow sent by
/// the others. Both are zero for a primitive witness.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitivityDefect {
    pub inflow_to_positive: Rational,
    pub outflow_from_nonpositive: Rational,
}

impl PrimitivityDefect {
    pub fn is_primitive(&self) -> bool {
        self.inflow_to_positive.is_zero() && self.outflow_from_nonpositive.is_zero()
    }
}

pub fn primitivity_defect(w: &DualWitness, shifted: &[Rational]) -> PrimitivityDefect {
    let mut inflow = Rational::zero();
    let mut outflow = Rational::zero();
    for ((_, i), wij) in w.graph().edges().zip(w.weights()) {
        if shifted[i].is_positive() && wij.is_negative() {
            inflow -= wij;
        } else if !shifted[i].is_positive() && wij.is_positive() {
            outflow += wij;
        }
    }
    PrimitivityDefect { inflow_to_positive: inflow, outflow_from_nonpositive: outflow }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepairOutcome {
    /// `w^k + v^k` verifies against `l` on the trimmed graph.
    Repaired { witness: DualWitness, report: TrimReport },
    /// `tau` has no witness on the base graph.
    NoTauWitness { report: TrimReport },
    /// Both pieces were found but their sum does not verify against `l`.
    VerificationFailed { witness: DualWitness, report: TrimReport },
}

impl RepairOutcome {
    pub fn report(&self) -> &TrimReport {
        match self {
            RepairOutcome::Repaired { report, .. }
            | RepairOutcome::NoTauWitness { report }
            | RepairOutcome::VerificationFailed { report, .. } => report,
        }
    }

    pub fn witness(&self) -> Option<&DualWitness> {
        match self {
            RepairOutcome::Repaired { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// Trims `w` (a witness for `l - eps` on a redundant graph built from
/// `base`) to degree `k`, then patches the lost flow with a witness for
/// `tau` found on `base`.
pub fn repair_pipeline(
    base: &TannerGraph,
    w: &DualWitness,
    llr: &[Rational],
    eps: &Rational,
    llr_inf: &Rational,
    k: usize,
) -> Result<RepairOutcome> {
    if llr.len() != base.n() {
        return Err(Error::DimensionMismatch { expected: base.n(), got: llr.len() });
    }
    let (wk, report) = trim(w, base.max_check_degree(), k, eps, llr_inf)?;
    let tau = build_tau(&report.risky_set, eps, llr_inf, base.n());
    let Some((v, _)) = find_witness(base, &tau)? else {
        return Ok(RepairOutcome::NoTauWitness { report });
    };
    let vk = v.extend_by_zeros(wk.graph())?;
    let sum = wk.superpose(&vk)?;
    if sum.verify(llr) {
        Ok(RepairOutcome::Repaired { witness: sum, report })
    } else {
        Ok(RepairOutcome::VerificationFailed { witness: sum, report })
    }
}
