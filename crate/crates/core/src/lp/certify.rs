//! Exact verification of a basis proposed by the float simplex.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::SparseRow;
use crate::rational::Rational;

/// Solves the square system `m x = rhs` exactly with fraction-free
/// (Bareiss) elimination. Returns `None` if `m` is singular.
pub fn solve_exact(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let k = m.len();
    assert_eq!(rhs.len(), k);
    // Scale every row to integers.
    let mut rows: Vec<Vec<BigInt>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            assert_eq!(row.len(), k);
            let lcm = row.iter().chain(std::iter::once(b)).fold(BigInt::one(), |acc, v| {
                if v.is_zero() {
                    acc
                } else {
                    acc.lcm(v.denom())
                }
            });
            row.iter()
                .chain(std::iter::once(b))
                .map(|v| {
                    if v.is_zero() {
                        BigInt::zero()
                    } else {
                        v.numer() * (&lcm / v.denom())
                    }
                })
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        let (top, bottom) = rows.split_at_mut(col + 1);
        let prow = &top[col];
        let pivot_value = &prow[col];
        for row in bottom.iter_mut() {
            let factor = std::mem::take(&mut row[col]);
            if factor.is_zero() && pivot_value == &prev {
                continue;
            }
            for j in col + 1..=k {
                let mut v = pivot_value * &row[j];
                if !factor.is_zero() && !prow[j].is_zero() {
                    v -= &factor * &prow[j];
                }
                row[j] = if v.is_zero() { v } else { v / &prev };
            }
        }
        prev = pivot_value.clone();
    }

    let mut x = vec![Rational::zero(); k];
    for i in (0..k).rev() {
        let mut acc = Rational::from_integer(rows[i][k].clone());
        for j in i + 1..k {
            if !rows[i][j].is_zero() && !x[j].is_zero() {
                acc -= &x[j] * Rational::from_integer(rows[i][j].clone());
            }
        }
        x[i] = acc / Rational::from_integer(rows[i][i].clone());
    }
    Some(x)
}

/// Checks that the basis with nonbasic labels `nonbasic` is optimal for
/// `min c.x, rows, x >= 0`. On success returns the exact value and vertex.
pub(crate) fn certify_basis(
    n: usize,
    rows: &[SparseRow],
    c: &[Rational],
    nonbasic: &[usize],
) -> Option<(Rational, Vec<Rational>)> {
    let mut is_nonbasic_var = vec![false; n];
    let mut tight: Vec<usize> = vec![];
    for &label in nonbasic {
        if label < n {
            is_nonbasic_var[label] = true;
        } else if label - n < rows.len() {
            tight.push(label - n);
        } else {
            return None;
        }
    }
    let basic_vars: Vec<usize> = (0..n).filter(|&j| !is_nonbasic_var[j]).collect();
    if basic_vars.len() != tight.len() {
        return None;
    }
    let k = tight.len();
    let mut position = vec![usize::MAX; n];
    for (p, &j) in basic_vars.iter().enumerate() {
        position[j] = p;
    }
    let zero = Rational::zero();

    // Primal: tight rows hold with equality, nonbasic variables are zero.
    let mut m = vec![vec![zero.clone(); k]; k];
    for (i, &r) in tight.iter().enumerate() {
        for (j, v) in &rows[r].coeffs {
            if position[*j] != usize::MAX {
                m[i][position[*j]] += v;
            }
        }
    }
    let rhs: Vec<Rational> = tight.iter().map(|&r| rows[r].rhs.clone()).collect();
    let xb = solve_exact(&m, &rhs)?;
    let mut x = vec![zero.clone(); n];
    for (p, &j) in basic_vars.iter().enumerate() {
        if xb[p].is_negative() {
            return None;
        }
        x[j] = xb[p].clone();
    }
    if rows.iter().any(|row| row.eval(&x) > row.rhs) {
        return None;
    }

    // Dual: c = mu - A_tight^T y with y >= 0 and mu >= 0, mu zero on basic vars.
    let mt: Vec<Vec<Rational>> = (0..k).map(|p| (0..k).map(|i| m[i][p].clone()).collect()).collect();
    let neg_cb: Vec<Rational> = basic_vars.iter().map(|&j| -&c[j]).collect();
    let y = solve_exact(&mt, &neg_cb)?;
    if y.iter().any(|v| v.is_negative()) {
        return None;
    }
    let mut mu: Vec<Rational> = c.to_vec();
    for (i, &r) in tight.iter().enumerate() {
        if y[i].is_zero() {
            continue;
        }
        for (j, v) in &rows[r].coeffs {
            mu[*j] += &y[i] * v;
        }
    }
    if (0..n).any(|j| is_nonbasic_var[j] && mu[j].is_negative()) {
        return None;
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Some((value, x))
}
