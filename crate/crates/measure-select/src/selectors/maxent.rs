//! Entropy maximization over a constraint polytope.
//!
//! Pipeline: coordinates that are zero over the whole set are eliminated
//! exactly (keeps the gradient finite); inequality constraints that hold with
//! equality everywhere are reclassified; if the equality system then pins a
//! unique point it is solved exactly, otherwise a log-barrier Newton method
//! drives the KKT residual below 1e-9. Numeric optima are snapped back to
//! exact rationals when a candidate (active-face solve or small-denominator
//! rounding) is exactly feasible and entropy-optimal within 1e-9; otherwise
//! the result is returned at full precision and flagged inexact.

use crate::error::{PolytopeError, SelectError};
use crate::measure::Measure;
use crate::polytope::linalg;
use crate::polytope::lp::Sense;
use crate::polytope::{ConstraintSet, LinearConstraint, Relation};
use crate::rational::Rational;
use crate::space::StateSpace;

const KKT_TOL: f64 = 1e-10;
const SNAP_TOL: f64 = 1e-9;
const MAX_DENOM: u64 = 1_000_000;
const ITERATION_CAP: usize = 100_000;

pub(crate) struct MaxentPoint {
    pub measure: Measure,
    pub exact: bool,
}

/// The unique entropy maximizer of a nonempty constraint set.
pub(crate) fn maxent(j: &ConstraintSet) -> Result<MaxentPoint, SelectError> {
    let n = j.space().len();
    let forced = j.forced_zero_coordinates().map_err(SelectError::Polytope)?;
    let support: Vec<usize> = (0..n).filter(|&i| !forced[i]).collect();

    let reduced = reduce_to_support(j, &support)?;
    let point = solve_on_support(&reduced)?;

    // Re-embed into the full space.
    let lift = |w: Vec<Rational>| -> Result<Measure, SelectError> {
        let mut full = vec![Rational::zero(); n];
        for (slot, &i) in support.iter().enumerate() {
            full[i] = w[slot].clone();
        }
        Measure::new(j.space().clone(), full).map_err(|e| SelectError::Polytope(PolytopeError::Domain(e)))
    };
    Ok(MaxentPoint {
        measure: lift(point.weights)?,
        exact: point.exact,
    })
}

struct SupportProblem {
    space: StateSpace,
    /// Inequality constraints strictly satisfiable on the set.
    ineqs: Vec<LinearConstraint>,
    /// Equality rows (user equalities, implicit equalities), without the
    /// simplex sum row.
    eqs: Vec<(Vec<Rational>, Rational)>,
    set: ConstraintSet,
}

struct SupportPoint {
    weights: Vec<Rational>,
    exact: bool,
}

fn reduce_to_support(j: &ConstraintSet, support: &[usize]) -> Result<SupportProblem, SelectError> {
    let labels: Vec<String> = support.iter().map(|&i| j.space().label(i).to_string()).collect();
    let space = StateSpace::new(labels).map_err(|e| SelectError::Polytope(PolytopeError::Domain(e)))?;
    let restrict = |coeffs: &[Rational]| -> Vec<Rational> {
        support.iter().map(|&i| coeffs[i].clone()).collect()
    };

    let mut constraints = Vec::with_capacity(j.constraints().len());
    for c in j.constraints() {
        constraints.push(LinearConstraint {
            coeffs: restrict(&c.coeffs),
            relation: c.relation,
            bound: c.bound.clone(),
        });
    }
    let set = ConstraintSet::with(space.clone(), constraints.clone()).map_err(SelectError::Polytope)?;

    // Split into equalities and strictly-satisfiable inequalities; an
    // inequality whose left side cannot drop below its bound holds with
    // equality on the whole set.
    let mut eqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut ineqs: Vec<LinearConstraint> = Vec::new();
    for c in &constraints {
        match c.relation {
            Relation::Eq => eqs.push((c.coeffs.clone(), c.bound.clone())),
            Relation::Le => {
                let (min, _) = set.optimize(&c.coeffs, Sense::Min).map_err(SelectError::Polytope)?;
                if min == c.bound {
                    eqs.push((c.coeffs.clone(), c.bound.clone()));
                } else {
                    ineqs.push(c.clone());
                }
            }
        }
    }
    Ok(SupportProblem { space, ineqs, eqs, set })
}

fn solve_on_support(p: &SupportProblem) -> Result<SupportPoint, SelectError> {
    let m = p.space.len();

    // Independent equality rows, including the simplex sum row.
    let mut eq_matrix: Vec<Vec<Rational>> = vec![vec![Rational::one(); m]];
    let mut eq_rhs: Vec<Rational> = vec![Rational::one()];
    for (coeffs, bound) in &p.eqs {
        eq_matrix.push(coeffs.clone());
        eq_rhs.push(bound.clone());
    }
    let (eq_matrix, eq_rhs) = independent_rows(eq_matrix, eq_rhs);

    // Fully pinned: solve exactly.
    if eq_matrix.len() == m {
        if let Some(x) = linalg::solve_unique(&eq_matrix, &eq_rhs) {
            if !x.iter().any(Rational::is_negative) {
                return Ok(SupportPoint { weights: x, exact: true });
            }
        }
        return Err(SelectError::NoConvergence);
    }

    // Interior start from an exact LP maximizing the minimal slack.
    let start = interior_point(p)?;

    // Barrier Newton in f64.
    let a_eq: Vec<Vec<f64>> = eq_matrix
        .iter()
        .map(|row| row.iter().map(Rational::to_f64).collect())
        .collect();
    let ineq_rows: Vec<(Vec<f64>, f64)> = p
        .ineqs
        .iter()
        .map(|c| {
            (
                c.coeffs.iter().map(Rational::to_f64).collect(),
                c.bound.to_f64(),
            )
        })
        .collect();
    let x0: Vec<f64> = start.iter().map(Rational::to_f64).collect();
    let numeric = barrier_newton(&x0, &a_eq, &ineq_rows)?;

    // Try to snap to an exact point.
    let h_numeric = entropy_f64(&numeric);
    if let Some(exact) = snap_active_face(p, &eq_matrix, &eq_rhs, &numeric, h_numeric) {
        return Ok(SupportPoint { weights: exact, exact: true });
    }
    if let Some(exact) = snap_rounding(p, &numeric, h_numeric) {
        return Ok(SupportPoint { weights: exact, exact: true });
    }

    // Keep the full-precision numeric point, flagged inexact.
    let mut weights: Vec<Rational> = numeric
        .iter()
        .map(|&x| Rational::from_f64_exact(x.max(0.0)).expect("solver values are finite"))
        .collect();
    fix_sum(&mut weights);
    Ok(SupportPoint { weights, exact: false })
}

/// Keeps a maximal independent subset of rows (paired with rhs).
fn independent_rows(rows: Vec<Vec<Rational>>, rhs: Vec<Rational>) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let mut kept_rows: Vec<Vec<Rational>> = Vec::new();
    let mut kept_rhs: Vec<Rational> = Vec::new();
    let mut rank = 0;
    for (row, b) in rows.into_iter().zip(rhs) {
        let mut candidate = kept_rows.clone();
        candidate.push(row.clone());
        let r = linalg::rank(candidate);
        if r > rank {
            rank = r;
            kept_rows.push(row);
            kept_rhs.push(b);
        }
    }
    (kept_rows, kept_rhs)
}

/// A point of the set with every inequality slack and every coordinate
/// strictly positive: maximize the uniform slack t by exact LP.
fn interior_point(p: &SupportProblem) -> Result<Vec<Rational>, SelectError> {
    use crate::polytope::lp::{solve_lp, LpResult, RowRelation};

    let m = p.space.len();
    let nvars = m + 1; // coordinates plus slack variable t
    let mut rows: Vec<(Vec<Rational>, RowRelation, Rational)> = Vec::new();
    let mut sum_row = vec![Rational::one(); nvars];
    sum_row[m] = Rational::zero();
    rows.push((sum_row, RowRelation::Eq, Rational::one()));
    for (coeffs, bound) in &p.eqs {
        let mut row: Vec<Rational> = coeffs.clone();
        row.push(Rational::zero());
        rows.push((row, RowRelation::Eq, bound.clone()));
    }
    for c in &p.ineqs {
        let mut row = c.coeffs.clone();
        row.push(Rational::one());
        rows.push((row, RowRelation::Le, c.bound.clone()));
    }
    for i in 0..m {
        // t - x_i <= 0
        let mut row = vec![Rational::zero(); nvars];
        row[i] = -Rational::one();
        row[m] = Rational::one();
        rows.push((row, RowRelation::Le, Rational::zero()));
    }
    // Keep t bounded.
    let mut t_cap = vec![Rational::zero(); nvars];
    t_cap[m] = Rational::one();
    rows.push((t_cap, RowRelation::Le, Rational::one()));

    let mut objective = vec![Rational::zero(); nvars];
    objective[m] = Rational::one();
    match solve_lp(nvars, &rows, &objective, Sense::Max) {
        Some(LpResult::Optimal { value, mut x }) => {
            if !value.is_positive() {
                // No strictly interior point left: the equality reduction
                // above should have caught this.
                return Err(SelectError::NoConvergence);
            }
            x.truncate(m);
            Ok(x)
        }
        _ => Err(SelectError::Polytope(PolytopeError::Infeasible)),
    }
}

fn entropy_f64(x: &[f64]) -> f64 {
    x.iter().map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 }).sum()
}

/// Damped-Newton log-barrier ascent for max H(x) subject to the equality
/// rows, inequality rows kept strictly slack. Returns the final iterate once
/// the KKT residual (stationarity plus centrality) is at most 1e-10.
fn barrier_newton(
    x0: &[f64],
    a_eq: &[Vec<f64>],
    ineqs: &[(Vec<f64>, f64)],
) -> Result<Vec<f64>, SelectError> {
    let m = x0.len();
    let e = a_eq.len();
    let mut x = x0.to_vec();
    let mut mu: f64 = 0.1;
    let mut iterations = 0usize;

    loop {
        // Inner Newton loop at this barrier weight.
        for _ in 0..60 {
            iterations += 1;
            if iterations > ITERATION_CAP {
                return Err(SelectError::NoConvergence);
            }
            let slacks: Vec<f64> = ineqs.iter().map(|(a, b)| b - dot(a, &x)).collect();
            // Gradient of H + mu * sum log s.
            let mut grad: Vec<f64> = x.iter().map(|&p| -p.ln() - 1.0).collect();
            for ((a, _), &s) in ineqs.iter().zip(&slacks) {
                for (g, &ai) in grad.iter_mut().zip(a) {
                    *g -= mu * ai / s;
                }
            }
            // Hessian: diag(-1/x) - mu * sum a a^T / s^2.
            let mut hess = vec![vec![0.0; m]; m];
            for (i, &p) in x.iter().enumerate() {
                hess[i][i] = -1.0 / p;
            }
            for ((a, _), &s) in ineqs.iter().zip(&slacks) {
                let w = mu / (s * s);
                for i in 0..m {
                    if a[i] == 0.0 {
                        continue;
                    }
                    for k in 0..m {
                        hess[i][k] -= w * a[i] * a[k];
                    }
                }
            }
            // KKT system: [H A^T; A 0] [dx; nu] = [-grad; 0].
            let dim = m + e;
            let mut kkt = vec![vec![0.0; dim + 1]; dim];
            for i in 0..m {
                for k in 0..m {
                    kkt[i][k] = hess[i][k];
                }
                for (r, row) in a_eq.iter().enumerate() {
                    kkt[i][m + r] = row[i];
                }
                kkt[i][dim] = -grad[i];
            }
            for (r, row) in a_eq.iter().enumerate() {
                for i in 0..m {
                    kkt[m + r][i] = row[i];
                }
                kkt[m + r][dim] = 0.0;
            }
            let sol = solve_f64(&mut kkt).ok_or(SelectError::NoConvergence)?;
            let dx = &sol[..m];
            let nu = &sol[m..];

            // Projected stationarity residual.
            let mut residual: f64 = 0.0;
            for i in 0..m {
                let mut r = grad[i];
                for (rr, row) in a_eq.iter().enumerate() {
                    r -= nu[rr] * row[i];
                }
                residual = residual.max(r.abs());
            }
            if residual <= mu.min(KKT_TOL).max(1e-12) {
                break;
            }

            // Backtracking line search preserving positivity and slack.
            let mut alpha: f64 = 1.0;
            let value = |xv: &[f64]| -> Option<f64> {
                if xv.iter().any(|&p| p <= 0.0) {
                    return None;
                }
                let mut v = entropy_f64(xv);
                for (a, b) in ineqs {
                    let s = b - dot(a, xv);
                    if s <= 0.0 {
                        return None;
                    }
                    v += mu * s.ln();
                }
                Some(v)
            };
            let current = value(&x).ok_or(SelectError::NoConvergence)?;
            let mut moved = false;
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(dx).map(|(&p, &d)| p + alpha * d).collect();
                if let Some(v) = value(&trial) {
                    if v >= current - 1e-15 {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break; // stalled at numeric precision
            }
        }

        if mu <= 1e-13 {
            return Ok(x);
        }
        mu *= 0.15;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_f64(aug: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let n = aug.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| {
            aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap()
        })?;
        if aug[pivot][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = aug[row][col] / aug[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..=n {
                let delta = f * aug[col][k];
                aug[row][k] -= delta;
            }
        }
    }
    Some((0..n).map(|i| aug[i][n] / aug[i][i]).collect())
}

/// Exact solve of the near-active constraint system; accepted when it pins a
/// unique feasible point whose entropy matches the numeric optimum.
fn snap_active_face(
    p: &SupportProblem,
    eq_matrix: &[Vec<Rational>],
    eq_rhs: &[Rational],
    numeric: &[f64],
    h_numeric: f64,
) -> Option<Vec<Rational>> {
    let mut rows: Vec<Vec<Rational>> = eq_matrix.to_vec();
    let mut rhs: Vec<Rational> = eq_rhs.to_vec();
    for c in &p.ineqs {
        let slack = c.bound.to_f64() - c.coeffs.iter().map(Rational::to_f64).zip(numeric).map(|(a, &x)| a * x).sum::<f64>();
        if slack.abs() <= 1e-7 {
            rows.push(c.coeffs.clone());
            rhs.push(c.bound.clone());
        }
    }
    for (i, &x) in numeric.iter().enumerate() {
        if x.abs() <= 1e-9 {
            let mut row = vec![Rational::zero(); numeric.len()];
            row[i] = Rational::one();
            rows.push(row);
            rhs.push(Rational::zero());
        }
    }
    let x = linalg::solve_unique(&rows, &rhs)?;
    accept_candidate(p, x, h_numeric)
}

/// Small-denominator rounding of each coordinate, sum repaired on the largest
/// coordinate. The repair must also stay under the denominator cap or the
/// snap is rejected.
fn snap_rounding(p: &SupportProblem, numeric: &[f64], h_numeric: f64) -> Option<Vec<Rational>> {
    let mut x: Vec<Rational> = numeric
        .iter()
        .map(|&v| Rational::approximate_f64(v.max(0.0), MAX_DENOM))
        .collect::<Option<_>>()?;
    fix_sum(&mut x);
    if x.iter().any(|w| w.denom_u64().is_none_or(|d| d > MAX_DENOM)) {
        return None;
    }
    accept_candidate(p, x, h_numeric)
}

fn accept_candidate(p: &SupportProblem, x: Vec<Rational>, h_numeric: f64) -> Option<Vec<Rational>> {
    if x.iter().any(Rational::is_negative) {
        return None;
    }
    if x.iter().sum::<Rational>() != Rational::one() {
        return None;
    }
    if !p.set.constraints().iter().all(|c| c.satisfied_by(&x)) {
        return None;
    }
    let h: f64 = x.iter().map(|w| {
        let v = w.to_f64();
        if v > 0.0 { -v * v.ln() } else { 0.0 }
    }).sum();
    if h >= h_numeric - SNAP_TOL {
        Some(x)
    } else {
        None
    }
}

/// Adjusts the largest coordinate so the vector sums to exactly one.
fn fix_sum(x: &mut [Rational]) {
    let total: Rational = x.iter().sum();
    if total == Rational::one() {
        return;
    }
    let largest = x
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.cmp(b))
        .map(|(i, _)| i)
        .unwrap();
    let deficit = Rational::one() - &total;
    x[largest] = &x[largest] + &deficit;
}
