//! Exact vertex enumeration for polytopes inside the probability simplex.
//!
//! Brute force over candidate active sets, organized so that zeroed
//! coordinates shrink the linear solves: a candidate picks a set of user
//! inequalities and a set of coordinates to make tight, and the remaining
//! support system is solved exactly. Correct and fast enough at desk scale.

use std::collections::BTreeSet;

use crate::rational::Rational;

use super::linalg;
use super::{ConstraintSet, Relation};

/// All vertices of the set, as weight vectors in lexicographic order.
/// Empty iff the set is infeasible (a nonempty bounded polytope has
/// at least one vertex).
pub(super) fn enumerate(cs: &ConstraintSet) -> Vec<Vec<Rational>> {
    let n = cs.space().len();
    let mut eq_rows: Vec<(Vec<Rational>, Rational)> = vec![(vec![Rational::one(); n], Rational::one())];
    let mut le_rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for c in cs.constraints() {
        match c.relation {
            Relation::Eq => eq_rows.push((c.coeffs.clone(), c.bound.clone())),
            Relation::Le => le_rows.push((c.coeffs.clone(), c.bound.clone())),
        }
    }

    let eq_matrix: Vec<Vec<Rational>> = eq_rows.iter().map(|(c, _)| c.clone()).collect();
    let eq_rank = linalg::rank(eq_matrix);
    let d_free = n.saturating_sub(eq_rank);

    let mut found: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let k = le_rows.len();

    // Choose |active| user inequalities and d_free - |active| zeroed
    // coordinates; solve the support system.
    for active_count in 0..=d_free.min(k) {
        let zero_count = d_free - active_count;
        if zero_count > n {
            continue;
        }
        for_each_combination(k, active_count, &mut |active: &[usize]| {
            for_each_combination(n, zero_count, &mut |zeros: &[usize]| {
                if let Some(v) = try_candidate(n, &eq_rows, &le_rows, active, zeros) {
                    if satisfies_all(&v, &le_rows) {
                        found.insert(v);
                    }
                }
            });
        });
    }

    found.into_iter().collect()
}

/// Solves the candidate system: zeroed coordinates eliminated, equality rows
/// plus the chosen active inequalities restricted to the support. `None` when
/// the system is singular, inconsistent, or the solution leaves the simplex.
fn try_candidate(
    n: usize,
    eq_rows: &[(Vec<Rational>, Rational)],
    le_rows: &[(Vec<Rational>, Rational)],
    active: &[usize],
    zeros: &[usize],
) -> Option<Vec<Rational>> {
    let mut is_zero = vec![false; n];
    for &z in zeros {
        is_zero[z] = true;
    }
    let support: Vec<usize> = (0..n).filter(|&i| !is_zero[i]).collect();
    if support.is_empty() {
        return None;
    }

    let restrict = |coeffs: &[Rational]| -> Vec<Rational> {
        support.iter().map(|&i| coeffs[i].clone()).collect()
    };
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(eq_rows.len() + active.len());
    let mut b: Vec<Rational> = Vec::with_capacity(eq_rows.len() + active.len());
    for (coeffs, bound) in eq_rows {
        a.push(restrict(coeffs));
        b.push(bound.clone());
    }
    for &i in active {
        let (coeffs, bound) = &le_rows[i];
        a.push(restrict(coeffs));
        b.push(bound.clone());
    }

    let x = linalg::solve_unique(&a, &b)?;
    if x.iter().any(Rational::is_negative) {
        return None;
    }
    let mut full = vec![Rational::zero(); n];
    for (slot, &i) in support.iter().enumerate() {
        full[i] = x[slot].clone();
    }
    Some(full)
}

fn satisfies_all(point: &[Rational], le_rows: &[(Vec<Rational>, Rational)]) -> bool {
    le_rows.iter().all(|(coeffs, bound)| {
        let lhs: Rational = coeffs.iter().zip(point).map(|(c, p)| c * p).sum();
        lhs <= *bound
    })
}

/// Calls `f` with every size-`k` subset of `0..m`, in lexicographic order.
fn for_each_combination(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn recurse(m: usize, k: usize, start: usize, current: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if current.len() == k {
            f(current);
            return;
        }
        let remaining = k - current.len();
        for i in start..=(m.saturating_sub(remaining)) {
            current.push(i);
            recurse(m, k, i + 1, current, f);
            current.pop();
        }
    }
    if k > m {
        return;
    }
    let mut current = Vec::with_capacity(k);
    recurse(m, k, 0, &mut current, f);
}

/// Indices of points in `points` that are extreme in their convex hull
/// (i.e. not expressible as a convex combination of the others). Exact,
/// via one small feasibility LP per point.
pub(super) fn extreme_indices(points: &[Vec<Rational>]) -> Vec<usize> {
    use super::lp::{solve_lp, LpResult, RowRelation, Sense};

    if points.len() <= 1 {
        return (0..points.len()).collect();
    }
    let dim = points[0].len();
    let mut extreme = Vec::new();
    for (i, p) in points.iter().enumerate() {
        // Feasibility of p = sum alpha_w w over the other points.
        let others: Vec<&Vec<Rational>> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| w)
            .collect();
        let nvars = others.len();
        let mut rows = Vec::with_capacity(dim + 1);
        for c in 0..dim {
            let coeffs: Vec<Rational> = others.iter().map(|w| w[c].clone()).collect();
            rows.push((coeffs, RowRelation::Eq, p[c].clone()));
        }
        rows.push((vec![Rational::one(); nvars], RowRelation::Eq, Rational::one()));
        let objective = vec![Rational::zero(); nvars];
        match solve_lp(nvars, &rows, &objective, Sense::Min) {
            Some(LpResult::Infeasible) => extreme.push(i),
            Some(_) => {}
            None => extreme.push(i), // conservative: keep the point
        }
    }
    extreme
}
