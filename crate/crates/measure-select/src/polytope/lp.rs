//! Exact two-phase simplex over rationals with Bland's rule.
//!
//! All variables are nonnegative; rows are `<=` or `=` constraints. This is
//! the decision core behind feasibility, containment, partition equivalence
//! and vertex pruning, so it must be exact: no tolerances anywhere.

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRelation {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpResult {
    Infeasible,
    Unbounded,
    /// Optimal objective value and an optimal basic solution.
    Optimal { value: Rational, x: Vec<Rational> },
}

const PIVOT_CAP: usize = 200_000;

struct Tableau {
    ncols: usize,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    basis: Vec<usize>,
    z: Vec<Rational>,
    obj: Rational,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.a[row][col].recip();
        for x in self.a[row].iter_mut() {
            *x *= &inv;
        }
        self.b[row] *= &inv;
        for r in 0..self.a.len() {
            if r == row || self.a[r][col].is_zero() {
                continue;
            }
            let factor = self.a[r][col].clone();
            for c in 0..self.ncols {
                let delta = &factor * &self.a[row][c];
                self.a[r][c] -= &delta;
            }
            let delta = &factor * &self.b[row];
            self.b[r] -= &delta;
        }
        if !self.z[col].is_zero() {
            let factor = self.z[col].clone();
            for c in 0..self.ncols {
                let delta = &factor * &self.a[row][c];
                self.z[c] -= &delta;
            }
            let delta = &factor * &self.b[row];
            self.obj -= &delta;
        }
        self.basis[row] = col;
    }

    /// Subtract basic-variable costs so reduced costs of basic columns are 0.
    fn price_out(&mut self, cost: &[Rational]) {
        self.z = cost.to_vec();
        self.obj = Rational::zero();
        for row in 0..self.basis.len() {
            let var = self.basis[row];
            if self.z[var].is_zero() {
                continue;
            }
            let factor = self.z[var].clone();
            for c in 0..self.ncols {
                let delta = &factor * &self.a[row][c];
                self.z[c] -= &delta;
            }
            let delta = &factor * &self.b[row];
            self.obj -= &delta;
        }
    }

    /// Minimizes with Bland's rule. Returns false on unboundedness.
    fn run(&mut self) -> Option<bool> {
        for _ in 0..PIVOT_CAP {
            // Bland: entering column is the lowest index with negative
            // reduced cost.
            let Some(col) = (0..self.ncols).find(|&c| self.z[c].is_negative()) else {
                return Some(true);
            };
            // Ratio test; ties broken by the smallest basic variable index.
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.a.len() {
                if !self.a[r][col].is_positive() {
                    continue;
                }
                let ratio = &self.b[r] / &self.a[r][col];
                let better = match &best {
                    None => true,
                    Some((br, bratio)) => {
                        ratio < *bratio || (ratio == *bratio && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((row, _)) = best else {
                return Some(false);
            };
            self.pivot(row, col);
        }
        None
    }

    fn extract(&self, nvars: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); nvars];
        for (row, &var) in self.basis.iter().enumerate() {
            if var < nvars {
                x[var] = self.b[row].clone();
            }
        }
        x
    }
}

/// Minimizes or maximizes `objective . x` subject to the rows and `x >= 0`.
/// Exact; terminates by Bland's rule (a generous pivot cap guards against
/// implementation bugs and maps to `None`).
pub fn solve_lp(
    nvars: usize,
    rows: &[(Vec<Rational>, RowRelation, Rational)],
    objective: &[Rational],
    sense: Sense,
) -> Option<LpResult> {
    assert_eq!(objective.len(), nvars);
    let nslack = rows.iter().filter(|(_, rel, _)| *rel == RowRelation::Le).count();
    let m = rows.len();
    let ncols = nvars + nslack + m; // + artificials

    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut b: Vec<Rational> = Vec::with_capacity(m);
    let mut slack_idx = 0;
    for (coeffs, rel, bound) in rows {
        assert_eq!(coeffs.len(), nvars);
        let mut row = vec![Rational::zero(); ncols];
        row[..nvars].clone_from_slice(coeffs);
        if *rel == RowRelation::Le {
            row[nvars + slack_idx] = Rational::one();
            slack_idx += 1;
        }
        let mut rhs = bound.clone();
        if rhs.is_negative() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
            rhs = -rhs;
        }
        a.push(row);
        b.push(rhs);
    }
    let mut basis = Vec::with_capacity(m);
    for (r, row) in a.iter_mut().enumerate() {
        let art = nvars + nslack + r;
        row[art] = Rational::one();
        basis.push(art);
    }

    let mut t = Tableau {
        ncols,
        a,
        b,
        basis,
        z: vec![Rational::zero(); ncols],
        obj: Rational::zero(),
    };

    // Phase 1: drive out the artificials.
    let mut phase1_cost = vec![Rational::zero(); ncols];
    for c in (nvars + nslack)..ncols {
        phase1_cost[c] = Rational::one();
    }
    t.price_out(&phase1_cost);
    match t.run() {
        Some(true) => {}
        Some(false) => unreachable!("phase-1 objective is bounded below by zero"),
        None => return None,
    }
    if !t.obj.is_zero() {
        return Some(LpResult::Infeasible);
    }
    // Remove artificials still sitting (at value zero) in the basis.
    let art_start = nvars + nslack;
    let mut drop_rows = Vec::new();
    for row in 0..t.basis.len() {
        if t.basis[row] >= art_start {
            if let Some(col) = (0..art_start).find(|&c| !t.a[row][c].is_zero()) {
                t.pivot(row, col);
            } else {
                drop_rows.push(row); // redundant constraint
            }
        }
    }
    for &row in drop_rows.iter().rev() {
        t.a.remove(row);
        t.b.remove(row);
        t.basis.remove(row);
    }
    // Forbid artificials from re-entering.
    for row in t.a.iter_mut() {
        row.truncate(art_start);
    }
    t.ncols = art_start;

    // Phase 2.
    let negate = sense == Sense::Max;
    let mut cost = vec![Rational::zero(); art_start];
    for (c, val) in objective.iter().enumerate() {
        cost[c] = if negate { -val } else { val.clone() };
    }
    t.price_out(&cost);
    match t.run() {
        Some(true) => {
            let x = t.extract(nvars);
            let value = objective
                .iter()
                .zip(&x)
                .map(|(c, v)| c * v)
                .sum::<Rational>();
            Some(LpResult::Optimal { value, x })
        }
        Some(false) => Some(LpResult::Unbounded),
        None => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn r(vals: &[(i64, i64)]) -> Vec<Rational> {
        vals.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn simplex_rows(n: usize) -> Vec<(Vec<Rational>, RowRelation, Rational)> {
        vec![(
            vec![Rational::one(); n],
            RowRelation::Eq,
            Rational::one(),
        )]
    }

    #[test]
    fn maximize_coordinate_over_simplex() {
        let rows = simplex_rows(2);
        let obj = r(&[(1, 1), (0, 1)]);
        let res = solve_lp(2, &rows, &obj, Sense::Max).unwrap();
        assert_eq!(
            res,
            LpResult::Optimal {
                value: Rational::one(),
                x: r(&[(1, 1), (0, 1)]),
            }
        );
    }

    #[test]
    fn bounded_coordinate() {
        // max p1 s.t. p1 <= 9/10 over the 2-simplex.
        let mut rows = simplex_rows(2);
        rows.push((r(&[(1, 1), (0, 1)]), RowRelation::Le, rat(9, 10)));
        let obj = r(&[(1, 1), (0, 1)]);
        let res = solve_lp(2, &rows, &obj, Sense::Max).unwrap();
        match res {
            LpResult::Optimal { value, x } => {
                assert_eq!(value, rat(9, 10));
                assert_eq!(x, r(&[(9, 10), (1, 10)]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn minimize_with_lower_bound() {
        // min p1 s.t. p1 in [3/5, 9/10] over the 2-simplex: lower bound as -p1 <= -3/5.
        let mut rows = simplex_rows(2);
        rows.push((r(&[(-1, 1), (0, 1)]), RowRelation::Le, rat(-3, 5)));
        rows.push((r(&[(1, 1), (0, 1)]), RowRelation::Le, rat(9, 10)));
        let obj = r(&[(1, 1), (0, 1)]);
        let res = solve_lp(2, &rows, &obj, Sense::Min).unwrap();
        match res {
            LpResult::Optimal { value, x } => {
                assert_eq!(value, rat(3, 5));
                assert_eq!(x, r(&[(3, 5), (2, 5)]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible() {
        // p1 >= 3/5 and p1 <= 2/5 conflict.
        let mut rows = simplex_rows(2);
        rows.push((r(&[(-1, 1), (0, 1)]), RowRelation::Le, rat(-3, 5)));
        rows.push((r(&[(1, 1), (0, 1)]), RowRelation::Le, rat(2, 5)));
        let obj = r(&[(1, 1), (0, 1)]);
        assert_eq!(solve_lp(2, &rows, &obj, Sense::Min).unwrap(), LpResult::Infeasible);
    }

    #[test]
    fn handles_redundant_equalities() {
        // Two copies of the simplex row plus a doubled version.
        let mut rows = simplex_rows(3);
        rows.push((vec![Rational::one(); 3], RowRelation::Eq, Rational::one()));
        rows.push((
            vec![Rational::from_int(2); 3],
            RowRelation::Eq,
            Rational::from_int(2),
        ));
        let obj = r(&[(1, 1), (2, 1), (3, 1)]);
        let res = solve_lp(3, &rows, &obj, Sense::Max).unwrap();
        match res {
            LpResult::Optimal { value, .. } => assert_eq!(value, Rational::from_int(3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_guard() {
        // Klee-Minty-ish degenerate system; Bland must terminate.
        let rows = vec![
            (r(&[(1, 4), (-8, 1), (-1, 1), (9, 1)]), RowRelation::Le, rat(0, 1)),
            (r(&[(1, 2), (-12, 1), (-1, 2), (3, 1)]), RowRelation::Le, rat(0, 1)),
            (r(&[(0, 1), (0, 1), (1, 1), (0, 1)]), RowRelation::Le, rat(1, 1)),
        ];
        let obj = r(&[(-3, 4), (20, 1), (-1, 2), (6, 1)]);
        let res = solve_lp(4, &rows, &obj, Sense::Min).unwrap();
        match res {
            LpResult::Optimal { value, .. } => assert_eq!(value, rat(-5, 4)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_unbounded() {
        let rows = vec![(r(&[(-1, 1), (1, 1)]), RowRelation::Le, rat(1, 1))];
        let obj = r(&[(1, 1), (0, 1)]);
        assert_eq!(solve_lp(2, &rows, &obj, Sense::Max).unwrap(), LpResult::Unbounded);
    }
}
