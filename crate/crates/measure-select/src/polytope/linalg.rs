//! Exact dense linear algebra over rationals: elimination, rank, solving,
//! determinants. Sizes here are tiny (tens of rows at most), so plain
//! Gaussian elimination with first-nonzero pivoting is enough.

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Row-reduces `m` in place to row echelon form; returns the pivot columns.
pub fn row_echelon(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for cc in 0..cols {
                    let delta = &factor * &m[r][cc];
                    m[i][cc] -= &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(mut m: Matrix) -> usize {
    row_echelon(&mut m).len()
}

/// Solves `A x = b` exactly. Returns `None` when inconsistent or when the
/// solution is not unique.
pub fn solve_unique(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    if rows == 0 {
        return None;
    }
    let cols = a[0].len();
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_echelon(&mut aug);
    // Inconsistent if any pivot lands in the rhs column.
    if pivots.contains(&cols) {
        return None;
    }
    if pivots.len() < cols {
        return None; // underdetermined
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Determinant of a square matrix.
pub fn determinant(mut m: Matrix) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].recip();
        for i in (c + 1)..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] * &inv;
            for cc in c..n {
                let delta = &factor * &m[c][cc];
                m[i][cc] -= &delta;
            }
        }
    }
    det
}

/// Expresses `v` in the column span of `basis` (a list of n-vectors).
/// Returns the coordinates, or `None` if `v` is outside the span.
pub fn coordinates_in_span(basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    if basis.is_empty() {
        return if v.iter().all(Rational::is_zero) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let n = v.len();
    let d = basis.len();
    // Solve B c = v with B the n x d matrix of basis columns.
    let a: Matrix = (0..n).map(|i| (0..d).map(|j| basis[j][i].clone()).collect()).collect();
    solve_least_like(&a, v)
}

/// Solves a consistent, full-column-rank system `A x = b` where A may have
/// more rows than columns. Returns `None` if inconsistent or rank-deficient.
fn solve_least_like(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_echelon(&mut aug);
    if pivots.contains(&cols) || pivots.len() < cols {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}
