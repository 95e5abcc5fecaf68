//! Exact centroid of a constraint polytope with respect to Lebesgue measure
//! on its affine hull.
//!
//! The polytope is triangulated by coning an interior reference point (the
//! vertex average) over its facets, each facet triangulated recursively from
//! a vertex apex. Simplex centroids are vertex averages; relative volumes are
//! determinants of edge coordinates in a fixed rational basis of the affine
//! hull, so every intermediate value stays rational and the result is exact.

use crate::error::PolytopeError;
use crate::measure::Measure;
use crate::polytope::linalg;
use crate::polytope::ConstraintSet;
use crate::rational::Rational;

/// Exact centroid of a nonempty constraint set.
pub(crate) fn centroid(j: &ConstraintSet) -> Result<Measure, PolytopeError> {
    let verts = j.vertices()?;
    if verts.len() == 1 {
        return Ok(verts.into_iter().next().unwrap());
    }
    let coords: Vec<Vec<Rational>> = verts.iter().map(|v| v.weights().to_vec()).collect();
    let n = j.space().len();

    // Affine-hull basis from vertex differences.
    let basis = independent_differences(&coords);
    let dim = basis.len();
    if dim == 0 {
        // All vertices coincide (cannot happen after dedup, but harmless).
        return Ok(verts.into_iter().next().unwrap());
    }

    // Tight-set candidates: user constraints in <= form plus coordinate
    // nonnegativity.
    let tight_sets = candidate_tight_sets(j, &coords);

    let all: Vec<usize> = (0..coords.len()).collect();
    let facets = subfacets(&tight_sets, &all, dim, &coords, None);

    // Interior reference point: vertex average.
    let count = Rational::from_int(coords.len() as i64);
    let mut reference = vec![Rational::zero(); n];
    for v in &coords {
        for (r, x) in reference.iter_mut().zip(v) {
            *r += x;
        }
    }
    for r in reference.iter_mut() {
        let v = &*r / &count;
        *r = v;
    }

    let mut total_weight = Rational::zero();
    let mut weighted_sum = vec![Rational::zero(); n];
    for facet in facets {
        let mut simplices = Vec::new();
        triangulate(&tight_sets, &facet, dim - 1, &coords, &mut simplices);
        for simplex in simplices {
            // Cone [reference, simplex]: edges from the reference point.
            let edges: Vec<Vec<Rational>> = simplex
                .iter()
                .map(|&vi| sub(&coords[vi], &reference))
                .collect();
            let det = edge_determinant(&edges, &basis);
            let weight = det.abs();
            if weight.is_zero() {
                continue;
            }
            // Simplex centroid: average of the reference point and the
            // simplex vertices.
            let m = Rational::from_int((simplex.len() + 1) as i64);
            let mut c = reference.clone();
            for &vi in &simplex {
                for (acc, x) in c.iter_mut().zip(&coords[vi]) {
                    *acc += x;
                }
            }
            for (acc, ws) in c.iter().zip(weighted_sum.iter_mut()) {
                let term = &(acc / &m) * &weight;
                *ws += &term;
            }
            total_weight += &weight;
        }
    }

    if total_weight.is_zero() {
        // Dimension >= 1 polytopes always produce positive mass.
        return Err(PolytopeError::LpStuck);
    }
    let weights: Vec<Rational> = weighted_sum.iter().map(|x| x / &total_weight).collect();
    Measure::new(j.space().clone(), weights).map_err(PolytopeError::Domain)
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A maximal independent set of difference vectors from the first vertex.
fn independent_differences(coords: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let base = &coords[0];
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut rank = 0;
    for v in &coords[1..] {
        let mut candidate: Vec<Vec<Rational>> = basis.clone();
        candidate.push(sub(v, base));
        let r = linalg::rank(candidate.clone());
        if r > rank {
            rank = r;
            basis = candidate;
        }
    }
    basis
}

/// Vertex index sets at which each candidate constraint is tight.
fn candidate_tight_sets(j: &ConstraintSet, coords: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    let n = j.space().len();
    let norm = j.normalized_le();
    let mut tight_sets = Vec::new();
    for c in norm.constraints() {
        let tight: Vec<usize> = coords
            .iter()
            .enumerate()
            .filter(|(_, v)| c.evaluate(v) == c.bound)
            .map(|(i, _)| i)
            .collect();
        tight_sets.push(tight);
    }
    for i in 0..n {
        let tight: Vec<usize> = coords
            .iter()
            .enumerate()
            .filter(|(_, v)| v[i].is_zero())
            .map(|(k, _)| k)
            .collect();
        tight_sets.push(tight);
    }
    tight_sets
}

/// The facets ((dim-1)-faces) of the face with vertex set `face`, optionally
/// excluding those containing `apex`. Found by intersecting with every
/// candidate tight set and keeping intersections of affine rank dim-1,
/// deduplicated by vertex set.
fn subfacets(
    tight_sets: &[Vec<usize>],
    face: &[usize],
    dim: usize,
    coords: &[Vec<Rational>],
    apex: Option<usize>,
) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for tight in tight_sets {
        let g: Vec<usize> = face.iter().copied().filter(|i| tight.contains(i)).collect();
        if g.len() == face.len() {
            continue; // tight on the whole face: not a proper subface
        }
        if let Some(a) = apex {
            if g.contains(&a) {
                continue;
            }
        }
        if g.is_empty() || g.len() < dim {
            continue;
        }
        if face_rank(&g, coords) != dim - 1 {
            continue;
        }
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

fn face_rank(face: &[usize], coords: &[Vec<Rational>]) -> usize {
    if face.len() <= 1 {
        return 0;
    }
    let base = &coords[face[0]];
    let diffs: Vec<Vec<Rational>> = face[1..].iter().map(|&i| sub(&coords[i], base)).collect();
    linalg::rank(diffs)
}

/// Splits the face into `dim`-simplices (as vertex index lists) by coning its
/// first vertex over the facets that avoid it.
fn triangulate(
    tight_sets: &[Vec<usize>],
    face: &[usize],
    dim: usize,
    coords: &[Vec<Rational>],
    out: &mut Vec<Vec<usize>>,
) {
    if face.len() == dim + 1 {
        out.push(face.to_vec());
        return;
    }
    let apex = face[0];
    for facet in subfacets(tight_sets, face, dim, coords, Some(apex)) {
        let mut sub_out = Vec::new();
        triangulate(tight_sets, &facet, dim - 1, coords, &mut sub_out);
        for mut s in sub_out {
            s.insert(0, apex);
            out.push(s);
        }
    }
}

/// Determinant of the edge matrix expressed in the affine-hull basis.
fn edge_determinant(edges: &[Vec<Rational>], basis: &[Vec<Rational>]) -> Rational {
    let d = basis.len();
    debug_assert_eq!(edges.len(), d);
    let mut m: Vec<Vec<Rational>> = Vec::with_capacity(d);
    for e in edges {
        match linalg::coordinates_in_span(basis, e) {
            Some(c) => m.push(c),
            None => return Rational::zero(), // edge leaves the hull: degenerate cone
        }
    }
    // m rows are edge coordinates; determinant of the d x d matrix.
    linalg::determinant(m)
}
