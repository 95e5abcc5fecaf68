//! Likelihood-of-evidence estimators and the Bayesian-predictive Monte-Carlo
//! oracle for the center-of-mass selector.
//!
//! `predictive_centroid_mc` draws uniform samples from the simplex and keeps
//! those within Euclidean distance epsilon of the constraint set; coordinate
//! means of the kept points estimate the uniform-prior predictive
//! distribution, whose limit is the affine-hull centroid.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EstimatorError;
use crate::measure::Measure;
use crate::polytope::ConstraintSet;
use crate::rational::Rational;
use crate::runtime::parallel_map;
use crate::space::StateSpace;

/// Monte-Carlo configuration: sample count, hull radius, and RNG seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub epsilon: Rational,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 100_000,
            epsilon: Rational::new(1, 1000),
            seed: 0,
        }
    }
}

/// Coordinate means and standard errors of the accepted samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub accepted: usize,
    pub samples: usize,
}

const CHUNK: usize = 4096;

/// Samples uniformly from the simplex, keeps points within `epsilon` of the
/// set, and returns coordinate means with standard errors. Errors when the
/// set is infeasible or no sample lands in the hull.
pub fn predictive_centroid_mc(j: &ConstraintSet, cfg: &McConfig) -> Result<McEstimate, EstimatorError> {
    assert!(cfg.samples >= 1, "sample count must be at least 1");
    assert!(cfg.epsilon.is_positive(), "epsilon must be positive");
    let verts = j.vertices()?;
    let n = j.space().len();
    let eps = cfg.epsilon.to_f64();

    let vertex_rows: Vec<Vec<f64>> = verts
        .iter()
        .map(|v| v.weights().iter().map(Rational::to_f64).collect())
        .collect();
    let constraint_rows: Vec<(Vec<f64>, f64, f64)> = j
        .normalized_le()
        .constraints()
        .iter()
        .map(|c| {
            let coeffs: Vec<f64> = c.coeffs.iter().map(Rational::to_f64).collect();
            let norm = coeffs.iter().map(|x| x * x).sum::<f64>().sqrt();
            (coeffs, c.bound.to_f64(), norm.max(1e-12))
        })
        .collect();

    let chunks: Vec<(u64, usize)> = (0..cfg.samples.div_ceil(CHUNK))
        .map(|i| {
            let start = i * CHUNK;
            let count = CHUNK.min(cfg.samples - start);
            (i as u64, count)
        })
        .collect();

    let partials = parallel_map(chunks, |(chunk_idx, count)| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ chunk_idx.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut sum = vec![0.0f64; n];
        let mut sumsq = vec![0.0f64; n];
        let mut kept = 0usize;
        let mut x = vec![0.0f64; n];
        for _ in 0..count {
            sample_simplex(&mut rng, &mut x);
            if accepts(&x, eps, &vertex_rows, &constraint_rows) {
                kept += 1;
                for (i, &v) in x.iter().enumerate() {
                    sum[i] += v;
                    sumsq[i] += v * v;
                }
            }
        }
        (sum, sumsq, kept)
    });

    let mut sum = vec![0.0f64; n];
    let mut sumsq = vec![0.0f64; n];
    let mut accepted = 0usize;
    for (s, sq, k) in partials {
        for i in 0..n {
            sum[i] += s[i];
            sumsq[i] += sq[i];
        }
        accepted += k;
    }
    if accepted == 0 {
        return Err(EstimatorError::ZeroAcceptance);
    }
    let m = accepted as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_err: Vec<f64> = (0..n)
        .map(|i| {
            let var = ((sumsq[i] - sum[i] * sum[i] / m) / (m - 1.0).max(1.0)).max(0.0);
            (var / m).sqrt()
        })
        .collect();
    Ok(McEstimate {
        mean,
        std_err,
        accepted,
        samples: cfg.samples,
    })
}

/// Uniform sample from the simplex by normalizing exponential spacings.
fn sample_simplex(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut total = 0.0;
    for x in out.iter_mut() {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let e = -u.ln();
        *x = e;
        total += e;
    }
    for x in out.iter_mut() {
        *x /= total;
    }
}

/// Distance-based acceptance: inside the constraint set is an immediate
/// accept; a violated constraint gives a distance lower bound for an
/// immediate reject; otherwise the exact distance to the vertex hull is
/// computed by a small quadratic solve.
fn accepts(x: &[f64], eps: f64, verts: &[Vec<f64>], constraints: &[(Vec<f64>, f64, f64)]) -> bool {
    let mut inside = true;
    for (coeffs, bound, norm) in constraints {
        let lhs: f64 = coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
        let violation = lhs - bound;
        if violation > 0.0 {
            inside = false;
            if violation / norm > eps {
                return false;
            }
        }
    }
    if inside {
        return true;
    }
    hull_distance_sq(x, verts) <= eps * eps
}

/// Squared distance from `x` to the convex hull of `verts`, by pairwise
/// Frank-Wolfe with away steps over the hull weights.
fn hull_distance_sq(x: &[f64], verts: &[Vec<f64>]) -> f64 {
    let n = x.len();
    let k = verts.len();
    if k == 1 {
        return dist_sq(&verts[0], x);
    }
    // Start from the closest vertex.
    let mut alpha = vec![0.0f64; k];
    let start = (0..k)
        .min_by(|&a, &b| {
            dist_sq(&verts[a], x)
                .partial_cmp(&dist_sq(&verts[b], x))
                .unwrap()
        })
        .unwrap();
    alpha[start] = 1.0;
    let mut y: Vec<f64> = verts[start].clone();

    for _ in 0..500 {
        // gradient of ||y - x||^2 is 2 (y - x); constants drop out of argmin.
        let towards = (0..k)
            .min_by(|&a, &b| {
                inner(&verts[a], &y, x)
                    .partial_cmp(&inner(&verts[b], &y, x))
                    .unwrap()
            })
            .unwrap();
        let away = (0..k)
            .filter(|&i| alpha[i] > 0.0)
            .max_by(|&a, &b| {
                inner(&verts[a], &y, x)
                    .partial_cmp(&inner(&verts[b], &y, x))
                    .unwrap()
            })
            .unwrap();
        let gap: f64 = (0..n).map(|i| 2.0 * (y[i] - x[i]) * (y[i] - verts[towards][i])).sum();
        if gap <= 1e-14 {
            break;
        }
        let away_gain: f64 = (0..n).map(|i| 2.0 * (y[i] - x[i]) * (verts[away][i] - y[i])).sum();
        let (dir_from, step_cap, is_away) = if away_gain > gap && alpha[away] < 1.0 {
            (away, alpha[away] / (1.0 - alpha[away]), true)
        } else {
            (towards, 1.0, false)
        };
        // Direction d = s - y (toward) or y - a (away).
        let mut d = vec![0.0f64; n];
        for i in 0..n {
            d[i] = if is_away {
                y[i] - verts[dir_from][i]
            } else {
                verts[dir_from][i] - y[i]
            };
        }
        let dd: f64 = d.iter().map(|v| v * v).sum();
        if dd <= 1e-30 {
            break;
        }
        let descent: f64 = (0..n).map(|i| -(2.0 * (y[i] - x[i])) * d[i]).sum();
        let mut t = descent / (2.0 * dd);
        if t <= 0.0 {
            break;
        }
        t = t.min(step_cap);
        for i in 0..n {
            y[i] += t * d[i];
        }
        // Update weights.
        if is_away {
            let scale = 1.0 + t;
            for a in alpha.iter_mut() {
                *a *= scale;
            }
            alpha[dir_from] -= t;
            if alpha[dir_from] < 1e-15 {
                alpha[dir_from] = 0.0;
            }
        } else {
            let scale = 1.0 - t;
            for a in alpha.iter_mut() {
                *a *= scale;
            }
            alpha[dir_from] += t;
        }
    }
    dist_sq(&y, x)
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// 2 (y - x) . v, the part of the linearized objective that depends on v.
fn inner(v: &[f64], y: &[f64], x: &[f64]) -> f64 {
    v.iter().zip(y.iter().zip(x)).map(|(vi, (yi, xi))| 2.0 * (yi - xi) * vi).sum()
}

/// Midpoint of a probability interval: the estimate under the symmetric
/// confidence-interval generation story.
pub fn interval_midpoint_estimate(lo: &Rational, hi: &Rational) -> Result<Rational, EstimatorError> {
    if lo.is_negative() || lo > hi || *hi > Rational::one() {
        return Err(EstimatorError::BadInterval);
    }
    Ok(&(lo + hi) / &Rational::from_int(2))
}

/// Normalizes per-state lower bounds: the estimate under the partial-count
/// generation story. Bounds must be nonnegative, sum to at most 1, and not
/// all be zero.
pub fn partial_count_extrapolation(
    space: &StateSpace,
    lower_bounds: &[Rational],
) -> Result<Measure, EstimatorError> {
    if lower_bounds.len() != space.len() {
        return Err(EstimatorError::Domain(crate::error::DomainError::WeightLength {
            got: lower_bounds.len(),
            want: space.len(),
        }));
    }
    if lower_bounds.iter().any(Rational::is_negative) {
        return Err(EstimatorError::Domain(crate::error::DomainError::NegativeWeight));
    }
    let total: Rational = lower_bounds.iter().sum();
    if total.is_zero() {
        return Err(EstimatorError::AllZeroBounds);
    }
    if total > Rational::one() {
        return Err(EstimatorError::BoundsExceedOne);
    }
    let weights: Vec<Rational> = lower_bounds.iter().map(|b| b / &total).collect();
    Measure::new(space.clone(), weights).map_err(EstimatorError::Domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::test_util::{cs_sparse, ge, le, simplex_space};
    use crate::rational::rat;
    use crate::selectors::select_centroid;
    use crate::polytope::SelectionSet;

    #[test]
    fn midpoint_examples() {
        assert_eq!(
            interval_midpoint_estimate(&rat(3, 5), &rat(9, 10)).unwrap(),
            rat(3, 4)
        );
        assert_eq!(
            interval_midpoint_estimate(&rat(2, 7), &rat(2, 7)).unwrap(),
            rat(2, 7)
        );
        assert_eq!(
            interval_midpoint_estimate(&Rational::zero(), &Rational::one()).unwrap(),
            rat(1, 2)
        );
        assert!(interval_midpoint_estimate(&rat(3, 4), &rat(1, 2)).is_err());
    }

    #[test]
    fn midpoint_agrees_with_interval_centroid() {
        let (lo, hi) = (rat(3, 5), rat(9, 10));
        let j = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], lo.clone()),
                le(&[(0, Rational::one())], hi.clone()),
            ],
        );
        let c = select_centroid(&j).unwrap();
        match c.set {
            SelectionSet::Point(m) => {
                assert_eq!(m.weight(0), &interval_midpoint_estimate(&lo, &hi).unwrap())
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partial_count_normalizes() {
        let s = StateSpace::new(vec!["pdp", "nup"]).unwrap();
        let m = partial_count_extrapolation(&s, &[rat(1, 20), rat(11, 20)]).unwrap();
        assert_eq!(m.weights(), &[rat(1, 12), rat(11, 12)]);
        // Bounds already summing to one come back unchanged.
        let m2 = partial_count_extrapolation(&s, &[rat(2, 5), rat(3, 5)]).unwrap();
        assert_eq!(m2.weights(), &[rat(2, 5), rat(3, 5)]);
        // Symmetric bounds normalize to the uniform measure.
        let m3 = partial_count_extrapolation(&s, &[rat(3, 10), rat(3, 10)]).unwrap();
        assert_eq!(m3.weights(), &[rat(1, 2), rat(1, 2)]);
        assert!(matches!(
            partial_count_extrapolation(&s, &[Rational::zero(), Rational::zero()]),
            Err(EstimatorError::AllZeroBounds)
        ));
    }

    #[test]
    fn mc_symmetric_on_free_simplex() {
        let j = crate::polytope::ConstraintSet::unconstrained(simplex_space(2));
        let cfg = McConfig {
            samples: 20_000,
            epsilon: rat(1, 1000),
            seed: 7,
        };
        let est = predictive_centroid_mc(&j, &cfg).unwrap();
        assert_eq!(est.accepted, est.samples); // everything lies inside
        assert!((est.mean[0] - 0.5).abs() <= 3.0 * est.std_err[0] + 1e-3);
    }

    #[test]
    fn mc_matches_exact_centroid_on_coin_set() {
        let j = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(3, 5)),
                le(&[(0, Rational::one())], rat(9, 10)),
            ],
        );
        let cfg = McConfig {
            samples: 60_000,
            epsilon: rat(1, 1000),
            seed: 11,
        };
        let est = predictive_centroid_mc(&j, &cfg).unwrap();
        // Exact centroid is (3/4, 1/4); allow the epsilon-hull offset.
        for (i, want) in [0.75, 0.25].iter().enumerate() {
            assert!(
                (est.mean[i] - want).abs() <= 3.0 * est.std_err[i] + cfg.epsilon.to_f64(),
                "coordinate {i}: {} vs {want} (se {})",
                est.mean[i],
                est.std_err[i]
            );
        }
    }

    #[test]
    fn mc_deterministic_per_seed() {
        let j = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(1, 2))]);
        let cfg = McConfig {
            samples: 5_000,
            epsilon: rat(1, 100),
            seed: 42,
        };
        let a = predictive_centroid_mc(&j, &cfg).unwrap();
        let b = predictive_centroid_mc(&j, &cfg).unwrap();
        assert_eq!(a.accepted, b.accepted);
        assert_eq!(a.mean, b.mean);
    }

    #[test]
    fn mc_zero_acceptance_errors() {
        // A point far from almost every sample with a tiny epsilon and very
        // few samples.
        let j = cs_sparse(
            3,
            vec![
                crate::polytope::test_util::eq(&[(0, Rational::one())], rat(1, 1000)),
                crate::polytope::test_util::eq(&[(1, Rational::one())], rat(1, 1000)),
            ],
        );
        let cfg = McConfig {
            samples: 10,
            epsilon: Rational::new(1, 1_000_000),
            seed: 1,
        };
        assert!(matches!(
            predictive_centroid_mc(&j, &cfg),
            Err(EstimatorError::ZeroAcceptance)
        ));
    }
}
