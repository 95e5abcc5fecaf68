//! The representation-independence transform: apply a base selector on the
//! coarsest-partition quotient and extend the result back, plus the concrete
//! checker for representation independence on variant scenarios.

use serde::Serialize;

use crate::embedding::{is_representational_variants, Embedding};
use crate::error::SelectError;
use crate::measure::Measure;
use crate::partition::{coarsest_partition, extend, restrict};
use crate::polytope::{approx_equal_sets, equal_sets, ConstraintSet, SelectionSet};
use crate::rational::Rational;
use crate::selectors::{select, Selection, SelectorId};
use crate::space::StateSpace;

/// Tolerance for set comparisons that involve the entropy maximizer.
pub const RI_TOLERANCE: f64 = 1e-8;

/// Applies `base` on the quotient by the coarsest partition of `j` and
/// extends the answer back; the result is tagged with the partition.
/// Errors on empty `j` (the quotient is undefined there).
pub fn ri_select(base: SelectorId, j: &ConstraintSet) -> Result<Selection, SelectError> {
    let s = coarsest_partition(j)?;
    let restricted = restrict(j, &s)?;
    let block_selection = select(base.base(), &restricted)?;
    let extended = extend(&block_selection.set, &s)?;
    Ok(Selection {
        set: extended,
        exact: block_selection.exact,
    })
}

/// Verdict of a representation-independence check.
#[derive(Debug, Clone, Serialize)]
pub enum RiVerdict {
    Holds,
    Fails { witness: RiWitness },
    NotAVariantPair,
}

/// A point separating the two pulled-back selections: an extreme point of
/// one side that is not in the other (up to the stated tolerance).
#[derive(Debug, Clone, Serialize)]
pub struct RiWitness {
    pub point: Measure,
    pub from_side: &'static str,
    pub tolerance: f64,
}

/// Checks representation independence of `sel` on a concrete scenario:
/// requires the pair to be representational variants, then compares the two
/// pulled-back selections. Comparisons involving the entropy maximizer use
/// the 1e-8 tolerance; all-rational paths are exact.
pub fn check_representation_independence(
    sel: SelectorId,
    j: &ConstraintSet,
    h: &ConstraintSet,
    f: &Embedding,
    g: &Embedding,
) -> Result<RiVerdict, SelectError> {
    if !is_representational_variants(j, h, f, g)? {
        return Ok(RiVerdict::NotAVariantPair);
    }
    let ij = select(sel, j)?;
    let ih = select(sel, h)?;
    let fj = f.pullback_set(&ij.set)?;
    let gh = g.pullback_set(&ih.set)?;

    let use_tolerance = sel.may_be_inexact();
    let _ = (ij.exact, ih.exact);
    let equal = if use_tolerance {
        approx_equal_sets(&fj, &gh, RI_TOLERANCE)
    } else {
        equal_sets(&fj, &gh)
    };
    if equal {
        return Ok(RiVerdict::Holds);
    }
    let tolerance = if use_tolerance { RI_TOLERANCE } else { 0.0 };
    let witness = find_witness(&fj, &gh, tolerance);
    Ok(RiVerdict::Fails {
        witness: witness.expect("unequal selections admit a separating extreme point"),
    })
}

fn find_witness(x: &SelectionSet, y: &SelectionSet, tol: f64) -> Option<RiWitness> {
    let in_set = |m: &Measure, set: &SelectionSet| -> bool {
        if tol > 0.0 {
            match set.vertices() {
                Ok(vs) => vs.iter().any(|v| v.linf_distance(m) <= tol),
                Err(_) => false,
            }
        } else {
            set.contains_measure(m).unwrap_or(false)
        }
    };
    if let Ok(vx) = x.vertices() {
        for v in vx {
            if !in_set(&v, y) {
                return Some(RiWitness {
                    point: v,
                    from_side: "first",
                    tolerance: tol,
                });
            }
        }
    }
    if let Ok(vy) = y.vertices() {
        for v in vy {
            if !in_set(&v, x) {
                return Some(RiWitness {
                    point: v,
                    from_side: "second",
                    tolerance: tol,
                });
            }
        }
    }
    None
}

/// The two-state family showing the transform's discontinuity: for positive
/// `eps` the constraint `p1 <= 1 - eps` splits the states and the transformed
/// selection is a point; at `eps = 0` the set is the whole simplex and so is
/// the selection.
pub fn continuity_probe(base: SelectorId, eps: &Rational) -> Result<Selection, SelectError> {
    assert!(
        !eps.is_negative() && *eps <= Rational::one(),
        "eps must lie in [0, 1]"
    );
    let space = StateSpace::new(vec!["a1", "a2"]).map_err(SelectError::Domain)?;
    let mut j = ConstraintSet::unconstrained(space);
    if eps.is_positive() {
        j.push(crate::polytope::LinearConstraint {
            coeffs: vec![Rational::one(), Rational::zero()],
            relation: crate::polytope::Relation::Le,
            bound: Rational::one() - eps,
        })
        .map_err(SelectError::Polytope)?;
    }
    ri_select(base.base(), &j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::test_util::{cs_sparse, eq, ge, le};
    use crate::polytope::{LinearConstraint, Relation};
    use crate::rational::rat;
    use crate::space::Event;

    fn example_47_j() -> ConstraintSet {
        let a = StateSpace::new(vec!["a1", "a2", "a3", "a4"]).unwrap();
        ConstraintSet::with(
            a,
            vec![
                LinearConstraint {
                    coeffs: vec![-Rational::one(), -Rational::one(), Rational::zero(), Rational::zero()],
                    relation: Relation::Le,
                    bound: rat(-3, 5),
                },
                LinearConstraint {
                    coeffs: vec![Rational::zero(), Rational::zero(), Rational::zero(), Rational::one()],
                    relation: Relation::Eq,
                    bound: Rational::zero(),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn ri_maxent_on_example_47() {
        let j = example_47_j();
        let sel = ri_select(SelectorId::Maxent, &j).unwrap();
        assert!(sel.exact);
        // Expected: all P with p1 + p2 = 3/5 and p4 = 0 (hence p3 = 2/5).
        let expected = SelectionSet::from_constraints(
            ConstraintSet::with(
                j.space().clone(),
                vec![
                    LinearConstraint {
                        coeffs: vec![Rational::one(), Rational::one(), Rational::zero(), Rational::zero()],
                        relation: Relation::Eq,
                        bound: rat(3, 5),
                    },
                    LinearConstraint {
                        coeffs: vec![Rational::zero(), Rational::zero(), Rational::zero(), Rational::one()],
                        relation: Relation::Eq,
                        bound: Rational::zero(),
                    },
                ],
            )
            .unwrap(),
        );
        assert!(equal_sets(&sel.set, &expected));
        // The plain maxent point is not in the transformed selection.
        let plain = select(SelectorId::Maxent, &j).unwrap();
        match plain.set {
            SelectionSet::Point(m) => {
                assert!(!sel.set.contains_measure(&m).unwrap());
            }
            other => panic!("{other:?}"),
        }
        // The transformed selection is contained in j.
        for v in sel.set.vertices().unwrap() {
            assert!(j.contains_point(&v));
        }
        // Event values: P({a1}) spans [0, 3/5] over the transformed set.
        let b = Event::from_labels(j.space(), &["a1"]).unwrap();
        let (lo, hi) = crate::polytope::event_interval(&sel.set, &b).unwrap();
        assert_eq!((lo, hi), (Rational::zero(), rat(3, 5)));
    }

    #[test]
    fn ri_is_idempotent_over_the_partition() {
        let j = example_47_j();
        let s = coarsest_partition(&j).unwrap();
        let restricted = restrict(&j, &s).unwrap();
        let block_sel = select(SelectorId::Maxent, &restricted).unwrap();
        let ri = ri_select(SelectorId::Maxent, &j).unwrap();
        // Aggregating the extended set's vertices recovers the block point.
        match block_sel.set {
            SelectionSet::Point(q) => {
                for v in ri.set.vertices().unwrap() {
                    assert_eq!(v.aggregate(&s).unwrap().weights(), q.weights());
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn continuity_probe_values() {
        // Positive eps: point (1/2, 1/2).
        let sel = continuity_probe(SelectorId::Maxent, &rat(1, 100)).unwrap();
        let verts = sel.set.vertices().unwrap();
        assert_eq!(verts.len(), 1);
        assert_eq!(verts[0].weights(), &[rat(1, 2), rat(1, 2)]);
        // eps = 0: the whole simplex.
        let sel0 = continuity_probe(SelectorId::Maxent, &Rational::zero()).unwrap();
        let free = SelectionSet::from_constraints(ConstraintSet::unconstrained(
            StateSpace::new(vec!["a1", "a2"]).unwrap(),
        ));
        assert!(equal_sets(&sel0.set, &free));
        // Centroid at eps = 1/2: blocks are singletons, centroid of [0, 1/2].
        let selc = continuity_probe(SelectorId::Centroid, &rat(1, 2)).unwrap();
        let verts = selc.set.vertices().unwrap();
        assert_eq!(verts.len(), 1);
        assert_eq!(verts[0].weights(), &[rat(1, 4), rat(3, 4)]);
    }

    #[test]
    fn ri_subset_of_j_on_small_sets() {
        for j in [
            example_47_j(),
            cs_sparse(3, vec![le(&[(0, Rational::one())], rat(3, 10))]),
            cs_sparse(
                3,
                vec![eq(&[(0, Rational::one()), (1, Rational::one())], rat(1, 2))],
            ),
            cs_sparse(2, vec![ge(&[(0, Rational::one())], rat(2, 5))]),
        ] {
            for base in [SelectorId::Maxent, SelectorId::Centroid, SelectorId::Trivial] {
                let sel = ri_select(base, &j).unwrap();
                for v in sel.set.vertices().unwrap() {
                    assert!(
                        j.contains_point_within(&v, 1e-9),
                        "{base:?} selection left the constraint set"
                    );
                }
            }
        }
    }
}
