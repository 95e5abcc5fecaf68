//! The selection functions: maximum entropy, center of mass, the trivial
//! selector, and their representation-independent variants.

mod centroid;
mod maxent;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PolytopeError, SelectError};
use crate::polytope::{ConstraintSet, PolySet, SelectionSet};

/// Identifier of a selection function. The CLI and the audit harness address
/// selectors only through this enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectorId {
    Maxent,
    Centroid,
    Trivial,
    RiMaxent,
    RiCentroid,
}

impl SelectorId {
    pub const ALL: [SelectorId; 5] = [
        SelectorId::Maxent,
        SelectorId::Centroid,
        SelectorId::Trivial,
        SelectorId::RiMaxent,
        SelectorId::RiCentroid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectorId::Maxent => "maxent",
            SelectorId::Centroid => "centroid",
            SelectorId::Trivial => "trivial",
            SelectorId::RiMaxent => "ri-maxent",
            SelectorId::RiCentroid => "ri-centroid",
        }
    }

    /// The underlying selector for the representation-independent variants.
    pub fn base(self) -> SelectorId {
        match self {
            SelectorId::RiMaxent => SelectorId::Maxent,
            SelectorId::RiCentroid => SelectorId::Centroid,
            other => other,
        }
    }

    pub fn is_ri(self) -> bool {
        matches!(self, SelectorId::RiMaxent | SelectorId::RiCentroid)
    }

    /// Whether results can carry floating-point noise (anything built on the
    /// entropy maximizer).
    pub fn may_be_inexact(self) -> bool {
        matches!(self, SelectorId::Maxent | SelectorId::RiMaxent)
    }
}

impl fmt::Display for SelectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectorId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "maxent" => Ok(SelectorId::Maxent),
            "centroid" => Ok(SelectorId::Centroid),
            "trivial" => Ok(SelectorId::Trivial),
            "ri-maxent" => Ok(SelectorId::RiMaxent),
            "ri-centroid" => Ok(SelectorId::RiCentroid),
            other => Err(format!("unknown selector `{other}`")),
        }
    }
}

/// A selection result. `exact` is false only when the entropy maximizer had
/// to keep a full-precision numeric point instead of a snapped rational one.
#[derive(Debug, Clone)]
pub struct Selection {
    pub set: SelectionSet,
    pub exact: bool,
}

impl Selection {
    fn exact(set: SelectionSet) -> Self {
        Selection { set, exact: true }
    }
}

/// Applies the selector named by `id` to `j`. Infeasible input selects the
/// empty set; the representation-independent selectors propagate the empty
/// case as an error from the partition machinery.
pub fn select(id: SelectorId, j: &ConstraintSet) -> Result<Selection, SelectError> {
    match id {
        SelectorId::Maxent => select_maxent(j),
        SelectorId::Centroid => select_centroid(j),
        SelectorId::Trivial => Ok(select_trivial(j)),
        SelectorId::RiMaxent | SelectorId::RiCentroid => {
            crate::ritransform::ri_select(id.base(), j)
        }
    }
}

/// The entropy-maximal measure of `j` (a singleton for closed convex sets),
/// or `Empty` when `j` is infeasible.
pub fn select_maxent(j: &ConstraintSet) -> Result<Selection, SelectError> {
    if !j.is_feasible() {
        return Ok(Selection::exact(SelectionSet::Empty));
    }
    let result = maxent::maxent(j)?;
    Ok(Selection {
        set: SelectionSet::Point(result.measure),
        exact: result.exact,
    })
}

/// The center of mass of `j` under Lebesgue measure on its affine hull, or
/// `Empty` when `j` is infeasible. Exact.
pub fn select_centroid(j: &ConstraintSet) -> Result<Selection, SelectError> {
    match centroid::centroid(j) {
        Ok(m) => Ok(Selection::exact(SelectionSet::Point(m))),
        Err(PolytopeError::Infeasible) => Ok(Selection::exact(SelectionSet::Empty)),
        Err(e) => Err(SelectError::Polytope(e)),
    }
}

/// The trivial selector: the whole set.
pub fn select_trivial(j: &ConstraintSet) -> Selection {
    Selection::exact(if j.is_feasible() {
        SelectionSet::Poly(PolySet::from_hrep(j.clone()))
    } else {
        SelectionSet::Empty
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::test_util::{cs_sparse, ge, le, simplex_space};
    use crate::rational::{rat, Rational};
    use crate::space::Event;

    fn coin_set() -> ConstraintSet {
        cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(3, 5)),
                le(&[(0, Rational::one())], rat(9, 10)),
            ],
        )
    }

    #[test]
    fn maxent_and_centroid_on_coin_set() {
        let me = select_maxent(&coin_set()).unwrap();
        match me.set {
            SelectionSet::Point(m) => assert_eq!(m.weights(), &[rat(3, 5), rat(2, 5)]),
            other => panic!("expected point, got {other:?}"),
        }
        let cm = select_centroid(&coin_set()).unwrap();
        match cm.set {
            SelectionSet::Point(m) => assert_eq!(m.weights(), &[rat(3, 4), rat(1, 4)]),
            other => panic!("expected point, got {other:?}"),
        }
    }

    #[test]
    fn election_examples() {
        let j = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(1, 20)),
                ge(&[(1, Rational::one())], rat(11, 20)),
            ],
        );
        let me = select_maxent(&j).unwrap();
        match me.set {
            SelectionSet::Point(m) => assert_eq!(m.weight(0), &rat(9, 20)),
            other => panic!("{other:?}"),
        }
        let cm = select_centroid(&j).unwrap();
        match cm.set {
            SelectionSet::Point(m) => assert_eq!(m.weight(0), &rat(1, 4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn event_bound_example() {
        // P(a1 or a2 or a3) <= 9/10 over the four models of two variables:
        // maxent is uniform and the event gets value 3/4.
        let j = cs_sparse(
            4,
            vec![le(
                &[(0, Rational::one()), (1, Rational::one()), (2, Rational::one())],
                rat(9, 10),
            )],
        );
        let me = select_maxent(&j).unwrap();
        match &me.set {
            SelectionSet::Point(m) => {
                assert_eq!(m.weights(), &vec![rat(1, 4); 4][..]);
                let b = Event::from_indices(m.space(), [0, 1, 2]).unwrap();
                assert_eq!(m.event_mass(&b), rat(3, 4));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_returns_the_set() {
        let sel = select_trivial(&coin_set());
        match sel.set {
            SelectionSet::Poly(p) => {
                let verts = p.canonical_vertices().unwrap();
                assert_eq!(verts.len(), 2);
                assert_eq!(verts[0].weights(), &[rat(3, 5), rat(2, 5)]);
                assert_eq!(verts[1].weights(), &[rat(9, 10), rat(1, 10)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_selects_empty() {
        let bad = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(3, 5)),
                le(&[(0, Rational::one())], rat(2, 5)),
            ],
        );
        assert!(matches!(select_maxent(&bad).unwrap().set, SelectionSet::Empty));
        assert!(matches!(select_centroid(&bad).unwrap().set, SelectionSet::Empty));
        assert!(matches!(select_trivial(&bad).set, SelectionSet::Empty));
    }

    #[test]
    fn full_simplex_centroid() {
        let j = ConstraintSet::unconstrained(simplex_space(3));
        let cm = select_centroid(&j).unwrap();
        match cm.set {
            SelectionSet::Point(m) => assert_eq!(m.weights(), &vec![rat(1, 3); 3][..]),
            other => panic!("{other:?}"),
        }
    }
}
