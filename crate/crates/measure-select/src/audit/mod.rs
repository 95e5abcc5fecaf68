//! Executable rationality principles and the audit harness.
//!
//! Each principle is an instance-level checker: given a selector and a
//! structured instance of the principle's hypothesis, it evaluates the
//! principle's equation and returns a verdict with a re-checkable witness on
//! failure. Principles are universally quantified, so the harness can only
//! falsify or accumulate evidence, never prove.

mod generate;
mod table1;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::AuditError;
use crate::measure::Measure;
use crate::polytope::{
    approx_equal_sets, equal_sets, event_interval, product_set, relativized_set, ConstraintSet,
    PolySet, SelectionSet,
};
use crate::rational::Rational;
use crate::selectors::{select, SelectorId};
use crate::space::{Event, StateSpace};

pub use generate::{generate_instances, raw_draw_survival_rate};
pub use table1::{table1_report, CellOutcome, Mark, Table1Cell, Table1Report, Table1Row};

/// Tolerance applied when a comparison involves a numerically produced
/// maxent point.
pub const AUDIT_TOLERANCE: f64 = 1e-8;

/// The six principles under audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrincipleId {
    Relativization,
    Obstinacy,
    StrongIndependence,
    WeakIndependence,
    IrrelevantInformation,
    DimensionIndependence,
}

impl PrincipleId {
    pub const ALL: [PrincipleId; 6] = [
        PrincipleId::Relativization,
        PrincipleId::Obstinacy,
        PrincipleId::StrongIndependence,
        PrincipleId::WeakIndependence,
        PrincipleId::IrrelevantInformation,
        PrincipleId::DimensionIndependence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrincipleId::Relativization => "relativization",
            PrincipleId::Obstinacy => "obstinacy",
            PrincipleId::StrongIndependence => "strong-independence",
            PrincipleId::WeakIndependence => "weak-independence",
            PrincipleId::IrrelevantInformation => "irrelevant-information",
            PrincipleId::DimensionIndependence => "dimension-independence",
        }
    }
}

impl fmt::Display for PrincipleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrincipleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PrincipleId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown principle `{s}`"))
    }
}

/// A structured instance of a principle's hypothesis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PrincipleInstance {
    /// A split space: conditional constraints on the event and on its
    /// complement. `jb`'s space must carry the event's labels in order, and
    /// `jbc` the complement's.
    Relativization {
        space: StateSpace,
        b_labels: Vec<String>,
        jb: ConstraintSet,
        jbc: ConstraintSet,
    },
    /// `jstar` must lie between the selection of `j` and `j` itself (checked
    /// against the selector at evaluation time).
    Obstinacy { j: ConstraintSet, jstar: ConstraintSet },
    /// Marginal constraints on the two factors of a product space.
    StrongIndependence { jb: ConstraintSet, jc: ConstraintSet },
    /// Marginal constraints plus one event per factor.
    WeakIndependence {
        jb: ConstraintSet,
        jc: ConstraintSet,
        b_prime: Vec<String>,
        c_prime: Vec<String>,
    },
    /// Marginal constraints; the principle compares the first-factor
    /// marginal of the joint selection with the factor selection.
    IrrelevantInformation { jb: ConstraintSet, jc: ConstraintSet },
    /// Any constraint set; the principle appends an impossible state.
    DimensionIndependence { j: ConstraintSet },
}

impl PrincipleInstance {
    pub fn principle(&self) -> PrincipleId {
        match self {
            PrincipleInstance::Relativization { .. } => PrincipleId::Relativization,
            PrincipleInstance::Obstinacy { .. } => PrincipleId::Obstinacy,
            PrincipleInstance::StrongIndependence { .. } => PrincipleId::StrongIndependence,
            PrincipleInstance::WeakIndependence { .. } => PrincipleId::WeakIndependence,
            PrincipleInstance::IrrelevantInformation { .. } => PrincipleId::IrrelevantInformation,
            PrincipleInstance::DimensionIndependence { .. } => PrincipleId::DimensionIndependence,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Fails,
}

/// Counterexample data attached to a failing verdict; re-evaluating the
/// principle equation on it reproduces the inequality.
#[derive(Debug, Clone, Serialize)]
pub enum Witness {
    /// The two sides of a set equation differ; `separator` is an extreme
    /// point of one side missing from the other.
    SetMismatch {
        left: Vec<Measure>,
        right: Vec<Measure>,
        separator: Option<Measure>,
    },
    /// An inf or sup equation fails on a concrete event.
    BoundMismatch {
        side: &'static str,
        event: String,
        left: Rational,
        right: Rational,
    },
}

/// The outcome of checking one principle instance with one selector.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    /// Tolerance used for the comparisons (0 for fully exact paths).
    pub tolerance: f64,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

struct Comparison {
    tolerance: f64,
}

impl Comparison {
    /// Entropy-maximizer outputs are certified only to within 1e-9 of the
    /// optimum (even when snapped to clean rationals), so any comparison
    /// involving that selector is tolerance-based.
    fn new(sel: SelectorId) -> Self {
        let tolerance = if sel.may_be_inexact() { AUDIT_TOLERANCE } else { 0.0 };
        Comparison { tolerance }
    }

    fn sets_equal(&self, x: &SelectionSet, y: &SelectionSet) -> bool {
        if self.tolerance > 0.0 {
            approx_equal_sets(x, y, self.tolerance)
        } else {
            equal_sets(x, y)
        }
    }

    fn values_equal(&self, a: &Rational, b: &Rational) -> bool {
        if self.tolerance > 0.0 {
            (a - b).abs().to_f64() <= self.tolerance
        } else {
            a == b
        }
    }

    fn set_verdict(&self, equal: bool, left: &SelectionSet, right: &SelectionSet) -> Verdict {
        if equal {
            return Verdict {
                outcome: Outcome::Holds,
                witness: None,
                tolerance: self.tolerance,
            };
        }
        let lv = left.vertices().unwrap_or_default();
        let rv = right.vertices().unwrap_or_default();
        let separator = separating_point(&lv, &rv, self.tolerance);
        Verdict {
            outcome: Outcome::Fails,
            witness: Some(Witness::SetMismatch {
                left: lv,
                right: rv,
                separator,
            }),
            tolerance: self.tolerance,
        }
    }
}

fn separating_point(left: &[Measure], right: &[Measure], tol: f64) -> Option<Measure> {
    let close = |a: &Measure, b: &Measure| {
        if tol > 0.0 {
            a.linf_distance(b) <= tol
        } else {
            a.weights() == b.weights()
        }
    };
    for v in left {
        if !right.iter().any(|w| close(v, w)) {
            return Some(v.clone());
        }
    }
    for w in right {
        if !left.iter().any(|v| close(v, w)) {
            return Some(w.clone());
        }
    }
    None
}

/// Evaluates the principle's equation for the given selector on this
/// instance. Instances that do not satisfy the principle's hypotheses for
/// this selector produce a hypothesis-violation error, never a verdict.
pub fn check_principle(sel: SelectorId, inst: &PrincipleInstance) -> Result<Verdict, AuditError> {
    match inst {
        PrincipleInstance::Relativization {
            space,
            b_labels,
            jb,
            jbc,
        } => check_relativization(sel, space, b_labels, jb, jbc),
        PrincipleInstance::Obstinacy { j, jstar } => check_obstinacy(sel, j, jstar),
        PrincipleInstance::StrongIndependence { jb, jc } => check_strong_independence(sel, jb, jc),
        PrincipleInstance::WeakIndependence {
            jb,
            jc,
            b_prime,
            c_prime,
        } => check_weak_independence(sel, jb, jc, b_prime, c_prime),
        PrincipleInstance::IrrelevantInformation { jb, jc } => check_irrelevant_information(sel, jb, jc),
        PrincipleInstance::DimensionIndependence { j } => check_dimension_independence(sel, j),
    }
}

fn require_feasible(name: &str, set: &ConstraintSet) -> Result<(), AuditError> {
    if set.is_feasible() {
        Ok(())
    } else {
        Err(AuditError::HypothesisViolation(format!("{name} is empty")))
    }
}

fn check_relativization(
    sel: SelectorId,
    space: &StateSpace,
    b_labels: &[String],
    jb: &ConstraintSet,
    jbc: &ConstraintSet,
) -> Result<Verdict, AuditError> {
    let label_refs: Vec<&str> = b_labels.iter().map(String::as_str).collect();
    let b = Event::from_labels(space, &label_refs)?;
    // The side condition: the complement-side selection must be nonempty.
    require_feasible("the complement-side constraint set", jbc)?;
    require_feasible("the event-side constraint set", jb)?;

    let j = relativized_set(jb, jbc, space, &b)?;
    let ij = select(sel, &j)?;
    let ijb = select(sel, jb)?;
    let lhs = ij.set.condition_set(&b)?;
    let cmp = Comparison::new(sel);
    let _ = (ij.exact, ijb.exact);
    Ok(cmp.set_verdict(cmp.sets_equal(&lhs, &ijb.set), &lhs, &ijb.set))
}

fn check_obstinacy(sel: SelectorId, j: &ConstraintSet, jstar: &ConstraintSet) -> Result<Verdict, AuditError> {
    require_feasible("the outer constraint set", j)?;
    if !j.contains_set(jstar) {
        return Err(AuditError::HypothesisViolation(
            "the refined set is not contained in the outer set".into(),
        ));
    }
    require_feasible("the refined constraint set", jstar)?;
    let ij = select(sel, j)?;
    // Hypothesis: the selection of j lies inside jstar.
    let verts = ij
        .set
        .vertices()
        .map_err(|_| AuditError::HypothesisViolation("selection of the outer set is empty".into()))?;
    let inside = verts.iter().all(|v| {
        if sel.may_be_inexact() {
            jstar.contains_point_within(v, AUDIT_TOLERANCE)
        } else {
            jstar.contains_point(v)
        }
    });
    if !inside {
        return Err(AuditError::HypothesisViolation(
            "selection of the outer set leaves the refined set".into(),
        ));
    }
    let ijstar = select(sel, jstar)?;
    let cmp = Comparison::new(sel);
    Ok(cmp.set_verdict(cmp.sets_equal(&ijstar.set, &ij.set), &ijstar.set, &ij.set))
}

fn check_strong_independence(
    sel: SelectorId,
    jb: &ConstraintSet,
    jc: &ConstraintSet,
) -> Result<Verdict, AuditError> {
    require_feasible("the first factor set", jb)?;
    require_feasible("the second factor set", jc)?;
    let j = product_set(jb, jc);
    let ij = select(sel, &j)?;
    let ib = select(sel, jb)?;
    let ic = select(sel, jc)?;

    // Right side: the measure products of the two selections. For set-valued
    // selections the vertex-wise products generate the hull of the product
    // set; equality is checked against that hull.
    let rhs = if ib.set.is_empty() || ic.set.is_empty() {
        SelectionSet::Empty
    } else {
        let vb = ib.set.vertices()?;
        let vc = ic.set.vertices()?;
        let mut products = Vec::with_capacity(vb.len() * vc.len());
        for p in &vb {
            for q in &vc {
                products.push(p.product(q));
            }
        }
        let space = products[0].space().clone();
        let pruned = PolySet::from_vertices(space.clone(), products).canonical_vertices()?;
        SelectionSet::from_vertex_list(space, pruned)
    };

    let cmp = Comparison::new(sel);
    Ok(cmp.set_verdict(cmp.sets_equal(&ij.set, &rhs), &ij.set, &rhs))
}

fn check_weak_independence(
    sel: SelectorId,
    jb: &ConstraintSet,
    jc: &ConstraintSet,
    b_prime: &[String],
    c_prime: &[String],
) -> Result<Verdict, AuditError> {
    require_feasible("the first factor set", jb)?;
    require_feasible("the second factor set", jc)?;
    let j = product_set(jb, jc);
    let ij = select(sel, &j)?;
    let ib = select(sel, jb)?;
    let ic = select(sel, jc)?;

    let b_refs: Vec<&str> = b_prime.iter().map(String::as_str).collect();
    let c_refs: Vec<&str> = c_prime.iter().map(String::as_str).collect();
    let eb = Event::from_labels(jb.space(), &b_refs)?;
    let ec = Event::from_labels(jc.space(), &c_refs)?;
    // The rectangle event on the product space.
    let nc = jc.space().len();
    let rect: Vec<usize> = eb
        .indices()
        .flat_map(|bi| ec.indices().map(move |ci| bi * nc + ci))
        .collect();
    let erect = Event::from_indices(j.space(), rect)?;

    let (l_inf, l_sup) = event_interval(&ij.set, &erect)?;
    let (b_inf, b_sup) = event_interval(&ib.set, &eb)?;
    let (c_inf, c_sup) = event_interval(&ic.set, &ec)?;
    let r_inf = &b_inf * &c_inf;
    let r_sup = &b_sup * &c_sup;

    let cmp = Comparison::new(sel);
    let event_name = format!("{b_prime:?} x {c_prime:?}");
    if !cmp.values_equal(&l_inf, &r_inf) {
        return Ok(Verdict {
            outcome: Outcome::Fails,
            witness: Some(Witness::BoundMismatch {
                side: "inf",
                event: event_name,
                left: l_inf,
                right: r_inf,
            }),
            tolerance: cmp.tolerance,
        });
    }
    if !cmp.values_equal(&l_sup, &r_sup) {
        return Ok(Verdict {
            outcome: Outcome::Fails,
            witness: Some(Witness::BoundMismatch {
                side: "sup",
                event: event_name,
                left: l_sup,
                right: r_sup,
            }),
            tolerance: cmp.tolerance,
        });
    }
    Ok(Verdict {
        outcome: Outcome::Holds,
        witness: None,
        tolerance: cmp.tolerance,
    })
}

fn check_irrelevant_information(
    sel: SelectorId,
    jb: &ConstraintSet,
    jc: &ConstraintSet,
) -> Result<Verdict, AuditError> {
    require_feasible("the first factor set", jb)?;
    require_feasible("the second factor set", jc)?;
    let j = product_set(jb, jc);
    let ij = select(sel, &j)?;
    let ib = select(sel, jb)?;
    let lhs = ij.set.marginal_set(0)?;
    let cmp = Comparison::new(sel);
    Ok(cmp.set_verdict(cmp.sets_equal(&lhs, &ib.set), &lhs, &ib.set))
}

fn check_dimension_independence(sel: SelectorId, j: &ConstraintSet) -> Result<Verdict, AuditError> {
    require_feasible("the constraint set", j)?;
    let pad = fresh_label(j.space());
    let padded = j.padded_with_zero(&pad)?;
    let lhs = select(sel, &padded)?;
    let rhs = select(sel, j)?.set.padded_with_zero(&pad)?;
    // The eliminated coordinate reduces both problems to the same one, so
    // even numerically produced points agree bit for bit: compare exactly.
    let cmp = Comparison {
        tolerance: 0.0,
    };
    Ok(cmp.set_verdict(equal_sets(&lhs.set, &rhs), &lhs.set, &rhs))
}

fn fresh_label(space: &StateSpace) -> String {
    let mut label = "_zero".to_string();
    while space.index_of(&label).is_some() {
        label.push('_');
    }
    label
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::test_util::{cs_sparse, ge, le};
    use crate::rational::rat;

    fn split_space(nb: usize, nbc: usize) -> (StateSpace, Vec<String>) {
        let labels: Vec<String> = (1..=(nb + nbc)).map(|i| format!("a{i}")).collect();
        let b_labels = labels[..nb].to_vec();
        (StateSpace::new(labels).unwrap(), b_labels)
    }

    fn sub_space(labels: &[String]) -> StateSpace {
        StateSpace::new(labels.to_vec()).unwrap()
    }

    #[test]
    fn relativization_holds_for_centroid_on_hand_example() {
        let (space, b_labels) = split_space(2, 1);
        let jb = ConstraintSet::with(
            sub_space(&b_labels),
            cs_sparse(2, vec![le(&[(0, Rational::one())], rat(1, 2))])
                .constraints()
                .to_vec(),
        )
        .unwrap();
        let jbc = ConstraintSet::unconstrained(sub_space(&["a3".to_string()]));
        let inst = PrincipleInstance::Relativization {
            space,
            b_labels,
            jb,
            jbc,
        };
        let v = check_principle(SelectorId::Centroid, &inst).unwrap();
        assert!(v.holds(), "witness: {:?}", v.witness);
        let v = check_principle(SelectorId::Maxent, &inst).unwrap();
        assert!(v.holds(), "witness: {:?}", v.witness);
    }

    #[test]
    fn obstinacy_holds_for_maxent_fails_for_centroid() {
        // The refinement p1 >= 2/5 keeps the uniform point of the full
        // 2-simplex but moves the centroid.
        let j = cs_sparse(2, vec![]);
        let jstar = cs_sparse(2, vec![ge(&[(0, Rational::one())], rat(2, 5))]);
        let inst = PrincipleInstance::Obstinacy { j, jstar };
        let vm = check_principle(SelectorId::Maxent, &inst).unwrap();
        assert!(vm.holds());
        let vc = check_principle(SelectorId::Centroid, &inst).unwrap();
        assert_eq!(vc.outcome, Outcome::Fails);
        // Witness: the centroid of the refined interval [2/5, 1] is 7/10.
        match vc.witness.unwrap() {
            Witness::SetMismatch { left, .. } => {
                assert_eq!(left[0].weights(), &[rat(7, 10), rat(3, 10)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn obstinacy_hypothesis_violation_detected() {
        // jstar excludes the maxent point of j.
        let j = cs_sparse(2, vec![]);
        let jstar = cs_sparse(2, vec![ge(&[(0, Rational::one())], rat(4, 5))]);
        let inst = PrincipleInstance::Obstinacy { j, jstar };
        assert!(matches!(
            check_principle(SelectorId::Maxent, &inst),
            Err(AuditError::HypothesisViolation(_))
        ));
    }

    #[test]
    fn strong_and_weak_independence_hold_for_maxent() {
        let jb = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(1, 2))]);
        let jc = cs_sparse(2, vec![ge(&[(0, Rational::one())], rat(3, 10))]);
        let strong = PrincipleInstance::StrongIndependence {
            jb: jb.clone(),
            jc: jc.clone(),
        };
        assert!(check_principle(SelectorId::Maxent, &strong).unwrap().holds());
        let weak = PrincipleInstance::WeakIndependence {
            jb,
            jc,
            b_prime: vec!["a1".into()],
            c_prime: vec!["a1".into()],
        };
        assert!(check_principle(SelectorId::Maxent, &weak).unwrap().holds());
    }

    #[test]
    fn strong_independence_fails_for_centroid() {
        let jb = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(1, 2))]);
        let jc = cs_sparse(2, vec![]);
        let inst = PrincipleInstance::StrongIndependence { jb, jc };
        let v = check_principle(SelectorId::Centroid, &inst).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        // The joint centroid puts 5/32 on the first cell, the product 1/8.
        match v.witness.unwrap() {
            Witness::SetMismatch { left, right, .. } => {
                assert_eq!(left[0].weight(0), &rat(5, 32));
                assert_eq!(right[0].weight(0), &rat(1, 8));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weak_independence_fails_for_centroid() {
        let jb = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(1, 2))]);
        let jc = cs_sparse(2, vec![]);
        let inst = PrincipleInstance::WeakIndependence {
            jb,
            jc,
            b_prime: vec!["a1".into()],
            c_prime: vec!["a1".into()],
        };
        let v = check_principle(SelectorId::Centroid, &inst).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        match v.witness.unwrap() {
            Witness::BoundMismatch { left, right, .. } => {
                assert_eq!(left, rat(5, 32));
                assert_eq!(right, rat(1, 8));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn irrelevant_information_fails_for_centroid_holds_for_maxent() {
        let jb = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(1, 2))]);
        let jc = cs_sparse(2, vec![]);
        let inst = PrincipleInstance::IrrelevantInformation {
            jb: jb.clone(),
            jc: jc.clone(),
        };
        let vc = check_principle(SelectorId::Centroid, &inst).unwrap();
        assert_eq!(vc.outcome, Outcome::Fails);
        // Marginal of the joint centroid is 5/16 vs the factor centroid 1/4.
        match vc.witness.unwrap() {
            Witness::SetMismatch { left, right, .. } => {
                assert_eq!(left[0].weight(0), &rat(5, 16));
                assert_eq!(right[0].weight(0), &rat(1, 4));
            }
            other => panic!("{other:?}"),
        }
        let vm = check_principle(SelectorId::Maxent, &inst).unwrap();
        assert!(vm.holds());
    }

    #[test]
    fn dimension_independence_exact_for_all_selectors() {
        let j = cs_sparse(
            3,
            vec![le(&[(0, Rational::from_int(2)), (1, Rational::one())], Rational::one())],
        );
        for sel in SelectorId::ALL {
            let inst = PrincipleInstance::DimensionIndependence { j: j.clone() };
            let v = check_principle(sel, &inst).unwrap();
            assert!(v.holds(), "{sel}: {:?}", v.witness);
            assert_eq!(v.tolerance, 0.0);
        }
    }
}
