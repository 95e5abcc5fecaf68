//! Constraint sets (polytopes inside a probability simplex), selection sets,
//! and the exact LP toolkit over them.
//!
//! A `ConstraintSet` stores only the user constraints; the simplex conditions
//! (nonnegative coordinates summing to one) are ambient and implicit. Only
//! closed relations (`<=`, `=`) are representable.

pub mod linalg;
pub mod lp;
mod vertices;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::PolytopeError;
use crate::measure::Measure;
use crate::partition::Partition;
use crate::rational::Rational;
use crate::space::{Event, StateSpace};

use lp::{solve_lp, LpResult, RowRelation, Sense};

pub use lp::Sense as OptimizeSense;

/// Relation of a linear constraint. Strict inequalities are not
/// representable by design; the parser rejects them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

/// A single linear constraint `sum_i coeffs[i] * p_i  rel  bound`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub bound: Rational,
}

impl LinearConstraint {
    pub fn evaluate(&self, weights: &[Rational]) -> Rational {
        self.coeffs.iter().zip(weights).map(|(c, w)| c * w).sum()
    }

    pub fn satisfied_by(&self, weights: &[Rational]) -> bool {
        let lhs = self.evaluate(weights);
        match self.relation {
            Relation::Le => lhs <= self.bound,
            Relation::Eq => lhs == self.bound,
        }
    }

    /// Signed violation as f64 (positive = violated), for tolerance checks.
    pub fn violation(&self, weights: &[Rational]) -> f64 {
        let lhs = self.evaluate(weights);
        match self.relation {
            Relation::Le => (lhs - &self.bound).to_f64(),
            Relation::Eq => (lhs - &self.bound).abs().to_f64(),
        }
    }
}

impl fmt::Debug for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
        };
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*x{i}"))
            .collect();
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        write!(f, "{lhs} {rel} {}", self.bound)
    }
}

/// A polytope `J` inside the probability simplex of its space, given by
/// rational linear constraints. May be empty.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintSet {
    space: StateSpace,
    constraints: Vec<LinearConstraint>,
}

impl<'de> Deserialize<'de> for ConstraintSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            space: StateSpace,
            constraints: Vec<LinearConstraint>,
        }
        let raw = Raw::deserialize(deserializer)?;
        ConstraintSet::with(raw.space, raw.constraints).map_err(serde::de::Error::custom)
    }
}

impl ConstraintSet {
    /// The whole simplex.
    pub fn unconstrained(space: StateSpace) -> Self {
        ConstraintSet {
            space,
            constraints: Vec::new(),
        }
    }

    pub fn with(space: StateSpace, constraints: Vec<LinearConstraint>) -> Result<Self, PolytopeError> {
        for c in &constraints {
            if c.coeffs.len() != space.len() {
                return Err(PolytopeError::CoefficientLength {
                    got: c.coeffs.len(),
                    want: space.len(),
                });
            }
        }
        Ok(ConstraintSet { space, constraints })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn push(&mut self, c: LinearConstraint) -> Result<(), PolytopeError> {
        if c.coeffs.len() != self.space.len() {
            return Err(PolytopeError::CoefficientLength {
                got: c.coeffs.len(),
                want: self.space.len(),
            });
        }
        self.constraints.push(c);
        Ok(())
    }

    /// Same set with every equality expanded into a pair of inequalities.
    pub fn normalized_le(&self) -> ConstraintSet {
        let mut out = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            match c.relation {
                Relation::Le => out.push(c.clone()),
                Relation::Eq => {
                    out.push(LinearConstraint {
                        coeffs: c.coeffs.clone(),
                        relation: Relation::Le,
                        bound: c.bound.clone(),
                    });
                    out.push(LinearConstraint {
                        coeffs: c.coeffs.iter().map(|x| -x).collect(),
                        relation: Relation::Le,
                        bound: -&c.bound,
                    });
                }
            }
        }
        ConstraintSet {
            space: self.space.clone(),
            constraints: out,
        }
    }

    fn lp_rows(&self) -> Vec<(Vec<Rational>, RowRelation, Rational)> {
        let n = self.space.len();
        let mut rows = Vec::with_capacity(self.constraints.len() + 1);
        rows.push((vec![Rational::one(); n], RowRelation::Eq, Rational::one()));
        for c in &self.constraints {
            let rel = match c.relation {
                Relation::Le => RowRelation::Le,
                Relation::Eq => RowRelation::Eq,
            };
            rows.push((c.coeffs.clone(), rel, c.bound.clone()));
        }
        rows
    }

    /// Exact feasibility of the set within the simplex.
    pub fn is_feasible(&self) -> bool {
        let n = self.space.len();
        let rows = self.lp_rows();
        let objective = vec![Rational::zero(); n];
        matches!(
            solve_lp(n, &rows, &objective, Sense::Min),
            Some(LpResult::Optimal { .. })
        )
    }

    /// Exact optimum of a linear objective over the set, with an optimal
    /// vertex as witness.
    pub fn optimize(&self, objective: &[Rational], sense: Sense) -> Result<(Rational, Measure), PolytopeError> {
        assert_eq!(objective.len(), self.space.len());
        let rows = self.lp_rows();
        match solve_lp(self.space.len(), &rows, objective, sense) {
            Some(LpResult::Optimal { value, x }) => {
                let witness = Measure::new(self.space.clone(), x).expect("LP solution lies in the simplex");
                Ok((value, witness))
            }
            Some(LpResult::Infeasible) => Err(PolytopeError::Infeasible),
            Some(LpResult::Unbounded) | None => Err(PolytopeError::LpStuck),
        }
    }

    /// The exact vertex set, deduplicated, in lexicographic coordinate order.
    pub fn vertices(&self) -> Result<Vec<Measure>, PolytopeError> {
        let verts = vertices::enumerate(self);
        if verts.is_empty() {
            return Err(PolytopeError::Infeasible);
        }
        Ok(verts
            .into_iter()
            .map(|w| Measure::new(self.space.clone(), w).expect("vertex lies in the simplex"))
            .collect())
    }

    /// True iff `other` is a subset of `self`, decided by one exact LP per
    /// constraint of `self`. The empty set is contained in everything.
    pub fn contains_set(&self, other: &ConstraintSet) -> bool {
        assert_eq!(self.space.len(), other.space.len(), "sets live on different spaces");
        let norm = self.normalized_le();
        let mut checked_feasibility = false;
        for c in norm.constraints() {
            if c.coeffs.iter().all(Rational::is_zero) {
                if !c.bound.is_negative() {
                    continue;
                }
                // 0 <= negative bound: only the empty set complies.
                return !other.is_feasible();
            }
            match other.optimize(&c.coeffs, Sense::Max) {
                Ok((max, _)) => {
                    checked_feasibility = true;
                    if max > c.bound {
                        return false;
                    }
                }
                Err(PolytopeError::Infeasible) => return true,
                Err(_) => return false,
            }
        }
        // No constraints (or all trivial): self is the whole simplex.
        let _ = checked_feasibility;
        true
    }

    /// Exact membership of a measure.
    pub fn contains_point(&self, m: &Measure) -> bool {
        m.space().len() == self.space.len() && self.constraints.iter().all(|c| c.satisfied_by(m.weights()))
    }

    /// Membership up to `tol` on each constraint (for numerically produced
    /// points).
    pub fn contains_point_within(&self, m: &Measure, tol: f64) -> bool {
        m.space().len() == self.space.len() && self.constraints.iter().all(|c| c.violation(m.weights()) <= tol)
    }

    /// Dimension of the affine hull: 0 for a point, at most n-1.
    pub fn affine_dimension(&self) -> Result<usize, PolytopeError> {
        let verts = self.vertices()?;
        Ok(affine_rank(&verts))
    }

    /// Coordinates that are zero over the whole set (max p_i equals 0),
    /// detected by LP.
    pub fn forced_zero_coordinates(&self) -> Result<Vec<bool>, PolytopeError> {
        let n = self.space.len();
        let mut forced = vec![false; n];
        for i in 0..n {
            let mut obj = vec![Rational::zero(); n];
            obj[i] = Rational::one();
            let (max, _) = self.optimize(&obj, Sense::Max)?;
            forced[i] = max.is_zero();
        }
        Ok(forced)
    }

    /// The permuted set: `{ permute(P) : P in self }` under the same
    /// convention as `Measure::permute`.
    pub fn permute(&self, perm: &[usize]) -> ConstraintSet {
        let constraints = self
            .constraints
            .iter()
            .map(|c| LinearConstraint {
                coeffs: perm.iter().map(|&j| c.coeffs[j].clone()).collect(),
                relation: c.relation,
                bound: c.bound.clone(),
            })
            .collect();
        ConstraintSet {
            space: self.space.clone(),
            constraints,
        }
    }

    /// The set `J x {0}`: same constraints on a space extended by one state
    /// that is forced to zero.
    pub fn padded_with_zero(&self, label: &str) -> Result<ConstraintSet, PolytopeError> {
        let mut labels: Vec<String> = self.space.labels().to_vec();
        labels.push(label.to_string());
        let space = StateSpace::new(labels).map_err(PolytopeError::Domain)?;
        let n = space.len();
        let mut constraints: Vec<LinearConstraint> = self
            .constraints
            .iter()
            .map(|c| {
                let mut coeffs = c.coeffs.clone();
                coeffs.push(Rational::zero());
                LinearConstraint {
                    coeffs,
                    relation: c.relation,
                    bound: c.bound.clone(),
                }
            })
            .collect();
        let mut zero_row = vec![Rational::zero(); n];
        zero_row[n - 1] = Rational::one();
        constraints.push(LinearConstraint {
            coeffs: zero_row,
            relation: Relation::Eq,
            bound: Rational::zero(),
        });
        ConstraintSet::with(space, constraints)
    }
}

impl fmt::Debug for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J on {:?} with {:?}", self.space, self.constraints)
    }
}

fn affine_rank(verts: &[Measure]) -> usize {
    if verts.len() <= 1 {
        return 0;
    }
    let base = verts[0].weights();
    let diffs: Vec<Vec<Rational>> = verts[1..]
        .iter()
        .map(|v| v.weights().iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    linalg::rank(diffs)
}

/// A polytope-valued selection with whichever representations are on hand.
/// When both representations are present they describe the same set.
#[derive(Clone, Serialize)]
pub struct PolySet {
    space: StateSpace,
    hrep: Option<ConstraintSet>,
    vrep: Option<Vec<Measure>>,
    /// Set when this is the extension image of a block-space selection.
    partition: Option<Partition>,
}

impl PolySet {
    pub fn from_hrep(cs: ConstraintSet) -> Self {
        PolySet {
            space: cs.space().clone(),
            hrep: Some(cs),
            vrep: None,
            partition: None,
        }
    }

    pub fn from_vertices(space: StateSpace, verts: Vec<Measure>) -> Self {
        PolySet {
            space,
            hrep: None,
            vrep: Some(verts),
            partition: None,
        }
    }

    pub fn with_partition(mut self, s: Partition) -> Self {
        self.partition = Some(s);
        self
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn hrep(&self) -> Option<&ConstraintSet> {
        self.hrep.as_ref()
    }

    pub fn vrep(&self) -> Option<&[Measure]> {
        self.vrep.as_deref()
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    /// The extreme points, deduplicated and lexicographically sorted. For a
    /// vertex-represented set the non-extreme generators are pruned first.
    pub fn canonical_vertices(&self) -> Result<Vec<Measure>, PolytopeError> {
        if let Some(h) = &self.hrep {
            return h.vertices();
        }
        let raw = self.vrep.as_ref().expect("PolySet has at least one representation");
        let mut vecs: Vec<Vec<Rational>> = raw.iter().map(|m| m.weights().to_vec()).collect();
        vecs.sort_by(|a, b| crate::rational::lex_cmp(a, b));
        vecs.dedup();
        let keep = vertices::extreme_indices(&vecs);
        let verts: Vec<Measure> = keep
            .into_iter()
            .map(|i| Measure::new(self.space.clone(), vecs[i].clone()).expect("vertex valid"))
            .collect();
        if verts.is_empty() {
            return Err(PolytopeError::EmptySelection);
        }
        Ok(verts)
    }

    fn is_empty_set(&self) -> bool {
        match (&self.hrep, &self.vrep) {
            (Some(h), _) => !h.is_feasible(),
            (None, Some(v)) => v.is_empty(),
            (None, None) => true,
        }
    }
}

impl fmt::Debug for PolySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.hrep, &self.vrep) {
            (Some(h), _) => write!(f, "Poly({:?})", h.constraints()),
            (None, Some(v)) => write!(f, "PolyV({v:?})"),
            (None, None) => write!(f, "Poly(empty)"),
        }
    }
}

/// The result of a selection: empty, a single measure, or a polytope.
#[derive(Clone, Debug, Serialize)]
pub enum SelectionSet {
    Empty,
    Point(Measure),
    Poly(PolySet),
}

impl SelectionSet {
    /// Wraps a constraint set, collapsing infeasible input to `Empty`.
    pub fn from_constraints(cs: ConstraintSet) -> SelectionSet {
        if cs.is_feasible() {
            SelectionSet::Poly(PolySet::from_hrep(cs))
        } else {
            SelectionSet::Empty
        }
    }

    /// Wraps a vertex list; one vertex collapses to `Point`.
    pub fn from_vertex_list(space: StateSpace, verts: Vec<Measure>) -> SelectionSet {
        match verts.len() {
            0 => SelectionSet::Empty,
            1 => SelectionSet::Point(verts.into_iter().next().unwrap()),
            _ => SelectionSet::Poly(PolySet::from_vertices(space, verts)),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SelectionSet::Empty => true,
            SelectionSet::Point(_) => false,
            SelectionSet::Poly(p) => p.is_empty_set(),
        }
    }

    pub fn space(&self) -> Option<&StateSpace> {
        match self {
            SelectionSet::Empty => None,
            SelectionSet::Point(m) => Some(m.space()),
            SelectionSet::Poly(p) => Some(p.space()),
        }
    }

    pub fn partition_tag(&self) -> Option<&Partition> {
        match self {
            SelectionSet::Poly(p) => p.partition(),
            _ => None,
        }
    }

    /// Canonical extreme points. Errors when empty.
    pub fn vertices(&self) -> Result<Vec<Measure>, PolytopeError> {
        match self {
            SelectionSet::Empty => Err(PolytopeError::EmptySelection),
            SelectionSet::Point(m) => Ok(vec![m.clone()]),
            SelectionSet::Poly(p) => {
                if p.is_empty_set() {
                    Err(PolytopeError::EmptySelection)
                } else {
                    p.canonical_vertices()
                }
            }
        }
    }

    /// Exact membership test.
    pub fn contains_measure(&self, m: &Measure) -> Result<bool, PolytopeError> {
        match self {
            SelectionSet::Empty => Ok(false),
            SelectionSet::Point(p) => Ok(p.weights() == m.weights()),
            SelectionSet::Poly(p) => {
                if let Some(h) = p.hrep() {
                    return Ok(h.contains_point(m));
                }
                let verts = self.vertices()?;
                Ok(in_hull(m.weights(), &verts))
            }
        }
    }

    /// The image under conditioning on `b`: members with positive mass on
    /// `b`, conditioned. For a polytope this is the hull of the conditioned
    /// vertices that give `b` positive mass.
    pub fn condition_set(&self, b: &Event) -> Result<SelectionSet, PolytopeError> {
        match self {
            SelectionSet::Empty => Ok(SelectionSet::Empty),
            SelectionSet::Point(m) => {
                if m.event_mass(b).is_zero() {
                    Ok(SelectionSet::Empty)
                } else {
                    Ok(SelectionSet::Point(m.condition(b).map_err(PolytopeError::Domain)?))
                }
            }
            SelectionSet::Poly(_) => {
                let verts = self.vertices()?;
                let mut images = Vec::new();
                let mut sub_space = None;
                for v in verts {
                    if v.event_mass(b).is_positive() {
                        let c = v.condition(b).map_err(PolytopeError::Domain)?;
                        sub_space.get_or_insert_with(|| c.space().clone());
                        images.push(c);
                    }
                }
                match sub_space {
                    None => Ok(SelectionSet::Empty),
                    Some(space) => {
                        let pruned = PolySet::from_vertices(space.clone(), images).canonical_vertices()?;
                        Ok(SelectionSet::from_vertex_list(space, pruned))
                    }
                }
            }
        }
    }

    /// The image under marginalization onto factor `k` of a product space.
    pub fn marginal_set(&self, k: usize) -> Result<SelectionSet, PolytopeError> {
        match self {
            SelectionSet::Empty => Ok(SelectionSet::Empty),
            SelectionSet::Point(m) => Ok(SelectionSet::Point(m.marginal(k).map_err(PolytopeError::Domain)?)),
            SelectionSet::Poly(_) => {
                let verts = self.vertices()?;
                let images: Result<Vec<Measure>, _> = verts.iter().map(|v| v.marginal(k)).collect();
                let images = images.map_err(PolytopeError::Domain)?;
                let space = images[0].space().clone();
                let pruned = PolySet::from_vertices(space.clone(), images).canonical_vertices()?;
                Ok(SelectionSet::from_vertex_list(space, pruned))
            }
        }
    }

    /// The set padded with one zero-forced coordinate.
    pub fn padded_with_zero(&self, label: &str) -> Result<SelectionSet, PolytopeError> {
        let pad_measure = |m: &Measure| -> Result<Measure, PolytopeError> {
            let mut labels: Vec<String> = m.space().labels().to_vec();
            labels.push(label.to_string());
            let space = StateSpace::new(labels).map_err(PolytopeError::Domain)?;
            let mut w = m.weights().to_vec();
            w.push(Rational::zero());
            Measure::new(space, w).map_err(PolytopeError::Domain)
        };
        match self {
            SelectionSet::Empty => Ok(SelectionSet::Empty),
            SelectionSet::Point(m) => Ok(SelectionSet::Point(pad_measure(m)?)),
            SelectionSet::Poly(p) => {
                if let Some(h) = p.hrep() {
                    return Ok(SelectionSet::from_constraints(h.padded_with_zero(label)?));
                }
                let verts = self.vertices()?;
                let padded: Result<Vec<Measure>, _> = verts.iter().map(pad_measure).collect();
                let padded = padded?;
                let space = padded[0].space().clone();
                Ok(SelectionSet::from_vertex_list(space, padded))
            }
        }
    }

    /// Coordinate permutation of the whole set.
    pub fn permute(&self, perm: &[usize]) -> SelectionSet {
        match self {
            SelectionSet::Empty => SelectionSet::Empty,
            SelectionSet::Point(m) => SelectionSet::Point(m.permute(perm)),
            SelectionSet::Poly(p) => {
                let mut out = PolySet {
                    space: p.space.clone(),
                    hrep: p.hrep.as_ref().map(|h| h.permute(perm)),
                    vrep: p
                        .vrep
                        .as_ref()
                        .map(|vs| vs.iter().map(|m| m.permute(perm)).collect()),
                    partition: None,
                };
                if out.hrep.is_none() && out.vrep.is_none() {
                    out.vrep = Some(Vec::new());
                }
                SelectionSet::Poly(out)
            }
        }
    }
}

/// Exact membership of a weight vector in the convex hull of `verts`.
fn in_hull(point: &[Rational], verts: &[Measure]) -> bool {
    let nvars = verts.len();
    if nvars == 0 {
        return false;
    }
    let dim = point.len();
    let mut rows = Vec::with_capacity(dim + 1);
    for c in 0..dim {
        let coeffs: Vec<Rational> = verts.iter().map(|w| w.weight(c).clone()).collect();
        rows.push((coeffs, RowRelation::Eq, point[c].clone()));
    }
    rows.push((vec![Rational::one(); nvars], RowRelation::Eq, Rational::one()));
    let objective = vec![Rational::zero(); nvars];
    matches!(
        solve_lp(nvars, &rows, &objective, Sense::Min),
        Some(LpResult::Optimal { .. })
    )
}

/// Exact equality of two selections as point sets. Constraint-represented
/// sets are compared by mutual containment; anything involving a vertex
/// representation is canonicalized to extreme points first.
pub fn equal_sets(x: &SelectionSet, y: &SelectionSet) -> bool {
    let ex = x.is_empty();
    let ey = y.is_empty();
    if ex || ey {
        return ex == ey;
    }
    let (sx, sy) = (x.space().unwrap(), y.space().unwrap());
    if sx.labels() != sy.labels() {
        return false;
    }
    if let (SelectionSet::Poly(px), SelectionSet::Poly(py)) = (x, y) {
        if let (Some(hx), Some(hy)) = (px.hrep(), py.hrep()) {
            return hx.contains_set(hy) && hy.contains_set(hx);
        }
    }
    let vx = x.vertices().expect("nonempty");
    let vy = y.vertices().expect("nonempty");
    vx.len() == vy.len() && vx.iter().zip(&vy).all(|(a, b)| a.weights() == b.weights())
}

/// Equality of two selections up to `tol` per vertex coordinate, for
/// comparisons that involve numerically produced points.
pub fn approx_equal_sets(x: &SelectionSet, y: &SelectionSet, tol: f64) -> bool {
    let ex = x.is_empty();
    let ey = y.is_empty();
    if ex || ey {
        return ex == ey;
    }
    let vx = match x.vertices() {
        Ok(v) => v,
        Err(_) => return false,
    };
    let vy = match y.vertices() {
        Ok(v) => v,
        Err(_) => return false,
    };
    if vx.len() != vy.len() {
        return false;
    }
    // Greedy matching within tolerance.
    let mut used = vec![false; vy.len()];
    'outer: for a in &vx {
        for (j, b) in vy.iter().enumerate() {
            if !used[j] && a.linf_distance(b) <= tol {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Exact infimum and supremum of `P(b)` over the selection.
pub fn event_interval(x: &SelectionSet, b: &Event) -> Result<(Rational, Rational), PolytopeError> {
    match x {
        SelectionSet::Empty => Err(PolytopeError::EmptySelection),
        SelectionSet::Point(m) => {
            let mass = m.event_mass(b);
            Ok((mass.clone(), mass))
        }
        SelectionSet::Poly(p) => {
            if p.is_empty_set() {
                return Err(PolytopeError::EmptySelection);
            }
            if let Some(h) = p.hrep() {
                let mut obj = vec![Rational::zero(); h.space().len()];
                for i in b.indices() {
                    obj[i] = Rational::one();
                }
                let (lo, _) = h.optimize(&obj, Sense::Min)?;
                let (hi, _) = h.optimize(&obj, Sense::Max)?;
                return Ok((lo, hi));
            }
            let verts = p.canonical_vertices()?;
            let masses: Vec<Rational> = verts.iter().map(|v| v.event_mass(b)).collect();
            let lo = masses.iter().min().unwrap().clone();
            let hi = masses.iter().max().unwrap().clone();
            Ok((lo, hi))
        }
    }
}

/// The set of measures on the product space `B x C` whose marginals satisfy
/// the given factor constraints: each factor constraint is lifted to
/// coefficients constant along the other factor's fibers.
pub fn product_set(jb: &ConstraintSet, jc: &ConstraintSet) -> ConstraintSet {
    let space = StateSpace::product(&[jb.space().clone(), jc.space().clone()]);
    let (nb, nc) = (jb.space().len(), jc.space().len());
    let mut constraints = Vec::with_capacity(jb.constraints().len() + jc.constraints().len());
    for c in jb.constraints() {
        let mut coeffs = vec![Rational::zero(); nb * nc];
        for b in 0..nb {
            for cc in 0..nc {
                coeffs[b * nc + cc] = c.coeffs[b].clone();
            }
        }
        constraints.push(LinearConstraint {
            coeffs,
            relation: c.relation,
            bound: c.bound.clone(),
        });
    }
    for c in jc.constraints() {
        let mut coeffs = vec![Rational::zero(); nb * nc];
        for b in 0..nb {
            for cc in 0..nc {
                coeffs[b * nc + cc] = c.coeffs[cc].clone();
            }
        }
        constraints.push(LinearConstraint {
            coeffs,
            relation: c.relation,
            bound: c.bound.clone(),
        });
    }
    ConstraintSet { space, constraints }
}

/// The set of measures on `space` whose conditional on `b` satisfies `jb` and
/// whose conditional on the complement satisfies `jbc`. Conditional
/// constraints are multiplied through by the event mass, which keeps the set
/// a polytope; measures giving the event probability zero satisfy that side
/// vacuously.
pub fn relativized_set(
    jb: &ConstraintSet,
    jbc: &ConstraintSet,
    space: &StateSpace,
    b: &Event,
) -> Result<ConstraintSet, PolytopeError> {
    let bc = b.complement();
    if jb.space().len() != b.len() || jbc.space().len() != bc.len() {
        return Err(PolytopeError::Domain(crate::error::DomainError::SpaceMismatch));
    }
    let n = space.len();
    let mut constraints = Vec::new();
    for (side, event) in [(jb, b), (jbc, &bc)] {
        let members: Vec<usize> = event.indices().collect();
        for c in side.constraints() {
            // sum_j r_j P(a_j | B) rel s  ->  sum_j r_j p_{a_j} - s * P(B) rel 0
            let mut coeffs = vec![Rational::zero(); n];
            for (j, &a) in members.iter().enumerate() {
                coeffs[a] = &c.coeffs[j] - &c.bound;
            }
            constraints.push(LinearConstraint {
                coeffs,
                relation: c.relation,
                bound: Rational::zero(),
            });
        }
    }
    ConstraintSet::with(space.clone(), constraints)
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;
    use crate::rational::Rational;

    pub fn simplex_space(n: usize) -> StateSpace {
        StateSpace::new((1..=n).map(|i| format!("a{i}")).collect::<Vec<_>>()).unwrap()
    }

    /// Sparse `<=` constraint on an n-state space.
    pub fn le(terms: &[(usize, Rational)], bound: Rational) -> (Vec<(usize, Rational)>, Relation, Rational) {
        (terms.to_vec(), Relation::Le, bound)
    }

    /// Sparse `>=` constraint (normalized to `<=`).
    pub fn ge(terms: &[(usize, Rational)], bound: Rational) -> (Vec<(usize, Rational)>, Relation, Rational) {
        (
            terms.iter().map(|(i, c)| (*i, -c)).collect(),
            Relation::Le,
            -&bound,
        )
    }

    /// Sparse `=` constraint.
    pub fn eq(terms: &[(usize, Rational)], bound: Rational) -> (Vec<(usize, Rational)>, Relation, Rational) {
        (terms.to_vec(), Relation::Eq, bound)
    }

    /// Builds a constraint set on n states from sparse constraint specs.
    pub fn cs_sparse(n: usize, specs: Vec<(Vec<(usize, Rational)>, Relation, Rational)>) -> ConstraintSet {
        let space = simplex_space(n);
        let constraints = specs
            .into_iter()
            .map(|(terms, relation, bound)| {
                let mut coeffs = vec![Rational::zero(); n];
                for (i, c) in terms {
                    coeffs[i] = c;
                }
                LinearConstraint {
                    coeffs,
                    relation,
                    bound,
                }
            })
            .collect();
        ConstraintSet::with(space, constraints).unwrap()
    }

    /// Builds a constraint set from full `LinearConstraint`s or sparse `le`
    /// specs via `cs_sparse`; this version takes already-built constraints.
    pub fn cs(n: usize, constraints: Vec<LinearConstraint>) -> ConstraintSet {
        ConstraintSet::with(simplex_space(n), constraints).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_util::*;
    use super::*;
    use crate::rational::rat;

    fn coin_set() -> ConstraintSet {
        // p1 in [3/5, 9/10] on two states.
        cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(3, 5)),
                le(&[(0, Rational::one())], rat(9, 10)),
            ],
        )
    }

    fn example_47_set() -> ConstraintSet {
        // p1 + p2 >= 3/5 and p4 = 0 on four states.
        cs_sparse(
            4,
            vec![
                ge(&[(0, Rational::one()), (1, Rational::one())], rat(3, 5)),
                eq(&[(3, Rational::one())], Rational::zero()),
            ],
        )
    }

    #[test]
    fn feasibility() {
        assert!(ConstraintSet::unconstrained(simplex_space(3)).is_feasible());
        let contradictory = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(3, 5)),
                le(&[(0, Rational::one())], rat(2, 5)),
            ],
        );
        assert!(!contradictory.is_feasible());
        assert!(example_47_set().is_feasible());
    }

    #[test]
    fn optimize_over_simplex_and_bounds() {
        let free = ConstraintSet::unconstrained(simplex_space(2));
        let obj = vec![Rational::one(), Rational::zero()];
        let (v, w) = free.optimize(&obj, Sense::Max).unwrap();
        assert_eq!(v, Rational::one());
        assert_eq!(w.weights(), &[Rational::one(), Rational::zero()]);

        let capped = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(9, 10))]);
        let (v, _) = capped.optimize(&obj, Sense::Max).unwrap();
        assert_eq!(v, rat(9, 10));

        let (v, w) = coin_set().optimize(&obj, Sense::Min).unwrap();
        assert_eq!(v, rat(3, 5));
        assert_eq!(w.weights(), &[rat(3, 5), rat(2, 5)]);
    }

    #[test]
    fn vertices_of_simple_sets() {
        let free = ConstraintSet::unconstrained(simplex_space(2));
        let v = free.vertices().unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].weights(), &[Rational::zero(), Rational::one()]);
        assert_eq!(v[1].weights(), &[Rational::one(), Rational::zero()]);

        let coin = coin_set().vertices().unwrap();
        assert_eq!(coin.len(), 2);
        assert_eq!(coin[0].weights(), &[rat(3, 5), rat(2, 5)]);
        assert_eq!(coin[1].weights(), &[rat(9, 10), rat(1, 10)]);
    }

    #[test]
    fn vertices_of_election_set() {
        // p1 >= 1/20 and p2 >= 11/20 on two states.
        let j = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(1, 20)),
                ge(&[(1, Rational::one())], rat(11, 20)),
            ],
        );
        let v = j.vertices().unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].weights(), &[rat(1, 20), rat(19, 20)]);
        assert_eq!(v[1].weights(), &[rat(9, 20), rat(11, 20)]);
    }

    #[test]
    fn vertices_infeasible_errors() {
        let bad = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(3, 5)),
                le(&[(0, Rational::one())], rat(2, 5)),
            ],
        );
        assert!(matches!(bad.vertices(), Err(PolytopeError::Infeasible)));
    }

    #[test]
    fn containment() {
        let j = example_47_set();
        assert!(j.contains_set(&j));
        let free = ConstraintSet::unconstrained(simplex_space(2));
        let a = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(2, 5))]);
        let b = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(3, 10))]);
        assert!(free.contains_set(&a));
        assert!(a.contains_set(&b));
        assert!(!b.contains_set(&a)); // witness (2/5, 3/5)
        let empty = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(3, 5)),
                le(&[(0, Rational::one())], rat(2, 5)),
            ],
        );
        assert!(b.contains_set(&empty));
    }

    #[test]
    fn equal_sets_redundant_representations() {
        // Same interval described two ways.
        let a = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(1, 2))]);
        let b = cs_sparse(
            2,
            vec![
                le(&[(0, Rational::from_int(2))], Rational::one()),
                le(&[(0, Rational::one())], rat(3, 4)), // redundant
            ],
        );
        assert!(equal_sets(
            &SelectionSet::from_constraints(a),
            &SelectionSet::from_constraints(b)
        ));
    }

    #[test]
    fn equal_sets_empty_cases() {
        let infeasible = cs_sparse(
            2,
            vec![
                ge(&[(0, Rational::one())], rat(3, 5)),
                le(&[(0, Rational::one())], rat(2, 5)),
            ],
        );
        assert!(equal_sets(
            &SelectionSet::Empty,
            &SelectionSet::from_constraints(infeasible)
        ));
        let point = Measure::uniform(simplex_space(2));
        assert!(!equal_sets(&SelectionSet::Empty, &SelectionSet::Point(point)));
    }

    #[test]
    fn affine_dimensions() {
        let point = cs_sparse(2, vec![eq(&[(0, Rational::one())], rat(1, 2))]);
        assert_eq!(point.affine_dimension().unwrap(), 0);
        let full = ConstraintSet::unconstrained(simplex_space(3));
        assert_eq!(full.affine_dimension().unwrap(), 2);
        assert_eq!(example_47_set().affine_dimension().unwrap(), 2);
    }

    #[test]
    fn event_interval_cases() {
        let space = simplex_space(2);
        let b = Event::from_labels(&space, &["a1"]).unwrap();
        let point = Measure::new(space.clone(), vec![rat(3, 5), rat(2, 5)]).unwrap();
        assert_eq!(
            event_interval(&SelectionSet::Point(point), &b).unwrap(),
            (rat(3, 5), rat(3, 5))
        );
        let full = SelectionSet::from_constraints(ConstraintSet::unconstrained(space));
        assert_eq!(
            event_interval(&full, &b).unwrap(),
            (Rational::zero(), Rational::one())
        );
        assert!(matches!(
            event_interval(&SelectionSet::Empty, &b),
            Err(PolytopeError::EmptySelection)
        ));
    }

    #[test]
    fn product_set_lifts_constraints() {
        let jb = cs_sparse(2, vec![le(&[(0, Rational::one())], rat(1, 2))]);
        let jc = ConstraintSet::unconstrained(simplex_space(2));
        let j = product_set(&jb, &jc);
        assert_eq!(j.space().len(), 4);
        assert_eq!(j.constraints().len(), 1);
        let c = &j.constraints()[0];
        assert_eq!(c.coeffs, vec![Rational::one(), Rational::one(), Rational::zero(), Rational::zero()]);
        assert_eq!(c.bound, rat(1, 2));
    }

    #[test]
    fn relativized_point_conditional() {
        // P(a1 | {a1,a2}) = 1 on three states collapses to p2 = 0.
        let space = simplex_space(3);
        let b = Event::from_labels(&space, &["a1", "a2"]).unwrap();
        let jb = cs_sparse(2, vec![eq(&[(0, Rational::one())], Rational::one())]);
        let jbc = ConstraintSet::unconstrained(simplex_space(1));
        let j = relativized_set(&jb, &jbc, &space, &b).unwrap();
        // Constraint reads p1 - (p1 + p2) = 0, i.e. p2 = 0.
        let expect = cs_sparse(3, vec![eq(&[(1, Rational::one())], Rational::zero())]);
        assert!(equal_sets(
            &SelectionSet::from_constraints(j),
            &SelectionSet::from_constraints(expect)
        ));
    }

    #[test]
    fn relativized_halfspace_conditional() {
        // P(a1 | {a1,a2}) >= 1/2 becomes p1 - p2 >= 0.
        let space = simplex_space(3);
        let b = Event::from_labels(&space, &["a1", "a2"]).unwrap();
        let jb = cs_sparse(2, vec![ge(&[(0, Rational::one())], rat(1, 2))]);
        let jbc = ConstraintSet::unconstrained(simplex_space(1));
        let j = relativized_set(&jb, &jbc, &space, &b).unwrap();
        let expect = cs_sparse(
            3,
            vec![ge(&[(0, Rational::one()), (1, Rational::from_int(-1))], Rational::zero())],
        );
        assert!(equal_sets(
            &SelectionSet::from_constraints(j),
            &SelectionSet::from_constraints(expect)
        ));
    }

    #[test]
    fn condition_set_drops_zero_mass_vertices() {
        let space = simplex_space(3);
        let b = Event::from_labels(&space, &["a1", "a2"]).unwrap();
        // Full simplex conditioned on {a1,a2} is the full sub-simplex.
        let full = SelectionSet::from_constraints(ConstraintSet::unconstrained(space));
        let cond = full.condition_set(&b).unwrap();
        let verts = cond.vertices().unwrap();
        assert_eq!(verts.len(), 2);
        assert_eq!(verts[0].weights(), &[Rational::zero(), Rational::one()]);
        assert_eq!(verts[1].weights(), &[Rational::one(), Rational::zero()]);
    }

    #[test]
    fn forced_zeros_detected() {
        let j = example_47_set();
        assert_eq!(j.forced_zero_coordinates().unwrap(), vec![false, false, false, true]);
    }

    #[test]
    fn padded_with_zero_preserves_shape() {
        let j = coin_set().padded_with_zero("z").unwrap();
        assert_eq!(j.space().len(), 3);
        let verts = j.vertices().unwrap();
        assert_eq!(verts.len(), 2);
        assert!(verts.iter().all(|v| v.weight(2).is_zero()));
    }
}
