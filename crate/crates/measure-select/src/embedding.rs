//! Embeddings between state spaces, their induced maps on measures and
//! selection sets, representational-variant checking, and the propositional
//! front-end that builds embeddings from formula substitutions.
//!
//! An embedding sends each source state to a set of target states; images are
//! pairwise disjoint and jointly cover the target. The induced pullback sums
//! a target measure over image blocks; the induced pushforward of a set is
//! the preimage of the set under the pullback.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EmbeddingError, PolytopeError};
use crate::measure::Measure;
use crate::partition;
use crate::polytope::{
    equal_sets, ConstraintSet, LinearConstraint, PolySet, Relation, SelectionSet,
};
use crate::rational::Rational;
use crate::space::StateSpace;

/// A block map from a source space into disjoint covering subsets of a
/// target space. Images may be empty.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    source: StateSpace,
    target: StateSpace,
    /// For each source index, the sorted target indices of its image.
    image: Vec<Vec<usize>>,
}

impl Embedding {
    /// Validates disjointness and covering at construction; invalid
    /// embeddings cannot be built.
    pub fn new(source: StateSpace, target: StateSpace, image: Vec<Vec<usize>>) -> Result<Self, EmbeddingError> {
        if image.len() != source.len() {
            return Err(EmbeddingError::Domain(crate::error::DomainError::SpaceMismatch));
        }
        let mut covered = vec![false; target.len()];
        for block in &image {
            for &t in block {
                if t >= target.len() {
                    return Err(EmbeddingError::Domain(crate::error::DomainError::IndexOutOfRange(t)));
                }
                if covered[t] {
                    return Err(EmbeddingError::OverlappingImages);
                }
                covered[t] = true;
            }
        }
        if !covered.iter().all(|&c| c) {
            return Err(EmbeddingError::NotCovering);
        }
        let image = image
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Embedding { source, target, image })
    }

    /// Builds from label names.
    pub fn from_labels(
        source: StateSpace,
        target: StateSpace,
        map: &[(&str, Vec<&str>)],
    ) -> Result<Self, EmbeddingError> {
        let mut image = vec![None; source.len()];
        for (src, tgts) in map {
            let s = source
                .index_of(src)
                .ok_or_else(|| EmbeddingError::Domain(crate::error::DomainError::UnknownLabel((*src).to_string())))?;
            let mut block = Vec::new();
            for t in tgts {
                let ti = target
                    .index_of(t)
                    .ok_or_else(|| EmbeddingError::Domain(crate::error::DomainError::UnknownLabel((*t).to_string())))?;
                block.push(ti);
            }
            image[s] = Some(block);
        }
        let image: Option<Vec<Vec<usize>>> = image.into_iter().collect();
        let image = image.ok_or(EmbeddingError::Domain(crate::error::DomainError::SpaceMismatch))?;
        Embedding::new(source, target, image)
    }

    /// The identity embedding.
    pub fn identity(space: &StateSpace) -> Self {
        Embedding {
            source: space.clone(),
            target: space.clone(),
            image: (0..space.len()).map(|i| vec![i]).collect(),
        }
    }

    pub fn source(&self) -> &StateSpace {
        &self.source
    }

    pub fn target(&self) -> &StateSpace {
        &self.target
    }

    pub fn image_of(&self, source_index: usize) -> &[usize] {
        &self.image[source_index]
    }

    /// True when no source state has an empty image.
    pub fn is_faithful(&self) -> bool {
        self.image.iter().all(|b| !b.is_empty())
    }

    /// The partition of the target induced by the nonempty images.
    pub fn induced_partition(&self) -> partition::Partition {
        let blocks: Vec<Vec<usize>> = self.image.iter().filter(|b| !b.is_empty()).cloned().collect();
        partition::Partition::from_blocks(&self.target, blocks).expect("images partition the target")
    }

    /// Pullback of a target measure: source weight is the image-block mass.
    pub fn pullback_point(&self, q: &Measure) -> Measure {
        let weights: Vec<Rational> = self
            .image
            .iter()
            .map(|block| block.iter().map(|&t| q.weight(t).clone()).sum())
            .collect();
        Measure::new(self.source.clone(), weights).expect("disjoint cover preserves the simplex")
    }

    /// Pullback of a target selection: the image of the set under the linear
    /// pullback map, computed through vertex images.
    pub fn pullback_set(&self, h: &SelectionSet) -> Result<SelectionSet, PolytopeError> {
        match h {
            SelectionSet::Empty => Ok(SelectionSet::Empty),
            SelectionSet::Point(q) => Ok(SelectionSet::Point(self.pullback_point(q))),
            SelectionSet::Poly(_) => {
                let verts = h.vertices()?;
                let images: Vec<Measure> = verts.iter().map(|v| self.pullback_point(v)).collect();
                let pruned = PolySet::from_vertices(self.source.clone(), images).canonical_vertices()?;
                Ok(SelectionSet::from_vertex_list(self.source.clone(), pruned))
            }
        }
    }

    /// Pushforward of a source selection: all target measures whose pullback
    /// lies in the set. Constraint representations are rewritten on
    /// image-block sums; vertex representations go through an auxiliary-
    /// variable vertex enumeration.
    pub fn pushforward_set(&self, x: &SelectionSet) -> Result<SelectionSet, PolytopeError> {
        match x {
            SelectionSet::Empty => Ok(SelectionSet::Empty),
            SelectionSet::Point(p) => {
                let constraints = self.point_fiber_constraints(p);
                Ok(SelectionSet::from_constraints(
                    ConstraintSet::with(self.target.clone(), constraints)?,
                ))
            }
            SelectionSet::Poly(poly) => {
                if let Some(hrep) = poly.hrep() {
                    let constraints = hrep
                        .constraints()
                        .iter()
                        .map(|c| LinearConstraint {
                            coeffs: self.lift_coeffs(&c.coeffs),
                            relation: c.relation,
                            bound: c.bound.clone(),
                        })
                        .collect();
                    return Ok(SelectionSet::from_constraints(
                        ConstraintSet::with(self.target.clone(), constraints)?,
                    ));
                }
                // Vertex representation: the preimage of a hull. Work in the
                // lifted space (target coordinates plus hull weights), where
                // the set is an H-polytope, then project its vertices.
                let verts = x.vertices()?;
                self.pushforward_hull(&verts)
            }
        }
    }

    /// Constraints pinning each image-block mass to the point's weight.
    fn point_fiber_constraints(&self, p: &Measure) -> Vec<LinearConstraint> {
        self.image
            .iter()
            .enumerate()
            .map(|(s, block)| {
                let mut coeffs = vec![Rational::zero(); self.target.len()];
                for &t in block {
                    coeffs[t] = Rational::one();
                }
                LinearConstraint {
                    coeffs,
                    relation: Relation::Eq,
                    bound: p.weight(s).clone(),
                }
            })
            .collect()
    }

    /// Spreads source coefficients over image blocks: the lifted constraint
    /// value at a target measure equals the original value at its pullback.
    fn lift_coeffs(&self, coeffs: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.target.len()];
        for (s, block) in self.image.iter().enumerate() {
            for &t in block {
                out[t] = coeffs[s].clone();
            }
        }
        out
    }

    /// Preimage of `conv(verts)` under the pullback: vertices of the lifted
    /// polytope {(q, alpha) : q in the target simplex, alpha in the weight
    /// simplex, pullback(q) = sum alpha_w w}, projected onto q and pruned.
    fn pushforward_hull(&self, verts: &[Measure]) -> Result<SelectionSet, PolytopeError> {
        let nt = self.target.len();
        let nw = verts.len();
        let nvars = nt + nw;
        let mut labels: Vec<String> = self.target.labels().to_vec();
        for i in 0..nw {
            labels.push(format!("__hull{i}"));
        }
        let lifted_space = StateSpace::new(labels).map_err(PolytopeError::Domain)?;

        let mut constraints = Vec::new();
        // Total target mass 1 (so the ambient sum row splits correctly):
        // sum q = 1 and sum alpha = 1; ambient gives sum q + sum alpha = 2.
        // Scale: work with ambient sum = 1 by halving both sides instead:
        // q' = q/2, alpha' = alpha/2. Simpler: impose sum q = 1/2 directly on
        // the halved variables.
        let mut qsum = vec![Rational::zero(); nvars];
        for c in qsum.iter_mut().take(nt) {
            *c = Rational::one();
        }
        constraints.push(LinearConstraint {
            coeffs: qsum,
            relation: Relation::Eq,
            bound: Rational::new(1, 2),
        });
        // Pullback match per source state: block mass of q equals the hull
        // combination (both halved, so the equation is unchanged).
        for (s, block) in self.image.iter().enumerate() {
            let mut coeffs = vec![Rational::zero(); nvars];
            for &t in block {
                coeffs[t] = Rational::one();
            }
            for (w, vert) in verts.iter().enumerate() {
                coeffs[nt + w] = -vert.weight(s).clone();
            }
            constraints.push(LinearConstraint {
                coeffs,
                relation: Relation::Eq,
                bound: Rational::zero(),
            });
        }
        let lifted = ConstraintSet::with(lifted_space, constraints)?;
        let lifted_vertices = match lifted.vertices() {
            Ok(v) => v,
            Err(PolytopeError::Infeasible) => return Ok(SelectionSet::Empty),
            Err(e) => return Err(e),
        };
        let two = Rational::from_int(2);
        let projected: Vec<Measure> = lifted_vertices
            .iter()
            .map(|v| {
                let weights: Vec<Rational> = v.weights()[..nt].iter().map(|x| x * &two).collect();
                Measure::new(self.target.clone(), weights).expect("projection stays in the simplex")
            })
            .collect();
        let pruned = PolySet::from_vertices(self.target.clone(), projected).canonical_vertices()?;
        Ok(SelectionSet::from_vertex_list(self.target.clone(), pruned))
    }
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .image
            .iter()
            .enumerate()
            .map(|(s, block)| {
                let tgts: Vec<&str> = block.iter().map(|&t| self.target.label(t)).collect();
                format!("{} -> {{{}}}", self.source.label(s), tgts.join(","))
            })
            .collect();
        write!(f, "[{}]", parts.join("; "))
    }
}

/// Whether `j` and `h` present the same information about the shared source
/// space of `f` and `g`: equal pullbacks, and neither set carries information
/// beyond its pullback (`j = f(pullback_f(j))`, likewise for `h`). All three
/// conditions are decided exactly.
pub fn is_representational_variants(
    j: &ConstraintSet,
    h: &ConstraintSet,
    f: &Embedding,
    g: &Embedding,
) -> Result<bool, EmbeddingError> {
    if f.source() != g.source() {
        return Err(EmbeddingError::SourceMismatch);
    }
    let jset = SelectionSet::from_constraints(j.clone());
    let hset = SelectionSet::from_constraints(h.clone());
    let fj = f.pullback_set(&jset)?;
    let gh = g.pullback_set(&hset)?;
    if !equal_sets(&fj, &gh) {
        return Ok(false);
    }
    Ok(closure_condition(j, f)? && closure_condition(h, g)?)
}

/// `j = f(pullback_f(j))`: the set is exactly the extension of its aggregate
/// along the image partition.
fn closure_condition(j: &ConstraintSet, f: &Embedding) -> Result<bool, PolytopeError> {
    let jset = SelectionSet::from_constraints(j.clone());
    if jset.is_empty() {
        // The empty set pulls back and pushes forward to the empty set.
        return Ok(true);
    }
    let pulled = f.pullback_set(&jset)?;
    let pushed = f.pushforward_set(&pulled)?;
    Ok(equal_sets(&pushed, &jset))
}

/// Propositional formulas over named variables, with negation, conjunction
/// and disjunction.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formula {
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Truth value under an assignment (variable name -> bool).
    pub fn eval(&self, assignment: &BTreeMap<&str, bool>) -> Result<bool, EmbeddingError> {
        match self {
            Formula::Var(v) => assignment
                .get(v.as_str())
                .copied()
                .ok_or_else(|| EmbeddingError::UnknownVariable(v.clone())),
            Formula::Not(f) => Ok(!f.eval(assignment)?),
            Formula::And(a, b) => Ok(a.eval(assignment)? && b.eval(assignment)?),
            Formula::Or(a, b) => Ok(a.eval(assignment)? || b.eval(assignment)?),
        }
    }

    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Formula::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Formula::Not(f) => f.variables(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.variables(out);
                b.variables(out);
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(v) => write!(f, "{v}"),
            Formula::Not(x) => write!(f, "!{x:?}"),
            Formula::And(a, b) => write!(f, "({a:?} & {b:?})"),
            Formula::Or(a, b) => write!(f, "({a:?} | {b:?})"),
        }
    }
}

/// A syntactic interpretation: each source variable mapped to a formula over
/// the target variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropInterpretation {
    pub source_vars: Vec<String>,
    pub target_vars: Vec<String>,
    pub substitution: Vec<(String, Formula)>,
}

pub const MAX_VARIABLES: usize = 10;

/// The model space of a variable list: one state per truth assignment, label
/// `m<bits>` with bit j giving the truth value of variable j, enumerated in
/// binary order (all-false first).
pub fn model_space(vars: &[String]) -> Result<StateSpace, EmbeddingError> {
    if vars.is_empty() || vars.len() > MAX_VARIABLES {
        return Err(EmbeddingError::TooManyVariables {
            max: MAX_VARIABLES,
            got: vars.len(),
        });
    }
    let m = vars.len();
    let labels: Vec<String> = (0..(1usize << m))
        .map(|i| {
            let bits: String = (0..m)
                .map(|j| if (i >> (m - 1 - j)) & 1 == 1 { '1' } else { '0' })
                .collect();
            format!("m{bits}")
        })
        .collect();
    StateSpace::new(labels).map_err(EmbeddingError::Domain)
}

fn assignment_of(index: usize, vars: &[String]) -> BTreeMap<&str, bool> {
    let m = vars.len();
    vars.iter()
        .enumerate()
        .map(|(j, v)| (v.as_str(), (index >> (m - 1 - j)) & 1 == 1))
        .collect()
}

/// The embedding induced by a propositional interpretation: a source model
/// maps to the target models where every substituted formula takes the truth
/// value the source model gives its variable. Images are automatically
/// disjoint and covering.
pub fn embedding_from_interpretation(interp: &PropInterpretation) -> Result<Embedding, EmbeddingError> {
    for (v, phi) in &interp.substitution {
        if !interp.source_vars.contains(v) {
            return Err(EmbeddingError::UnknownVariable(v.clone()));
        }
        let mut used = Vec::new();
        phi.variables(&mut used);
        for u in used {
            if !interp.target_vars.contains(&u) {
                return Err(EmbeddingError::UnknownVariable(u));
            }
        }
    }
    let source = model_space(&interp.source_vars)?;
    let target = model_space(&interp.target_vars)?;
    let substitution: BTreeMap<&str, &Formula> = interp
        .substitution
        .iter()
        .map(|(v, f)| (v.as_str(), f))
        .collect();
    for v in &interp.source_vars {
        if !substitution.contains_key(v.as_str()) {
            return Err(EmbeddingError::UnknownVariable(v.clone()));
        }
    }

    let ns = interp.source_vars.len();
    let mut image: Vec<Vec<usize>> = vec![Vec::new(); 1 << ns];
    for t in 0..target.len() {
        let t_assignment = assignment_of(t, &interp.target_vars);
        // The source model this target model lands in: variable j is true
        // exactly when its formula holds at t.
        let mut source_index = 0usize;
        for (j, v) in interp.source_vars.iter().enumerate() {
            let value = substitution[v.as_str()].eval(&t_assignment)?;
            if value {
                source_index |= 1 << (ns - 1 - j);
            }
        }
        image[source_index].push(t);
    }
    Embedding::new(source, target, image)
}
