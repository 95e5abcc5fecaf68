//! Probability measures with exact rational weights.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::partition::Partition;
use crate::rational::Rational;
use crate::space::{Event, StateSpace};

/// A probability measure on a finite state space: nonnegative rational
/// weights summing to exactly 1.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct Measure {
    space: StateSpace,
    weights: Vec<Rational>,
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            space: StateSpace,
            weights: Vec<Rational>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Measure::new(raw.space, raw.weights).map_err(serde::de::Error::custom)
    }
}

impl Measure {
    pub fn new(space: StateSpace, weights: Vec<Rational>) -> Result<Self, DomainError> {
        if weights.len() != space.len() {
            return Err(DomainError::WeightLength {
                got: weights.len(),
                want: space.len(),
            });
        }
        if weights.iter().any(Rational::is_negative) {
            return Err(DomainError::NegativeWeight);
        }
        if weights.iter().sum::<Rational>() != Rational::one() {
            return Err(DomainError::WeightSum);
        }
        Ok(Measure { space, weights })
    }

    /// The uniform measure.
    pub fn uniform(space: StateSpace) -> Self {
        let n = space.len() as i64;
        let w = vec![Rational::new(1, n); space.len()];
        Measure { space, weights: w }
    }

    /// All mass on one state.
    pub fn point_mass(space: StateSpace, index: usize) -> Result<Self, DomainError> {
        if index >= space.len() {
            return Err(DomainError::IndexOutOfRange(index));
        }
        let mut w = vec![Rational::zero(); space.len()];
        w[index] = Rational::one();
        Ok(Measure { space, weights: w })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total mass of an event.
    pub fn event_mass(&self, event: &Event) -> Rational {
        event.indices().map(|i| self.weights[i].clone()).sum()
    }

    /// Shannon entropy in nats, with the convention 0 ln 0 = 0. The one
    /// inexact operation on measures.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for w in &self.weights {
            let p = w.to_f64();
            if p > 0.0 {
                h -= p * p.ln();
            }
        }
        h
    }

    /// Marginal distribution on factor `k` of a product space.
    pub fn marginal(&self, k: usize) -> Result<Measure, DomainError> {
        let factors = self.space.factors().ok_or(DomainError::NoFactorStructure)?;
        if k >= factors.len() {
            return Err(DomainError::IndexOutOfRange(k));
        }
        let layout = self.space.factor_layout().unwrap();
        let target = factors[k].clone();
        let mut weights = vec![Rational::zero(); target.len()];
        for (state, w) in self.weights.iter().enumerate() {
            let (size, stride) = layout[k];
            let component = (state / stride) % size;
            weights[component] += w;
        }
        Ok(Measure {
            space: target,
            weights,
        })
    }

    /// Conditional distribution on the subspace given by `event`. Errors when
    /// the event has probability zero.
    pub fn condition(&self, event: &Event) -> Result<Measure, DomainError> {
        if event.space() != &self.space {
            return Err(DomainError::SpaceMismatch);
        }
        let mass = self.event_mass(event);
        if mass.is_zero() {
            return Err(DomainError::ZeroProbabilityEvent);
        }
        let labels: Vec<String> = event.indices().map(|i| self.space.label(i).to_string()).collect();
        let sub = StateSpace::new(labels)?;
        let weights: Vec<Rational> = event.indices().map(|i| &self.weights[i] / &mass).collect();
        Ok(Measure { space: sub, weights })
    }

    /// Product measure on the product of the two spaces.
    pub fn product(&self, other: &Measure) -> Measure {
        let space = StateSpace::product(&[self.space.clone(), other.space.clone()]);
        let mut weights = Vec::with_capacity(self.len() * other.len());
        for a in &self.weights {
            for b in &other.weights {
                weights.push(a * b);
            }
        }
        Measure { space, weights }
    }

    /// Image measure on the block space of `partition`: each block gets the
    /// sum of its members' weights.
    pub fn aggregate(&self, partition: &Partition) -> Result<Measure, DomainError> {
        if partition.space() != &self.space {
            return Err(DomainError::PartitionMismatch);
        }
        let weights: Vec<Rational> = partition
            .blocks()
            .iter()
            .map(|block| block.iter().map(|&i| self.weights[i].clone()).sum())
            .collect();
        Ok(Measure {
            space: partition.block_space(),
            weights,
        })
    }

    /// Coordinate-permuted measure: weight `i` of the result is weight
    /// `perm[i]` of `self`, on the same space.
    pub fn permute(&self, perm: &[usize]) -> Measure {
        let weights = perm.iter().map(|&i| self.weights[i].clone()).collect();
        Measure {
            space: self.space.clone(),
            weights,
        }
    }

    /// Max absolute coordinate difference, as f64.
    pub fn linf_distance(&self, other: &Measure) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs().to_f64())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn space(n: usize) -> StateSpace {
        StateSpace::new((1..=n).map(|i| format!("a{i}")).collect::<Vec<_>>()).unwrap()
    }

    fn measure(weights: Vec<Rational>) -> Measure {
        Measure::new(space(weights.len()), weights).unwrap()
    }

    #[test]
    fn rejects_invalid_weights() {
        let s = space(2);
        assert_eq!(
            Measure::new(s.clone(), vec![rat(1, 2), rat(1, 4)]).unwrap_err(),
            DomainError::WeightSum
        );
        assert_eq!(
            Measure::new(s.clone(), vec![rat(3, 2), rat(-1, 2)]).unwrap_err(),
            DomainError::NegativeWeight
        );
        assert!(Measure::new(s, vec![Rational::one()]).is_err());
    }

    #[test]
    fn entropy_uniform_and_point_mass() {
        let u = measure(vec![rat(1, 2), rat(1, 2)]);
        assert!((u.entropy() - 2f64.ln()).abs() < 1e-12);
        let p = measure(vec![Rational::one(), Rational::zero(), Rational::zero()]);
        assert_eq!(p.entropy(), 0.0);
    }

    #[test]
    fn entropy_direct_evaluation() {
        // Oracle: direct evaluation of -0.6 ln 0.6 - 0.4 ln 0.4.
        let expected = -(0.6_f64 * 0.6_f64.ln() + 0.4 * 0.4_f64.ln());
        let m = measure(vec![rat(3, 5), rat(2, 5)]);
        assert!((m.entropy() - expected).abs() < 1e-14);
        assert!((m.entropy() - 0.6730116670092565).abs() < 1e-12);
    }

    #[test]
    fn entropy_bounded_by_ln_n() {
        let m = measure(vec![rat(1, 2), rat(1, 4), rat(1, 4)]);
        assert!(m.entropy() <= (3f64).ln());
        let u = Measure::uniform(space(3));
        assert!((u.entropy() - 3f64.ln()).abs() < 1e-12);
    }

    fn product_space_2x2() -> StateSpace {
        StateSpace::product(&[space(2), StateSpace::new(vec!["c1", "c2"]).unwrap()])
    }

    #[test]
    fn marginal_uniform() {
        let p = Measure::new(product_space_2x2(), vec![rat(1, 4); 4]).unwrap();
        let m = p.marginal(0).unwrap();
        assert_eq!(m.weights(), &[rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn marginal_fiber_sums() {
        // weights (1/2, 0, 1/4, 1/4) on 2x2; factor 1 sums fibers {0,2} and {1,3}.
        let p = Measure::new(
            product_space_2x2(),
            vec![rat(1, 2), Rational::zero(), rat(1, 4), rat(1, 4)],
        )
        .unwrap();
        let m = p.marginal(1).unwrap();
        assert_eq!(m.weights(), &[rat(3, 4), rat(1, 4)]);
    }

    #[test]
    fn marginal_requires_factors() {
        let m = measure(vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(m.marginal(0).unwrap_err(), DomainError::NoFactorStructure);
    }

    #[test]
    fn condition_uniform() {
        let m = Measure::uniform(space(4));
        let b = Event::from_labels(m.space(), &["a1", "a3"]).unwrap();
        let c = m.condition(&b).unwrap();
        assert_eq!(c.weights(), &[rat(1, 2), rat(1, 2)]);
        assert_eq!(c.space().labels(), &["a1".to_string(), "a3".to_string()]);
    }

    #[test]
    fn condition_renormalizes() {
        let m = measure(vec![rat(3, 5), rat(3, 10), rat(1, 10)]);
        let b = Event::from_labels(m.space(), &["a1", "a2"]).unwrap();
        let c = m.condition(&b).unwrap();
        assert_eq!(c.weights(), &[rat(2, 3), rat(1, 3)]);
    }

    #[test]
    fn condition_zero_probability_errors() {
        let m = measure(vec![Rational::one(), Rational::zero(), Rational::zero()]);
        let b = Event::from_labels(m.space(), &["a2", "a3"]).unwrap();
        assert_eq!(m.condition(&b).unwrap_err(), DomainError::ZeroProbabilityEvent);
    }

    #[test]
    fn condition_then_reweight_recovers_restriction() {
        let m = measure(vec![rat(3, 5), rat(3, 10), rat(1, 10)]);
        let b = Event::from_labels(m.space(), &["a1", "a2"]).unwrap();
        let mass = m.event_mass(&b);
        let c = m.condition(&b).unwrap();
        for (j, i) in b.indices().enumerate() {
            assert_eq!(c.weight(j) * &mass, *m.weight(i));
        }
    }

    #[test]
    fn product_point_masses() {
        let p = measure(vec![Rational::one(), Rational::zero()]);
        let q = Measure::new(
            StateSpace::new(vec!["c1", "c2"]).unwrap(),
            vec![Rational::zero(), Rational::one()],
        )
        .unwrap();
        let pq = p.product(&q);
        assert_eq!(pq.weights(), &[Rational::zero(), Rational::one(), Rational::zero(), Rational::zero()]);
        assert_eq!(pq.space().label(1), "(a1,c2)");
    }

    #[test]
    fn product_coordinatewise() {
        let p = measure(vec![rat(3, 5), rat(2, 5)]);
        let q = Measure::new(
            StateSpace::new(vec!["c1", "c2"]).unwrap(),
            vec![rat(1, 2), rat(1, 2)],
        )
        .unwrap();
        let pq = p.product(&q);
        assert_eq!(pq.weights(), &[rat(3, 10), rat(3, 10), rat(1, 5), rat(1, 5)]);
    }

    #[test]
    fn product_marginals_recover_factors() {
        let p = measure(vec![rat(3, 5), rat(2, 5)]);
        let q = Measure::new(
            StateSpace::new(vec!["c1", "c2", "c3"]).unwrap(),
            vec![rat(1, 6), rat(1, 3), rat(1, 2)],
        )
        .unwrap();
        let pq = p.product(&q);
        assert_eq!(pq.marginal(0).unwrap().weights(), p.weights());
        assert_eq!(pq.marginal(1).unwrap().weights(), q.weights());
    }

    #[test]
    fn aggregate_by_blocks() {
        let s = space(4);
        // Blocks {{a1,a2},{a3},{a4}} applied to (1/3,1/3,1/3,0) give (2/3,1/3,0).
        let part = Partition::from_blocks(&s, vec![vec![0, 1], vec![2], vec![3]]).unwrap();
        let m = Measure::new(s, vec![rat(1, 3), rat(1, 3), rat(1, 3), Rational::zero()]).unwrap();
        let agg = m.aggregate(&part).unwrap();
        assert_eq!(agg.weights(), &[rat(2, 3), rat(1, 3), Rational::zero()]);
    }

    #[test]
    fn aggregate_identity_and_total() {
        let s = space(3);
        let m = Measure::new(s.clone(), vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        let singles = Partition::singletons(&s);
        assert_eq!(m.aggregate(&singles).unwrap().weights(), m.weights());
        let whole = Partition::one_block(&s);
        assert_eq!(m.aggregate(&whole).unwrap().weights(), &[Rational::one()]);
    }
}
