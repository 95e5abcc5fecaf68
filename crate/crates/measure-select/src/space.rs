//! Finite state spaces and events.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

#[derive(Debug, PartialEq, Eq)]
struct SpaceInner {
    labels: Vec<String>,
    /// Present when this space is a cartesian product of component spaces.
    factors: Option<Vec<StateSpace>>,
}

/// An ordered finite set of mutually exclusive outcomes. The ordering fixes
/// the identification of the measures on this space with points of the
/// standard simplex.
///
/// Cheap to clone; the label data is shared.
#[derive(Clone, PartialEq, Eq)]
pub struct StateSpace(Arc<SpaceInner>);

impl StateSpace {
    /// A space from distinct, nonempty labels. Size must be at least 1.
    pub fn new<S: Into<String>>(labels: Vec<S>) -> Result<Self, DomainError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(DomainError::EmptySpace);
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if l.is_empty() {
                return Err(DomainError::EmptyLabel);
            }
            if !seen.insert(l.clone()) {
                return Err(DomainError::DuplicateLabel(l.clone()));
            }
        }
        Ok(StateSpace(Arc::new(SpaceInner { labels, factors: None })))
    }

    /// The cartesian product of `factors`, with tuple labels `(b,c)` in
    /// row-major order (last factor fastest).
    pub fn product(factors: &[StateSpace]) -> Self {
        assert!(factors.len() >= 2, "product needs at least two factors");
        let mut labels = vec![String::new()];
        for f in factors {
            let mut next = Vec::with_capacity(labels.len() * f.len());
            for prefix in &labels {
                for l in f.labels() {
                    if prefix.is_empty() {
                        next.push(l.clone());
                    } else {
                        next.push(format!("{prefix},{l}"));
                    }
                }
            }
            labels = next;
        }
        let labels = labels.into_iter().map(|l| format!("({l})")).collect();
        StateSpace(Arc::new(SpaceInner {
            labels,
            factors: Some(factors.to_vec()),
        }))
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // size >= 1 by construction
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.labels.iter().position(|l| l == label)
    }

    pub fn factors(&self) -> Option<&[StateSpace]> {
        self.0.factors.as_deref()
    }

    /// For a product space, the index of the component state of `state` along
    /// factor `k`, and the stride needed to walk that factor's fiber.
    pub(crate) fn factor_layout(&self) -> Option<Vec<(usize, usize)>> {
        let factors = self.factors()?;
        let mut sizes: Vec<usize> = factors.iter().map(|f| f.len()).collect();
        let mut strides = vec![1usize; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Some(sizes.drain(..).zip(strides).collect())
    }
}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

impl Serialize for StateSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(deserializer)?;
        StateSpace::new(labels).map_err(serde::de::Error::custom)
    }
}

/// A subset of a state space's outcomes.
#[derive(Clone, PartialEq, Eq)]
pub struct Event {
    space: StateSpace,
    members: BTreeSet<usize>,
}

impl Event {
    pub fn from_labels(space: &StateSpace, labels: &[&str]) -> Result<Self, DomainError> {
        let mut members = BTreeSet::new();
        for l in labels {
            let i = space
                .index_of(l)
                .ok_or_else(|| DomainError::UnknownLabel((*l).to_string()))?;
            members.insert(i);
        }
        Ok(Event {
            space: space.clone(),
            members,
        })
    }

    pub fn from_indices(space: &StateSpace, indices: impl IntoIterator<Item = usize>) -> Result<Self, DomainError> {
        let mut members = BTreeSet::new();
        for i in indices {
            if i >= space.len() {
                return Err(DomainError::IndexOutOfRange(i));
            }
            members.insert(i);
        }
        Ok(Event {
            space: space.clone(),
            members,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The complementary event.
    pub fn complement(&self) -> Event {
        let members = (0..self.space.len()).filter(|i| !self.members.contains(i)).collect();
        Event {
            space: self.space.clone(),
            members,
        }
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.members.iter().map(|&i| self.space.label(i)).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_spaces() {
        assert!(StateSpace::new(Vec::<String>::new()).is_err());
        assert!(StateSpace::new(vec!["a", "a"]).is_err());
        assert!(StateSpace::new(vec!["a", ""]).is_err());
    }

    #[test]
    fn product_labels_are_tuples() {
        let b = StateSpace::new(vec!["b1", "b2"]).unwrap();
        let c = StateSpace::new(vec!["c1", "c2", "c3"]).unwrap();
        let p = StateSpace::product(&[b.clone(), c.clone()]);
        assert_eq!(p.len(), 6);
        assert_eq!(p.label(0), "(b1,c1)");
        assert_eq!(p.label(5), "(b2,c3)");
        assert_eq!(p.factors().unwrap().len(), 2);
    }

    #[test]
    fn event_complement() {
        let s = StateSpace::new(vec!["a1", "a2", "a3"]).unwrap();
        let e = Event::from_labels(&s, &["a1"]).unwrap();
        let c = e.complement();
        assert_eq!(c.len(), 2);
        assert!(c.contains(1) && c.contains(2));
    }
}
