//! Finite security-class lattices.
//!
//! A [`FiniteLattice`] is built from a set of class names and a set of
//! ordered pairs (usually the cover relation of a Hasse diagram, but any
//! pairs whose reflexive-transitive closure is the intended order are
//! accepted). Construction validates antisymmetry and the existence of
//! every binary join and meet, then precomputes order, join and meet tables
//! so queries are table lookups.
//!
//! Elements are indexed by [`Class`] in lexicographic order of their names,
//! so iterating a lattice, a map, or a report always visits classes in name
//! order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Lattices above this size are still accepted, but the exhaustive checks
/// in this crate are tuned for desk-scale policies.
pub const SOFT_MAX_ELEMENTS: usize = 64;

/// A security class, identified by its position in the owning lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Class(pub(crate) u32);

impl Class {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Join,
    Meet,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Join => f.write_str("least upper bound"),
            Bound::Meet => f.write_str("greatest lower bound"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice `{0}` has no elements")]
    Empty(String),
    #[error("class `{class}` declared twice in lattice `{lattice}`")]
    DuplicateClass { lattice: String, class: String },
    #[error("unknown class `{class}` in lattice `{lattice}`")]
    UnknownClass { lattice: String, class: String },
    #[error("order of lattice `{lattice}` has a cycle through `{a}` and `{b}`")]
    Cycle {
        lattice: String,
        a: String,
        b: String,
    },
    #[error("`{a}` and `{b}` have no unique {bound} in `{lattice}`")]
    NotALattice {
        lattice: String,
        a: String,
        b: String,
        bound: Bound,
    },
}

/// A validated finite lattice of security classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    id: String,
    names: Vec<String>,
    index: BTreeMap<String, Class>,
    // row-major n*n closure of the supplied order
    leq: Vec<bool>,
    join: Vec<Class>,
    meet: Vec<Class>,
    covers: Vec<(Class, Class)>,
    top: Class,
    bottom: Class,
}

impl FiniteLattice {
    /// Builds and validates a lattice.
    ///
    /// `edges` are pairs `(a, b)` meaning `a ⊑ b`. Reflexive and transitively
    /// implied pairs are accepted and normalised away.
    pub fn new<I, S, E, A, B>(id: &str, elements: I, edges: E) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
        E: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut seen = BTreeSet::new();
        for name in elements {
            let name = name.as_ref();
            if !seen.insert(name.to_string()) {
                return Err(LatticeError::DuplicateClass {
                    lattice: id.to_string(),
                    class: name.to_string(),
                });
            }
        }
        if seen.is_empty() {
            return Err(LatticeError::Empty(id.to_string()));
        }
        let names: Vec<String> = seen.into_iter().collect();
        let index: BTreeMap<String, Class> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), Class(i as u32)))
            .collect();
        let n = names.len();

        let resolve = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| LatticeError::UnknownClass {
                    lattice: id.to_string(),
                    class: name.to_string(),
                })
        };

        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in edges {
            let a = resolve(a.as_ref())?;
            let b = resolve(b.as_ref())?;
            leq[a.index() * n + b.index()] = true;
        }
        // Warshall closure
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(LatticeError::Cycle {
                        lattice: id.to_string(),
                        a: names[i].clone(),
                        b: names[j].clone(),
                    });
                }
            }
        }

        let mut join = vec![Class(0); n * n];
        let mut meet = vec![Class(0); n * n];
        for i in 0..n {
            for j in i..n {
                for (bound, table) in [(Bound::Join, &mut join), (Bound::Meet, &mut meet)] {
                    let found = extremal_bound(&leq, n, i, j, bound).ok_or_else(|| {
                        LatticeError::NotALattice {
                            lattice: id.to_string(),
                            a: names[i].clone(),
                            b: names[j].clone(),
                            bound,
                        }
                    })?;
                    table[i * n + j] = Class(found as u32);
                    table[j * n + i] = Class(found as u32);
                }
            }
        }

        // every pair has a join, so folding joins yields the maximum
        let top = (0..n).fold(Class(0), |acc, i| join[acc.index() * n + i]);
        let bottom = (0..n).fold(Class(0), |acc, i| meet[acc.index() * n + i]);

        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b
                    && leq[a * n + b]
                    && !(0..n).any(|c| c != a && c != b && leq[a * n + c] && leq[c * n + b])
                {
                    covers.push((Class(a as u32), Class(b as u32)));
                }
            }
        }

        Ok(FiniteLattice {
            id: id.to_string(),
            names,
            index,
            leq,
            join,
            meet,
            covers,
            top,
            bottom,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn top(&self) -> Class {
        self.top
    }

    pub fn bottom(&self) -> Class {
        self.bottom
    }

    /// All classes in lexicographic name order.
    pub fn classes(&self) -> impl DoubleEndedIterator<Item = Class> + ExactSizeIterator + '_ {
        (0..self.names.len() as u32).map(Class)
    }

    pub fn name(&self, c: Class) -> &str {
        &self.names[c.index()]
    }

    pub fn class(&self, name: &str) -> Result<Class, LatticeError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| LatticeError::UnknownClass {
                lattice: self.id.clone(),
                class: name.to_string(),
            })
    }

    pub fn contains(&self, c: Class) -> bool {
        c.index() < self.names.len()
    }

    /// `a ⊑ b`: information may flow from `a` to `b`.
    pub fn leq(&self, a: Class, b: Class) -> bool {
        self.leq[a.index() * self.len() + b.index()]
    }

    pub fn lt(&self, a: Class, b: Class) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn join(&self, a: Class, b: Class) -> Class {
        self.join[a.index() * self.len() + b.index()]
    }

    pub fn meet(&self, a: Class, b: Class) -> Class {
        self.meet[a.index() * self.len() + b.index()]
    }

    /// Join of a set; the join of the empty set is bottom.
    pub fn join_all<I: IntoIterator<Item = Class>>(&self, classes: I) -> Class {
        classes
            .into_iter()
            .fold(self.bottom, |acc, c| self.join(acc, c))
    }

    /// Meet of a set; the meet of the empty set is top.
    pub fn meet_all<I: IntoIterator<Item = Class>>(&self, classes: I) -> Class {
        classes
            .into_iter()
            .fold(self.top, |acc, c| self.meet(acc, c))
    }

    /// Name-based order query for callers holding class names.
    pub fn leq_by_name(&self, a: &str, b: &str) -> Result<bool, LatticeError> {
        Ok(self.leq(self.class(a)?, self.class(b)?))
    }

    pub fn join_by_name(&self, a: &str, b: &str) -> Result<&str, LatticeError> {
        Ok(self.name(self.join(self.class(a)?, self.class(b)?)))
    }

    pub fn meet_by_name(&self, a: &str, b: &str) -> Result<&str, LatticeError> {
        Ok(self.name(self.meet(self.class(a)?, self.class(b)?)))
    }

    /// Cover relation (Hasse edges) `(a, b)` with `a ⋖ b`, sorted.
    pub fn covers(&self) -> &[(Class, Class)] {
        &self.covers
    }

    /// Greatest lower bound of `set` within the sub-poset `within`, if the
    /// sub-poset has one.
    pub fn meet_within(&self, set: &[Class], within: &BTreeSet<Class>) -> Option<Class> {
        let lower: Vec<Class> = within
            .iter()
            .copied()
            .filter(|&c| set.iter().all(|&a| self.leq(c, a)))
            .collect();
        lower
            .iter()
            .copied()
            .find(|&g| lower.iter().all(|&c| self.leq(c, g)))
    }

    /// Least upper bound of `set` within the sub-poset `within`, if any.
    pub fn join_within(&self, set: &[Class], within: &BTreeSet<Class>) -> Option<Class> {
        let upper: Vec<Class> = within
            .iter()
            .copied()
            .filter(|&c| set.iter().all(|&a| self.leq(a, c)))
            .collect();
        upper
            .iter()
            .copied()
            .find(|&l| upper.iter().all(|&c| self.leq(l, c)))
    }
}

fn extremal_bound(leq: &[bool], n: usize, a: usize, b: usize, bound: Bound) -> Option<usize> {
    let rel = |x: usize, y: usize| match bound {
        Bound::Join => leq[x * n + y],
        Bound::Meet => leq[y * n + x],
    };
    let candidates: Vec<usize> = (0..n).filter(|&c| rel(a, c) && rel(b, c)).collect();
    candidates
        .iter()
        .copied()
        .find(|&c| candidates.iter().all(|&d| rel(c, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::college;

    #[test]
    fn chain_is_lattice() {
        let l = FiniteLattice::new("T", ["b", "s", "f"], [("b", "s"), ("s", "f")]).unwrap();
        assert_eq!(l.name(l.top()), "f");
        assert_eq!(l.name(l.bottom()), "b");
    }

    #[test]
    fn college_lattice_queries() {
        let c = college();
        assert_eq!(c.name(c.top()), "top1");
        assert_eq!(c.name(c.bottom()), "bot1");
        assert!(c.leq_by_name("Student", "Principal").unwrap());
        assert!(!c.leq_by_name("Faculty", "DeanS").unwrap());
        assert!(c.leq_by_name("Faculty", "Faculty").unwrap());
        assert_eq!(c.join_by_name("Faculty", "DeanS").unwrap(), "Principal");
        assert_eq!(c.meet_by_name("Faculty", "DeanS").unwrap(), "Student");
        for a in c.classes() {
            assert_eq!(c.join(a, c.bottom()), a);
        }
    }

    #[test]
    fn unknown_class_query() {
        let c = college();
        assert!(matches!(
            c.leq_by_name("Faculty", "Dean"),
            Err(LatticeError::UnknownClass { .. })
        ));
    }

    #[test]
    fn missing_top_is_reported_with_witness() {
        let err = FiniteLattice::new("D", ["a", "b", "c"], [("a", "b"), ("a", "c")]).unwrap_err();
        match err {
            LatticeError::NotALattice { a, b, bound, .. } => {
                assert_eq!((a.as_str(), b.as_str()), ("b", "c"));
                assert_eq!(bound, Bound::Join);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cycle_rejected() {
        let err = FiniteLattice::new("X", ["a", "b"], [("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, LatticeError::Cycle { .. }));
    }

    #[test]
    fn redundant_edges_normalised() {
        let plain = FiniteLattice::new("T", ["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        let noisy = FiniteLattice::new(
            "T",
            ["c", "a", "b"],
            [("a", "b"), ("b", "c"), ("a", "c"), ("b", "b")],
        )
        .unwrap();
        assert_eq!(plain, noisy);
        assert_eq!(noisy.covers().len(), 2);
    }

    #[test]
    fn empty_and_duplicate_rejected() {
        assert!(matches!(
            FiniteLattice::new("E", Vec::<&str>::new(), Vec::<(&str, &str)>::new()),
            Err(LatticeError::Empty(_))
        ));
        assert!(matches!(
            FiniteLattice::new("E", ["a", "a"], Vec::<(&str, &str)>::new()),
            Err(LatticeError::DuplicateClass { .. })
        ));
        assert!(matches!(
            FiniteLattice::new("E", ["a"], [("a", "z")]),
            Err(LatticeError::UnknownClass { .. })
        ));
    }

    #[test]
    fn classes_in_name_order() {
        let c = college();
        let names: Vec<&str> = c.classes().map(|k| c.name(k)).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }
}
