//! Order-preserving maps between two lattices and the conditions that make
//! a pair of them a secure bidirectional connection.
//!
//! A [`ConnectionPair`] `(L, α, γ, M)` links a left lattice `L` and a right
//! lattice `M` with `α: L → M` and `γ: M → L`. Both maps may be partial: only
//! the recorded transfer classes participate, and every quantified condition
//! ranges over the recorded domains.

mod budpoint;
mod checks;
mod derive;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{Class, FiniteLattice, LatticeError};

pub use budpoint::{
    budpoints, equiv_classes, escalation_report, roundtrip_infimum_check, Block, Budpoints, Chain,
    Escalation, Partition,
};
pub use checks::{
    check_convergence, check_galois, check_galois_insertion, check_lagois, check_monotone,
    check_precision, check_security, verify_all,
};
pub use derive::{derive_partner, DeriveError, Direction};
pub use report::{Condition, Entry, Report, RoundTripCondition, VerificationReport, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("map `{map}` assigns `{class}` twice")]
    DuplicateEntry { map: String, class: String },
    #[error("map `{map}` is declared over `{found}` but `{expected}` was required")]
    LatticeMismatch {
        map: String,
        expected: String,
        found: String,
    },
    #[error("composition undefined: `{map}` sends `{class}` to `{image}`, which the partner map does not cover")]
    CompositionUndefined {
        map: String,
        class: String,
        image: String,
    },
}

/// Raised by operations that require a Lagois connection.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a Lagois connection: {} failed", failed.iter().map(|c| c.id()).collect::<Vec<_>>().join(", "))]
pub struct NotLagois {
    pub failed: Vec<Condition>,
}

/// A possibly partial map between the classes of two lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMap {
    id: String,
    source: String,
    target: String,
    entries: BTreeMap<Class, Class>,
}

impl ClassMap {
    pub fn new(
        id: &str,
        source: &FiniteLattice,
        target: &FiniteLattice,
        entries: BTreeMap<Class, Class>,
    ) -> Self {
        debug_assert!(entries
            .iter()
            .all(|(&k, &v)| source.contains(k) && target.contains(v)));
        ClassMap {
            id: id.to_string(),
            source: source.id().to_string(),
            target: target.id().to_string(),
            entries,
        }
    }

    /// Builds a map from `(source class, target class)` name pairs.
    pub fn from_names<I, A, B>(
        id: &str,
        source: &FiniteLattice,
        target: &FiniteLattice,
        pairs: I,
    ) -> Result<Self, ConnectionError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut entries = BTreeMap::new();
        for (a, b) in pairs {
            let k = source.class(a.as_ref())?;
            let v = target.class(b.as_ref())?;
            if entries.insert(k, v).is_some() {
                return Err(ConnectionError::DuplicateEntry {
                    map: id.to_string(),
                    class: a.as_ref().to_string(),
                });
            }
        }
        Ok(ClassMap::new(id, source, target, entries))
    }

    /// A total map defined by a function over every source class.
    pub fn from_fn(
        id: &str,
        source: &FiniteLattice,
        target: &FiniteLattice,
        f: impl Fn(Class) -> Class,
    ) -> Self {
        let entries = source.classes().map(|c| (c, f(c))).collect();
        ClassMap::new(id, source, target, entries)
    }

    pub fn identity(id: &str, lattice: &FiniteLattice) -> Self {
        ClassMap::from_fn(id, lattice, lattice, |c| c)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.id = id.to_string();
        self
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn get(&self, c: Class) -> Option<Class> {
        self.entries.get(&c).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Class, Class)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The transfer classes: the recorded domain.
    pub fn domain(&self) -> impl Iterator<Item = Class> + '_ {
        self.entries.keys().copied()
    }

    pub fn in_domain(&self, c: Class) -> bool {
        self.entries.contains_key(&c)
    }

    pub fn image(&self) -> BTreeSet<Class> {
        self.entries.values().copied().collect()
    }

    /// Domain elements sent to `target`.
    pub fn preimage(&self, target: Class) -> impl Iterator<Item = Class> + '_ {
        self.entries
            .iter()
            .filter(move |(_, &v)| v == target)
            .map(|(&k, _)| k)
    }

    /// Restricts the map to the given source classes.
    pub fn restrict(&self, keep: impl Fn(Class) -> bool) -> ClassMap {
        ClassMap {
            entries: self
                .entries
                .iter()
                .filter(|(&k, _)| keep(k))
                .map(|(&k, &v)| (k, v))
                .collect(),
            ..self.clone()
        }
    }

    fn check_lattices(
        &self,
        source: &FiniteLattice,
        target: &FiniteLattice,
    ) -> Result<(), ConnectionError> {
        for (expected, found) in [(source.id(), &self.source), (target.id(), &self.target)] {
            if expected != found {
                return Err(ConnectionError::LatticeMismatch {
                    map: self.id.clone(),
                    expected: expected.to_string(),
                    found: found.clone(),
                });
            }
        }
        if let Some((&k, _)) = self
            .entries
            .iter()
            .find(|(&k, &v)| !source.contains(k) || !target.contains(v))
        {
            return Err(ConnectionError::LatticeMismatch {
                map: self.id.clone(),
                expected: source.id().to_string(),
                found: format!("class index {}", k.index()),
            });
        }
        Ok(())
    }
}

/// The quadruple `(L, α, γ, M)`.
///
/// Construction guarantees that `α[L] ⊆ dom γ` and `γ[M] ⊆ dom α`, so every
/// composition the checks evaluate is defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionPair {
    left: Arc<FiniteLattice>,
    right: Arc<FiniteLattice>,
    alpha: ClassMap,
    gamma: ClassMap,
}

impl ConnectionPair {
    pub fn new(
        left: Arc<FiniteLattice>,
        right: Arc<FiniteLattice>,
        alpha: ClassMap,
        gamma: ClassMap,
    ) -> Result<Self, ConnectionError> {
        alpha.check_lattices(&left, &right)?;
        gamma.check_lattices(&right, &left)?;
        for (f, g, src, dst) in [
            (&alpha, &gamma, &left, &right),
            (&gamma, &alpha, &right, &left),
        ] {
            if let Some((k, v)) = f.entries().find(|&(_, v)| !g.in_domain(v)) {
                return Err(ConnectionError::CompositionUndefined {
                    map: f.id().to_string(),
                    class: src.name(k).to_string(),
                    image: dst.name(v).to_string(),
                });
            }
        }
        Ok(ConnectionPair {
            left,
            right,
            alpha,
            gamma,
        })
    }

    /// `(L, id, id, L)`.
    pub fn identity(lattice: Arc<FiniteLattice>) -> Self {
        let alpha = ClassMap::identity("alpha", &lattice);
        let gamma = ClassMap::identity("gamma", &lattice);
        ConnectionPair {
            left: lattice.clone(),
            right: lattice,
            alpha,
            gamma,
        }
    }

    pub fn left(&self) -> &Arc<FiniteLattice> {
        &self.left
    }

    pub fn right(&self) -> &Arc<FiniteLattice> {
        &self.right
    }

    pub fn alpha(&self) -> &ClassMap {
        &self.alpha
    }

    pub fn gamma(&self) -> &ClassMap {
        &self.gamma
    }

    /// `α(l)`, if `l` is a transfer class.
    pub fn up(&self, l: Class) -> Option<Class> {
        self.alpha.get(l)
    }

    /// `γ(m)`, if `m` is a transfer class.
    pub fn down(&self, m: Class) -> Option<Class> {
        self.gamma.get(m)
    }

    /// `γ(α(l))`.
    pub fn round_trip_left(&self, l: Class) -> Option<Class> {
        self.up(l).and_then(|m| self.down(m))
    }

    /// `α(γ(m))`.
    pub fn round_trip_right(&self, m: Class) -> Option<Class> {
        self.down(m).and_then(|l| self.up(l))
    }

    /// Renders α and γ as cross-domain flow edges for a MoU audit.
    pub fn mou_edges(&self) -> crate::audit::MouEdgeSet {
        use crate::audit::{MouEdge, Node};
        use crate::Side;
        let mut edges = BTreeSet::new();
        for (l, m) in self.alpha.entries() {
            edges.insert(MouEdge::new(
                Node::new(Side::Left, l),
                Node::new(Side::Right, m),
            ));
        }
        for (m, l) in self.gamma.entries() {
            edges.insert(MouEdge::new(
                Node::new(Side::Right, m),
                Node::new(Side::Left, l),
            ));
        }
        crate::audit::MouEdgeSet::from_edges(self.left.clone(), self.right.clone(), edges)
    }
}
