//! Audits of negotiated cross-domain flow agreements (MoUs).
//!
//! The union graph has the Hasse edges of both lattices plus the agreed
//! cross-domain edges. Any same-lattice pair `a ⇝ b` reachable in the union
//! graph without `a ⊑ b` in that lattice is a new, unauthorised flow.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{Class, FiniteLattice};
use crate::Side;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub side: Side,
    pub class: Class,
}

impl Node {
    pub fn new(side: Side, class: Class) -> Self {
        Node { side, class }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MouEdge {
    pub from: Node,
    pub to: Node,
}

impl MouEdge {
    pub fn new(from: Node, to: Node) -> Self {
        MouEdge { from, to }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MouError {
    #[error("edge {from} -> {to} stays inside one lattice")]
    SameLattice { from: String, to: String },
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// Directed permitted-flow edges between two lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MouEdgeSet {
    left: Arc<FiniteLattice>,
    right: Arc<FiniteLattice>,
    edges: BTreeSet<MouEdge>,
}

impl MouEdgeSet {
    pub(crate) fn from_edges(
        left: Arc<FiniteLattice>,
        right: Arc<FiniteLattice>,
        edges: BTreeSet<MouEdge>,
    ) -> Self {
        MouEdgeSet { left, right, edges }
    }

    pub fn new(left: Arc<FiniteLattice>, right: Arc<FiniteLattice>) -> Self {
        MouEdgeSet {
            left,
            right,
            edges: BTreeSet::new(),
        }
    }

    /// Adds `from → to`; the two endpoints must be on different sides.
    pub fn add(&mut self, from: (Side, &str), to: (Side, &str)) -> Result<(), MouError> {
        if from.0 == to.0 {
            return Err(MouError::SameLattice {
                from: from.1.to_string(),
                to: to.1.to_string(),
            });
        }
        let from = Node::new(from.0, self.lattice(from.0).class(from.1)?);
        let to = Node::new(to.0, self.lattice(to.0).class(to.1)?);
        self.edges.insert(MouEdge::new(from, to));
        Ok(())
    }

    pub fn left(&self) -> &Arc<FiniteLattice> {
        &self.left
    }

    pub fn right(&self) -> &Arc<FiniteLattice> {
        &self.right
    }

    pub fn lattice(&self, side: Side) -> &FiniteLattice {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = &MouEdge> {
        self.edges.iter()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn name(&self, n: Node) -> &str {
        self.lattice(n.side).name(n.class)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// A Hasse edge inside one lattice.
    Order,
    /// An agreed cross-domain edge.
    Cross,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Order => "order",
            EdgeKind::Cross => "mou",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub from: Node,
    pub to: Node,
    pub kind: EdgeKind,
}

/// An unauthorised flow `from ⇝ to` inside one lattice, with a shortest
/// witness path through the union graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub from: Node,
    pub to: Node,
    pub path: Vec<Step>,
}

pub fn audit_mou(edges: &MouEdgeSet) -> Vec<Violation> {
    let mut adj: BTreeMap<Node, Vec<(Node, EdgeKind)>> = BTreeMap::new();
    for side in [Side::Left, Side::Right] {
        for &(a, b) in edges.lattice(side).covers() {
            adj.entry(Node::new(side, a))
                .or_default()
                .push((Node::new(side, b), EdgeKind::Order));
        }
    }
    for e in &edges.edges {
        adj.entry(e.from).or_default().push((e.to, EdgeKind::Cross));
    }
    for next in adj.values_mut() {
        next.sort_by_key(|&(n, _)| n);
        next.dedup_by_key(|&mut (n, _)| n);
    }

    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        let lattice = edges.lattice(side);
        for a in lattice.classes() {
            let start = Node::new(side, a);
            let parents = bfs(&adj, start);
            for b in lattice.classes() {
                let target = Node::new(side, b);
                if target == start || lattice.leq(a, b) {
                    continue;
                }
                if parents.contains_key(&target) {
                    out.push(Violation {
                        from: start,
                        to: target,
                        path: trace(&parents, start, target),
                    });
                }
            }
        }
    }
    out
}

fn bfs(
    adj: &BTreeMap<Node, Vec<(Node, EdgeKind)>>,
    start: Node,
) -> BTreeMap<Node, (Node, EdgeKind)> {
    let mut parents = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        for &(m, kind) in adj.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
            if m != start && !parents.contains_key(&m) {
                parents.insert(m, (n, kind));
                queue.push_back(m);
            }
        }
    }
    parents
}

fn trace(parents: &BTreeMap<Node, (Node, EdgeKind)>, start: Node, target: Node) -> Vec<Step> {
    let mut path = Vec::new();
    let mut cur = target;
    while cur != start {
        let (prev, kind) = parents[&cur];
        path.push(Step {
            from: prev,
            to: cur,
            kind,
        });
        cur = prev;
    }
    path.reverse();
    path
}
