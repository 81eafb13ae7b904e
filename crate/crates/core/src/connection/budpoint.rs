//! Budpoints, the equivalence classes they represent, and the round-trip
//! identities that hold in a Lagois connection.

use std::collections::{BTreeMap, BTreeSet};

use super::checks::check_lagois;
use super::report::{Entry, Report, RoundTripCondition, Witness};
use super::{ClassMap, ConnectionPair, NotLagois};
use crate::lattice::{Class, FiniteLattice};

fn require_lagois(p: &ConnectionPair) -> Result<(), NotLagois> {
    let report = check_lagois(p);
    if report.is_lagois() {
        Ok(())
    } else {
        Err(NotLagois {
            failed: report.failed_conditions(),
        })
    }
}

/// `L* = γ[M]` and `M* = α[L]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budpoints {
    pub left: BTreeSet<Class>,
    pub right: BTreeSet<Class>,
}

pub fn budpoints(p: &ConnectionPair) -> Result<Budpoints, NotLagois> {
    require_lagois(p)?;
    Ok(Budpoints {
        left: p.gamma.image(),
        right: p.alpha.image(),
    })
}

/// One equivalence class. `representative` is its budpoint, or `None` for
/// the singleton blocks of classes outside the transfer domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub members: Vec<Class>,
    pub representative: Option<Class>,
}

impl Block {
    pub fn outside_domain(&self) -> bool {
        self.representative.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub left: Vec<Block>,
    pub right: Vec<Block>,
}

impl Partition {
    /// The left block containing `c`.
    pub fn left_block(&self, c: Class) -> Option<&Block> {
        self.left.iter().find(|b| b.members.contains(&c))
    }

    pub fn right_block(&self, c: Class) -> Option<&Block> {
        self.right.iter().find(|b| b.members.contains(&c))
    }
}

fn blocks(lattice: &FiniteLattice, f: &ClassMap, g: &ClassMap) -> Vec<Block> {
    let mut groups: BTreeMap<Class, Vec<Class>> = BTreeMap::new();
    for (x, y) in f.entries() {
        groups.entry(y).or_default().push(x);
    }
    let mut out: Vec<Block> = groups
        .into_iter()
        .map(|(y, members)| Block {
            members,
            representative: g.get(y),
        })
        .collect();
    out.extend(
        lattice
            .classes()
            .filter(|&c| !f.in_domain(c))
            .map(|c| Block {
                members: vec![c],
                representative: None,
            }),
    );
    out.sort_by_key(|b| b.members[0]);
    out
}

/// Partitions of L (by α-image) and M (by γ-image).
pub fn equiv_classes(p: &ConnectionPair) -> Result<Partition, NotLagois> {
    require_lagois(p)?;
    Ok(Partition {
        left: blocks(&p.left, &p.alpha, &p.gamma),
        right: blocks(&p.right, &p.gamma, &p.alpha),
    })
}

struct Half<'a> {
    src: &'a FiniteLattice,
    dst: &'a FiniteLattice,
    f: &'a ClassMap,
    g: &'a ClassMap,
}

impl Half<'_> {
    fn closure(&self, x: Class) -> Class {
        self.g.get(self.f.get(x).unwrap()).unwrap()
    }

    /// `g(f(x)) = ⊓{x* ∈ g[dst] | x ⊑ x*}` for every `x ∈ dom f`.
    fn infimum(&self) -> Vec<Witness> {
        let buds = self.g.image();
        self.f
            .domain()
            .filter_map(|x| {
                let inf = self
                    .src
                    .meet_all(buds.iter().copied().filter(|&b| self.src.leq(x, b)));
                let rt = self.closure(x);
                (inf != rt).then(|| {
                    Witness::new([self.src.name(x), self.src.name(rt), self.src.name(inf)])
                        .with_note("round trip differs from the meet of upper budpoints")
                })
            })
            .collect()
    }

    /// For `y ∈ f[src]`, `f⁻¹(y)` has largest member `g(y)`.
    fn largest_preimage(&self) -> Vec<Witness> {
        let mut out = Vec::new();
        for y in self.f.image() {
            let pre: Vec<Class> = self.f.preimage(y).collect();
            let gy = self.g.get(y).unwrap();
            let largest = pre
                .iter()
                .copied()
                .find(|&a| pre.iter().all(|&b| self.src.leq(b, a)));
            if largest != Some(gy) {
                out.push(
                    Witness::new([
                        self.dst.name(y).to_string(),
                        self.src.name(gy).to_string(),
                        largest.map_or("-".to_string(), |c| self.src.name(c).to_string()),
                    ])
                    .with_note("largest preimage member differs"),
                );
            }
        }
        out
    }

    /// Meets of subsets `A ⊆ g[dst]` (1 ≤ |A| ≤ 3) computed inside the
    /// image agree with meets in `src`.
    fn meet_agreement(&self, buds: &BTreeSet<Class>) -> Vec<Witness> {
        let mut out = Vec::new();
        for set in small_subsets(buds, 3) {
            let full = self.src.meet_all(set.iter().copied());
            let inside = self.src.meet_within(&set, buds);
            if inside != Some(full) {
                out.push(
                    Witness::new(set.iter().map(|&c| self.src.name(c)))
                        .with_note(format!("meet is {} in the lattice", self.src.name(full))),
                );
            }
        }
        out
    }

    /// The join of `A ⊆ g[dst]` inside the image is `g(f(⊔A))`.
    fn join_closure(&self, buds: &BTreeSet<Class>) -> Vec<Witness> {
        let mut out = Vec::new();
        for set in small_subsets(buds, 3) {
            let full = self.src.join_all(set.iter().copied());
            let inside = self.src.join_within(&set, buds);
            let expected = self.f.get(full).and_then(|y| self.g.get(y));
            if inside.is_none() || inside != expected {
                out.push(
                    Witness::new(set.iter().map(|&c| self.src.name(c)))
                        .with_note("join within the image is not the closure of the join"),
                );
            }
        }
        out
    }
}

fn small_subsets(set: &BTreeSet<Class>, max: usize) -> Vec<Vec<Class>> {
    let items: Vec<Class> = set.iter().copied().collect();
    let mut out = Vec::new();
    fn go(
        items: &[Class],
        start: usize,
        max: usize,
        cur: &mut Vec<Class>,
        out: &mut Vec<Vec<Class>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, i + 1, max, cur, out);
            cur.pop();
        }
    }
    go(&items, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Checks the round-trip identities of a Lagois connection: round trips
/// equal the meet of upper budpoints, preimages have the partner's value as
/// largest member, the two images are order-isomorphic, and subsets of the
/// images (up to three elements) have meets and joins that agree with the
/// surrounding lattice.
pub fn roundtrip_infimum_check(
    p: &ConnectionPair,
) -> Result<Report<RoundTripCondition>, NotLagois> {
    require_lagois(p)?;
    let fw = Half {
        src: &p.left,
        dst: &p.right,
        f: &p.alpha,
        g: &p.gamma,
    };
    let bw = Half {
        src: &p.right,
        dst: &p.left,
        f: &p.gamma,
        g: &p.alpha,
    };
    let (lbuds, mbuds) = (p.gamma.image(), p.alpha.image());

    let mut iso = Vec::new();
    for &l in &lbuds {
        let m = p.alpha.get(l).unwrap();
        if !mbuds.contains(&m) || p.gamma.get(m) != Some(l) {
            iso.push(Witness::new([p.left.name(l), p.right.name(m)]).with_note("not inverse"));
        }
    }
    if lbuds.len() != mbuds.len() {
        iso.push(
            Witness::new([lbuds.len().to_string(), mbuds.len().to_string()])
                .with_note("image sizes differ"),
        );
    }
    for &a in &lbuds {
        for &b in &lbuds {
            let (fa, fb) = (p.alpha.get(a).unwrap(), p.alpha.get(b).unwrap());
            if p.left.leq(a, b) != p.right.leq(fa, fb) {
                iso.push(
                    Witness::new([p.left.name(a), p.left.name(b)]).with_note("order not reflected"),
                );
            }
        }
    }

    let mut meet = fw.meet_agreement(&lbuds);
    meet.extend(bw.meet_agreement(&mbuds));
    let mut join = fw.join_closure(&lbuds);
    join.extend(bw.join_closure(&mbuds));

    Ok(Report::new(vec![
        Entry::new(RoundTripCondition::InfimumLeft, fw.infimum()),
        Entry::new(RoundTripCondition::InfimumRight, bw.infimum()),
        Entry::new(
            RoundTripCondition::LargestPreimageAlpha,
            fw.largest_preimage(),
        ),
        Entry::new(
            RoundTripCondition::LargestPreimageGamma,
            bw.largest_preimage(),
        ),
        Entry::new(RoundTripCondition::ImageIsomorphism, iso),
        Entry::new(RoundTripCondition::MeetAgreement, meet),
        Entry::new(RoundTripCondition::JoinClosure, join),
    ]))
}

/// The iterates `x, r(x), r(r(x)), …` of a round trip `r` until a repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub iterates: Vec<Class>,
    /// False when the iteration entered a cycle instead of a fixed point.
    pub fixed_point: bool,
}

impl Chain {
    pub fn start(&self) -> Class {
        self.iterates[0]
    }

    /// Number of strict steps before the sequence stops changing.
    pub fn length(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn end(&self) -> Class {
        *self.iterates.last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Escalation {
    /// Chains of `γ∘α` from every class in `dom α`.
    pub left: Vec<Chain>,
    /// Chains of `α∘γ` from every class in `dom γ`.
    pub right: Vec<Chain>,
}

impl Escalation {
    pub fn max_length(&self) -> usize {
        self.left
            .iter()
            .chain(&self.right)
            .map(Chain::length)
            .max()
            .unwrap_or(0)
    }
}

fn chains(f: &ClassMap, g: &ClassMap) -> Vec<Chain> {
    f.domain()
        .map(|start| {
            let mut iterates = vec![start];
            let mut seen = BTreeSet::from([start]);
            let mut cur = start;
            loop {
                let next = match f.get(cur).and_then(|y| g.get(y)) {
                    Some(n) => n,
                    None => {
                        return Chain {
                            iterates,
                            fixed_point: false,
                        }
                    }
                };
                if next == cur {
                    return Chain {
                        iterates,
                        fixed_point: true,
                    };
                }
                if !seen.insert(next) {
                    iterates.push(next);
                    return Chain {
                        iterates,
                        fixed_point: false,
                    };
                }
                iterates.push(next);
                cur = next;
            }
        })
        .collect()
}

/// Iterated exchange: how far each class climbs under repeated round trips.
/// Does not require a Lagois connection.
pub fn escalation_report(p: &ConnectionPair) -> Escalation {
    Escalation {
        left: chains(&p.alpha, &p.gamma),
        right: chains(&p.gamma, &p.alpha),
    }
}
