//! Reference lattices, connections and systems.
//!
//! The college and university lattices and the maps between them describe
//! two institutions exchanging records. The pairs differ in how the
//! university's classes are mapped back.

use std::sync::Arc;

use crate::audit::MouEdgeSet;
use crate::connection::{ClassMap, ConnectionPair};
use crate::language::{Phrase, Program};
use crate::lattice::FiniteLattice;
use crate::policy::{DomainPolicy, Namespace, SystemConfig};
use crate::Side;

pub fn college() -> FiniteLattice {
    FiniteLattice::new(
        "college",
        [
            "bot1",
            "Student",
            "Faculty",
            "DeanS",
            "DeanF",
            "Principal",
            "top1",
        ],
        [
            ("bot1", "Student"),
            ("Student", "Faculty"),
            ("Student", "DeanS"),
            ("Faculty", "DeanF"),
            ("DeanF", "Principal"),
            ("DeanS", "Principal"),
            ("Principal", "top1"),
        ],
    )
    .expect("college lattice")
}

pub fn university() -> FiniteLattice {
    FiniteLattice::new(
        "university",
        [
            "bot2",
            "UnivFac",
            "DeanColleges",
            "ViceChancellor",
            "Chancellor",
            "top2",
        ],
        [
            ("bot2", "UnivFac"),
            ("UnivFac", "DeanColleges"),
            ("DeanColleges", "ViceChancellor"),
            ("ViceChancellor", "Chancellor"),
            ("Chancellor", "top2"),
        ],
    )
    .expect("university lattice")
}

const ALPHA: [(&str, &str); 7] = [
    ("bot1", "bot2"),
    ("Student", "UnivFac"),
    ("Faculty", "UnivFac"),
    ("DeanS", "DeanColleges"),
    ("DeanF", "DeanColleges"),
    ("Principal", "DeanColleges"),
    ("top1", "top2"),
];

const GAMMA: [(&str, &str); 6] = [
    ("bot2", "bot1"),
    ("UnivFac", "Faculty"),
    ("DeanColleges", "Principal"),
    ("ViceChancellor", "top1"),
    ("Chancellor", "top1"),
    ("top2", "top1"),
];

fn pair<'a>(
    left: FiniteLattice,
    right: FiniteLattice,
    alpha: impl IntoIterator<Item = (&'a str, &'a str)>,
    gamma: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> ConnectionPair {
    let (l, r) = (Arc::new(left), Arc::new(right));
    let a = ClassMap::from_names("alpha", &l, &r, alpha).expect("alpha");
    let g = ClassMap::from_names("gamma", &r, &l, gamma).expect("gamma");
    ConnectionPair::new(l, r, a, g).expect("connection")
}

/// The secure college/university connection.
pub fn college_university() -> ConnectionPair {
    pair(college(), university(), ALPHA, GAMMA)
}

/// As [`college_university`] but `DeanColleges` maps back to `Faculty`, so
/// a principal's data returns at faculty level.
pub fn college_university_insecure() -> ConnectionPair {
    let gamma = GAMMA.map(|(m, l)| (m, if m == "DeanColleges" { "Faculty" } else { l }));
    pair(college(), university(), ALPHA, gamma)
}

/// As [`college_university`] with `DeanS` and `DeanF` not exposed.
pub fn college_university_partial() -> ConnectionPair {
    let alpha = ALPHA.into_iter().filter(|(l, _)| !l.starts_with("Dean"));
    pair(college(), university(), alpha, GAMMA)
}

/// Each map sends a class one step higher than the secure pair does, so
/// repeated exchanges climb to the top.
pub fn escalating() -> ConnectionPair {
    pair(
        college(),
        university(),
        [
            ("bot1", "bot2"),
            ("Student", "UnivFac"),
            ("Faculty", "DeanColleges"),
            ("DeanF", "ViceChancellor"),
            ("DeanS", "ViceChancellor"),
            ("Principal", "Chancellor"),
            ("top1", "top2"),
        ],
        [
            ("bot2", "Student"),
            ("UnivFac", "Faculty"),
            ("DeanColleges", "DeanF"),
            ("ViceChancellor", "Principal"),
            ("Chancellor", "top1"),
            ("top2", "top1"),
        ],
    )
}

/// A Galois connection between a 2-chain and a 3-chain that is not secure:
/// `m1` comes back as `m0`.
pub fn galois_chains() -> ConnectionPair {
    pair(
        FiniteLattice::new("L2", ["l0", "l1"], [("l0", "l1")]).expect("chain"),
        FiniteLattice::new("M3", ["m0", "m1", "m2"], [("m0", "m1"), ("m1", "m2")]).expect("chain"),
        [("l0", "m0"), ("l1", "m2")],
        [("m0", "l0"), ("m1", "l0"), ("m2", "l1")],
    )
}

/// The negotiated exchange: faculty both ways, deans both ways, and the
/// principal up to the vice-chancellor.
pub fn exchange_mou() -> MouEdgeSet {
    let mut mou = MouEdgeSet::new(Arc::new(college()), Arc::new(university()));
    let (l, r) = (Side::Left, Side::Right);
    for (a, b) in [("Faculty", "UnivFac"), ("DeanS", "DeanColleges")] {
        mou.add((l, a), (r, b)).expect("edge");
        mou.add((r, b), (l, a)).expect("edge");
    }
    mou.add((l, "Principal"), (r, "ViceChancellor"))
        .expect("edge");
    mou
}

fn domain(
    name: &str,
    lattice: &Arc<FiniteLattice>,
    vars: &[(Namespace, &str, &str)],
) -> DomainPolicy {
    let mut d = DomainPolicy::new(name, lattice.clone());
    for &(ns, var, class) in vars {
        d.declare(ns, var, class).expect("label");
    }
    d
}

fn system(left: &[(Namespace, &str, &str)], right: &[(Namespace, &str, &str)]) -> SystemConfig {
    let p = college_university();
    SystemConfig::new(
        domain("L", p.left(), left),
        domain("M", p.right(), right),
        p,
    )
}

/// A faculty record sent to the university and back.
pub fn round_trip_system() -> SystemConfig {
    use Namespace::*;
    system(
        &[
            (Object, "z1", "Student"),
            (Object, "z2", "Faculty"),
            (Export, "x1", "Faculty"),
            (Import, "y1", "Faculty"),
        ],
        &[
            (Object, "zr1", "UnivFac"),
            (Export, "xr1", "UnivFac"),
            (Import, "yr1", "UnivFac"),
        ],
    )
}

pub fn round_trip_program() -> Program {
    Program::new(vec![
        Phrase::wr(Side::Left, "x1", "z1"),
        Phrase::tlr("yr1", "x1"),
        Phrase::rd(Side::Right, "zr1", "yr1"),
        Phrase::wr(Side::Right, "xr1", "zr1"),
        Phrase::trl("y1", "xr1"),
        Phrase::rd(Side::Left, "z2", "y1"),
    ])
}

/// A student-level import next to faculty and dean-level exports.
pub fn leaky_system() -> SystemConfig {
    use Namespace::*;
    system(
        &[(Import, "ylow", "Student")],
        &[
            (Export, "xfac", "UnivFac"),
            (Export, "xhigh", "DeanColleges"),
        ],
    )
}

/// Moves dean-level data straight into a student-level import.
pub fn leaky_program() -> Program {
    Program::new(vec![Phrase::trl("ylow", "xhigh")])
}

/// Four variables, small enough to enumerate every store pair.
pub fn small_system() -> SystemConfig {
    use Namespace::*;
    system(
        &[(Object, "z1", "Student"), (Export, "x1", "Faculty")],
        &[(Import, "yr1", "UnivFac"), (Object, "zr1", "UnivFac")],
    )
}

pub fn small_program() -> Program {
    Program::new(vec![
        Phrase::wr(Side::Left, "x1", "z1"),
        Phrase::tlr("yr1", "x1"),
        Phrase::rd(Side::Right, "zr1", "yr1"),
    ])
}
