//! Two-domain transfer programs.
//!
//! A program is a straight-line sequence of phrases. Each phrase is an
//! intra-domain transaction, a copy between a staging variable and a domain
//! object, or an atomic cross-domain transfer from an export variable of one
//! domain into an import variable of the other.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::policy::{Namespace, SystemConfig};
use crate::Side;

/// A variable of one domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub side: Side,
    pub name: String,
}

impl Var {
    pub fn new(side: Side, name: impl Into<String>) -> Self {
        Var {
            side,
            name: name.into(),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.side.letter(), self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
}

impl Op {
    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(i64),
    Var(String),
    Bin(Op, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn bin(op: Op, a: Expr, b: Expr) -> Self {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    /// `vars(e)`.
    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(v) => {
                out.insert(v);
            }
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(n) => write!(f, "{n}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assign {
    pub target: String,
    pub expr: Expr,
}

impl Assign {
    pub fn new(target: impl Into<String>, expr: Expr) -> Self {
        Assign {
            target: target.into(),
            expr,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Phrase {
    /// Assignments over domain objects, run in order as one atomic step.
    Txn { side: Side, assigns: Vec<Assign> },
    /// `rd(z, y)`: copy import `y` into object `z`.
    Rd { side: Side, z: String, y: String },
    /// `wr(x, z)`: copy object `z` into export `x`.
    Wr { side: Side, x: String, z: String },
    /// `T_RL(x̌, y)`: right export `x` into left import `y`.
    Trl { y: String, x: String },
    /// `T_LR(x, y̌)`: left export `x` into right import `y`.
    Tlr { y: String, x: String },
}

impl Phrase {
    pub fn txn(side: Side, assigns: Vec<Assign>) -> Self {
        Phrase::Txn { side, assigns }
    }

    pub fn rd(side: Side, z: &str, y: &str) -> Self {
        Phrase::Rd {
            side,
            z: z.into(),
            y: y.into(),
        }
    }

    pub fn wr(side: Side, x: &str, z: &str) -> Self {
        Phrase::Wr {
            side,
            x: x.into(),
            z: z.into(),
        }
    }

    pub fn trl(y: &str, x: &str) -> Self {
        Phrase::Trl {
            y: y.into(),
            x: x.into(),
        }
    }

    pub fn tlr(y: &str, x: &str) -> Self {
        Phrase::Tlr {
            y: y.into(),
            x: x.into(),
        }
    }

    /// Every variable occurrence with the namespace the grammar requires.
    pub fn occurrences(&self) -> Vec<(Var, Namespace)> {
        use Namespace::*;
        match self {
            Phrase::Txn { side, assigns } => assigns
                .iter()
                .flat_map(|a| {
                    std::iter::once(Var::new(*side, a.target.as_str()))
                        .chain(a.expr.vars().into_iter().map(|v| Var::new(*side, v)))
                })
                .map(|v| (v, Object))
                .collect(),
            Phrase::Rd { side, z, y } => vec![
                (Var::new(*side, z.as_str()), Object),
                (Var::new(*side, y.as_str()), Import),
            ],
            Phrase::Wr { side, x, z } => vec![
                (Var::new(*side, x.as_str()), Export),
                (Var::new(*side, z.as_str()), Object),
            ],
            Phrase::Trl { y, x } => vec![
                (Var::new(Side::Left, y.as_str()), Import),
                (Var::new(Side::Right, x.as_str()), Export),
            ],
            Phrase::Tlr { y, x } => vec![
                (Var::new(Side::Right, y.as_str()), Import),
                (Var::new(Side::Left, x.as_str()), Export),
            ],
        }
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phrase::Txn { side, assigns } => {
                write!(f, "txn {} {{", side.letter())?;
                for a in assigns {
                    write!(f, " {} := {};", a.target, a.expr)?;
                }
                f.write_str(" }")
            }
            Phrase::Rd { side, z, y } => write!(f, "rd {} {z} {y};", side.letter()),
            Phrase::Wr { side, x, z } => write!(f, "wr {} {x} {z};", side.letter()),
            Phrase::Trl { y, x } => write!(f, "trl {y} {x};"),
            Phrase::Tlr { y, x } => write!(f, "tlr {y} {x};"),
        }
    }
}

/// A sequence `s ::= ε | s ; p`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub phrases: Vec<Phrase>,
}

impl Program {
    pub fn new(phrases: Vec<Phrase>) -> Self {
        Program { phrases }
    }

    pub fn empty() -> Self {
        Program::default()
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Phrase> {
        self.phrases.iter()
    }

    /// Union of the phrase write sets.
    pub fn write_set(&self) -> BTreeSet<Var> {
        self.phrases.iter().flat_map(write_set).collect()
    }
}

impl FromIterator<Phrase> for Program {
    fn from_iter<I: IntoIterator<Item = Phrase>>(iter: I) -> Self {
        Program::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Program {
    type Item = &'a Phrase;
    type IntoIter = std::slice::Iter<'a, Phrase>;

    fn into_iter(self) -> Self::IntoIter {
        self.phrases.iter()
    }
}

pub fn read_set(p: &Phrase) -> BTreeSet<Var> {
    match p {
        Phrase::Txn { side, assigns } => assigns
            .iter()
            .flat_map(|a| a.expr.vars())
            .map(|v| Var::new(*side, v))
            .collect(),
        Phrase::Rd { side, y, .. } => BTreeSet::from([Var::new(*side, y.as_str())]),
        Phrase::Wr { side, z, .. } => BTreeSet::from([Var::new(*side, z.as_str())]),
        Phrase::Trl { x, .. } => BTreeSet::from([Var::new(Side::Right, x.as_str())]),
        Phrase::Tlr { x, .. } => BTreeSet::from([Var::new(Side::Left, x.as_str())]),
    }
}

pub fn write_set(p: &Phrase) -> BTreeSet<Var> {
    match p {
        Phrase::Txn { side, assigns } => assigns
            .iter()
            .map(|a| Var::new(*side, a.target.as_str()))
            .collect(),
        Phrase::Rd { side, z, .. } => BTreeSet::from([Var::new(*side, z.as_str())]),
        Phrase::Wr { side, x, .. } => BTreeSet::from([Var::new(*side, x.as_str())]),
        Phrase::Trl { y, .. } => BTreeSet::from([Var::new(Side::Left, y.as_str())]),
        Phrase::Tlr { y, .. } => BTreeSet::from([Var::new(Side::Right, y.as_str())]),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("phrase {index}: unknown variable {var}")]
    UnknownVariable { index: usize, var: Var },
    #[error("phrase {index}: {var} is a {found}, expected a {expected}")]
    WrongNamespace {
        index: usize,
        var: Var,
        expected: Namespace,
        found: Namespace,
    },
    #[error("phrase {index}: {var} is declared only in the other domain")]
    WrongDomain { index: usize, var: Var },
}

/// Resolves every variable occurrence against the configuration.
pub fn well_formed(prog: &Program, c: &SystemConfig) -> Result<(), Vec<AstError>> {
    let mut errors = Vec::new();
    for (index, p) in prog.iter().enumerate() {
        for (var, expected) in p.occurrences() {
            match c.domain(var.side).namespace(&var.name) {
                Some(found) if found == expected => {}
                Some(found) => errors.push(AstError::WrongNamespace {
                    index,
                    var,
                    expected,
                    found,
                }),
                None if c.domain(var.side.other()).namespace(&var.name).is_some() => {
                    errors.push(AstError::WrongDomain { index, var })
                }
                None => errors.push(AstError::UnknownVariable { index, var }),
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}
