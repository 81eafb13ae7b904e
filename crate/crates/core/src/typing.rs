//! Typing judgments `⟨λ, λ̌⟩ ⊢ p : ⟨l, m⟩` for phrases and sequences.
//!
//! Inference returns the greatest derivable type. Components a rule leaves
//! free are instantiated at the lattice top, the identity of the sequence
//! meet, so a sequence type reflects only constrained writes.

use std::fmt;

use thiserror::Error;

use crate::language::{read_set, write_set, Phrase, Program, Var};
use crate::lattice::Class;
use crate::policy::SystemConfig;
use crate::Side;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhraseType {
    pub left: Class,
    pub right: Class,
}

impl PhraseType {
    pub fn new(left: Class, right: Class) -> Self {
        PhraseType { left, right }
    }

    pub fn top(c: &SystemConfig) -> Self {
        PhraseType::new(c.lattice(Side::Left).top(), c.lattice(Side::Right).top())
    }

    pub fn bottom(c: &SystemConfig) -> Self {
        PhraseType::new(
            c.lattice(Side::Left).bottom(),
            c.lattice(Side::Right).bottom(),
        )
    }

    pub fn component(self, side: Side) -> Class {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// Componentwise meet.
    pub fn meet(self, other: PhraseType, c: &SystemConfig) -> Self {
        PhraseType::new(
            c.lattice(Side::Left).meet(self.left, other.left),
            c.lattice(Side::Right).meet(self.right, other.right),
        )
    }

    /// Componentwise order.
    pub fn leq(self, other: PhraseType, c: &SystemConfig) -> bool {
        c.lattice(Side::Left).leq(self.left, other.left)
            && c.lattice(Side::Right).leq(self.right, other.right)
    }

    pub fn display<'a>(&self, c: &'a SystemConfig) -> impl fmt::Display + 'a {
        let (l, m) = (
            c.class_name(Side::Left, self.left),
            c.class_name(Side::Right, self.right),
        );
        DisplayType(l, m)
    }
}

struct DisplayType<'a>(&'a str, &'a str);

impl fmt::Display for DisplayType<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩", self.0, self.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Txn,
    Rd,
    Wr,
    TransferRl,
    TransferLr,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Txn => "Tt",
            Rule::Rd => "Trd",
            Rule::Wr => "Twr",
            Rule::TransferRl => "TT_RL",
            Rule::TransferLr => "TT_LR",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Failure to type a single phrase.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    /// The rule needs `lhs ⊑ rhs` in the lattice of `side`.
    #[error("rule {rule} requires {lhs} ⊑ {rhs}")]
    Premise {
        rule: Rule,
        side: Side,
        lhs: String,
        rhs: String,
    },
    #[error("{0} has no label")]
    Unlabelled(Var),
    #[error("{class} is outside the domain of {map}")]
    NotTransferClass { map: &'static str, class: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("phrase {index}: {source}")]
pub struct TypeError {
    pub index: usize,
    pub source: RuleError,
}

fn label(c: &SystemConfig, v: &Var) -> Result<Class, RuleError> {
    c.label(v.side, &v.name)
        .ok_or_else(|| RuleError::Unlabelled(v.clone()))
}

fn require(c: &SystemConfig, rule: Rule, side: Side, a: Class, b: Class) -> Result<(), RuleError> {
    if c.lattice(side).leq(a, b) {
        Ok(())
    } else {
        Err(RuleError::Premise {
            rule,
            side,
            lhs: c.class_name(side, a).to_string(),
            rhs: c.class_name(side, b).to_string(),
        })
    }
}

/// Places `level` on `side` and the top of the other lattice opposite.
fn one_sided(c: &SystemConfig, side: Side, level: Class) -> PhraseType {
    let mut t = PhraseType::top(c);
    match side {
        Side::Left => t.left = level,
        Side::Right => t.right = level,
    }
    t
}

pub fn type_phrase(c: &SystemConfig, p: &Phrase) -> Result<PhraseType, RuleError> {
    let conn = &c.connection;
    match p {
        Phrase::Txn { side, .. } => {
            let lat = c.lattice(*side);
            let writes = write_set(p)
                .iter()
                .map(|v| label(c, v))
                .collect::<Result<Vec<_>, _>>()?;
            let reads = read_set(p)
                .iter()
                .map(|v| label(c, v))
                .collect::<Result<Vec<_>, _>>()?;
            let w = lat.meet_all(writes);
            let r = lat.join_all(reads);
            require(c, Rule::Txn, *side, r, w)?;
            Ok(one_sided(c, *side, w))
        }
        Phrase::Rd { side, z, y } => {
            let lz = label(c, &Var::new(*side, z.as_str()))?;
            let ly = label(c, &Var::new(*side, y.as_str()))?;
            require(c, Rule::Rd, *side, ly, lz)?;
            Ok(one_sided(c, *side, lz))
        }
        Phrase::Wr { side, x, z } => {
            let lx = label(c, &Var::new(*side, x.as_str()))?;
            let lz = label(c, &Var::new(*side, z.as_str()))?;
            require(c, Rule::Wr, *side, lz, lx)?;
            Ok(one_sided(c, *side, lx))
        }
        Phrase::Trl { y, x } => {
            let ly = label(c, &Var::new(Side::Left, y.as_str()))?;
            let mx = label(c, &Var::new(Side::Right, x.as_str()))?;
            let down = conn.down(mx).ok_or_else(|| RuleError::NotTransferClass {
                map: "gamma",
                class: c.class_name(Side::Right, mx).to_string(),
            })?;
            require(c, Rule::TransferRl, Side::Left, down, ly)?;
            Ok(PhraseType::new(ly, mx))
        }
        Phrase::Tlr { y, x } => {
            let my = label(c, &Var::new(Side::Right, y.as_str()))?;
            let lx = label(c, &Var::new(Side::Left, x.as_str()))?;
            let up = conn.up(lx).ok_or_else(|| RuleError::NotTransferClass {
                map: "alpha",
                class: c.class_name(Side::Left, lx).to_string(),
            })?;
            require(c, Rule::TransferLr, Side::Right, up, my)?;
            Ok(PhraseType::new(lx, my))
        }
    }
}

/// Folds the sequence rule over the program; `ε` types as `⟨⊤, ⊤⟩`.
pub fn type_program(c: &SystemConfig, prog: &Program) -> Result<PhraseType, TypeError> {
    prog.iter()
        .enumerate()
        .try_fold(PhraseType::top(c), |acc, (index, p)| {
            let t = type_phrase(c, p).map_err(|source| TypeError { index, source })?;
            Ok(acc.meet(t, c))
        })
}

/// Whether `⊢ prog : claimed` is derivable.
pub fn check_judgment(
    c: &SystemConfig,
    prog: &Program,
    claimed: PhraseType,
) -> Result<bool, TypeError> {
    Ok(claimed.leq(type_program(c, prog)?, c))
}
