//! Execution of phrases over a pair of stores `⟨μ, μ̌⟩`.
//!
//! Every phrase is applied atomically: it is evaluated against a working
//! copy and committed only on success.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::language::{Expr, Op, Phrase, Program, Var};
use crate::policy::{DomainPolicy, SystemConfig};
use crate::value::Value;
use crate::Side;

/// A total map from one domain's variables to values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Store<V> {
    values: BTreeMap<String, V>,
}

impl<V: Value> Store<V> {
    /// Every variable of the domain set to zero.
    pub fn zeroed(d: &DomainPolicy) -> Self {
        Store {
            values: d
                .vars()
                .into_iter()
                .map(|v| (v.to_string(), V::zero()))
                .collect(),
        }
    }

    pub fn from_values<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = (S, V)>,
        S: Into<String>,
    {
        Store {
            values: values.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn get(&self, var: &str) -> Option<V> {
        self.values.get(var).copied()
    }

    /// Updates an existing variable; `None` if it is not in the store.
    pub fn set(&mut self, var: &str, value: V) -> Option<V> {
        self.values
            .get_mut(var)
            .map(|slot| std::mem::replace(slot, value))
    }

    pub fn contains(&self, var: &str) -> bool {
        self.values.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, V)> + '_ {
        self.values.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> + '_ {
        self.values.keys().map(String::as_str)
    }

    fn lookup(&self, side: Side, var: &str) -> Result<V, StepError> {
        self.get(var)
            .ok_or_else(|| StepError::UnknownVariable(Var::new(side, var)))
    }

    fn assign(&mut self, side: Side, var: &str, value: V) -> Result<(), StepError> {
        self.set(var, value)
            .map(drop)
            .ok_or_else(|| StepError::UnknownVariable(Var::new(side, var)))
    }
}

impl<V: Value> fmt::Display for Store<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StorePair<V> {
    pub left: Store<V>,
    pub right: Store<V>,
}

impl<V: Value> StorePair<V> {
    pub fn new(left: Store<V>, right: Store<V>) -> Self {
        StorePair { left, right }
    }

    pub fn zeroed(c: &SystemConfig) -> Self {
        StorePair::new(Store::zeroed(&c.left), Store::zeroed(&c.right))
    }

    pub fn side(&self, side: Side) -> &Store<V> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Store<V> {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    pub fn get(&self, var: &Var) -> Option<V> {
        self.side(var.side).get(&var.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("unknown variable {0}")]
    UnknownVariable(Var),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("phrase {index}: {source}")]
pub struct RunError {
    pub index: usize,
    pub source: StepError,
}

pub fn eval_expr<V: Value>(s: &Store<V>, side: Side, e: &Expr) -> Result<V, StepError> {
    Ok(match e {
        Expr::Lit(n) => V::from_literal(*n),
        Expr::Var(v) => s.lookup(side, v)?,
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_expr(s, side, a)?, eval_expr(s, side, b)?);
            match op {
                Op::Add => a.wrapping_add(&b),
                Op::Sub => a.wrapping_sub(&b),
                Op::Mul => a.wrapping_mul(&b),
            }
        }
    })
}

/// Applies one phrase. The store of a domain the phrase does not write is
/// returned unchanged.
pub fn step<V: Value>(stores: &StorePair<V>, p: &Phrase) -> Result<StorePair<V>, StepError> {
    let mut next = stores.clone();
    match p {
        Phrase::Txn { side, assigns } => {
            let s = next.side_mut(*side);
            for a in assigns {
                let v = eval_expr(s, *side, &a.expr)?;
                s.assign(*side, &a.target, v)?;
            }
        }
        Phrase::Rd { side, z, y } => {
            let s = next.side_mut(*side);
            let v = s.lookup(*side, y)?;
            s.assign(*side, z, v)?;
        }
        Phrase::Wr { side, x, z } => {
            let s = next.side_mut(*side);
            let v = s.lookup(*side, z)?;
            s.assign(*side, x, v)?;
        }
        Phrase::Trl { y, x } => {
            let v = stores.right.lookup(Side::Right, x)?;
            next.left.assign(Side::Left, y, v)?;
        }
        Phrase::Tlr { y, x } => {
            let v = stores.left.lookup(Side::Left, x)?;
            next.right.assign(Side::Right, y, v)?;
        }
    }
    Ok(next)
}

/// Left fold of [`step`]; `ε` is the identity.
pub fn run<V: Value>(stores: &StorePair<V>, prog: &Program) -> Result<StorePair<V>, RunError> {
    prog.iter()
        .enumerate()
        .try_fold(stores.clone(), |s, (index, p)| {
            step(&s, p).map_err(|source| RunError { index, source })
        })
}

/// A single thread of execution over a configuration's stores.
#[derive(Debug)]
pub struct Interpreter<'c, V> {
    config: &'c SystemConfig,
    stores: StorePair<V>,
    executed: usize,
}

impl<'c, V: Value> Interpreter<'c, V> {
    pub fn new(config: &'c SystemConfig, stores: StorePair<V>) -> Self {
        Interpreter {
            config,
            stores,
            executed: 0,
        }
    }

    /// Starts from all-zero stores.
    pub fn zeroed(config: &'c SystemConfig) -> Self {
        Interpreter::new(config, StorePair::zeroed(config))
    }

    pub fn config(&self) -> &SystemConfig {
        self.config
    }

    pub fn stores(&self) -> &StorePair<V> {
        &self.stores
    }

    pub fn into_stores(self) -> StorePair<V> {
        self.stores
    }

    /// Number of phrases committed so far.
    pub fn executed(&self) -> usize {
        self.executed
    }

    pub fn step(&mut self, p: &Phrase) -> Result<(), RunError> {
        self.stores = step(&self.stores, p).map_err(|source| RunError {
            index: self.executed,
            source,
        })?;
        self.executed += 1;
        Ok(())
    }

    /// Runs the program; on error the stores keep the state before the
    /// failing phrase.
    pub fn run(&mut self, prog: &Program) -> Result<(), RunError> {
        prog.iter().try_for_each(|p| self.step(p))
    }
}
