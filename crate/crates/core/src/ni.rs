//! Two-run non-interference testing.
//!
//! An adversary observes the variables of each domain labelled at or below
//! its level. A program is non-interfering at that level if runs from two
//! store pairs the adversary cannot tell apart end in store pairs it still
//! cannot tell apart.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::connection::{check_lagois, ConnectionPair, NotLagois};
use crate::interp::{run, RunError, StorePair};
use crate::language::{well_formed, write_set, Assign, AstError, Expr, Op, Phrase, Program, Var};
use crate::lattice::Class;
use crate::policy::{validate_config, Namespace, PolicyError, SystemConfig};
use crate::typing::{type_program, TypeError};
use crate::value::Value;
use crate::Side;

/// Values drawn for random stores: `0..RANDOM_RANGE`.
pub const RANDOM_RANGE: i64 = 10;

/// Upper bound on store pairs enumerated by [`ni_exhaustive`].
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdversaryLevel {
    pub l: Class,
    pub m: Class,
}

impl AdversaryLevel {
    pub fn new(l: Class, m: Class) -> Self {
        AdversaryLevel { l, m }
    }

    pub fn component(self, side: Side) -> Class {
        match side {
            Side::Left => self.l,
            Side::Right => self.m,
        }
    }

    /// `l = γ(m)` and `m = α(l)`.
    pub fn is_mutual(self, p: &ConnectionPair) -> bool {
        p.up(self.l) == Some(self.m) && p.down(self.m) == Some(self.l)
    }
}

/// Every pair `(l, α(l))` with `γ(α(l)) = l`, ordered by `l`.
pub fn adversary_pairs(p: &ConnectionPair) -> Result<Vec<AdversaryLevel>, NotLagois> {
    let report = check_lagois(p);
    if !report.is_lagois() {
        return Err(NotLagois {
            failed: report.failed_conditions(),
        });
    }
    Ok(p.alpha()
        .entries()
        .map(|(l, m)| AdversaryLevel::new(l, m))
        .filter(|a| a.is_mutual(p))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NiError {
    #[error("store pairs do not share the variable {0}")]
    DomainMismatch(Var),
    #[error("invalid configuration: {}", join(.0))]
    Config(Vec<PolicyError>),
    #[error("ill-formed program: {}", join(.0))]
    IllFormed(Vec<AstError>),
    #[error("program is not well typed: {0}")]
    IllTyped(TypeError),
    #[error("({l}, {m}) is not an adversary level of the connection")]
    NotAdversaryLevel { l: String, m: String },
    #[error("{0} store pairs exceed the exhaustive limit")]
    TooLarge(u128),
}

fn join<E: std::fmt::Display>(errs: &[E]) -> String {
    errs.iter().map(E::to_string).collect::<Vec<_>>().join("; ")
}

fn observable(c: &SystemConfig, adv: AdversaryLevel, side: Side, var: &str) -> bool {
    let lat = c.lattice(side);
    c.label(side, var)
        .is_some_and(|l| lat.leq(l, adv.component(side)))
}

/// The least observable variable, in (side, name) order, on which the two
/// store pairs differ.
pub fn first_low_difference<V: Value>(
    c: &SystemConfig,
    adv: AdversaryLevel,
    s1: &StorePair<V>,
    s2: &StorePair<V>,
) -> Result<Option<Var>, NiError> {
    for side in [Side::Left, Side::Right] {
        let (a, b) = (s1.side(side), s2.side(side));
        if let Some(v) = a
            .vars()
            .find(|v| !b.contains(v))
            .or(b.vars().find(|v| !a.contains(v)))
        {
            return Err(NiError::DomainMismatch(Var::new(side, v)));
        }
        for (var, x) in a.iter() {
            if observable(c, adv, side, var) && b.get(var) != Some(x) {
                return Ok(Some(Var::new(side, var)));
            }
        }
    }
    Ok(None)
}

/// Agreement on every variable labelled at or below the adversary level.
pub fn low_equiv<V: Value>(
    c: &SystemConfig,
    adv: AdversaryLevel,
    s1: &StorePair<V>,
    s2: &StorePair<V>,
) -> Result<bool, NiError> {
    Ok(first_low_difference(c, adv, s1, s2)?.is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NiOptions {
    pub trials: usize,
    pub seed: u64,
    /// Run programs that fail to type check.
    pub unsafe_skip_typecheck: bool,
    /// Accept levels that are not mutually determined pairs.
    pub allow_any_level: bool,
}

impl Default for NiOptions {
    fn default() -> Self {
        NiOptions {
            trials: 1000,
            seed: 0,
            unsafe_skip_typecheck: false,
            allow_any_level: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind<V> {
    /// Final stores differ at an observable variable.
    Leak {
        var: Var,
        /// Last phrase writing `var`.
        position: Option<usize>,
        values: (V, V),
    },
    Run(RunError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiViolation<V> {
    pub trial: usize,
    pub seed: u64,
    pub initial: (StorePair<V>, StorePair<V>),
    pub kind: ViolationKind<V>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiResult<V> {
    pub level: AdversaryLevel,
    pub trials: usize,
    pub violations: Vec<NiViolation<V>>,
    /// The level is not a mutually determined pair, so the guarantee does
    /// not apply.
    pub outside_theorem: bool,
}

impl<V> NiResult<V> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn preflight(
    c: &SystemConfig,
    prog: &Program,
    adv: AdversaryLevel,
    opts: &NiOptions,
) -> Result<bool, NiError> {
    validate_config(c).map_err(NiError::Config)?;
    well_formed(prog, c).map_err(NiError::IllFormed)?;
    if !opts.unsafe_skip_typecheck {
        type_program(c, prog).map_err(NiError::IllTyped)?;
    }
    let mutual = adv.is_mutual(&c.connection);
    if !mutual && !opts.allow_any_level {
        return Err(NiError::NotAdversaryLevel {
            l: c.class_name(Side::Left, adv.l).to_string(),
            m: c.class_name(Side::Right, adv.m).to_string(),
        });
    }
    Ok(!mutual)
}

fn last_writer(prog: &Program, var: &Var) -> Option<usize> {
    prog.iter().rposition(|p| write_set(p).contains(var))
}

fn trial<V: Value>(
    c: &SystemConfig,
    prog: &Program,
    adv: AdversaryLevel,
    initial: (StorePair<V>, StorePair<V>),
) -> Result<Option<ViolationKind<V>>, NiError> {
    let (a, b) = match (run(&initial.0, prog), run(&initial.1, prog)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Ok(Some(ViolationKind::Run(e))),
    };
    Ok(first_low_difference(c, adv, &a, &b)?.map(|var| {
        let values = (
            a.get(&var).unwrap_or_default(),
            b.get(&var).unwrap_or_default(),
        );
        ViolationKind::Leak {
            position: last_writer(prog, &var),
            var,
            values,
        }
    }))
}

/// Randomised two-run test. Trial `i` draws from a ChaCha stream keyed by
/// `(seed, i)`, so results do not depend on evaluation order.
pub fn ni_test<V: Value>(
    c: &SystemConfig,
    prog: &Program,
    adv: AdversaryLevel,
    opts: &NiOptions,
) -> Result<NiResult<V>, NiError> {
    let outside_theorem = preflight(c, prog, adv, opts)?;
    let mut violations = Vec::new();
    for i in 0..opts.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(i as u64);
        let initial = random_low_equivalent(c, adv, &mut rng);
        if let Some(kind) = trial(c, prog, adv, initial.clone())? {
            violations.push(NiViolation {
                trial: i,
                seed: opts.seed,
                initial,
                kind,
            });
        }
    }
    Ok(NiResult {
        level: adv,
        trials: opts.trials,
        violations,
        outside_theorem,
    })
}

fn random_low_equivalent<V: Value, R: Rng + ?Sized>(
    c: &SystemConfig,
    adv: AdversaryLevel,
    rng: &mut R,
) -> (StorePair<V>, StorePair<V>) {
    let mut pair = (StorePair::zeroed(c), StorePair::zeroed(c));
    for side in [Side::Left, Side::Right] {
        for var in c.domain(side).vars() {
            let v1 = V::from_literal(rng.gen_range(0..RANDOM_RANGE));
            let v2 = if observable(c, adv, side, var) {
                v1
            } else {
                V::from_literal(rng.gen_range(0..RANDOM_RANGE))
            };
            pair.0.side_mut(side).set(var, v1);
            pair.1.side_mut(side).set(var, v2);
        }
    }
    pair
}

/// Runs every low-equivalent store pair over `values`. `trials` in the
/// result counts the pairs enumerated; `opts.trials` and `opts.seed` are
/// ignored.
pub fn ni_exhaustive<V: Value>(
    c: &SystemConfig,
    prog: &Program,
    adv: AdversaryLevel,
    values: &[V],
    opts: &NiOptions,
) -> Result<NiResult<V>, NiError> {
    let outside_theorem = preflight(c, prog, adv, opts)?;
    // one slot per low variable, two per high variable
    let mut slots: Vec<(Side, &str, bool)> = Vec::new();
    for side in [Side::Left, Side::Right] {
        for var in c.domain(side).vars() {
            slots.push((side, var, observable(c, adv, side, var)));
        }
    }
    let digits: usize = slots.iter().map(|s| if s.2 { 1 } else { 2 }).sum();
    let total = (values.len() as u128)
        .checked_pow(digits as u32)
        .unwrap_or(u128::MAX);
    if total > EXHAUSTIVE_LIMIT {
        return Err(NiError::TooLarge(total));
    }
    let mut violations = Vec::new();
    let mut counter = vec![0usize; digits];
    for i in 0..total as usize {
        let mut pair = (StorePair::zeroed(c), StorePair::zeroed(c));
        let mut d = 0;
        for &(side, var, low) in &slots {
            let v1 = values[counter[d]];
            let v2 = if low { v1 } else { values[counter[d + 1]] };
            d += if low { 1 } else { 2 };
            pair.0.side_mut(side).set(var, v1);
            pair.1.side_mut(side).set(var, v2);
        }
        if let Some(kind) = trial(c, prog, adv, pair.clone())? {
            violations.push(NiViolation {
                trial: i,
                seed: 0,
                initial: pair,
                kind,
            });
        }
        for digit in counter.iter_mut() {
            *digit += 1;
            if *digit < values.len() {
                break;
            }
            *digit = 0;
        }
    }
    Ok(NiResult {
        level: adv,
        trials: total as usize,
        violations,
        outside_theorem,
    })
}

/// A random well-formed (not necessarily well-typed) program of `len`
/// phrases over the configuration's variables.
pub fn random_program<R: Rng + ?Sized>(c: &SystemConfig, len: usize, rng: &mut R) -> Program {
    let ns = |side: Side, n: Namespace| -> Vec<&str> {
        c.domain(side).set(n).iter().map(String::as_str).collect()
    };
    let vars: BTreeMap<(Side, Namespace), Vec<&str>> = [Side::Left, Side::Right]
        .into_iter()
        .flat_map(|s| Namespace::ALL.into_iter().map(move |n| (s, n)))
        .map(|k| (k, ns(k.0, k.1)))
        .collect();
    let has = |s: Side, n: Namespace| !vars[&(s, n)].is_empty();

    let mut kinds: Vec<(Kind, Side)> = Vec::new();
    for side in [Side::Left, Side::Right] {
        if has(side, Namespace::Object) {
            kinds.push((Kind::Txn, side));
            if has(side, Namespace::Import) {
                kinds.push((Kind::Rd, side));
            }
            if has(side, Namespace::Export) {
                kinds.push((Kind::Wr, side));
            }
        }
        if has(side, Namespace::Import) && has(side.other(), Namespace::Export) {
            kinds.push((Kind::Transfer, side));
        }
    }
    if kinds.is_empty() {
        return Program::empty();
    }

    let pick = |rng: &mut R, s: Side, n: Namespace| -> String {
        vars[&(s, n)]
            .choose(rng)
            .copied()
            .unwrap_or_default()
            .to_string()
    };
    (0..len)
        .map(|_| {
            let (kind, side) = kinds[rng.gen_range(0..kinds.len())];
            match kind {
                Kind::Txn => {
                    let n = rng.gen_range(1..=3);
                    let objects = &vars[&(side, Namespace::Object)];
                    let assigns = (0..n)
                        .map(|_| {
                            let target = pick(rng, side, Namespace::Object);
                            Assign::new(target, random_expr(objects, 2, rng))
                        })
                        .collect();
                    Phrase::txn(side, assigns)
                }
                Kind::Rd => Phrase::rd(
                    side,
                    &pick(rng, side, Namespace::Object),
                    &pick(rng, side, Namespace::Import),
                ),
                Kind::Wr => Phrase::wr(
                    side,
                    &pick(rng, side, Namespace::Export),
                    &pick(rng, side, Namespace::Object),
                ),
                Kind::Transfer => {
                    let y = pick(rng, side, Namespace::Import);
                    let x = pick(rng, side.other(), Namespace::Export);
                    match side {
                        Side::Left => Phrase::trl(&y, &x),
                        Side::Right => Phrase::tlr(&y, &x),
                    }
                }
            }
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Kind {
    Txn,
    Rd,
    Wr,
    /// Into an import of the given side.
    Transfer,
}

fn random_expr<R: Rng + ?Sized>(objects: &[&str], depth: u32, rng: &mut R) -> Expr {
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.7) {
            Expr::var(*objects.choose(rng).unwrap_or(&"_"))
        } else {
            Expr::Lit(rng.gen_range(0..RANDOM_RANGE))
        };
    }
    let op = *[Op::Add, Op::Sub, Op::Mul].choose(rng).unwrap_or(&Op::Add);
    Expr::bin(
        op,
        random_expr(objects, depth - 1, rng),
        random_expr(objects, depth - 1, rng),
    )
}
