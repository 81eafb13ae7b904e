//! Secure information flow between two autonomous security domains.
//!
//! Each domain orders its security classes in a finite lattice. A
//! [`ConnectionPair`] links the two lattices with maps `α: L → M` and
//! `γ: M → L`; the [`connection`] module checks whether the pair is an
//! increasing Lagois connection and explains failures with counterexamples.
//! On top of a connected pair, [`language`] defines straight-line transfer
//! programs, [`typing`] types them, [`interp`] runs them, and [`ni`] tests
//! them for non-interference.
//!
//! Store values are generic over [`Value`]; the aliases at the crate root fix
//! them to `i64`.
//!
//! ```
//! use lagois::{check_lagois, fixtures};
//!
//! let pair = fixtures::college_university();
//! assert!(check_lagois(&pair).is_lagois());
//! ```

pub mod audit;
pub mod connection;
pub mod enumerate;
pub mod fixtures;
pub mod interp;
pub mod language;
pub mod lattice;
pub mod ni;
pub mod policy;
mod side;
pub mod typing;
pub mod value;

pub use audit::{audit_mou, EdgeKind, MouEdge, MouEdgeSet, MouError, Node, Step, Violation};
pub use connection::{
    budpoints, check_convergence, check_galois, check_galois_insertion, check_lagois,
    check_monotone, check_precision, check_security, derive_partner, equiv_classes,
    escalation_report, roundtrip_infimum_check, verify_all, Block, Budpoints, Chain, ClassMap,
    Condition, ConnectionError, ConnectionPair, DeriveError, Direction, Entry, Escalation,
    NotLagois, Partition, Report, RoundTripCondition, VerificationReport, Witness,
};
pub use interp::{eval_expr, RunError, StepError};
pub use language::{
    read_set, well_formed, write_set, Assign, AstError, Expr, Op, Phrase, Program, Var,
};
pub use lattice::{Bound, Class, FiniteLattice, LatticeError};
pub use ni::{adversary_pairs, low_equiv, AdversaryLevel, NiError, NiOptions, ViolationKind};
pub use policy::{validate_config, DomainPolicy, Namespace, PolicyError, SystemConfig};
pub use side::Side;
pub use typing::{check_judgment, type_phrase, type_program, PhraseType, RuleError, TypeError};
pub use value::Value;

/// One domain's store with `i64` values.
pub type Store = interp::Store<i64>;
/// `⟨μ, μ̌⟩` with `i64` values.
pub type StorePair = interp::StorePair<i64>;
pub type Interpreter<'c> = interp::Interpreter<'c, i64>;
pub type NiResult = ni::NiResult<i64>;
pub type NiViolation = ni::NiViolation<i64>;

/// Runs a program from the given stores.
pub fn run(stores: &StorePair, prog: &Program) -> Result<StorePair, RunError> {
    interp::run(stores, prog)
}

/// Applies a single phrase.
pub fn step(stores: &StorePair, p: &Phrase) -> Result<StorePair, StepError> {
    interp::step(stores, p)
}

/// Randomised non-interference test over `i64` stores.
pub fn ni_test(
    c: &SystemConfig,
    prog: &Program,
    adv: AdversaryLevel,
    opts: &NiOptions,
) -> Result<NiResult, NiError> {
    ni::ni_test(c, prog, adv, opts)
}

/// Exhaustive non-interference test over `i64` stores.
pub fn ni_exhaustive(
    c: &SystemConfig,
    prog: &Program,
    adv: AdversaryLevel,
    values: &[i64],
    opts: &NiOptions,
) -> Result<NiResult, NiError> {
    ni::ni_exhaustive(c, prog, adv, values, opts)
}
