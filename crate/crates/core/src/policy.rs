//! Per-domain information flow models and the two-domain system.
//!
//! Each domain partitions its variables into domain objects (`Z`), export
//! variables (`X`) and import variables (`Y`), and labels every variable
//! with a class of its lattice through `λ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::connection::{check_lagois, Condition, ConnectionPair};
use crate::lattice::{Class, FiniteLattice, LatticeError};
use crate::Side;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    /// `Z`: ordinary domain objects.
    Object,
    /// `X`: staging variables read by outgoing transfers.
    Export,
    /// `Y`: staging variables written by incoming transfers.
    Import,
}

impl Namespace {
    pub const ALL: [Namespace; 3] = [Namespace::Object, Namespace::Export, Namespace::Import];

    pub fn keyword(self) -> &'static str {
        match self {
            Namespace::Object => "vars",
            Namespace::Export => "exports",
            Namespace::Import => "imports",
        }
    }
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Namespace::Object => "domain object",
            Namespace::Export => "export variable",
            Namespace::Import => "import variable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainPolicy {
    pub name: String,
    pub lattice: Arc<FiniteLattice>,
    pub objects: BTreeSet<String>,
    pub exports: BTreeSet<String>,
    pub imports: BTreeSet<String>,
    pub lambda: BTreeMap<String, Class>,
    /// Process annotations. Carried for completeness; no check reads them.
    pub processes: Vec<String>,
}

impl DomainPolicy {
    pub fn new(name: &str, lattice: Arc<FiniteLattice>) -> Self {
        DomainPolicy {
            name: name.to_string(),
            lattice,
            objects: BTreeSet::new(),
            exports: BTreeSet::new(),
            imports: BTreeSet::new(),
            lambda: BTreeMap::new(),
            processes: Vec::new(),
        }
    }

    /// Declares `var` in `ns` with label `class`.
    pub fn declare(&mut self, ns: Namespace, var: &str, class: &str) -> Result<(), LatticeError> {
        let c = self.lattice.class(class)?;
        self.set_mut(ns).insert(var.to_string());
        self.lambda.insert(var.to_string(), c);
        Ok(())
    }

    pub fn with(mut self, ns: Namespace, var: &str, class: &str) -> Result<Self, LatticeError> {
        self.declare(ns, var, class)?;
        Ok(self)
    }

    pub fn set(&self, ns: Namespace) -> &BTreeSet<String> {
        match ns {
            Namespace::Object => &self.objects,
            Namespace::Export => &self.exports,
            Namespace::Import => &self.imports,
        }
    }

    fn set_mut(&mut self, ns: Namespace) -> &mut BTreeSet<String> {
        match ns {
            Namespace::Object => &mut self.objects,
            Namespace::Export => &mut self.exports,
            Namespace::Import => &mut self.imports,
        }
    }

    /// The first namespace declaring `var`, in `Z`, `X`, `Y` order.
    pub fn namespace(&self, var: &str) -> Option<Namespace> {
        Namespace::ALL
            .into_iter()
            .find(|&ns| self.set(ns).contains(var))
    }

    pub fn label(&self, var: &str) -> Option<Class> {
        self.lambda.get(var).copied()
    }

    /// `N = Z ∪ X ∪ Y`, in name order.
    pub fn vars(&self) -> BTreeSet<&str> {
        Namespace::ALL
            .into_iter()
            .flat_map(|ns| self.set(ns).iter().map(String::as_str))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemConfig {
    pub left: DomainPolicy,
    pub right: DomainPolicy,
    pub connection: ConnectionPair,
}

impl SystemConfig {
    pub fn new(left: DomainPolicy, right: DomainPolicy, connection: ConnectionPair) -> Self {
        SystemConfig {
            left,
            right,
            connection,
        }
    }

    pub fn domain(&self, side: Side) -> &DomainPolicy {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn lattice(&self, side: Side) -> &FiniteLattice {
        &self.domain(side).lattice
    }

    /// `λ` or `λ̌`, depending on the side.
    pub fn label(&self, side: Side, var: &str) -> Option<Class> {
        self.domain(side).label(var)
    }

    pub fn class_name(&self, side: Side, c: Class) -> &str {
        self.lattice(side).name(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("domain `{domain}`: `{var}` is both a {first} and a {second}")]
    Overlap {
        domain: String,
        var: String,
        first: Namespace,
        second: Namespace,
    },
    #[error("domain `{domain}`: `{var}` has no label")]
    Unlabelled { domain: String, var: String },
    #[error("domain `{domain}`: label given for undeclared variable `{var}`")]
    UndeclaredLabel { domain: String, var: String },
    #[error("domain `{domain}`: `{var}` is labelled {class}, which is not a transfer class")]
    NotTransferClass {
        domain: String,
        var: String,
        class: String,
    },
    #[error("domain `{domain}` uses lattice `{found}` but the connection expects `{expected}` on that side")]
    LatticeMismatch {
        domain: String,
        expected: String,
        found: String,
    },
    #[error("connection is not Lagois: {} failed", failed.iter().map(|c| c.id()).collect::<Vec<_>>().join(", "))]
    NotLagois { failed: Vec<Condition> },
}

/// Checks every clause of the configuration and reports all violations.
pub fn validate_config(c: &SystemConfig) -> Result<(), Vec<PolicyError>> {
    let mut errors = Vec::new();
    for side in [Side::Left, Side::Right] {
        let d = c.domain(side);
        let expected = match side {
            Side::Left => c.connection.left(),
            Side::Right => c.connection.right(),
        };
        if d.lattice.id() != expected.id() || *d.lattice != **expected {
            errors.push(PolicyError::LatticeMismatch {
                domain: d.name.clone(),
                expected: expected.id().to_string(),
                found: d.lattice.id().to_string(),
            });
            continue;
        }
        validate_domain(d, &mut errors);

        let transfer = match side {
            Side::Left => c.connection.alpha(),
            Side::Right => c.connection.gamma(),
        };
        for var in d.exports.iter().chain(&d.imports) {
            if let Some(l) = d.label(var) {
                if !transfer.in_domain(l) {
                    errors.push(PolicyError::NotTransferClass {
                        domain: d.name.clone(),
                        var: var.clone(),
                        class: d.lattice.name(l).to_string(),
                    });
                }
            }
        }
    }
    let report = check_lagois(&c.connection);
    if !report.is_lagois() {
        errors.push(PolicyError::NotLagois {
            failed: report.failed_conditions(),
        });
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn validate_domain(d: &DomainPolicy, errors: &mut Vec<PolicyError>) {
    for (i, &a) in Namespace::ALL.iter().enumerate() {
        for &b in &Namespace::ALL[i + 1..] {
            for var in d.set(a).intersection(d.set(b)) {
                errors.push(PolicyError::Overlap {
                    domain: d.name.clone(),
                    var: var.clone(),
                    first: a,
                    second: b,
                });
            }
        }
    }
    let vars = d.vars();
    for var in &vars {
        if !d.lambda.contains_key(*var) {
            errors.push(PolicyError::Unlabelled {
                domain: d.name.clone(),
                var: var.to_string(),
            });
        }
    }
    for var in d.lambda.keys() {
        if !vars.contains(var.as_str()) {
            errors.push(PolicyError::UndeclaredLabel {
                domain: d.name.clone(),
                var: var.clone(),
            });
        }
    }
}
