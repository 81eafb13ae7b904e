//! Name resolution from parsed declarations to checked structures, and the
//! printer that turns a workspace back into source text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use lagois::{
    ClassMap, ConnectionError, ConnectionPair, DomainPolicy, FiniteLattice, LatticeError,
    MouEdgeSet, MouError, Namespace, Program, Side, Store, SystemConfig,
};
use thiserror::Error;

use crate::syntax::{parse_decls, Decl, Name, ParseError, Pos};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("{pos}: {kind} `{name}` declared twice")]
    Duplicate {
        kind: &'static str,
        name: String,
        pos: Pos,
    },
    #[error("{pos}: unknown {kind} `{name}`")]
    Unknown {
        kind: &'static str,
        name: String,
        pos: Pos,
    },
    #[error("{pos}: {source}")]
    Lattice { source: LatticeError, pos: Pos },
    #[error("{pos}: {source}")]
    Connection { source: ConnectionError, pos: Pos },
    #[error("{pos}: {source}")]
    Mou { source: MouError, pos: Pos },
    #[error("{pos}: edge `{from} -> {to}` does not join `{left}` and `{right}` in exactly one direction")]
    MouEndpoints {
        from: String,
        to: String,
        left: String,
        right: String,
        pos: Pos,
    },
    #[error("{pos}: `{var}` is not a variable of domain `{domain}`")]
    StoreVariable {
        var: String,
        domain: String,
        pos: Pos,
    },
    #[error("{pos}: `{var}` given twice")]
    DuplicateVariable { var: String, pos: Pos },
    #[error("{pos}: `{name}` is both left and right domain of system `{system}`")]
    SameDomain {
        name: String,
        system: String,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Resolution(#[from] ResolutionError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDecl {
    pub left: String,
    pub right: String,
    pub connection: String,
    pub config: SystemConfig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreDecl {
    pub domain: String,
    /// Only the values written in the file.
    pub values: Store,
}

/// Every declaration of a file, resolved and keyed by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workspace {
    pub lattices: BTreeMap<String, Arc<FiniteLattice>>,
    pub maps: BTreeMap<String, ClassMap>,
    pub connections: BTreeMap<String, ConnectionPair>,
    pub mous: BTreeMap<String, MouEdgeSet>,
    pub domains: BTreeMap<String, DomainPolicy>,
    pub systems: BTreeMap<String, SystemDecl>,
    pub programs: BTreeMap<String, Program>,
    pub stores: BTreeMap<String, StoreDecl>,
}

fn lookup<'a, T>(
    table: &'a BTreeMap<String, T>,
    kind: &'static str,
    name: &Name,
) -> Result<&'a T, ResolutionError> {
    table
        .get(&name.text)
        .ok_or_else(|| ResolutionError::Unknown {
            kind,
            name: name.text.clone(),
            pos: name.pos,
        })
}

fn insert<T>(
    table: &mut BTreeMap<String, T>,
    kind: &'static str,
    id: &Name,
    value: T,
) -> Result<(), ResolutionError> {
    if table.insert(id.text.clone(), value).is_some() {
        return Err(ResolutionError::Duplicate {
            kind,
            name: id.text.clone(),
            pos: id.pos,
        });
    }
    Ok(())
}

fn class_of(l: &FiniteLattice, name: &Name) -> Result<lagois::Class, ResolutionError> {
    l.class(&name.text)
        .map_err(|source| ResolutionError::Lattice {
            source,
            pos: name.pos,
        })
}

impl Workspace {
    pub fn parse(src: &str) -> Result<Workspace, LoadError> {
        Ok(Workspace::resolve(&parse_decls(src)?)?)
    }

    /// Resolves declarations kind by kind, so references may point forward.
    pub fn resolve(decls: &[Decl]) -> Result<Workspace, ResolutionError> {
        let mut ws = Workspace::default();
        for d in decls {
            if let Decl::Lattice {
                id,
                elements,
                order,
            } = d
            {
                let names: Vec<&str> = elements.iter().map(|n| n.text.as_str()).collect();
                let edges = order
                    .iter()
                    .map(|(a, b)| (a.text.as_str(), b.text.as_str()));
                let l = FiniteLattice::new(&id.text, names, edges).map_err(|source| {
                    ResolutionError::Lattice {
                        source,
                        pos: id.pos,
                    }
                })?;
                insert(&mut ws.lattices, "lattice", id, Arc::new(l))?;
            }
        }
        for d in decls {
            if let Decl::Map {
                id,
                source,
                target,
                entries,
            } = d
            {
                let src = lookup(&ws.lattices, "lattice", source)?;
                let dst = lookup(&ws.lattices, "lattice", target)?;
                let mut map = BTreeMap::new();
                for (a, b) in entries {
                    let (ca, cb) = (class_of(src, a)?, class_of(dst, b)?);
                    if map.insert(ca, cb).is_some() {
                        return Err(ResolutionError::Connection {
                            source: ConnectionError::DuplicateEntry {
                                map: id.text.clone(),
                                class: a.text.clone(),
                            },
                            pos: a.pos,
                        });
                    }
                }
                let m = ClassMap::new(&id.text, src, dst, map);
                insert(&mut ws.maps, "map", id, m)?;
            }
        }
        for d in decls {
            match d {
                Decl::Connection { id, alpha, gamma } => {
                    let a = lookup(&ws.maps, "map", alpha)?;
                    let g = lookup(&ws.maps, "map", gamma)?;
                    let l = ws.lattices[a.source()].clone();
                    let m = ws.lattices[a.target()].clone();
                    let p = ConnectionPair::new(l, m, a.clone(), g.clone()).map_err(|source| {
                        ResolutionError::Connection {
                            source,
                            pos: id.pos,
                        }
                    })?;
                    insert(&mut ws.connections, "connection", id, p)?;
                }
                Decl::Mou {
                    id,
                    left,
                    right,
                    edges,
                } => {
                    let l = lookup(&ws.lattices, "lattice", left)?.clone();
                    let r = lookup(&ws.lattices, "lattice", right)?.clone();
                    let mut set = MouEdgeSet::new(l.clone(), r.clone());
                    for (a, b) in edges {
                        let forward = l.class(&a.text).is_ok() && r.class(&b.text).is_ok();
                        let backward = r.class(&a.text).is_ok() && l.class(&b.text).is_ok();
                        let sides = match (forward, backward) {
                            (true, false) => (Side::Left, Side::Right),
                            (false, true) => (Side::Right, Side::Left),
                            _ => {
                                return Err(ResolutionError::MouEndpoints {
                                    from: a.text.clone(),
                                    to: b.text.clone(),
                                    left: left.text.clone(),
                                    right: right.text.clone(),
                                    pos: a.pos,
                                })
                            }
                        };
                        set.add((sides.0, &a.text), (sides.1, &b.text))
                            .map_err(|source| ResolutionError::Mou { source, pos: a.pos })?;
                    }
                    insert(&mut ws.mous, "mou", id, set)?;
                }
                Decl::Domain {
                    id,
                    lattice,
                    vars,
                    processes,
                } => {
                    let l = lookup(&ws.lattices, "lattice", lattice)?;
                    let mut dom = DomainPolicy::new(&id.text, l.clone());
                    let mut seen = BTreeSet::new();
                    for (ns, var, class) in vars {
                        if !seen.insert(&var.text) {
                            return Err(ResolutionError::DuplicateVariable {
                                var: var.text.clone(),
                                pos: var.pos,
                            });
                        }
                        dom.declare(*ns, &var.text, &class.text).map_err(|source| {
                            ResolutionError::Lattice {
                                source,
                                pos: class.pos,
                            }
                        })?;
                    }
                    dom.processes = processes.iter().map(|p| p.text.clone()).collect();
                    insert(&mut ws.domains, "domain", id, dom)?;
                }
                Decl::Program { id, phrases } => {
                    let prog = Program::new(phrases.iter().map(|(p, _)| p.clone()).collect());
                    insert(&mut ws.programs, "program", id, prog)?;
                }
                _ => {}
            }
        }
        for d in decls {
            match d {
                Decl::System {
                    id,
                    left,
                    right,
                    connect,
                } => {
                    if left.text == right.text {
                        return Err(ResolutionError::SameDomain {
                            name: left.text.clone(),
                            system: id.text.clone(),
                            pos: right.pos,
                        });
                    }
                    let l = lookup(&ws.domains, "domain", left)?.clone();
                    let r = lookup(&ws.domains, "domain", right)?.clone();
                    let p = lookup(&ws.connections, "connection", connect)?.clone();
                    let sys = SystemDecl {
                        left: left.text.clone(),
                        right: right.text.clone(),
                        connection: connect.text.clone(),
                        config: SystemConfig::new(l, r, p),
                    };
                    insert(&mut ws.systems, "system", id, sys)?;
                }
                Decl::Store { id, domain, values } => {
                    let dom = lookup(&ws.domains, "domain", domain)?;
                    let mut given = BTreeMap::new();
                    for (var, v) in values {
                        if dom.namespace(&var.text).is_none() {
                            return Err(ResolutionError::StoreVariable {
                                var: var.text.clone(),
                                domain: domain.text.clone(),
                                pos: var.pos,
                            });
                        }
                        if given.insert(var.text.clone(), *v).is_some() {
                            return Err(ResolutionError::DuplicateVariable {
                                var: var.text.clone(),
                                pos: var.pos,
                            });
                        }
                    }
                    let decl = StoreDecl {
                        domain: domain.text.clone(),
                        values: Store::from_values(given),
                    };
                    insert(&mut ws.stores, "store", id, decl)?;
                }
                _ => {}
            }
        }
        Ok(ws)
    }

    pub fn lattice(&self, id: &str) -> Option<&Arc<FiniteLattice>> {
        self.lattices.get(id)
    }

    /// The zeroed store of `domain` with the file's values written over it.
    pub fn initial_store(&self, store: &StoreDecl) -> Option<Store> {
        let mut s = Store::zeroed(self.domains.get(&store.domain)?);
        for (k, v) in store.values.iter() {
            s.set(k, v);
        }
        Some(s)
    }
}

fn lattice_decl(out: &mut String, l: &FiniteLattice) -> fmt::Result {
    write!(out, "lattice {} {{\n  elements", l.id())?;
    for c in l.classes() {
        write!(out, " {}", l.name(c))?;
    }
    out.push_str(" ;\n");
    if !l.covers().is_empty() {
        let order: Vec<String> = l
            .covers()
            .iter()
            .map(|&(a, b)| format!("{} < {}", l.name(a), l.name(b)))
            .collect();
        writeln!(out, "  order {} ;", order.join(", "))?;
    }
    out.push_str("}\n");
    Ok(())
}

/// `map` syntax for a class map between two lattices.
pub fn map_decl(map: &ClassMap, source: &FiniteLattice, target: &FiniteLattice) -> String {
    let mut out = format!("map {} : {} -> {} {{\n", map.id(), source.id(), target.id());
    for (a, b) in map.entries() {
        out.push_str(&format!("  {} -> {} ;\n", source.name(a), target.name(b)));
    }
    out.push_str("}\n");
    out
}

/// `store` syntax.
pub fn store_decl(id: &str, domain: &str, store: &Store) -> String {
    let mut out = format!("store {id} for {domain} {{\n");
    for (k, v) in store.iter() {
        out.push_str(&format!("  {k} = {v} ;\n"));
    }
    out.push_str("}\n");
    out
}

impl fmt::Display for Workspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for l in self.lattices.values() {
            lattice_decl(&mut out, l)?;
        }
        for m in self.maps.values() {
            out.push_str(&map_decl(
                m,
                &self.lattices[m.source()],
                &self.lattices[m.target()],
            ));
        }
        for (id, p) in &self.connections {
            writeln!(
                out,
                "connection {id} {{ alpha {} ; gamma {} ; }}",
                p.alpha().id(),
                p.gamma().id()
            )?;
        }
        for (id, mou) in &self.mous {
            writeln!(
                out,
                "mou {id} : {} <-> {} {{",
                mou.left().id(),
                mou.right().id()
            )?;
            for e in mou.edges() {
                writeln!(out, "  {} -> {} ;", mou.name(e.from), mou.name(e.to))?;
            }
            out.push_str("}\n");
        }
        for (id, d) in &self.domains {
            writeln!(out, "domain {id} {{\n  lattice {} ;", d.lattice.id())?;
            for ns in Namespace::ALL {
                out.push_str("  ");
                out.push_str(ns.keyword());
                for v in d.set(ns) {
                    write!(out, " {v} : {} ;", d.lattice.name(d.lambda[v]))?;
                }
                out.push('\n');
            }
            if !d.processes.is_empty() {
                writeln!(out, "  processes {} ;", d.processes.join(" "))?;
            }
            out.push_str("}\n");
        }
        for (id, s) in &self.systems {
            writeln!(
                out,
                "system {id} {{ left {} ; right {} ; connect {} ; }}",
                s.left, s.right, s.connection
            )?;
        }
        for (id, prog) in &self.programs {
            writeln!(out, "program {id} {{")?;
            for p in prog {
                writeln!(out, "  {p}")?;
            }
            out.push_str("}\n");
        }
        for (id, s) in &self.stores {
            out.push_str(&store_decl(id, &s.domain, &s.values));
        }
        f.write_str(&out)
    }
}
