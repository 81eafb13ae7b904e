//! The subcommands. Each returns an [`Outcome`] carrying both renderings
//! and an exit code; errors that stop a command from running at all are
//! [`CliError`]s and exit with 2.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use lagois::{
    adversary_pairs, audit_mou, budpoints, derive_partner, roundtrip_infimum_check, run,
    type_program, validate_config, verify_all, well_formed, AdversaryLevel, Condition, DeriveError,
    Direction, Entry, FiniteLattice, MouEdgeSet, NiError, NiOptions, NiResult, Program, Side,
    StorePair, SystemConfig, Witness,
};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::workspace::{map_decl, store_decl, LoadError, SystemDecl, Workspace};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Load {
        path: String,
        source: Box<LoadError>,
    },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }
}

/// A finished command: exit code 0 when every check passed, 1 otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Json,
}

impl Outcome {
    fn new(command: &str, passed: bool, text: String, mut json: Json) -> Self {
        json["command"] = json!(command);
        json["status"] = json!(status(passed));
        Outcome {
            code: if passed { 0 } else { 1 },
            text,
            json,
        }
    }
}

fn status(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

pub fn load(path: &str) -> Result<Workspace, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    Workspace::parse(&src).map_err(|source| CliError::Load {
        path: path.to_string(),
        source: Box::new(source),
    })
}

fn get<'a, T>(
    table: &'a std::collections::BTreeMap<String, T>,
    kind: &'static str,
    name: &str,
) -> Result<&'a T, CliError> {
    table.get(name).ok_or_else(|| CliError::Unknown {
        kind,
        name: name.to_string(),
    })
}

fn witness_json(w: &Witness) -> Json {
    json!({ "elements": w.elements, "note": w.note })
}

fn entry_json<C: Copy>(e: &Entry<C>, id: &str, statement: Option<&str>) -> Json {
    json!({
        "id": id,
        "status": status(e.passed()),
        "statement": statement,
        "witnesses": e.witnesses.iter().map(witness_json).collect::<Vec<_>>(),
    })
}

const SHOWN_WITNESSES: usize = 3;

fn entry_text<C: Copy>(out: &mut String, e: &Entry<C>, id: &str, statement: &str) {
    let line = format!("  {id:<11} {:<4}  {statement}", status(e.passed()));
    let _ = writeln!(out, "{}", line.trim_end());
    for w in e.witnesses.iter().take(SHOWN_WITNESSES) {
        let _ = writeln!(out, "      {w}");
    }
    if e.witnesses.len() > SHOWN_WITNESSES {
        let _ = writeln!(
            out,
            "      ... {} more",
            e.witnesses.len() - SHOWN_WITNESSES
        );
    }
}

fn class_set(l: &FiniteLattice, set: &BTreeSet<lagois::Class>) -> Vec<String> {
    set.iter().map(|&c| l.name(c).to_string()).collect()
}

pub fn validate(ws: &Workspace) -> Outcome {
    let mut text = String::new();
    let mut ok = true;
    let mut lattices = Vec::new();
    for (id, l) in &ws.lattices {
        let _ = writeln!(
            text,
            "lattice {id}: {} classes, bottom {}, top {}",
            l.len(),
            l.name(l.bottom()),
            l.name(l.top())
        );
        lattices.push(json!({
            "id": id,
            "classes": l.len(),
            "bottom": l.name(l.bottom()),
            "top": l.name(l.top()),
        }));
    }
    let mut connections = Vec::new();
    for (id, p) in &ws.connections {
        let r = verify_all(p);
        let failed: Vec<&str> = r.failed_conditions().iter().map(|c| c.id()).collect();
        let kind = if r.is_lagois() {
            "lagois"
        } else {
            "not lagois"
        };
        let _ = write!(text, "connection {id}: {kind}");
        if !failed.is_empty() {
            let _ = write!(text, "; failing: {}", failed.join(", "));
        }
        text.push('\n');
        connections.push(json!({ "id": id, "lagois": r.is_lagois(), "failed": failed }));
    }
    let mut systems = Vec::new();
    for (id, s) in &ws.systems {
        let errors: Vec<String> = match validate_config(&s.config) {
            Ok(()) => Vec::new(),
            Err(es) => es.iter().map(ToString::to_string).collect(),
        };
        ok &= errors.is_empty();
        let _ = writeln!(
            text,
            "system {id}: {}",
            if errors.is_empty() {
                "valid"
            } else {
                "invalid"
            }
        );
        for e in &errors {
            let _ = writeln!(text, "  {e}");
        }
        systems.push(json!({ "id": id, "status": status(errors.is_empty()), "errors": errors }));
    }
    Outcome::new(
        "validate",
        ok,
        text,
        json!({ "lattices": lattices, "connections": connections, "systems": systems }),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Lagois,
    Galois,
    Insertion,
}

impl Expect {
    fn conditions(self) -> Vec<Condition> {
        match self {
            Expect::Lagois => Condition::LAGOIS_SUITE.to_vec(),
            Expect::Galois => vec![Condition::MonoAlpha, Condition::MonoGamma, Condition::Gc1],
            Expect::Insertion => vec![
                Condition::MonoAlpha,
                Condition::MonoGamma,
                Condition::Gc1,
                Condition::GiInj,
                Condition::GiSurj,
            ],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Expect::Lagois => "lagois",
            Expect::Galois => "galois",
            Expect::Insertion => "insertion",
        }
    }
}

pub fn check_connection(ws: &Workspace, id: &str, expect: Expect) -> Result<Outcome, CliError> {
    let p = get(&ws.connections, "connection", id)?;
    let (l, m) = (p.left(), p.right());
    let report = verify_all(p);

    let mut text = format!(
        "connection {id}: alpha {} ({} -> {}), gamma {} ({} -> {})\n",
        p.alpha().id(),
        l.id(),
        m.id(),
        p.gamma().id(),
        m.id(),
        l.id()
    );
    for e in report.entries() {
        entry_text(&mut text, e, e.condition.id(), e.condition.statement());
    }
    let wanted = expect.conditions();
    let passed = wanted.iter().all(|&c| report.passed(c));
    let mut json = json!({
        "connection": id,
        "expect": expect.name(),
        "conditions": report.entries().iter()
            .map(|e| entry_json(e, e.condition.id(), Some(e.condition.statement())))
            .collect::<Vec<_>>(),
    });

    if let Ok(b) = budpoints(p) {
        let (ls, ms) = (class_set(l, &b.left), class_set(m, &b.right));
        let _ = writeln!(
            text,
            "budpoints\n  L* = {{{}}}\n  M* = {{{}}}",
            ls.join(", "),
            ms.join(", ")
        );
        json["budpoints"] = json!({ "left": ls, "right": ms });
    }
    if let Ok(rt) = roundtrip_infimum_check(p) {
        text.push_str("round-trip identities\n");
        for e in rt.entries() {
            entry_text(&mut text, e, e.condition.id(), "");
        }
        json["round_trip"] = rt
            .entries()
            .iter()
            .map(|e| entry_json(e, e.condition.id(), None))
            .collect();
    }
    let _ = writeln!(text, "expect {}: {}", expect.name(), status(passed));
    Ok(Outcome::new("check-connection", passed, text, json))
}

pub fn derive(ws: &Workspace, map_id: &str, direction: Direction) -> Result<Outcome, CliError> {
    let f = get(&ws.maps, "map", map_id)?;
    let source = get(&ws.lattices, "lattice", f.source())?;
    let target = get(&ws.lattices, "lattice", f.target())?;
    let from = match direction {
        Direction::FromAlpha => "alpha",
        Direction::FromGamma => "gamma",
    };
    let partner_id = format!("{map_id}_partner");
    match derive_partner(source, target, f, direction) {
        Ok(g) => {
            let g = g.with_id(&partner_id);
            let text = map_decl(&g, target, source);
            let json = json!({
                "map": map_id,
                "from": from,
                "partner": partner_id,
                "source": target.id(),
                "target": source.id(),
                "entries": g.entries().map(|(a, b)| [target.name(a), source.name(b)]).collect::<Vec<_>>(),
            });
            Ok(Outcome::new("derive", true, text, json))
        }
        Err(DeriveError::Connection(e)) => Err(CliError::invalid(e.to_string())),
        Err(e) => {
            let mut text = format!("# {e}\n");
            let mut json = json!({ "map": map_id, "from": from, "error": e.to_string() });
            if let DeriveError::NotLagois { candidate, .. } = &e {
                let candidate = candidate.clone().with_id(&partner_id);
                text.push_str(&map_decl(&candidate, target, source));
                json["candidate"] = candidate
                    .entries()
                    .map(|(a, b)| [target.name(a), source.name(b)])
                    .collect::<Vec<_>>()
                    .into();
            }
            Ok(Outcome::new("derive", false, text, json))
        }
    }
}

fn audit_edges(ws: &Workspace, id: &str) -> Result<MouEdgeSet, CliError> {
    if let Some(m) = ws.mous.get(id) {
        return Ok(m.clone());
    }
    if let Some(p) = ws.connections.get(id) {
        return Ok(p.mou_edges());
    }
    Err(CliError::Unknown {
        kind: "mou",
        name: id.to_string(),
    })
}

pub fn audit(ws: &Workspace, id: &str) -> Result<Outcome, CliError> {
    let edges = audit_edges(ws, id)?;
    let found = audit_mou(&edges);
    let mut text = String::new();
    let mut list = Vec::new();
    for v in &found {
        let lattice = edges.lattice(v.from.side).id();
        let _ = writeln!(
            text,
            "violation {} ⇝ {} in {lattice}",
            edges.name(v.from),
            edges.name(v.to)
        );
        let mut path = Vec::new();
        for s in &v.path {
            let (a, b) = (edges.name(s.from), edges.name(s.to));
            let _ = writeln!(text, "  {a} -> {b} ({})", s.kind);
            path.push(json!({ "from": a, "to": b, "kind": s.kind.to_string() }));
        }
        list.push(json!({
            "from": edges.name(v.from),
            "to": edges.name(v.to),
            "lattice": lattice,
            "path": path,
        }));
    }
    let _ = writeln!(
        text,
        "{} violation(s) over {} agreed edge(s)",
        found.len(),
        edges.len()
    );
    Ok(Outcome::new(
        "audit",
        found.is_empty(),
        text,
        json!({ "edges": id, "violations": list }),
    ))
}

fn system_and_program<'a>(
    ws: &'a Workspace,
    system: &str,
    program: &str,
) -> Result<(&'a SystemDecl, &'a Program), CliError> {
    let s = get(&ws.systems, "system", system)?;
    let p = get(&ws.programs, "program", program)?;
    if let Err(errs) = well_formed(p, &s.config) {
        let msgs: Vec<String> = errs.iter().map(ToString::to_string).collect();
        return Err(CliError::invalid(format!(
            "program `{program}` is ill-formed under system `{system}`: {}",
            msgs.join("; ")
        )));
    }
    Ok((s, p))
}

fn require_valid(c: &SystemConfig, system: &str) -> Result<(), CliError> {
    validate_config(c).map_err(|errs| {
        let msgs: Vec<String> = errs.iter().map(ToString::to_string).collect();
        CliError::invalid(format!("system `{system}` is invalid: {}", msgs.join("; ")))
    })
}

pub fn typecheck(ws: &Workspace, system: &str, program: &str) -> Result<Outcome, CliError> {
    let (s, p) = system_and_program(ws, system, program)?;
    require_valid(&s.config, system)?;
    Ok(match type_program(&s.config, p) {
        Ok(t) => {
            let shown = t.display(&s.config).to_string();
            Outcome::new(
                "typecheck",
                true,
                format!("{program} : {shown}\n"),
                json!({
                    "program": program,
                    "type": {
                        "left": s.config.class_name(Side::Left, t.left),
                        "right": s.config.class_name(Side::Right, t.right),
                    },
                }),
            )
        }
        Err(e) => Outcome::new(
            "typecheck",
            false,
            format!("{program}: {e}\n  {}\n", p.phrases[e.index]),
            json!({
                "program": program,
                "error": { "index": e.index, "phrase": p.phrases[e.index].to_string(), "message": e.source.to_string() },
            }),
        ),
    })
}

pub fn run_program(
    ws: &Workspace,
    system: &str,
    program: &str,
    stores: &[String],
) -> Result<Outcome, CliError> {
    let (s, p) = system_and_program(ws, system, program)?;
    let c = &s.config;
    let mut initial = StorePair::zeroed(c);
    let mut given = BTreeSet::new();
    for id in stores {
        let decl = get(&ws.stores, "store", id)?;
        let side = if decl.domain == s.left {
            Side::Left
        } else if decl.domain == s.right {
            Side::Right
        } else {
            return Err(CliError::invalid(format!(
                "store `{id}` is for domain `{}`, which is not part of system `{system}`",
                decl.domain
            )));
        };
        if !given.insert(side) {
            return Err(CliError::invalid(format!(
                "two stores given for domain `{}`",
                decl.domain
            )));
        }
        *initial.side_mut(side) = ws.initial_store(decl).expect("resolved domain");
    }
    Ok(match run(&initial, p) {
        Ok(fin) => {
            let mut text = String::new();
            let mut json = json!({ "program": program });
            for (side, dom) in [(Side::Left, &s.left), (Side::Right, &s.right)] {
                text.push_str(&store_decl(&format!("{dom}_final"), dom, fin.side(side)));
                let values: serde_json::Map<String, Json> = fin
                    .side(side)
                    .iter()
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect();
                json[side_key(side)] = json!({ "domain": dom, "values": values });
            }
            Outcome::new("run", true, text, json)
        }
        Err(e) => Outcome::new(
            "run",
            false,
            format!("{program}: {e}\n"),
            json!({ "program": program, "error": e.to_string() }),
        ),
    })
}

fn side_key(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiArgs {
    pub level: Option<String>,
    pub trials: usize,
    pub seed: u64,
    pub unsafe_skip_typecheck: bool,
}

fn parse_level(c: &SystemConfig, level: &str) -> Result<AdversaryLevel, CliError> {
    let (l, m) = level
        .split_once(',')
        .ok_or_else(|| CliError::invalid(format!("level `{level}` is not of the form <l>,<m>")))?;
    let class = |side: Side, name: &str| {
        c.lattice(side)
            .class(name.trim())
            .map_err(|e| CliError::invalid(e.to_string()))
    };
    Ok(AdversaryLevel::new(
        class(Side::Left, l)?,
        class(Side::Right, m)?,
    ))
}

fn ni_result_json(c: &SystemConfig, r: &NiResult) -> Json {
    json!({
        "level": [c.class_name(Side::Left, r.level.l), c.class_name(Side::Right, r.level.m)],
        "trials": r.trials,
        "violations": r.violations.len(),
        "outside_theorem": r.outside_theorem,
        "first": r.violations.first().map(|v| json!({
            "trial": v.trial,
            "seed": v.seed,
            "detail": describe_violation(&v.kind),
        })),
    })
}

fn describe_violation(k: &lagois::ni::ViolationKind<i64>) -> String {
    match k {
        lagois::ni::ViolationKind::Leak {
            var,
            position,
            values,
        } => {
            let at = position.map_or("never written".to_string(), |i| {
                format!("last written by phrase {i}")
            });
            format!("{var} differs ({} vs {}), {at}", values.0, values.1)
        }
        lagois::ni::ViolationKind::Run(e) => format!("run failed: {e}"),
    }
}

pub fn ni_test(
    ws: &Workspace,
    system: &str,
    program: &str,
    args: &NiArgs,
) -> Result<Outcome, CliError> {
    let (s, p) = system_and_program(ws, system, program)?;
    let c = &s.config;
    require_valid(c, system)?;
    let levels = match &args.level {
        Some(level) => vec![parse_level(c, level)?],
        None => adversary_pairs(&c.connection).map_err(|e| CliError::invalid(e.to_string()))?,
    };
    let opts = NiOptions {
        trials: args.trials,
        seed: args.seed,
        unsafe_skip_typecheck: args.unsafe_skip_typecheck,
        allow_any_level: args.unsafe_skip_typecheck,
    };
    let mut text = String::new();
    let mut results = Vec::new();
    let mut ok = true;
    for adv in levels {
        let r = match lagois::ni_test(c, p, adv, &opts) {
            Ok(r) => r,
            Err(NiError::IllTyped(e)) => {
                let text = format!(
                    "{program} is not well typed: {e}\n  {}\n(pass --unsafe-skip-typecheck to run it anyway)\n",
                    p.phrases[e.index]
                );
                let json = json!({ "program": program, "error": e.to_string(), "index": e.index });
                return Ok(Outcome::new("ni-test", false, text, json));
            }
            Err(e) => return Err(CliError::invalid(e.to_string())),
        };
        ok &= r.passed();
        let _ = write!(
            text,
            "level ({}, {}): {} trials, {} violation(s)",
            c.class_name(Side::Left, r.level.l),
            c.class_name(Side::Right, r.level.m),
            r.trials,
            r.violations.len()
        );
        if r.outside_theorem {
            text.push_str(" [level outside the theorem]");
        }
        text.push('\n');
        if let Some(v) = r.violations.first() {
            let _ = writeln!(
                text,
                "  first: trial {} seed {}: {}",
                v.trial,
                v.seed,
                describe_violation(&v.kind)
            );
            if let lagois::ni::ViolationKind::Leak {
                position: Some(i), ..
            } = v.kind
            {
                let _ = writeln!(text, "    {}", p.phrases[i]);
            }
            let _ = writeln!(
                text,
                "    run 1 from L {} M {}",
                v.initial.0.left, v.initial.0.right
            );
            let _ = writeln!(
                text,
                "    run 2 from L {} M {}",
                v.initial.1.left, v.initial.1.right
            );
        }
        results.push(ni_result_json(c, &r));
    }
    let json = json!({
        "program": program,
        "seed": args.seed,
        "unsafe_skip_typecheck": args.unsafe_skip_typecheck,
        "levels": results,
    });
    Ok(Outcome::new("ni-test", ok, text, json))
}

pub fn export_dot(ws: &Workspace, connection: Option<&str>) -> Result<Outcome, CliError> {
    let dot = match connection {
        Some(id) => crate::dot::connection(get(&ws.connections, "connection", id)?),
        None => crate::dot::lattices(ws.lattices.values().map(|l| &**l)),
    };
    let json = json!({ "dot": dot });
    Ok(Outcome::new("export-dot", true, dot, json))
}
