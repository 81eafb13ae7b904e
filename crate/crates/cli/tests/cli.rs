//! The binary's contract: output, exit codes, JSON mode and printing.

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;

use lagois::enumerate::{lattices_up_to, monotone_maps};
use lagois::ni::random_program;
use lagois::{
    fixtures, Assign, ClassMap, ConnectionPair, DomainPolicy, Expr, FiniteLattice, MouEdgeSet,
    Namespace, Op, Phrase, Program, Side, Store, SystemConfig,
};
use lagois_cli::workspace::{StoreDecl, SystemDecl};
use lagois_cli::{main_with_args, LoadError, Workspace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn example(name: &str) -> String {
    format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn lagois(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lagois"))
        .args(args)
        .output()
        .expect("spawn");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn bundled_examples_parse_and_print_stably() {
    for f in [
        "college_university.lag",
        "exchange_mou.lag",
        "insecure.lag",
        "chains.lag",
        "escalation.lag",
    ] {
        let src = std::fs::read_to_string(example(f)).unwrap();
        let ws = Workspace::parse(&src).unwrap();
        let printed = ws.to_string();
        assert_eq!(Workspace::parse(&printed).unwrap(), ws, "{f}");
        assert_eq!(Workspace::parse(&printed).unwrap().to_string(), printed);
    }
}

#[test]
fn bundled_system_matches_fixture() {
    let ws = Workspace::parse(&std::fs::read_to_string(example("college_university.lag")).unwrap())
        .unwrap();
    let c = &ws.systems["roundtrip"].config;
    let f = fixtures::round_trip_system();
    assert_eq!(c.connection, f.connection);
    for side in [Side::Left, Side::Right] {
        let (a, b) = (c.domain(side), f.domain(side));
        for ns in Namespace::ALL {
            assert_eq!(a.set(ns), b.set(ns));
        }
        assert_eq!(a.lambda, b.lambda);
    }
    assert_eq!(ws.programs["roundtrip"], fixtures::round_trip_program());
}

#[test]
fn check_connection_exit_codes() {
    let cu = example("college_university.lag");
    let (code, out, _) = lagois(&["check-connection", &cu, "--connection", "cu"]);
    assert_eq!(code, 0);
    assert!(out.contains("GC1         fail"));
    assert!(out.contains("expect lagois: pass"));
    let (code, _, _) = lagois(&[
        "check-connection",
        &cu,
        "--connection",
        "cu",
        "--expect",
        "galois",
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = lagois(&[
        "check-connection",
        &example("insecure.lag"),
        "--connection",
        "insecure",
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = lagois(&[
        "check-connection",
        &example("chains.lag"),
        "--connection",
        "chains",
        "--expect",
        "galois",
    ]);
    assert_eq!(code, 0);
    let (code, _, _) = lagois(&[
        "check-connection",
        &example("chains.lag"),
        "--connection",
        "chains",
        "--expect",
        "insertion",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn json_reports() {
    let cu = example("college_university.lag");
    let (code, out, _) = lagois(&[
        "--format",
        "json",
        "check-connection",
        &cu,
        "--connection",
        "cu",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "check-connection");
    assert_eq!(v["status"], "pass");
    let conds = v["conditions"].as_array().unwrap();
    assert_eq!(conds.len(), lagois::Condition::ALL.len());
    let gc1 = conds.iter().find(|c| c["id"] == "GC1").unwrap();
    assert_eq!(gc1["status"], "fail");
    assert_eq!(gc1["witnesses"][0]["elements"][0], "top1");

    let (code, out, _) = lagois(&[
        "audit",
        &example("exchange_mou.lag"),
        "--edges",
        "mou1",
        "--format",
        "json",
    ]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["violations"].as_array().unwrap().len(), 1);
    assert_eq!(v["violations"][0]["path"].as_array().unwrap().len(), 3);
}

#[test]
fn run_prints_store_syntax() {
    let cu = example("college_university.lag");
    let (code, out, _) = lagois(&[
        "run",
        &cu,
        "--system",
        "roundtrip",
        "--program",
        "roundtrip",
        "--store",
        "start",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("z2 = 5 ;"), "{out}");
    // the output is itself a valid file fragment
    let ws =
        Workspace::parse(&format!("{}\n{out}", std::fs::read_to_string(&cu).unwrap())).unwrap();
    assert_eq!(ws.stores["L_final"].values.get("z2"), Some(5));

    let (code, out, _) = lagois(&["run", &cu, "--system", "roundtrip", "--program", "bump"]);
    assert_eq!(code, 0);
    // assignments inside a transaction see earlier ones
    assert!(
        out.contains("z1 = 1 ;") && out.contains("z2 = 2 ;"),
        "{out}"
    );
}

#[test]
fn usage_and_config_errors_exit_2() {
    let cu = example("college_university.lag");
    for args in [
        vec!["check-connection", cu.as_str()],
        vec!["check-connection", cu.as_str(), "--connection", "nope"],
        vec![
            "typecheck",
            cu.as_str(),
            "--system",
            "roundtrip",
            "--program",
            "nope",
        ],
        vec![
            "typecheck",
            cu.as_str(),
            "--system",
            "leaky",
            "--program",
            "roundtrip",
        ],
        vec![
            "run",
            cu.as_str(),
            "--system",
            "leaky",
            "--program",
            "leak",
            "--store",
            "start",
        ],
        vec![
            "ni-test",
            cu.as_str(),
            "--system",
            "roundtrip",
            "--program",
            "roundtrip",
            "--level",
            "Faculty",
        ],
        vec![
            "ni-test",
            cu.as_str(),
            "--system",
            "roundtrip",
            "--program",
            "roundtrip",
            "--level",
            "Faculty,DeanColleges",
        ],
        vec!["validate", "/nonexistent/file.lag"],
        vec!["frobnicate"],
    ] {
        let (code, out, err) = lagois(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty() && !err.is_empty(), "{args:?}");
    }
}

#[test]
fn parse_errors_report_position() {
    let dir = std::env::temp_dir().join(format!("lagois-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.lag");
    std::fs::write(&bad, "lattice A {\n  elements a b ;\n  order a b ;\n}\n").unwrap();
    let (code, _, err) = lagois(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains(":3:11:"), "{err}");
    let dangling = dir.join("dangling.lag");
    std::fs::write(
        &dangling,
        "lattice A { elements a ; }\nmap f : A -> B { a -> a ; }\n",
    )
    .unwrap();
    let (code, _, err) = lagois(&["validate", dangling.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown lattice `B`"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn typecheck_and_ni_exit_codes() {
    let cu = example("college_university.lag");
    let (code, out, _) = lagois(&[
        "typecheck",
        &cu,
        "--system",
        "roundtrip",
        "--program",
        "roundtrip",
    ]);
    assert_eq!(
        (code, out.as_str()),
        (0, "roundtrip : ⟨Faculty, UnivFac⟩\n")
    );
    let (code, out, _) = lagois(&["typecheck", &cu, "--system", "leaky", "--program", "leak"]);
    assert_eq!(code, 1);
    assert!(out.contains("phrase 0"), "{out}");
    let (code, _, _) = lagois(&[
        "ni-test",
        &cu,
        "--system",
        "roundtrip",
        "--program",
        "bump",
        "--trials",
        "50",
    ]);
    assert_eq!(code, 0);
    let (code, out, _) = lagois(&[
        "ni-test",
        &cu,
        "--system",
        "leaky",
        "--program",
        "leak",
        "--trials",
        "50",
        "--level",
        "Faculty,UnivFac",
        "--unsafe-skip-typecheck",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("L.ylow differs"), "{out}");
}

#[test]
fn ni_test_is_reproducible_from_the_seed() {
    let cu = example("college_university.lag");
    let args = |seed: &'static str| {
        vec![
            "ni-test".to_string(),
            cu.clone(),
            "--system".into(),
            "leaky".into(),
            "--program".into(),
            "leak".into(),
            "--trials".into(),
            "30".into(),
            "--seed".into(),
            seed.into(),
            "--level".into(),
            "Faculty,UnivFac".into(),
            "--unsafe-skip-typecheck".into(),
        ]
    };
    let run = |seed| main_with_args(std::iter::once("lagois".to_string()).chain(args(seed)));
    assert_eq!(run("9"), run("9"));
    assert_ne!(run("9").stdout, run("10").stdout);
}

#[test]
fn dot_is_stable_and_sorted() {
    let cu = example("college_university.lag");
    let a = lagois(&["export-dot", &cu, "--connection", "cu"]);
    let b = lagois(&["export-dot", &cu, "--connection", "cu"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
    let lines: Vec<&str> = a.1.lines().collect();
    let body = &lines[2..lines.len() - 1];
    let (nodes, edges): (Vec<&str>, Vec<&str>) = body.iter().partition(|l| !l.contains("->"));
    assert_eq!(nodes.len(), 13);
    assert_eq!(edges.len(), 7 + 5 + 7 + 6);
    for part in [&nodes, &edges] {
        assert!(part.windows(2).all(|w| w[0] < w[1]));
    }
    assert!(a.1.contains(
        "\"college_Faculty\" -> \"university_UnivFac\" [style=dashed, label=\"alpha\"];"
    ));
    assert!(a.1.contains(
        "\"university_DeanColleges\" -> \"college_Principal\" [style=dashed, label=\"gamma\"];"
    ));
    assert!(a.1.contains("\"college_Student\" -> \"college_DeanS\";"));
    let (code, all, _) = lagois(&["export-dot", &cu]);
    assert_eq!(code, 0);
    assert!(!all.contains("dashed"));
}

#[test]
fn derive_prints_map_syntax() {
    let cu = example("college_university.lag");
    let (code, out, _) = lagois(&["derive", &cu, "--from", "alpha", "--map", "alpha"]);
    assert_eq!(code, 0);
    let src = format!("{}\n{out}", std::fs::read_to_string(&cu).unwrap());
    let ws = Workspace::parse(&src).unwrap();
    assert!(ws.maps["alpha_partner"]
        .entries()
        .eq(ws.maps["gamma"].entries()));
    let (code, _, _) = lagois(&[
        "derive",
        &example("escalation.lag"),
        "--from",
        "alpha",
        "--map",
        "alpha",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn validate_flags_invalid_systems() {
    let (code, out, _) = lagois(&["validate", &example("college_university.lag")]);
    assert_eq!(code, 0, "{out}");
    let src = "
        lattice A { elements lo hi ; order lo < hi ; }
        map f : A -> A { lo -> lo ; hi -> hi ; }
        map g : A -> A { lo -> lo ; }
        connection c { alpha f ; gamma f ; }
        domain D1 { lattice A ; exports x : hi ; }
        domain D2 { lattice A ; imports y : lo ; }
        system s { left D1 ; right D2 ; connect c ; }
    ";
    let ws = Workspace::parse(src).unwrap();
    let out = lagois_cli::commands::validate(&ws);
    assert_eq!(out.code, 0, "{}", out.text);
    let broken = src.replace(
        "connection c { alpha f ; gamma f ; }",
        "connection c { alpha g ; gamma g ; }",
    );
    let ws = Workspace::parse(&broken).unwrap();
    let out = lagois_cli::commands::validate(&ws);
    assert_eq!(out.code, 1);
    assert!(out.text.contains("not a transfer class"), "{}", out.text);
}

#[test]
fn ambiguous_mou_edges_rejected() {
    let src =
        "lattice A { elements a b ; order a < b ; } lattice B { elements a b ; order a < b ; }
        mou m : A <-> B { a -> b ; }";
    assert!(matches!(
        Workspace::parse(src),
        Err(LoadError::Resolution(_))
    ));
}

// random workspaces for the printing round trip

fn renamed(l: &FiniteLattice, id: &str) -> FiniteLattice {
    let name = |c| format!("{id}_{}", l.name(c));
    let names: Vec<String> = l.classes().map(name).collect();
    let edges: Vec<(String, String)> = l
        .covers()
        .iter()
        .map(|&(a, b)| (name(a), name(b)))
        .collect();
    FiniteLattice::new(id, &names, edges).unwrap()
}

fn arb_expr(vars: Vec<String>) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        any::<i64>().prop_map(Expr::Lit),
        prop::sample::select(vars).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (
            prop::sample::select(vec![Op::Add, Op::Sub, Op::Mul]),
            inner.clone(),
            inner,
        )
            .prop_map(|(op, a, b)| Expr::bin(op, a, b))
    })
}

fn build(seed: u64, exprs: Vec<Expr>, values: Vec<i64>) -> Workspace {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = lattices_up_to(4);
    let mut ws = Workspace::default();
    for i in 0..rng.gen_range(2..4) {
        let id = format!("lat{i}");
        let l = renamed(pool.choose(&mut rng).unwrap(), &id);
        ws.lattices.insert(id, Arc::new(l));
    }
    let ids: Vec<String> = ws.lattices.keys().cloned().collect();
    let (l, m) = (ws.lattices[&ids[0]].clone(), ws.lattices[&ids[1]].clone());
    let alpha = monotone_maps("fwd", &l, &m)
        .choose(&mut rng)
        .unwrap()
        .clone();
    let gamma = monotone_maps("back", &m, &l)
        .choose(&mut rng)
        .unwrap()
        .clone();
    // a partial map that no connection uses
    let keep: Vec<bool> = l.classes().map(|_| rng.gen_bool(0.5)).collect();
    let partial = alpha.restrict(|c| keep[c.index()]).with_id("partial");
    for f in [&alpha, &gamma, &partial] {
        ws.maps.insert(f.id().to_string(), f.clone());
    }
    let pair = ConnectionPair::new(l.clone(), m.clone(), alpha, gamma).unwrap();
    ws.connections.insert("conn".into(), pair.clone());

    let mut mou = MouEdgeSet::new(l.clone(), m.clone());
    for _ in 0..rng.gen_range(0..5) {
        let a = l
            .name(*l.classes().collect::<Vec<_>>().choose(&mut rng).unwrap())
            .to_string();
        let b = m
            .name(*m.classes().collect::<Vec<_>>().choose(&mut rng).unwrap())
            .to_string();
        if rng.gen_bool(0.5) {
            mou.add((Side::Left, &a), (Side::Right, &b)).unwrap();
        } else {
            mou.add((Side::Right, &b), (Side::Left, &a)).unwrap();
        }
    }
    ws.mous.insert("edges".into(), mou);

    let mut domain = |name: &str, lat: &Arc<FiniteLattice>, prefix: &str| {
        let mut d = DomainPolicy::new(name, lat.clone());
        let classes: Vec<_> = lat.classes().collect();
        for (k, ns) in Namespace::ALL.into_iter().enumerate() {
            for j in 0..rng.gen_range(1..3) {
                let class = lat.name(*classes.choose(&mut rng).unwrap()).to_string();
                d.declare(ns, &format!("{prefix}{k}{j}"), &class).unwrap();
            }
        }
        if rng.gen_bool(0.3) {
            d.processes = vec!["p1".into(), "p0".into()];
        }
        d
    };
    let (dl, dm) = (domain("DL", &l, "v"), domain("DM", &m, "w"));
    ws.domains.insert("DL".into(), dl.clone());
    ws.domains.insert("DM".into(), dm.clone());
    let config = SystemConfig::new(dl.clone(), dm, pair);
    let mut prog = random_program(&config, rng.gen_range(0..6), &mut rng);
    let objects: Vec<&String> = dl.objects.iter().collect();
    for e in exprs {
        let target = objects.choose(&mut rng).unwrap().to_string();
        prog.phrases
            .push(Phrase::txn(Side::Left, vec![Assign::new(target, e)]));
    }
    ws.programs.insert("prog".into(), prog);
    ws.programs.insert("nothing".into(), Program::empty());
    ws.systems.insert(
        "sys".into(),
        SystemDecl {
            left: "DL".into(),
            right: "DM".into(),
            connection: "conn".into(),
            config,
        },
    );
    let vars: Vec<&str> = dl.vars().into_iter().collect();
    let store: BTreeMap<String, i64> = values
        .into_iter()
        .map(|v| (vars.choose(&mut rng).unwrap().to_string(), v))
        .collect();
    ws.stores.insert(
        "init".into(),
        StoreDecl {
            domain: "DL".into(),
            values: Store::from_values(store),
        },
    );
    ws
}

proptest! {
    #[test]
    fn parse_of_print_is_identity(
        seed in any::<u64>(),
        exprs in prop::collection::vec(arb_expr(vec!["v00".into(), "v01".into()]), 0..3),
        values in prop::collection::vec(any::<i64>(), 0..4),
    ) {
        let mut ws = build(seed, exprs, values);
        // expressions may name an object the random domain did not get
        let known = ws.domains["DL"].objects.clone();
        let prog = ws.programs.get_mut("prog").unwrap();
        prog.phrases.retain(|p| match p {
            Phrase::Txn { assigns, .. } => assigns.iter().all(|a| a.expr.vars().iter().all(|v| known.contains(*v))),
            _ => true,
        });
        let printed = ws.to_string();
        let back = Workspace::parse(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(&back, &ws);
        prop_assert_eq!(back.to_string(), printed);
    }
}

#[test]
fn partial_map_is_kept_partial() {
    let l = Arc::new(fixtures::college());
    let m = Arc::new(fixtures::university());
    let f = ClassMap::from_names("f", &l, &m, [("Faculty", "UnivFac")]).unwrap();
    let mut ws = Workspace::default();
    ws.lattices.insert("college".into(), l);
    ws.lattices.insert("university".into(), m);
    ws.maps.insert("f".into(), f);
    let back = Workspace::parse(&ws.to_string()).unwrap();
    assert_eq!(back.maps["f"].len(), 1);
    assert_eq!(back, ws);
}
