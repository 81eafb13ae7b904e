//! The ten acceptance checks. Each prints one PASS/FAIL line to stdout.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;

use lagois::enumerate::{lattices_up_to, monotone_maps};
use lagois::ni::random_program;
use lagois::{
    adversary_pairs, audit_mou, derive_partner, fixtures, ni_exhaustive, ni_test,
    roundtrip_infimum_check, run, type_program, verify_all, well_formed, Condition, ConnectionPair,
    Direction, FiniteLattice, NiOptions, Side, StorePair, Var,
};
use lagois_cli::{main_with_args, Workspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn example(name: &str) -> String {
    format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn workspace(name: &str) -> Workspace {
    Workspace::parse(&std::fs::read_to_string(example(name)).unwrap()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli_json(args: &[&str]) -> (i32, serde_json::Value) {
    let inv = main_with_args(["lagois", "--format", "json"].iter().chain(args));
    (
        inv.code,
        serde_json::from_str(&inv.stdout).expect("json output"),
    )
}

fn names(v: &serde_json::Value) -> BTreeSet<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn secure_pair_connection() -> Check {
    let file = example("college_university.lag");
    let (code, v) = cli_json(&["check-connection", &file, "--connection", "cu"]);
    ensure(code == 0, || format!("exit {code}"))?;
    for c in v["conditions"].as_array().unwrap() {
        let id = c["id"].as_str().unwrap();
        let want = if matches!(id, "GC1" | "GI-inj" | "GI-surj") {
            "fail"
        } else {
            "pass"
        };
        ensure(c["status"] == want, || format!("{id} is {}", c["status"]))?;
    }
    ensure(
        names(&v["budpoints"]["left"]) == set(&["bot1", "Faculty", "Principal", "top1"]),
        || format!("L* = {}", v["budpoints"]["left"]),
    )?;
    ensure(
        names(&v["budpoints"]["right"]) == set(&["bot2", "UnivFac", "DeanColleges", "top2"]),
        || format!("M* = {}", v["budpoints"]["right"]),
    )?;
    ensure(
        workspace("college_university.lag").connections["cu"] == fixtures::college_university(),
        || "file and fixture differ".into(),
    )
}

fn insecure_return_map() -> Check {
    let ws = workspace("insecure.lag");
    let r = verify_all(&ws.connections["insecure"]);
    ensure(
        r.passed(Condition::MonoAlpha) && r.passed(Condition::MonoGamma),
        || "MONO failed".into(),
    )?;
    for c in [Condition::Sc1, Condition::Lc1] {
        let e = r.get(c).unwrap();
        ensure(
            e.witnesses
                .iter()
                .any(|w| w.elements[0] == "Principal" && w.elements[2] == "Faculty"),
            || format!("{c} witnesses {:?}", e.witnesses),
        )?;
    }
    Ok(())
}

fn exchange_audit() -> Check {
    let (code, v) = cli_json(&["audit", &example("exchange_mou.lag"), "--edges", "mou1"]);
    ensure(code == 1, || format!("exit {code}"))?;
    let vs = v["violations"].as_array().unwrap();
    ensure(vs.len() == 1, || format!("{} violations", vs.len()))?;
    ensure(vs[0]["from"] == "Faculty" && vs[0]["to"] == "DeanS", || {
        vs[0].to_string()
    })?;
    let path = vs[0]["path"].as_array().unwrap();
    ensure(path.len() == 3, || format!("path of {}", path.len()))?;
    ensure(
        audit_mou(&workspace("exchange_mou.lag").mous["mou1"])
            == audit_mou(&fixtures::exchange_mou()),
        || "file and fixture differ".into(),
    )
}

fn galois_not_lagois() -> Check {
    let ws = workspace("chains.lag");
    let r = verify_all(&ws.connections["chains"]);
    ensure(r.passed(Condition::Gc1), || "GC1 failed".into())?;
    let sc2 = r.get(Condition::Sc2).unwrap();
    ensure(sc2.witnesses.iter().any(|w| w.elements[0] == "m1"), || {
        format!("{:?}", sc2.witnesses)
    })
}

// direct definitions for the exhaustive suites

fn naive_lagois(p: &ConnectionPair) -> bool {
    let (l, m) = (p.left(), p.right());
    let a = |x| p.up(x).unwrap();
    let g = |y| p.down(y).unwrap();
    l.classes().all(|x| l.leq(x, g(a(x))) && a(g(a(x))) == a(x))
        && m.classes().all(|y| m.leq(y, a(g(y))) && g(a(g(y))) == g(y))
}

fn closure(lat: &FiniteLattice, f: impl Fn(lagois::Class) -> lagois::Class) -> bool {
    lat.classes().all(|x| {
        lat.leq(x, f(x))
            && f(f(x)) == f(x)
            && lat.classes().all(|y| !lat.leq(x, y) || lat.leq(f(x), f(y)))
    })
}

/// SC, PC and CC from their definitions.
fn naive_secure(p: &ConnectionPair) -> bool {
    let (l, m) = (p.left(), p.right());
    let a = |x| p.up(x).unwrap();
    let g = |y| p.down(y).unwrap();
    let sc = l.classes().all(|x| l.leq(x, g(a(x)))) && m.classes().all(|y| m.leq(y, a(g(y))));
    let pc1 = m
        .classes()
        .map(g)
        .all(|x| a(x) == m.join_all(m.classes().filter(|&y| g(y) == x)));
    let pc2 = l
        .classes()
        .map(a)
        .all(|y| g(y) == l.join_all(l.classes().filter(|&x| a(x) == y)));
    let cc = closure(l, |x| g(a(x))) && closure(m, |y| a(g(y)));
    sc && pc1 && pc2 && cc
}

struct Exhaustive {
    pairs: usize,
    lagois: Vec<ConnectionPair>,
}

fn enumerate_pairs() -> Exhaustive {
    let lattices: Vec<Arc<FiniteLattice>> = lattices_up_to(5).into_iter().map(Arc::new).collect();
    let mut out = Exhaustive {
        pairs: 0,
        lagois: Vec::new(),
    };
    for l in &lattices {
        for m in &lattices {
            let gammas = monotone_maps("gamma", m, l);
            for a in monotone_maps("alpha", l, m) {
                for g in &gammas {
                    out.pairs += 1;
                    let p =
                        ConnectionPair::new(l.clone(), m.clone(), a.clone(), g.clone()).unwrap();
                    if naive_lagois(&p) {
                        out.lagois.push(p);
                    }
                }
            }
        }
    }
    out
}

fn lagois_implies_secure(ex: &Exhaustive) -> Check {
    ensure(!ex.lagois.is_empty(), || "no Lagois pairs found".into())?;
    for p in &ex.lagois {
        let r = verify_all(p);
        ensure(r.is_lagois(), || {
            format!("checker disagrees on {:?}", p.alpha())
        })?;
        for c in Condition::LAGOIS_SUITE {
            ensure(r.passed(c), || {
                format!("{c} fails on {:?} / {:?}", p.alpha(), p.gamma())
            })?;
        }
        ensure(naive_secure(p), || {
            format!("definitions fail on {:?}", p.alpha())
        })?;
    }
    Ok(())
}

fn unique_partner(ex: &Exhaustive) -> Check {
    for p in &ex.lagois {
        let g = derive_partner(p.left(), p.right(), p.alpha(), Direction::FromAlpha)
            .map_err(|e| e.to_string())?;
        ensure(g.entries().eq(p.gamma().entries()), || {
            format!("gamma differs for {:?}", p.alpha())
        })?;
        let a = derive_partner(p.right(), p.left(), p.gamma(), Direction::FromGamma)
            .map_err(|e| e.to_string())?;
        ensure(a.entries().eq(p.alpha().entries()), || {
            format!("alpha differs for {:?}", p.gamma())
        })?;
    }
    Ok(())
}

fn round_trip_identities(ex: &Exhaustive) -> Check {
    let reference = workspace("college_university.lag").connections["cu"].clone();
    for p in ex.lagois.iter().chain([&reference]) {
        let r = roundtrip_infimum_check(p).map_err(|e| e.to_string())?;
        ensure(r.all_passed(), || {
            format!("{:?}", r.failures().collect::<Vec<_>>())
        })?;
    }
    Ok(())
}

fn typing_soundness() -> Check {
    let ws = workspace("college_university.lag");
    let c = &ws.systems["roundtrip"].config;
    let prog = &ws.programs["roundtrip"];
    let t = type_program(c, prog).map_err(|e| e.to_string())?;
    let shown = t.display(c).to_string();
    ensure(shown == "⟨Faculty, UnivFac⟩", || shown.clone())?;
    let opts = NiOptions {
        trials: 1000,
        seed: 42,
        ..NiOptions::default()
    };
    let levels = adversary_pairs(&c.connection).map_err(|e| e.to_string())?;
    for &adv in &levels {
        let r = ni_test(c, prog, adv, &opts).map_err(|e| e.to_string())?;
        ensure(r.passed() && r.trials == 1000, || {
            format!("{} violations", r.violations.len())
        })?;
    }
    let small = fixtures::small_system();
    let vars = small.domain(Side::Left).vars().len() + small.domain(Side::Right).vars().len();
    ensure(vars <= 4, || format!("{vars} variables"))?;
    for adv in adversary_pairs(&small.connection).map_err(|e| e.to_string())? {
        let r = ni_exhaustive(
            &small,
            &fixtures::small_program(),
            adv,
            &[0i64, 1],
            &NiOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        ensure(r.passed() && r.trials > 0, || {
            format!("{} violations", r.violations.len())
        })?;
    }
    Ok(())
}

fn leaky_probe() -> Check {
    let ws = workspace("college_university.lag");
    let c = &ws.systems["leaky"].config;
    let prog = &ws.programs["leak"];
    ensure(type_program(c, prog).is_err(), || "leak type checks".into())?;
    let l = c.lattice(Side::Left).class("Faculty").unwrap();
    let m = c.lattice(Side::Right).class("UnivFac").unwrap();
    let opts = NiOptions {
        trials: 100,
        seed: 1,
        unsafe_skip_typecheck: true,
        ..NiOptions::default()
    };
    let r =
        ni_test(c, prog, lagois::AdversaryLevel::new(l, m), &opts).map_err(|e| e.to_string())?;
    ensure(!r.passed(), || "no violation in 100 trials".into())
}

fn lemmas() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let systems = [
        fixtures::round_trip_system(),
        fixtures::small_system(),
        fixtures::leaky_system(),
    ];
    for i in 0..200 {
        let c = &systems[i % systems.len()];
        let len = rng.gen_range(0..10);
        let prog = random_program(c, len, &mut rng);
        well_formed(&prog, c).map_err(|e| format!("{e:?}"))?;
        let mut before = StorePair::zeroed(c);
        for side in [Side::Left, Side::Right] {
            for v in c.domain(side).vars() {
                before.side_mut(side).set(v, rng.gen_range(-100..100));
            }
        }
        let after = run(&before, &prog).map_err(|e| e.to_string())?;
        let written = prog.write_set();
        for side in [Side::Left, Side::Right] {
            ensure(before.side(side).vars().eq(after.side(side).vars()), || {
                format!("program {i}: domain changed")
            })?;
            for v in before.side(side).vars() {
                if !written.contains(&Var::new(side, v)) {
                    ensure(before.side(side).get(v) == after.side(side).get(v), || {
                        format!("program {i}: {side:?} {v} changed without being written")
                    })?;
                }
            }
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let ex = enumerate_pairs();
    let n_lagois = ex.lagois.len();
    let checks: Vec<(&str, Check)> = vec![
        (
            "college/university connection and budpoints",
            secure_pair_connection(),
        ),
        (
            "insecure return map flagged at Principal",
            insecure_return_map(),
        ),
        (
            "negotiated exchange audit finds Faculty to DeanS",
            exchange_audit(),
        ),
        ("Galois chains fail SC2 at m1", galois_not_lagois()),
        (
            "Lagois implies SC, PC, CC on all small pairs",
            lagois_implies_secure(&ex),
        ),
        ("partners derive each other", unique_partner(&ex)),
        ("round-trip identities", round_trip_identities(&ex)),
        ("typing and non-interference", typing_soundness()),
        ("leaky transfer detected when unchecked", leaky_probe()),
        ("domain preservation and frame", lemmas()),
    ];
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "\n{} connection pairs enumerated, {n_lagois} Lagois",
        ex.pairs
    );
    let mut failed = 0;
    for (i, (name, result)) in checks.iter().enumerate() {
        match result {
            Ok(()) => {
                let _ = writeln!(out, "PASS {:>2} {name}", i + 1);
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(out, "FAIL {:>2} {name}: {e}", i + 1);
            }
        }
    }
    drop(out);
    assert_eq!(failed, 0, "{failed} acceptance check(s) failed");
}
