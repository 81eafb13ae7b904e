//! Connection checks against direct evaluation over every monotone pair of
//! small lattices.

use std::sync::Arc;

use lagois::enumerate::{lattices_up_to, monotone_maps};
use lagois::{
    audit_mou, check_galois, check_galois_insertion, derive_partner, equiv_classes, verify_all,
    ClassMap, Condition, ConnectionPair, Direction, FiniteLattice,
};

/// Every (α, γ) over every ordered pair of lattices with at most `n`
/// elements.
fn all_pairs(n: usize) -> Vec<ConnectionPair> {
    let lattices: Vec<Arc<FiniteLattice>> = lattices_up_to(n).into_iter().map(Arc::new).collect();
    let mut out = Vec::new();
    for l in &lattices {
        for m in &lattices {
            let alphas = monotone_maps("alpha", l, m);
            let gammas = monotone_maps("gamma", m, l);
            for a in &alphas {
                for g in &gammas {
                    out.push(
                        ConnectionPair::new(l.clone(), m.clone(), a.clone(), g.clone()).unwrap(),
                    );
                }
            }
        }
    }
    out
}

fn naive_lagois(p: &ConnectionPair) -> bool {
    let (l, m) = (p.left(), p.right());
    let a = |x| p.up(x).unwrap();
    let g = |y| p.down(y).unwrap();
    l.classes().all(|x| l.leq(x, g(a(x))) && a(g(a(x))) == a(x))
        && m.classes().all(|y| m.leq(y, a(g(y))) && g(a(g(y))) == g(y))
}

fn naive_galois(p: &ConnectionPair) -> bool {
    let (l, m) = (p.left(), p.right());
    l.classes().all(|x| {
        m.classes()
            .all(|y| m.leq(p.up(x).unwrap(), y) == l.leq(x, p.down(y).unwrap()))
    })
}

#[test]
fn lagois_and_galois_match_direct_evaluation() {
    for p in all_pairs(4) {
        let r = verify_all(&p);
        assert_eq!(r.is_lagois(), naive_lagois(&p));
        assert_eq!(r.passed(Condition::Gc1), naive_galois(&p));
        for e in r.entries() {
            assert_eq!(e.passed(), e.witnesses.is_empty());
        }
    }
}

#[test]
fn galois_with_a_moving_point_fails_sc2_there() {
    for p in all_pairs(4) {
        if !check_galois(&p).passed(Condition::Gc1) {
            continue;
        }
        let r = verify_all(&p);
        for m in p.right().classes() {
            if p.round_trip_right(m) != Some(m) {
                let sc2 = r.get(Condition::Sc2).unwrap();
                // an element strictly below m is reached, so SC2 fails at m
                assert!(sc2
                    .witnesses
                    .iter()
                    .any(|w| w.elements[0] == p.right().name(m)));
            }
        }
    }
}

#[test]
fn galois_insertions_are_lagois() {
    for p in all_pairs(4) {
        let g = check_galois(&p);
        let gi = check_galois_insertion(&p);
        if g.all_passed() && gi.all_passed() {
            assert!(verify_all(&p).is_lagois());
        }
    }
}

#[test]
fn partner_is_unique_and_round_trips() {
    let lattices: Vec<Arc<FiniteLattice>> = lattices_up_to(4).into_iter().map(Arc::new).collect();
    for l in &lattices {
        for m in &lattices {
            let gammas = monotone_maps("gamma", m, l);
            for a in monotone_maps("alpha", l, m) {
                let completing: Vec<&ClassMap> = gammas
                    .iter()
                    .filter(|g| {
                        naive_lagois(
                            &ConnectionPair::new(l.clone(), m.clone(), a.clone(), (*g).clone())
                                .unwrap(),
                        )
                    })
                    .collect();
                assert!(completing.len() <= 1);
                match derive_partner(l, m, &a, Direction::FromAlpha) {
                    Ok(g) => {
                        assert_eq!(completing.len(), 1);
                        assert!(g.entries().eq(completing[0].entries()));
                        let back = derive_partner(m, l, &g, Direction::FromGamma).unwrap();
                        assert!(back.entries().eq(a.entries()));
                    }
                    Err(_) => assert!(completing.is_empty()),
                }
            }
        }
    }
}

#[test]
fn budpoint_is_block_maximum_and_edges_are_clean() {
    for p in all_pairs(4).into_iter().filter(naive_lagois) {
        let part = equiv_classes(&p).unwrap();
        for (blocks, lat) in [(&part.left, p.left()), (&part.right, p.right())] {
            for b in blocks {
                let rep = b.representative.unwrap();
                assert!(b.members.contains(&rep));
                assert!(b.members.iter().all(|&x| lat.leq(x, rep)));
            }
        }
        assert!(audit_mou(&p.mou_edges()).is_empty());
    }
}
