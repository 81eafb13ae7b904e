//! Exhaustive condition checks. Every check scans its whole quantifier
//! domain and records every counterexample in class-name order; nothing
//! short-circuits.

use super::report::{Condition, Entry, Report, VerificationReport, Witness};
use super::{ClassMap, ConnectionPair};
use crate::lattice::{Class, FiniteLattice};

/// One direction of a pair: `f: src → dst` followed by `g: dst → src`.
/// `(α, γ)` gives the L-side conditions, `(γ, α)` the M-side ones.
struct Orient<'a> {
    src: &'a FiniteLattice,
    dst: &'a FiniteLattice,
    f: &'a ClassMap,
    g: &'a ClassMap,
}

impl<'a> Orient<'a> {
    fn forward(p: &'a ConnectionPair) -> Self {
        Orient {
            src: &p.left,
            dst: &p.right,
            f: &p.alpha,
            g: &p.gamma,
        }
    }

    fn backward(p: &'a ConnectionPair) -> Self {
        Orient {
            src: &p.right,
            dst: &p.left,
            f: &p.gamma,
            g: &p.alpha,
        }
    }

    fn f(&self, x: Class) -> Class {
        self.f.get(x).expect("argument in the recorded domain")
    }

    fn g(&self, y: Class) -> Class {
        self.g
            .get(y)
            .expect("compositions are checked when the pair is built")
    }

    fn closure(&self, x: Class) -> Class {
        self.g(self.f(x))
    }

    fn s(&self, c: Class) -> String {
        self.src.name(c).to_string()
    }

    fn d(&self, c: Class) -> String {
        self.dst.name(c).to_string()
    }

    /// `x ⊑ g(f(x))` for every `x ∈ dom f`.
    fn extensive(&self) -> Vec<Witness> {
        self.f
            .domain()
            .filter(|&x| !self.src.leq(x, self.closure(x)))
            .map(|x| Witness::new([self.s(x), self.d(self.f(x)), self.s(self.closure(x))]))
            .collect()
    }

    /// `f(g(f(x))) = f(x)` for every `x ∈ dom f`.
    fn absorbing(&self) -> Vec<Witness> {
        self.f
            .domain()
            .filter(|&x| self.f(self.closure(x)) != self.f(x))
            .map(|x| {
                Witness::new([
                    self.s(x),
                    self.d(self.f(x)),
                    self.d(self.f(self.closure(x))),
                ])
            })
            .collect()
    }

    /// `f(x) = ⊔{y ∈ dom g | g(y) = x}` for every `x ∈ g[dst]`.
    fn precise(&self) -> Vec<Witness> {
        let mut out = Vec::new();
        for x in self.g.image() {
            let pre: Vec<Class> = self.g.preimage(x).collect();
            let Some(fx) = self.f.get(x) else {
                out.push(Witness::new([self.s(x)]).with_note("outside the transfer domain"));
                continue;
            };
            if pre.is_empty() {
                out.push(Witness::new([self.s(x), self.d(fx)]).with_note("empty preimage"));
                continue;
            }
            let sup = self.dst.join_all(pre);
            if sup != fx {
                out.push(Witness::new([self.s(x), self.d(fx), self.d(sup)]));
            }
        }
        out
    }

    /// `g∘f` is extensive, idempotent and order-preserving on `dom f`.
    fn closure_operator(&self) -> Vec<Witness> {
        let mut out = Vec::new();
        let dom: Vec<Class> = self.f.domain().collect();
        for &x in &dom {
            let once = self.closure(x);
            if !self.src.leq(x, once) {
                out.push(Witness::new([self.s(x), self.s(once)]).with_note("not extensive"));
            }
            match self.f.get(once) {
                Some(_) => {
                    let twice = self.closure(once);
                    if twice != once {
                        out.push(
                            Witness::new([self.s(x), self.s(once), self.s(twice)])
                                .with_note("not idempotent"),
                        );
                    }
                }
                None => out.push(
                    Witness::new([self.s(x), self.s(once)]).with_note("round trip leaves domain"),
                ),
            }
        }
        for &a in &dom {
            for &b in &dom {
                if a != b && self.src.leq(a, b) && !self.src.leq(self.closure(a), self.closure(b)) {
                    out.push(
                        Witness::new([
                            self.s(a),
                            self.s(b),
                            self.s(self.closure(a)),
                            self.s(self.closure(b)),
                        ])
                        .with_note("not order-preserving"),
                    );
                }
            }
        }
        out
    }
}

fn monotone_witnesses(f: &ClassMap, src: &FiniteLattice, dst: &FiniteLattice) -> Vec<Witness> {
    let mut out = Vec::new();
    for (a, fa) in f.entries() {
        for (b, fb) in f.entries() {
            if a != b && src.leq(a, b) && !dst.leq(fa, fb) {
                out.push(Witness::new([
                    src.name(a),
                    src.name(b),
                    dst.name(fa),
                    dst.name(fb),
                ]));
            }
        }
    }
    out
}

/// `a ⊑ b ⇒ f(a) ⊑ f(b)` over the recorded domain of `f`.
pub fn check_monotone(
    condition: Condition,
    f: &ClassMap,
    source: &FiniteLattice,
    target: &FiniteLattice,
) -> Entry<Condition> {
    Entry::new(condition, monotone_witnesses(f, source, target))
}

fn mono_entries(p: &ConnectionPair) -> Vec<Entry<Condition>> {
    vec![
        check_monotone(Condition::MonoAlpha, &p.alpha, &p.left, &p.right),
        check_monotone(Condition::MonoGamma, &p.gamma, &p.right, &p.left),
    ]
}

/// MONO-α, MONO-γ and LC1–LC4.
pub fn check_lagois(p: &ConnectionPair) -> VerificationReport {
    let (fw, bw) = (Orient::forward(p), Orient::backward(p));
    let mut entries = mono_entries(p);
    entries.push(Entry::new(Condition::Lc1, fw.extensive()));
    entries.push(Entry::new(Condition::Lc2, bw.extensive()));
    entries.push(Entry::new(Condition::Lc3, fw.absorbing()));
    entries.push(Entry::new(Condition::Lc4, bw.absorbing()));
    Report::new(entries)
}

/// SC1 and SC2: no round trip lowers a class.
pub fn check_security(p: &ConnectionPair) -> VerificationReport {
    Report::new(vec![
        Entry::new(Condition::Sc1, Orient::forward(p).extensive()),
        Entry::new(Condition::Sc2, Orient::backward(p).extensive()),
    ])
}

/// PC1 and PC2: least privilege escalation.
pub fn check_precision(p: &ConnectionPair) -> VerificationReport {
    Report::new(vec![
        Entry::new(Condition::Pc1, Orient::forward(p).precise()),
        Entry::new(Condition::Pc2, Orient::backward(p).precise()),
    ])
}

/// CC1 and CC2: both round trips reach their fixed point in one step.
pub fn check_convergence(p: &ConnectionPair) -> VerificationReport {
    Report::new(vec![
        Entry::new(Condition::Cc1, Orient::forward(p).closure_operator()),
        Entry::new(Condition::Cc2, Orient::backward(p).closure_operator()),
    ])
}

/// GC1 over `dom α × dom γ`.
pub fn check_galois(p: &ConnectionPair) -> VerificationReport {
    let mut out = Vec::new();
    for (l, al) in p.alpha.entries() {
        for (m, gm) in p.gamma.entries() {
            let lhs = p.right.leq(al, m);
            let rhs = p.left.leq(l, gm);
            if lhs != rhs {
                let note = if lhs {
                    "α(l) ⊑ m but l ⋢ γ(m)"
                } else {
                    "l ⊑ γ(m) but α(l) ⋢ m"
                };
                out.push(
                    Witness::new([
                        p.left.name(l),
                        p.right.name(m),
                        p.right.name(al),
                        p.left.name(gm),
                    ])
                    .with_note(note),
                );
            }
        }
    }
    Report::new(vec![Entry::new(Condition::Gc1, out)])
}

/// GI-inj (γ injective on its domain) and GI-surj (α onto all of M).
pub fn check_galois_insertion(p: &ConnectionPair) -> VerificationReport {
    let mut inj = Vec::new();
    for (m1, g1) in p.gamma.entries() {
        for (m2, g2) in p.gamma.entries() {
            if m1 < m2 && g1 == g2 {
                inj.push(Witness::new([
                    p.right.name(m1),
                    p.right.name(m2),
                    p.left.name(g1),
                ]));
            }
        }
    }
    let image = p.alpha.image();
    let surj = p
        .right
        .classes()
        .filter(|m| !image.contains(m))
        .map(|m| Witness::new([p.right.name(m)]))
        .collect();
    Report::new(vec![
        Entry::new(Condition::GiInj, inj),
        Entry::new(Condition::GiSurj, surj),
    ])
}

/// Every condition, in [`Condition::ALL`] order.
pub fn verify_all(p: &ConnectionPair) -> VerificationReport {
    let mut report = check_lagois(p);
    report.extend(check_security(p));
    report.extend(check_precision(p));
    report.extend(check_convergence(p));
    report.extend(check_galois(p));
    report.extend(check_galois_insertion(p));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn reference_pair_is_lagois() {
        let p = fixtures::college_university();
        let r = verify_all(&p);
        for c in Condition::LAGOIS_SUITE {
            assert!(r.passed(c), "{c} failed: {:?}", r.get(c));
        }
        assert!(!r.passed(Condition::Gc1));
        let ids: Vec<_> = r.entries().iter().map(|e| e.condition).collect();
        assert_eq!(ids, Condition::ALL.to_vec());
    }

    #[test]
    fn reference_pair_galois_witness() {
        let p = fixtures::college_university();
        let r = check_galois(&p);
        let w = r.get(Condition::Gc1).unwrap().first_witness().unwrap();
        // hand-checked: α(top1) = top2 ⋢ Chancellor while top1 ⊑ γ(Chancellor) = top1
        assert_eq!(w.elements, ["top1", "Chancellor", "top2", "top1"]);
    }

    #[test]
    fn insecure_gamma_fails_lc1() {
        let p = fixtures::college_university_insecure();
        let r = verify_all(&p);
        assert!(r.passed(Condition::MonoAlpha));
        assert!(r.passed(Condition::MonoGamma));
        for c in [Condition::Lc1, Condition::Sc1] {
            let e = r.get(c).unwrap();
            assert!(e
                .witnesses
                .iter()
                .any(|w| w.elements == ["Principal", "DeanColleges", "Faculty"]));
        }
    }

    #[test]
    fn non_monotone_map_reported() {
        let c = fixtures::college();
        let u = fixtures::university();
        let f = ClassMap::from_names(
            "bad",
            &c,
            &u,
            [("Student", "DeanColleges"), ("Faculty", "UnivFac")],
        )
        .unwrap();
        let e = check_monotone(Condition::MonoAlpha, &f, &c, &u);
        assert_eq!(
            e.first_witness().unwrap().elements,
            ["Student", "Faculty", "DeanColleges", "UnivFac"]
        );
        let id = ClassMap::identity("id", &c);
        assert!(check_monotone(Condition::MonoAlpha, &id, &c, &c).passed());
    }

    #[test]
    fn galois_but_not_secure() {
        let p = fixtures::galois_chains();
        let r = verify_all(&p);
        assert!(r.passed(Condition::Gc1));
        let sc2 = r.get(Condition::Sc2).unwrap();
        assert_eq!(sc2.witnesses, vec![Witness::new(["m1", "l0", "m0"])]);
        assert_eq!(
            r.get(Condition::GiSurj).unwrap().witnesses,
            vec![Witness::new(["m1"])]
        );
    }

    #[test]
    fn identity_pair_passes_everything() {
        let p = ConnectionPair::identity(fixtures::college().into());
        assert!(verify_all(&p).all_passed());
    }

    #[test]
    fn precision_preimage_joins() {
        let p = fixtures::college_university();
        let (c, u) = (p.left(), p.right());
        let pre_top: Vec<_> = p.gamma().preimage(c.class("top1").unwrap()).collect();
        assert_eq!(u.join_all(pre_top), u.class("top2").unwrap());
        let pre_dc: Vec<_> = p
            .alpha()
            .preimage(u.class("DeanColleges").unwrap())
            .collect();
        assert_eq!(c.join_all(pre_dc), c.class("Principal").unwrap());
        assert!(check_precision(&p).all_passed());
    }

    #[test]
    fn escalating_pair_is_extensive_but_not_convergent() {
        let p = fixtures::escalating();
        let r = verify_all(&p);
        assert!(r.passed(Condition::Lc1));
        assert!(!r.passed(Condition::Cc1));
    }
}
