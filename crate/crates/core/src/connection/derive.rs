use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::checks::{check_lagois, check_monotone};
use super::report::{Condition, Witness};
use super::{ClassMap, ConnectionError, ConnectionPair};
use crate::lattice::FiniteLattice;

/// Which half of a connection the given map is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// The map is α; derive γ.
    FromAlpha,
    /// The map is γ; derive α.
    FromGamma,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("map `{map}` is not monotone: {witness}")]
    NotMonotone { map: String, witness: Witness },
    #[error("map `{0}` has an empty image")]
    EmptyImage(String),
    #[error("`{class}` has no upper budpoint in the image of `{map}`")]
    NoUpperBudpoint { map: String, class: String },
    #[error("derived partner `{}` does not complete a Lagois connection ({} failed)",
        candidate.id(),
        failed.iter().map(|c| c.id()).collect::<Vec<_>>().join(", "))]
    NotLagois {
        candidate: ClassMap,
        failed: Vec<Condition>,
    },
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}

/// Computes the unique Lagois partner of `f: source → target`.
///
/// For every `b` in the target lattice the partner sends `b` to
/// `⊔ f⁻¹[⊓{b* ∈ f[source] | b ⊑ b*}]`: the join of the preimage of the
/// least upper budpoint above `b`. The candidate is then re-verified; if
/// the pair fails any of MONO/LC1–LC4 the candidate is returned inside
/// [`DeriveError::NotLagois`].
///
/// The derived map is total on the target lattice.
pub fn derive_partner(
    source: &Arc<FiniteLattice>,
    target: &Arc<FiniteLattice>,
    f: &ClassMap,
    direction: Direction,
) -> Result<ClassMap, DeriveError> {
    let mono = check_monotone(Condition::MonoAlpha, f, source, target);
    if let Some(w) = mono.first_witness() {
        return Err(DeriveError::NotMonotone {
            map: f.id().to_string(),
            witness: w.clone(),
        });
    }
    let image = f.image();
    if image.is_empty() {
        return Err(DeriveError::EmptyImage(f.id().to_string()));
    }

    let mut entries = BTreeMap::new();
    for b in target.classes() {
        let uppers: Vec<_> = image
            .iter()
            .copied()
            .filter(|&bs| target.leq(b, bs))
            .collect();
        if uppers.is_empty() {
            return Err(DeriveError::NoUpperBudpoint {
                map: f.id().to_string(),
                class: target.name(b).to_string(),
            });
        }
        let bud = target.meet_all(uppers);
        entries.insert(b, source.join_all(f.preimage(bud)));
    }
    let partner_id = format!("{}_partner", f.id());
    let candidate = ClassMap::new(&partner_id, target, source, entries);

    let pair = match direction {
        Direction::FromAlpha => {
            ConnectionPair::new(source.clone(), target.clone(), f.clone(), candidate.clone())?
        }
        Direction::FromGamma => {
            ConnectionPair::new(target.clone(), source.clone(), candidate.clone(), f.clone())?
        }
    };
    let report = check_lagois(&pair);
    if !report.is_lagois() {
        return Err(DeriveError::NotLagois {
            candidate,
            failed: report.failed_conditions(),
        });
    }
    Ok(candidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn reference_alpha_determines_gamma() {
        let p = fixtures::college_university();
        let g = derive_partner(p.left(), p.right(), p.alpha(), Direction::FromAlpha).unwrap();
        assert_eq!(
            g.entries().collect::<Vec<_>>(),
            p.gamma().entries().collect::<Vec<_>>()
        );
        let a = derive_partner(p.right(), p.left(), p.gamma(), Direction::FromGamma).unwrap();
        assert_eq!(
            a.entries().collect::<Vec<_>>(),
            p.alpha().entries().collect::<Vec<_>>()
        );
    }

    #[test]
    fn identity_determines_identity() {
        let c: Arc<FiniteLattice> = fixtures::college().into();
        let id = ClassMap::identity("id", &c);
        let g = derive_partner(&c, &c, &id, Direction::FromAlpha).unwrap();
        assert!(g.entries().all(|(k, v)| k == v));
        assert_eq!(g.len(), c.len());
    }

    #[test]
    fn chains_alpha_completes_to_a_lagois_partner() {
        // l0 ↦ m0, l1 ↦ m2; upper budpoint of m1 is m2, whose preimage is {l1}
        let p = fixtures::galois_chains();
        let g = derive_partner(p.left(), p.right(), p.alpha(), Direction::FromAlpha).unwrap();
        let (l, m) = (p.left(), p.right());
        let got: Vec<(&str, &str)> = g.entries().map(|(k, v)| (m.name(k), l.name(v))).collect();
        assert_eq!(got, [("m0", "l0"), ("m1", "l1"), ("m2", "l1")]);
    }

    #[test]
    fn diamond_onto_chain_cannot_be_completed() {
        let d: Arc<FiniteLattice> = Arc::new(
            FiniteLattice::new(
                "D",
                ["bot", "p", "q", "top"],
                [("bot", "p"), ("bot", "q"), ("p", "top"), ("q", "top")],
            )
            .unwrap(),
        );
        let k: Arc<FiniteLattice> = Arc::new(
            FiniteLattice::new("K", ["k0", "k1", "k2"], [("k0", "k1"), ("k1", "k2")]).unwrap(),
        );
        let f = ClassMap::from_names(
            "f",
            &d,
            &k,
            [("bot", "k0"), ("p", "k1"), ("q", "k1"), ("top", "k2")],
        )
        .unwrap();
        match derive_partner(&d, &k, &f, Direction::FromAlpha) {
            Err(DeriveError::NotLagois { failed, candidate }) => {
                assert!(failed.contains(&Condition::Lc3));
                let k1 = k.class("k1").unwrap();
                assert_eq!(d.name(candidate.get(k1).unwrap()), "top");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_upper_budpoint() {
        let c: Arc<FiniteLattice> = fixtures::college().into();
        let u: Arc<FiniteLattice> = fixtures::university().into();
        let f = ClassMap::from_names("f", &c, &u, [("Faculty", "UnivFac")]).unwrap();
        match derive_partner(&c, &u, &f, Direction::FromAlpha) {
            Err(DeriveError::NoUpperBudpoint { class, .. }) => assert_eq!(class, "Chancellor"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
