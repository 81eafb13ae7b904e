use std::fmt;

/// Conditions evaluated on a connection pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    MonoAlpha,
    MonoGamma,
    Lc1,
    Lc2,
    Lc3,
    Lc4,
    Sc1,
    Sc2,
    Pc1,
    Pc2,
    Cc1,
    Cc2,
    Gc1,
    GiInj,
    GiSurj,
}

impl Condition {
    pub const ALL: [Condition; 15] = [
        Condition::MonoAlpha,
        Condition::MonoGamma,
        Condition::Lc1,
        Condition::Lc2,
        Condition::Lc3,
        Condition::Lc4,
        Condition::Sc1,
        Condition::Sc2,
        Condition::Pc1,
        Condition::Pc2,
        Condition::Cc1,
        Condition::Cc2,
        Condition::Gc1,
        Condition::GiInj,
        Condition::GiSurj,
    ];

    /// Conditions a secure bidirectional (Lagois) connection must satisfy.
    pub const LAGOIS_SUITE: [Condition; 12] = [
        Condition::MonoAlpha,
        Condition::MonoGamma,
        Condition::Lc1,
        Condition::Lc2,
        Condition::Lc3,
        Condition::Lc4,
        Condition::Sc1,
        Condition::Sc2,
        Condition::Pc1,
        Condition::Pc2,
        Condition::Cc1,
        Condition::Cc2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Condition::MonoAlpha => "MONO-alpha",
            Condition::MonoGamma => "MONO-gamma",
            Condition::Lc1 => "LC1",
            Condition::Lc2 => "LC2",
            Condition::Lc3 => "LC3",
            Condition::Lc4 => "LC4",
            Condition::Sc1 => "SC1",
            Condition::Sc2 => "SC2",
            Condition::Pc1 => "PC1",
            Condition::Pc2 => "PC2",
            Condition::Cc1 => "CC1",
            Condition::Cc2 => "CC2",
            Condition::Gc1 => "GC1",
            Condition::GiInj => "GI-inj",
            Condition::GiSurj => "GI-surj",
        }
    }

    pub fn from_id(id: &str) -> Option<Condition> {
        Condition::ALL.into_iter().find(|c| c.id() == id)
    }

    pub fn statement(self) -> &'static str {
        match self {
            Condition::MonoAlpha => "a ⊑ b ⇒ α(a) ⊑ α(b)",
            Condition::MonoGamma => "a ⊑ b ⇒ γ(a) ⊑ γ(b)",
            Condition::Lc1 | Condition::Sc1 => "l ⊑ γ(α(l))",
            Condition::Lc2 | Condition::Sc2 => "m ⊑ α(γ(m))",
            Condition::Lc3 => "α(γ(α(l))) = α(l)",
            Condition::Lc4 => "γ(α(γ(m))) = γ(m)",
            Condition::Pc1 => "α(l) = ⊔{m | γ(m) = l} for l ∈ γ[M]",
            Condition::Pc2 => "γ(m) = ⊔{l | α(l) = m} for m ∈ α[L]",
            Condition::Cc1 => "γ∘α is a closure operator",
            Condition::Cc2 => "α∘γ is a closure operator",
            Condition::Gc1 => "α(l) ⊑ m ⟺ l ⊑ γ(m)",
            Condition::GiInj => "γ injective",
            Condition::GiSurj => "α surjective",
        }
    }

    /// Layout of the element tuples in a witness for this condition.
    pub fn witness_shape(self) -> &'static str {
        match self {
            Condition::MonoAlpha => "(a, b, α(a), α(b))",
            Condition::MonoGamma => "(a, b, γ(a), γ(b))",
            Condition::Lc1 | Condition::Sc1 => "(l, α(l), γ(α(l)))",
            Condition::Lc2 | Condition::Sc2 => "(m, γ(m), α(γ(m)))",
            Condition::Lc3 => "(l, α(l), α(γ(α(l))))",
            Condition::Lc4 => "(m, γ(m), γ(α(γ(m))))",
            Condition::Pc1 => "(l, α(l), ⊔ γ-preimage)",
            Condition::Pc2 => "(m, γ(m), ⊔ α-preimage)",
            Condition::Cc1 | Condition::Cc2 => "failing points with a note",
            Condition::Gc1 => "(l, m, α(l), γ(m))",
            Condition::GiInj => "(m1, m2, γ(m1))",
            Condition::GiSurj => "(m)",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Identities relating round trips to meets of budpoints, checked on a
/// Lagois connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoundTripCondition {
    /// `γ(α(l)) = ⊓{l* ∈ γ[M] | l ⊑ l*}`
    InfimumLeft,
    /// `α(γ(m)) = ⊓{m* ∈ α[L] | m ⊑ m*}`
    InfimumRight,
    /// `α⁻¹(m)` has largest member `γ(m)` for `m ∈ α[L]`
    LargestPreimageAlpha,
    /// `γ⁻¹(l)` has largest member `α(l)` for `l ∈ γ[M]`
    LargestPreimageGamma,
    /// `α` restricted to `γ[M]` is an order isomorphism onto `α[L]`
    ImageIsomorphism,
    /// meets of subsets of `γ[M]` agree with meets in `L` (and dually)
    MeetAgreement,
    /// the join of `A ⊆ γ[M]` within `γ[M]` is `γ(α(⊔A))` (and dually)
    JoinClosure,
}

impl RoundTripCondition {
    pub const ALL: [RoundTripCondition; 7] = [
        RoundTripCondition::InfimumLeft,
        RoundTripCondition::InfimumRight,
        RoundTripCondition::LargestPreimageAlpha,
        RoundTripCondition::LargestPreimageGamma,
        RoundTripCondition::ImageIsomorphism,
        RoundTripCondition::MeetAgreement,
        RoundTripCondition::JoinClosure,
    ];

    pub fn id(self) -> &'static str {
        match self {
            RoundTripCondition::InfimumLeft => "RT-INF-L",
            RoundTripCondition::InfimumRight => "RT-INF-M",
            RoundTripCondition::LargestPreimageAlpha => "PRE-alpha",
            RoundTripCondition::LargestPreimageGamma => "PRE-gamma",
            RoundTripCondition::ImageIsomorphism => "ISO",
            RoundTripCondition::MeetAgreement => "MEET",
            RoundTripCondition::JoinClosure => "JOIN",
        }
    }
}

impl fmt::Display for RoundTripCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A counterexample: a tuple of class names, optionally with a note.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Witness {
    pub elements: Vec<String>,
    pub note: Option<String>,
}

impl Witness {
    pub fn new<I, S>(elements: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Witness {
            elements: elements.into_iter().map(Into::into).collect(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.elements.join(", "))?;
        if let Some(note) = &self.note {
            write!(f, " {note}")?;
        }
        Ok(())
    }
}

/// Outcome of one condition. Passes iff it carries no witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry<C> {
    pub condition: C,
    pub witnesses: Vec<Witness>,
}

impl<C> Entry<C> {
    pub fn new(condition: C, witnesses: Vec<Witness>) -> Self {
        Entry {
            condition,
            witnesses,
        }
    }

    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// The least counterexample, in class-name order.
    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report<C> {
    entries: Vec<Entry<C>>,
}

pub type VerificationReport = Report<Condition>;

impl<C: Copy + PartialEq> Report<C> {
    pub fn new(entries: Vec<Entry<C>>) -> Self {
        Report { entries }
    }

    pub fn entries(&self) -> &[Entry<C>] {
        &self.entries
    }

    pub fn get(&self, condition: C) -> Option<&Entry<C>> {
        self.entries.iter().find(|e| e.condition == condition)
    }

    pub fn passed(&self, condition: C) -> bool {
        self.get(condition).is_some_and(Entry::passed)
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(Entry::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry<C>> {
        self.entries.iter().filter(|e| !e.passed())
    }

    pub fn extend(&mut self, other: Report<C>) {
        self.entries.extend(other.entries);
    }
}

impl Report<Condition> {
    /// MONO and LC1–LC4 all pass.
    pub fn is_lagois(&self) -> bool {
        [
            Condition::MonoAlpha,
            Condition::MonoGamma,
            Condition::Lc1,
            Condition::Lc2,
            Condition::Lc3,
            Condition::Lc4,
        ]
        .into_iter()
        .all(|c| self.passed(c))
    }

    pub fn failed_conditions(&self) -> Vec<Condition> {
        self.failures().map(|e| e.condition).collect()
    }
}
