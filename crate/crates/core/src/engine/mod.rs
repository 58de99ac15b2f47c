//! Checking and transformation rules: turn a claim into a primitive
//! derivation whose leaves are independent proof obligations.

mod check;
pub mod validate;

use crate::meta::{MetaError, Obligation};
use crate::surface::{Span, Theorem};
use std::fmt;

pub use check::{check_claim, check_theorem, expand_for_matching, root_obligation, transform_step};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Follow each proof-local `DEFINE` with an implicit `USE DEF`.
    pub local_defs_usable: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            local_defs_usable: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Obvious,
    Omitted,
    By,
    Qed,
    NonQed,
    UseDefs,
    HideDefs,
    Define,
    Use0,
    Use1,
    Hide0,
    Hide1,
    Take0,
    Take1,
    Take2,
    Witness0,
    Witness1,
    Witness2,
    Have,
    Assert1,
    Assert2,
    Case,
    Suffices1,
    Suffices2,
    Pick,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Obvious => "OBVIOUS",
            Rule::Omitted => "OMITTED",
            Rule::By => "BY",
            Rule::Qed => "QED",
            Rule::NonQed => "non-QED",
            Rule::UseDefs => "USE DEFS",
            Rule::HideDefs => "HIDE DEFS",
            Rule::Define => "DEFINE",
            Rule::Use0 => "USE0",
            Rule::Use1 => "USE1",
            Rule::Hide0 => "HIDE0",
            Rule::Hide1 => "HIDE1",
            Rule::Take0 => "TAKE0",
            Rule::Take1 => "TAKE1",
            Rule::Take2 => "TAKE2",
            Rule::Witness0 => "WITNESS0",
            Rule::Witness1 => "WITNESS1",
            Rule::Witness2 => "WITNESS2",
            Rule::Have => "HAVE",
            Rule::Assert1 => "ASSERT1",
            Rule::Assert2 => "ASSERT2",
            Rule::Case => "CASE",
            Rule::Suffices1 => "SUFFICES1",
            Rule::Suffices2 => "SUFFICES2",
            Rule::Pick => "PICK",
        }
    }

    pub fn is_checking(self) -> bool {
        matches!(
            self,
            Rule::Obvious | Rule::Omitted | Rule::By | Rule::Qed | Rule::NonQed
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Judgement {
    Claim(Obligation),
    Transformation { input: Obligation, output: Obligation },
}

impl Judgement {
    /// The claimed obligation, or the input of a transformation.
    pub fn input(&self) -> &Obligation {
        match self {
            Judgement::Claim(o) => o,
            Judgement::Transformation { input, .. } => input,
        }
    }

    pub fn output(&self) -> Option<&Obligation> {
        match self {
            Judgement::Claim(_) => None,
            Judgement::Transformation { output, .. } => Some(output),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// Step path such as `<1>1.<2>2.<3>1.<4>1`; empty for the theorem itself.
    pub path: String,
    pub span: Span,
    /// Set for steps the checker inserted itself.
    pub synthetic: bool,
}

impl Provenance {
    pub fn display_path(&self) -> &str {
        if self.path.is_empty() {
            "THEOREM"
        } else {
            &self.path
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LeafKind {
    ObviousGoal,
    ByGoal,
    UseFactSide,
    TakeSubsetSide,
    WitnessSubsetSide,
    WitnessMembershipSide,
    HaveSide,
    PickExistence,
}

impl LeafKind {
    pub fn name(self) -> &'static str {
        match self {
            LeafKind::ObviousGoal => "obvious-goal",
            LeafKind::ByGoal => "by-goal",
            LeafKind::UseFactSide => "use-fact-side",
            LeafKind::TakeSubsetSide => "take-subset-side",
            LeafKind::WitnessSubsetSide => "witness-subset-side",
            LeafKind::WitnessMembershipSide => "witness-membership-side",
            LeafKind::HaveSide => "have-side",
            LeafKind::PickExistence => "pick-existence",
        }
    }

    pub fn from_name(s: &str) -> Option<LeafKind> {
        use LeafKind::*;
        [
            ObviousGoal,
            ByGoal,
            UseFactSide,
            TakeSubsetSide,
            WitnessSubsetSide,
            WitnessMembershipSide,
            HaveSide,
            PickExistence,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

impl fmt::Display for LeafKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafObligation {
    pub obligation: Obligation,
    pub origin: Provenance,
    pub kind: LeafKind,
    /// The nearest enclosing leaf proof is `OMITTED`; not sent to a prover.
    pub omitted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Premise {
    Derivation(Derivation),
    Leaf(LeafObligation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub judgement: Judgement,
    pub provenance: Provenance,
    pub premises: Vec<Premise>,
}

impl Derivation {
    pub fn subderivations(&self) -> impl Iterator<Item = &Derivation> {
        self.premises.iter().filter_map(|p| match p {
            Premise::Derivation(d) => Some(d),
            Premise::Leaf(_) => None,
        })
    }

    /// Depth-first walk over every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Derivation)) {
        f(self);
        for d in self.subderivations() {
            d.walk(f);
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

/// Leaf obligations in left-to-right order.
pub fn leaf_obligations(d: &Derivation) -> Vec<LeafObligation> {
    let mut out = Vec::new();
    collect_leaves(d, &mut out);
    out
}

fn collect_leaves(d: &Derivation, out: &mut Vec<LeafObligation>) {
    for p in &d.premises {
        match p {
            Premise::Derivation(sub) => collect_leaves(sub, out),
            Premise::Leaf(l) => out.push(l.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// No rule matches the step against its input obligation.
    Meaningless,
    DuplicateName,
    UnknownFact,
    Unbound,
    Meta,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Meaningless => "meaningless",
            ErrorKind::DuplicateName => "duplicate-name",
            ErrorKind::UnknownFact => "unknown-fact",
            ErrorKind::Unbound => "unbound",
            ErrorKind::Meta => "meta",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}: {}: {message}", .provenance.display_path(), .kind.name())]
pub struct EngineError {
    pub provenance: Provenance,
    pub kind: ErrorKind,
    pub message: String,
    /// The obligation the offending step was applied to.
    pub input: Box<Obligation>,
}

impl EngineError {
    pub fn from_meta(provenance: Provenance, input: Obligation, e: MetaError) -> Self {
        EngineError {
            provenance,
            kind: ErrorKind::Meta,
            message: e.to_string(),
            input: Box::new(input),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub provenance: Provenance,
    pub message: String,
}

/// Outcome of checking a whole theorem. The derivation is partial when
/// `errors` is non-empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub root: Obligation,
    pub derivation: Derivation,
    pub errors: Vec<EngineError>,
    pub warnings: Vec<Warning>,
}

impl CheckResult {
    pub fn is_meaningful(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn leaves(&self) -> Vec<LeafObligation> {
        leaf_obligations(&self.derivation)
    }

    pub fn is_complete(&self) -> bool {
        self.leaves().iter().all(|l| !l.omitted)
    }
}

/// Convenience: check a parsed theorem with the given configuration.
pub fn check(th: &Theorem, config: &Config) -> CheckResult {
    check_theorem(th, config)
}
