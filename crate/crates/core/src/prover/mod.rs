//! Tableau prover for first-order logic with equality and set constructs.

mod cc;
mod rules;
mod search;
pub mod term;
mod trace;

pub use cc::Congruence;
pub use rules::{SetRule, Signed};
pub use trace::{Step, Trace};

use crate::meta::{expand_all, filter, obligation_to_expr, Assumption, Obligation};
use crate::surface::{free_identifiers, pp_expr, Expr};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::{Duration, Instant};
use term::{from_expr, Term};

/// Prover-facing form of a filtered, definition-expanded obligation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub signature: Vec<String>,
    pub hypotheses: Vec<Expr>,
    pub goal: Expr,
}

impl Sequent {
    /// Filters hidden assumptions, expands definitions, and flattens the
    /// remaining facts into hypotheses.
    pub fn from_obligation(o: &Obligation) -> Result<Sequent, String> {
        let o = expand_all(&filter(o)).map_err(|e| e.to_string())?;
        Sequent::from_expanded(&o)
    }

    /// `o` must already be filtered and expanded.
    pub fn from_expanded(o: &Obligation) -> Result<Sequent, String> {
        let mut signature = Vec::new();
        let mut hypotheses = Vec::new();
        for a in o.context.iter() {
            match a {
                Assumption::New(x) => signature.push(x.clone()),
                Assumption::Fact { fact, hidden: false } => {
                    hypotheses.push(obligation_to_expr(fact).map_err(|e| e.to_string())?)
                }
                Assumption::Fact { hidden: true, .. } => return Err("hidden fact in a prover sequent".into()),
                Assumption::Def { name, .. } => return Err(format!("unexpanded definition `{name}`")),
            }
        }
        Ok(Sequent {
            signature,
            hypotheses,
            goal: o.goal.clone(),
        })
    }

    pub fn new(hypotheses: Vec<Expr>, goal: Expr) -> Sequent {
        let mut sig = BTreeSet::new();
        for e in hypotheses.iter().chain(std::iter::once(&goal)) {
            sig.extend(free_identifiers(e));
        }
        Sequent {
            signature: sig.into_iter().collect(),
            hypotheses,
            goal,
        }
    }

    fn check_scope(&self) -> Result<(), String> {
        let sig: BTreeSet<&String> = self.signature.iter().collect();
        for e in self.hypotheses.iter().chain(std::iter::once(&self.goal)) {
            if let Some(x) = free_identifiers(e).into_iter().find(|x| !sig.contains(x)) {
                return Err(format!("`{x}` is not declared"));
            }
        }
        Ok(())
    }

    /// Hypotheses asserted, goal denied.
    pub fn initial(&self) -> Vec<Signed> {
        self.hypotheses
            .iter()
            .map(|h| (true, from_expr(h)))
            .chain(std::iter::once((false, from_expr(&self.goal))))
            .collect()
    }
}

impl std::fmt::Display for Sequent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let hs: Vec<String> = self.hypotheses.iter().map(pp_expr).collect();
        write!(f, "{} |- {}", hs.join(", "), pp_expr(&self.goal))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Universal instantiations allowed on one branch.
    pub max_depth: u32,
    pub timeout_ms: u64,
    /// Instantiations of any single universal formula on one branch.
    pub gamma_reuse: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_depth: 12,
            timeout_ms: 5000,
            gamma_reuse: 4,
        }
    }
}

impl Budget {
    pub fn new(max_depth: u32, timeout_ms: u64, gamma_reuse: u32) -> Result<Budget, String> {
        if max_depth == 0 || timeout_ms == 0 || gamma_reuse == 0 {
            return Err("budget limits must be positive".into());
        }
        Ok(Budget {
            max_depth,
            timeout_ms,
            gamma_reuse,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Deepening level reached: universal instantiations per branch.
    pub level: u32,
    pub steps: u64,
    pub timed_out: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProverOutcome {
    Proved { trace: Trace, depth: usize, stats: Stats },
    Unknown(Stats),
    Malformed(String),
}

impl ProverOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProverOutcome::Proved { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProverOutcome::Proved { .. } => "proved",
            ProverOutcome::Unknown(_) => "unknown",
            ProverOutcome::Malformed(_) => "malformed",
        }
    }
}

/// Iterative deepening over the number of universal instantiations per
/// branch. Deterministic for a given sequent and budget, up to the clock.
pub fn prove(s: &Sequent, b: &Budget) -> ProverOutcome {
    if let Err(m) = s.check_scope() {
        return ProverOutcome::Malformed(m);
    }
    let initial = s.initial();
    // The search recurses once per rule application.
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(scope, || run(&initial, b))
            .expect("spawn prover thread")
            .join()
            .unwrap_or_else(|_| ProverOutcome::Malformed("prover panicked".into()))
    })
}

fn run(initial: &[Signed], b: &Budget) -> ProverOutcome {
    let deadline = Instant::now() + Duration::from_millis(b.timeout_ms);
    let mut stats = Stats::default();
    for level in 0..=b.max_depth {
        let mut search = search::Search::new(level, b.gamma_reuse, deadline);
        let found = search.run(initial);
        stats.level = level;
        stats.steps += search.steps;
        if let Some(trace) = found {
            let depth = trace.depth();
            return ProverOutcome::Proved { trace, depth, stats };
        }
        if search.timed_out {
            stats.timed_out = true;
            break;
        }
        if !search.hit_limit {
            break;
        }
    }
    ProverOutcome::Unknown(stats)
}

/// Whether `t` replays from `s` and closes every branch.
pub fn check_trace(s: &Sequent, t: &Trace) -> bool {
    check_trace_detailed(s, t).is_ok()
}

/// Like `check_trace`, reporting the first illegal step.
pub fn check_trace_detailed(s: &Sequent, t: &Trace) -> Result<(), String> {
    s.check_scope()?;
    trace::replay(&s.initial(), t)
}

/// Translates a closed expression into the prover's term language.
pub fn to_term(e: &Expr) -> Term {
    from_expr(e)
}
