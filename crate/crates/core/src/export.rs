//! Reports: per-leaf obligations, prover outcomes, and overall status, as
//! JSON or a plain-text summary.

use crate::engine::{check_theorem, CheckResult, Config, LeafObligation};
use crate::meta::{embed, expand_all, filter, pp_obligation, MetaError, Obligation};
use crate::prover::{prove, Budget, ProverOutcome, Sequent};
use crate::surface::{ParseError, Theorem};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Proved,
    Incomplete,
    Failed,
    Meaningless,
    /// Meaningful, but some leaves were not sent to the prover.
    Checked,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Proved => "PROVED",
            Status::Incomplete => "INCOMPLETE",
            Status::Failed => "FAILED",
            Status::Meaningless => "MEANINGLESS",
            Status::Checked => "CHECKED",
        }
    }

    /// Process exit code for this status.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Proved | Status::Checked => 0,
            Status::Incomplete => 1,
            Status::Failed => 2,
            Status::Meaningless => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Proved,
    Unknown,
    Malformed,
    Omitted,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafReport {
    pub id: usize,
    pub path: String,
    pub kind: String,
    pub omitted: bool,
    pub obligation: String,
    pub filtered: String,
    pub embedding: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub path: String,
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub col: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObligationReport {
    pub theorem: String,
    pub status: Status,
    pub leaves: Vec<LeafReport>,
    #[serde(default)]
    pub errors: Vec<ErrorReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Show filtered obligations before definition expansion.
    pub show_unexpanded: bool,
    /// Record wall-clock time per leaf; otherwise `millis` is 0.
    pub timings: bool,
}

/// Filtered obligation with usable definitions expanded.
pub fn prepared(o: &Obligation) -> Result<Obligation, MetaError> {
    expand_all(&filter(o))
}

impl LeafReport {
    pub fn new(id: usize, leaf: &LeafObligation, opts: &ReportOptions) -> LeafReport {
        let prep = prepared(&leaf.obligation);
        let filtered = if opts.show_unexpanded {
            pp_obligation(&filter(&leaf.obligation))
        } else {
            match &prep {
                Ok(o) => pp_obligation(o),
                Err(e) => format!("<{e}>"),
            }
        };
        let embedding = match prep.as_ref().map_err(Clone::clone).and_then(embed) {
            Ok(s) => s,
            Err(e) => format!("<{e}>"),
        };
        LeafReport {
            id,
            path: leaf.origin.display_path().to_string(),
            kind: leaf.kind.name().to_string(),
            omitted: leaf.omitted,
            obligation: pp_obligation(&leaf.obligation),
            filtered,
            embedding,
            outcome: if leaf.omitted { Outcome::Omitted } else { Outcome::Skipped },
            detail: None,
            millis: 0,
        }
    }

    pub fn record(&mut self, outcome: &ProverOutcome, elapsed: Duration, opts: &ReportOptions) {
        let (o, detail) = match outcome {
            ProverOutcome::Proved { depth, stats, .. } => (Outcome::Proved, format!("level {}, depth {depth}", stats.level)),
            ProverOutcome::Unknown(stats) if stats.timed_out => (Outcome::Unknown, "time limit reached".to_string()),
            ProverOutcome::Unknown(stats) => (Outcome::Unknown, format!("search exhausted at level {}", stats.level)),
            ProverOutcome::Malformed(m) => (Outcome::Malformed, m.clone()),
        };
        self.outcome = o;
        self.detail = Some(detail);
        self.millis = if opts.timings { elapsed.as_millis() as u64 } else { 0 };
    }
}

pub fn status_of(errors: &[ErrorReport], leaves: &[LeafReport]) -> Status {
    if !errors.is_empty() {
        Status::Meaningless
    } else if leaves.iter().any(|l| matches!(l.outcome, Outcome::Unknown | Outcome::Malformed)) {
        Status::Failed
    } else if leaves.iter().any(|l| l.outcome == Outcome::Skipped) {
        Status::Checked
    } else if leaves.iter().any(|l| l.omitted) {
        Status::Incomplete
    } else {
        Status::Proved
    }
}

impl ObligationReport {
    /// A report with every leaf listed but nothing proved yet.
    pub fn from_check(theorem: &str, r: &CheckResult, opts: &ReportOptions) -> ObligationReport {
        let leaves = r
            .leaves()
            .iter()
            .enumerate()
            .map(|(i, l)| LeafReport::new(i + 1, l, opts))
            .collect();
        let errors = r
            .errors
            .iter()
            .map(|e| ErrorReport {
                path: e.provenance.display_path().to_string(),
                kind: e.kind.name().to_string(),
                message: e.message.clone(),
                line: Some(e.provenance.span.line).filter(|l| *l > 0),
                col: (e.provenance.span.line > 0).then_some(e.provenance.span.col),
            })
            .collect();
        let warnings = r
            .warnings
            .iter()
            .map(|w| format!("{}: {}", w.provenance.display_path(), w.message))
            .collect();
        let mut rep = ObligationReport {
            theorem: theorem.to_string(),
            status: Status::Checked,
            leaves,
            errors,
            warnings,
        };
        rep.update_status();
        rep
    }

    pub fn parse_failure(theorem: &str, e: &ParseError) -> ObligationReport {
        let (line, col) = e.position();
        ObligationReport {
            theorem: theorem.to_string(),
            status: Status::Meaningless,
            leaves: Vec::new(),
            errors: vec![ErrorReport {
                path: String::new(),
                kind: if e.is_level_error() { "level" } else { "syntax" }.to_string(),
                message: e.to_string(),
                line: Some(line),
                col: Some(col),
            }],
            warnings: Vec::new(),
        }
    }

    pub fn update_status(&mut self) {
        self.status = status_of(&self.errors, &self.leaves);
    }
}

/// Checks `th` and proves every non-omitted leaf in order.
pub fn run_theorem(th: &Theorem, config: &Config, budget: &Budget, opts: &ReportOptions) -> (CheckResult, ObligationReport) {
    let result = check_theorem(th, config);
    let name = th.name.clone().unwrap_or_else(|| "THEOREM".into());
    let mut rep = ObligationReport::from_check(&name, &result, opts);
    if result.is_meaningful() {
        for (leaf, entry) in result.leaves().iter().zip(rep.leaves.iter_mut()) {
            if leaf.omitted {
                continue;
            }
            let (outcome, dt) = prove_leaf(leaf, budget);
            entry.record(&outcome, dt, opts);
        }
        rep.update_status();
    }
    (result, rep)
}

/// Filters, expands, and proves one leaf.
pub fn prove_leaf(leaf: &LeafObligation, budget: &Budget) -> (ProverOutcome, Duration) {
    let start = Instant::now();
    let outcome = match Sequent::from_obligation(&leaf.obligation) {
        Ok(s) => prove(&s, budget),
        Err(m) => ProverOutcome::Malformed(m),
    };
    (outcome, start.elapsed())
}

pub fn write_report(r: &ObligationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(r),
    }
}

fn text(r: &ObligationReport) -> String {
    let mut s = String::new();
    let count = |o: Outcome| r.leaves.iter().filter(|l| l.outcome == o).count();
    let _ = writeln!(
        s,
        "{}: {} ({} leaves: {} proved, {} omitted, {} unknown, {} malformed, {} skipped)",
        r.theorem,
        r.status.name(),
        r.leaves.len(),
        count(Outcome::Proved),
        count(Outcome::Omitted),
        count(Outcome::Unknown),
        count(Outcome::Malformed),
        count(Outcome::Skipped),
    );
    for e in &r.errors {
        let pos = match (e.line, e.col) {
            (Some(l), Some(c)) => format!(" ({l}:{c})"),
            _ => String::new(),
        };
        let path = if e.path.is_empty() { "input" } else { &e.path };
        let _ = writeln!(s, "error: {path}{pos}: {}: {}", e.kind, e.message);
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    for l in &r.leaves {
        let outcome = serde_json::to_value(l.outcome).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let _ = write!(s, "  [{}] {} {} {}", l.id, l.path, l.kind, outcome);
        if let Some(d) = &l.detail {
            let _ = write!(s, " ({d})");
        }
        if l.millis > 0 {
            let _ = write!(s, " {}ms", l.millis);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "      {}", l.filtered);
    }
    s
}

/// One embedding per line, in the given order.
pub fn write_embeddings(obligations: &[Obligation]) -> Result<String, MetaError> {
    let mut s = String::new();
    for o in obligations {
        s.push_str(&embed(o)?);
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta::{Assumption, Context};
    use crate::surface::{parse_expression, parse_theorem};

    #[test]
    fn empty_embedding_document() {
        assert_eq!(write_embeddings(&[]).unwrap(), "");
    }

    #[test]
    fn framework_example_line() {
        let o = Obligation::new(
            Context(vec![
                Assumption::New("P".into()),
                Assumption::Fact {
                    fact: Obligation::new(Context(vec![Assumption::New("x".into())]), parse_expression("P(x)").unwrap()),
                    hidden: false,
                },
            ]),
            parse_expression("\\A x : P(x)").unwrap(),
        );
        assert_eq!(write_embeddings(&[o]).unwrap(), "!!P. (!!x. P(x)) ==> \\A x : P(x)\n");
    }

    #[test]
    fn status_rules() {
        let th = parse_theorem("THEOREM T == ASSUME NEW a, a PROVE a\n<1>1. a OMITTED\n<1>2. QED BY <1>1").unwrap();
        let (_, rep) = run_theorem(&th, &Config::default(), &Budget::default(), &ReportOptions::default());
        assert_eq!(rep.status, Status::Incomplete);
        assert_eq!(rep.leaves.iter().filter(|l| l.omitted).count(), 1);
        let th = parse_theorem("THEOREM ASSUME NEW a, NEW b PROVE a\nOBVIOUS").unwrap();
        let (_, rep) = run_theorem(&th, &Config::default(), &Budget::new(2, 1000, 2).unwrap(), &ReportOptions::default());
        assert_eq!(rep.status, Status::Failed);
    }

    #[test]
    fn json_round_trip() {
        let th = parse_theorem("THEOREM ASSUME NEW a, a PROVE a\nOBVIOUS").unwrap();
        let (_, rep) = run_theorem(&th, &Config::default(), &Budget::default(), &ReportOptions::default());
        let js = write_report(&rep, Format::Json);
        let back: ObligationReport = serde_json::from_str(&js).unwrap();
        assert_eq!(back, rep);
        assert!(js.contains("\"status\": \"PROVED\""));
        assert!(write_report(&rep, Format::Text).starts_with("THEOREM: PROVED"));
    }
}
