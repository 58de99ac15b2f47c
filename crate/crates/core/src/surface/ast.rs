//! Expression and proof trees produced by the parser.

use std::fmt;
use std::hash::{Hash, Hasher};

/// A source region. Synthesized nodes carry `Span::default()` (line 0).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            start: self.start,
            end: other.end.max(self.end),
            line: self.line,
            col: self.col,
        }
    }

    pub fn is_synthetic(&self) -> bool {
        self.line == 0
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Equiv,
    Eq,
    Neq,
    In,
    NotIn,
    Subseteq,
}

impl BinOp {
    pub fn is_relation(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Neq | BinOp::In | BinOp::NotIn | BinOp::Subseteq
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "/\\",
            BinOp::Or => "\\/",
            BinOp::Implies => "=>",
            BinOp::Equiv => "<=>",
            BinOp::Eq => "=",
            BinOp::Neq => "#",
            BinOp::In => "\\in",
            BinOp::NotIn => "\\notin",
            BinOp::Subseteq => "\\subseteq",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

/// `x` or `x \in e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: String,
    pub domain: Option<Expr>,
}

impl Binder {
    pub fn new(name: impl Into<String>, domain: Option<Expr>) -> Self {
        Binder {
            name: name.into(),
            domain,
        }
    }
}

/// An expression node. Equality and hashing ignore the span.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Ident(String),
    Bool(bool),
    /// `Op(a, b)`
    OpApp(String, Vec<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Binders are scoped left to right: a domain may mention earlier binders.
    Quant(Quant, Vec<Binder>, Box<Expr>),
    /// `SUBSET S`
    Powerset(Box<Expr>),
    /// `{x \in S : P}`
    SetFilter {
        var: String,
        domain: Box<Expr>,
        pred: Box<Expr>,
    },
    /// `{d : x \in S}`
    SetMap {
        body: Box<Expr>,
        var: String,
        domain: Box<Expr>,
    },
    /// `{a, b}` and `{}`
    SetEnum(Vec<Expr>),
    /// `f[x]`
    FnApp(Box<Expr>, Box<Expr>),
    /// `[S -> T]`
    FnSpace(Box<Expr>, Box<Expr>),
}

impl From<ExprKind> for Expr {
    fn from(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn ident(name: impl Into<String>) -> Expr {
        ExprKind::Ident(name.into()).into()
    }

    pub fn bool(b: bool) -> Expr {
        ExprKind::Bool(b).into()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        ExprKind::Not(Box::new(e)).into()
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        ExprKind::Binary(op, Box::new(a), Box::new(b)).into()
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::And, a, b)
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Implies, a, b)
    }

    pub fn mem(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::In, a, b)
    }

    pub fn subseteq(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Subseteq, a, b)
    }

    pub fn quant(q: Quant, binders: Vec<Binder>, body: Expr) -> Expr {
        if binders.is_empty() {
            return body;
        }
        ExprKind::Quant(q, binders, Box::new(body)).into()
    }

    pub fn forall(binders: Vec<Binder>, body: Expr) -> Expr {
        Expr::quant(Quant::Forall, binders, body)
    }

    pub fn exists(binders: Vec<Binder>, body: Expr) -> Expr {
        Expr::quant(Quant::Exists, binders, body)
    }

    pub fn as_ident(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Ident(n) => Some(n),
            _ => None,
        }
    }

    /// Splits `\A b1, b2, ... : e` into `b1` and `\A b2, ... : e`.
    pub fn split_quant(&self, q: Quant) -> Option<(Binder, Expr)> {
        match &self.kind {
            ExprKind::Quant(q2, binders, body) if *q2 == q && !binders.is_empty() => {
                let first = binders[0].clone();
                let rest = binders[1..].to_vec();
                Some((first, Expr::quant(q, rest, (**body).clone())))
            }
            _ => None,
        }
    }
}

/// `<n>` or `<n>label`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepToken {
    pub level: u32,
    pub label: Option<String>,
}

impl StepToken {
    pub fn new(level: u32, label: Option<&str>) -> Self {
        StepToken {
            level,
            label: label.map(str::to_string),
        }
    }

    /// The identifier under which a labelled step is referred to.
    pub fn label_name(&self) -> Option<String> {
        self.label.as_ref().map(|l| format!("<{}>{}", self.level, l))
    }
}

impl fmt::Display for StepToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "<{}>{}", self.level, l),
            None => write!(f, "<{}>", self.level),
        }
    }
}

/// One entry of an `ASSUME` list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    New { name: String, domain: Option<Expr> },
    Fact(Expr),
}

/// Either a bare expression or `ASSUME ... PROVE ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoalForm {
    Expr(Expr),
    AssumeProve {
        assumptions: Vec<Hypothesis>,
        goal: Expr,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proof {
    Obvious(Span),
    /// `explicit` is false when the subproof was simply left out.
    Omitted { explicit: bool, span: Span },
    By {
        facts: Vec<Expr>,
        defs: Vec<String>,
        span: Span,
    },
    Steps(Vec<Step>),
}

impl Proof {
    pub fn is_leaf(&self) -> bool {
        !matches!(self, Proof::Steps(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub token: StepToken,
    pub kind: StepKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessItem {
    pub witness: Expr,
    pub domain: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    Use {
        facts: Vec<Expr>,
        defs: Vec<String>,
    },
    Hide {
        facts: Vec<Expr>,
        defs: Vec<String>,
    },
    Define {
        name: String,
        params: Vec<String>,
        body: Expr,
    },
    Have(Expr),
    Take(Vec<Binder>),
    Witness(Vec<WitnessItem>),
    Assert {
        goal: GoalForm,
        proof: Proof,
    },
    Suffices {
        goal: GoalForm,
        proof: Proof,
    },
    Pick {
        binders: Vec<Binder>,
        body: Expr,
        proof: Proof,
    },
    Case {
        cond: Expr,
        proof: Proof,
    },
    Qed {
        proof: Proof,
    },
}

impl StepKind {
    pub fn subproof(&self) -> Option<&Proof> {
        match self {
            StepKind::Assert { proof, .. }
            | StepKind::Suffices { proof, .. }
            | StepKind::Pick { proof, .. }
            | StepKind::Case { proof, .. }
            | StepKind::Qed { proof } => Some(proof),
            _ => None,
        }
    }

    pub fn subproof_mut(&mut self) -> Option<&mut Proof> {
        match self {
            StepKind::Assert { proof, .. }
            | StepKind::Suffices { proof, .. }
            | StepKind::Pick { proof, .. }
            | StepKind::Case { proof, .. }
            | StepKind::Qed { proof } => Some(proof),
            _ => None,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            StepKind::Use { .. } => "USE",
            StepKind::Hide { .. } => "HIDE",
            StepKind::Define { .. } => "DEFINE",
            StepKind::Have(_) => "HAVE",
            StepKind::Take(_) => "TAKE",
            StepKind::Witness(_) => "WITNESS",
            StepKind::Assert { .. } => "assertion",
            StepKind::Suffices { .. } => "SUFFICES",
            StepKind::Pick { .. } => "PICK",
            StepKind::Case { .. } => "CASE",
            StepKind::Qed { .. } => "QED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem {
    pub name: Option<String>,
    pub goal: GoalForm,
    pub proof: Proof,
    pub span: Span,
}
