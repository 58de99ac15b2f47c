//! Locally nameless terms: bound variables are de Bruijn indices, so
//! alpha-equivalent formulas are syntactically equal.

use crate::surface::{BinOp, Expr, ExprKind, Quant};
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Sym(String),
    True,
    False,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Eq,
    In,
    Subseteq,
    Powerset,
    FnSpace,
    Apply,
    Enum,
    /// `[body]`, body binds index 0.
    Forall,
    Exists,
    /// `[domain, pred]`, pred binds index 0.
    Filter,
    /// `[body, domain]`, body binds index 0.
    Map,
}

impl Head {
    const BUILTINS: [(&'static str, Head); 18] = [
        ("$true", Head::True),
        ("$false", Head::False),
        ("$not", Head::Not),
        ("$and", Head::And),
        ("$or", Head::Or),
        ("$imp", Head::Imp),
        ("$iff", Head::Iff),
        ("$eq", Head::Eq),
        ("$in", Head::In),
        ("$subseteq", Head::Subseteq),
        ("$powerset", Head::Powerset),
        ("$fnspace", Head::FnSpace),
        ("$apply", Head::Apply),
        ("$enum", Head::Enum),
        ("$all", Head::Forall),
        ("$ex", Head::Exists),
        ("$filter", Head::Filter),
        ("$map", Head::Map),
    ];

    pub fn name(&self) -> &str {
        match self {
            Head::Sym(s) => s,
            h => Self::BUILTINS.iter().find(|(_, b)| b == h).map(|(n, _)| *n).unwrap(),
        }
    }

    pub fn from_name(s: &str) -> Head {
        Self::BUILTINS
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, h)| h.clone())
            .unwrap_or_else(|| Head::Sym(s.to_string()))
    }

    /// Index of the argument under the binder, if any.
    pub fn bound_arg(&self) -> Option<usize> {
        match self {
            Head::Forall | Head::Exists | Head::Map => Some(0),
            Head::Filter => Some(1),
            _ => None,
        }
    }

    pub fn is_set_constructor(&self) -> bool {
        matches!(self, Head::Filter | Head::Map | Head::Enum | Head::Powerset | Head::FnSpace)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Free tableau variable.
    Var(u32),
    Bound(u32),
    App(Head, Vec<Term>),
}

impl Term {
    pub fn sym(s: impl Into<String>) -> Term {
        Term::App(Head::Sym(s.into()), Vec::new())
    }

    pub fn app(h: Head, args: Vec<Term>) -> Term {
        Term::App(h, args)
    }

    pub fn un(h: Head, a: Term) -> Term {
        Term::App(h, vec![a])
    }

    pub fn bin(h: Head, a: Term, b: Term) -> Term {
        Term::App(h, vec![a, b])
    }

    pub fn head(&self) -> Option<&Head> {
        match self {
            Term::App(h, _) => Some(h),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, a) => a,
            _ => &[],
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Bound(_) => true,
            Term::App(_, a) => a.iter().all(Term::is_ground),
        }
    }

    /// No bound index escapes the term.
    pub fn is_closed(&self) -> bool {
        self.loose_from(0)
    }

    fn loose_from(&self, depth: u32) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Bound(i) => *i < depth,
            Term::App(h, a) => a.iter().enumerate().all(|(k, t)| {
                let d = if h.bound_arg() == Some(k) { depth + 1 } else { depth };
                t.loose_from(d)
            }),
        }
    }

    pub fn vars_into(&self, out: &mut Vec<u32>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Term::Bound(_) => {}
            Term::App(_, a) => a.iter().for_each(|t| t.vars_into(out)),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::App(Head::Sym(s), a) => s == name || a.iter().any(|t| t.mentions(name)),
            Term::App(_, a) => a.iter().any(|t| t.mentions(name)),
            _ => false,
        }
    }

    pub fn symbols_into(&self, out: &mut Vec<String>) {
        if let Term::App(h, a) = self {
            if let Head::Sym(s) = h {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            a.iter().for_each(|t| t.symbols_into(out));
        }
    }

    /// Instantiates the outermost loose index with the closed term `u`.
    pub fn open(&self, u: &Term) -> Term {
        self.open_at(0, u)
    }

    fn open_at(&self, k: u32, u: &Term) -> Term {
        match self {
            Term::Bound(i) if *i == k => u.clone(),
            Term::Bound(i) if *i > k => Term::Bound(i - 1),
            Term::App(h, a) => Term::App(
                h.clone(),
                a.iter()
                    .enumerate()
                    .map(|(j, t)| t.open_at(if h.bound_arg() == Some(j) { k + 1 } else { k }, u))
                    .collect(),
            ),
            t => t.clone(),
        }
    }

    /// Replaces every variable by `c`.
    pub fn close_vars(&self, c: &Term) -> Term {
        match self {
            Term::Var(_) => c.clone(),
            Term::App(h, a) => Term::App(h.clone(), a.iter().map(|t| t.close_vars(c)).collect()),
            t => t.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Bound(i) => write!(f, "#{i}"),
            Term::App(h, a) if a.is_empty() && !matches!(h, Head::Enum) => f.write_str(h.name()),
            Term::App(h, a) => {
                write!(f, "({}", h.name())?;
                for t in a {
                    write!(f, " {t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses the s-expression form produced by `Display`.
pub fn parse_term(s: &str) -> Result<Term, String> {
    let toks = sexp_tokens(s);
    let mut pos = 0;
    let t = parse_at(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(format!("trailing input in `{s}`"));
    }
    Ok(t)
}

fn sexp_tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn atom(tok: &str) -> Result<Term, String> {
    if let Some(n) = tok.strip_prefix('?') {
        return n.parse().map(Term::Var).map_err(|_| format!("bad variable `{tok}`"));
    }
    if let Some(n) = tok.strip_prefix('#') {
        return n.parse().map(Term::Bound).map_err(|_| format!("bad index `{tok}`"));
    }
    Ok(Term::App(Head::from_name(tok), Vec::new()))
}

fn parse_at(toks: &[String], pos: &mut usize) -> Result<Term, String> {
    let tok = toks.get(*pos).ok_or("unexpected end of term")?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let head = toks.get(*pos).ok_or("missing head")?;
            if head == "(" || head == ")" {
                return Err("expected a head symbol".into());
            }
            *pos += 1;
            let h = Head::from_name(head);
            let mut args = Vec::new();
            while toks.get(*pos).map(String::as_str) != Some(")") {
                if *pos >= toks.len() {
                    return Err("unbalanced parentheses".into());
                }
                args.push(parse_at(toks, pos)?);
            }
            *pos += 1;
            Ok(Term::App(h, args))
        }
        ")" => Err("unexpected `)`".into()),
        a => atom(a),
    }
}

/// Translates a surface expression; free identifiers become symbols.
pub fn from_expr(e: &Expr) -> Term {
    let mut env = Vec::new();
    tr(e, &mut env)
}

fn lookup(env: &[Option<String>], x: &str) -> Option<u32> {
    env.iter()
        .rev()
        .position(|n| n.as_deref() == Some(x))
        .map(|i| i as u32)
}

fn tr(e: &Expr, env: &mut Vec<Option<String>>) -> Term {
    match &e.kind {
        ExprKind::Ident(x) => match lookup(env, x) {
            Some(i) => Term::Bound(i),
            None => Term::sym(x.clone()),
        },
        ExprKind::Bool(true) => Term::app(Head::True, vec![]),
        ExprKind::Bool(false) => Term::app(Head::False, vec![]),
        ExprKind::OpApp(o, args) => Term::App(Head::Sym(o.clone()), args.iter().map(|a| tr(a, env)).collect()),
        ExprKind::Not(a) => Term::un(Head::Not, tr(a, env)),
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (tr(a, env), tr(b, env));
            match op {
                BinOp::And => Term::bin(Head::And, a, b),
                BinOp::Or => Term::bin(Head::Or, a, b),
                BinOp::Implies => Term::bin(Head::Imp, a, b),
                BinOp::Equiv => Term::bin(Head::Iff, a, b),
                BinOp::Eq => Term::bin(Head::Eq, a, b),
                BinOp::Neq => Term::un(Head::Not, Term::bin(Head::Eq, a, b)),
                BinOp::In => Term::bin(Head::In, a, b),
                BinOp::NotIn => Term::un(Head::Not, Term::bin(Head::In, a, b)),
                BinOp::Subseteq => Term::bin(Head::Subseteq, a, b),
            }
        }
        ExprKind::Quant(q, binders, body) => {
            let mark = env.len();
            let mut doms = Vec::new();
            for b in binders {
                env.push(None);
                doms.push(b.domain.as_ref().map(|d| tr(d, env)));
                env.pop();
                env.push(Some(b.name.clone()));
            }
            let mut t = tr(body, env);
            env.truncate(mark);
            for d in doms.into_iter().rev() {
                t = match (q, d) {
                    (Quant::Forall, Some(d)) => Term::bin(Head::Imp, Term::bin(Head::In, Term::Bound(0), d), t),
                    (Quant::Exists, Some(d)) => Term::bin(Head::And, Term::bin(Head::In, Term::Bound(0), d), t),
                    (_, None) => t,
                };
                t = Term::un(if *q == Quant::Forall { Head::Forall } else { Head::Exists }, t);
            }
            t
        }
        ExprKind::Powerset(a) => Term::un(Head::Powerset, tr(a, env)),
        ExprKind::SetFilter { var, domain, pred } => {
            let d = tr(domain, env);
            env.push(Some(var.clone()));
            let p = tr(pred, env);
            env.pop();
            Term::bin(Head::Filter, d, p)
        }
        ExprKind::SetMap { body, var, domain } => {
            let d = tr(domain, env);
            env.push(Some(var.clone()));
            let b = tr(body, env);
            env.pop();
            Term::bin(Head::Map, b, d)
        }
        ExprKind::SetEnum(xs) => Term::App(Head::Enum, xs.iter().map(|x| tr(x, env)).collect()),
        ExprKind::FnApp(f, x) => Term::bin(Head::Apply, tr(f, env), tr(x, env)),
        ExprKind::FnSpace(a, b) => Term::bin(Head::FnSpace, tr(a, env), tr(b, env)),
    }
}

/// Triangular substitution for tableau variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst(HashMap<u32, Term>);

impl Subst {
    pub fn new() -> Self {
        Subst(HashMap::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.0.get(v) {
                Some(u) => self.apply(u),
                None => t.clone(),
            },
            Term::App(h, a) if !a.is_empty() => Term::App(h.clone(), a.iter().map(|x| self.apply(x)).collect()),
            _ => t.clone(),
        }
    }

    fn walk<'a>(&'a self, t: &'a Term) -> &'a Term {
        let mut t = t;
        while let Term::Var(v) = t {
            match self.0.get(v) {
                Some(u) => t = u,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: u32, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => *w == v,
            Term::Bound(_) => false,
            Term::App(_, a) => a.iter().any(|x| self.occurs(v, x)),
        }
    }

    /// Extends `self` to a most general unifier of `a` and `b`.
    pub fn unify(&self, a: &Term, b: &Term) -> Option<Subst> {
        let mut s = self.clone();
        if s.unify_mut(a, b) {
            Some(s)
        } else {
            None
        }
    }

    fn unify_mut(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if !t.is_closed() || self.occurs(*x, t) {
                    return false;
                }
                self.0.insert(*x, t.clone());
                true
            }
            (Term::Bound(i), Term::Bound(j)) => i == j,
            (Term::App(h1, a1), Term::App(h2, a2)) => {
                h1 == h2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| self.unify_mut(x, y))
            }
            _ => false,
        }
    }
}
