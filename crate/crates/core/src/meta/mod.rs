//! The meta-language of obligations: contexts with hidden assumptions,
//! definables, visibility changes, filtration, expansion and embedding.

mod embed;
mod expand;
pub mod subst;

use crate::surface::{free_identifiers, Binder, Expr};
use std::collections::BTreeSet;

pub use embed::{embed, pp_assumption, pp_context, pp_definable, pp_obligation};
pub use expand::{expand_all, expand_definition, obligation_to_expr};
pub use subst::{alpha_eq, fresh_name, subst_many, substitute};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MetaError {
    #[error("binder `{0}` occurs twice")]
    DuplicateBinder(String),
    #[error("`{0}` is not defined in the context")]
    UnknownOperator(String),
    #[error("`{name}` takes {expected} argument(s) but is applied to {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("obligation is not well-formed: {0}")]
    NotWellFormed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definable {
    Obligation(Box<Obligation>),
    Lambda { params: Vec<String>, body: Expr },
}

impl Definable {
    pub fn constant(body: Expr) -> Self {
        Definable::Lambda {
            params: Vec::new(),
            body,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Definable::Obligation(_) => 0,
            Definable::Lambda { params, .. } => params.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assumption {
    New(String),
    Def {
        name: String,
        def: Definable,
        hidden: bool,
    },
    Fact { fact: Obligation, hidden: bool },
}

impl Assumption {
    pub fn fact(e: Expr) -> Self {
        Assumption::Fact {
            fact: Obligation::goal(e),
            hidden: false,
        }
    }

    pub fn hidden_fact(e: Expr) -> Self {
        Assumption::Fact {
            fact: Obligation::goal(e),
            hidden: true,
        }
    }

    pub fn def(name: impl Into<String>, def: Definable, hidden: bool) -> Self {
        Assumption::Def {
            name: name.into(),
            def,
            hidden,
        }
    }

    pub fn binds(&self) -> Option<&str> {
        match self {
            Assumption::New(x) => Some(x),
            Assumption::Def { name, .. } => Some(name),
            Assumption::Fact { .. } => None,
        }
    }

    pub fn is_hidden(&self) -> bool {
        match self {
            Assumption::New(_) => false,
            Assumption::Def { hidden, .. } | Assumption::Fact { hidden, .. } => *hidden,
        }
    }

    pub fn unhidden(&self) -> Assumption {
        let mut a = self.clone();
        match &mut a {
            Assumption::Def { hidden, .. } | Assumption::Fact { hidden, .. } => *hidden = false,
            Assumption::New(_) => {}
        }
        a
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context(pub Vec<Assumption>);

impl Context {
    pub fn new() -> Self {
        Context(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Assumption> {
        self.0.iter()
    }

    pub fn push(&mut self, a: Assumption) {
        self.0.push(a);
    }

    pub fn extend(&mut self, other: Context) {
        self.0.extend(other.0);
    }

    pub fn concat(&self, other: &Context) -> Context {
        let mut c = self.clone();
        c.0.extend(other.0.iter().cloned());
        c
    }

    pub fn with(&self, a: Assumption) -> Context {
        let mut c = self.clone();
        c.push(a);
        c
    }

    pub fn binds(&self, name: &str) -> bool {
        self.0.iter().any(|a| a.binds() == Some(name))
    }

    pub fn bound_names(&self) -> BTreeSet<String> {
        self.0
            .iter()
            .filter_map(|a| a.binds().map(str::to_string))
            .collect()
    }

    pub fn definition(&self, name: &str) -> Option<(&Definable, bool)> {
        self.0.iter().rev().find_map(|a| match a {
            Assumption::Def { name: n, def, hidden } if n == name => Some((def, *hidden)),
            _ => None,
        })
    }

    /// Every hidden assumption made usable.
    pub fn unhide(&self) -> Context {
        Context(self.0.iter().map(Assumption::unhidden).collect())
    }

    /// Hidden definitions named in `names` made usable.
    pub fn using_defs<S: AsRef<str>>(&self, names: &[S]) -> Context {
        self.set_def_visibility(names, false)
    }

    /// Usable definitions named in `names` made hidden.
    pub fn hiding_defs<S: AsRef<str>>(&self, names: &[S]) -> Context {
        self.set_def_visibility(names, true)
    }

    fn set_def_visibility<S: AsRef<str>>(&self, names: &[S], to: bool) -> Context {
        Context(
            self.0
                .iter()
                .map(|a| match a {
                    Assumption::Def { name, def, .. }
                        if names.iter().any(|n| n.as_ref() == name) =>
                    {
                        Assumption::Def {
                            name: name.clone(),
                            def: def.clone(),
                            hidden: to,
                        }
                    }
                    other => other.clone(),
                })
                .collect(),
        )
    }

    pub fn hidden_count(&self) -> usize {
        self.0
            .iter()
            .map(|a| {
                let inner = match a {
                    Assumption::Fact { fact, .. } => fact.hidden_count(),
                    Assumption::Def {
                        def: Definable::Obligation(o),
                        ..
                    } => o.hidden_count(),
                    _ => 0,
                };
                inner + usize::from(a.is_hidden())
            })
            .sum()
    }
}

impl FromIterator<Assumption> for Context {
    fn from_iter<I: IntoIterator<Item = Assumption>>(iter: I) -> Self {
        Context(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub context: Context,
    pub goal: Expr,
}

impl Obligation {
    pub fn new(context: Context, goal: Expr) -> Self {
        Obligation { context, goal }
    }

    /// `⟨nil ⊢ e⟩`, written simply as `e`.
    pub fn goal(e: Expr) -> Self {
        Obligation {
            context: Context::new(),
            goal: e,
        }
    }

    pub fn is_plain(&self) -> bool {
        self.context.is_empty()
    }

    /// Hidden assumptions at any nesting depth.
    pub fn hidden_count(&self) -> usize {
        self.context.hidden_count()
    }

    /// Identifiers occurring free in the obligation.
    pub fn free_identifiers(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound: Vec<String> = Vec::new();
        free_in_obligation(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_identifiers().is_empty()
    }
}

fn free_in_obligation(o: &Obligation, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mark = bound.len();
    for a in o.context.iter() {
        match a {
            Assumption::New(x) => bound.push(x.clone()),
            Assumption::Def { name, def, .. } => {
                free_in_definable(def, bound, out);
                bound.push(name.clone());
            }
            Assumption::Fact { fact, .. } => free_in_obligation(fact, bound, out),
        }
    }
    for x in free_identifiers(&o.goal) {
        if !bound.contains(&x) {
            out.insert(x);
        }
    }
    bound.truncate(mark);
}

fn free_in_definable(d: &Definable, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match d {
        Definable::Obligation(o) => free_in_obligation(o, bound, out),
        Definable::Lambda { params, body } => {
            for x in free_identifiers(body) {
                if !bound.contains(&x) && !params.contains(&x) {
                    out.insert(x);
                }
            }
        }
    }
}

/// Binders reflected as assumptions: `x` gives `NEW x`, `x \in e` gives
/// `NEW x, x \in e`.
pub fn reflect_binders(bs: &[Binder]) -> Result<Context, MetaError> {
    let mut seen = BTreeSet::new();
    let mut out = Context::new();
    for b in bs {
        if !seen.insert(b.name.clone()) {
            return Err(MetaError::DuplicateBinder(b.name.clone()));
        }
        out.push(Assumption::New(b.name.clone()));
        if let Some(d) = &b.domain {
            out.push(Assumption::fact(Expr::mem(Expr::ident(b.name.clone()), d.clone())));
        }
    }
    Ok(out)
}

/// Hidden facts deleted and hidden definitions replaced by declarations,
/// at every nesting depth.
pub fn filter(o: &Obligation) -> Obligation {
    Obligation {
        context: filter_context(&o.context),
        goal: o.goal.clone(),
    }
}

fn filter_context(c: &Context) -> Context {
    c.iter()
        .filter_map(|a| match a {
            Assumption::Fact { hidden: true, .. } => None,
            Assumption::Def {
                name, hidden: true, ..
            } => Some(Assumption::New(name.clone())),
            Assumption::Def {
                name,
                def: Definable::Obligation(o),
                hidden: false,
            } => Some(Assumption::Def {
                name: name.clone(),
                def: Definable::Obligation(Box::new(filter(o))),
                hidden: false,
            }),
            Assumption::Fact {
                fact,
                hidden: false,
            } => Some(Assumption::Fact {
                fact: filter(fact),
                hidden: false,
            }),
            other => Some(other.clone()),
        })
        .collect()
}

/// Checks closedness, the no-rebinding rule, and consistent operator arities.
pub fn check_well_formed(o: &Obligation) -> Result<(), MetaError> {
    let mut wf = WellFormed::default();
    wf.obligation(o)
}

#[derive(Default)]
struct WellFormed {
    /// (name, arity; None for NEW declarations whose arity is fixed on first use)
    scope: Vec<(String, Option<usize>)>,
    new_arity: Vec<Option<usize>>,
}

impl WellFormed {
    fn bind(&mut self, name: &str, arity: Option<usize>) -> Result<(), MetaError> {
        if self.scope.iter().any(|(n, _)| n == name) {
            return Err(MetaError::NotWellFormed(format!(
                "`{name}` is bound twice"
            )));
        }
        self.scope.push((name.to_string(), arity));
        self.new_arity.push(None);
        Ok(())
    }

    fn truncate(&mut self, n: usize) {
        self.scope.truncate(n);
        self.new_arity.truncate(n);
    }

    fn obligation(&mut self, o: &Obligation) -> Result<(), MetaError> {
        let mark = self.scope.len();
        for a in o.context.iter() {
            match a {
                Assumption::New(x) => self.bind(x, None)?,
                Assumption::Def { name, def, .. } => {
                    match def {
                        Definable::Obligation(inner) => self.obligation(inner)?,
                        Definable::Lambda { params, body } => {
                            let mut seen = BTreeSet::new();
                            for p in params {
                                if !seen.insert(p) {
                                    return Err(MetaError::DuplicateBinder(p.clone()));
                                }
                            }
                            let m = self.scope.len();
                            for p in params {
                                self.scope.push((p.clone(), Some(0)));
                                self.new_arity.push(None);
                            }
                            let r = self.expr(body, &mut Vec::new());
                            self.truncate(m);
                            r?;
                        }
                    }
                    self.bind(name, Some(def.arity()))?;
                }
                Assumption::Fact { fact, .. } => self.obligation(fact)?,
            }
        }
        let r = self.expr(&o.goal, &mut Vec::new());
        self.truncate(mark);
        r
    }

    fn use_name(&mut self, name: &str, arity: usize, local: &[String]) -> Result<(), MetaError> {
        if local.iter().any(|l| l == name) {
            if arity == 0 {
                return Ok(());
            }
            return Err(MetaError::NotWellFormed(format!(
                "bound variable `{name}` applied to arguments"
            )));
        }
        let Some(i) = self.scope.iter().rposition(|(n, _)| n == name) else {
            return Err(MetaError::NotWellFormed(format!("`{name}` is not bound")));
        };
        match self.scope[i].1 {
            Some(k) if k != arity => Err(MetaError::ArityMismatch {
                name: name.to_string(),
                expected: k,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => match self.new_arity[i] {
                Some(k) if k != arity => Err(MetaError::ArityMismatch {
                    name: name.to_string(),
                    expected: k,
                    found: arity,
                }),
                _ => {
                    self.new_arity[i] = Some(arity);
                    Ok(())
                }
            },
        }
    }

    fn expr(&mut self, e: &Expr, local: &mut Vec<String>) -> Result<(), MetaError> {
        use crate::surface::ExprKind::*;
        match &e.kind {
            Ident(n) => self.use_name(n, 0, local),
            Bool(_) => Ok(()),
            OpApp(n, args) => {
                self.use_name(n, args.len(), local)?;
                args.iter().try_for_each(|a| self.expr(a, local))
            }
            Not(a) | Powerset(a) => self.expr(a, local),
            Binary(_, a, b) | FnApp(a, b) | FnSpace(a, b) => {
                self.expr(a, local)?;
                self.expr(b, local)
            }
            Quant(_, bs, body) => {
                let mark = local.len();
                for b in bs {
                    if let Some(d) = &b.domain {
                        self.expr(d, local)?;
                    }
                    local.push(b.name.clone());
                }
                let r = self.expr(body, local);
                local.truncate(mark);
                r
            }
            SetFilter { var, domain, pred } => {
                self.expr(domain, local)?;
                local.push(var.clone());
                let r = self.expr(pred, local);
                local.pop();
                r
            }
            SetMap { body, var, domain } => {
                self.expr(domain, local)?;
                local.push(var.clone());
                let r = self.expr(body, local);
                local.pop();
                r
            }
            SetEnum(items) => items.iter().try_for_each(|a| self.expr(a, local)),
        }
    }
}

/// Alpha-equivalence of obligations: binders of contexts may be renamed
/// consistently; kinds, order and visibility must agree.
pub fn obligation_alpha_eq(a: &Obligation, b: &Obligation) -> bool {
    let mut env = subst::AlphaEnv::default();
    obl_eq(a, b, &mut env)
}

fn obl_eq(a: &Obligation, b: &Obligation, env: &mut subst::AlphaEnv) -> bool {
    if a.context.len() != b.context.len() {
        return false;
    }
    let mark = env.len();
    let mut ok = true;
    for (x, y) in a.context.iter().zip(b.context.iter()) {
        ok = match (x, y) {
            (Assumption::New(n1), Assumption::New(n2)) => {
                env.push(n1, n2);
                true
            }
            (
                Assumption::Def {
                    name: n1,
                    def: d1,
                    hidden: h1,
                },
                Assumption::Def {
                    name: n2,
                    def: d2,
                    hidden: h2,
                },
            ) => {
                let r = h1 == h2 && definable_eq(d1, d2, env);
                env.push(n1, n2);
                r
            }
            (
                Assumption::Fact {
                    fact: f1,
                    hidden: h1,
                },
                Assumption::Fact {
                    fact: f2,
                    hidden: h2,
                },
            ) => h1 == h2 && obl_eq(f1, f2, env),
            _ => false,
        };
        if !ok {
            break;
        }
    }
    ok = ok && subst::alpha_eq_in(&a.goal, &b.goal, env);
    env.truncate(mark);
    ok
}

fn definable_eq(a: &Definable, b: &Definable, env: &mut subst::AlphaEnv) -> bool {
    match (a, b) {
        (Definable::Obligation(x), Definable::Obligation(y)) => obl_eq(x, y, env),
        (
            Definable::Lambda {
                params: p1,
                body: b1,
            },
            Definable::Lambda {
                params: p2,
                body: b2,
            },
        ) => {
            if p1.len() != p2.len() {
                return false;
            }
            let mark = env.len();
            for (x, y) in p1.iter().zip(p2) {
                env.push(x, y);
            }
            let r = subst::alpha_eq_in(b1, b2, env);
            env.truncate(mark);
            r
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_expression;

    fn e(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn unhide_clears_flags() {
        let c = Context(vec![Assumption::New("x".into()), Assumption::hidden_fact(e("P"))]);
        let u = c.unhide();
        assert_eq!(
            u,
            Context(vec![Assumption::New("x".into()), Assumption::fact(e("P"))])
        );
        assert_eq!(u.unhide(), u);
    }

    #[test]
    fn using_and_hiding() {
        let hidden = Context(vec![Assumption::def("T", Definable::constant(e("S")), true)]);
        let usable = Context(vec![Assumption::def("T", Definable::constant(e("S")), false)]);
        assert_eq!(hidden.using_defs(&["T"]), usable);
        assert_eq!(usable.hiding_defs(&["T"]), hidden);
        assert_eq!(hidden.using_defs::<&str>(&[]), hidden);
        assert_eq!(hidden.using_defs(&["U"]), hidden);
    }

    #[test]
    fn reflection() {
        assert_eq!(reflect_binders(&[]).unwrap(), Context::new());
        let r = reflect_binders(&[Binder::new("x", Some(e("e")))]).unwrap();
        assert_eq!(
            r,
            Context(vec![Assumption::New("x".into()), Assumption::fact(e("x \\in e"))])
        );
        let r = reflect_binders(&[Binder::new("x", None), Binder::new("y", Some(e("S")))]).unwrap();
        assert_eq!(
            r,
            Context(vec![
                Assumption::New("x".into()),
                Assumption::New("y".into()),
                Assumption::fact(e("y \\in S"))
            ])
        );
        assert_eq!(
            reflect_binders(&[Binder::new("x", None), Binder::new("x", None)]),
            Err(MetaError::DuplicateBinder("x".into()))
        );
    }

    #[test]
    fn filtration_example() {
        let o = Obligation::new(
            Context(vec![
                Assumption::New("x".into()),
                Assumption::def("y", Definable::constant(e("x")), true),
            ]),
            e("x = y"),
        );
        let want = Obligation::new(
            Context(vec![Assumption::New("x".into()), Assumption::New("y".into())]),
            e("x = y"),
        );
        assert_eq!(filter(&o), want);
    }

    #[test]
    fn filtration_is_recursive() {
        let inner = Obligation::new(
            Context(vec![Assumption::New("z".into()), Assumption::hidden_fact(e("Q"))]),
            e("P"),
        );
        let o = Obligation::new(
            Context(vec![Assumption::Fact {
                fact: inner,
                hidden: false,
            }]),
            e("P"),
        );
        assert_eq!(o.hidden_count(), 1);
        assert_eq!(filter(&o).hidden_count(), 0);
    }

    #[test]
    fn well_formedness() {
        let ok = Obligation::new(
            Context(vec![
                Assumption::New("P".into()),
                Assumption::Fact {
                    fact: Obligation::new(Context(vec![Assumption::New("x".into())]), e("P(x)")),
                    hidden: true,
                },
            ]),
            e("\\A x : P(x)"),
        );
        assert!(check_well_formed(&ok).is_ok());
        let open = Obligation::goal(e("x = x"));
        assert!(check_well_formed(&open).is_err());
        let rebind = Obligation::new(
            Context(vec![Assumption::New("x".into()), Assumption::New("x".into())]),
            e("TRUE"),
        );
        assert!(check_well_formed(&rebind).is_err());
        let arity = Obligation::new(Context(vec![Assumption::New("P".into())]), e("P(P)"));
        assert!(matches!(
            check_well_formed(&arity),
            Err(MetaError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn obligation_alpha() {
        let a = Obligation::new(Context(vec![Assumption::New("x".into())]), e("x = x"));
        let b = Obligation::new(Context(vec![Assumption::New("y".into())]), e("y = y"));
        assert!(obligation_alpha_eq(&a, &b));
        let c = Obligation::new(Context(vec![Assumption::New("y".into())]), e("x = y"));
        assert!(!obligation_alpha_eq(&a, &c));
    }
}
