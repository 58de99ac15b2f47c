//! Definition expansion and conversion of obligations to formulas.

use super::subst::{all_identifiers_into, fresh_name, subst_many};
use super::{Assumption, Context, Definable, MetaError, Obligation};
use crate::surface::{free_identifiers, Binder, Expr, ExprKind};
use std::collections::{BTreeMap, BTreeSet};

/// Rewrites every later use of `name` with its definition. The definition
/// itself stays in the context.
pub fn expand_definition(o: &Obligation, name: &str) -> Result<Obligation, MetaError> {
    let i = o
        .context
        .iter()
        .rposition(|a| matches!(a, Assumption::Def { name: n, .. } if n == name))
        .ok_or_else(|| MetaError::UnknownOperator(name.to_string()))?;
    expand_at(o, i)
}

fn expand_at(o: &Obligation, i: usize) -> Result<Obligation, MetaError> {
    let Assumption::Def { name, def, .. } = &o.context.0[i] else {
        unreachable!("expand_at called on a non-definition");
    };
    let rw = Rewriter::new(name, def)?;
    let mut scope: BTreeSet<String> = o.context.0[..=i]
        .iter()
        .filter_map(|a| a.binds().map(str::to_string))
        .collect();
    let mut ctx: Vec<Assumption> = o.context.0[..=i].to_vec();
    let mut shadowed = false;
    for a in &o.context.0[i + 1..] {
        if shadowed {
            ctx.push(a.clone());
            continue;
        }
        ctx.push(rw.assumption(a, &scope)?);
        if let Some(b) = a.binds() {
            scope.insert(b.to_string());
            if b == name {
                shadowed = true;
            }
        }
    }
    let goal = if shadowed {
        o.goal.clone()
    } else {
        rw.expr(&o.goal)?
    };
    Ok(Obligation::new(Context(ctx), goal))
}

/// Expands every usable definition and drops those no longer referenced.
/// Hidden definitions are left alone.
pub fn expand_all(o: &Obligation) -> Result<Obligation, MetaError> {
    let mut cur = o.clone();
    let mut i = 0;
    while i < cur.context.len() {
        match &cur.context.0[i] {
            Assumption::Def {
                name,
                hidden: false,
                ..
            } => {
                let name = name.clone();
                cur = expand_at(&cur, i)?;
                let rest = Obligation::new(Context(cur.context.0[i + 1..].to_vec()), cur.goal.clone());
                if rest.free_identifiers().contains(&name) {
                    i += 1;
                } else {
                    cur.context.0.remove(i);
                }
            }
            _ => i += 1,
        }
    }
    let context = cur
        .context
        .0
        .into_iter()
        .map(|a| match a {
            Assumption::Fact { fact, hidden } => Ok(Assumption::Fact {
                fact: expand_all(&fact)?,
                hidden,
            }),
            other => Ok(other),
        })
        .collect::<Result<Vec<_>, MetaError>>()?;
    Ok(Obligation::new(Context(context), cur.goal))
}

/// The formula asserted by an obligation: declarations become universal
/// quantifiers, facts become antecedents, definitions are expanded.
pub fn obligation_to_expr(o: &Obligation) -> Result<Expr, MetaError> {
    let mut cur = o.clone();
    while let Some(i) = cur
        .context
        .iter()
        .position(|a| matches!(a, Assumption::Def { .. }))
    {
        cur = expand_at(&cur, i)?;
        cur.context.0.remove(i);
    }
    let mut acc = cur.goal;
    for a in cur.context.0.into_iter().rev() {
        acc = match a {
            Assumption::New(x) => Expr::forall(vec![Binder::new(x, None)], acc),
            Assumption::Fact { fact, .. } => Expr::implies(obligation_to_expr(&fact)?, acc),
            Assumption::Def { .. } => unreachable!(),
        };
    }
    Ok(acc)
}

struct Rewriter<'a> {
    name: &'a str,
    params: Vec<String>,
    body: Expr,
    /// Set when the definable is an obligation.
    obligation: Option<&'a Obligation>,
    body_free: BTreeSet<String>,
}

impl<'a> Rewriter<'a> {
    fn new(name: &'a str, def: &'a Definable) -> Result<Self, MetaError> {
        let (params, body, obligation) = match def {
            Definable::Lambda { params, body } => (params.clone(), body.clone(), None),
            Definable::Obligation(o) => (Vec::new(), obligation_to_expr(o)?, Some(&**o)),
        };
        let mut body_free = free_identifiers(&body);
        for p in &params {
            body_free.remove(p);
        }
        Ok(Rewriter {
            name,
            params,
            body,
            obligation,
            body_free,
        })
    }

    fn assumption(&self, a: &Assumption, scope: &BTreeSet<String>) -> Result<Assumption, MetaError> {
        Ok(match a {
            Assumption::New(_) => a.clone(),
            Assumption::Fact { fact, hidden } => {
                if let (Some(phi), true) = (self.obligation, fact.is_plain()) {
                    if fact.goal.as_ident() == Some(self.name) {
                        return Ok(Assumption::Fact {
                            fact: freshen(phi, scope),
                            hidden: *hidden,
                        });
                    }
                }
                Assumption::Fact {
                    fact: self.obligation(fact, scope)?,
                    hidden: *hidden,
                }
            }
            Assumption::Def { name, def, hidden } => {
                let def = match def {
                    Definable::Obligation(o) => {
                        Definable::Obligation(Box::new(self.obligation(o, scope)?))
                    }
                    Definable::Lambda { params, body } => {
                        if params.iter().any(|p| p == self.name) {
                            def.clone()
                        } else {
                            Definable::Lambda {
                                params: params.clone(),
                                body: self.expr(body)?,
                            }
                        }
                    }
                };
                Assumption::Def {
                    name: name.clone(),
                    def,
                    hidden: *hidden,
                }
            }
        })
    }

    fn obligation(&self, o: &Obligation, scope: &BTreeSet<String>) -> Result<Obligation, MetaError> {
        let mut scope = scope.clone();
        let mut ctx = Vec::new();
        let mut shadowed = false;
        for a in o.context.iter() {
            if shadowed {
                ctx.push(a.clone());
                continue;
            }
            ctx.push(self.assumption(a, &scope)?);
            if let Some(b) = a.binds() {
                scope.insert(b.to_string());
                shadowed |= b == self.name;
            }
        }
        let goal = if shadowed {
            o.goal.clone()
        } else {
            self.expr(&o.goal)?
        };
        Ok(Obligation::new(Context(ctx), goal))
    }

    fn expr(&self, e: &Expr) -> Result<Expr, MetaError> {
        let mut avoid = BTreeSet::new();
        all_identifiers_into(e, &mut avoid);
        all_identifiers_into(&self.body, &mut avoid);
        avoid.extend(self.params.iter().cloned());
        self.go(e, &mut avoid)
    }

    fn go(&self, e: &Expr, avoid: &mut BTreeSet<String>) -> Result<Expr, MetaError> {
        let kind = match &e.kind {
            ExprKind::Ident(n) if n == self.name => {
                if !self.params.is_empty() {
                    return Err(MetaError::ArityMismatch {
                        name: n.clone(),
                        expected: self.params.len(),
                        found: 0,
                    });
                }
                return Ok(self.body.clone());
            }
            ExprKind::OpApp(n, args) if n == self.name => {
                if args.len() != self.params.len() {
                    return Err(MetaError::ArityMismatch {
                        name: n.clone(),
                        expected: self.params.len(),
                        found: args.len(),
                    });
                }
                let mut m = BTreeMap::new();
                for (p, a) in self.params.iter().zip(args) {
                    m.insert(p.clone(), self.go(a, avoid)?);
                }
                return Ok(subst_many(&self.body, &m));
            }
            ExprKind::Ident(_) | ExprKind::Bool(_) => return Ok(e.clone()),
            ExprKind::OpApp(n, args) => ExprKind::OpApp(
                n.clone(),
                args.iter().map(|a| self.go(a, avoid)).collect::<Result<_, _>>()?,
            ),
            ExprKind::Not(a) => ExprKind::Not(Box::new(self.go(a, avoid)?)),
            ExprKind::Powerset(a) => ExprKind::Powerset(Box::new(self.go(a, avoid)?)),
            ExprKind::Binary(op, a, b) => {
                ExprKind::Binary(*op, Box::new(self.go(a, avoid)?), Box::new(self.go(b, avoid)?))
            }
            ExprKind::FnApp(a, b) => {
                ExprKind::FnApp(Box::new(self.go(a, avoid)?), Box::new(self.go(b, avoid)?))
            }
            ExprKind::FnSpace(a, b) => {
                ExprKind::FnSpace(Box::new(self.go(a, avoid)?), Box::new(self.go(b, avoid)?))
            }
            ExprKind::SetEnum(items) => ExprKind::SetEnum(
                items.iter().map(|a| self.go(a, avoid)).collect::<Result<_, _>>()?,
            ),
            ExprKind::Quant(q, bs, body) => {
                let mut bs = bs.clone();
                let mut body = (**body).clone();
                let mut out = Vec::new();
                let mut shadowed = false;
                for k in 0..bs.len() {
                    let domain = match (&bs[k].domain, shadowed) {
                        (Some(d), false) => Some(self.go(d, avoid)?),
                        (d, _) => d.clone(),
                    };
                    let mut name = bs[k].name.clone();
                    if !shadowed && name == self.name {
                        shadowed = true;
                    } else if !shadowed && self.body_free.contains(&name) {
                        let fresh = fresh_name(&name, avoid);
                        avoid.insert(fresh.clone());
                        for later in bs.iter_mut().skip(k + 1) {
                            if let Some(d) = &later.domain {
                                later.domain = Some(rename(d, &name, &fresh));
                            }
                        }
                        body = rename(&body, &name, &fresh);
                        name = fresh;
                    }
                    out.push(Binder { name, domain });
                }
                let body = if shadowed { body } else { self.go(&body, avoid)? };
                ExprKind::Quant(*q, out, Box::new(body))
            }
            ExprKind::SetFilter { var, domain, pred } => {
                let domain = self.go(domain, avoid)?;
                let (var, pred) = self.scoped(var, pred, avoid)?;
                ExprKind::SetFilter {
                    var,
                    domain: Box::new(domain),
                    pred: Box::new(pred),
                }
            }
            ExprKind::SetMap { body, var, domain } => {
                let domain = self.go(domain, avoid)?;
                let (var, body) = self.scoped(var, body, avoid)?;
                ExprKind::SetMap {
                    body: Box::new(body),
                    var,
                    domain: Box::new(domain),
                }
            }
        };
        Ok(Expr::new(kind, e.span))
    }

    fn scoped(
        &self,
        var: &str,
        inner: &Expr,
        avoid: &mut BTreeSet<String>,
    ) -> Result<(String, Expr), MetaError> {
        if var == self.name {
            return Ok((var.to_string(), inner.clone()));
        }
        if self.body_free.contains(var) {
            let fresh = fresh_name(var, avoid);
            avoid.insert(fresh.clone());
            let inner = rename(inner, var, &fresh);
            return Ok((fresh.clone(), self.go(&inner, avoid)?));
        }
        Ok((var.to_string(), self.go(inner, avoid)?))
    }
}

/// Renames free occurrences of `from` (as identifier or operator head) to a
/// name that occurs nowhere in `e`.
pub(crate) fn rename(e: &Expr, from: &str, to: &str) -> Expr {
    let kind = match &e.kind {
        ExprKind::Ident(n) if n == from => ExprKind::Ident(to.to_string()),
        ExprKind::Ident(_) | ExprKind::Bool(_) => e.kind.clone(),
        ExprKind::OpApp(n, args) => ExprKind::OpApp(
            if n == from { to.to_string() } else { n.clone() },
            args.iter().map(|a| rename(a, from, to)).collect(),
        ),
        ExprKind::Not(a) => ExprKind::Not(Box::new(rename(a, from, to))),
        ExprKind::Powerset(a) => ExprKind::Powerset(Box::new(rename(a, from, to))),
        ExprKind::Binary(op, a, b) => ExprKind::Binary(
            *op,
            Box::new(rename(a, from, to)),
            Box::new(rename(b, from, to)),
        ),
        ExprKind::FnApp(a, b) => {
            ExprKind::FnApp(Box::new(rename(a, from, to)), Box::new(rename(b, from, to)))
        }
        ExprKind::FnSpace(a, b) => {
            ExprKind::FnSpace(Box::new(rename(a, from, to)), Box::new(rename(b, from, to)))
        }
        ExprKind::SetEnum(items) => {
            ExprKind::SetEnum(items.iter().map(|a| rename(a, from, to)).collect())
        }
        ExprKind::Quant(q, bs, body) => {
            let mut out = Vec::new();
            let mut shadowed = false;
            for b in bs {
                let domain = match (&b.domain, shadowed) {
                    (Some(d), false) => Some(rename(d, from, to)),
                    (d, _) => d.clone(),
                };
                shadowed |= b.name == from;
                out.push(Binder {
                    name: b.name.clone(),
                    domain,
                });
            }
            let body = if shadowed {
                (**body).clone()
            } else {
                rename(body, from, to)
            };
            ExprKind::Quant(*q, out, Box::new(body))
        }
        ExprKind::SetFilter { var, domain, pred } => ExprKind::SetFilter {
            var: var.clone(),
            domain: Box::new(rename(domain, from, to)),
            pred: Box::new(if var == from {
                (**pred).clone()
            } else {
                rename(pred, from, to)
            }),
        },
        ExprKind::SetMap { body, var, domain } => ExprKind::SetMap {
            body: Box::new(if var == from {
                (**body).clone()
            } else {
                rename(body, from, to)
            }),
            var: var.clone(),
            domain: Box::new(rename(domain, from, to)),
        },
    };
    Expr::new(kind, e.span)
}

fn rename_obligation(o: &Obligation, from: &str, to: &str) -> Obligation {
    let mut ctx = Vec::new();
    let mut shadowed = false;
    for a in o.context.iter() {
        if shadowed {
            ctx.push(a.clone());
            continue;
        }
        ctx.push(match a {
            Assumption::New(_) => a.clone(),
            Assumption::Fact { fact, hidden } => Assumption::Fact {
                fact: rename_obligation(fact, from, to),
                hidden: *hidden,
            },
            Assumption::Def { name, def, hidden } => Assumption::Def {
                name: name.clone(),
                def: match def {
                    Definable::Obligation(x) => {
                        Definable::Obligation(Box::new(rename_obligation(x, from, to)))
                    }
                    Definable::Lambda { params, body } if !params.iter().any(|p| p == from) => {
                        Definable::Lambda {
                            params: params.clone(),
                            body: rename(body, from, to),
                        }
                    }
                    other => other.clone(),
                },
                hidden: *hidden,
            },
        });
        shadowed |= a.binds() == Some(from);
    }
    let goal = if shadowed {
        o.goal.clone()
    } else {
        rename(&o.goal, from, to)
    };
    Obligation::new(Context(ctx), goal)
}

/// Renames the context binders of `o` that clash with `scope`.
fn freshen(o: &Obligation, scope: &BTreeSet<String>) -> Obligation {
    let mut avoid = scope.clone();
    collect_obligation_ids(o, &mut avoid);
    let mut cur = o.clone();
    for i in 0..cur.context.len() {
        let Some(b) = cur.context.0[i].binds().map(str::to_string) else {
            continue;
        };
        if !scope.contains(&b) {
            continue;
        }
        let fresh = fresh_name(&b, &avoid);
        avoid.insert(fresh.clone());
        let rest = Obligation::new(Context(cur.context.0[i + 1..].to_vec()), cur.goal.clone());
        let rest = rename_obligation(&rest, &b, &fresh);
        match &mut cur.context.0[i] {
            Assumption::New(x) => *x = fresh,
            Assumption::Def { name, .. } => *name = fresh,
            Assumption::Fact { .. } => unreachable!(),
        }
        cur.context.0.truncate(i + 1);
        cur.context.0.extend(rest.context.0);
        cur.goal = rest.goal;
    }
    cur
}

fn collect_obligation_ids(o: &Obligation, out: &mut BTreeSet<String>) {
    for a in o.context.iter() {
        match a {
            Assumption::New(x) => {
                out.insert(x.clone());
            }
            Assumption::Def { name, def, .. } => {
                out.insert(name.clone());
                match def {
                    Definable::Obligation(x) => collect_obligation_ids(x, out),
                    Definable::Lambda { params, body } => {
                        out.extend(params.iter().cloned());
                        all_identifiers_into(body, out);
                    }
                }
            }
            Assumption::Fact { fact, .. } => collect_obligation_ids(fact, out),
        }
    }
    all_identifiers_into(&o.goal, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta::pp_obligation;
    use crate::surface::{parse_expression, pp_expr};

    fn e(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn expands_constant() {
        let o = Obligation::new(
            Context(vec![
                Assumption::New("S".into()),
                Assumption::New("f".into()),
                Assumption::New("x".into()),
                Assumption::def("T", Definable::constant(e("{z \\in S : z \\notin f[z]}")), false),
            ]),
            e("f[x] # T"),
        );
        let x = expand_definition(&o, "T").unwrap();
        assert_eq!(pp_expr(&x.goal), "f[x] # {z \\in S : z \\notin f[z]}");
        assert_eq!(x.context.len(), 4);
    }

    #[test]
    fn expands_operator_with_arguments() {
        let o = Obligation::new(
            Context(vec![
                Assumption::New("a".into()),
                Assumption::def(
                    "R",
                    Definable::Lambda {
                        params: vec!["u".into(), "v".into()],
                        body: e("u = v"),
                    },
                    true,
                ),
            ]),
            e("R(a, a)"),
        );
        assert_eq!(pp_expr(&expand_definition(&o, "R").unwrap().goal), "a = a");
        let bad = Obligation::new(o.context.clone(), e("R(a)"));
        assert!(matches!(
            expand_definition(&bad, "R"),
            Err(MetaError::ArityMismatch { .. })
        ));
        assert_eq!(
            expand_definition(&o, "Q"),
            Err(MetaError::UnknownOperator("Q".into()))
        );
    }

    #[test]
    fn expansion_avoids_capture() {
        let o = Obligation::new(
            Context(vec![
                Assumption::New("y".into()),
                Assumption::def("D", Definable::constant(e("y")), false),
            ]),
            e("\\A y : y = D"),
        );
        let x = expand_definition(&o, "D").unwrap();
        assert_eq!(pp_expr(&x.goal), "\\A y1 : y1 = y");
    }

    #[test]
    fn unused_definition_untouched() {
        let o = Obligation::new(
            Context(vec![Assumption::def("D", Definable::constant(e("TRUE")), false)]),
            e("FALSE"),
        );
        let x = expand_definition(&o, "D").unwrap();
        assert_eq!(x, o);
    }

    #[test]
    fn fact_label_is_inlined() {
        let lbl = Obligation::new(
            Context(vec![Assumption::New("x".into()), Assumption::fact(e("x \\in S"))]),
            e("f[x] # T"),
        );
        let o = Obligation::new(
            Context(vec![
                Assumption::New("S".into()),
                Assumption::New("f".into()),
                Assumption::New("T".into()),
                Assumption::def("<3>1", Definable::Obligation(Box::new(lbl.clone())), false),
                Assumption::hidden_fact(e("<3>1")),
            ]),
            e("<3>1"),
        );
        let x = expand_definition(&o, "<3>1").unwrap();
        assert_eq!(
            x.context.0[4],
            Assumption::Fact {
                fact: lbl,
                hidden: true
            }
        );
        assert_eq!(pp_expr(&x.goal), "\\A x : x \\in S => f[x] # T");
    }

    #[test]
    fn inlined_fact_is_freshened() {
        let lbl = Obligation::new(Context(vec![Assumption::New("x".into())]), e("x = x"));
        let o = Obligation::new(
            Context(vec![
                Assumption::def("<1>1", Definable::Obligation(Box::new(lbl)), false),
                Assumption::New("x".into()),
                Assumption::fact(e("<1>1")),
            ]),
            e("TRUE"),
        );
        let x = expand_all(&o).unwrap();
        assert_eq!(pp_obligation(&x), "ASSUME NEW x, (ASSUME NEW x1 PROVE x1 = x1) PROVE TRUE");
        assert!(crate::meta::check_well_formed(&x).is_ok());
    }

    #[test]
    fn expand_all_keeps_hidden() {
        let o = Obligation::new(
            Context(vec![
                Assumption::def("A", Definable::constant(e("TRUE")), false),
                Assumption::def("B", Definable::constant(e("FALSE")), true),
            ]),
            e("A /\\ B"),
        );
        let x = expand_all(&o).unwrap();
        assert_eq!(pp_obligation(&x), "ASSUME [B == FALSE] PROVE TRUE /\\ B");
    }
}
