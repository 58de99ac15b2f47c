//! Capture-avoiding substitution and alpha-equivalence on expressions.

use crate::surface::{free_identifiers, Binder, Expr, ExprKind};
use std::collections::{BTreeMap, BTreeSet};

/// `e[x := u]`
pub fn substitute(e: &Expr, x: &str, u: &Expr) -> Expr {
    let mut m = BTreeMap::new();
    m.insert(x.to_string(), u.clone());
    subst_many(e, &m)
}

/// Simultaneous capture-avoiding substitution of identifiers.
pub fn subst_many(e: &Expr, map: &BTreeMap<String, Expr>) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    let mut avoid = BTreeSet::new();
    for u in map.values() {
        all_identifiers_into(u, &mut avoid);
    }
    all_identifiers_into(e, &mut avoid);
    let mut s = Subst {
        map: map.clone(),
        avoid,
    };
    s.expr(e)
}

/// Every identifier spelled anywhere in `e`, bound or free.
pub fn all_identifiers(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    all_identifiers_into(e, &mut out);
    out
}

pub fn all_identifiers_into(e: &Expr, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::Ident(n) => {
            out.insert(n.clone());
        }
        ExprKind::Bool(_) => {}
        ExprKind::OpApp(n, args) => {
            out.insert(n.clone());
            args.iter().for_each(|a| all_identifiers_into(a, out));
        }
        ExprKind::Not(a) | ExprKind::Powerset(a) => all_identifiers_into(a, out),
        ExprKind::Binary(_, a, b) | ExprKind::FnApp(a, b) | ExprKind::FnSpace(a, b) => {
            all_identifiers_into(a, out);
            all_identifiers_into(b, out);
        }
        ExprKind::Quant(_, bs, body) => {
            for b in bs {
                out.insert(b.name.clone());
                if let Some(d) = &b.domain {
                    all_identifiers_into(d, out);
                }
            }
            all_identifiers_into(body, out);
        }
        ExprKind::SetFilter { var, domain, pred } => {
            out.insert(var.clone());
            all_identifiers_into(domain, out);
            all_identifiers_into(pred, out);
        }
        ExprKind::SetMap { body, var, domain } => {
            out.insert(var.clone());
            all_identifiers_into(domain, out);
            all_identifiers_into(body, out);
        }
        ExprKind::SetEnum(items) => items.iter().for_each(|a| all_identifiers_into(a, out)),
    }
}

/// `base` itself if unused, else `base` followed by the smallest numeric
/// suffix not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !avoid.contains(c))
        .unwrap()
}

struct Subst {
    map: BTreeMap<String, Expr>,
    avoid: BTreeSet<String>,
}

impl Subst {
    fn captures(&self, name: &str) -> bool {
        self.map
            .values()
            .any(|u| free_identifiers(u).contains(name))
    }

    /// Enters the scope of binder `name`, returning the name to use and the
    /// entries to restore on exit.
    fn bind(&mut self, name: &str) -> (String, Option<(String, Option<Expr>)>) {
        let old = self.map.remove(name);
        if self.captures(name) {
            let fresh = fresh_name(name, &self.avoid);
            self.avoid.insert(fresh.clone());
            self.map.insert(name.to_string(), Expr::ident(fresh.clone()));
            (fresh, Some((name.to_string(), old)))
        } else {
            let restore = old.map(|o| (name.to_string(), Some(o)));
            (name.to_string(), restore)
        }
    }

    fn unbind(&mut self, restore: Option<(String, Option<Expr>)>) {
        if let Some((name, old)) = restore {
            self.map.remove(&name);
            if let Some(o) = old {
                self.map.insert(name, o);
            }
        }
    }

    fn expr(&mut self, e: &Expr) -> Expr {
        if self.map.is_empty() {
            return e.clone();
        }
        let kind = match &e.kind {
            ExprKind::Ident(n) => match self.map.get(n) {
                Some(u) => return u.clone(),
                None => e.kind.clone(),
            },
            ExprKind::Bool(_) => e.kind.clone(),
            ExprKind::OpApp(n, args) => {
                let head = match self.map.get(n).and_then(|u| u.as_ident()) {
                    Some(m) => m.to_string(),
                    None => n.clone(),
                };
                ExprKind::OpApp(head, args.iter().map(|a| self.expr(a)).collect())
            }
            ExprKind::Not(a) => ExprKind::Not(Box::new(self.expr(a))),
            ExprKind::Powerset(a) => ExprKind::Powerset(Box::new(self.expr(a))),
            ExprKind::Binary(op, a, b) => {
                ExprKind::Binary(*op, Box::new(self.expr(a)), Box::new(self.expr(b)))
            }
            ExprKind::FnApp(a, b) => {
                ExprKind::FnApp(Box::new(self.expr(a)), Box::new(self.expr(b)))
            }
            ExprKind::FnSpace(a, b) => {
                ExprKind::FnSpace(Box::new(self.expr(a)), Box::new(self.expr(b)))
            }
            ExprKind::Quant(q, bs, body) => {
                let mut restores = Vec::new();
                let mut nbs = Vec::new();
                for b in bs {
                    let domain = b.domain.as_ref().map(|d| self.expr(d));
                    let (name, r) = self.bind(&b.name);
                    restores.push(r);
                    nbs.push(Binder { name, domain });
                }
                let body = self.expr(body);
                for r in restores.into_iter().rev() {
                    self.unbind(r);
                }
                ExprKind::Quant(*q, nbs, Box::new(body))
            }
            ExprKind::SetFilter { var, domain, pred } => {
                let domain = self.expr(domain);
                let (v, r) = self.bind(var);
                let pred = self.expr(pred);
                self.unbind(r);
                ExprKind::SetFilter {
                    var: v,
                    domain: Box::new(domain),
                    pred: Box::new(pred),
                }
            }
            ExprKind::SetMap { body, var, domain } => {
                let domain = self.expr(domain);
                let (v, r) = self.bind(var);
                let body = self.expr(body);
                self.unbind(r);
                ExprKind::SetMap {
                    body: Box::new(body),
                    var: v,
                    domain: Box::new(domain),
                }
            }
            ExprKind::SetEnum(items) => ExprKind::SetEnum(items.iter().map(|a| self.expr(a)).collect()),
        };
        Expr::new(kind, e.span)
    }
}

/// Pairs of simultaneously bound names, innermost last.
#[derive(Default, Clone)]
pub struct AlphaEnv {
    pairs: Vec<(String, String)>,
}

impl AlphaEnv {
    pub fn push(&mut self, a: &str, b: &str) {
        self.pairs.push((a.to_string(), b.to_string()));
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn truncate(&mut self, n: usize) {
        self.pairs.truncate(n);
    }

    pub fn same_name(&self, a: &str, b: &str) -> bool {
        let ia = self.pairs.iter().rposition(|(x, _)| x == a);
        let ib = self.pairs.iter().rposition(|(_, y)| y == b);
        match (ia, ib) {
            (None, None) => a == b,
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }
}

pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    alpha_eq_in(a, b, &mut AlphaEnv::default())
}

pub fn alpha_eq_in(a: &Expr, b: &Expr, env: &mut AlphaEnv) -> bool {
    use ExprKind::*;
    match (&a.kind, &b.kind) {
        (Ident(x), Ident(y)) => env.same_name(x, y),
        (Bool(x), Bool(y)) => x == y,
        (OpApp(f, xs), OpApp(g, ys)) => {
            env.same_name(f, g)
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| alpha_eq_in(x, y, env))
        }
        (Not(x), Not(y)) | (Powerset(x), Powerset(y)) => alpha_eq_in(x, y, env),
        (Binary(o1, a1, b1), Binary(o2, a2, b2)) => {
            o1 == o2 && alpha_eq_in(a1, a2, env) && alpha_eq_in(b1, b2, env)
        }
        (FnApp(a1, b1), FnApp(a2, b2)) | (FnSpace(a1, b1), FnSpace(a2, b2)) => {
            alpha_eq_in(a1, a2, env) && alpha_eq_in(b1, b2, env)
        }
        (Quant(q1, bs1, body1), Quant(q2, bs2, body2)) => {
            if q1 != q2 || bs1.len() != bs2.len() {
                return false;
            }
            let mark = env.len();
            let mut ok = true;
            for (x, y) in bs1.iter().zip(bs2) {
                ok = match (&x.domain, &y.domain) {
                    (None, None) => true,
                    (Some(d1), Some(d2)) => alpha_eq_in(d1, d2, env),
                    _ => false,
                };
                if !ok {
                    break;
                }
                env.push(&x.name, &y.name);
            }
            ok = ok && alpha_eq_in(body1, body2, env);
            env.truncate(mark);
            ok
        }
        (
            SetFilter {
                var: v1,
                domain: d1,
                pred: p1,
            },
            SetFilter {
                var: v2,
                domain: d2,
                pred: p2,
            },
        ) => {
            if !alpha_eq_in(d1, d2, env) {
                return false;
            }
            env.push(v1, v2);
            let ok = alpha_eq_in(p1, p2, env);
            env.truncate(env.len() - 1);
            ok
        }
        (
            SetMap {
                body: b1,
                var: v1,
                domain: d1,
            },
            SetMap {
                body: b2,
                var: v2,
                domain: d2,
            },
        ) => {
            if !alpha_eq_in(d1, d2, env) {
                return false;
            }
            env.push(v1, v2);
            let ok = alpha_eq_in(b1, b2, env);
            env.truncate(env.len() - 1);
            ok
        }
        (SetEnum(xs), SetEnum(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_in(x, y, env))
        }
        _ => false,
    }
}
