//! Independent structural check of a derivation: every node must be an
//! instance of its rule.

use super::{expand_for_matching, Derivation, Judgement, LeafKind, LeafObligation, Premise, Rule};
use crate::meta::{alpha_eq, reflect_binders, substitute, Assumption, Context, Definable, Obligation};
use crate::surface::{BinOp, Expr, ExprKind, Quant};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeError {
    pub path: String,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.path, self.rule, self.message)
    }
}

/// Checks that `d` derives `root` and that every node matches its rule.
pub fn validate(d: &Derivation, root: &Obligation) -> Vec<ShapeError> {
    let mut errs = Vec::new();
    if d.judgement != Judgement::Claim(root.clone()) {
        errs.push(ShapeError {
            path: d.provenance.path.clone(),
            rule: d.rule,
            message: "root judgement is not the theorem's obligation".into(),
        });
    }
    d.walk(&mut |n| {
        if let Err(m) = node(n) {
            errs.push(ShapeError {
                path: n.provenance.path.clone(),
                rule: n.rule,
                message: m,
            });
        }
    });
    errs
}

type R = Result<(), String>;

fn ensure(c: bool, msg: &str) -> R {
    if c {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn claim(d: &Derivation) -> Result<&Obligation, String> {
    match &d.judgement {
        Judgement::Claim(o) => Ok(o),
        _ => Err(format!("{} must conclude a claim", d.rule)),
    }
}

fn transformation(d: &Derivation) -> Result<(&Obligation, &Obligation), String> {
    match &d.judgement {
        Judgement::Transformation { input, output } => Ok((input, output)),
        _ => Err(format!("{} must conclude a transformation", d.rule)),
    }
}

fn shape(d: &Derivation) -> String {
    d.premises
        .iter()
        .map(|p| match p {
            Premise::Derivation(_) => 'D',
            Premise::Leaf(_) => 'L',
        })
        .collect()
}

fn deriv(d: &Derivation, i: usize) -> &Derivation {
    match &d.premises[i] {
        Premise::Derivation(x) => x,
        Premise::Leaf(_) => unreachable!(),
    }
}

fn leaf(d: &Derivation, i: usize) -> &LeafObligation {
    match &d.premises[i] {
        Premise::Leaf(l) => l,
        Premise::Derivation(_) => unreachable!(),
    }
}

fn expect_shape(d: &Derivation, s: &str) -> R {
    let got = shape(d);
    if got == s {
        Ok(())
    } else {
        Err(format!("expected premises {s}, found {got}"))
    }
}

/// `c` is `base` followed by exactly `extra`.
fn extends(c: &Context, base: &Context, extra: &[Assumption]) -> bool {
    c.len() == base.len() + extra.len()
        && c.0[..base.len()] == base.0[..]
        && c.0[base.len()..] == extra[..]
}

fn same_but_def_visibility(a: &Context, b: &Context) -> bool {
    a.len() == b.len()
        && a.iter().zip(b.iter()).all(|(x, y)| match (x, y) {
            (Assumption::Def { name: n1, def: d1, .. }, Assumption::Def { name: n2, def: d2, .. }) => {
                n1 == n2 && d1 == d2
            }
            _ => x == y,
        })
}

fn node(d: &Derivation) -> R {
    match d.rule {
        Rule::Obvious | Rule::Omitted => {
            let o = claim(d)?;
            expect_shape(d, "L")?;
            let l = leaf(d, 0);
            ensure(l.obligation == *o, "leaf differs from the claim")?;
            ensure(l.omitted == (d.rule == Rule::Omitted), "omission flag mismatch")
        }
        Rule::By => {
            let o = claim(d)?;
            expect_shape(d, "DL")?;
            let u = deriv(d, 0);
            ensure(u.rule == Rule::UseDefs, "BY must start with a USE")?;
            let (i, out) = transformation(u)?;
            ensure(i == o, "USE input differs from the claim")?;
            ensure(leaf(d, 1).obligation == *out, "BY leaf differs from the USE output")
        }
        Rule::Qed => {
            let o = claim(d)?;
            expect_shape(d, "D")?;
            ensure(claim(deriv(d, 0))? == o, "QED proof proves a different obligation")
        }
        Rule::NonQed => {
            let o = claim(d)?;
            expect_shape(d, "DD")?;
            let (i, out) = transformation(deriv(d, 0))?;
            ensure(i == o, "step input differs from the claim")?;
            ensure(claim(deriv(d, 1))? == out, "rest of the proof does not continue from the step output")
        }
        Rule::UseDefs | Rule::HideDefs => {
            let (i, out) = transformation(d)?;
            expect_shape(d, "D")?;
            let (ii, io) = transformation(deriv(d, 0))?;
            if d.rule == Rule::UseDefs {
                ensure(ii.goal == i.goal && same_but_def_visibility(&ii.context, &i.context), "USE DEFS premise input mismatch")?;
                ensure(io == out, "USE DEFS output mismatch")
            } else {
                ensure(ii == i, "HIDE DEFS premise input mismatch")?;
                ensure(out.goal == io.goal && same_but_def_visibility(&out.context, &io.context), "HIDE DEFS output mismatch")
            }
        }
        Rule::Use0 | Rule::Hide0 | Rule::Take0 | Rule::Witness0 => {
            let (i, out) = transformation(d)?;
            expect_shape(d, "")?;
            ensure(i == out, "empty step must be the identity")
        }
        Rule::Use1 => {
            let (i, out) = transformation(d)?;
            expect_shape(d, "DL")?;
            let (pi, po) = transformation(deriv(d, 0))?;
            ensure(pi == i, "premise input mismatch")?;
            let side = leaf(d, 1);
            ensure(side.kind == LeafKind::UseFactSide, "side leaf kind")?;
            ensure(side.obligation.context == po.context.unhide(), "side leaf context must be the unhidden context")?;
            let fact = Assumption::fact(side.obligation.goal.clone());
            ensure(extends(&out.context, &po.context, &[fact]) && out.goal == po.goal, "output must add the cited fact")
        }
        Rule::Hide1 => {
            let (i, out) = transformation(d)?;
            expect_shape(d, "D")?;
            let (pi, po) = transformation(deriv(d, 0))?;
            ensure(po == out, "output mismatch")?;
            ensure(pi.goal == i.goal && pi.context.len() == i.context.len(), "premise input mismatch")?;
            let mut hidden = 0;
            for (a, b) in i.context.iter().zip(pi.context.iter()) {
                if a != b {
                    ensure(
                        matches!(a, Assumption::Fact { hidden: false, .. }) && *b == a.clone().hidden_copy(),
                        "only usable facts may be hidden",
                    )?;
                    hidden += 1;
                }
            }
            ensure(hidden > 0, "HIDE must hide a fact")
        }
        Rule::Define => {
            let (i, out) = transformation(d)?;
            expect_shape(d, "")?;
            ensure(out.goal == i.goal && out.context.len() == i.context.len() + 1, "DEFINE adds one definition")?;
            match out.context.0.last() {
                Some(Assumption::Def { name, def: Definable::Lambda { .. }, hidden: true }) => {
                    ensure(!i.context.binds(name), "DEFINE name already bound")?;
                    ensure(out.context.0[..i.context.len()] == i.context.0[..], "DEFINE changes the context")
                }
                _ => Err("DEFINE must add a hidden definition".into()),
            }
        }
        Rule::Take1 | Rule::Take2 => {
            let (i, out) = transformation(d)?;
            let bounded = d.rule == Rule::Take2;
            expect_shape(d, if bounded { "LD" } else { "D" })?;
            let next = deriv(d, if bounded { 1 } else { 0 });
            let (ni, no) = transformation(next)?;
            ensure(no == out, "output mismatch")?;
            let goal = expand_for_matching(i).goal;
            let (x, body) = goal.split_quant(Quant::Forall).ok_or("goal is not universal")?;
            ensure(x.domain.is_some() == bounded, "quantifier boundedness mismatch")?;
            let extra = &ni.context.0[i.context.len().min(ni.context.len())..];
            let Some(Assumption::New(u)) = extra.first() else {
                return Err("TAKE must declare a constant".into());
            };
            ensure(!i.context.binds(u), "TAKE constant is not fresh")?;
            ensure(alpha_eq(&ni.goal, &substitute(&body, &x.name, &Expr::ident(u.clone()))), "TAKE goal mismatch")?;
            if bounded {
                let side = &leaf(d, 0).obligation;
                let ExprKind::Binary(BinOp::Subseteq, s, t) = &side.goal.kind else {
                    return Err("side leaf must be a subset claim".into());
                };
                ensure(side.context == i.context && **s == x.domain.clone().unwrap(), "side leaf mismatch")?;
                let mem = Assumption::fact(Expr::mem(Expr::ident(u.clone()), (**t).clone()));
                ensure(extends(&ni.context, &i.context, &[Assumption::New(u.clone()), mem]), "TAKE context mismatch")
            } else {
                ensure(extends(&ni.context, &i.context, &[Assumption::New(u.clone())]), "TAKE context mismatch")
            }
        }
        Rule::Witness1 | Rule::Witness2 => {
            let (i, out) = transformation(d)?;
            let bounded = d.rule == Rule::Witness2;
            expect_shape(d, if bounded { "LLD" } else { "D" })?;
            let next = deriv(d, if bounded { 2 } else { 0 });
            let (ni, no) = transformation(next)?;
            ensure(no == out, "output mismatch")?;
            let goal = expand_for_matching(i).goal;
            let (x, body) = goal.split_quant(Quant::Exists).ok_or("goal is not existential")?;
            ensure(x.domain.is_some() == bounded, "quantifier boundedness mismatch")?;
            if bounded {
                let sub = &leaf(d, 0).obligation;
                let mem = &leaf(d, 1).obligation;
                let ExprKind::Binary(BinOp::Subseteq, t, s) = &sub.goal.kind else {
                    return Err("first side leaf must be a subset claim".into());
                };
                let ExprKind::Binary(BinOp::In, w, t2) = &mem.goal.kind else {
                    return Err("second side leaf must be a membership claim".into());
                };
                ensure(sub.context == i.context && mem.context == i.context, "side leaf context mismatch")?;
                ensure(**s == x.domain.clone().unwrap() && t == t2, "side leaf sets mismatch")?;
                ensure(extends(&ni.context, &i.context, &[Assumption::fact(mem.goal.clone())]), "WITNESS context mismatch")?;
                ensure(alpha_eq(&ni.goal, &substitute(&body, &x.name, w)), "WITNESS goal mismatch")
            } else {
                ensure(ni.context == i.context, "WITNESS context mismatch")
            }
        }
        Rule::Have => {
            let (i, out) = transformation(d)?;
            expect_shape(d, "L")?;
            let goal = expand_for_matching(i).goal;
            let ExprKind::Binary(BinOp::Implies, e, f) = &goal.kind else {
                return Err("goal is not an implication".into());
            };
            let side = &leaf(d, 0).obligation;
            ensure(extends(&side.context, &i.context, &[Assumption::fact((**e).clone())]), "HAVE side context mismatch")?;
            ensure(extends(&out.context, &i.context, &[Assumption::fact(side.goal.clone())]), "HAVE output context mismatch")?;
            ensure(out.goal == **f, "HAVE output goal mismatch")
        }
        Rule::Assert1 | Rule::Assert2 | Rule::Suffices1 | Rule::Suffices2 => assertion(d),
        Rule::Case => {
            let (i, out) = transformation(d)?;
            expect_shape(d, "D")?;
            let a = deriv(d, 0);
            ensure(matches!(a.rule, Rule::Assert1 | Rule::Assert2), "CASE must be an assertion")?;
            ensure(transformation(a)? == (i, out), "CASE judgement mismatch")?;
            let sub = claim(deriv(a, 0))?;
            ensure(sub.goal == i.goal, "CASE must keep the goal")
        }
        Rule::Pick => {
            let (i, out) = transformation(d)?;
            expect_shape(d, "D")?;
            let sub = claim(deriv(d, 0))?;
            ensure(sub.context == i.context, "PICK subclaim context mismatch")?;
            let (bs, p) = split_exists(&sub.goal);
            let mut extra = reflect_binders(&bs).map_err(|e| e.to_string())?.0;
            extra.push(Assumption::fact(p));
            ensure(extends(&out.context, &i.context, &extra) && out.goal == i.goal, "PICK output mismatch")
        }
    }
}

fn split_exists(e: &Expr) -> (Vec<crate::surface::Binder>, Expr) {
    match &e.kind {
        ExprKind::Quant(Quant::Exists, bs, body) => (bs.clone(), (**body).clone()),
        _ => (Vec::new(), e.clone()),
    }
}

fn assertion(d: &Derivation) -> R {
    let (i, out) = transformation(d)?;
    expect_shape(d, "D")?;
    let sub = claim(deriv(d, 0))?;
    let n = i.context.len();
    let neg = Assumption::hidden_fact(Expr::not(i.goal.clone()));
    let labeled = matches!(d.rule, Rule::Assert2 | Rule::Suffices2);
    let is_assert = matches!(d.rule, Rule::Assert1 | Rule::Assert2);
    // The hidden negated goal sits in the subclaim for assertions and in
    // the output for SUFFICES.
    let (negated, other) = if is_assert { (sub, out) } else { (out, sub) };
    ensure(negated.context.len() > n && negated.context.0[..n] == i.context.0[..], "context prefix mismatch")?;
    ensure(other.goal == i.goal, "goal must be kept")?;
    let (phi, skip) = if labeled {
        let Some(Assumption::Def { name, def: Definable::Obligation(phi), hidden: false }) = negated.context.0.get(n) else {
            return Err("labeled step must define its label".into());
        };
        ensure(!i.context.binds(name), "label already bound")?;
        let def = negated.context.0[n].clone();
        ensure(
            extends(&other.context, &i.context, &[def, Assumption::hidden_fact(Expr::ident(name.clone()))]),
            "labeled step must add the hidden label fact",
        )?;
        ((**phi).clone(), n + 1)
    } else {
        let Some(Assumption::Fact { fact, hidden: false }) = other.context.0.get(n) else {
            return Err("step must add the asserted fact".into());
        };
        ensure(other.context.len() == n + 1, "step adds exactly one fact")?;
        (fact.clone(), n)
    };
    ensure(negated.context.0.get(skip) == Some(&neg), "hidden negated goal missing")?;
    ensure(negated.context.0[skip + 1..] == phi.context.0[..], "asserted context mismatch")?;
    ensure(negated.goal == phi.goal, "asserted goal mismatch")
}

trait HiddenCopy {
    fn hidden_copy(self) -> Self;
}

impl HiddenCopy for Assumption {
    fn hidden_copy(self) -> Self {
        match self {
            Assumption::Fact { fact, .. } => Assumption::Fact { fact, hidden: true },
            a => a,
        }
    }
}
