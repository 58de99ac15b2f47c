//! Pretty-printer producing text the parser reads back.

use super::ast::*;
use std::fmt::Write;

const TOP: u8 = 0;
const EQUIV: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const NOT: u8 = 5;
const REL: u8 = 6;
const PREFIX: u8 = 7;
const POSTFIX: u8 = 8;

pub fn pp_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, TOP);
    s
}

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Quant(..) => TOP,
        ExprKind::Binary(op, ..) => match op {
            BinOp::Equiv => EQUIV,
            BinOp::Implies => IMPLIES,
            BinOp::Or => OR,
            BinOp::And => AND,
            _ => REL,
        },
        ExprKind::Not(_) => NOT,
        ExprKind::Powerset(_) => PREFIX,
        ExprKind::FnApp(..) => POSTFIX,
        _ => u8::MAX,
    }
}

fn write_expr(out: &mut String, e: &Expr, ctx: u8) {
    let own = prec(e);
    let paren = own < ctx;
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Ident(n) => out.push_str(n),
        ExprKind::Bool(true) => out.push_str("TRUE"),
        ExprKind::Bool(false) => out.push_str("FALSE"),
        ExprKind::OpApp(n, args) => {
            out.push_str(n);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, EQUIV);
            }
            out.push(')');
        }
        ExprKind::Not(a) => {
            out.push('~');
            write_expr(out, a, NOT);
        }
        ExprKind::Binary(op, a, b) => {
            let (l, r) = match op {
                BinOp::Equiv => (EQUIV, IMPLIES),
                BinOp::Implies => (OR, IMPLIES),
                BinOp::Or => (OR, AND),
                BinOp::And => (AND, NOT),
                _ => (PREFIX, PREFIX),
            };
            write_expr(out, a, l);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, b, r);
        }
        ExprKind::Quant(q, binders, body) => write_quant(out, *q, binders, body),
        ExprKind::Powerset(a) => {
            out.push_str("SUBSET ");
            write_expr(out, a, PREFIX);
        }
        ExprKind::SetFilter { var, domain, pred } => {
            let _ = write!(out, "{{{var} \\in ");
            write_expr(out, domain, PREFIX);
            out.push_str(" : ");
            write_expr(out, pred, TOP);
            out.push('}');
        }
        ExprKind::SetMap { body, var, domain } => {
            out.push('{');
            let needs_paren = matches!(
                &body.kind,
                ExprKind::Binary(BinOp::In, lhs, _) if lhs.as_ident().is_some()
            );
            if needs_paren {
                out.push('(');
                write_expr(out, body, TOP);
                out.push(')');
            } else {
                write_expr(out, body, EQUIV);
            }
            let _ = write!(out, " : {var} \\in ");
            write_expr(out, domain, EQUIV);
            out.push('}');
        }
        ExprKind::SetEnum(items) => {
            out.push('{');
            for (i, a) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a, EQUIV);
            }
            out.push('}');
        }
        ExprKind::FnApp(f, x) => {
            write_expr(out, f, POSTFIX);
            out.push('[');
            write_expr(out, x, TOP);
            out.push(']');
        }
        ExprKind::FnSpace(s, t) => {
            out.push('[');
            write_expr(out, s, EQUIV);
            out.push_str(" -> ");
            write_expr(out, t, EQUIV);
            out.push(']');
        }
    }
    if paren {
        out.push(')');
    }
}

fn write_quant(out: &mut String, q: Quant, binders: &[Binder], body: &Expr) {
    out.push_str(match q {
        Quant::Forall => "\\A ",
        Quant::Exists => "\\E ",
    });
    // An unbounded binder directly before a bounded one would be read as
    // sharing its domain, so such lists are printed as nested quantifiers.
    let split = binders
        .windows(2)
        .position(|w| w[0].domain.is_none() && w[1].domain.is_some())
        .map(|i| i + 1)
        .unwrap_or(binders.len());
    write_binders(out, &binders[..split]);
    out.push_str(" : ");
    if split < binders.len() {
        write_quant(out, q, &binders[split..], body);
    } else {
        write_expr(out, body, TOP);
    }
}

/// `e` as an item of a comma-separated list: quantifiers are parenthesized.
pub fn pp_operand(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, EQUIV);
    s
}

pub(crate) fn write_binders(out: &mut String, binders: &[Binder]) {
    for (i, b) in binders.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&b.name);
        if let Some(d) = &b.domain {
            out.push_str(" \\in ");
            write_expr(out, d, EQUIV);
        }
    }
}

pub fn pp_binders(binders: &[Binder]) -> String {
    let mut s = String::new();
    write_binders(&mut s, binders);
    s
}

pub fn pp_goal_form(g: &GoalForm) -> String {
    match g {
        GoalForm::Expr(e) => pp_expr(e),
        GoalForm::AssumeProve { assumptions, goal } => {
            let hyps: Vec<String> = assumptions
                .iter()
                .map(|h| match h {
                    Hypothesis::New { name, domain: None } => format!("NEW {name}"),
                    Hypothesis::New {
                        name,
                        domain: Some(d),
                    } => {
                        let mut s = format!("NEW {name} \\in ");
                        write_expr(&mut s, d, EQUIV);
                        s
                    }
                    Hypothesis::Fact(e) => {
                        let mut s = String::new();
                        write_expr(&mut s, e, EQUIV);
                        s
                    }
                })
                .collect();
            format!("ASSUME {} PROVE {}", hyps.join(", "), pp_expr(goal))
        }
    }
}

fn fact_list(facts: &[Expr], defs: &[String]) -> String {
    let mut parts = Vec::new();
    if !facts.is_empty() {
        parts.push(
            facts
                .iter()
                .map(|f| {
                    let mut s = String::new();
                    write_expr(&mut s, f, EQUIV);
                    s
                })
                .collect::<Vec<_>>()
                .join(", "),
        );
    }
    if !defs.is_empty() {
        parts.push(format!("DEF {}", defs.join(", ")));
    }
    parts.join(" ")
}

pub fn pp_proof(p: &Proof) -> String {
    let mut s = String::new();
    write_proof(&mut s, p, 0);
    s
}

fn write_proof(out: &mut String, p: &Proof, indent: usize) {
    match p {
        Proof::Obvious(_) => out.push_str(" OBVIOUS"),
        Proof::Omitted { explicit: true, .. } => out.push_str(" OMITTED"),
        Proof::Omitted { explicit: false, .. } => {}
        Proof::By { facts, defs, .. } => {
            out.push_str(" BY");
            let list = fact_list(facts, defs);
            if !list.is_empty() {
                out.push(' ');
                out.push_str(&list);
            }
        }
        Proof::Steps(steps) => {
            for st in steps {
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                write_step(out, st, indent);
            }
        }
    }
}

fn write_step(out: &mut String, st: &Step, indent: usize) {
    let _ = write!(out, "{}. ", st.token);
    let sub = |out: &mut String, p: &Proof| write_proof(out, p, indent + 1);
    match &st.kind {
        StepKind::Use { facts, defs } => {
            out.push_str("USE");
            let l = fact_list(facts, defs);
            if !l.is_empty() {
                out.push(' ');
                out.push_str(&l);
            }
        }
        StepKind::Hide { facts, defs } => {
            out.push_str("HIDE");
            let l = fact_list(facts, defs);
            if !l.is_empty() {
                out.push(' ');
                out.push_str(&l);
            }
        }
        StepKind::Define { name, params, body } => {
            out.push_str("DEFINE ");
            out.push_str(name);
            if !params.is_empty() {
                let _ = write!(out, "({})", params.join(", "));
            }
            out.push_str(" == ");
            out.push_str(&pp_expr(body));
        }
        StepKind::Have(e) => {
            out.push_str("HAVE ");
            out.push_str(&pp_expr(e));
        }
        StepKind::Take(bs) => {
            out.push_str("TAKE ");
            write_binders(out, bs);
        }
        StepKind::Witness(items) => {
            out.push_str("WITNESS ");
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                match &it.domain {
                    Some(d) => {
                        write_expr(out, &it.witness, PREFIX);
                        out.push_str(" \\in ");
                        write_expr(out, d, PREFIX);
                    }
                    None => write_expr(out, &it.witness, EQUIV),
                }
            }
        }
        StepKind::Assert { goal, proof } => {
            out.push_str(&pp_goal_form(goal));
            sub(out, proof);
        }
        StepKind::Suffices { goal, proof } => {
            out.push_str("SUFFICES ");
            out.push_str(&pp_goal_form(goal));
            sub(out, proof);
        }
        StepKind::Pick {
            binders,
            body,
            proof,
        } => {
            out.push_str("PICK ");
            write_binders(out, binders);
            out.push_str(" : ");
            out.push_str(&pp_expr(body));
            sub(out, proof);
        }
        StepKind::Case { cond, proof } => {
            out.push_str("CASE ");
            out.push_str(&pp_expr(cond));
            sub(out, proof);
        }
        StepKind::Qed { proof } => {
            out.push_str("QED");
            sub(out, proof);
        }
    }
}

pub fn pp_theorem(th: &Theorem) -> String {
    let mut s = String::from("THEOREM ");
    if let Some(n) = &th.name {
        let _ = write!(s, "{n} == ");
    }
    s.push_str(&pp_goal_form(&th.goal));
    write_proof(&mut s, &th.proof, 0);
    s.push('\n');
    s
}
