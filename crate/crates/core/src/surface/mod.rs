//! Concrete syntax: lexing, parsing, level validation and printing.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

use std::collections::BTreeSet;

pub use ast::*;
pub use parser::{parse_expression, parse_theorem};
pub use printer::{pp_binders, pp_expr, pp_goal_form, pp_operand, pp_proof, pp_theorem};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}{}", fmt_expected(.expected))]
    Syntax {
        line: u32,
        col: u32,
        message: String,
        expected: Vec<String>,
    },
    #[error("{line}:{col}: level error: {message}")]
    Level { line: u32, col: u32, message: String },
}

fn fmt_expected(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", expected.join(", "))
    }
}

impl ParseError {
    pub fn position(&self) -> (u32, u32) {
        match self {
            ParseError::Syntax { line, col, .. } | ParseError::Level { line, col, .. } => {
                (*line, *col)
            }
        }
    }

    pub fn is_level_error(&self) -> bool {
        matches!(self, ParseError::Level { .. })
    }
}

/// Identifiers with at least one free occurrence in `e`.
pub fn free_identifiers(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free(e, &mut bound, &mut out);
    out
}

fn collect_free(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::Ident(n) => {
            if !bound.iter().any(|b| b == n) {
                out.insert(n.clone());
            }
        }
        ExprKind::Bool(_) => {}
        ExprKind::OpApp(n, args) => {
            if !bound.iter().any(|b| b == n) {
                out.insert(n.clone());
            }
            for a in args {
                collect_free(a, bound, out);
            }
        }
        ExprKind::Not(a) | ExprKind::Powerset(a) => collect_free(a, bound, out),
        ExprKind::Binary(_, a, b) | ExprKind::FnApp(a, b) | ExprKind::FnSpace(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        ExprKind::Quant(_, binders, body) => {
            let mark = bound.len();
            for b in binders {
                if let Some(d) = &b.domain {
                    collect_free(d, bound, out);
                }
                bound.push(b.name.clone());
            }
            collect_free(body, bound, out);
            bound.truncate(mark);
        }
        ExprKind::SetFilter { var, domain, pred } => {
            collect_free(domain, bound, out);
            bound.push(var.clone());
            collect_free(pred, bound, out);
            bound.pop();
        }
        ExprKind::SetMap { body, var, domain } => {
            collect_free(domain, bound, out);
            bound.push(var.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        ExprKind::SetEnum(items) => {
            for i in items {
                collect_free(i, bound, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(s: &str) -> Vec<String> {
        free_identifiers(&parse_expression(s).unwrap())
            .into_iter()
            .collect()
    }

    #[test]
    fn free_identifiers_examples() {
        assert_eq!(fv("\\A x : P(x)"), vec!["P"]);
        assert_eq!(fv("{z \\in S : z \\notin f[z]}"), vec!["S", "f"]);
        assert_eq!(fv("x = y"), vec!["x", "y"]);
    }

    #[test]
    fn binder_domain_sees_outer_scope() {
        assert_eq!(fv("\\A x \\in x : x"), vec!["x"]);
        assert_eq!(fv("\\A x \\in S, y \\in x : y"), vec!["S"]);
    }

    #[test]
    fn map_binds_in_body_only() {
        assert_eq!(fv("{f[x] : x \\in x}"), vec!["f", "x"]);
    }
}
