//! Textual forms of obligations: the framework embedding and a readable
//! `ASSUME ... PROVE` rendering.

use super::{check_well_formed, Assumption, Context, Definable, MetaError, Obligation};
use crate::surface::{pp_expr, pp_operand};

/// The framework proposition for `o`. Hidden and usable assumptions are
/// rendered identically.
pub fn embed(o: &Obligation) -> Result<String, MetaError> {
    check_well_formed(o)?;
    Ok(embed_obligation(o))
}

fn embed_obligation(o: &Obligation) -> String {
    let mut s = String::new();
    for a in o.context.unhide().iter() {
        match a {
            Assumption::New(x) => {
                s.push_str("!!");
                s.push_str(x);
                s.push_str(". ");
            }
            Assumption::Def { name, def, .. } => {
                s.push_str(&format!("!!{name}. ({name} == {}) ==> ", embed_definable(def)));
            }
            Assumption::Fact { fact, .. } => {
                s.push_str(&format!("({}) ==> ", embed_obligation(fact)));
            }
        }
    }
    s.push_str(&pp_expr(&o.goal));
    s
}

fn embed_definable(d: &Definable) -> String {
    match d {
        Definable::Obligation(o) => embed_obligation(o),
        Definable::Lambda { params, body } if params.is_empty() => pp_expr(body),
        Definable::Lambda { params, body } => {
            format!("\\lambda {}. {}", params.join(" "), pp_expr(body))
        }
    }
}

/// `ASSUME h1, ..., hn PROVE e`, or just `e` for an empty context.
pub fn pp_obligation(o: &Obligation) -> String {
    if o.context.is_empty() {
        return pp_expr(&o.goal);
    }
    format!("ASSUME {} PROVE {}", pp_context(&o.context), pp_expr(&o.goal))
}

pub fn pp_context(c: &Context) -> String {
    c.iter().map(pp_assumption).collect::<Vec<_>>().join(", ")
}

fn nested(o: &Obligation) -> String {
    if o.context.is_empty() {
        pp_operand(&o.goal)
    } else {
        format!("({})", pp_obligation(o))
    }
}

pub fn pp_definable(d: &Definable) -> String {
    match d {
        Definable::Obligation(o) => nested(o),
        Definable::Lambda { body, .. } => pp_operand(body),
    }
}

pub fn pp_assumption(a: &Assumption) -> String {
    let text = match a {
        Assumption::New(x) => return format!("NEW {x}"),
        Assumption::Def { name, def, .. } => match def {
            Definable::Lambda { params, .. } if !params.is_empty() => {
                format!("{name}({}) == {}", params.join(", "), pp_definable(def))
            }
            _ => format!("{name} == {}", pp_definable(def)),
        },
        Assumption::Fact { fact, .. } => nested(fact),
    };
    if a.is_hidden() {
        format!("[{text}]")
    } else {
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_expression, Expr};

    fn e(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn framework_example() {
        let o = Obligation::new(
            Context(vec![
                Assumption::New("P".into()),
                Assumption::Fact {
                    fact: Obligation::new(Context(vec![Assumption::New("x".into())]), e("P(x)")),
                    hidden: true,
                },
            ]),
            e("\\A x : P(x)"),
        );
        assert_eq!(embed(&o).unwrap(), "!!P. (!!x. P(x)) ==> \\A x : P(x)");
    }

    #[test]
    fn bare_goal() {
        assert_eq!(embed(&Obligation::goal(e("TRUE"))).unwrap(), "TRUE");
    }

    #[test]
    fn definitions() {
        let o = Obligation::new(
            Context(vec![
                Assumption::New("S".into()),
                Assumption::def(
                    "R",
                    Definable::Lambda {
                        params: vec!["a".into(), "b".into()],
                        body: e("a \\in b"),
                    },
                    true,
                ),
            ]),
            e("R(S, S)"),
        );
        assert_eq!(
            embed(&o).unwrap(),
            "!!S. !!R. (R == \\lambda a b. a \\in b) ==> R(S, S)"
        );
        assert_eq!(pp_obligation(&o), "ASSUME NEW S, [R(a, b) == a \\in b] PROVE R(S, S)");
    }

    #[test]
    fn ill_formed_rejected() {
        assert!(matches!(
            embed(&Obligation::goal(e("x"))),
            Err(MetaError::NotWellFormed(_))
        ));
    }
}
