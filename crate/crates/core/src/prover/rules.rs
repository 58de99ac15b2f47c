//! Tableau expansion rules on signed formulas.

use super::term::{Head, Term};
use std::fmt;

/// `(true, t)` asserts `t`, `(false, t)` denies it.
pub type Signed = (bool, Term);

pub fn show(sf: &Signed) -> String {
    format!("{}{}", if sf.0 { '+' } else { '-' }, sf.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetRule {
    MemberFilter,
    MemberMap,
    MemberPowerset,
    MemberEnum,
    MemberFnSpace,
    Subseteq,
    Extensionality,
}

impl SetRule {
    const ALL: [SetRule; 7] = [
        SetRule::MemberFilter,
        SetRule::MemberMap,
        SetRule::MemberPowerset,
        SetRule::MemberEnum,
        SetRule::MemberFnSpace,
        SetRule::Subseteq,
        SetRule::Extensionality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SetRule::MemberFilter => "member-filter",
            SetRule::MemberMap => "member-map",
            SetRule::MemberPowerset => "member-powerset",
            SetRule::MemberEnum => "member-enum",
            SetRule::MemberFnSpace => "member-fnspace",
            SetRule::Subseteq => "subseteq",
            SetRule::Extensionality => "extensionality",
        }
    }

    pub fn from_name(s: &str) -> Option<SetRule> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for SetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub enum Expansion {
    /// `+TRUE` or `-FALSE`: nothing to do.
    Trivial,
    /// `+FALSE` or `-TRUE`: closes the branch.
    Absurd,
    Alpha(Vec<Signed>),
    Beta(Vec<Signed>, Vec<Signed>),
    /// Universal force; the body binds index 0.
    Gamma(Term),
    Delta(Term),
    Literal(Option<(SetRule, Signed)>),
}

fn two(h: Head, a: &[Term]) -> (Term, Term) {
    debug_assert!(a.len() == 2, "{h:?}");
    (a[0].clone(), a[1].clone())
}

pub fn expand(sf: &Signed) -> Expansion {
    let (s, t) = sf;
    let s = *s;
    let Term::App(h, a) = t else {
        return Expansion::Literal(None);
    };
    match (h, s) {
        (Head::True, true) | (Head::False, false) => Expansion::Trivial,
        (Head::True, false) | (Head::False, true) => Expansion::Absurd,
        (Head::Not, _) => Expansion::Alpha(vec![(!s, a[0].clone())]),
        (Head::And, true) => {
            let (x, y) = two(Head::And, a);
            Expansion::Alpha(vec![(true, x), (true, y)])
        }
        (Head::Or, false) => {
            let (x, y) = two(Head::Or, a);
            Expansion::Alpha(vec![(false, x), (false, y)])
        }
        (Head::Imp, false) => {
            let (x, y) = two(Head::Imp, a);
            Expansion::Alpha(vec![(true, x), (false, y)])
        }
        (Head::And, false) => {
            let (x, y) = two(Head::And, a);
            Expansion::Beta(vec![(false, x)], vec![(false, y)])
        }
        (Head::Or, true) => {
            let (x, y) = two(Head::Or, a);
            Expansion::Beta(vec![(true, x)], vec![(true, y)])
        }
        (Head::Imp, true) => {
            let (x, y) = two(Head::Imp, a);
            Expansion::Beta(vec![(false, x)], vec![(true, y)])
        }
        (Head::Iff, true) => {
            let (x, y) = two(Head::Iff, a);
            Expansion::Beta(vec![(true, x.clone()), (true, y.clone())], vec![(false, x), (false, y)])
        }
        (Head::Iff, false) => {
            let (x, y) = two(Head::Iff, a);
            Expansion::Beta(vec![(true, x.clone()), (false, y.clone())], vec![(false, x), (true, y)])
        }
        (Head::Forall, true) | (Head::Exists, false) => Expansion::Gamma(a[0].clone()),
        (Head::Forall, false) | (Head::Exists, true) => Expansion::Delta(a[0].clone()),
        _ => Expansion::Literal(set_rule(s, t)),
    }
}

fn forall_in(set: &Term, body: Term) -> Term {
    Term::un(Head::Forall, Term::bin(Head::Imp, Term::bin(Head::In, Term::Bound(0), set.clone()), body))
}

/// The definitional unfolding of a set-theoretic atom, if any.
pub fn set_rule(s: bool, t: &Term) -> Option<(SetRule, Signed)> {
    let Term::App(h, a) = t else { return None };
    match h {
        Head::In => {
            let (e, set) = (&a[0], &a[1]);
            let Term::App(sh, sa) = set else { return None };
            match sh {
                Head::Filter => Some((
                    SetRule::MemberFilter,
                    (s, Term::bin(Head::And, Term::bin(Head::In, e.clone(), sa[0].clone()), sa[1].open(e))),
                )),
                Head::Map => {
                    let body = Term::bin(
                        Head::And,
                        Term::bin(Head::In, Term::Bound(0), sa[1].clone()),
                        Term::bin(Head::Eq, e.clone(), sa[0].clone()),
                    );
                    Some((SetRule::MemberMap, (s, Term::un(Head::Exists, body))))
                }
                Head::Powerset => Some((SetRule::MemberPowerset, (s, Term::bin(Head::Subseteq, e.clone(), sa[0].clone())))),
                Head::Enum => {
                    let f = sa
                        .iter()
                        .rev()
                        .map(|x| Term::bin(Head::Eq, e.clone(), x.clone()))
                        .reduce(|acc, x| Term::bin(Head::Or, x, acc))
                        .unwrap_or(Term::app(Head::False, vec![]));
                    Some((SetRule::MemberEnum, (s, f)))
                }
                Head::FnSpace if s => {
                    let body = Term::bin(Head::In, Term::bin(Head::Apply, e.clone(), Term::Bound(0)), sa[1].clone());
                    Some((SetRule::MemberFnSpace, (true, forall_in(&sa[0], body))))
                }
                _ => None,
            }
        }
        Head::Subseteq => {
            let body = Term::bin(Head::In, Term::Bound(0), a[1].clone());
            Some((SetRule::Subseteq, (s, forall_in(&a[0], body))))
        }
        Head::Eq => {
            let set_like = |x: &Term| x.head().is_some_and(Head::is_set_constructor);
            if set_like(&a[0]) || set_like(&a[1]) {
                let body = Term::bin(
                    Head::Iff,
                    Term::bin(Head::In, Term::Bound(0), a[0].clone()),
                    Term::bin(Head::In, Term::Bound(0), a[1].clone()),
                );
                Some((SetRule::Extensionality, (s, Term::un(Head::Forall, body))))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Heads whose atoms may close by congruence.
pub fn is_atom_head(h: &Head) -> bool {
    matches!(h, Head::Sym(_) | Head::In | Head::Eq | Head::Subseteq | Head::Apply)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::term::from_expr;
    use crate::surface::parse_expression;

    fn t(s: &str) -> Term {
        from_expr(&parse_expression(s).unwrap())
    }

    #[test]
    fn filter_membership() {
        let (r, out) = set_rule(true, &t("x \\in {z \\in S : z \\notin f[z]}")).unwrap();
        assert_eq!(r, SetRule::MemberFilter);
        assert_eq!(out, (true, t("x \\in S /\\ x \\notin f[x]")));
    }

    #[test]
    fn map_membership() {
        let (_, out) = set_rule(false, &t("e \\in {g(x) : x \\in S}")).unwrap();
        assert_eq!(out, (false, t("\\E y \\in S : e = g(y)")));
    }

    #[test]
    fn enum_and_powerset() {
        assert_eq!(set_rule(true, &t("e \\in {a, b}")).unwrap().1, (true, t("e = a \\/ e = b")));
        assert_eq!(set_rule(true, &t("e \\in {}")).unwrap().1, (true, t("FALSE")));
        assert_eq!(set_rule(false, &t("A \\in SUBSET S")).unwrap().1, (false, t("A \\subseteq S")));
        assert_eq!(set_rule(true, &t("A \\subseteq S")).unwrap().1, (true, t("\\A x \\in A : x \\in S")));
    }

    #[test]
    fn function_space() {
        assert_eq!(
            set_rule(true, &t("f \\in [S -> T]")).unwrap().1,
            (true, t("\\A x \\in S : f[x] \\in T"))
        );
        assert!(set_rule(false, &t("f \\in [S -> T]")).is_none());
    }

    #[test]
    fn extensionality_only_for_set_terms() {
        assert!(set_rule(false, &t("a = b")).is_none());
        assert_eq!(
            set_rule(false, &t("a = {}")).unwrap().1,
            (false, t("\\A x : x \\in a <=> x \\in {}"))
        );
    }
}
