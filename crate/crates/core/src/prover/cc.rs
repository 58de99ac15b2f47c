//! Ground congruence closure over terms. Binder terms are opaque.

use super::term::{Head, Term};
use std::collections::HashMap;

#[derive(Default)]
pub struct Congruence {
    index: HashMap<Term, usize>,
    parent: Vec<usize>,
    apps: Vec<(usize, Head, Vec<usize>)>,
}

impl Congruence {
    pub fn new<'a>(eqs: impl IntoIterator<Item = (&'a Term, &'a Term)>) -> Self {
        let mut cc = Congruence::default();
        let pairs: Vec<_> = eqs.into_iter().map(|(a, b)| (cc.add(a), cc.add(b))).collect();
        for (a, b) in pairs {
            cc.union(a, b);
        }
        cc.close();
        cc
    }

    fn add(&mut self, t: &Term) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let kids = match t {
            Term::App(h, a) if h.bound_arg().is_none() && !a.is_empty() => {
                Some((h.clone(), a.iter().map(|x| self.add(x)).collect::<Vec<_>>()))
            }
            _ => None,
        };
        let i = self.parent.len();
        self.parent.push(i);
        self.index.insert(t.clone(), i);
        if let Some((h, k)) = kids {
            self.apps.push((i, h, k));
        }
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        true
    }

    fn close(&mut self) {
        loop {
            let mut changed = false;
            let n = self.apps.len();
            for i in 0..n {
                for j in i + 1..n {
                    let (ti, hi, ai) = self.apps[i].clone();
                    let (tj, hj, aj) = self.apps[j].clone();
                    if hi != hj || ai.len() != aj.len() || self.find(ti) == self.find(tj) {
                        continue;
                    }
                    if ai.iter().zip(&aj).all(|(x, y)| self.find(*x) == self.find(*y)) {
                        changed |= self.union(ti, tj);
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Whether the equalities entail `a = b`.
    pub fn equal(&mut self, a: &Term, b: &Term) -> bool {
        if a == b {
            return true;
        }
        let n = self.parent.len();
        let (x, y) = (self.add(a), self.add(b));
        if self.parent.len() != n {
            self.close();
        }
        self.find(x) == self.find(y)
    }
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
    fn congruence_propagates() {
        let (a, b) = (t("a"), t("b"));
        let mut cc = Congruence::new([(&a, &b)]);
        assert!(cc.equal(&t("f[a]"), &t("f[b]")));
        assert!(cc.equal(&t("g(f[a], c)"), &t("g(f[b], c)")));
        assert!(!cc.equal(&t("f[a]"), &t("f[c]")));
    }

    #[test]
    fn transitivity() {
        let (a, b, c) = (t("a"), t("b"), t("c"));
        let mut cc = Congruence::new([(&a, &b), (&b, &c)]);
        assert!(cc.equal(&a, &c));
    }

    #[test]
    fn nested_fixpoint() {
        let eqs = [(t("a"), t("f(a)"))];
        let mut cc = Congruence::new(eqs.iter().map(|(x, y)| (x, y)));
        assert!(cc.equal(&t("a"), &t("f(f(a))")));
    }
}
