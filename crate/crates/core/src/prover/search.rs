//! Free-variable tableau search in continuation-passing style: closing a
//! branch hands the substitution to the rest of the tableau, and a failure
//! there backtracks into the next way of closing.

use super::cc::Congruence;
use super::rules::{expand, is_atom_head, Expansion, Signed};
use super::term::{Head, Subst, Term};
use super::trace::{Step, Trace};
use std::time::Instant;

#[derive(Clone)]
struct Branch {
    forms: Vec<Signed>,
    pending: Vec<usize>,
    done: Vec<usize>,
    gammas: Vec<(usize, u32)>,
    next_gamma: usize,
    gamma_used: u32,
    extended: Vec<Term>,
}

pub(crate) struct Search {
    limit: u32,
    reuse: u32,
    deadline: Instant,
    next_var: u32,
    next_sk: u32,
    trace: Vec<Step>,
    pub steps: u64,
    pub hit_limit: bool,
    pub timed_out: bool,
    result: Option<Subst>,
}

type Cont<'a> = dyn FnMut(&mut Search, &Subst) -> bool + 'a;

impl Search {
    pub fn new(limit: u32, reuse: u32, deadline: Instant) -> Self {
        Search {
            limit,
            reuse,
            deadline,
            next_var: 0,
            next_sk: 0,
            trace: Vec::new(),
            steps: 0,
            hit_limit: false,
            timed_out: false,
            result: None,
        }
    }

    /// Runs the search; on success returns the ground trace.
    pub fn run(&mut self, initial: &[Signed]) -> Option<Trace> {
        let br = Branch {
            forms: initial.to_vec(),
            pending: (0..initial.len()).collect(),
            done: Vec::new(),
            gammas: Vec::new(),
            next_gamma: 0,
            gamma_used: 0,
            extended: Vec::new(),
        };
        let ok = self.branch(br, &Subst::new(), &mut |s: &mut Search, sub: &Subst| {
            s.result = Some(sub.clone());
            true
        });
        if !ok {
            return None;
        }
        let sub = self.result.take().unwrap();
        let any = Term::sym("%any");
        let g = |t: &Term| sub.apply(t).close_vars(&any);
        let gs = |f: &Signed| (f.0, g(&f.1));
        let gl = |xs: &Vec<Signed>| xs.iter().map(gs).collect::<Vec<_>>();
        let gb = |bs: &Vec<(u32, Term)>| bs.iter().map(|(v, t)| (*v, g(t))).collect::<Vec<_>>();
        let steps = self
            .trace
            .iter()
            .map(|s| match s {
                Step::Alpha { principal, out } => Step::Alpha { principal: *principal, out: gl(out) },
                Step::Beta { principal, first, second } => Step::Beta {
                    principal: *principal,
                    first: gl(first),
                    second: gl(second),
                },
                Step::Gamma { principal, var, term, out } => Step::Gamma {
                    principal: *principal,
                    var: *var,
                    term: g(term),
                    out: gs(out),
                },
                Step::Delta { principal, witness, out } => Step::Delta {
                    principal: *principal,
                    witness: g(witness),
                    out: gs(out),
                },
                Step::Rewrite { rule, principal, out } => Step::Rewrite {
                    rule: *rule,
                    principal: *principal,
                    out: gs(out),
                },
                Step::Close { pos, neg, bindings } => Step::Close { pos: *pos, neg: *neg, bindings: gb(bindings) },
                Step::CloseCc { pos, neg, bindings } => Step::CloseCc { pos: *pos, neg: *neg, bindings: gb(bindings) },
                c @ Step::CloseConst { .. } => c.clone(),
            })
            .collect();
        Some(Trace { steps })
    }

    fn abort(&mut self) -> bool {
        self.steps += 1;
        if !self.timed_out && self.steps.is_multiple_of(64) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn branch(&mut self, mut br: Branch, sub: &Subst, k: &mut Cont) -> bool {
        if self.abort() {
            return false;
        }
        let mark = self.trace.len();
        let classified: Vec<(usize, bool)> = br
            .pending
            .iter()
            .map(|&i| (i, matches!(expand(&(br.forms[i].0, sub.apply(&br.forms[i].1))), Expansion::Beta(..))))
            .collect();
        let pick = classified
            .iter()
            .position(|(_, beta)| !beta)
            .or(if classified.is_empty() { None } else { Some(0) });
        if let Some(p) = pick {
            let i = br.pending.remove(p);
            let sf = (br.forms[i].0, sub.apply(&br.forms[i].1));
            // Try to close the branch with the new formula first.
            let closes = self.closures(&br, i, &sf, sub);
            if let Some(c) = closes.iter().find(|(s, _)| s.len() == sub.len()) {
                self.trace.push(c.1.clone());
                if k(self, &c.0) {
                    return true;
                }
                self.trace.truncate(mark);
                return false;
            }
            for (s, step) in closes {
                self.trace.push(step);
                if k(self, &s) {
                    return true;
                }
                self.trace.truncate(mark);
                if self.timed_out {
                    return false;
                }
            }
            br.done.push(i);
            match expand(&sf) {
                Expansion::Trivial | Expansion::Absurd => {}
                Expansion::Alpha(out) => {
                    self.trace.push(Step::Alpha { principal: i, out: out.clone() });
                    for f in out {
                        push(&mut br, f);
                    }
                }
                Expansion::Beta(l, r) => return self.beta(br, i, l, r, sub, k, mark),
                Expansion::Gamma(_) => br.gammas.push((i, 0)),
                Expansion::Delta(body) => {
                    let mut vars = Vec::new();
                    sf.1.vars_into(&mut vars);
                    let name = format!("%sk{}", self.next_sk);
                    self.next_sk += 1;
                    let witness = Term::App(Head::Sym(name), vars.into_iter().map(Term::Var).collect());
                    let out = (sf.0, body.open(&witness));
                    self.trace.push(Step::Delta { principal: i, witness, out: out.clone() });
                    push(&mut br, out);
                }
                Expansion::Literal(rw) => {
                    if let Some((rule, out)) = rw {
                        let fresh = rule != super::rules::SetRule::Extensionality || !br.extended.contains(&sf.1);
                        if fresh {
                            if rule == super::rules::SetRule::Extensionality {
                                br.extended.push(sf.1.clone());
                            }
                            self.trace.push(Step::Rewrite { rule, principal: i, out: out.clone() });
                            push(&mut br, out);
                        }
                    }
                }
            }
            if self.branch(br, sub, k) {
                return true;
            }
            self.trace.truncate(mark);
            return false;
        }
        // Saturated up to universal instantiation.
        let eligible: Vec<usize> = (0..br.gammas.len()).filter(|&g| br.gammas[g].1 < self.reuse).collect();
        if eligible.is_empty() {
            return false;
        }
        if br.gamma_used >= self.limit {
            self.hit_limit = true;
            return false;
        }
        let g = eligible
            .iter()
            .copied()
            .find(|&g| g >= br.next_gamma)
            .unwrap_or(eligible[0]);
        br.next_gamma = g + 1;
        br.gammas[g].1 += 1;
        br.gamma_used += 1;
        let principal = br.gammas[g].0;
        let sf = (br.forms[principal].0, sub.apply(&br.forms[principal].1));
        let Expansion::Gamma(body) = expand(&sf) else { unreachable!() };
        let v = self.next_var;
        self.next_var += 1;
        let out = (sf.0, body.open(&Term::Var(v)));
        self.trace.push(Step::Gamma {
            principal,
            var: Some(v),
            term: Term::Var(v),
            out: out.clone(),
        });
        push(&mut br, out);
        if self.branch(br, sub, k) {
            return true;
        }
        self.trace.truncate(mark);
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn beta(&mut self, br: Branch, i: usize, l: Vec<Signed>, r: Vec<Signed>, sub: &Subst, k: &mut Cont, mark: usize) -> bool {
        let open_vars = br.forms.iter().any(|f| !sub.apply(&f.1).is_ground());
        let orders: &[bool] = if open_vars { &[false, true] } else { &[false] };
        for &swap in orders {
            let (a, b) = if swap { (&r, &l) } else { (&l, &r) };
            let mut first = br.clone();
            let mut second = br.clone();
            for f in a {
                push(&mut first, f.clone());
            }
            for f in b {
                push(&mut second, f.clone());
            }
            self.trace.push(Step::Beta {
                principal: i,
                first: a.clone(),
                second: b.clone(),
            });
            let ok = self.branch(first, sub, &mut |s: &mut Search, sub1: &Subst| s.branch(second.clone(), sub1, k));
            if ok {
                return true;
            }
            self.trace.truncate(mark);
            if self.timed_out {
                return false;
            }
        }
        false
    }

    /// Ways of closing the branch using formula `i` (already substituted as
    /// `sf`) against earlier formulas.
    fn closures(&self, br: &Branch, i: usize, sf: &Signed, sub: &Subst) -> Vec<(Subst, Step)> {
        let mut out = Vec::new();
        if matches!(expand(sf), Expansion::Absurd) {
            return vec![(sub.clone(), Step::CloseConst { principal: i })];
        }
        let bindings = |s: &Subst| -> Vec<(u32, Term)> {
            let mut vs = Vec::new();
            for f in &br.forms {
                f.1.vars_into(&mut vs);
            }
            vs.sort();
            vs.into_iter()
                .filter(|v| sub.apply(&Term::Var(*v)) == Term::Var(*v) && s.apply(&Term::Var(*v)) != Term::Var(*v))
                .map(|v| (v, Term::Var(v)))
                .collect()
        };
        let eqs: Vec<(Term, Term)> = br
            .done
            .iter()
            .map(|&j| (br.forms[j].0, sub.apply(&br.forms[j].1)))
            .chain(std::iter::once(sf.clone()))
            .filter_map(|(s, t)| match t {
                Term::App(Head::Eq, a) if s && a[0].is_ground() && a[1].is_ground() => Some((a[0].clone(), a[1].clone())),
                _ => None,
            })
            .collect();
        let mut cc = if eqs.is_empty() {
            None
        } else {
            Some(Congruence::new(eqs.iter().map(|(a, b)| (a, b))))
        };
        if !sf.0 {
            if let Term::App(Head::Eq, a) = &sf.1 {
                if let Some(s) = sub.unify(&a[0], &a[1]) {
                    let b = bindings(&s);
                    out.push((s, Step::CloseCc { pos: None, neg: i, bindings: b }));
                } else if a[0].is_ground() && a[1].is_ground() {
                    if let Some(cc) = cc.as_mut() {
                        if cc.equal(&a[0], &a[1]) {
                            out.push((sub.clone(), Step::CloseCc { pos: None, neg: i, bindings: Vec::new() }));
                        }
                    }
                }
            }
        }
        for &j in &br.done {
            let other = (br.forms[j].0, sub.apply(&br.forms[j].1));
            if other.0 == sf.0 {
                continue;
            }
            let (pos, neg) = if sf.0 { (i, j) } else { (j, i) };
            if let Some(s) = sub.unify(&sf.1, &other.1) {
                let b = bindings(&s);
                out.push((s, Step::Close { pos, neg, bindings: b }));
            } else if let Some(cc) = cc.as_mut() {
                if let Some(s) = cc_unify(cc, &sf.1, &other.1, sub) {
                    let b = bindings(&s);
                    out.push((s, Step::CloseCc { pos: Some(pos), neg, bindings: b }));
                }
            }
        }
        // A new equation may make earlier literals clash.
        if sf.0 && matches!(&sf.1, Term::App(Head::Eq, a) if a[0].is_ground() && a[1].is_ground()) {
            let cc = cc.as_mut().unwrap();
            let lits: Vec<(usize, Signed)> = br
                .done
                .iter()
                .map(|&j| (j, (br.forms[j].0, sub.apply(&br.forms[j].1))))
                .filter(|(_, f)| f.1.is_ground())
                .collect();
            for (n, f) in &lits {
                if !f.0 {
                    if let Term::App(Head::Eq, a) = &f.1 {
                        if cc.equal(&a[0], &a[1]) {
                            out.push((sub.clone(), Step::CloseCc { pos: None, neg: *n, bindings: Vec::new() }));
                        }
                    }
                }
            }
            for (p, f) in lits.iter().filter(|(_, f)| f.0) {
                for (n, g) in lits.iter().filter(|(_, g)| !g.0) {
                    if cc_unify(cc, &f.1, &g.1, sub).is_some() {
                        out.push((sub.clone(), Step::CloseCc { pos: Some(*p), neg: *n, bindings: Vec::new() }));
                    }
                }
            }
        }
        out
    }
}

fn push(br: &mut Branch, f: Signed) {
    br.pending.push(br.forms.len());
    br.forms.push(f);
}

/// Unifies two atoms argument-wise, accepting ground arguments that are
/// already congruent.
fn cc_unify(cc: &mut Congruence, a: &Term, b: &Term, sub: &Subst) -> Option<Subst> {
    let (Term::App(h1, a1), Term::App(h2, a2)) = (a, b) else {
        return None;
    };
    if h1 != h2 || !is_atom_head(h1) || a1.len() != a2.len() {
        return None;
    }
    let mut s = sub.clone();
    for (x, y) in a1.iter().zip(a2) {
        let (x, y) = (s.apply(x), s.apply(y));
        if x.is_ground() && y.is_ground() && cc.equal(&x, &y) {
            continue;
        }
        s = s.unify(&x, &y)?;
    }
    Some(s)
}
