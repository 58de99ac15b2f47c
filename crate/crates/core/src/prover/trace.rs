//! Closed-tableau traces: one rule application per line, replayed on
//! ground formulas by `check_trace`.

use super::cc::Congruence;
use super::rules::{expand, is_atom_head, set_rule, show, Expansion, SetRule, Signed};
use super::term::{parse_term, Head, Term};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Alpha { principal: usize, out: Vec<Signed> },
    /// The first list is the branch explored first.
    Beta { principal: usize, first: Vec<Signed>, second: Vec<Signed> },
    Gamma { principal: usize, var: Option<u32>, term: Term, out: Signed },
    Delta { principal: usize, witness: Term, out: Signed },
    Rewrite { rule: SetRule, principal: usize, out: Signed },
    Close { pos: usize, neg: usize, bindings: Vec<(u32, Term)> },
    /// `pos` absent: `neg` is a denied equation between congruent terms.
    CloseCc { pos: Option<usize>, neg: usize, bindings: Vec<(u32, Term)> },
    CloseConst { principal: usize },
}

impl Step {
    pub fn is_close(&self) -> bool {
        matches!(self, Step::Close { .. } | Step::CloseCc { .. } | Step::CloseConst { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Step>,
}

fn list(xs: &[Signed]) -> String {
    xs.iter().map(show).collect::<Vec<_>>().join(" ; ")
}

fn binds(b: &[(u32, Term)]) -> String {
    if b.is_empty() {
        String::new()
    } else {
        let inner: Vec<_> = b.iter().map(|(v, t)| format!("?{v} := {t}")).collect();
        format!(" [{}]", inner.join(", "))
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Alpha { principal, out } => write!(f, "alpha {principal} => {}", list(out)),
            Step::Beta { principal, first, second } => {
                write!(f, "beta {principal} => {} | {}", list(first), list(second))
            }
            Step::Gamma { principal, var, term, out } => {
                let v = var.map(|v| format!("?{v}")).unwrap_or_else(|| "_".into());
                write!(f, "gamma {principal} {v} := {term} => {}", show(out))
            }
            Step::Delta { principal, witness, out } => write!(f, "delta {principal} {witness} => {}", show(out)),
            Step::Rewrite { rule, principal, out } => write!(f, "rw {rule} {principal} => {}", show(out)),
            Step::Close { pos, neg, bindings } => write!(f, "close {pos} {neg}{}", binds(bindings)),
            Step::CloseCc { pos, neg, bindings } => match pos {
                Some(p) => write!(f, "close-cc {p} {neg}{}", binds(bindings)),
                None => write!(f, "close-cc _ {neg}{}", binds(bindings)),
            },
            Step::CloseConst { principal } => write!(f, "close-const {principal}"),
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

fn parse_signed(s: &str) -> Result<Signed, String> {
    let s = s.trim();
    let sign = match s.chars().next() {
        Some('+') => true,
        Some('-') => false,
        _ => return Err(format!("expected a signed formula, found `{s}`")),
    };
    Ok((sign, parse_term(&s[1..])?))
}

fn parse_list(s: &str) -> Result<Vec<Signed>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(" ; ").map(parse_signed).collect()
}

fn parse_index(s: Option<&str>) -> Result<usize, String> {
    s.ok_or("missing formula index")?
        .parse()
        .map_err(|_| "bad formula index".to_string())
}

fn parse_bindings(rest: &str) -> Result<Vec<(u32, Term)>, String> {
    let rest = rest.trim();
    if rest.is_empty() {
        return Ok(Vec::new());
    }
    let inner = rest
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or("bad binding list")?;
    inner
        .split(", ")
        .map(|b| {
            let (v, t) = b.split_once(" := ").ok_or("bad binding")?;
            let v = v.trim().strip_prefix('?').ok_or("bad binding variable")?;
            Ok((v.parse().map_err(|_| "bad binding variable")?, parse_term(t)?))
        })
        .collect()
}

impl Trace {
    pub fn parse(text: &str) -> Result<Trace, String> {
        let mut steps = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            steps.push(parse_line(line).map_err(|e| format!("line {}: {e}", n + 1))?);
        }
        Ok(Trace { steps })
    }

    /// Rule applications on the longest branch.
    pub fn depth(&self) -> usize {
        let mut stack: Vec<usize> = Vec::new();
        let mut cur = 0;
        let mut best = 0;
        for s in &self.steps {
            match s {
                Step::Beta { .. } => {
                    cur += 1;
                    stack.push(cur);
                }
                s if s.is_close() => {
                    best = best.max(cur);
                    cur = stack.pop().unwrap_or(0);
                }
                _ => cur += 1,
            }
        }
        best
    }
}

fn parse_line(line: &str) -> Result<Step, String> {
    let (head, tail) = match line.split_once(" => ") {
        Some((h, t)) => (h, Some(t)),
        None => (line, None),
    };
    let mut w = head.split_whitespace();
    let kind = w.next().ok_or("empty line")?;
    let out = || tail.ok_or_else(|| "missing `=>`".to_string());
    match kind {
        "alpha" => Ok(Step::Alpha {
            principal: parse_index(w.next())?,
            out: parse_list(out()?)?,
        }),
        "beta" => {
            let (a, b) = out()?.split_once(" | ").ok_or("beta needs two branches")?;
            Ok(Step::Beta {
                principal: parse_index(w.next())?,
                first: parse_list(a)?,
                second: parse_list(b)?,
            })
        }
        "gamma" => {
            let principal = parse_index(w.next())?;
            let rest = head.splitn(3, ' ').nth(2).ok_or("gamma needs an instance")?;
            let (v, t) = rest.split_once(" := ").ok_or("gamma needs `:=`")?;
            let var = match v.trim() {
                "_" => None,
                v => Some(v.strip_prefix('?').and_then(|n| n.parse().ok()).ok_or("bad gamma variable")?),
            };
            Ok(Step::Gamma {
                principal,
                var,
                term: parse_term(t)?,
                out: parse_signed(out()?)?,
            })
        }
        "delta" => {
            let principal = parse_index(w.next())?;
            let rest = head.splitn(3, ' ').nth(2).ok_or("delta needs a witness")?;
            Ok(Step::Delta {
                principal,
                witness: parse_term(rest)?,
                out: parse_signed(out()?)?,
            })
        }
        "rw" => {
            let rule = w.next().and_then(SetRule::from_name).ok_or("unknown set rule")?;
            Ok(Step::Rewrite {
                rule,
                principal: parse_index(w.next())?,
                out: parse_signed(out()?)?,
            })
        }
        "close" | "close-cc" => {
            let a = w.next().ok_or("missing formula index")?;
            let neg = parse_index(w.next())?;
            let rest: Vec<&str> = head.splitn(4, ' ').collect();
            let bindings = parse_bindings(rest.get(3).copied().unwrap_or(""))?;
            if kind == "close" {
                Ok(Step::Close {
                    pos: parse_index(Some(a))?,
                    neg,
                    bindings,
                })
            } else {
                let pos = if a == "_" { None } else { Some(parse_index(Some(a))?) };
                Ok(Step::CloseCc { pos, neg, bindings })
            }
        }
        "close-const" => Ok(Step::CloseConst {
            principal: parse_index(w.next())?,
        }),
        k => Err(format!("unknown rule `{k}`")),
    }
}

/// Replays `t` from the initial formulas; `Err` carries the first failure.
pub fn replay(initial: &[Signed], t: &Trace) -> Result<(), String> {
    let mut pending: Vec<Vec<Signed>> = Vec::new();
    let mut cur: Option<Vec<Signed>> = Some(initial.to_vec());
    let mut skolems: Vec<(String, Term)> = Vec::new();
    for (n, step) in t.steps.iter().enumerate() {
        let fail = |m: String| format!("step {} (`{step}`): {m}", n + 1);
        let br = cur.as_mut().ok_or_else(|| fail("no open branch left".into()))?;
        let get = |i: usize| br.get(i).cloned().ok_or_else(|| fail(format!("no formula {i} on this branch")));
        for f in step_formulas(step) {
            if !f.1.is_ground() || !f.1.is_closed() {
                return Err(fail("introduced formula is not ground".into()));
            }
        }
        match step {
            Step::Alpha { principal, out } => match expand(&get(*principal)?) {
                Expansion::Alpha(x) if x == *out => br.extend(x),
                _ => return Err(fail("not an alpha expansion of the principal formula".into())),
            },
            Step::Beta { principal, first, second } => match expand(&get(*principal)?) {
                Expansion::Beta(l, r) if (l == *first && r == *second) || (l == *second && r == *first) => {
                    let mut other = br.clone();
                    other.extend(second.iter().cloned());
                    br.extend(first.iter().cloned());
                    pending.push(other);
                }
                _ => return Err(fail("not a beta expansion of the principal formula".into())),
            },
            Step::Gamma { principal, term, out, .. } => {
                let p = get(*principal)?;
                if !term.is_ground() || !term.is_closed() {
                    return Err(fail("instance is not a ground term".into()));
                }
                match expand(&p) {
                    Expansion::Gamma(body) if (p.0, body.open(term)) == *out => br.push(out.clone()),
                    _ => return Err(fail("not an instance of a universal formula".into())),
                }
            }
            Step::Delta { principal, witness, out } => {
                let p = get(*principal)?;
                let Some(Head::Sym(sk)) = witness.head() else {
                    return Err(fail("witness must be headed by a symbol".into()));
                };
                if initial.iter().any(|f| f.1.mentions(sk)) || p.1.mentions(sk) {
                    return Err(fail(format!("witness symbol `{sk}` is not fresh")));
                }
                match skolems.iter().find(|(k, _)| k == sk) {
                    Some((_, f)) if *f != p.1 => {
                        return Err(fail(format!("witness symbol `{sk}` serves two formulas")))
                    }
                    Some(_) => {}
                    None => skolems.push((sk.clone(), p.1.clone())),
                }
                match expand(&p) {
                    Expansion::Delta(body) if (p.0, body.open(witness)) == *out => br.push(out.clone()),
                    _ => return Err(fail("not a witness of an existential formula".into())),
                }
            }
            Step::Rewrite { rule, principal, out } => match set_rule(get(*principal)?.0, &get(*principal)?.1) {
                Some((r, o)) if r == *rule && o == *out => br.push(o),
                _ => return Err(fail("set rule does not apply".into())),
            },
            Step::Close { pos, neg, .. } => {
                let (p, q) = (get(*pos)?, get(*neg)?);
                if !(p.0 && !q.0 && p.1 == q.1) {
                    return Err(fail("formulas are not complementary".into()));
                }
                cur = pending.pop();
            }
            Step::CloseCc { pos, neg, .. } => {
                let q = get(*neg)?;
                let mut cc = Congruence::new(br.iter().filter_map(|(s, t)| match t {
                    Term::App(Head::Eq, a) if *s => Some((&a[0], &a[1])),
                    _ => None,
                }));
                let ok = match pos {
                    None => !q.0 && matches!(&q.1, Term::App(Head::Eq, a) if cc.equal(&a[0], &a[1])),
                    Some(p) => {
                        let p = get(*p)?;
                        match (&p.1, &q.1) {
                            (Term::App(h1, a1), Term::App(h2, a2)) => {
                                p.0 && !q.0
                                    && h1 == h2
                                    && is_atom_head(h1)
                                    && a1.len() == a2.len()
                                    && a1.iter().zip(a2).all(|(x, y)| cc.equal(x, y))
                            }
                            _ => false,
                        }
                    }
                };
                if !ok {
                    return Err(fail("no congruence closure".into()));
                }
                cur = pending.pop();
            }
            Step::CloseConst { principal } => {
                if !matches!(expand(&get(*principal)?), Expansion::Absurd) {
                    return Err(fail("formula is not absurd".into()));
                }
                cur = pending.pop();
            }
        }
    }
    if cur.is_some() {
        return Err("trace ends with an open branch".into());
    }
    acyclic(&skolems)
}

/// Witness symbols may not depend on each other circularly.
fn acyclic(skolems: &[(String, Term)]) -> Result<(), String> {
    let deps: Vec<Vec<usize>> = skolems
        .iter()
        .map(|(_, f)| (0..skolems.len()).filter(|&j| f.mentions(&skolems[j].0)).collect())
        .collect();
    // 0 unvisited, 1 on stack, 2 finished
    fn visit(i: usize, deps: &[Vec<usize>], state: &mut [u8]) -> bool {
        match state[i] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        state[i] = 1;
        let ok = deps[i].iter().all(|&j| visit(j, deps, state));
        state[i] = 2;
        ok
    }
    let mut state = vec![0u8; skolems.len()];
    if (0..skolems.len()).all(|i| visit(i, &deps, &mut state)) {
        Ok(())
    } else {
        Err("witness symbols depend on each other circularly".into())
    }
}

fn step_formulas(s: &Step) -> Vec<&Signed> {
    match s {
        Step::Alpha { out, .. } => out.iter().collect(),
        Step::Beta { first, second, .. } => first.iter().chain(second).collect(),
        Step::Gamma { out, .. } | Step::Delta { out, .. } | Step::Rewrite { out, .. } => vec![out],
        _ => Vec::new(),
    }
}
