use super::*;
use crate::meta::{
    alpha_eq, fresh_name, reflect_binders, subst_many, substitute, Assumption, Context, Definable,
};
use crate::surface::{
    free_identifiers, pp_expr, BinOp, Binder, Expr, ExprKind, GoalForm, Hypothesis, Proof, Quant,
    Step, StepKind, StepToken, WitnessItem,
};
use std::collections::{BTreeMap, BTreeSet};

/// Surface names that refer to differently named kernel constants.
type Aliases = BTreeMap<String, String>;

/// Checks a whole theorem, continuing past meaningless steps.
pub fn check_theorem(th: &Theorem, config: &Config) -> CheckResult {
    let mut ck = Checker::new(config);
    let prov = Provenance {
        path: String::new(),
        span: th.span,
        synthetic: false,
    };
    match ck.root(&th.goal, &prov) {
        Ok((root, aliases)) => {
            let derivation = ck.claim(&th.proof, &root, &prov, &aliases, None);
            CheckResult {
                root,
                derivation,
                errors: ck.errors,
                warnings: ck.warnings,
            }
        }
        Err(e) => {
            let root = (*e.input).clone();
            let derivation = Derivation {
                rule: Rule::Omitted,
                judgement: Judgement::Claim(root.clone()),
                provenance: prov,
                premises: Vec::new(),
            };
            CheckResult {
                root,
                derivation,
                errors: vec![e],
                warnings: ck.warnings,
            }
        }
    }
}

/// The obligation a theorem states: its free identifiers declared first
/// (sorted), then its assumptions, then its goal.
pub fn root_obligation(goal: &GoalForm) -> Result<Obligation, EngineError> {
    let config = Config::default();
    let mut ck = Checker::new(&config);
    let prov = Provenance {
        path: String::new(),
        span: Span::default(),
        synthetic: false,
    };
    ck.root(goal, &prov).map(|(o, _)| o)
}

/// Checks `p` against `o`, returning the derivation or every error found.
pub fn check_claim(p: &Proof, o: &Obligation, config: &Config) -> Result<Derivation, Vec<EngineError>> {
    let mut ck = Checker::new(config);
    let prov = Provenance {
        path: String::new(),
        span: Span::default(),
        synthetic: false,
    };
    let d = ck.claim(p, o, &prov, &Aliases::new(), None);
    if ck.errors.is_empty() {
        Ok(d)
    } else {
        Err(ck.errors)
    }
}

/// Applies one step to `o`. The leaf obligations it emits are those of the
/// returned derivation.
pub fn transform_step(
    token: &StepToken,
    step: &StepKind,
    o: &Obligation,
    config: &Config,
) -> Result<(Obligation, Derivation), Vec<EngineError>> {
    let mut ck = Checker::new(config);
    let st = Step {
        token: token.clone(),
        kind: step.clone(),
        span: Span::default(),
    };
    let prov = Provenance {
        path: step_part(token, 1),
        span: Span::default(),
        synthetic: false,
    };
    let mut aliases = Aliases::new();
    match ck.transform(&st, o, &prov, &mut aliases) {
        Ok(r) if ck.errors.is_empty() => Ok(r),
        Ok(_) => Err(ck.errors),
        Err(e) => {
            ck.errors.push(e);
            Err(ck.errors)
        }
    }
}

/// Expands usable definitions at the head of the goal until a quantifier,
/// implication or non-definition is exposed.
pub fn expand_for_matching(o: &Obligation) -> Obligation {
    let mut goal = o.goal.clone();
    for _ in 0..=o.context.len() {
        let next = match &goal.kind {
            ExprKind::Ident(n) => match o.context.definition(n) {
                Some((Definable::Lambda { params, body }, false)) if params.is_empty() => {
                    body.clone()
                }
                _ => break,
            },
            ExprKind::OpApp(n, args) => match o.context.definition(n) {
                Some((Definable::Lambda { params, body }, false)) if params.len() == args.len() => {
                    let m = params.iter().cloned().zip(args.iter().cloned()).collect();
                    subst_many(body, &m)
                }
                _ => break,
            },
            _ => break,
        };
        goal = next;
    }
    Obligation::new(o.context.clone(), goal)
}

fn step_part(token: &StepToken, index: usize) -> String {
    match &token.label {
        Some(l) => format!("<{}>{}", token.level, l),
        None => format!("<{}>#{}", token.level, index),
    }
}

fn join_path(parent: &str, part: &str) -> String {
    if parent.is_empty() {
        part.to_string()
    } else {
        format!("{parent}.{part}")
    }
}

fn with_goal(o: &Obligation, goal: Expr) -> Obligation {
    Obligation::new(o.context.clone(), goal)
}

fn extend(o: &Obligation, extra: impl IntoIterator<Item = Assumption>, goal: Expr) -> Obligation {
    let mut c = o.context.clone();
    for a in extra {
        c.push(a);
    }
    Obligation::new(c, goal)
}

fn node(rule: Rule, input: &Obligation, output: &Obligation, prov: &Provenance, premises: Vec<Premise>) -> Derivation {
    Derivation {
        rule,
        judgement: Judgement::Transformation {
            input: input.clone(),
            output: output.clone(),
        },
        provenance: prov.clone(),
        premises,
    }
}

struct Checker<'c> {
    config: &'c Config,
    errors: Vec<EngineError>,
    warnings: Vec<Warning>,
}

impl<'c> Checker<'c> {
    fn new(config: &'c Config) -> Self {
        Checker {
            config,
            errors: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn err(&self, kind: ErrorKind, prov: &Provenance, input: &Obligation, message: String) -> EngineError {
        EngineError {
            provenance: prov.clone(),
            kind,
            message,
            input: Box::new(input.clone()),
        }
    }

    fn meaningless(&self, prov: &Provenance, input: &Obligation, message: String) -> EngineError {
        self.err(ErrorKind::Meaningless, prov, input, message)
    }

    fn leaf(&self, obligation: Obligation, prov: &Provenance, kind: LeafKind, omitted: bool) -> Premise {
        Premise::Leaf(LeafObligation {
            obligation,
            origin: prov.clone(),
            kind,
            omitted,
        })
    }

    /// Applies aliases and checks that every free identifier is in scope.
    fn resolve(
        &self,
        e: &Expr,
        aliases: &Aliases,
        scope: &BTreeSet<String>,
        prov: &Provenance,
        input: &Obligation,
    ) -> Result<Expr, EngineError> {
        let map: BTreeMap<String, Expr> = aliases
            .iter()
            .map(|(k, v)| (k.clone(), Expr::ident(v.clone())))
            .collect();
        let r = subst_many(e, &map);
        if let Some(x) = free_identifiers(&r).into_iter().find(|x| !scope.contains(x)) {
            return Err(self.err(
                ErrorKind::Unbound,
                prov,
                input,
                format!("`{x}` is not declared at this point"),
            ));
        }
        Ok(r)
    }

    fn root(&mut self, goal: &GoalForm, prov: &Provenance) -> Result<(Obligation, Aliases), EngineError> {
        let mut free = BTreeSet::new();
        let mut local = BTreeSet::new();
        match goal {
            GoalForm::Expr(e) => free = free_identifiers(e),
            GoalForm::AssumeProve { assumptions, goal } => {
                for h in assumptions {
                    match h {
                        Hypothesis::New { name, domain } => {
                            if let Some(d) = domain {
                                free.extend(free_identifiers(d).into_iter().filter(|x| !local.contains(x)));
                            }
                            local.insert(name.clone());
                        }
                        Hypothesis::Fact(e) => {
                            free.extend(free_identifiers(e).into_iter().filter(|x| !local.contains(x)))
                        }
                    }
                }
                free.extend(free_identifiers(goal).into_iter().filter(|x| !local.contains(x)));
            }
        }
        let base = Obligation::new(free.into_iter().map(Assumption::New).collect(), Expr::bool(true));
        let (delta, f, aliases) = self.goal_form(goal, &base, &Aliases::new(), prov)?;
        let mut ctx = base.context;
        ctx.extend(delta);
        Ok((Obligation::new(ctx, f), aliases))
    }

    /// Splits a goal form into its context fragment and goal, declaring
    /// fresh kernel names for binders that clash with `o`.
    fn goal_form(
        &mut self,
        g: &GoalForm,
        o: &Obligation,
        aliases: &Aliases,
        prov: &Provenance,
    ) -> Result<(Context, Expr, Aliases), EngineError> {
        let mut scope = o.context.bound_names();
        let mut inner = aliases.clone();
        let mut delta = Context::new();
        let goal = match g {
            GoalForm::Expr(e) => e,
            GoalForm::AssumeProve { assumptions, goal } => {
                for h in assumptions {
                    match h {
                        Hypothesis::New { name, domain } => {
                            let dom = match domain {
                                Some(d) => Some(self.resolve(d, &inner, &scope, prov, o)?),
                                None => None,
                            };
                            let mut avoid = scope.clone();
                            avoid.extend(inner.values().cloned());
                            let kernel = fresh_name(name, &avoid);
                            if kernel == *name {
                                inner.remove(name);
                            } else {
                                inner.insert(name.clone(), kernel.clone());
                            }
                            scope.insert(kernel.clone());
                            delta.push(Assumption::New(kernel.clone()));
                            if let Some(d) = dom {
                                delta.push(Assumption::fact(Expr::mem(Expr::ident(kernel), d)));
                            }
                        }
                        Hypothesis::Fact(e) => {
                            let e = self.resolve(e, &inner, &scope, prov, o)?;
                            delta.push(Assumption::fact(e));
                        }
                    }
                }
                goal
            }
        };
        let f = self.resolve(goal, &inner, &scope, prov, o)?;
        Ok((delta, f, inner))
    }

    fn claim(
        &mut self,
        p: &Proof,
        o: &Obligation,
        prov: &Provenance,
        aliases: &Aliases,
        leaf_kind: Option<LeafKind>,
    ) -> Derivation {
        let claim = Judgement::Claim(o.clone());
        match p {
            Proof::Obvious(span) => {
                let prov = Provenance { span: *span, ..prov.clone() };
                Derivation {
                    rule: Rule::Obvious,
                    judgement: claim,
                    premises: vec![self.leaf(o.clone(), &prov, leaf_kind.unwrap_or(LeafKind::ObviousGoal), false)],
                    provenance: prov,
                }
            }
            Proof::Omitted { span, .. } => {
                let prov = Provenance { span: *span, ..prov.clone() };
                Derivation {
                    rule: Rule::Omitted,
                    judgement: claim,
                    premises: vec![self.leaf(o.clone(), &prov, leaf_kind.unwrap_or(LeafKind::ObviousGoal), true)],
                    provenance: prov,
                }
            }
            Proof::By { facts, defs, span } => {
                let prov = Provenance { span: *span, ..prov.clone() };
                let kind = leaf_kind.unwrap_or(LeafKind::ByGoal);
                match self.use_step(facts, defs, o, &prov, aliases) {
                    Ok((out, d)) => Derivation {
                        rule: Rule::By,
                        judgement: claim,
                        premises: vec![Premise::Derivation(d), self.leaf(out, &prov, kind, false)],
                        provenance: prov,
                    },
                    Err(e) => {
                        self.errors.push(e);
                        Derivation {
                            rule: Rule::By,
                            judgement: claim,
                            premises: vec![self.leaf(o.clone(), &prov, kind, false)],
                            provenance: prov,
                        }
                    }
                }
            }
            Proof::Steps(steps) => self.steps(steps, o, &prov.path, aliases.clone()),
        }
    }

    fn steps(&mut self, steps: &[Step], o: &Obligation, parent: &str, mut aliases: Aliases) -> Derivation {
        let mut plan: Vec<(Step, Provenance)> = Vec::new();
        for (i, st) in steps.iter().enumerate() {
            let prov = Provenance {
                path: join_path(parent, &step_part(&st.token, i + 1)),
                span: st.span,
                synthetic: false,
            };
            plan.push((st.clone(), prov.clone()));
            if let StepKind::Define { name, .. } = &st.kind {
                if self.config.local_defs_usable {
                    let synth = Step {
                        token: st.token.clone(),
                        kind: StepKind::Use {
                            facts: Vec::new(),
                            defs: vec![name.clone()],
                        },
                        span: st.span,
                    };
                    plan.push((synth, Provenance { synthetic: true, ..prov }));
                }
            }
        }
        // Forward pass: each step's input obligation and transformation.
        let mut frames: Vec<(Obligation, Option<Derivation>, Provenance)> = Vec::new();
        let mut cur = o.clone();
        let mut qed: Option<Derivation> = None;
        for (st, prov) in &plan {
            if let StepKind::Qed { proof } = &st.kind {
                let sub = self.claim(proof, &cur, prov, &aliases, None);
                qed = Some(Derivation {
                    rule: Rule::Qed,
                    judgement: Judgement::Claim(cur.clone()),
                    provenance: prov.clone(),
                    premises: vec![Premise::Derivation(sub)],
                });
                break;
            }
            let before = cur.clone();
            let mut next_aliases = aliases.clone();
            match self.transform(st, &cur, prov, &mut next_aliases) {
                Ok((out, d)) => {
                    frames.push((before, Some(d), prov.clone()));
                    cur = out;
                    aliases = next_aliases;
                }
                Err(e) => {
                    self.errors.push(e);
                    frames.push((before, None, prov.clone()));
                }
            }
        }
        let mut acc = qed.unwrap_or_else(|| Derivation {
            rule: Rule::Omitted,
            judgement: Judgement::Claim(cur.clone()),
            provenance: Provenance {
                path: parent.to_string(),
                span: Span::default(),
                synthetic: true,
            },
            premises: Vec::new(),
        });
        for (input, d, prov) in frames.into_iter().rev() {
            let mut premises = Vec::new();
            if let Some(d) = d {
                premises.push(Premise::Derivation(d));
            }
            premises.push(Premise::Derivation(acc));
            acc = Derivation {
                rule: Rule::NonQed,
                judgement: Judgement::Claim(input),
                provenance: prov,
                premises,
            };
        }
        acc
    }

    fn transform(
        &mut self,
        st: &Step,
        o: &Obligation,
        prov: &Provenance,
        aliases: &mut Aliases,
    ) -> Result<(Obligation, Derivation), EngineError> {
        match &st.kind {
            StepKind::Use { facts, defs } => self.use_step(facts, defs, o, prov, aliases),
            StepKind::Hide { facts, defs } => self.hide_step(facts, defs, o, prov, aliases),
            StepKind::Define { name, params, body } => self.define(name, params, body, o, prov, aliases),
            StepKind::Have(g) => self.have(g, o, prov, aliases),
            StepKind::Take(bs) => self.take(bs, o, prov, aliases),
            StepKind::Witness(items) => self.witness(items, o, prov, aliases),
            StepKind::Assert { goal, proof } => {
                let (delta, f, inner) = self.goal_form(goal, o, aliases, prov)?;
                self.assert(&st.token, delta, f, proof, o, prov, &inner)
            }
            StepKind::Case { cond, proof } => {
                let g = self.resolve(cond, aliases, &o.context.bound_names(), prov, o)?;
                let delta = Context(vec![Assumption::fact(g)]);
                let (out, d) = self.assert(&st.token, delta, o.goal.clone(), proof, o, prov, aliases)?;
                let wrapped = node(Rule::Case, o, &out, prov, vec![Premise::Derivation(d)]);
                Ok((out, wrapped))
            }
            StepKind::Suffices { goal, proof } => self.suffices(&st.token, goal, proof, o, prov, aliases),
            StepKind::Pick { binders, body, proof } => self.pick(binders, body, proof, o, prov, aliases),
            StepKind::Qed { .. } => Err(self.meaningless(prov, o, "QED is not a transformation".into())),
        }
    }

    fn warn_unknown_defs(&mut self, defs: &[String], o: &Obligation, prov: &Provenance) {
        for d in defs {
            if o.context.definition(d).is_none() {
                self.warnings.push(Warning {
                    provenance: prov.clone(),
                    message: format!("`{d}` is not a definition in scope; DEF ignored"),
                });
            }
        }
    }

    fn use_step(
        &mut self,
        facts: &[Expr],
        defs: &[String],
        o: &Obligation,
        prov: &Provenance,
        aliases: &Aliases,
    ) -> Result<(Obligation, Derivation), EngineError> {
        self.warn_unknown_defs(defs, o, prov);
        let scope = o.context.bound_names();
        let facts = facts
            .iter()
            .map(|f| self.resolve(f, aliases, &scope, prov, o))
            .collect::<Result<Vec<_>, _>>()?;
        let using = Obligation::new(o.context.using_defs(defs), o.goal.clone());
        let (out, inner) = self.use_facts(&facts, &using, prov);
        Ok((out.clone(), node(Rule::UseDefs, o, &out, prov, vec![Premise::Derivation(inner)])))
    }

    fn use_facts(&mut self, facts: &[Expr], o: &Obligation, prov: &Provenance) -> (Obligation, Derivation) {
        let Some((last, rest)) = facts.split_last() else {
            return (o.clone(), node(Rule::Use0, o, o, prov, Vec::new()));
        };
        let (prev, d) = self.use_facts(rest, o, prov);
        let side = Obligation::new(prev.context.unhide(), last.clone());
        let out = extend(&prev, [Assumption::fact(last.clone())], prev.goal.clone());
        let n = node(
            Rule::Use1,
            o,
            &out,
            prov,
            vec![Premise::Derivation(d), self.leaf(side, prov, LeafKind::UseFactSide, false)],
        );
        (out, n)
    }

    fn hide_step(
        &mut self,
        facts: &[Expr],
        defs: &[String],
        o: &Obligation,
        prov: &Provenance,
        aliases: &Aliases,
    ) -> Result<(Obligation, Derivation), EngineError> {
        self.warn_unknown_defs(defs, o, prov);
        let scope = o.context.bound_names();
        let facts = facts
            .iter()
            .map(|f| self.resolve(f, aliases, &scope, prov, o))
            .collect::<Result<Vec<_>, _>>()?;
        let (mid, inner) = self.hide_facts(&facts, o, prov)?;
        let out = Obligation::new(mid.context.hiding_defs(defs), mid.goal.clone());
        Ok((out.clone(), node(Rule::HideDefs, o, &out, prov, vec![Premise::Derivation(inner)])))
    }

    fn hide_facts(&mut self, facts: &[Expr], o: &Obligation, prov: &Provenance) -> Result<(Obligation, Derivation), EngineError> {
        let Some((last, rest)) = facts.split_last() else {
            return Ok((o.clone(), node(Rule::Hide0, o, o, prov, Vec::new())));
        };
        let mut hidden = o.clone();
        let mut found = false;
        for a in hidden.context.0.iter_mut() {
            if let Assumption::Fact { fact, hidden: h } = a {
                if !*h && fact.is_plain() && alpha_eq(&fact.goal, last) {
                    *h = true;
                    found = true;
                }
            }
        }
        if !found {
            return Err(self.err(
                ErrorKind::UnknownFact,
                prov,
                o,
                format!("`{}` is not a usable fact here", pp_expr(last)),
            ));
        }
        let (out, d) = self.hide_facts(rest, &hidden, prov)?;
        Ok((out.clone(), node(Rule::Hide1, o, &out, prov, vec![Premise::Derivation(d)])))
    }

    fn define(
        &mut self,
        name: &str,
        params: &[String],
        body: &Expr,
        o: &Obligation,
        prov: &Provenance,
        aliases: &mut Aliases,
    ) -> Result<(Obligation, Derivation), EngineError> {
        if o.context.binds(name) {
            return Err(self.err(
                ErrorKind::DuplicateName,
                prov,
                o,
                format!("`{name}` is already declared"),
            ));
        }
        let mut seen = BTreeSet::new();
        for p in params {
            if !seen.insert(p) {
                return Err(EngineError::from_meta(prov.clone(), o.clone(), crate::meta::MetaError::DuplicateBinder(p.clone())));
            }
        }
        let mut scope = o.context.bound_names();
        scope.extend(params.iter().cloned());
        let mut local = aliases.clone();
        for p in params {
            local.remove(p);
        }
        let body = self.resolve(body, &local, &scope, prov, o)?;
        let def = Definable::Lambda {
            params: params.to_vec(),
            body,
        };
        let out = extend(o, [Assumption::def(name, def, true)], o.goal.clone());
        aliases.remove(name);
        Ok((out.clone(), node(Rule::Define, o, &out, prov, Vec::new())))
    }

    fn have(&mut self, g: &Expr, o: &Obligation, prov: &Provenance, aliases: &Aliases) -> Result<(Obligation, Derivation), EngineError> {
        let g = self.resolve(g, aliases, &o.context.bound_names(), prov, o)?;
        let goal = expand_for_matching(o).goal;
        let ExprKind::Binary(BinOp::Implies, e, f) = &goal.kind else {
            return Err(self.meaningless(
                prov,
                o,
                format!("HAVE requires a goal of the form e => f, but the goal is `{}`", pp_expr(&goal)),
            ));
        };
        let side = extend(o, [Assumption::fact((**e).clone())], g.clone());
        let out = extend(o, [Assumption::fact(g)], (**f).clone());
        let d = node(Rule::Have, o, &out, prov, vec![self.leaf(side, prov, LeafKind::HaveSide, false)]);
        Ok((out, d))
    }

    fn kernel_name(&self, name: &str, o: &Obligation, aliases: &Aliases) -> String {
        let mut avoid = o.context.bound_names();
        avoid.extend(aliases.values().cloned());
        fresh_name(name, &avoid)
    }

    fn take(&mut self, bs: &[Binder], o: &Obligation, prov: &Provenance, aliases: &mut Aliases) -> Result<(Obligation, Derivation), EngineError> {
        let Some((b, rest)) = bs.split_first() else {
            return Ok((o.clone(), node(Rule::Take0, o, o, prov, Vec::new())));
        };
        let goal = expand_for_matching(o).goal;
        let Some((x, body)) = goal.split_quant(Quant::Forall) else {
            return Err(self.meaningless(
                prov,
                o,
                format!(
                    "no rule matches TAKE {}: TAKE requires a universally quantified goal, but the goal is `{}`",
                    crate::surface::pp_binders(bs),
                    pp_expr(&goal)
                ),
            ));
        };
        let dom = match &b.domain {
            Some(t) => Some(self.resolve(t, aliases, &o.context.bound_names(), prov, o)?),
            None => None,
        };
        let u = self.kernel_name(&b.name, o, aliases);
        let new_goal = substitute(&body, &x.name, &Expr::ident(u.clone()));
        let set_alias = |aliases: &mut Aliases| {
            if u == b.name {
                aliases.remove(&b.name);
            } else {
                aliases.insert(b.name.clone(), u.clone());
            }
        };
        match (dom, &x.domain) {
            (None, None) => {
                set_alias(aliases);
                let next = extend(o, [Assumption::New(u.clone())], new_goal);
                let (out, d) = self.take(rest, &next, prov, aliases)?;
                Ok((out.clone(), node(Rule::Take1, o, &out, prov, vec![Premise::Derivation(d)])))
            }
            (Some(t), Some(s)) => {
                let side = with_goal(o, Expr::subseteq(s.clone(), t.clone()));
                set_alias(aliases);
                let next = extend(
                    o,
                    [Assumption::New(u.clone()), Assumption::fact(Expr::mem(Expr::ident(u.clone()), t))],
                    new_goal,
                );
                let (out, d) = self.take(rest, &next, prov, aliases)?;
                Ok((
                    out.clone(),
                    node(
                        Rule::Take2,
                        o,
                        &out,
                        prov,
                        vec![self.leaf(side, prov, LeafKind::TakeSubsetSide, false), Premise::Derivation(d)],
                    ),
                ))
            }
            (None, Some(_)) => Err(self.meaningless(
                prov,
                o,
                format!("TAKE {} needs a domain: the goal `{}` quantifies over a set", b.name, pp_expr(&goal)),
            )),
            (Some(_), None) => Err(self.meaningless(
                prov,
                o,
                format!("TAKE {} \\in ... needs a bounded quantifier, but the goal is `{}`", b.name, pp_expr(&goal)),
            )),
        }
    }

    fn witness(&mut self, items: &[WitnessItem], o: &Obligation, prov: &Provenance, aliases: &Aliases) -> Result<(Obligation, Derivation), EngineError> {
        let Some((it, rest)) = items.split_first() else {
            return Ok((o.clone(), node(Rule::Witness0, o, o, prov, Vec::new())));
        };
        let goal = expand_for_matching(o).goal;
        let Some((x, body)) = goal.split_quant(Quant::Exists) else {
            return Err(self.meaningless(
                prov,
                o,
                format!(
                    "no rule matches WITNESS: WITNESS requires an existentially quantified goal, but the goal is `{}`",
                    pp_expr(&goal)
                ),
            ));
        };
        let scope = o.context.bound_names();
        let w = self.resolve(&it.witness, aliases, &scope, prov, o)?;
        let new_goal = substitute(&body, &x.name, &w);
        match (&it.domain, &x.domain) {
            (None, None) => {
                let next = with_goal(o, new_goal);
                let (out, d) = self.witness(rest, &next, prov, aliases)?;
                Ok((out.clone(), node(Rule::Witness1, o, &out, prov, vec![Premise::Derivation(d)])))
            }
            (Some(t), Some(s)) => {
                let t = self.resolve(t, aliases, &scope, prov, o)?;
                let sub = with_goal(o, Expr::subseteq(t.clone(), s.clone()));
                let mem = with_goal(o, Expr::mem(w.clone(), t.clone()));
                let next = extend(o, [Assumption::fact(Expr::mem(w, t))], new_goal);
                let (out, d) = self.witness(rest, &next, prov, aliases)?;
                Ok((
                    out.clone(),
                    node(
                        Rule::Witness2,
                        o,
                        &out,
                        prov,
                        vec![
                            self.leaf(sub, prov, LeafKind::WitnessSubsetSide, false),
                            self.leaf(mem, prov, LeafKind::WitnessMembershipSide, false),
                            Premise::Derivation(d),
                        ],
                    ),
                ))
            }
            (None, Some(_)) => Err(self.meaningless(
                prov,
                o,
                format!("WITNESS needs `w \\in T`: the goal `{}` quantifies over a set", pp_expr(&goal)),
            )),
            (Some(_), None) => Err(self.meaningless(
                prov,
                o,
                format!("WITNESS w \\in T needs a bounded quantifier, but the goal is `{}`", pp_expr(&goal)),
            )),
        }
    }

    fn label(&self, token: &StepToken, o: &Obligation, prov: &Provenance) -> Result<Option<String>, EngineError> {
        match token.label_name() {
            Some(l) if o.context.binds(&l) => Err(self.err(
                ErrorKind::DuplicateName,
                prov,
                o,
                format!("step label `{l}` is already in use"),
            )),
            other => Ok(other),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn assert(
        &mut self,
        token: &StepToken,
        delta: Context,
        f: Expr,
        proof: &Proof,
        o: &Obligation,
        prov: &Provenance,
        inner: &Aliases,
    ) -> Result<(Obligation, Derivation), EngineError> {
        let phi = Obligation::new(delta.clone(), f.clone());
        let neg = Assumption::hidden_fact(Expr::not(o.goal.clone()));
        let (rule, sub_obl, out) = match self.label(token, o, prov)? {
            Some(l) => {
                let def = Assumption::def(l.clone(), Definable::Obligation(Box::new(phi)), false);
                let mut sub = o.context.with(def.clone());
                sub.push(neg);
                sub.extend(delta);
                let out = extend(o, [def, Assumption::hidden_fact(Expr::ident(l))], o.goal.clone());
                (Rule::Assert2, Obligation::new(sub, f), out)
            }
            None => {
                let mut sub = o.context.with(neg);
                sub.extend(delta);
                let fact = Assumption::Fact { fact: phi, hidden: false };
                let out = extend(o, [fact], o.goal.clone());
                (Rule::Assert1, Obligation::new(sub, f), out)
            }
        };
        let d = self.claim(proof, &sub_obl, prov, inner, None);
        Ok((out.clone(), node(rule, o, &out, prov, vec![Premise::Derivation(d)])))
    }

    fn suffices(
        &mut self,
        token: &StepToken,
        goal: &GoalForm,
        proof: &Proof,
        o: &Obligation,
        prov: &Provenance,
        aliases: &mut Aliases,
    ) -> Result<(Obligation, Derivation), EngineError> {
        let (delta, f, inner) = self.goal_form(goal, o, aliases, prov)?;
        let phi = Obligation::new(delta.clone(), f.clone());
        let neg = Assumption::hidden_fact(Expr::not(o.goal.clone()));
        let (rule, sub_obl, out) = match self.label(token, o, prov)? {
            Some(l) => {
                let def = Assumption::def(l.clone(), Definable::Obligation(Box::new(phi)), false);
                let sub = extend(o, [def.clone(), Assumption::hidden_fact(Expr::ident(l))], o.goal.clone());
                let mut c = o.context.with(def);
                c.push(neg);
                c.extend(delta);
                (Rule::Suffices2, sub, Obligation::new(c, f))
            }
            None => {
                let sub = extend(o, [Assumption::Fact { fact: phi, hidden: false }], o.goal.clone());
                let mut c = o.context.with(neg);
                c.extend(delta);
                (Rule::Suffices1, sub, Obligation::new(c, f))
            }
        };
        let d = self.claim(proof, &sub_obl, prov, aliases, None);
        *aliases = inner;
        Ok((out.clone(), node(rule, o, &out, prov, vec![Premise::Derivation(d)])))
    }

    fn pick(
        &mut self,
        bs: &[Binder],
        body: &Expr,
        proof: &Proof,
        o: &Obligation,
        prov: &Provenance,
        aliases: &mut Aliases,
    ) -> Result<(Obligation, Derivation), EngineError> {
        let mut inner = aliases.clone();
        let mut scope = o.context.bound_names();
        let mut kernel = Vec::new();
        let mut seen = BTreeSet::new();
        for b in bs {
            if !seen.insert(b.name.clone()) {
                return Err(EngineError::from_meta(prov.clone(), o.clone(), crate::meta::MetaError::DuplicateBinder(b.name.clone())));
            }
            let domain = match &b.domain {
                Some(d) => Some(self.resolve(d, &inner, &scope, prov, o)?),
                None => None,
            };
            let mut avoid = scope.clone();
            avoid.extend(inner.values().cloned());
            let k = fresh_name(&b.name, &avoid);
            if k == b.name {
                inner.remove(&b.name);
            } else {
                inner.insert(b.name.clone(), k.clone());
            }
            scope.insert(k.clone());
            kernel.push(Binder::new(k, domain));
        }
        let p = self.resolve(body, &inner, &scope, prov, o)?;
        let exists = with_goal(o, Expr::exists(kernel.clone(), p.clone()));
        let reflected = reflect_binders(&kernel).map_err(|e| EngineError::from_meta(prov.clone(), o.clone(), e))?;
        let mut c = o.context.clone();
        c.extend(reflected);
        c.push(Assumption::fact(p));
        let out = Obligation::new(c, o.goal.clone());
        let d = self.claim(proof, &exists, prov, aliases, Some(LeafKind::PickExistence));
        *aliases = inner;
        Ok((out.clone(), node(Rule::Pick, o, &out, prov, vec![Premise::Derivation(d)])))
    }
}
