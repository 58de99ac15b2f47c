//! Generators shared by the property suites and the acceptance runner.
#![allow(dead_code)]

use hproof::engine::validate::validate;
use hproof::engine::{check_theorem, Config};
use hproof::meta::{embed, filter, Assumption, Context, Definable, Obligation};
use hproof::prover::{check_trace_detailed, prove, Budget, ProverOutcome, Sequent};
use hproof::surface::*;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use proptest::sample::select;

pub fn name() -> impl Strategy<Value = String> {
    select(vec!["a", "b", "c", "S", "T"]).prop_map(String::from)
}

fn bound() -> impl Strategy<Value = String> {
    select(vec!["x", "y", "z"]).prop_map(String::from)
}

fn binop() -> impl Strategy<Value = BinOp> {
    select(vec![
        BinOp::And,
        BinOp::Or,
        BinOp::Implies,
        BinOp::Equiv,
        BinOp::Eq,
        BinOp::Neq,
        BinOp::In,
        BinOp::NotIn,
        BinOp::Subseteq,
    ])
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Arbitrary expressions over a small vocabulary, with binders.
pub fn expr() -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![
        4 => prop_oneof![name(), bound()].prop_map(Expr::ident),
        1 => any::<bool>().prop_map(Expr::bool),
    ];
    leaf.prop_recursive(4, 40, 3, |e| {
        prop_oneof![
            e.clone().prop_map(Expr::not),
            (binop(), e.clone(), e.clone()).prop_map(|(o, a, b)| Expr::binary(o, a, b)),
            (any::<bool>(), bound(), proptest::option::of(e.clone()), e.clone()).prop_map(|(all, x, d, body)| {
                let q = if all { Quant::Forall } else { Quant::Exists };
                Expr::quant(q, vec![Binder::new(x, d)], body)
            }),
            e.clone().prop_map(|s| ExprKind::Powerset(bx(s)).into()),
            (bound(), e.clone(), e.clone()).prop_map(|(var, d, p)| ExprKind::SetFilter {
                var,
                domain: bx(d),
                pred: bx(p)
            }
            .into()),
            (e.clone(), bound(), e.clone()).prop_map(|(body, var, d)| ExprKind::SetMap {
                body: bx(body),
                var,
                domain: bx(d)
            }
            .into()),
            vec(e.clone(), 0..3).prop_map(|xs| ExprKind::SetEnum(xs).into()),
            (e.clone(), e.clone()).prop_map(|(f, x)| ExprKind::FnApp(bx(f), bx(x)).into()),
            (e.clone(), e.clone()).prop_map(|(a, b)| ExprKind::FnSpace(bx(a), bx(b)).into()),
            (select(vec!["P", "Q"]), vec(e.clone(), 1..3))
                .prop_map(|(f, args)| ExprKind::OpApp(f.to_string(), args).into()),
        ]
    })
    .boxed()
}

/// Propositional formulas over at most four atoms.
pub fn prop_formula() -> BoxedStrategy<Expr> {
    let atom = select(vec!["p", "q", "r", "s"]).prop_map(Expr::ident);
    let leaf = prop_oneof![8 => atom, 1 => any::<bool>().prop_map(Expr::bool)];
    leaf.prop_recursive(4, 16, 2, |e| {
        prop_oneof![
            e.clone().prop_map(Expr::not),
            (
                select(vec![BinOp::And, BinOp::Or, BinOp::Implies, BinOp::Equiv]),
                e.clone(),
                e.clone()
            )
                .prop_map(|(o, a, b)| Expr::binary(o, a, b)),
        ]
    })
    .boxed()
}

pub fn eval(e: &Expr, v: &dyn Fn(&str) -> bool) -> bool {
    match &e.kind {
        ExprKind::Ident(x) => v(x),
        ExprKind::Bool(b) => *b,
        ExprKind::Not(a) => !eval(a, v),
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (eval(a, v), eval(b, v));
            match op {
                BinOp::And => a && b,
                BinOp::Or => a || b,
                BinOp::Implies => !a || b,
                BinOp::Equiv => a == b,
                _ => unreachable!(),
            }
        }
        _ => unreachable!(),
    }
}

/// Truth-table validity of `hyps |- goal` over atoms p, q, r, s.
pub fn valid(hyps: &[Expr], goal: &Expr) -> bool {
    (0u8..16).all(|m| {
        let v = |x: &str| {
            let i = ["p", "q", "r", "s"].iter().position(|a| *a == x).unwrap();
            m & (1 << i) != 0
        };
        !hyps.iter().all(|h| eval(h, &v)) || eval(goal, &v)
    })
}

fn fact_obligation() -> impl Strategy<Value = Obligation> {
    prop_oneof![
        3 => expr().prop_map(Obligation::goal),
        1 => (bound(), expr(), expr()).prop_map(|(x, h, g)| {
            Obligation::new(Context(vec![Assumption::New(x), Assumption::fact(h)]), g)
        }),
    ]
}

fn assumption() -> impl Strategy<Value = Assumption> {
    prop_oneof![
        name().prop_map(Assumption::New),
        (name(), expr(), any::<bool>()).prop_map(|(n, e, h)| Assumption::def(n, Definable::constant(e), h)),
        (fact_obligation(), any::<bool>()).prop_map(|(fact, hidden)| Assumption::Fact { fact, hidden }),
    ]
}

/// Random obligations. Not necessarily closed or well-formed.
pub fn obligation() -> impl Strategy<Value = Obligation> {
    (vec(assumption(), 0..6), expr()).prop_map(|(c, g)| Obligation::new(Context(c), g))
}

/// Closed obligations with unique context names, so that definitions can be
/// expanded: every free identifier is declared up front.
pub fn closed_obligation() -> impl Strategy<Value = Obligation> {
    (vec(assumption(), 0..6), expr()).prop_map(|(c, g)| {
        let mut ctx = Context(
            ["a", "b", "c", "S", "T", "x", "y", "z", "P", "Q"]
                .iter()
                .map(|n| Assumption::New(n.to_string()))
                .collect(),
        );
        let mut k = 0;
        for a in c {
            match a {
                Assumption::New(_) => {}
                Assumption::Def { def, hidden, .. } => {
                    k += 1;
                    ctx.push(Assumption::def(format!("d{k}"), def, hidden));
                }
                f => ctx.push(f),
            }
        }
        Obligation::new(ctx, g)
    })
}

/// Flip the visibility of every definition and fact selected by `mask`.
pub fn toggle(o: &Obligation, mask: &[bool]) -> Obligation {
    let mut o = o.clone();
    for (a, m) in o.context.0.iter_mut().zip(mask.iter().cycle()) {
        if *m {
            match a {
                Assumption::Def { hidden, .. } | Assumption::Fact { hidden, .. } => *hidden = !*hidden,
                Assumption::New(_) => {}
            }
        }
    }
    o
}

fn span() -> Span {
    Span::default()
}

fn step(level: u32, label: Option<String>, kind: StepKind) -> Step {
    Step {
        token: StepToken::new(level, label.as_deref()),
        kind,
        span: span(),
    }
}

fn leaf_proof() -> impl Strategy<Value = Proof> {
    prop_oneof![
        3 => Just(Proof::Obvious(span())),
        1 => Just(Proof::Omitted { explicit: true, span: span() }),
        1 => vec(prop_formula(), 0..2).prop_map(|facts| Proof::By { facts, defs: vec![], span: span() }),
    ]
}

/// One non-QED step at `level`, given the labels already in scope.
fn body_step(level: u32, n: usize, labels: Vec<String>) -> BoxedStrategy<Step> {
    let label = Some(n.to_string());
    let cited = if labels.is_empty() {
        Just(Vec::new()).boxed()
    } else {
        vec(select(labels), 0..2).prop_map(|ls| ls.into_iter().map(Expr::ident).collect()).boxed()
    };
    let proof = if level < 3 {
        prop_oneof![3 => leaf_proof(), 1 => steps(level + 1).prop_map(Proof::Steps)].boxed()
    } else {
        leaf_proof().boxed()
    };
    let l = label.clone();
    let assert = (prop_formula(), proof)
        .prop_map(move |(g, proof)| step(level, l.clone(), StepKind::Assert { goal: GoalForm::Expr(g), proof }));
    let l = label.clone();
    let case = (prop_formula(), leaf_proof())
        .prop_map(move |(cond, proof)| step(level, l.clone(), StepKind::Case { cond, proof }));
    let l = label.clone();
    let suffices = (prop_formula(), leaf_proof())
        .prop_map(move |(g, proof)| step(level, l.clone(), StepKind::Suffices { goal: GoalForm::Expr(g), proof }));
    let l = label.clone();
    let have = prop_formula().prop_map(move |e| step(level, l.clone(), StepKind::Have(e)));
    let l = label.clone();
    let pick = (prop_formula(), leaf_proof()).prop_map(move |(body, proof)| {
        step(
            level,
            l.clone(),
            StepKind::Pick {
                binders: vec![Binder::new("w", None)],
                body,
                proof,
            },
        )
    });
    let l = label.clone();
    let take = Just(()).prop_map(move |_| step(level, l.clone(), StepKind::Take(vec![Binder::new("t", None)])));
    let l = label.clone();
    let witness = Just(()).prop_map(move |_| {
        step(
            level,
            l.clone(),
            StepKind::Witness(vec![WitnessItem {
                witness: Expr::ident("p"),
                domain: None,
            }]),
        )
    });
    let l = label.clone();
    let use_ = (cited.clone(), any::<bool>()).prop_map(move |(facts, hide)| {
        let kind = if hide {
            StepKind::Hide { facts, defs: vec![] }
        } else {
            StepKind::Use { facts, defs: vec![] }
        };
        step(level, l.clone(), kind)
    });
    let l = label;
    let define = prop_formula().prop_map(move |body| {
        step(
            level,
            l.clone(),
            StepKind::Define {
                name: format!("D{n}"),
                params: vec![],
                body,
            },
        )
    });
    prop_oneof![4 => assert, 2 => case, 1 => suffices, 1 => have, 1 => pick, 1 => take, 1 => witness, 1 => use_, 1 => define]
        .boxed()
}

fn steps(level: u32) -> BoxedStrategy<Vec<Step>> {
    (0usize..4)
        .prop_flat_map(move |k| {
            let mut acc: BoxedStrategy<Vec<Step>> = Just(Vec::new()).boxed();
            for n in 1..=k {
                acc = acc
                    .prop_flat_map(move |prev: Vec<Step>| {
                        let labels: Vec<String> = prev
                            .iter()
                            .filter(|s| matches!(s.kind, StepKind::Assert { .. }))
                            .filter_map(|s| s.token.label_name())
                            .collect();
                        body_step(level, n, labels).prop_map(move |s| {
                            let mut v = prev.clone();
                            v.push(s);
                            v
                        })
                    })
                    .boxed();
            }
            (acc, leaf_proof()).prop_map(move |(mut v, proof)| {
                let n = v.len() + 1;
                v.push(step(level, Some(n.to_string()), StepKind::Qed { proof }));
                v
            })
        })
        .boxed()
}

/// Small claims: propositional goals over p, q, r, s with random step
/// sequences, possibly meaningless.
pub fn claim() -> impl Strategy<Value = Theorem> {
    (vec(prop_formula(), 0..3), prop_formula(), prop_oneof![1 => leaf_proof(), 3 => steps(1).prop_map(Proof::Steps)]).prop_map(
        |(facts, goal, proof)| {
            let mut assumptions: Vec<Hypothesis> = ["p", "q", "r", "s"]
                .iter()
                .map(|n| Hypothesis::New { name: n.to_string(), domain: None })
                .collect();
            assumptions.extend(facts.into_iter().map(Hypothesis::Fact));
            Theorem {
                name: None,
                goal: GoalForm::AssumeProve { assumptions, goal },
                proof,
                span: span(),
            }
        },
    )
}

/// Filtration is idempotent and leaves nothing hidden.
pub fn filter_law(o: &Obligation) -> Result<(), TestCaseError> {
    let f = filter(o);
    prop_assert_eq!(f.hidden_count(), 0);
    prop_assert_eq!(filter(&f), f);
    Ok(())
}

/// The embedding ignores visibility.
pub fn embed_law(o: &Obligation, mask: &[bool]) -> Result<(), TestCaseError> {
    let a = embed(o).map_err(|e| e.to_string());
    let b = embed(&toggle(o, mask)).map_err(|e| e.to_string());
    prop_assert_eq!(a, b);
    Ok(())
}

/// Checking is deterministic; derivations of meaningful claims are
/// well-shaped and their leaves closed.
pub fn shape_law(th: &Theorem) -> Result<(), TestCaseError> {
    let config = Config::default();
    let r = check_theorem(th, &config);
    prop_assert_eq!(check_theorem(th, &config), r.clone());
    if !r.is_meaningful() {
        return Ok(());
    }
    let shape = validate(&r.derivation, &r.root);
    prop_assert!(shape.is_empty(), "{:?}\n{}", shape, pp_theorem(th));
    for l in r.leaves() {
        prop_assert!(l.obligation.is_closed(), "open leaf at {}", l.origin.display_path());
    }
    Ok(())
}

/// The prover proves exactly the valid propositional sequents, and its
/// traces replay.
pub fn oracle_law(hyps: &[Expr], goal: &Expr) -> Result<(), TestCaseError> {
    let s = Sequent::new(hyps.to_vec(), goal.clone());
    let expected = valid(hyps, goal);
    match prove(&s, &Budget::default()) {
        ProverOutcome::Proved { trace, .. } => {
            prop_assert!(expected, "proved an invalid sequent {}", s);
            prop_assert!(check_trace_detailed(&s, &trace).is_ok(), "{:?}", check_trace_detailed(&s, &trace));
        }
        ProverOutcome::Unknown(stats) => {
            prop_assert!(!expected, "missed a valid sequent {} ({:?})", s, stats);
        }
        ProverOutcome::Malformed(m) => prop_assert!(false, "malformed: {}", m),
    }
    Ok(())
}

/// Files of the small-claims corpus, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "tla"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect()
}

pub fn data(name: &str) -> String {
    let p = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    std::fs::read_to_string(p).unwrap()
}
