//! Recursive-descent parser for expressions and theorems.

use super::ast::*;
use super::lexer::{tokenize, Kw, Tok, Token};
use super::ParseError;

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_theorem(text: &str) -> Result<Theorem, ParseError> {
    let mut p = Parser::new(text)?;
    let th = p.theorem()?;
    p.expect_eof()?;
    Ok(th)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let sp = self.span();
        ParseError::Syntax {
            line: sp.line,
            col: sp.col,
            message: format!("unexpected {}", self.peek()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn level_error(&self, at: Span, message: impl Into<String>) -> ParseError {
        ParseError::Level {
            line: at.line,
            col: at.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<Token, ParseError> {
        if *self.peek() == t {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::StepBegin(..) => Err(self.level_error(
                self.span(),
                "step does not belong to any enclosing proof",
            )),
            _ => Err(self.unexpected(&["end of input"])),
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(n) => {
                let sp = self.advance().span;
                Ok((n, sp))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.equiv()
    }

    fn mk(&self, kind: ExprKind, start: Span) -> Expr {
        Expr::new(kind, start.to(self.prev_span()))
    }

    fn equiv(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Equiv) {
            let rhs = self.implies()?;
            lhs = self.mk(
                ExprKind::Binary(BinOp::Equiv, Box::new(lhs), Box::new(rhs)),
                start,
            );
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(self.mk(
                ExprKind::Binary(BinOp::Implies, Box::new(lhs), Box::new(rhs)),
                start,
            ));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = self.mk(
                ExprKind::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs)),
                start,
            );
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let mut lhs = self.not()?;
        while self.eat(&Tok::And) {
            let rhs = self.not()?;
            lhs = self.mk(
                ExprKind::Binary(BinOp::And, Box::new(lhs), Box::new(rhs)),
                start,
            );
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        if self.eat(&Tok::Not) {
            let e = self.not()?;
            return Ok(self.mk(ExprKind::Not(Box::new(e)), start));
        }
        self.relation()
    }

    fn relop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Neq => BinOp::Neq,
            Tok::In => BinOp::In,
            Tok::NotIn => BinOp::NotIn,
            Tok::Subseteq => BinOp::Subseteq,
            _ => return None,
        })
    }

    fn relation(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let lhs = self.prefix()?;
        if let Some(op) = self.relop() {
            self.advance();
            let rhs = self.prefix()?;
            if self.relop().is_some() {
                return Err(ParseError::Syntax {
                    line: self.span().line,
                    col: self.span().col,
                    message: "relational operators do not associate; add parentheses".into(),
                    expected: Vec::new(),
                });
            }
            return Ok(self.mk(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), start));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        if self.eat(&Tok::Kw(Kw::Subset)) {
            let e = self.prefix()?;
            return Ok(self.mk(ExprKind::Powerset(Box::new(e)), start));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let mut e = self.atom()?;
        while *self.peek() == Tok::LBrack {
            self.advance();
            let arg = self.expr()?;
            self.expect(Tok::RBrack, "`]`")?;
            e = self.mk(ExprKind::FnApp(Box::new(e), Box::new(arg)), start);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                if *self.peek() == Tok::LParen {
                    self.advance();
                    let mut args = vec![self.expr()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(self.mk(ExprKind::OpApp(name, args), start));
                }
                Ok(self.mk(ExprKind::Ident(name), start))
            }
            Tok::StepRef(level, label) => {
                self.advance();
                Ok(self.mk(ExprKind::Ident(format!("<{level}>{label}")), start))
            }
            Tok::Kw(Kw::True) => {
                self.advance();
                Ok(self.mk(ExprKind::Bool(true), start))
            }
            Tok::Kw(Kw::False) => {
                self.advance();
                Ok(self.mk(ExprKind::Bool(false), start))
            }
            Tok::LParen => {
                self.advance();
                let mut e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                e.span = start.to(self.prev_span());
                Ok(e)
            }
            Tok::Forall | Tok::Exists => self.quantifier(),
            Tok::LBrace => self.braces(),
            Tok::LBrack => {
                self.advance();
                let dom = self.expr()?;
                self.expect(Tok::Arrow, "`->`")?;
                let cod = self.expr()?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(self.mk(ExprKind::FnSpace(Box::new(dom), Box::new(cod)), start))
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    fn quantifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        let q = match self.advance().tok {
            Tok::Forall => Quant::Forall,
            _ => Quant::Exists,
        };
        let binders = self.binders()?;
        self.expect(Tok::Colon, "`:`")?;
        let body = self.expr()?;
        Ok(self.mk(ExprKind::Quant(q, binders, Box::new(body)), start))
    }

    /// `x, y \in S, z`: a domain applies to the whole preceding name group.
    fn binders(&mut self) -> Result<Vec<Binder>, ParseError> {
        let mut out = Vec::new();
        loop {
            let mut group = vec![self.ident()?.0];
            while *self.peek() == Tok::Comma && matches!(self.peek_at(1), Tok::Ident(_)) {
                self.advance();
                group.push(self.ident()?.0);
            }
            let domain = if self.eat(&Tok::In) {
                Some(self.expr()?)
            } else {
                None
            };
            out.extend(group.into_iter().map(|n| Binder::new(n, domain.clone())));
            if !(domain.is_some() && *self.peek() == Tok::Comma) {
                return Ok(out);
            }
            self.advance();
        }
    }

    fn braces(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        self.advance();
        if self.eat(&Tok::RBrace) {
            return Ok(self.mk(ExprKind::SetEnum(Vec::new()), start));
        }
        let parenthesized = *self.peek() == Tok::LParen;
        let first = self.expr()?;
        if self.eat(&Tok::Colon) {
            if let (false, ExprKind::Binary(BinOp::In, v, dom)) = (parenthesized, &first.kind) {
                if let Some(var) = v.as_ident() {
                    let pred = self.expr()?;
                    self.expect(Tok::RBrace, "`}`")?;
                    return Ok(self.mk(
                        ExprKind::SetFilter {
                            var: var.to_string(),
                            domain: dom.clone(),
                            pred: Box::new(pred),
                        },
                        start,
                    ));
                }
            }
            let (var, _) = self.ident()?;
            self.expect(Tok::In, "`\\in`")?;
            let domain = self.expr()?;
            self.expect(Tok::RBrace, "`}`")?;
            return Ok(self.mk(
                ExprKind::SetMap {
                    body: Box::new(first),
                    var,
                    domain: Box::new(domain),
                },
                start,
            ));
        }
        let mut items = vec![first];
        while self.eat(&Tok::Comma) {
            items.push(self.expr()?);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(self.mk(ExprKind::SetEnum(items), start))
    }

    // ---- theorems and proofs ----

    fn theorem(&mut self) -> Result<Theorem, ParseError> {
        let start = self.span();
        self.expect(Tok::Kw(Kw::Theorem), "`THEOREM`")?;
        let name = if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::DefEq {
            let (n, _) = self.ident()?;
            self.advance();
            Some(n)
        } else {
            None
        };
        let goal = self.goal_form()?;
        let proof = self.subproof(0)?;
        Ok(Theorem {
            name,
            goal,
            proof,
            span: start.to(self.prev_span()),
        })
    }

    fn goal_form(&mut self) -> Result<GoalForm, ParseError> {
        if !self.eat(&Tok::Kw(Kw::Assume)) {
            return Ok(GoalForm::Expr(self.expr()?));
        }
        let mut assumptions = Vec::new();
        loop {
            if self.eat(&Tok::Kw(Kw::New)) {
                let (name, _) = self.ident()?;
                let domain = if self.eat(&Tok::In) {
                    Some(self.expr()?)
                } else {
                    None
                };
                assumptions.push(Hypothesis::New { name, domain });
            } else {
                assumptions.push(Hypothesis::Fact(self.expr()?));
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::Kw(Kw::Prove), "`PROVE`")?;
        let goal = self.expr()?;
        Ok(GoalForm::AssumeProve { assumptions, goal })
    }

    /// Facts and `DEF` names shared by BY, USE and HIDE.
    fn fact_list(&mut self) -> Result<(Vec<Expr>, Vec<String>), ParseError> {
        let mut facts = Vec::new();
        if !matches!(self.peek(), Tok::Kw(Kw::Def)) && self.starts_expr() {
            facts.push(self.expr()?);
            while self.eat(&Tok::Comma) {
                facts.push(self.expr()?);
            }
        }
        let mut defs = Vec::new();
        if self.eat(&Tok::Kw(Kw::Def)) {
            defs.push(self.ident()?.0);
            while self.eat(&Tok::Comma) {
                defs.push(self.ident()?.0);
            }
        }
        Ok((facts, defs))
    }

    fn starts_expr(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::StepRef(..)
                | Tok::Kw(Kw::True)
                | Tok::Kw(Kw::False)
                | Tok::Kw(Kw::Subset)
                | Tok::LParen
                | Tok::LBrace
                | Tok::LBrack
                | Tok::Forall
                | Tok::Exists
                | Tok::Not
        )
    }

    /// Parses the optional proof of a step at `level` (0 for the theorem).
    fn subproof(&mut self, level: u32) -> Result<Proof, ParseError> {
        let explicit_proof = self.eat(&Tok::Kw(Kw::Proof));
        let start = self.span();
        match self.peek().clone() {
            Tok::Kw(Kw::Obvious) => {
                self.advance();
                Ok(Proof::Obvious(start))
            }
            Tok::Kw(Kw::Omitted) => {
                self.advance();
                Ok(Proof::Omitted {
                    explicit: true,
                    span: start,
                })
            }
            Tok::Kw(Kw::By) => {
                self.advance();
                let (facts, defs) = self.fact_list()?;
                Ok(Proof::By {
                    facts,
                    defs,
                    span: start.to(self.prev_span()),
                })
            }
            Tok::StepBegin(n, _) if n > level => Ok(Proof::Steps(self.steps(n)?)),
            Tok::StepBegin(..) if explicit_proof => Err(self.level_error(
                start,
                format!("subproof steps must have a level greater than {level}"),
            )),
            _ if explicit_proof => Err(self.unexpected(&["OBVIOUS", "OMITTED", "BY", "step"])),
            _ => Ok(Proof::Omitted {
                explicit: false,
                span: self.prev_span(),
            }),
        }
    }

    fn steps(&mut self, level: u32) -> Result<Vec<Step>, ParseError> {
        let mut steps = Vec::new();
        loop {
            let start = self.span();
            let token = match self.peek().clone() {
                Tok::StepBegin(n, label) if n == level => StepToken { level: n, label },
                Tok::StepBegin(n, _) => {
                    let msg = if steps.is_empty() {
                        format!("expected a step at level {level}, found level {n}")
                    } else if n > level {
                        format!(
                            "level {n} step cannot follow a level {level} step that already has a proof"
                        )
                    } else {
                        format!("level {level} proof ends without a QED step")
                    };
                    return Err(self.level_error(start, msg));
                }
                _ if steps.is_empty() => return Err(self.unexpected(&["step"])),
                _ => {
                    return Err(
                        self.level_error(start, format!("level {level} proof ends without a QED step"))
                    )
                }
            };
            self.advance();
            let kind = self.step_kind(level)?;
            let is_qed = matches!(kind, StepKind::Qed { .. });
            steps.push(Step {
                token,
                kind,
                span: start.to(self.prev_span()),
            });
            if is_qed {
                if let Tok::StepBegin(n, _) = self.peek().clone() {
                    if n == level {
                        return Err(
                            self.level_error(self.span(), "no step may follow QED at the same level")
                        );
                    }
                    if n > level {
                        return Err(self.level_error(
                            self.span(),
                            format!("level {n} step cannot follow a QED step that already has a proof"),
                        ));
                    }
                }
                return Ok(steps);
            }
        }
    }

    fn step_kind(&mut self, level: u32) -> Result<StepKind, ParseError> {
        let kind = match self.peek().clone() {
            Tok::Kw(Kw::Use) => {
                self.advance();
                let (facts, defs) = self.fact_list()?;
                StepKind::Use { facts, defs }
            }
            Tok::Kw(Kw::Hide) => {
                self.advance();
                let (facts, defs) = self.fact_list()?;
                StepKind::Hide { facts, defs }
            }
            Tok::Kw(Kw::Define) => {
                self.advance();
                self.definition()?
            }
            Tok::Ident(_) if self.looks_like_definition() => self.definition()?,
            Tok::Kw(Kw::Have) => {
                self.advance();
                StepKind::Have(self.expr()?)
            }
            Tok::Kw(Kw::Take) => {
                self.advance();
                StepKind::Take(self.binders()?)
            }
            Tok::Kw(Kw::Witness) => {
                self.advance();
                let mut items = Vec::new();
                loop {
                    let e = self.expr()?;
                    let item = match e.kind {
                        ExprKind::Binary(BinOp::In, w, d) => WitnessItem {
                            witness: *w,
                            domain: Some(*d),
                        },
                        _ => WitnessItem {
                            witness: e,
                            domain: None,
                        },
                    };
                    items.push(item);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                StepKind::Witness(items)
            }
            Tok::Kw(Kw::Suffices) => {
                self.advance();
                let goal = self.goal_form()?;
                let proof = self.subproof(level)?;
                StepKind::Suffices { goal, proof }
            }
            Tok::Kw(Kw::Pick) => {
                self.advance();
                let binders = self.binders()?;
                self.expect(Tok::Colon, "`:`")?;
                let body = self.expr()?;
                let proof = self.subproof(level)?;
                StepKind::Pick {
                    binders,
                    body,
                    proof,
                }
            }
            Tok::Kw(Kw::Case) => {
                self.advance();
                let cond = self.expr()?;
                let proof = self.subproof(level)?;
                StepKind::Case { cond, proof }
            }
            Tok::Kw(Kw::Qed) => {
                self.advance();
                let proof = self.subproof(level)?;
                StepKind::Qed { proof }
            }
            _ => {
                let goal = self.goal_form()?;
                let proof = self.subproof(level)?;
                StepKind::Assert { goal, proof }
            }
        };
        Ok(kind)
    }

    fn looks_like_definition(&self) -> bool {
        match self.peek_at(1) {
            Tok::DefEq => true,
            Tok::LParen => {
                let mut k = 2;
                loop {
                    match (self.peek_at(k), self.peek_at(k + 1)) {
                        (Tok::Ident(_), Tok::Comma) => k += 2,
                        (Tok::Ident(_), Tok::RParen) => {
                            return *self.peek_at(k + 2) == Tok::DefEq;
                        }
                        _ => return false,
                    }
                }
            }
            _ => false,
        }
    }

    fn definition(&mut self) -> Result<StepKind, ParseError> {
        let (name, _) = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            params.push(self.ident()?.0);
            while self.eat(&Tok::Comma) {
                params.push(self.ident()?.0);
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        self.expect(Tok::DefEq, "`==`")?;
        let body = self.expr()?;
        Ok(StepKind::Define { name, params, body })
    }
}
