//! Tokenizer for the ASCII proof language.

use super::ast::Span;
use super::ParseError;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `<n>l.` at the start of a step.
    StepBegin(u32, Option<String>),
    /// `<n>l` used as a fact.
    StepRef(u32, String),
    Kw(Kw),
    Forall,
    Exists,
    In,
    NotIn,
    Subseteq,
    And,
    Or,
    Not,
    Implies,
    Equiv,
    Eq,
    Neq,
    DefEq,
    Arrow,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Theorem,
    Assume,
    Prove,
    New,
    Define,
    Proof,
    Obvious,
    Omitted,
    By,
    Use,
    Hide,
    Def,
    Suffices,
    Take,
    Witness,
    Have,
    Pick,
    Case,
    Qed,
    Subset,
    True,
    False,
}

const KEYWORDS: &[(&str, Kw)] = &[
    ("THEOREM", Kw::Theorem),
    ("ASSUME", Kw::Assume),
    ("PROVE", Kw::Prove),
    ("NEW", Kw::New),
    ("DEFINE", Kw::Define),
    ("PROOF", Kw::Proof),
    ("OBVIOUS", Kw::Obvious),
    ("OMITTED", Kw::Omitted),
    ("BY", Kw::By),
    ("USE", Kw::Use),
    ("HIDE", Kw::Hide),
    ("DEF", Kw::Def),
    ("DEFS", Kw::Def),
    ("SUFFICES", Kw::Suffices),
    ("TAKE", Kw::Take),
    ("WITNESS", Kw::Witness),
    ("HAVE", Kw::Have),
    ("PICK", Kw::Pick),
    ("CASE", Kw::Case),
    ("QED", Kw::Qed),
    ("SUBSET", Kw::Subset),
    ("TRUE", Kw::True),
    ("FALSE", Kw::False),
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.iter().any(|(k, _)| *k == s)
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(n) => return write!(f, "identifier `{n}`"),
            Tok::StepBegin(n, Some(l)) => return write!(f, "step `<{n}>{l}.`"),
            Tok::StepBegin(n, None) => return write!(f, "step `<{n}>.`"),
            Tok::StepRef(n, l) => return write!(f, "`<{n}>{l}`"),
            Tok::Kw(k) => {
                let name = KEYWORDS.iter().find(|(_, kw)| kw == k).unwrap().0;
                return write!(f, "`{name}`");
            }
            Tok::Forall => "`\\A`",
            Tok::Exists => "`\\E`",
            Tok::In => "`\\in`",
            Tok::NotIn => "`\\notin`",
            Tok::Subseteq => "`\\subseteq`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Not => "`~`",
            Tok::Implies => "`=>`",
            Tok::Equiv => "`<=>`",
            Tok::Eq => "`=`",
            Tok::Neq => "`#`",
            Tok::DefEq => "`==`",
            Tok::Arrow => "`->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<u8> {
        self.bytes.get(self.pos + k).copied()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += 1;
            if c == b'\n' {
                self.line += 1;
                self.col = 1;
            } else if c & 0xC0 != 0x80 {
                self.col += 1;
            }
        }
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn here(&self) -> Span {
        Span {
            start: self.pos,
            end: self.pos,
            line: self.line,
            col: self.col,
        }
    }

    fn error(&self, at: Span, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: at.line,
            col: at.col,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => self.bump(),
                Some(b'\\') if self.peek_at(1) == Some(b'*') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'(') if self.peek_at(1) == Some(b'*') => {
                    let start = self.here();
                    self.bump_n(2);
                    let mut depth = 1;
                    while depth > 0 {
                        if self.starts_with("(*") {
                            depth += 1;
                            self.bump_n(2);
                        } else if self.starts_with("*)") {
                            depth -= 1;
                            self.bump_n(2);
                        } else if self.peek().is_some() {
                            self.bump();
                        } else {
                            return Err(self.error(start, "unterminated comment"));
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.bump();
            } else {
                break;
            }
        }
        self.src[start..self.pos].to_string()
    }

    fn step_token(&mut self, start: Span) -> Result<Tok, ParseError> {
        self.bump();
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let digits = &self.src[digits_start..self.pos];
        if self.peek() != Some(b'>') {
            return Err(self.error(start, "malformed step token"));
        }
        let level: u32 = digits
            .parse()
            .map_err(|_| self.error(start, "step level out of range"))?;
        if level == 0 {
            return Err(self.error(start, "step level 0 is reserved"));
        }
        self.bump();
        let label = self.word();
        if self.peek() == Some(b'.') {
            self.bump();
            let label = if label.is_empty() { None } else { Some(label) };
            Ok(Tok::StepBegin(level, label))
        } else if label.is_empty() {
            Err(self.error(start, "unlabeled step token must be followed by `.`"))
        } else {
            Ok(Tok::StepRef(level, label))
        }
    }

    fn backslash(&mut self, start: Span) -> Result<Tok, ParseError> {
        if self.peek_at(1) == Some(b'/') {
            self.bump_n(2);
            return Ok(Tok::Or);
        }
        self.bump();
        let w = self.word();
        let tok = match w.as_str() {
            "A" | "forall" => Tok::Forall,
            "E" | "exists" => Tok::Exists,
            "in" => Tok::In,
            "notin" => Tok::NotIn,
            "subseteq" => Tok::Subseteq,
            "lnot" | "neg" => Tok::Not,
            "land" => Tok::And,
            "lor" => Tok::Or,
            "equiv" => Tok::Equiv,
            _ => return Err(self.error(start, format!("unknown operator `\\{w}`"))),
        };
        Ok(tok)
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia()?;
        let start = self.here();
        let Some(c) = self.peek() else {
            return Ok(Token {
                tok: Tok::Eof,
                span: start,
            });
        };
        let two = |s: &Self, t: &str| s.starts_with(t);
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            let w = self.word();
            match KEYWORDS.iter().find(|(k, _)| *k == w) {
                Some((_, kw)) => Tok::Kw(*kw),
                None => Tok::Ident(w),
            }
        } else if c == b'<' && matches!(self.peek_at(1), Some(d) if d.is_ascii_digit()) {
            self.step_token(start)?
        } else if two(self, "<=>") {
            self.bump_n(3);
            Tok::Equiv
        } else if c == b'\\' {
            self.backslash(start)?
        } else if two(self, "/\\") {
            self.bump_n(2);
            Tok::And
        } else if two(self, "/=") {
            self.bump_n(2);
            Tok::Neq
        } else if two(self, "==") {
            self.bump_n(2);
            Tok::DefEq
        } else if two(self, "=>") {
            self.bump_n(2);
            Tok::Implies
        } else if two(self, "->") {
            self.bump_n(2);
            Tok::Arrow
        } else {
            let t = match c {
                b'~' => Tok::Not,
                b'=' => Tok::Eq,
                b'#' => Tok::Neq,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBrack,
                b']' => Tok::RBrack,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b',' => Tok::Comma,
                b':' => Tok::Colon,
                _ => {
                    let ch = self.src[self.pos..].chars().next().unwrap_or('?');
                    return Err(self.error(start, format!("unexpected character `{ch}`")));
                }
            };
            self.bump();
            t
        };
        let span = Span {
            start: start.start,
            end: self.pos,
            line: start.line,
            col: start.col,
        };
        Ok(Token { tok, span })
    }
}

/// Splits `src` into tokens, always ending with `Tok::Eof`.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next()?;
        let eof = t.tok == Tok::Eof;
        out.push(t);
        if eof {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators() {
        assert_eq!(
            toks("~P /\\ Q => R <=> S \\/ T"),
            vec![
                Tok::Not,
                Tok::Ident("P".into()),
                Tok::And,
                Tok::Ident("Q".into()),
                Tok::Implies,
                Tok::Ident("R".into()),
                Tok::Equiv,
                Tok::Ident("S".into()),
                Tok::Or,
                Tok::Ident("T".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn step_tokens() {
        assert_eq!(
            toks("<1>1. <2>. BY <4>1, <4>2"),
            vec![
                Tok::StepBegin(1, Some("1".into())),
                Tok::StepBegin(2, None),
                Tok::Kw(Kw::By),
                Tok::StepRef(4, "1".into()),
                Tok::Comma,
                Tok::StepRef(4, "2".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn level_zero_rejected() {
        assert!(tokenize("<0>1. QED").is_err());
    }

    #[test]
    fn comments_skipped() {
        assert_eq!(
            toks("a \\* note\n(* block (* nested *) *) b"),
            vec![Tok::Ident("a".into()), Tok::Ident("b".into()), Tok::Eof]
        );
    }

    #[test]
    fn positions() {
        let t = tokenize("a\n  bc").unwrap();
        assert_eq!((t[1].span.line, t[1].span.col), (2, 3));
    }

    #[test]
    fn synonyms() {
        assert_eq!(toks("\\lnot"), vec![Tok::Not, Tok::Eof]);
        assert_eq!(toks("/="), vec![Tok::Neq, Tok::Eof]);
        assert_eq!(toks("DEFS"), vec![Tok::Kw(Kw::Def), Tok::Eof]);
    }

    #[test]
    fn bad_character() {
        let e = tokenize("a $ b").unwrap_err();
        assert!(e.to_string().contains("1:3"), "{e}");
    }
}
