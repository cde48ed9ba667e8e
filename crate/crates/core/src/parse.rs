//! Reader for the `(VAR …) (RULES …)` input format.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::ptrs::{check_rule_shape, MultiDistribution, Ptrs, PtrsError, Rule};
use crate::term::{Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("arity mismatch at {line}:{col}: {name} used with {found} arguments, expected {expected}")]
    ArityMismatch { name: String, expected: usize, found: usize, line: usize, col: usize },
    #[error("probabilities of rule {rule} sum to {sum}, not 1")]
    ProbabilitySum { rule: String, sum: String },
    #[error("right-hand side {rhs} has variables not in left-hand side {lhs}")]
    ExtraVariable { lhs: String, rhs: String },
    #[error("invalid rule {rule}: {msg}")]
    InvalidRule { rule: String, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Slash,
    Arrow,
    Hash,
    Ident(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, allow_hash: bool) -> Result<Vec<Token>, InputError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l, cc) = (line, col);
        let mut push = |tok| out.push(Token { tok, line: l, col: cc });
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '/' => Some(Tok::Slash),
            '#' if allow_hash => Some(Tok::Hash),
            _ => None,
        };
        if let Some(tok) = single {
            push(tok);
            i += 1;
            col += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            push(Tok::Arrow);
            i += 2;
            col += 2;
        } else if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            push(Tok::Ident(chars[start..i].iter().collect()));
            col += i - start;
        } else {
            return Err(InputError::Parse { line, col, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// A parsed input file: the rules plus the declared variables and the arity
/// of every function symbol.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub ptrs: Ptrs,
    pub vars: BTreeSet<String>,
    pub arities: BTreeMap<String, usize>,
}

impl Program {
    /// Parse a plain term over this program's signature. Unknown symbols are
    /// accepted with the arity of their first use.
    pub fn parse_term(&self, text: &str) -> Result<Term, InputError> {
        let mut p = Parser { toks: lex(text, false)?, pos: 0, vars: self.vars.clone(), arities: self.arities.clone(), allow_hash: false };
        let t = p.term()?;
        p.expect_end()?;
        Ok(t)
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: BTreeSet<String>,
    arities: BTreeMap<String, usize>,
    allow_hash: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn loc(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or_else(|| self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, InputError> {
        let (line, col) = self.loc();
        Err(InputError::Parse { line, col, msg: msg.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), InputError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expect_end(&self) -> Result<(), InputError> {
        if self.pos < self.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn ident(&mut self) -> Result<String, InputError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn term(&mut self) -> Result<Term, InputError> {
        let (line, col) = self.loc();
        let name = self.ident()?;
        let annotated = if self.allow_hash && self.peek() == Some(&Tok::Hash) {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.bump() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RParen) => break,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected ',' or ')'");
                    }
                }
            }
        }
        if self.vars.contains(&name) {
            if !args.is_empty() {
                return Err(InputError::ArityMismatch { name, expected: 0, found: args.len(), line, col });
            }
            if annotated {
                return self.err("variables cannot be annotated");
            }
            return Ok(Term::var(&name));
        }
        match self.arities.get(&name) {
            Some(&n) if n != args.len() => {
                return Err(InputError::ArityMismatch { name, expected: n, found: args.len(), line, col })
            }
            Some(_) => {}
            None => {
                self.arities.insert(name.clone(), args.len());
            }
        }
        let t = Term::app(Symbol::new(&name, args.len()), args);
        Ok(t.with_root_annotation(annotated))
    }

    fn rational(&mut self) -> Result<BigRational, InputError> {
        let num = self.integer()?;
        if self.peek() == Some(&Tok::Slash) {
            self.pos += 1;
            let den = self.integer()?;
            if den.is_zero() {
                return self.err("zero denominator");
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    fn integer(&mut self) -> Result<BigInt, InputError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s.chars().all(|c| c.is_ascii_digit()) => {
                let v = s.parse::<BigInt>().expect("digits");
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected integer"),
        }
    }

    fn rule(&mut self) -> Result<Rule, InputError> {
        let lhs = self.term()?;
        self.expect(Tok::Arrow, "'->'")?;
        let mut entries = Vec::new();
        if self.peek() == Some(&Tok::LBrace) {
            self.pos += 1;
            loop {
                let p = self.rational()?;
                self.expect(Tok::Colon, "':'")?;
                entries.push((p, self.term()?));
                match self.bump() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RBrace) => break,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected ',' or '}'");
                    }
                }
            }
        } else {
            entries.push((BigRational::from_integer(1.into()), self.term()?));
        }
        let show = || {
            let rhs: Vec<String> = entries.iter().map(|(p, t)| format!("{p}:{t}")).collect();
            format!("{lhs} -> {{{}}}", rhs.join(", "))
        };
        let rule_text = show();
        let dist = MultiDistribution::new(entries.clone()).map_err(|e| match e {
            PtrsError::ProbabilitySum(sum) => InputError::ProbabilitySum { rule: rule_text.clone(), sum },
            other => InputError::InvalidRule { rule: rule_text.clone(), msg: other.to_string() },
        })?;
        check_rule_shape(&lhs, &dist).map_err(|e| match e {
            PtrsError::ExtraVariable { lhs, rhs } => InputError::ExtraVariable { lhs, rhs },
            other => InputError::InvalidRule { rule: rule_text.clone(), msg: other.to_string() },
        })?;
        Rule::new(lhs, dist).map_err(|e| InputError::InvalidRule { rule: rule_text, msg: e.to_string() })
    }

    fn file(&mut self) -> Result<Program, InputError> {
        let mut rules = Vec::new();
        while self.pos < self.toks.len() {
            self.expect(Tok::LParen, "'('")?;
            let kw = self.ident()?;
            match kw.as_str() {
                "VAR" => {
                    while let Some(Tok::Ident(_)) = self.peek() {
                        let v = self.ident()?;
                        if v.starts_with('_') {
                            return self.err(format!("variable names may not start with '_': {v}"));
                        }
                        if self.arities.contains_key(&v) {
                            return self.err(format!("{v} is already used as a function symbol"));
                        }
                        self.vars.insert(v);
                    }
                }
                "RULES" => {
                    while let Some(Tok::Ident(_)) = self.peek() {
                        rules.push(self.rule()?);
                    }
                }
                other => return self.err(format!("unknown declaration '{other}'")),
            }
            self.expect(Tok::RParen, "')'")?;
        }
        Ok(Program { ptrs: Ptrs::new(rules), vars: self.vars.clone(), arities: self.arities.clone() })
    }
}

pub fn parse_program(text: &str) -> Result<Program, InputError> {
    let mut p = Parser { toks: lex(text, false)?, pos: 0, vars: BTreeSet::new(), arities: BTreeMap::new(), allow_hash: false };
    p.file()
}

pub fn parse_ptrs(text: &str) -> Result<Ptrs, InputError> {
    parse_program(text).map(|p| p.ptrs)
}

/// Read a term where `f#` marks an annotated occurrence; identifiers in
/// `vars` are variables. Intended for tests and examples.
pub fn parse_term_annotated(text: &str, vars: &[&str]) -> Result<Term, InputError> {
    let mut p = Parser {
        toks: lex(text, true)?,
        pos: 0,
        vars: vars.iter().map(|s| s.to_string()).collect(),
        arities: BTreeMap::new(),
        allow_hash: true,
    };
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}
