//! Text expressions for polynomials over the coefficient algebra.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' uint)?
//! atom   := rational | 'hbar' | 'x' uint | 'K[' family ';' uint ',' uint ']' | '(' expr ')'
//! ```
//!
//! The canonical text printed by [`Poly`]'s `Display` parses back to the same
//! polynomial.

use std::collections::BTreeSet;
use std::fmt;

use starprod_core::algebra::{CoeffElement, Poly, PropagatorSymbol, Rational};

/// Syntax tree of a parsed expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Number(Rational),
    Hbar,
    Var(u32),
    Symbol { family: String, row: u32, col: u32 },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Expected { expected: &'static str, found: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("exponent must be a non-negative integer")]
    BadExponent,
    #[error("integer `{0}` is too large")]
    Overflow(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("variable indices start at 1")]
    ZeroIndex,
}

/// A syntax error at a character offset (0-based) of the input.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("column {}: {kind}", .position + 1)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

/// Raised while turning an [`Expr`] into a [`Poly`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("x{index} is outside dimension {dim}")]
    VarOutOfRange { index: u32, dim: u32 },
    #[error("{symbol} has an index outside dimension {dim}")]
    SymbolOutOfRange { symbol: PropagatorSymbol, dim: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Punct(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Int(chars[start..i].iter().collect())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()[];,".contains(c) {
            out.push((start, Tok::Punct(c)));
            i += 1;
        } else {
            return Err(ParseError { position: start, kind: ParseErrorKind::UnexpectedChar(c) });
        }
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.tokens[self.pos].clone();
        if t.1 != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { position: self.offset(), kind }
    }

    fn expected(&self, expected: &'static str) -> ParseError {
        self.error(ParseErrorKind::Expected { expected, found: self.peek().to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, what: &'static str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn uint(&mut self, what: &'static str) -> Result<u32, ParseError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let v = s.parse().map_err(|_| self.error(ParseErrorKind::Overflow(s)))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.expected(what)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            if !matches!(self.peek(), Tok::Int(_)) {
                return Err(self.error(ParseErrorKind::BadExponent));
            }
            let exp = self.uint("an exponent")?;
            return Ok(Expr::Pow(Box::new(base), exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (start, tok) = self.bump();
        match tok {
            Tok::Int(num) => {
                let mut text = num;
                if self.eat('/') {
                    match self.bump() {
                        (_, Tok::Int(den)) => {
                            if den.bytes().all(|b| b == b'0') {
                                return Err(ParseError { position: start, kind: ParseErrorKind::ZeroDenominator });
                            }
                            text = format!("{text}/{den}");
                        }
                        _ => {
                            self.pos -= 1;
                            return Err(self.expected("a denominator"));
                        }
                    }
                }
                let value = text
                    .parse::<Rational>()
                    .map_err(|_| ParseError { position: start, kind: ParseErrorKind::Overflow(text) })?;
                Ok(Expr::Number(value))
            }
            Tok::Ident(name) => self.identifier(start, name),
            Tok::Punct('(') => {
                let inner = self.expr()?;
                self.expect(')', "`)`")?;
                Ok(inner)
            }
            _ => {
                self.pos = self.pos.saturating_sub(usize::from(tok != Tok::End));
                Err(self.expected("a number, variable, symbol or `(`"))
            }
        }
    }

    fn identifier(&mut self, start: usize, name: String) -> Result<Expr, ParseError> {
        if name == "hbar" {
            return Ok(Expr::Hbar);
        }
        if name == "K" && *self.peek() == Tok::Punct('[') {
            self.pos += 1;
            let family = match self.bump() {
                (_, Tok::Ident(f)) => f,
                _ => {
                    self.pos -= 1;
                    return Err(self.expected("a family name"));
                }
            };
            self.expect(';', "`;`")?;
            let row = self.index()?;
            self.expect(',', "`,`")?;
            let col = self.index()?;
            self.expect(']', "`]`")?;
            return Ok(Expr::Symbol { family, row, col });
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: u32 = digits
                    .parse()
                    .map_err(|_| ParseError { position: start, kind: ParseErrorKind::Overflow(digits.into()) })?;
                if index == 0 {
                    return Err(ParseError { position: start, kind: ParseErrorKind::ZeroIndex });
                }
                return Ok(Expr::Var(index));
            }
        }
        Err(ParseError { position: start, kind: ParseErrorKind::UnknownIdentifier(name) })
    }

    fn index(&mut self) -> Result<u32, ParseError> {
        let at = self.offset();
        let v = self.uint("an index")?;
        if v == 0 {
            return Err(ParseError { position: at, kind: ParseErrorKind::ZeroIndex });
        }
        Ok(v)
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { tokens: tokenize(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.expected("an operator or end of input"));
    }
    Ok(e)
}

/// Dimension and symmetric families used when building polynomials.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub dim: u32,
    pub symmetric: BTreeSet<String>,
}

impl Context {
    pub fn new(dim: u32) -> Self {
        Context { dim, symmetric: BTreeSet::new() }
    }

    pub fn with_symmetric<I, S>(mut self, families: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.symmetric.extend(families.into_iter().map(Into::into));
        self
    }
}

impl Expr {
    /// Largest variable or symbol index mentioned.
    pub fn max_index(&self) -> u32 {
        match self {
            Expr::Number(_) | Expr::Hbar => 0,
            Expr::Var(i) => *i,
            Expr::Symbol { row, col, .. } => (*row).max(*col),
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_index(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_index().max(b.max_index()),
        }
    }

    pub fn to_poly(&self, ctx: &Context) -> Result<Poly, EvalError> {
        let d = ctx.dim;
        Ok(match self {
            Expr::Number(r) => Poly::from_rational(d, r.clone()),
            Expr::Hbar => Poly::constant(d, CoeffElement::hbar_pow(1)),
            Expr::Var(i) => Poly::var(d, *i).map_err(|_| EvalError::VarOutOfRange { index: *i, dim: d })?,
            Expr::Symbol { family, row, col } => {
                let symbol = if ctx.symmetric.contains(family) {
                    PropagatorSymbol::symmetric(family.as_str(), *row, *col)
                } else {
                    PropagatorSymbol::new(family.as_str(), *row, *col)
                };
                if (*row).max(*col) > d {
                    return Err(EvalError::SymbolOutOfRange { symbol, dim: d });
                }
                Poly::constant(d, CoeffElement::symbol(symbol))
            }
            Expr::Neg(a) => -a.to_poly(ctx)?,
            Expr::Add(a, b) => &a.to_poly(ctx)? + &b.to_poly(ctx)?,
            Expr::Sub(a, b) => &a.to_poly(ctx)? - &b.to_poly(ctx)?,
            Expr::Mul(a, b) => &a.to_poly(ctx)? * &b.to_poly(ctx)?,
            Expr::Pow(a, e) => a.to_poly(ctx)?.pow(*e),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(text: &str, d: u32) -> Poly {
        parse(text).unwrap().to_poly(&Context::new(d)).unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(poly("x1*x2 + hbar*K[K;1,2]", 2).to_string(), "x1*x2 + hbar*K[K;1,2]");
        assert_eq!(poly("(x1+1)^2", 1).to_string(), "x1^2 + 2*x1 + 1");
        assert_eq!(poly("-x1^2", 1).to_string(), "-x1^2");
        assert_eq!(poly("2 - 3/6*x1 * -x1", 1).to_string(), "1/2*x1^2 + 2");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("x1^-1").unwrap_err();
        assert_eq!(e, ParseError { position: 3, kind: ParseErrorKind::BadExponent });
        let e = parse("x1 + y").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("y".into()));
        assert_eq!(e.position, 5);
        assert_eq!(parse("1/0").unwrap_err().kind, ParseErrorKind::ZeroDenominator);
        assert_eq!(parse("(x1").unwrap_err().to_string(), "column 4: expected `)`, found end of input");
        assert!(matches!(parse("x1 x2").unwrap_err().kind, ParseErrorKind::Expected { .. }));
        assert!(matches!(parse("x1^2^3").unwrap_err().kind, ParseErrorKind::Expected { .. }));
        assert_eq!(parse("x0").unwrap_err().kind, ParseErrorKind::ZeroIndex);
        assert_eq!(parse("x1 $").unwrap_err().kind, ParseErrorKind::UnexpectedChar('$'));
    }

    #[test]
    fn symmetric_families_normalise() {
        let ctx = Context::new(2).with_symmetric(["K"]);
        let p = parse("K[K;2,1] - K[K;1,2]").unwrap().to_poly(&ctx).unwrap();
        assert!(p.is_zero());
        assert!(!poly("K[K;2,1] - K[K;1,2]", 2).is_zero());
    }

    #[test]
    fn indices_checked_against_dimension() {
        let e = parse("x3").unwrap();
        assert_eq!(e.max_index(), 3);
        assert_eq!(e.to_poly(&Context::new(2)).unwrap_err(), EvalError::VarOutOfRange { index: 3, dim: 2 });
        assert!(parse("K[L;1,4]").unwrap().to_poly(&Context::new(3)).is_err());
    }
}
