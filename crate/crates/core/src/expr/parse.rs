//! Recursive-descent parser.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-y^2`
//! is `-(y^2)` and `2^3^2` is `2^(3^2)`. A minus directly in front of a
//! numeric literal (not followed by `^`) produces a negative literal.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;

use super::{BinOp, Expr, Func, Number};

/// Variable names accepted by the parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: BTreeSet<String>,
}

impl Default for Alphabet {
    fn default() -> Self {
        let names = ["y", "z", "u", "omega", "phi", "t", "x"]
            .into_iter()
            .map(String::from)
            .collect();
        Alphabet { names }
    }
}

impl Alphabet {
    /// Registers an extra variable name. Returns `None` for names that are
    /// not identifiers or that collide with a built-in function.
    pub fn with(mut self, name: &str) -> Option<Self> {
        let mut chars = name.chars();
        let valid = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && Func::from_name(name).is_none();
        if !valid {
            return None;
        }
        self.names.insert(name.to_string());
        Some(self)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Unexpected { found: String, expected: &'static str },
    UnknownIdentifier(String),
    UnknownFunction(String),
    Arity { function: String, given: usize },
    BadNumber(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub offset: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Unexpected { found, expected } => write!(
                f,
                "syntax error at offset {}: unexpected {found}, expected {expected}",
                self.offset
            ),
            ParseErrorKind::UnknownIdentifier(name) => {
                write!(f, "unknown identifier `{name}` at offset {}", self.offset)
            }
            ParseErrorKind::UnknownFunction(name) => {
                write!(f, "unknown function `{name}` at offset {}", self.offset)
            }
            ParseErrorKind::Arity { function, given } => write!(
                f,
                "`{function}` takes one argument, {given} given at offset {}",
                self.offset
            ),
            ParseErrorKind::BadNumber(text) => {
                write!(f, "malformed number `{text}` at offset {}", self.offset)
            }
        }
    }
}

impl ParseError {
    pub fn is_syntax(&self) -> bool {
        matches!(self.kind, ParseErrorKind::Unexpected { .. })
    }
}

/// Parses `text` over the default alphabet `{y, z, u, omega, phi, t, x}`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &Alphabet::default())
}

pub fn parse_with(text: &str, alphabet: &Alphabet) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        alphabet,
        end: text.len(),
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(p.unexpected(t.offset, "operator or end of input")),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Number),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
    text: String,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            let mut is_float = false;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                is_float = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    is_float = true;
                    i = j;
                }
            }
            let s = &text[start..i];
            let bad = || ParseError {
                kind: ParseErrorKind::BadNumber(s.to_string()),
                offset: start,
            };
            let num = if is_float {
                Number::Float(s.parse::<f64>().map_err(|_| bad())?)
            } else {
                match s.parse::<i64>() {
                    Ok(n) => Number::Rational(Rational64::from_integer(n)),
                    Err(_) => Number::Float(s.parse::<f64>().map_err(|_| bad())?),
                }
            };
            out.push(Token {
                tok: Tok::Num(num),
                offset: start,
                text: s.to_string(),
            });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let s = &text[start..i];
            out.push(Token {
                tok: Tok::Ident(s.to_string()),
                offset: start,
                text: s.to_string(),
            });
        } else if "+-*/^(),".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                offset: i,
                text: c.to_string(),
            });
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or(c);
            return Err(ParseError {
                kind: ParseErrorKind::Unexpected {
                    found: format!("character `{ch}`"),
                    expected: "expression",
                },
                offset: i,
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    alphabet: &'a Alphabet,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_sym(&self) -> Option<char> {
        match self.peek() {
            Some(Token { tok: Tok::Sym(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek_sym() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, offset: usize, expected: &'static str) -> ParseError {
        let found = match self.tokens.iter().find(|t| t.offset == offset) {
            Some(t) => format!("`{}`", t.text),
            None => "end of input".to_string(),
        };
        ParseError {
            kind: ParseErrorKind::Unexpected { found, expected },
            offset,
        }
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            let op = match self.peek_sym() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = Expr::raw_binary(op, acc, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let op = match self.peek_sym() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            acc = Expr::raw_binary(op, acc, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if !self.eat('-') {
            return self.power();
        }
        if let Some(Token { tok: Tok::Num(n), .. }) = self.peek() {
            let n = *n;
            let next_is_pow = matches!(
                self.tokens.get(self.pos + 1),
                Some(Token { tok: Tok::Sym('^'), .. })
            );
            if !next_is_pow {
                self.pos += 1;
                return Ok(Expr::number(n.neg()));
            }
        }
        let inner = self.unary()?;
        Ok(Expr::raw_unary(Func::Neg, inner))
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let exponent = self.unary()?;
            return Ok(Expr::raw_binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.here();
        let Some(token) = self.peek().cloned() else {
            return Err(self.unexpected(offset, "expression"));
        };
        match token.tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Expr::number(n))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.unexpected(self.here(), "`)`"));
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    if !self.eat(')') {
                        return Err(self.unexpected(self.here(), "`)` or `,`"));
                    }
                    let Some(f) = Func::from_name(&name) else {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnknownFunction(name),
                            offset,
                        });
                    };
                    if args.len() != 1 {
                        return Err(ParseError {
                            kind: ParseErrorKind::Arity {
                                function: name,
                                given: args.len(),
                            },
                            offset,
                        });
                    }
                    let arg = args.pop().expect("one argument");
                    return Ok(Expr::raw_unary(f, arg));
                }
                if !self.alphabet.contains(&name) {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        offset,
                    });
                }
                Ok(Expr::var(&name))
            }
            Tok::Sym(_) => Err(self.unexpected(offset, "expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    #[test]
    fn sum_of_product_and_power() {
        let e = parse("y*z + u^2").unwrap();
        let expected = Expr::raw_binary(
            BinOp::Add,
            Expr::raw_binary(BinOp::Mul, v("y"), v("z")),
            Expr::raw_binary(BinOp::Pow, v("u"), Expr::int(2)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn function_call() {
        let e = parse("sin(y*z)").unwrap();
        let expected = Expr::raw_unary(Func::Sin, Expr::raw_binary(BinOp::Mul, v("y"), v("z")));
        assert_eq!(e, expected);
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse("y +* z").unwrap_err();
        assert!(err.is_syntax());
        assert_eq!(err.offset, 3);
    }

    #[test]
    fn precedence_and_associativity() {
        let neg_pow = parse("-y^2").unwrap();
        assert_eq!(
            neg_pow,
            Expr::raw_unary(Func::Neg, Expr::raw_binary(BinOp::Pow, v("y"), Expr::int(2)))
        );
        assert_eq!(
            parse("-2^2").unwrap(),
            Expr::raw_unary(Func::Neg, Expr::raw_binary(BinOp::Pow, Expr::int(2), Expr::int(2)))
        );
        let right = parse("y^z^u").unwrap();
        assert_eq!(
            right,
            Expr::raw_binary(BinOp::Pow, v("y"), Expr::raw_binary(BinOp::Pow, v("z"), v("u")))
        );
        let left = parse("y-z-u").unwrap();
        assert_eq!(
            left,
            Expr::raw_binary(BinOp::Sub, Expr::raw_binary(BinOp::Sub, v("y"), v("z")), v("u"))
        );
        assert_eq!(
            parse("y^-2").unwrap(),
            Expr::raw_binary(BinOp::Pow, v("y"), Expr::int(-2))
        );
        assert_eq!(
            parse("-2*phi^3").unwrap(),
            Expr::raw_binary(
                BinOp::Mul,
                Expr::int(-2),
                Expr::raw_binary(BinOp::Pow, v("phi"), Expr::int(3))
            )
        );
    }

    #[test]
    fn literals() {
        assert_eq!(parse("0.5").unwrap(), Expr::float(0.5));
        assert_eq!(parse("1e-3").unwrap(), Expr::float(1e-3));
        assert_eq!(parse("2.5E+2").unwrap(), Expr::float(250.0));
        assert_eq!(parse("7").unwrap(), Expr::int(7));
    }

    #[test]
    fn identifier_errors() {
        let err = parse("y + w").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("w".into()));
        assert_eq!(err.offset, 4);
        let err = parse("tan(y)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("tan".into()));
        let err = parse("sin(y, z)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { given: 2, .. }));
        let ab = Alphabet::default().with("s").unwrap();
        assert!(parse_with("s*y", &ab).is_ok());
        assert!(Alphabet::default().with("exp").is_none());
        assert!(Alphabet::default().with("1a").is_none());
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["", "(", "y)", "y*", "sin y", "y $ z", "(y", "y,z", "2 3"] {
            assert!(parse(bad).is_err(), "{bad:?} should fail");
        }
        assert_eq!(parse("(y").unwrap_err().offset, 2);
    }
}
