//! Recursive-descent parser for the expression grammar in the module docs.

use super::jet::const_value;
use super::{Expr, Func, ParseError, ScalarExpr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let offset = i;
        let tok = match c {
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' => {
                i += 1;
                Tok::Minus
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
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
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                Tok::Num(value)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(src[start..i].to_string())
            }
            other => {
                return Err(ParseError::Syntax {
                    offset,
                    message: format!("unexpected character `{other}`"),
                });
            }
        };
        toks.push(Token { tok, offset });
    }
    toks.push(Token {
        tok: Tok::Eof,
        offset: src.len(),
    });
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Tok::Minus) {
            self.bump();
            let inner = self.power()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Tok::Caret) {
            self.bump();
            let exponent = self.factor()?;
            return Ok(make_pow(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                if !matches!(self.peek(), Tok::RParen) {
                    return Err(ParseError::Syntax {
                        offset: self.offset(),
                        message: "expected `)`".to_string(),
                    });
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                if matches!(self.peek(), Tok::LParen) {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(if self.vars.iter().any(|v| v == &name) {
                            ParseError::Syntax {
                                offset,
                                message: format!("`{name}` is a coordinate, not a function"),
                            }
                        } else {
                            ParseError::UnknownIdentifier { offset, name }
                        });
                    };
                    self.bump();
                    let arg = self.expr()?;
                    if !matches!(self.peek(), Tok::RParen) {
                        return Err(ParseError::Syntax {
                            offset: self.offset(),
                            message: "expected `)`".to_string(),
                        });
                    }
                    self.bump();
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if name == "pi" {
                    Ok(Expr::Const(std::f64::consts::PI))
                } else if let Some(idx) = self.vars.iter().position(|v| v == &name) {
                    Ok(Expr::Var(idx))
                } else {
                    Err(ParseError::UnknownIdentifier { offset, name })
                }
            }
            tok => Err(ParseError::Syntax {
                offset,
                message: format!("expected a number, name or `(`, found {}", tok_name(&tok)),
            }),
        }
    }
}

fn tok_name(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".to_string(),
        Tok::Minus => "`-`".to_string(),
        Tok::Star => "`*`".to_string(),
        Tok::Slash => "`/`".to_string(),
        Tok::Caret => "`^`".to_string(),
        Tok::LParen => "`(`".to_string(),
        Tok::RParen => "`)`".to_string(),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Integer constant exponents become a `PowI` node (repeated
/// multiplication); everything else rewrites to `exp(e2 * log(e1))`.
fn make_pow(base: Expr, exponent: Expr) -> Expr {
    if let Some(c) = const_value(&exponent) {
        if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
            return Expr::PowI(Box::new(base), c as i32);
        }
    }
    Expr::Call(
        Func::Exp,
        Box::new(Expr::Mul(
            Box::new(exponent),
            Box::new(Expr::Call(Func::Log, Box::new(base))),
        )),
    )
}

/// Parses `src` into a [`ScalarExpr`] over the ordered coordinates `vars`.
pub fn parse<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<ScalarExpr, ParseError> {
    let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(ParseError::DuplicateVariable { name: v.clone() });
        }
    }
    let toks = lex(src)?;
    if toks.len() == 1 {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".to_string(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        vars: &vars,
    };
    let ast = p.expr()?;
    if !matches!(p.peek(), Tok::Eof) {
        return Err(ParseError::Syntax {
            offset: p.offset(),
            message: format!("unexpected {}", tok_name(p.peek())),
        });
    }
    Ok(ScalarExpr::from_parts(ast, vars))
}
