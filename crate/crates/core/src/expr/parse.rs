//! Recursive-descent parser for coefficient expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-'? atom ('^' int)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp | sqrt
//! ```
//!
//! Identifiers must be declared coordinates. `int` may carry a leading `-`.

use num_rational::Rational64;

use super::{Expr, Number};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Number),
    Ident(String),
    Int(i64),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_int = true;
            if i < chars.len() && chars[i] == '.' {
                is_int = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if is_int {
                match text.parse::<i64>() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => Tok::Num(Number::Real(text.parse::<f64>().unwrap())),
                }
            } else {
                Tok::Num(decimal(&text))
            };
            out.push(Token { tok, line: l0, column: c0 });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, column: c0 });
            continue;
        }
        if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: l0, column: c0 });
            col += 1;
            i += 1;
            continue;
        }
        return Err(Error::Parse { line: l0, column: c0, message: format!("unexpected character '{c}'") });
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

/// Exact rational for short decimals, `f64` otherwise.
fn decimal(text: &str) -> Number {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if int.len() + frac.len() <= 17 && frac.len() <= 17 {
        let digits = format!("{int}{frac}");
        if let Ok(n) = digits.parse::<i64>() {
            return Number::Exact(Rational64::new(n, 10i64.pow(frac.len() as u32)));
        }
    }
    Number::Real(text.parse::<f64>().unwrap())
}

/// Parser bound to a list of coordinate names.
pub struct Parser<'a> {
    coords: &'a [String],
    toks: Vec<Token>,
    pos: usize,
}

/// Parses `src` with identifiers resolved against `coords`.
pub fn parse(src: &str, coords: &[String]) -> Result<Expr> {
    Parser::new(src, coords)?.parse_all()
}

impl<'a> Parser<'a> {
    pub fn new(src: &str, coords: &'a [String]) -> Result<Self> {
        Ok(Parser { coords, toks: lex(src)?, pos: 0 })
    }

    pub fn parse_all(&mut self) -> Result<Expr> {
        let e = self.expr()?;
        match self.peek().tok {
            Tok::End => Ok(e),
            _ => Err(self.error("unexpected trailing input")),
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> Error {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Num(n) => format!("number {n}"),
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        };
        Error::Parse { line: t.line, column: t.column, message: format!("{msg}, found {found}") }
    }

    fn at_error(&self, tok: &Token, msg: String) -> Error {
        Error::Parse { line: tok.line, column: tok.column, message: msg }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Sym('*') => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Sym('/') => {
                    let op = self.bump();
                    let rhs = self.factor()?;
                    acc = acc
                        .div(&rhs)
                        .map_err(|_| self.at_error(&op, "division by an expression that is identically zero".into()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let neg = if self.peek().tok == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let start = self.peek().clone();
        let mut a = self.atom()?;
        if self.peek().tok == Tok::Sym('^') {
            self.bump();
            let sign = if self.peek().tok == Tok::Sym('-') {
                self.bump();
                -1
            } else {
                1
            };
            let t = self.peek().clone();
            let Tok::Int(n) = t.tok else {
                return Err(self.error("expected integer exponent"));
            };
            self.bump();
            let n = i32::try_from(n).map_err(|_| self.at_error(&t, "exponent too large".into()))? * sign;
            a = a.powi(n).map_err(|e| self.at_error(&start, e.to_string()))?;
        }
        Ok(if neg { a.neg() } else { a })
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::constant(n))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::int(n))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(ref name) => {
                self.bump();
                if let Some(i) = self.coords.iter().position(|c| c == name) {
                    return Ok(Expr::var(i));
                }
                if ["sin", "cos", "exp", "sqrt"].contains(&name.as_str()) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return match name.as_str() {
                        "sin" => Ok(arg.sin()),
                        "cos" => Ok(arg.cos()),
                        "exp" => Ok(arg.exp()),
                        _ => arg.sqrt().map_err(|e| self.at_error(&t, e.to_string())),
                    };
                }
                Err(self.at_error(&t, format!("unknown identifier '{name}' (not a declared coordinate)")))
            }
            _ => Err(self.error("expected a number, coordinate, function or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords() -> Vec<String> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence_and_unary_minus() {
        let c = coords();
        let e = parse("-x^2 + 2*y/4 - (z)", &c).unwrap();
        let p = [3.0, 2.0, 1.0];
        assert_eq!(e.eval(&p), -9.0 + 1.0 - 1.0);
        assert_eq!(parse("x^-2", &c).unwrap().eval(&p), 1.0 / 9.0);
        assert_eq!(parse("0.25*x", &c).unwrap(), parse("x/4", &c).unwrap());
    }

    #[test]
    fn functions() {
        let c = coords();
        let e = parse("sin(x)*cos(y) + exp(z) - sqrt(x*x)", &c).unwrap();
        let p = [0.3, 0.2, 0.1];
        let v = 0.3f64.sin() * 0.2f64.cos() + 0.1f64.exp() - 0.3;
        assert!((e.eval(&p) - v).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_positions() {
        let c = coords();
        match parse("x +\n  w", &c) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        match parse("x ^ y", &c) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 5)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("sin x", &c), Err(Error::Parse { column: 5, .. })));
        assert!(matches!(parse("(x", &c), Err(Error::Parse { .. })));
        assert!(matches!(parse("x $ y", &c), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(parse("x/(y-y)", &c), Err(Error::Parse { column: 2, .. })));
    }

    #[test]
    fn display_round_trips() {
        let c = coords();
        for src in ["x*y - 3/4*z^2", "sin(x*y)/(x + y) + sqrt(z)", "exp(-z)*x^-3", "0.1*x + 2.5"] {
            let e = parse(src, &c).unwrap();
            let again = parse(&e.display(&c).to_string(), &c).unwrap();
            let p = [0.7f64, 1.3, 0.4];
            assert!((e.eval(&p) - again.eval(&p)).abs() < 1e-13, "{src}");
        }
    }
}
