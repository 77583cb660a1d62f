//! Arithmetic expressions for multiplier symbols.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'pi' | 'i' | 'xi'k | 'abs(' expr ')' | 'exp(' expr ')'
//!        | 'bracket(xi)' | '(' expr ')'
//! ```
//!
//! `xi1 .. xin` are the frequency coordinates and `bracket(xi)` is the
//! anisotropic bracket of the whole frequency vector.

use num_complex::Complex64;
use std::fmt;

use crate::anisotropy::{self, AnisotropyVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Coord(usize),
    Bracket,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Exp(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut k = i + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    i = k;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{text}` at {start}")))?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` at {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(usize::MAX, |(o, _)| *o)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        match self.tokens.get(self.pos) {
            Some((o, t)) => Err(Error::Parse(format!("{msg} at {o} (found {t:?})"))),
            None => Err(Error::Parse(format!("{msg} at end of input"))),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(&format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
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

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn call(&mut self) -> Result<Expr> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(')')?;
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(Complex64::new(v, 0.0)))
            }
            Some(Token::Op('(')) => self.call(),
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "pi" => Ok(Expr::Const(Complex64::new(std::f64::consts::PI, 0.0))),
                    "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                    "abs" => Ok(Expr::Abs(Box::new(self.call()?))),
                    "exp" => Ok(Expr::Exp(Box::new(self.call()?))),
                    "bracket" => {
                        self.expect('(')?;
                        match self.peek() {
                            Some(Token::Ident(s)) if s == "xi" => self.pos += 1,
                            _ => return self.err("bracket takes the whole vector `xi`"),
                        }
                        self.expect(')')?;
                        Ok(Expr::Bracket)
                    }
                    s if s.starts_with("xi") => {
                        let k: usize = s[2..]
                            .parse()
                            .map_err(|_| Error::Parse(format!("unknown coordinate `{s}` at {at}")))?;
                        if k == 0 || k > self.dim {
                            return Err(Error::Parse(format!(
                                "`{s}` at {at} is outside dimension {}",
                                self.dim
                            )));
                        }
                        Ok(Expr::Coord(k - 1))
                    }
                    other => Err(Error::Parse(format!("unknown name `{other}` at {at}"))),
                }
            }
            _ => self.err("expected a value"),
        }
    }
}

/// Parses `src` for symbols on `R^dim`.
pub fn parse(src: &str, dim: usize) -> Result<Expr> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        dim,
    };
    if p.tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn pow(b: Complex64, e: Complex64) -> Complex64 {
    if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 64.0 {
        if b.im == 0.0 {
            return Complex64::new(b.re.powi(e.re as i32), 0.0);
        }
        return b.powi(e.re as i32);
    }
    if e.im == 0.0 && b.im == 0.0 && b.re >= 0.0 {
        return Complex64::new(b.re.powf(e.re), 0.0);
    }
    b.powc(e)
}

impl Expr {
    /// Value at `xi`; `a` supplies the bracket geometry.
    pub fn eval(&self, xi: &[f64], a: &AnisotropyVector) -> Complex64 {
        use Expr::*;
        match self {
            Const(c) => *c,
            Coord(k) => Complex64::new(xi[*k], 0.0),
            Bracket => Complex64::new(anisotropy::bracket(xi, a), 0.0),
            Neg(e) => -e.eval(xi, a),
            Add(l, r) => l.eval(xi, a) + r.eval(xi, a),
            Sub(l, r) => l.eval(xi, a) - r.eval(xi, a),
            Mul(l, r) => l.eval(xi, a) * r.eval(xi, a),
            Div(l, r) => l.eval(xi, a) / r.eval(xi, a),
            Pow(l, r) => pow(l.eval(xi, a), r.eval(xi, a)),
            Abs(e) => Complex64::new(e.eval(xi, a).norm(), 0.0),
            Exp(e) => e.eval(xi, a).exp(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Const(c) => write!(f, "({}+{}*i)", c.re, c.im),
            Coord(k) => write!(f, "xi{}", k + 1),
            Bracket => write!(f, "bracket(xi)"),
            Neg(e) => write!(f, "(-{e})"),
            Add(l, r) => write!(f, "({l}+{r})"),
            Sub(l, r) => write!(f, "({l}-{r})"),
            Mul(l, r) => write!(f, "({l}*{r})"),
            Div(l, r) => write!(f, "({l}/{r})"),
            Pow(l, r) => write!(f, "({l}^{r})"),
            Abs(e) => write!(f, "abs({e})"),
            Exp(e) => write!(f, "exp({e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, xi: &[f64]) -> Complex64 {
        parse(src, xi.len()).unwrap().eval(xi, &AnisotropyVector::isotropic(xi.len()))
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1+2*3", &[0.0]).re, 7.0);
        assert_eq!(ev("2^3^2", &[0.0]).re, 512.0);
        assert_eq!(ev("-2^2", &[0.0]).re, -4.0);
        assert_eq!(ev("(1+2)*3", &[0.0]).re, 9.0);
        assert_eq!(ev("8/2/2", &[0.0]).re, 2.0);
        assert_eq!(ev("1e-3*1E3", &[0.0]).re, 1.0);
    }

    #[test]
    fn coordinates_and_functions() {
        assert_eq!(ev("xi1*xi2 - abs(xi1)", &[-2.0, 3.0]).re, -8.0);
        let v = ev("bracket(xi)^2", &[3.0, 4.0]);
        assert!((v.re - 26.0).abs() < 1e-12);
        let w = ev("exp(i*pi)", &[0.0]);
        assert!((w.re + 1.0).abs() < 1e-15 && w.im.abs() < 1e-15);
        assert!(!ev("1/xi1", &[0.0]).re.is_finite());
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "1+", "xi3", "xi0", "foo(1)", "bracket(xi1)", "(1", "1 2", "3 $ 4", "xi"] {
            assert!(matches!(parse(bad, 2), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn display_roundtrip() {
        let e = parse("-xi1^2 + 3*exp(i*xi2)/bracket(xi)", 2).unwrap();
        let again = parse(&e.to_string(), 2).unwrap();
        let a = AnisotropyVector::isotropic(2);
        let x = [0.3, -1.7];
        assert_eq!(e.eval(&x, &a), again.eval(&x, &a));
    }
}
