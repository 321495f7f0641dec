//! Small arithmetic expression language for user-defined coefficient
//! functions: variables u1..u9, x, t; operators + - * / ^; functions sin,
//! cos, exp, tanh, abs.

use nalgebra::DVector;

use crate::error::{PpssError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Component index into the state vector (0-based).
    State(usize),
    X,
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Abs,
}

impl Expr {
    pub fn eval(&self, u: &DVector<f64>, x: f64, t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::State(i) => u[*i],
            Expr::X => x,
            Expr::T => t,
            Expr::Neg(e) => -e.eval(u, x, t),
            Expr::Add(a, b) => a.eval(u, x, t) + b.eval(u, x, t),
            Expr::Sub(a, b) => a.eval(u, x, t) - b.eval(u, x, t),
            Expr::Mul(a, b) => a.eval(u, x, t) * b.eval(u, x, t),
            Expr::Div(a, b) => a.eval(u, x, t) / b.eval(u, x, t),
            Expr::Pow(a, b) => a.eval(u, x, t).powf(b.eval(u, x, t)),
            Expr::Call(f, e) => {
                let v = e.eval(u, x, t);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Tanh => v.tanh(),
                    Func::Abs => v.abs(),
                }
            }
        }
    }
}

/// Parse an expression over u1..u_dim, x, t.
pub fn parse(src: &str, dim: usize) -> Result<Expr> {
    let mut p = Parser { chars: src.chars().collect(), pos: 0, dim };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(PpssError::Expr(format!("unexpected input at position {} in `{src}`", p.pos)));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(PpssError::Expr(format!("expected `{c}` at position {}", self.pos)))
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
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            // Right associative; the exponent may itself be negated.
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            other => Err(PpssError::Expr(format!(
                "unexpected {:?} at position {}",
                other, self.pos
            ))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        // Scientific notation: 1e-3, 2.5E+4.
        if self.peek().is_some_and(|c| c == 'e' || c == 'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.peek().is_some_and(|c| c == '+' || c == '-') {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| PpssError::Expr(format!("bad number `{text}`")))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        match name.as_str() {
            "x" => Ok(Expr::X),
            "t" => Ok(Expr::T),
            "sin" | "cos" | "exp" | "tanh" | "abs" => {
                let f = match name.as_str() {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "tanh" => Func::Tanh,
                    _ => Func::Abs,
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Call(f, Box::new(arg)))
            }
            _ if name.starts_with('u') => {
                let idx: usize = name[1..]
                    .parse()
                    .map_err(|_| PpssError::Expr(format!("unknown identifier `{name}`")))?;
                if idx == 0 || idx > self.dim {
                    return Err(PpssError::Expr(format!(
                        "state index u{idx} out of range 1..={}",
                        self.dim
                    )));
                }
                Ok(Expr::State(idx - 1))
            }
            _ => Err(PpssError::Expr(format!("unknown identifier `{name}`"))),
        }
    }
}
