//! Enhancement factors `F_x(s)` written as arithmetic expressions in `s`.
//!
//! Grammar (usual precedence, `^` binds tighter than unary minus and is
//! right-associative):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 's' | func '(' expr (',' expr)* ')' | '(' expr ')'
//! func  := exp | log | sqrt | min | max
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Min,
    Max,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => s,
            Expr::Neg(e) => -e.eval(s),
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(s), b.eval(s));
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => x.powf(y),
                }
            }
            Expr::Call(f, args) => {
                let x = args[0].eval(s);
                match f {
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Min => x.min(args[1].eval(s)),
                    Func::Max => x.max(args[1].eval(s)),
                }
            }
        }
    }
}

/// Fully parenthesized binary operations; numbers use the shortest
/// representation that reads back to the same `f64`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if *v < 0.0 {
                    write!(f, "({v:?})")
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Var => write!(f, "s"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let o = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {o} {b})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
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
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let v: f64 = lit.parse().map_err(|_| Error::Syntax {
                position: start,
                found: format!("'{lit}'"),
                expected: vec!["number".into()],
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Syntax {
                position: i,
                found: format!("'{c}'"),
                expected: vec!["operand".into(), "operator".into()],
            });
        }
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const OPERAND: [&str; 5] = ["number", "s", "function", "'('", "'-'"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T> {
        let (position, tok) = &self.toks[self.pos];
        Err(Error::Syntax {
            position: *position,
            found: tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&[&format!("'{c}'")])
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Sym('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                if name == "s" {
                    self.pos += 1;
                    return Ok(Expr::Var);
                }
                let Some(func) = Func::from_name(&name) else {
                    return self.error(&OPERAND);
                };
                self.pos += 1;
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Sym(',') {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                if args.len() != func.arity() {
                    let expected = if args.len() < func.arity() { "','" } else { "')'" };
                    return self.error(&[expected]);
                }
                self.expect(')')?;
                Ok(Expr::Call(func, args))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.error(&OPERAND),
        }
    }
}

/// Parses an expression without the `F_x(0) = 1` check.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    if *p.peek() == Tok::End {
        return p.error(&OPERAND);
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error(&["operator", "end of input"]);
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhancementFactor {
    pub expr: Expr,
    pub source: String,
    pub provenance: String,
}

/// Largest `s` at which an accepted factor must still evaluate to a finite number.
pub const S_MAX: f64 = 1e6;

impl EnhancementFactor {
    pub fn eval(&self, s: f64) -> f64 {
        self.expr.eval(s)
    }

    /// Built-in factors: `lda` (`F_x ≡ 1`) and `pbe` (the PBE form with its
    /// conventional parameters κ = 0.804, μ = 0.21951).
    pub fn builtin(name: &str) -> Result<Self> {
        let (text, prov) = match name {
            "lda" => ("1", "local density approximation, F_x = 1"),
            "pbe" => (
                "1 + 0.804 - 0.804/(1 + 0.21951*s^2/0.804)",
                "PBE form, kappa = 0.804, mu = 0.21951 (conventional defaults)",
            ),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown built-in enhancement factor '{name}' (known: lda, pbe)"
                )))
            }
        };
        let mut f = parse_enhancement(text)?;
        f.provenance = prov.to_string();
        Ok(f)
    }
}

impl fmt::Display for EnhancementFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

/// Parses and validates an enhancement factor: `F_x(0) = 1` within `1e-12`
/// and finite values on a logarithmic sample of `[0, 10⁶]`.
pub fn parse_enhancement(text: &str) -> Result<EnhancementFactor> {
    let expr = parse_expr(text)?;
    let f0 = expr.eval(0.0);
    if !((f0 - 1.0).abs() <= 1e-12) {
        return Err(Error::Validation(format!("F_x(0) = {f0}, must equal 1")));
    }
    for k in 0..=240 {
        let s = if k == 0 { 0.0 } else { 10f64.powf(-6.0 + 12.0 * (k - 1) as f64 / 239.0) };
        let v = expr.eval(s.min(S_MAX));
        if !v.is_finite() {
            return Err(Error::Validation(format!("F_x({s:e}) = {v} is not finite")));
        }
    }
    Ok(EnhancementFactor {
        expr,
        source: text.to_string(),
        provenance: "user expression".to_string(),
    })
}
