use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    R,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    /// Nonnegative literal (negation is always an explicit [`ExprKind::Neg`]).
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Expression tree node with the byte offset it was parsed from.
///
/// Equality compares structure only.
#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, pos: 0 }
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        let v = match &self.kind {
            ExprKind::Num(v) => *v,
            ExprKind::Var(Var::X) => p[0],
            ExprKind::Var(Var::Y) => p[1],
            ExprKind::Var(Var::R) => math::hypot(p[0], p[1]),
            ExprKind::Var(Var::Theta) => math::atan2(p[1], p[0]),
            ExprKind::Neg(e) => -e.eval(p)?,
            ExprKind::Bin(op, a, b) => {
                let (a, b) = (a.eval(p)?, b.eval(p)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(self.error("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => math::pow(a, b),
                }
            }
            ExprKind::Call(f, args) => {
                let a = args[0].eval(p)?;
                match f {
                    Func::Sin => math::sin(a),
                    Func::Cos => math::cos(a),
                    Func::Exp => math::exp(a),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(self.error("sqrt of a negative number"));
                        }
                        math::sqrt(a)
                    }
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(p)?),
                    Func::Max => a.max(args[1].eval(p)?),
                }
            }
        };
        if !v.is_finite() {
            return Err(self.error("non-finite result"));
        }
        Ok(v)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Evaluation { pos: self.pos, msg: msg.to_string() }
    }

    /// Whether the tree contains no variables.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            ExprKind::Num(_) => true,
            ExprKind::Var(_) => false,
            ExprKind::Neg(e) => e.is_constant(),
            ExprKind::Bin(_, a, b) => a.is_constant() && b.is_constant(),
            ExprKind::Call(_, args) => args.iter().all(Expr::is_constant),
        }
    }
}

/// Fully parenthesised form that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(v) => write!(f, "{v}"),
            ExprKind::Var(v) => f.write_str(match v {
                Var::X => "x",
                Var::Y => "y",
                Var::R => "r",
                Var::Theta => "theta",
            }),
            ExprKind::Neg(e) => write!(f, "(-{e})"),
            ExprKind::Bin(op, a, b) => {
                let o = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {o} {b})")
            }
            ExprKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
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
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| Error::Syntax { pos: start, msg: format!("malformed number `{text}`") })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let t = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(Error::Syntax { pos: start, msg: format!("unexpected character `{ch}`") });
                }
            };
            i += c.len_utf8();
            out.push((t, start));
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(Error::Syntax { pos: self.pos(), msg: format!("expected {what}") })
        }
    }

    fn additive(&mut self) -> Result<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr { kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), pos };
        }
    }

    fn multiplicative(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            let rhs = self.unary()?;
            lhs = Expr { kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), pos };
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            let (_, pos) = self.bump();
            let e = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(e)), pos });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            let (_, pos) = self.bump();
            // right associative; the exponent may carry its own sign
            let exp = self.unary()?;
            return Ok(Expr { kind: ExprKind::Bin(BinOp::Pow, Box::new(base), Box::new(exp)), pos });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr { kind: ExprKind::Num(v), pos }),
            Tok::LParen => {
                let e = self.additive()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let var = match name.as_str() {
                    "x" => Some(ExprKind::Var(Var::X)),
                    "y" => Some(ExprKind::Var(Var::Y)),
                    "r" => Some(ExprKind::Var(Var::R)),
                    "theta" => Some(ExprKind::Var(Var::Theta)),
                    "pi" => Some(ExprKind::Num(math::PI)),
                    "e" => Some(ExprKind::Num(core::f64::consts::E)),
                    _ => None,
                };
                if let Some(kind) = var {
                    return Ok(Expr { kind, pos });
                }
                let func = Func::from_name(&name).ok_or(Error::UnknownIdentifier { pos, name: name.clone() })?;
                self.expect(Tok::LParen, "`(` after function name")?;
                let mut args = Vec::new();
                loop {
                    args.push(self.additive()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                if args.len() != func.arity() {
                    return Err(Error::Syntax {
                        pos,
                        msg: format!("`{name}` takes {} argument(s), got {}", func.arity(), args.len()),
                    });
                }
                Ok(Expr { kind: ExprKind::Call(func, args), pos })
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            t => Err(Error::Syntax { pos, msg: format!("unexpected token {t:?}") }),
        }
    }
}

/// Parses an expression over `x`, `y`, `r`, `theta`.
pub fn parse_expr(src: &str) -> Result<Expr> {
    if src.trim().is_empty() {
        return Err(Error::Syntax { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.additive()?;
    if *p.peek() != Tok::End {
        return Err(Error::Syntax { pos: p.pos(), msg: "trailing input".into() });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn ev(s: &str, p: Point) -> f64 {
        parse_expr(s).unwrap().eval(p).unwrap()
    }

    #[test]
    fn constants_and_polynomials() {
        assert_eq!(ev("-0.5", [7.0, 1.0]), -0.5);
        assert_eq!(ev("x^2+y^2", [3.0, 4.0]), 25.0);
        assert!((ev("min(0, r-1.5)", [1.2, 0.0]) + 0.3).abs() < 1e-15);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2^3^2", [0.0, 0.0]), 512.0);
        assert_eq!(ev("-2^2", [0.0, 0.0]), -4.0);
        assert_eq!(ev("2^-1", [0.0, 0.0]), 0.5);
        assert_eq!(ev("8-3-2", [0.0, 0.0]), 3.0);
        assert_eq!(ev("8/4/2", [0.0, 0.0]), 1.0);
        assert_eq!(ev("1+2*3", [0.0, 0.0]), 7.0);
        assert_eq!(ev("-x*y", [2.0, 3.0]), -6.0);
        assert_eq!(ev("1.5e2 + 2E-1", [0.0, 0.0]), 150.2);
    }

    #[test]
    fn polar_aliases() {
        assert!((ev("theta", [0.0, 2.0]) - math::PI / 2.0).abs() < 1e-15);
        assert_eq!(ev("r", [3.0, 4.0]), 5.0);
        assert!((ev("cos(theta - pi/5)", [1.0, 0.0]) - math::cos(math::PI / 5.0)).abs() < 1e-15);
    }

    #[test]
    fn located_errors() {
        assert!(matches!(parse_expr("1 + foo"), Err(Error::UnknownIdentifier { pos: 4, .. })));
        assert!(matches!(parse_expr("1 + (2"), Err(Error::Syntax { pos: 6, .. })));
        assert!(matches!(parse_expr("1 $ 2"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("min(1)"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_expr("  "), Err(Error::Syntax { .. })));
        let e = parse_expr("1 + 1/(x-1)").unwrap();
        assert!(matches!(e.eval([1.0, 0.0]), Err(Error::Evaluation { pos: 5, .. })));
        let e = parse_expr("sqrt(x)").unwrap();
        assert!(matches!(e.eval([-1.0, 0.0]), Err(Error::Evaluation { pos: 0, .. })));
    }

    #[test]
    fn pretty_print_round_trip() {
        for s in ["1 - 2*max(0, cos(theta - pi/5))", "-x^2^y", "exp(-r^2)/(1+abs(y))", "2^-1 - -3"] {
            let e = parse_expr(s).unwrap();
            let back = parse_expr(&e.to_string()).unwrap();
            assert_eq!(e, back, "{s}");
        }
    }
}
