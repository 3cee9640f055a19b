//! Arithmetic expressions over `r` for coefficient profiles.
//!
//! Grammar: `+ - * / ^` (also `×`, `−`), parentheses, unary minus, numbers,
//! the constants `pi` and `e`, named parameters, and the functions `exp`,
//! `log` (natural), `sqrt`, `sinh`, `cosh`, `tanh`, `sin`, `cos`, `abs` and
//! `pos` (positive part).
//! `^` is right-associative and binds tighter than unary minus.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ExprError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at column {}: {}", self.position + 1, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Sin,
    Cos,
    Abs,
    Pos,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "pos" => Func::Pos,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Abs => x.abs(),
            Func::Pos => x.max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    R,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression with parameters already substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    Open,
    Close,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let chars: Vec<(usize, char)> = src.chars().enumerate().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                // exponent part, only when followed by a digit or sign+digit
                if i < chars.len() && (chars[i].1 == 'e' || chars[i].1 == 'E') {
                    let next = chars.get(i + 1).map(|c| c.1);
                    let after = chars.get(i + 2).map(|c| c.1);
                    let digit = |c: Option<char>| c.is_some_and(|c| c.is_ascii_digit());
                    if digit(next) || (matches!(next, Some('+') | Some('-')) && digit(after)) {
                        i += 2;
                        while i < chars.len() && chars[i].1.is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().map(|c| c.1).collect();
                let value = text.parse::<f64>().map_err(|_| ExprError {
                    position: pos,
                    message: format!("malformed number '{text}'"),
                })?;
                out.push((pos, Token::Num(value)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push((pos, Token::Ident(chars[start..i].iter().map(|c| c.1).collect())));
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push((pos, Token::Op(c)));
                i += 1;
            }
            '×' => {
                out.push((pos, Token::Op('*')));
                i += 1;
            }
            '−' => {
                out.push((pos, Token::Op('-')));
                i += 1;
            }
            '(' => {
                out.push((pos, Token::Open));
                i += 1;
            }
            ')' => {
                out.push((pos, Token::Close));
                i += 1;
            }
            other => {
                return Err(ExprError {
                    position: pos,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    at: usize,
    params: &'a BTreeMap<String, f64>,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|t| &t.1)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |t| t.0)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError {
            position: self.position(),
            message: message.into(),
        })
    }

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.product()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.at += 1;
            let rhs = self.product()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.at += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.at += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.at += 1;
            let exponent = self.unary()?;
            return Ok(Node::Bin('^', Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let Some(token) = self.peek().cloned() else {
            return self.error("unexpected end of expression");
        };
        self.at += 1;
        match token {
            Token::Num(v) => Ok(Node::Num(v)),
            Token::Open => {
                let inner = self.sum()?;
                if self.peek() != Some(&Token::Close) {
                    return self.error("expected ')'");
                }
                self.at += 1;
                Ok(inner)
            }
            Token::Ident(name) => {
                if let Some(f) = Func::lookup(&name) {
                    if self.peek() != Some(&Token::Open) {
                        return self.error(format!("expected '(' after {name}"));
                    }
                    self.at += 1;
                    let arg = self.sum()?;
                    if self.peek() != Some(&Token::Close) {
                        return self.error("expected ')'");
                    }
                    self.at += 1;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "r" => Ok(Node::R),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => match self.params.get(&name) {
                        Some(v) => Ok(Node::Num(*v)),
                        None => {
                            self.at -= 1;
                            self.error(format!("unknown name '{name}'"))
                        }
                    },
                }
            }
            Token::Op(c) => {
                self.at -= 1;
                self.error(format!("unexpected operator '{c}'"))
            }
            Token::Close => {
                self.at -= 1;
                self.error("unexpected ')'")
            }
        }
    }
}

fn eval(node: &Node, r: f64) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::R => r,
        Node::Neg(x) => -eval(x, r),
        Node::Call(f, x) => f.apply(eval(x, r)),
        Node::Bin(op, x, y) => {
            let (x, y) = (eval(x, r), eval(y, r));
            match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                '/' => x / y,
                '^' => {
                    if y == y.trunc() && y.abs() <= 64.0 {
                        x.powi(y as i32)
                    } else {
                        x.powf(y)
                    }
                }
                _ => unreachable!("operator {op}"),
            }
        }
    }
}

impl Expr {
    /// Parses `source`, substituting named parameters from `params`.
    pub fn parse(source: &str, params: &BTreeMap<String, f64>) -> Result<Self, ExprError> {
        let tokens = tokenize(source)?;
        let mut p = Parser {
            tokens,
            at: 0,
            params,
            end: source.chars().count(),
        };
        let root = p.sum()?;
        if p.at < p.tokens.len() {
            return p.error("trailing input");
        }
        Ok(Self {
            root,
            source: source.to_string(),
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        eval(&self.root, r)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// The value when the expression does not involve `r`.
    pub fn as_constant(&self) -> Option<f64> {
        fn uses_r(n: &Node) -> bool {
            match n {
                Node::R => true,
                Node::Num(_) => false,
                Node::Neg(x) | Node::Call(_, x) => uses_r(x),
                Node::Bin(_, x, y) => uses_r(x) || uses_r(y),
            }
        }
        (!uses_r(&self.root)).then(|| eval(&self.root, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Expr {
        let mut params = BTreeMap::new();
        params.insert("k".to_string(), 1.0);
        params.insert("lambda".to_string(), 0.5);
        Expr::parse(s, &params).unwrap()
    }

    #[test]
    fn coefficient_family() {
        let e = parse("k/(1+r^2)");
        let got: Vec<f64> = [0.0, 1.0, 2.0].iter().map(|&r| e.eval(r)).collect();
        assert_eq!(got, vec![1.0, 0.5, 0.2]);
    }

    #[test]
    fn precedence_and_functions() {
        assert_eq!(parse("-2^2").eval(0.0), -4.0);
        assert_eq!(parse("2^3^2").eval(0.0), 512.0);
        assert_eq!(parse("2×3 − 1").eval(0.0), 5.0);
        assert_eq!(parse("1e-3*2").eval(0.0), 2e-3);
        assert!((parse("cosh(r)^2 - sinh(r)^2").eval(1.3) - 1.0).abs() < 1e-12);
        assert!((parse("log(exp(lambda))").eval(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(parse("2^-1").eval(0.0), 0.5);
        assert_eq!(parse("pos(1-r)^2").eval(3.0), 0.0);
        assert_eq!(parse("3").as_constant(), Some(3.0));
        assert_eq!(parse("r*e").as_constant(), None);
    }

    #[test]
    fn errors_carry_positions() {
        let params = BTreeMap::new();
        let err = Expr::parse("1 + q", &params).unwrap_err();
        assert_eq!(err.position, 4);
        assert!(err.message.contains("'q'"));
        assert!(Expr::parse("(1 + r", &params).is_err());
        assert!(Expr::parse("1 +", &params).is_err());
        assert!(Expr::parse("1 $ 2", &params).is_err());
        assert!(Expr::parse("sinh r", &params).is_err());
    }
}
