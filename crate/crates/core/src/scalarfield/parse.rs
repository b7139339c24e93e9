//! Recursive-descent parser for scalar expressions in `x`, `y`, `z`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' UINT)?
//! primary := NUMBER | 'x' | 'y' | 'z' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
//! FUNC    := 'sin' | 'cos' | 'exp' | 'sqrt'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Abstract syntax tree of a scalar field over ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Const(f64),
    /// Ambient coordinate: 0 = x, 1 = y, 2 = z.
    Var(usize),
    Neg(Box<Expression>),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Div(Box<Expression>, Box<Expression>),
    Pow(Box<Expression>, u32),
    Call(Func, Box<Expression>),
}

impl Expression {
    pub fn parse(text: &str) -> Result<Expression> {
        if text.trim().is_empty() {
            return Err(Error::Syntax { offset: 0, message: "empty expression".into() });
        }
        let tokens = lex(text)?;
        let mut parser = Parser { tokens: &tokens, pos: 0, len: text.len() };
        let e = parser.expr()?;
        match parser.peek() {
            None => Ok(e),
            Some(t) => Err(Error::Syntax {
                offset: t.offset,
                message: format!("unexpected {}", t.kind.describe()),
            }),
        }
    }

    /// Sum of two expressions, for building perturbed functions programmatically.
    pub fn plus(self, other: Expression) -> Expression {
        Expression::Add(Box::new(self), Box::new(other))
    }

    pub fn scaled(self, c: f64) -> Expression {
        Expression::Mul(Box::new(Expression::Const(c)), Box::new(self))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        use Expression::*;
        match self {
            Const(_) | Var(_) => 1,
            Neg(a) | Pow(a, _) | Call(_, a) => 1 + a.size(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl std::str::FromStr for Expression {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Expression::parse(s)
    }
}

// Printing is fully parenthesised; `parse(e.to_string())` evaluates identically to `e`.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expression::*;
        match self {
            Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{:?})", -c)
            }
            Const(c) => write!(f, "{c:?}"),
            Var(i) => f.write_str(["x", "y", "z"][*i]),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, n) if matches!(**a, Pow(..)) => write!(f, "({a})^{n}"),
            Pow(a, n) => write!(f, "{a}^{n}"),
            Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Op(c) => format!("`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
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
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            out.push(Token { kind: TokenKind::Number(v), offset: start });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { kind: TokenKind::Ident(text[start..i].to_string()), offset: start });
        } else if "+-*/^()".contains(c) {
            out.push(Token { kind: TokenKind::Op(c), offset: i });
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(Error::Syntax { offset: i, message: format!("unexpected character `{ch}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokenKind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn end_offset(&self) -> usize {
        self.peek().map_or(self.len, |t| t.offset)
    }

    fn expect_op(&mut self, op: char) -> Result<()> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax { offset: self.end_offset(), message: format!("expected `{op}`") })
        }
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expression::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expression::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expression> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expression::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expression::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expression> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expression::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expression> {
        let base = self.primary()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek() {
            Some(Token { kind: TokenKind::Number(v), offset }) => {
                let (v, offset) = (*v, *offset);
                if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                    return Err(Error::Syntax {
                        offset,
                        message: "exponent must be a non-negative integer".into(),
                    });
                }
                self.pos += 1;
                Ok(Expression::Pow(Box::new(base), v as u32))
            }
            _ => Err(Error::Syntax {
                offset: self.end_offset(),
                message: "expected integer exponent".into(),
            }),
        }
    }

    fn primary(&mut self) -> Result<Expression> {
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax { offset: self.len, message: "unexpected end of input".into() });
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Number(v) => Ok(Expression::Const(v)),
            TokenKind::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            TokenKind::Ident(name) => match name.as_str() {
                "x" => Ok(Expression::Var(0)),
                "y" => Ok(Expression::Var(1)),
                "z" => Ok(Expression::Var(2)),
                "pi" => Ok(Expression::Const(std::f64::consts::PI)),
                _ => match Func::from_name(&name) {
                    Some(func) => {
                        self.expect_op('(')?;
                        let arg = self.expr()?;
                        self.expect_op(')')?;
                        Ok(Expression::Call(func, Box::new(arg)))
                    }
                    None => Err(Error::UnknownIdentifier { name, offset: tok.offset }),
                },
            },
            TokenKind::Op(_) => Err(Error::Syntax {
                offset: tok.offset,
                message: format!("unexpected {}", tok.kind.describe()),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = Expression::parse("-x^2").unwrap();
        assert!(matches!(e, Expression::Neg(ref a) if matches!(**a, Expression::Pow(_, 2))));
        let e = Expression::parse("1 + 2*3").unwrap();
        assert_eq!(e.eval_f64([0.0; 3]).unwrap(), 7.0);
        let e = Expression::parse("2*3^2").unwrap();
        assert_eq!(e.eval_f64([0.0; 3]).unwrap(), 18.0);
        let e = Expression::parse("8/2/2").unwrap();
        assert_eq!(e.eval_f64([0.0; 3]).unwrap(), 2.0);
        let e = Expression::parse("1-2-3").unwrap();
        assert_eq!(e.eval_f64([0.0; 3]).unwrap(), -4.0);
    }

    #[test]
    fn three_term_structure() {
        let e = Expression::parse("x^2 + sin(y)*z").unwrap();
        match &e {
            Expression::Add(a, b) => {
                assert!(matches!(**a, Expression::Pow(_, 2)));
                assert!(matches!(**b, Expression::Mul(_, _)));
            }
            other => panic!("unexpected tree {other:?}"),
        }
        assert_eq!(e.eval_f64([0.0, 0.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn unbalanced_paren_reports_end_offset() {
        let err = Expression::parse("x*(y").unwrap_err();
        assert_eq!(err, Error::Syntax { offset: 4, message: "expected `)`".into() });
    }

    #[test]
    fn linear_tilt() {
        let e = Expression::parse("z + 0.1*x").unwrap();
        assert!((e.eval_f64([1.0, 0.0, 2.0]).unwrap() - 2.1).abs() < 1e-15);
    }

    #[test]
    fn unknown_identifier() {
        let err = Expression::parse("x + w").unwrap_err();
        assert_eq!(err, Error::UnknownIdentifier { name: "w".into(), offset: 4 });
        let err = Expression::parse("tan(x)").unwrap_err();
        assert!(matches!(err, Error::UnknownIdentifier { offset: 0, .. }));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(Expression::parse(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(Expression::parse("x^-1"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(Expression::parse("x^1.5"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(Expression::parse("x y"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(Expression::parse("x $ y"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(Expression::parse("sin x"), Err(Error::Syntax { offset: 4, .. })));
    }

    #[test]
    fn numbers_with_exponents() {
        let e = Expression::parse("1e-3 + 2.5E2").unwrap();
        assert!((e.eval_f64([0.0; 3]).unwrap() - 250.001).abs() < 1e-12);
    }

    #[test]
    fn display_reparses() {
        let src = "(sqrt(x^2 + z^2) - 2)^2 + y^2 - 1";
        let e = Expression::parse(src).unwrap();
        let back = Expression::parse(&e.to_string()).unwrap();
        assert_eq!(e, back);
        let neg = Expression::Const(-0.25).plus(Expression::Var(0));
        let back = Expression::parse(&neg.to_string()).unwrap();
        assert_eq!(back.eval_f64([1.0, 0.0, 0.0]).unwrap(), 0.75);
    }
}
