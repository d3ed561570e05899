//! A small arithmetic expression language for problem data given as strings.
//!
//! Grammar: numeric literals, variables `x` and `t`, binary `+ - * / ^`,
//! unary minus, and the functions exp, ln, sin, cos, sqrt, abs, pow.
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! reads as `-(x^2)`. Implicit multiplication is rejected.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

/// Immutable expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdent { name: String, offset: usize },
    #[error("function `{name}` at offset {offset} takes {expected} argument(s), got {got}")]
    WrongArity {
        name: String,
        offset: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid numeric literal at offset {offset}")]
    BadNumber { offset: usize },
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivByZero,
    #[error("ln of non-positive value {0}")]
    LnNonPositive(f64),
    #[error("sqrt of negative value {0}")]
    SqrtNegative(f64),
    #[error("non-finite result in `{0}`")]
    NonFinite(&'static str),
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

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
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token and its starting byte offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                // optional exponent
                if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
                    let mark = self.pos;
                    self.pos += 1;
                    if self.pos < self.src.len()
                        && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                    {
                        self.pos += 1;
                    }
                    if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                    } else {
                        self.pos = mark; // bare `e` belongs to the next token
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: f64 = text
                    .parse()
                    .map_err(|_| ParseError::BadNumber { offset: start })?;
                return Ok((Tok::Num(v), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                return Ok((Tok::Ident(text.to_string()), start));
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: "a token".into(),
                    found: format!("`{}`", other as char),
                })
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }
}

// ---------------------------------------------------------------------------
// Pratt parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(Tok, usize)>,
}

// Binding powers: + - (1,2); * / (3,4); unary minus rbp 5; ^ (8,7) right-assoc.
fn infix_bp(tok: &Tok) -> Option<(u8, u8, BinOp)> {
    Some(match tok {
        Tok::Plus => (1, 2, BinOp::Add),
        Tok::Minus => (1, 2, BinOp::Sub),
        Tok::Star => (3, 4, BinOp::Mul),
        Tok::Slash => (3, 4, BinOp::Div),
        Tok::Caret => (8, 7, BinOp::Pow),
        _ => return None,
    })
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(src),
            peeked: None,
        }
    }

    fn peek(&mut self) -> Result<&(Tok, usize), ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn advance(&mut self) -> Result<(Tok, usize), ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let (tok, offset) = self.advance()?;
        if tok == want {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset,
                expected: what.into(),
                found: tok.describe(),
            })
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let (tok, offset) = self.advance()?;
        let mut lhs = match tok {
            Tok::Num(v) => Expr::Num(v),
            Tok::Ident(name) => self.ident(name, offset)?,
            Tok::Minus => Expr::Neg(Box::new(self.expr(5)?)),
            Tok::LParen => {
                let inner = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                inner
            }
            other => {
                return Err(ParseError::Syntax {
                    offset,
                    expected: "a number, variable, function call, `-` or `(`".into(),
                    found: other.describe(),
                })
            }
        };
        loop {
            let (tok, _) = self.peek()?.clone();
            let Some((lbp, rbp, op)) = infix_bp(&tok) else {
                break;
            };
            if lbp < min_bp {
                break;
            }
            self.advance()?;
            let rhs = self.expr(rbp)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn ident(&mut self, name: String, offset: usize) -> Result<Expr, ParseError> {
        if matches!(self.peek()?.0, Tok::LParen) {
            let func = Func::from_name(&name)
                .ok_or_else(|| ParseError::UnknownIdent {
                    name: name.clone(),
                    offset,
                })?;
            self.advance()?; // (
            let mut args = vec![self.expr(0)?];
            while matches!(self.peek()?.0, Tok::Comma) {
                self.advance()?;
                args.push(self.expr(0)?);
            }
            self.expect(Tok::RParen, "`)` or `,`")?;
            if args.len() != func.arity() {
                return Err(ParseError::WrongArity {
                    name,
                    offset,
                    expected: func.arity(),
                    got: args.len(),
                });
            }
            Ok(Expr::Call(func, args))
        } else {
            match name.as_str() {
                "x" => Ok(Expr::Var(Var::X)),
                "t" => Ok(Expr::Var(Var::T)),
                _ => Err(ParseError::UnknownIdent { name, offset }),
            }
        }
    }
}

/// Parse a source string into an expression tree.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(source);
    let e = p.expr(0)?;
    let (tok, offset) = p.advance()?;
    if tok != Tok::Eof {
        return Err(ParseError::Syntax {
            offset,
            expected: "end of input or an operator".into(),
            found: tok.describe(),
        });
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluate in round-to-nearest double precision; `^` is `powf`.
pub fn eval(e: &Expr, x: f64, t: f64) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Var(Var::X) => x,
        Expr::Var(Var::T) => t,
        Expr::Neg(inner) => -eval(inner, x, t)?,
        Expr::Bin(op, a, b) => {
            let a = eval(a, x, t)?;
            let b = eval(b, x, t)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(EvalError::DivByZero);
                    }
                    a / b
                }
                BinOp::Pow => {
                    let r = a.powf(b);
                    if !r.is_finite() && a.is_finite() && b.is_finite() {
                        return Err(EvalError::NonFinite("^"));
                    }
                    r
                }
            }
        }
        Expr::Call(func, args) => {
            let a0 = eval(&args[0], x, t)?;
            match func {
                Func::Exp => a0.exp(),
                Func::Ln => {
                    if a0 <= 0.0 {
                        return Err(EvalError::LnNonPositive(a0));
                    }
                    a0.ln()
                }
                Func::Sin => a0.sin(),
                Func::Cos => a0.cos(),
                Func::Sqrt => {
                    if a0 < 0.0 {
                        return Err(EvalError::SqrtNegative(a0));
                    }
                    a0.sqrt()
                }
                Func::Abs => a0.abs(),
                Func::Pow => {
                    let a1 = eval(&args[1], x, t)?;
                    let r = a0.powf(a1);
                    if !r.is_finite() && a0.is_finite() && a1.is_finite() {
                        return Err(EvalError::NonFinite("pow"));
                    }
                    r
                }
            }
        }
    };
    if !v.is_finite() {
        return Err(EvalError::NonFinite("expression"));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Unparsing (minimal parentheses)
// ---------------------------------------------------------------------------

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Bin(BinOp::Pow, ..) => 4,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, need_paren: bool) -> fmt::Result {
    if need_paren {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Neg(inner) => {
                write!(f, "-")?;
                write_child(f, inner, prec(inner) < 3)
            }
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                if *op == BinOp::Pow {
                    // right-associative
                    write_child(f, a, prec(a) <= p)?;
                    write!(f, "{sym}")?;
                    write_child(f, b, prec(b) < p)
                } else {
                    write_child(f, a, prec(a) < p)?;
                    write!(f, "{sym}")?;
                    write_child(f, b, prec(b) <= p)
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Render with minimal parentheses so that `parse(unparse(e)) == e`.
pub fn unparse(e: &Expr) -> String {
    e.to_string()
}
