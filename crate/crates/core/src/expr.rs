//! Parser and forward-mode evaluator for scalar potential expressions.
//!
//! The grammar (documented in the README) covers the arithmetic operators
//! `+ - * /`, exponentiation by a constant integer, the functions
//! `sin cos sqrt abs exp`, parentheses, and the coordinates `x1..xN`
//! (aliases `x y z` when `N <= 3`). Precedence, tightest first:
//! `^`, unary `-`, `* /`, `+ -`.
//!
//! Gradients come from dual-number passes: [`eval_dual`] propagates a value
//! together with the directional derivative along a seed vector, so a full
//! gradient costs `N` evaluations. Non-differentiable points (`abs` at 0,
//! `sqrt` at 0 with a nonzero inner derivative) are reported as evaluation
//! errors naming the offending subexpression instead of being smoothed over.

use std::fmt;

use crate::error::Error;
use crate::Result;

/// Value and directional derivative carried through a forward-mode pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualValue {
    pub value: f64,
    pub derivative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    /// 0-based coordinate index.
    Var(usize),
    Unary(UnaryOp, Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    /// Exponentiation by a constant integer; general powers are excluded so
    /// evaluation stays total on negative bases.
    Pow(Box<Node>, i32),
}

/// A parsed expression together with its declared dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst {
    root: Node,
    dimension: usize,
}

impl ExprAst {
    pub fn dimension(&self) -> usize {
        self.dimension
    }
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
    Eof,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn next_token(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.bytes.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.bytes[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => return self.lex_number(start),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos;
                while end < self.bytes.len()
                    && (self.bytes[end].is_ascii_alphanumeric() || self.bytes[end] == b'_')
                {
                    end += 1;
                }
                let ident = std::str::from_utf8(&self.bytes[start..end])
                    .expect("ascii")
                    .to_string();
                self.pos = end;
                return Ok((Tok::Ident(ident), start));
            }
            other => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character {:?}", other as char),
                })
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }

    fn lex_number(&mut self, start: usize) -> Result<(Tok, usize)> {
        let mut end = self.pos;
        while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end < self.bytes.len() && self.bytes[end] == b'.' {
            end += 1;
            while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        if end < self.bytes.len() && (self.bytes[end] == b'e' || self.bytes[end] == b'E') {
            let mut probe = end + 1;
            if probe < self.bytes.len() && (self.bytes[probe] == b'+' || self.bytes[probe] == b'-')
            {
                probe += 1;
            }
            if probe < self.bytes.len() && self.bytes[probe].is_ascii_digit() {
                end = probe;
                while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..end]).expect("ascii");
        let value = text.parse::<f64>().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number literal {text:?}"),
        })?;
        self.pos = end;
        Ok((Tok::Num(value), start))
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<(Tok, usize)>,
    cursor: usize,
    dimension: usize,
}

/// Parses `text` as a scalar expression over `R^dimension`.
pub fn parse_expression(text: &str, dimension: usize) -> Result<ExprAst> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    if dimension == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        let (tok, off) = lexer.next_token()?;
        let done = tok == Tok::Eof;
        tokens.push((tok, off));
        if done {
            break;
        }
    }
    let mut parser = Parser {
        tokens,
        cursor: 0,
        dimension,
    };
    let root = parser.parse_expr()?;
    let (tok, off) = parser.peek();
    if *tok != Tok::Eof {
        return Err(Error::Syntax {
            offset: off,
            message: format!("unexpected trailing token {tok:?}"),
        });
    }
    Ok(ExprAst { root, dimension })
}

impl Parser {
    fn peek(&self) -> (&Tok, usize) {
        let (tok, off) = &self.tokens[self.cursor];
        (tok, *off)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let item = self.tokens[self.cursor].clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        item
    }

    fn parse_expr(&mut self) -> Result<Node> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Node::Binary(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Node::Binary(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Node> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    lhs = Node::Binary(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    lhs = Node::Binary(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Node> {
        if *self.peek().0 == Tok::Minus {
            self.bump();
            let inner = self.parse_factor()?;
            return Ok(Node::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Node> {
        let base = self.parse_atom()?;
        if *self.peek().0 == Tok::Caret {
            self.bump();
            let exponent = self.parse_int_exponent()?;
            return Ok(Node::Pow(Box::new(base), exponent));
        }
        Ok(base)
    }

    fn parse_int_exponent(&mut self) -> Result<i32> {
        let mut negative = false;
        if *self.peek().0 == Tok::Minus {
            self.bump();
            negative = true;
        }
        let (tok, off) = self.bump();
        match tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                let n = v as i32;
                Ok(if negative { -n } else { n })
            }
            Tok::Num(_) => Err(Error::Syntax {
                offset: off,
                message: "exponent must be a constant integer".into(),
            }),
            other => Err(Error::Syntax {
                offset: off,
                message: format!("expected integer exponent, found {other:?}"),
            }),
        }
    }

    fn parse_atom(&mut self) -> Result<Node> {
        let (tok, off) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Node::Const(v)),
            Tok::LParen => {
                let inner = self.parse_expr()?;
                let (tok, off) = self.bump();
                if tok != Tok::RParen {
                    return Err(Error::Syntax {
                        offset: off,
                        message: format!("expected ')', found {tok:?}"),
                    });
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(op) = function_by_name(&name) {
                    let (tok, off2) = self.bump();
                    if tok != Tok::LParen {
                        return Err(Error::Syntax {
                            offset: off2,
                            message: format!("expected '(' after function {name}"),
                        });
                    }
                    let arg = self.parse_expr()?;
                    let (tok, off2) = self.bump();
                    if tok != Tok::RParen {
                        return Err(Error::Syntax {
                            offset: off2,
                            message: format!("expected ')', found {tok:?}"),
                        });
                    }
                    return Ok(Node::Unary(op, Box::new(arg)));
                }
                self.resolve_variable(&name, off)
            }
            other => Err(Error::Syntax {
                offset: off,
                message: format!("expected a value, found {other:?}"),
            }),
        }
    }

    fn resolve_variable(&self, name: &str, off: usize) -> Result<Node> {
        let index = if self.dimension <= 3 {
            match name {
                "x" => Some(0),
                "y" => Some(1),
                "z" => Some(2),
                _ => None,
            }
        } else {
            None
        };
        let index = match index {
            Some(i) => i,
            None => {
                let digits = name.strip_prefix('x').ok_or_else(|| Error::Syntax {
                    offset: off,
                    message: format!("unknown identifier {name:?}"),
                })?;
                let one_based: usize = digits.parse().map_err(|_| Error::Syntax {
                    offset: off,
                    message: format!("unknown identifier {name:?}"),
                })?;
                if one_based == 0 {
                    return Err(Error::Syntax {
                        offset: off,
                        message: "coordinate names are 1-based (x1, x2, ...)".into(),
                    });
                }
                one_based - 1
            }
        };
        if index >= self.dimension {
            return Err(Error::Syntax {
                offset: off,
                message: format!(
                    "coordinate {name} exceeds the declared dimension {}",
                    self.dimension
                ),
            });
        }
        Ok(Node::Var(index))
    }
}

fn function_by_name(name: &str) -> Option<UnaryOp> {
    match name {
        "sin" => Some(UnaryOp::Sin),
        "cos" => Some(UnaryOp::Cos),
        "sqrt" => Some(UnaryOp::Sqrt),
        "abs" => Some(UnaryOp::Abs),
        "exp" => Some(UnaryOp::Exp),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Plain value evaluation.
pub fn eval(ast: &ExprAst, point: &[f64]) -> Result<f64> {
    if point.len() != ast.dimension {
        return Err(Error::DimensionMismatch {
            expected: ast.dimension,
            got: point.len(),
        });
    }
    eval_node(&ast.root, point)
}

fn eval_node(node: &Node, p: &[f64]) -> Result<f64> {
    Ok(match node {
        Node::Const(c) => *c,
        Node::Var(i) => p[*i],
        Node::Unary(op, a) => {
            let v = eval_node(a, p)?;
            match op {
                UnaryOp::Neg => -v,
                UnaryOp::Sin => v.sin(),
                UnaryOp::Cos => v.cos(),
                UnaryOp::Sqrt => {
                    if v < 0.0 {
                        return Err(Error::Eval(format!("sqrt of negative value {v}")));
                    }
                    v.sqrt()
                }
                UnaryOp::Abs => v.abs(),
                UnaryOp::Exp => v.exp(),
            }
        }
        Node::Binary(op, a, b) => {
            let va = eval_node(a, p)?;
            let vb = eval_node(b, p)?;
            match op {
                BinOp::Add => va + vb,
                BinOp::Sub => va - vb,
                BinOp::Mul => va * vb,
                BinOp::Div => {
                    if vb == 0.0 {
                        return Err(Error::Eval("division by zero".into()));
                    }
                    va / vb
                }
            }
        }
        Node::Pow(a, n) => {
            let va = eval_node(a, p)?;
            if va == 0.0 && *n < 0 {
                return Err(Error::Eval("zero raised to a negative power".into()));
            }
            va.powi(*n)
        }
    })
}

/// Forward-mode evaluation: returns the value and the directional derivative
/// `grad(expr) . seed`.
pub fn eval_dual(ast: &ExprAst, point: &[f64], seed: &[f64]) -> Result<DualValue> {
    if point.len() != ast.dimension || seed.len() != ast.dimension {
        return Err(Error::DimensionMismatch {
            expected: ast.dimension,
            got: point.len().max(seed.len()),
        });
    }
    eval_dual_node(&ast.root, point, seed)
}

fn eval_dual_node(node: &Node, p: &[f64], seed: &[f64]) -> Result<DualValue> {
    Ok(match node {
        Node::Const(c) => DualValue {
            value: *c,
            derivative: 0.0,
        },
        Node::Var(i) => DualValue {
            value: p[*i],
            derivative: seed[*i],
        },
        Node::Unary(op, a) => {
            let a = eval_dual_node(a, p, seed)?;
            match op {
                UnaryOp::Neg => DualValue {
                    value: -a.value,
                    derivative: -a.derivative,
                },
                UnaryOp::Sin => DualValue {
                    value: a.value.sin(),
                    derivative: a.value.cos() * a.derivative,
                },
                UnaryOp::Cos => DualValue {
                    value: a.value.cos(),
                    derivative: -a.value.sin() * a.derivative,
                },
                UnaryOp::Sqrt => {
                    if a.value < 0.0 {
                        return Err(Error::Eval(format!(
                            "sqrt of negative value {}",
                            a.value
                        )));
                    }
                    if a.value == 0.0 {
                        if a.derivative == 0.0 {
                            DualValue {
                                value: 0.0,
                                derivative: 0.0,
                            }
                        } else {
                            return Err(Error::Eval(
                                "sqrt is not differentiable at 0".into(),
                            ));
                        }
                    } else {
                        let s = a.value.sqrt();
                        DualValue {
                            value: s,
                            derivative: a.derivative / (2.0 * s),
                        }
                    }
                }
                UnaryOp::Abs => {
                    if a.value > 0.0 {
                        a
                    } else if a.value < 0.0 {
                        DualValue {
                            value: -a.value,
                            derivative: -a.derivative,
                        }
                    } else if a.derivative == 0.0 {
                        DualValue {
                            value: 0.0,
                            derivative: 0.0,
                        }
                    } else {
                        return Err(Error::Eval("abs is not differentiable at 0".into()));
                    }
                }
                UnaryOp::Exp => {
                    let e = a.value.exp();
                    DualValue {
                        value: e,
                        derivative: e * a.derivative,
                    }
                }
            }
        }
        Node::Binary(op, a, b) => {
            let a = eval_dual_node(a, p, seed)?;
            let b = eval_dual_node(b, p, seed)?;
            match op {
                BinOp::Add => DualValue {
                    value: a.value + b.value,
                    derivative: a.derivative + b.derivative,
                },
                BinOp::Sub => DualValue {
                    value: a.value - b.value,
                    derivative: a.derivative - b.derivative,
                },
                BinOp::Mul => DualValue {
                    value: a.value * b.value,
                    derivative: a.value * b.derivative + b.value * a.derivative,
                },
                BinOp::Div => {
                    if b.value == 0.0 {
                        return Err(Error::Eval("division by zero".into()));
                    }
                    DualValue {
                        value: a.value / b.value,
                        derivative: (a.derivative * b.value - a.value * b.derivative)
                            / (b.value * b.value),
                    }
                }
            }
        }
        Node::Pow(a, n) => {
            let a = eval_dual_node(a, p, seed)?;
            if *n == 0 {
                return Ok(DualValue {
                    value: 1.0,
                    derivative: 0.0,
                });
            }
            if a.value == 0.0 && *n < 0 {
                return Err(Error::Eval("zero raised to a negative power".into()));
            }
            DualValue {
                value: a.value.powi(*n),
                derivative: *n as f64 * a.value.powi(*n - 1) * a.derivative,
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Pretty-printing (round-trips through the parser)
// ---------------------------------------------------------------------------

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, 0)
    }
}

/// Precedence levels: 1 add/sub, 2 mul/div, 3 unary minus, 4 pow, 5 atom.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Node::Unary(UnaryOp::Neg, _) => 3,
        Node::Pow(..) => 4,
        Node::Const(c) if *c < 0.0 => 3,
        _ => 5,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, min_prec: u8) -> fmt::Result {
    let prec = precedence(node);
    let parens = prec < min_prec;
    if parens {
        write!(f, "(")?;
    }
    match node {
        Node::Const(c) => write!(f, "{c}")?,
        Node::Var(i) => write!(f, "x{}", i + 1)?,
        Node::Unary(UnaryOp::Neg, a) => {
            write!(f, "-")?;
            write_node(f, a, 3)?;
        }
        Node::Unary(op, a) => {
            let name = match op {
                UnaryOp::Sin => "sin",
                UnaryOp::Cos => "cos",
                UnaryOp::Sqrt => "sqrt",
                UnaryOp::Abs => "abs",
                UnaryOp::Exp => "exp",
                UnaryOp::Neg => unreachable!(),
            };
            write!(f, "{name}(")?;
            write_node(f, a, 0)?;
            write!(f, ")")?;
        }
        Node::Binary(op, a, b) => {
            // right operands at equal precedence get parens so the printed
            // form reparses to the identical (left-associated) tree
            let (sym, right_min) = match op {
                BinOp::Add => ("+", 2),
                BinOp::Sub => ("-", 2),
                BinOp::Mul => ("*", 3),
                BinOp::Div => ("/", 3),
            };
            write_node(f, a, prec)?;
            write!(f, "{sym}")?;
            write_node(f, b, right_min)?;
        }
        Node::Pow(a, n) => {
            write_node(f, a, 5)?;
            write!(f, "^{n}")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    const SIX_WELL_TEXT: &str =
        "x^2*(1-x^2)^2+(y^2-0.5*(1-x^2)^2)^2+(z^2-0.5*(1-x^2)^2)^2";

    #[test]
    fn quartic_parses_and_evaluates() {
        let ast = parse_expression("0.25*(1-x^2)^2", 1).unwrap();
        assert_eq!(eval(&ast, &[0.0]).unwrap(), 0.25);
        assert_eq!(eval(&ast, &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn six_well_text_matches_builtin() {
        let ast = parse_expression(SIX_WELL_TEXT, 3).unwrap();
        let pot = crate::potential::Potential::six_well();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let p: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let a = eval(&ast, &p).unwrap();
            let b = pot.eval_w(&p).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn dangling_caret_reports_offset() {
        match parse_expression("x^", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn square_dual() {
        let ast = parse_expression("x^2", 1).unwrap();
        let d = eval_dual(&ast, &[3.0], &[1.0]).unwrap();
        assert_eq!(d.value, 9.0);
        assert_eq!(d.derivative, 6.0);
    }

    #[test]
    fn six_well_dual_at_origin() {
        let ast = parse_expression(SIX_WELL_TEXT, 3).unwrap();
        let d = eval_dual(&ast, &[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((d.value - 0.5).abs() < 1e-15);
        assert_eq!(d.derivative, 0.0);
    }

    #[test]
    fn dual_gradient_matches_finite_differences() {
        let ast = parse_expression("sin(x*y)+exp(0.3*x)-y^3/(2+cos(x))", 2).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..100 {
            let p: Vec<f64> = (0..2).map(|_| rng.gen::<f64>() * 3.0 - 1.5).collect();
            for i in 0..2 {
                let mut seed = vec![0.0, 0.0];
                seed[i] = 1.0;
                let d = eval_dual(&ast, &p, &seed).unwrap().derivative;
                let h = 1e-6 * (1.0 + p[i].abs());
                let mut q = p.clone();
                q[i] = p[i] + h;
                let fp = eval(&ast, &q).unwrap();
                q[i] = p[i] - h;
                let fm = eval(&ast, &q).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (d - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                    "{d} vs {fd} at {p:?}"
                );
            }
        }
    }

    #[test]
    fn variable_index_out_of_range() {
        assert!(matches!(
            parse_expression("x3+1", 2),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_expression("z", 2),
            Err(Error::Syntax { .. })
        ));
        // x4 is fine when the dimension allows it
        assert!(parse_expression("x4", 4).is_ok());
    }

    #[test]
    fn unknown_identifier() {
        match parse_expression("foo(2)", 1) {
            Err(Error::Syntax { offset, message }) => {
                assert_eq!(offset, 0);
                assert!(message.contains("foo"));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn runtime_errors() {
        let ast = parse_expression("1/x", 1).unwrap();
        assert!(matches!(eval(&ast, &[0.0]), Err(Error::Eval(_))));
        let ast = parse_expression("sqrt(x)", 1).unwrap();
        assert!(matches!(eval(&ast, &[-1.0]), Err(Error::Eval(_))));
        let ast = parse_expression("x^-2", 1).unwrap();
        assert!(matches!(eval(&ast, &[0.0]), Err(Error::Eval(_))));
    }

    #[test]
    fn abs_at_zero_is_flagged_non_differentiable() {
        let ast = parse_expression("abs(x)", 1).unwrap();
        match eval_dual(&ast, &[0.0], &[1.0]) {
            Err(Error::Eval(msg)) => assert!(msg.contains("abs")),
            other => panic!("expected non-differentiable error, got {other:?}"),
        }
        // zero seed never requires the derivative
        let d = eval_dual(&ast, &[0.0], &[0.0]).unwrap();
        assert_eq!(d.derivative, 0.0);
    }

    #[test]
    fn fractional_exponent_is_rejected() {
        assert!(matches!(
            parse_expression("x^2.5", 1),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn precedence_pins_unary_minus_below_pow() {
        let ast = parse_expression("-x^2", 1).unwrap();
        assert_eq!(eval(&ast, &[3.0]).unwrap(), -9.0);
        let ast = parse_expression("(-x)^2", 1).unwrap();
        assert_eq!(eval(&ast, &[3.0]).unwrap(), 9.0);
    }

    #[test]
    fn manual_round_trips() {
        for text in [
            "0.25*(1-x^2)^2",
            SIX_WELL_TEXT,
            "-x^2+3*sin(y)/(1-exp(x))",
            "sqrt(abs(x-y))+x^-3",
            "1-2-3",
            "1-(2-3)",
            "2/3/4",
            "2/(3/4)",
        ] {
            let dim = 3;
            let ast = parse_expression(text, dim).unwrap();
            let printed = ast.to_string();
            let reparsed = parse_expression(&printed, dim).unwrap();
            assert_eq!(ast, reparsed, "{text} printed as {printed}");
        }
    }

    // strategy over expressions that evaluate without runtime errors
    fn safe_node() -> impl Strategy<Value = Node> {
        let leaf = prop_oneof![
            (0.1f64..10.0).prop_map(Node::Const),
            (0usize..3).prop_map(Node::Var),
        ];
        leaf.prop_recursive(4, 48, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::Binary(
                    BinOp::Add,
                    Box::new(a),
                    Box::new(b)
                )),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::Binary(
                    BinOp::Sub,
                    Box::new(a),
                    Box::new(b)
                )),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::Binary(
                    BinOp::Mul,
                    Box::new(a),
                    Box::new(b)
                )),
                inner.clone().prop_map(|a| Node::Unary(UnaryOp::Neg, Box::new(a))),
                inner.clone().prop_map(|a| Node::Unary(UnaryOp::Sin, Box::new(a))),
                inner.clone().prop_map(|a| Node::Unary(UnaryOp::Cos, Box::new(a))),
                (inner, 0i32..4).prop_map(|(a, n)| Node::Pow(Box::new(a), n)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(root in safe_node(), p in proptest::array::uniform3(-2.0f64..2.0)) {
            let ast = ExprAst { root, dimension: 3 };
            let printed = ast.to_string();
            let reparsed = parse_expression(&printed, 3).expect("printed form must reparse");
            prop_assert_eq!(&ast, &reparsed);
            let a = eval(&ast, &p).unwrap();
            let b = eval(&reparsed, &p).unwrap();
            prop_assert!((a - b).abs() <= 1e-15 * (1.0 + a.abs()));
        }

        #[test]
        fn zero_seed_gives_zero_derivative(root in safe_node(), p in proptest::array::uniform3(-2.0f64..2.0)) {
            let ast = ExprAst { root, dimension: 3 };
            let d = eval_dual(&ast, &p, &[0.0; 3]).unwrap();
            prop_assert_eq!(d.derivative, 0.0);
        }

        #[test]
        fn derivative_is_linear_in_seed(
            root in safe_node(),
            p in proptest::array::uniform3(-2.0f64..2.0),
            u in proptest::array::uniform3(-1.0f64..1.0),
            v in proptest::array::uniform3(-1.0f64..1.0),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let ast = ExprAst { root, dimension: 3 };
            let du = eval_dual(&ast, &p, &u).unwrap().derivative;
            let dv = eval_dual(&ast, &p, &v).unwrap().derivative;
            let mix: Vec<f64> = (0..3).map(|i| a * u[i] + b * v[i]).collect();
            let dm = eval_dual(&ast, &p, &mix).unwrap().derivative;
            let expected = a * du + b * dv;
            let scale = 1.0 + du.abs().max(dv.abs()).max(expected.abs());
            prop_assert!((dm - expected).abs() <= 1e-12 * scale);
        }
    }
}
