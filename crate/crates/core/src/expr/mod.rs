//! Scalar expressions over named coordinates, with exact derivatives.
//!
//! [`ScalarExpr`] is a parsed expression tree over a fixed, ordered list of
//! coordinate names. Evaluation comes in two flavours:
//!
//! * [`ScalarExpr::eval_value`]: plain `f64` evaluation;
//! * [`ScalarExpr::eval_jet`]: second-order jet evaluation, which
//!   propagates value, gradient and full Hessian through the tree in one
//!   pass. Derivatives are exact up to floating-point rounding; there is no
//!   truncation error of the finite-difference kind.
//!
//! Expressions are immutable after construction and evaluation is pure, so
//! everything here can be shared freely across threads.
//!
//! The grammar accepted by [`parse`] is the usual one:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := ("-")? power
//! power  := atom ("^" factor)?
//! atom   := number | name | name "(" expr ")" | "(" expr ")"
//! ```
//!
//! with left-associative binary operators, `^` binding tighter than unary
//! minus, the constant `pi`, and the functions `sin`, `cos`, `tan`, `atan`,
//! `tanh`, `sinh`, `cosh`, `exp`, `log`, `sqrt`, `abs`.

mod jet;
mod parser;

use std::fmt;
use std::ops;

use thiserror::Error;

pub use jet::Jet2;
pub use parser::parse;

/// Built-in single-argument functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Tanh,
    Sinh,
    Cosh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" => Func::Atan,
            "tanh" => Func::Tanh,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub(crate) fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Tanh => "tanh",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    /// Value with domain checks; used by plain evaluation and constant folding.
    pub(crate) fn eval(self, x: f64) -> Result<f64, DomainKind> {
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => {
                if x.cos() == 0.0 {
                    return Err(DomainKind::TanPole(x));
                }
                x.tan()
            }
            Func::Atan => x.atan(),
            Func::Tanh => x.tanh(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(DomainKind::LogNonPositive(x));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(DomainKind::SqrtNegative(x));
                }
                x.sqrt()
            }
            Func::Abs => x.abs(),
        })
    }

    /// `(f(x), f'(x), f''(x))` with domain checks for jet propagation.
    pub(crate) fn derivatives(self, x: f64) -> Result<(f64, f64, f64), DomainKind> {
        Ok(match self {
            Func::Sin => (x.sin(), x.cos(), -x.sin()),
            Func::Cos => (x.cos(), -x.sin(), -x.cos()),
            Func::Tan => {
                if x.cos() == 0.0 {
                    return Err(DomainKind::TanPole(x));
                }
                let t = x.tan();
                let s = 1.0 + t * t;
                (t, s, 2.0 * t * s)
            }
            Func::Atan => {
                let d = 1.0 + x * x;
                (x.atan(), 1.0 / d, -2.0 * x / (d * d))
            }
            Func::Tanh => {
                let t = x.tanh();
                let s = 1.0 - t * t;
                (t, s, -2.0 * t * s)
            }
            Func::Sinh => (x.sinh(), x.cosh(), x.sinh()),
            Func::Cosh => (x.cosh(), x.sinh(), x.cosh()),
            Func::Exp => {
                let e = x.exp();
                (e, e, e)
            }
            Func::Log => {
                if x <= 0.0 {
                    return Err(DomainKind::LogNonPositive(x));
                }
                (x.ln(), 1.0 / x, -1.0 / (x * x))
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(DomainKind::SqrtNegative(x));
                }
                if x == 0.0 {
                    return Err(DomainKind::SqrtDerivativeAtZero);
                }
                let s = x.sqrt();
                (s, 0.5 / s, -0.25 / (s * x))
            }
            Func::Abs => {
                if x == 0.0 {
                    return Err(DomainKind::AbsDerivativeAtZero);
                }
                (x.abs(), x.signum(), 0.0)
            }
        })
    }
}

/// Expression tree. Integer powers are kept as a dedicated node so they
/// evaluate by repeated multiplication; every other exponent is rewritten
/// to `exp(e2 * log(e1))` at parse time.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowI(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// What went wrong while evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    DivisionByZero,
    LogNonPositive(f64),
    SqrtNegative(f64),
    SqrtDerivativeAtZero,
    TanPole(f64),
    AbsDerivativeAtZero,
    NonFinite,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::DivisionByZero => write!(f, "division by zero"),
            DomainKind::LogNonPositive(x) => write!(f, "log of non-positive value {x}"),
            DomainKind::SqrtNegative(x) => write!(f, "sqrt of negative value {x}"),
            DomainKind::SqrtDerivativeAtZero => {
                write!(f, "sqrt has an unbounded derivative at 0")
            }
            DomainKind::TanPole(x) => write!(f, "tan evaluated at pole {x}"),
            DomainKind::AbsDerivativeAtZero => {
                write!(f, "abs is not differentiable at 0")
            }
            DomainKind::NonFinite => write!(f, "evaluation produced a non-finite value"),
        }
    }
}

/// Evaluation errors. `Domain` carries the printed form of the offending
/// subexpression.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum EvalError {
    #[error("dimension mismatch: expression has {expected} coordinates, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("domain error in `{expr}`: {kind}")]
    Domain { expr: String, kind: DomainKind },
}

/// Parse errors with byte offsets into the source text.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("duplicate coordinate name `{name}`")]
    DuplicateVariable { name: String },
}

/// A smooth real-valued expression in a fixed ordered list of coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarExpr {
    ast: Expr,
    vars: Vec<String>,
}

impl ScalarExpr {
    pub(crate) fn from_parts(ast: Expr, vars: Vec<String>) -> ScalarExpr {
        ScalarExpr { ast, vars }
    }

    /// The constant expression `value` over the given coordinates.
    pub fn constant<S: AsRef<str>>(value: f64, vars: &[S]) -> ScalarExpr {
        ScalarExpr {
            ast: Expr::Const(value),
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    /// The coordinate function `vars[index]`.
    pub fn coordinate<S: AsRef<str>>(index: usize, vars: &[S]) -> ScalarExpr {
        assert!(index < vars.len(), "coordinate index out of range");
        ScalarExpr {
            ast: Expr::Var(index),
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    /// Applies a built-in function to this expression.
    pub fn apply(self, func: Func) -> ScalarExpr {
        ScalarExpr {
            ast: Expr::Call(func, Box::new(self.ast)),
            vars: self.vars,
        }
    }

    /// Integer power, evaluated by repeated multiplication.
    pub fn powi(self, n: i32) -> ScalarExpr {
        ScalarExpr {
            ast: Expr::PowI(Box::new(self.ast), n),
            vars: self.vars,
        }
    }

    /// The ordered coordinate names this expression is defined over.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of coordinates.
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// Plain value evaluation.
    pub fn eval_value(&self, point: &[f64]) -> Result<f64, EvalError> {
        self.check_point(point)?;
        let v = jet::eval_value_node(&self.ast, point, &self.vars)?;
        if !v.is_finite() {
            return Err(EvalError::Domain {
                expr: self.to_string(),
                kind: DomainKind::NonFinite,
            });
        }
        Ok(v)
    }

    /// Second-order jet evaluation: value, gradient and Hessian at `point`,
    /// exact to floating-point rounding.
    pub fn eval_jet(&self, point: &[f64]) -> Result<Jet2, EvalError> {
        self.check_point(point)?;
        let jet = jet::eval_jet_node(&self.ast, point, &self.vars)?;
        if !jet.is_finite() {
            return Err(EvalError::Domain {
                expr: self.to_string(),
                kind: DomainKind::NonFinite,
            });
        }
        Ok(jet)
    }

    /// Substitutes every coordinate of `self` by the corresponding
    /// expression in `replacements`, producing an expression over the
    /// replacements' (shared) coordinate list.
    ///
    /// This is exact composition at the AST level; derivatives of the
    /// result are computed through the substituted tree, so no chain-rule
    /// truncation is involved anywhere.
    ///
    /// Panics if `replacements.len() != self.arity()` or if the
    /// replacements do not all share one coordinate list.
    pub fn substitute(&self, replacements: &[ScalarExpr]) -> ScalarExpr {
        assert_eq!(
            replacements.len(),
            self.vars.len(),
            "substitution needs one replacement per coordinate"
        );
        let vars = replacements
            .first()
            .map(|r| r.vars.clone())
            .unwrap_or_default();
        for r in replacements {
            assert_eq!(
                r.vars, vars,
                "replacement expressions must share one coordinate list"
            );
        }
        ScalarExpr {
            ast: subst_node(&self.ast, replacements),
            vars,
        }
    }
}

fn subst_node(e: &Expr, reps: &[ScalarExpr]) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(*c),
        Expr::Var(i) => reps[*i].ast.clone(),
        Expr::Neg(a) => Expr::Neg(Box::new(subst_node(a, reps))),
        Expr::Add(a, b) => Expr::Add(Box::new(subst_node(a, reps)), Box::new(subst_node(b, reps))),
        Expr::Sub(a, b) => Expr::Sub(Box::new(subst_node(a, reps)), Box::new(subst_node(b, reps))),
        Expr::Mul(a, b) => Expr::Mul(Box::new(subst_node(a, reps)), Box::new(subst_node(b, reps))),
        Expr::Div(a, b) => Expr::Div(Box::new(subst_node(a, reps)), Box::new(subst_node(b, reps))),
        Expr::PowI(a, n) => Expr::PowI(Box::new(subst_node(a, reps)), *n),
        Expr::Call(f, a) => Expr::Call(*f, Box::new(subst_node(a, reps))),
    }
}

// Operator overloads panic on mismatched coordinate lists; mixing frames is
// a programming error, not a runtime condition.
fn join_vars(a: &ScalarExpr, b: &ScalarExpr) {
    assert_eq!(
        a.vars, b.vars,
        "operands must be defined over the same coordinates"
    );
}

impl ops::Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        join_vars(&self, &rhs);
        ScalarExpr {
            ast: Expr::Add(Box::new(self.ast), Box::new(rhs.ast)),
            vars: self.vars,
        }
    }
}

impl ops::Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        join_vars(&self, &rhs);
        ScalarExpr {
            ast: Expr::Sub(Box::new(self.ast), Box::new(rhs.ast)),
            vars: self.vars,
        }
    }
}

impl ops::Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        join_vars(&self, &rhs);
        ScalarExpr {
            ast: Expr::Mul(Box::new(self.ast), Box::new(rhs.ast)),
            vars: self.vars,
        }
    }
}

impl ops::Div for ScalarExpr {
    type Output = ScalarExpr;
    fn div(self, rhs: ScalarExpr) -> ScalarExpr {
        join_vars(&self, &rhs);
        ScalarExpr {
            ast: Expr::Div(Box::new(self.ast), Box::new(rhs.ast)),
            vars: self.vars,
        }
    }
}

impl ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            ast: Expr::Neg(Box::new(self.ast)),
            vars: self.vars,
        }
    }
}

impl ScalarExpr {
    fn check_point(&self, point: &[f64]) -> Result<(), EvalError> {
        if point.len() != self.vars.len() {
            return Err(EvalError::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        Ok(())
    }
}

// Printing. Parenthesization follows precedence so that parse(print(e))
// evaluates identically to e.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn node_prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::Neg(_) => PREC_NEG,
        Expr::Const(c) if *c < 0.0 => PREC_NEG,
        Expr::PowI(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn fmt_node(e: &Expr, vars: &[String], min_prec: u8, out: &mut String) {
    let prec = node_prec(e);
    let need_paren = prec < min_prec;
    if need_paren {
        out.push('(');
    }
    match e {
        Expr::Const(c) => out.push_str(&format!("{c}")),
        Expr::Var(i) => out.push_str(&vars[*i]),
        Expr::Neg(a) => {
            out.push('-');
            fmt_node(a, vars, PREC_NEG, out);
        }
        Expr::Add(a, b) => {
            fmt_node(a, vars, PREC_ADD, out);
            out.push_str(" + ");
            fmt_node(b, vars, PREC_ADD + 1, out);
        }
        Expr::Sub(a, b) => {
            fmt_node(a, vars, PREC_ADD, out);
            out.push_str(" - ");
            fmt_node(b, vars, PREC_ADD + 1, out);
        }
        Expr::Mul(a, b) => {
            fmt_node(a, vars, PREC_MUL, out);
            out.push('*');
            fmt_node(b, vars, PREC_MUL + 1, out);
        }
        Expr::Div(a, b) => {
            fmt_node(a, vars, PREC_MUL, out);
            out.push('/');
            fmt_node(b, vars, PREC_MUL + 1, out);
        }
        Expr::PowI(a, n) => {
            fmt_node(a, vars, PREC_ATOM, out);
            out.push('^');
            out.push_str(&format!("{n}"));
        }
        Expr::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            fmt_node(a, vars, 0, out);
            out.push(')');
        }
    }
    if need_paren {
        out.push(')');
    }
}

pub(crate) fn node_to_string(e: &Expr, vars: &[String]) -> String {
    let mut s = String::new();
    fmt_node(e, vars, 0, &mut s);
    s
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&node_to_string(&self.ast, &self.vars))
    }
}
