//! Second-order jet arithmetic.
//!
//! A [`Jet2`] carries a value, a gradient and a full Hessian with respect to
//! the `m` active coordinates. Arithmetic on jets is truncated Taylor
//! arithmetic at order two: the usual product, quotient and chain rules,
//! applied once per AST node. Hessians are filled symmetrically (upper
//! triangle computed, mirrored), so `hess` equals its transpose exactly.

use crate::linalg::Matrix;

use super::{node_to_string, DomainKind, EvalError, Expr};

/// Value, gradient and Hessian of a scalar function at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    /// Function value.
    pub value: f64,
    /// Gradient: `grad[i] = ∂f/∂x_i`.
    pub grad: Vec<f64>,
    /// Symmetric Hessian: `hess[(i, j)] = ∂²f/∂x_i∂x_j`.
    pub hess: Matrix,
}

impl Jet2 {
    /// Jet of the constant `c` in `m` coordinates.
    pub fn constant(c: f64, m: usize) -> Jet2 {
        Jet2 {
            value: c,
            grad: vec![0.0; m],
            hess: Matrix::zeros(m, m),
        }
    }

    /// Jet of the coordinate function `x_i` at value `x`.
    pub fn coordinate(x: f64, i: usize, m: usize) -> Jet2 {
        let mut grad = vec![0.0; m];
        grad[i] = 1.0;
        Jet2 {
            value: x,
            grad,
            hess: Matrix::zeros(m, m),
        }
    }

    fn m(&self) -> usize {
        self.grad.len()
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.to_rows().iter().flatten().all(|h| h.is_finite())
    }
}

fn add(a: &Jet2, b: &Jet2) -> Jet2 {
    let m = a.m();
    let mut out = Jet2::constant(a.value + b.value, m);
    for i in 0..m {
        out.grad[i] = a.grad[i] + b.grad[i];
    }
    for i in 0..m {
        for j in i..m {
            let h = a.hess[(i, j)] + b.hess[(i, j)];
            out.hess[(i, j)] = h;
            out.hess[(j, i)] = h;
        }
    }
    out
}

fn sub(a: &Jet2, b: &Jet2) -> Jet2 {
    let m = a.m();
    let mut out = Jet2::constant(a.value - b.value, m);
    for i in 0..m {
        out.grad[i] = a.grad[i] - b.grad[i];
    }
    for i in 0..m {
        for j in i..m {
            let h = a.hess[(i, j)] - b.hess[(i, j)];
            out.hess[(i, j)] = h;
            out.hess[(j, i)] = h;
        }
    }
    out
}

fn neg(a: &Jet2) -> Jet2 {
    let m = a.m();
    let mut out = Jet2::constant(-a.value, m);
    for i in 0..m {
        out.grad[i] = -a.grad[i];
    }
    for i in 0..m {
        for j in i..m {
            let h = -a.hess[(i, j)];
            out.hess[(i, j)] = h;
            out.hess[(j, i)] = h;
        }
    }
    out
}

fn mul(a: &Jet2, b: &Jet2) -> Jet2 {
    let m = a.m();
    let mut out = Jet2::constant(a.value * b.value, m);
    for i in 0..m {
        out.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
    }
    for i in 0..m {
        for j in i..m {
            let h = a.value * b.hess[(i, j)]
                + b.value * a.hess[(i, j)]
                + a.grad[i] * b.grad[j]
                + a.grad[j] * b.grad[i];
            out.hess[(i, j)] = h;
            out.hess[(j, i)] = h;
        }
    }
    out
}

/// Quotient rule at order two. The caller has already ruled out
/// `b.value == 0`.
fn div(a: &Jet2, b: &Jet2) -> Jet2 {
    let m = a.m();
    let q = a.value / b.value;
    let mut out = Jet2::constant(q, m);
    for i in 0..m {
        out.grad[i] = (a.grad[i] - q * b.grad[i]) / b.value;
    }
    for i in 0..m {
        for j in i..m {
            let h = (a.hess[(i, j)]
                - q * b.hess[(i, j)]
                - out.grad[i] * b.grad[j]
                - out.grad[j] * b.grad[i])
                / b.value;
            out.hess[(i, j)] = h;
            out.hess[(j, i)] = h;
        }
    }
    out
}

/// Chain rule for `f(u)` given `f(u.value)`, `f'(u.value)`, `f''(u.value)`.
fn chain(u: &Jet2, f0: f64, f1: f64, f2: f64) -> Jet2 {
    let m = u.m();
    let mut out = Jet2::constant(f0, m);
    for i in 0..m {
        out.grad[i] = f1 * u.grad[i];
    }
    for i in 0..m {
        for j in i..m {
            let h = f1 * u.hess[(i, j)] + f2 * u.grad[i] * u.grad[j];
            out.hess[(i, j)] = h;
            out.hess[(j, i)] = h;
        }
    }
    out
}

/// Integer power by binary exponentiation over jets; negative exponents go
/// through one reciprocal at the end.
fn powi(base: &Jet2, n: i32, node: &Expr, vars: &[String]) -> Result<Jet2, EvalError> {
    let m = base.m();
    if n == 0 {
        return Ok(Jet2::constant(1.0, m));
    }
    let mut e = n.unsigned_abs();
    let mut acc: Option<Jet2> = None;
    let mut sq = base.clone();
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => sq.clone(),
                Some(a) => mul(&a, &sq),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        sq = mul(&sq, &sq);
    }
    let acc = acc.expect("n != 0");
    if n < 0 {
        if acc.value == 0.0 {
            return Err(EvalError::Domain {
                expr: node_to_string(node, vars),
                kind: DomainKind::DivisionByZero,
            });
        }
        Ok(div(&Jet2::constant(1.0, m), &acc))
    } else {
        Ok(acc)
    }
}

fn value_powi(x: f64, n: i32) -> Result<f64, DomainKind> {
    if n == 0 {
        return Ok(1.0);
    }
    let mut e = n.unsigned_abs();
    let mut acc: Option<f64> = None;
    let mut sq = x;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => sq,
                Some(a) => a * sq,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        sq *= sq;
    }
    let acc = acc.expect("n != 0");
    if n < 0 {
        if acc == 0.0 {
            return Err(DomainKind::DivisionByZero);
        }
        Ok(1.0 / acc)
    } else {
        Ok(acc)
    }
}

pub(super) fn eval_jet_node(
    node: &Expr,
    point: &[f64],
    vars: &[String],
) -> Result<Jet2, EvalError> {
    let m = vars.len();
    match node {
        Expr::Const(c) => Ok(Jet2::constant(*c, m)),
        Expr::Var(i) => Ok(Jet2::coordinate(point[*i], *i, m)),
        Expr::Neg(a) => Ok(neg(&eval_jet_node(a, point, vars)?)),
        Expr::Add(a, b) => Ok(add(
            &eval_jet_node(a, point, vars)?,
            &eval_jet_node(b, point, vars)?,
        )),
        Expr::Sub(a, b) => Ok(sub(
            &eval_jet_node(a, point, vars)?,
            &eval_jet_node(b, point, vars)?,
        )),
        Expr::Mul(a, b) => Ok(mul(
            &eval_jet_node(a, point, vars)?,
            &eval_jet_node(b, point, vars)?,
        )),
        Expr::Div(a, b) => {
            let ja = eval_jet_node(a, point, vars)?;
            let jb = eval_jet_node(b, point, vars)?;
            if jb.value == 0.0 {
                return Err(EvalError::Domain {
                    expr: node_to_string(node, vars),
                    kind: DomainKind::DivisionByZero,
                });
            }
            Ok(div(&ja, &jb))
        }
        Expr::PowI(a, n) => {
            let ja = eval_jet_node(a, point, vars)?;
            powi(&ja, *n, node, vars)
        }
        Expr::Call(f, a) => {
            let ja = eval_jet_node(a, point, vars)?;
            let (f0, f1, f2) = f.derivatives(ja.value).map_err(|kind| EvalError::Domain {
                expr: node_to_string(node, vars),
                kind,
            })?;
            Ok(chain(&ja, f0, f1, f2))
        }
    }
}

pub(super) fn eval_value_node(
    node: &Expr,
    point: &[f64],
    vars: &[String],
) -> Result<f64, EvalError> {
    match node {
        Expr::Const(c) => Ok(*c),
        Expr::Var(i) => Ok(point[*i]),
        Expr::Neg(a) => Ok(-eval_value_node(a, point, vars)?),
        Expr::Add(a, b) => Ok(eval_value_node(a, point, vars)? + eval_value_node(b, point, vars)?),
        Expr::Sub(a, b) => Ok(eval_value_node(a, point, vars)? - eval_value_node(b, point, vars)?),
        Expr::Mul(a, b) => Ok(eval_value_node(a, point, vars)? * eval_value_node(b, point, vars)?),
        Expr::Div(a, b) => {
            let d = eval_value_node(b, point, vars)?;
            if d == 0.0 {
                return Err(EvalError::Domain {
                    expr: node_to_string(node, vars),
                    kind: DomainKind::DivisionByZero,
                });
            }
            Ok(eval_value_node(a, point, vars)? / d)
        }
        Expr::PowI(a, n) => {
            let x = eval_value_node(a, point, vars)?;
            value_powi(x, *n).map_err(|kind| EvalError::Domain {
                expr: node_to_string(node, vars),
                kind,
            })
        }
        Expr::Call(f, a) => {
            let x = eval_value_node(a, point, vars)?;
            f.eval(x).map_err(|kind| EvalError::Domain {
                expr: node_to_string(node, vars),
                kind,
            })
        }
    }
}

/// Constant folding for variable-free subtrees; `None` when a variable
/// occurs or the value is not a finite number.
pub(super) fn const_value(node: &Expr) -> Option<f64> {
    let v = match node {
        Expr::Const(c) => *c,
        Expr::Var(_) => return None,
        Expr::Neg(a) => -const_value(a)?,
        Expr::Add(a, b) => const_value(a)? + const_value(b)?,
        Expr::Sub(a, b) => const_value(a)? - const_value(b)?,
        Expr::Mul(a, b) => const_value(a)? * const_value(b)?,
        Expr::Div(a, b) => {
            let d = const_value(b)?;
            if d == 0.0 {
                return None;
            }
            const_value(a)? / d
        }
        Expr::PowI(a, n) => value_powi(const_value(a)?, *n).ok()?,
        Expr::Call(f, a) => f.eval(const_value(a)?).ok()?,
    };
    v.is_finite().then_some(v)
}
