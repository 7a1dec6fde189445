//! Smooth maps and the differential operators of flat semi-Euclidean space.
//!
//! A [`SmoothMap`] is an n-tuple of scalar expressions in n source
//! coordinates, read as a diffeomorphism candidate F of ℝⁿ_ν onto its
//! image. The operators here are all built on exact jet evaluation:
//!
//! * [`SmoothMap::jacobian`]: the matrix ∂y_j/∂x_i;
//! * [`laplacian`]: Δφ = Σ ε_i ∂²φ/∂x_i², the d'Alembertian when ν ≠ 0;
//! * [`eta_gradient`]: the η-raised gradient, so that
//!   η(∇φ, ∇φ) = Σ ε_i (∂φ/∂x_i)²;
//! * [`pullback_metric`]: Jᵀ G J, the pullback of the target metric.
//!
//! Two-dimensional Minkowski maps may be written in null coordinates
//! (u, v) = (x + t, x − t) instead of Cartesian (x, t); the [`Frame`]
//! records which. In the null frame the metric dx² − dt² becomes du·dv,
//! whose Gram matrix is off-diagonal. [`frame_gram`] supplies the right
//! one for each frame, and [`SmoothMap::to_cartesian`] /
//! [`SmoothMap::to_null_frame`] convert maps between frames by exact AST
//! substitution.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, ScalarExpr};
use crate::linalg::Matrix;
use crate::metric::Signature;

/// Coordinate frame a 2D map is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Coordinates of ℝⁿ_ν itself.
    Cartesian,
    /// Null coordinates u = x + t, v = x − t of ℝ²₁.
    Null,
}

/// Construction errors for [`SmoothMap`].
#[derive(Error, Debug, Clone, PartialEq)]
pub enum MapError {
    #[error("expected {expected} component expressions, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("component {index} is defined over different coordinates than component 0")]
    VariableMismatch { index: usize },
    #[error("components use {got} coordinates but the signature has dimension {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("the null frame requires signature (2, 1)")]
    NullFrameRequires2D,
}

/// An n-tuple of scalar expressions in n coordinates: a map
/// F(x₁, …, xₙ) = (y₁, …, yₙ) of ℝⁿ_ν into itself.
#[derive(Clone, Debug)]
pub struct SmoothMap {
    sig: Signature,
    frame: Frame,
    comps: Vec<ScalarExpr>,
}

/// Jacobian, per-component Laplacians and Hessians of a map at one point.
#[derive(Clone, Debug)]
pub struct PointJet {
    /// The evaluation point.
    pub point: Vec<f64>,
    /// The image F(point).
    pub image: Vec<f64>,
    /// Jacobian: row j holds the coordinate gradient of component j.
    pub jac: Matrix,
    /// Δy_j for each component j.
    pub laps: Vec<f64>,
    /// Full symmetric Hessian of each component.
    pub hessians: Vec<Matrix>,
}

impl SmoothMap {
    /// Builds a map, checking that the component count matches the
    /// signature dimension and all components share one coordinate list.
    pub fn new(sig: Signature, frame: Frame, comps: Vec<ScalarExpr>) -> Result<Self, MapError> {
        let n = sig.n();
        if comps.len() != n {
            return Err(MapError::ComponentCount {
                expected: n,
                got: comps.len(),
            });
        }
        let vars = comps[0].vars().to_vec();
        for (index, c) in comps.iter().enumerate().skip(1) {
            if c.vars() != vars {
                return Err(MapError::VariableMismatch { index });
            }
        }
        if vars.len() != n {
            return Err(MapError::ArityMismatch {
                expected: n,
                got: vars.len(),
            });
        }
        if frame == Frame::Null && (n != 2 || sig.nu() != 1) {
            return Err(MapError::NullFrameRequires2D);
        }
        Ok(SmoothMap { sig, frame, comps })
    }

    /// The identity map of ℝⁿ_ν in Cartesian coordinates.
    pub fn identity(sig: Signature) -> SmoothMap {
        let vars = default_vars(sig, Frame::Cartesian);
        let comps = (0..sig.n())
            .map(|i| ScalarExpr::coordinate(i, &vars))
            .collect();
        SmoothMap::new(sig, Frame::Cartesian, comps).expect("identity is well-formed")
    }

    /// The affine map x ↦ Mx + b in Cartesian coordinates.
    pub fn affine(sig: Signature, m: &Matrix, b: &[f64]) -> SmoothMap {
        let n = sig.n();
        assert_eq!(m.rows(), n);
        assert_eq!(m.cols(), n);
        assert_eq!(b.len(), n);
        let vars = default_vars(sig, Frame::Cartesian);
        let comps = (0..n)
            .map(|i| {
                let mut acc = ScalarExpr::constant(b[i], &vars);
                for j in 0..n {
                    let c = m[(i, j)];
                    if c != 0.0 {
                        acc =
                            acc + ScalarExpr::constant(c, &vars) * ScalarExpr::coordinate(j, &vars);
                    }
                }
                acc
            })
            .collect();
        SmoothMap::new(sig, Frame::Cartesian, comps).expect("affine map is well-formed")
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn comps(&self) -> &[ScalarExpr] {
        &self.comps
    }

    /// Source coordinate names.
    pub fn vars(&self) -> &[String] {
        self.comps[0].vars()
    }

    /// Evaluates F at `p`.
    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.comps.iter().map(|c| c.eval_value(p)).collect()
    }

    /// Jacobian matrix at `p`: entry (j, i) = ∂y_j/∂x_i, exact via jets.
    pub fn jacobian(&self, p: &[f64]) -> Result<Matrix, EvalError> {
        let n = self.sig.n();
        let mut jac = Matrix::zeros(n, n);
        for (j, comp) in self.comps.iter().enumerate() {
            let jet = comp.eval_jet(p)?;
            for i in 0..n {
                jac[(j, i)] = jet.grad[i];
            }
        }
        Ok(jac)
    }

    /// Value, Jacobian, Laplacians and Hessians at `p` in one pass.
    pub fn point_jet(&self, p: &[f64]) -> Result<PointJet, EvalError> {
        let n = self.sig.n();
        let mut jac = Matrix::zeros(n, n);
        let mut image = Vec::with_capacity(n);
        let mut laps = Vec::with_capacity(n);
        let mut hessians = Vec::with_capacity(n);
        for (j, comp) in self.comps.iter().enumerate() {
            let jet = comp.eval_jet(p)?;
            image.push(jet.value);
            for i in 0..n {
                jac[(j, i)] = jet.grad[i];
            }
            laps.push(
                self.sig
                    .epsilons()
                    .enumerate()
                    .map(|(i, eps)| eps * jet.hess[(i, i)])
                    .sum(),
            );
            hessians.push(jet.hess);
        }
        Ok(PointJet {
            point: p.to_vec(),
            image,
            jac,
            laps,
            hessians,
        })
    }

    /// Rewrites a null-frame map into Cartesian coordinates by exact
    /// substitution; Cartesian maps are returned unchanged.
    ///
    /// If F(u, v) = (U, V), the Cartesian companion is
    /// X = (U + V)/2 ∘ s, T = (U − V)/2 ∘ s with s(x, t) = (x + t, x − t).
    pub fn to_cartesian(&self) -> SmoothMap {
        if self.frame == Frame::Cartesian {
            return self.clone();
        }
        let cart_vars = ["x", "t"];
        let x = ScalarExpr::coordinate(0, &cart_vars);
        let t = ScalarExpr::coordinate(1, &cart_vars);
        let subs = [x.clone() + t.clone(), x - t];
        let big_u = self.comps[0].substitute(&subs);
        let big_v = self.comps[1].substitute(&subs);
        let half = ScalarExpr::constant(0.5, &cart_vars);
        let comps = vec![
            half.clone() * (big_u.clone() + big_v.clone()),
            half * (big_u - big_v),
        ];
        SmoothMap::new(self.sig, Frame::Cartesian, comps).expect("conversion preserves shape")
    }

    /// Rewrites a Cartesian ℝ²₁ map into null coordinates; null-frame maps
    /// are returned unchanged. Panics unless the signature is (2, 1).
    ///
    /// If F(x, t) = (X, T), the null companion is
    /// U = (X + T) ∘ c, V = (X − T) ∘ c with c(u, v) = ((u+v)/2, (u−v)/2).
    pub fn to_null_frame(&self) -> SmoothMap {
        if self.frame == Frame::Null {
            return self.clone();
        }
        assert!(
            self.sig.n() == 2 && self.sig.nu() == 1,
            "null frame requires signature (2, 1)"
        );
        let null_vars = ["u", "v"];
        let u = ScalarExpr::coordinate(0, &null_vars);
        let v = ScalarExpr::coordinate(1, &null_vars);
        let half = ScalarExpr::constant(0.5, &null_vars);
        let subs = [half.clone() * (u.clone() + v.clone()), half * (u - v)];
        let big_x = self.comps[0].substitute(&subs);
        let big_t = self.comps[1].substitute(&subs);
        let comps = vec![big_x.clone() + big_t.clone(), big_x - big_t];
        SmoothMap::new(self.sig, Frame::Null, comps).expect("conversion preserves shape")
    }
}

/// Composition φ∘F by AST substitution. `phi` must have one coordinate per
/// component of `f` (matched positionally).
pub fn compose(phi: &ScalarExpr, f: &SmoothMap) -> ScalarExpr {
    assert_eq!(
        phi.arity(),
        f.sig().n(),
        "composition needs one target coordinate per map component"
    );
    phi.substitute(f.comps())
}

/// The semi-Euclidean Laplacian Δφ = Σ ε_i ∂²φ/∂x_i² at `p`.
///
/// This is the constant-coefficient operator of the flat diagonal metric;
/// for ν = 1 it is the wave operator (d'Alembertian).
pub fn laplacian(sig: Signature, phi: &ScalarExpr, p: &[f64]) -> Result<f64, EvalError> {
    if phi.arity() != sig.n() {
        return Err(EvalError::DimensionMismatch {
            expected: sig.n(),
            got: phi.arity(),
        });
    }
    let jet = phi.eval_jet(p)?;
    Ok(sig
        .epsilons()
        .enumerate()
        .map(|(i, eps)| eps * jet.hess[(i, i)])
        .sum())
}

/// The η-raised gradient (ε_1 ∂φ/∂x_1, …, ε_n ∂φ/∂x_n) at `p`, so that
/// `eta_inner(∇φ, ∇φ) = Σ ε_i (∂φ/∂x_i)²`.
pub fn eta_gradient(sig: Signature, phi: &ScalarExpr, p: &[f64]) -> Result<Vec<f64>, EvalError> {
    if phi.arity() != sig.n() {
        return Err(EvalError::DimensionMismatch {
            expected: sig.n(),
            got: phi.arity(),
        });
    }
    let jet = phi.eval_jet(p)?;
    Ok(sig
        .epsilons()
        .zip(&jet.grad)
        .map(|(eps, g)| eps * g)
        .collect())
}

/// Gram matrix of the metric in the given frame: diag(ε) for Cartesian
/// coordinates, the off-diagonal ½ matrix of du·dv for the null frame.
pub fn frame_gram(sig: Signature, frame: Frame) -> Matrix {
    match frame {
        Frame::Cartesian => sig.eta_matrix(),
        Frame::Null => {
            let mut g = Matrix::zeros(2, 2);
            g[(0, 1)] = 0.5;
            g[(1, 0)] = 0.5;
            g
        }
    }
}

/// Pullback of the target metric through F at `p`: Jᵀ G J with G the Gram
/// matrix of F's frame.
pub fn pullback_metric(f: &SmoothMap, p: &[f64]) -> Result<Matrix, EvalError> {
    let j = f.jacobian(p)?;
    let g = frame_gram(f.sig(), f.frame());
    Ok(j.transpose().mul(&g).mul(&j))
}

/// Default coordinate names for a signature and frame: ("u", "v") in the
/// null frame, ("x", "t") for ℝ²₁, ("x", "y") for ℝ², ("x1", …, "xn")
/// otherwise.
pub fn default_vars(sig: Signature, frame: Frame) -> Vec<String> {
    match frame {
        Frame::Null => vec!["u".to_string(), "v".to_string()],
        Frame::Cartesian => {
            if sig.n() == 2 && sig.nu() == 1 {
                vec!["x".to_string(), "t".to_string()]
            } else if sig.n() == 2 {
                vec!["x".to_string(), "y".to_string()]
            } else {
                (1..=sig.n()).map(|i| format!("x{i}")).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn mink2() -> Signature {
        Signature::new(2, 1).unwrap()
    }

    fn map2(frame: Frame, sx: &str, st: &str) -> SmoothMap {
        let vars: Vec<String> = default_vars(mink2(), frame);
        SmoothMap::new(
            mink2(),
            frame,
            vec![parse(sx, &vars).unwrap(), parse(st, &vars).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn jacobian_of_null_change() {
        let f = map2(Frame::Cartesian, "x + t", "x - t");
        let j = f.jacobian(&[0.3, -0.7]).unwrap();
        assert_eq!(j.to_rows(), vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
    }

    #[test]
    fn jacobian_of_identity() {
        let f = SmoothMap::identity(mink2());
        let j = f.jacobian(&[2.0, 5.0]).unwrap();
        assert_eq!(j, Matrix::identity(2));
    }

    #[test]
    fn laplacian_examples() {
        let sig = mink2();
        let phi = parse("x^2 + t^2", &["x", "t"]).unwrap();
        assert_eq!(laplacian(sig, &phi, &[1.0, 2.0]).unwrap(), 0.0);
        let phi = parse("x*t", &["x", "t"]).unwrap();
        assert_eq!(laplacian(sig, &phi, &[1.0, 2.0]).unwrap(), 0.0);
        let sig_e = Signature::euclidean(2);
        let phi = parse("x^2 + t^2", &["x", "t"]).unwrap();
        assert_eq!(laplacian(sig_e, &phi, &[1.0, 2.0]).unwrap(), 4.0);
    }

    #[test]
    fn eta_gradient_examples() {
        let sig = mink2();
        let phi = parse("t", &["x", "t"]).unwrap();
        assert_eq!(
            eta_gradient(sig, &phi, &[0.0, 0.0]).unwrap(),
            vec![0.0, -1.0]
        );
        let phi = parse("x", &["x", "t"]).unwrap();
        assert_eq!(
            eta_gradient(sig, &phi, &[0.0, 0.0]).unwrap(),
            vec![1.0, 0.0]
        );
        // null gradient of x + t
        let phi = parse("x + t", &["x", "t"]).unwrap();
        let g = eta_gradient(sig, &phi, &[0.0, 0.0]).unwrap();
        let q = crate::metric::eta_inner(sig, &g, &g).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn pullback_of_identity_and_swap() {
        let sig = mink2();
        let id = SmoothMap::identity(sig);
        assert_eq!(pullback_metric(&id, &[0.1, 0.2]).unwrap(), sig.eta_matrix());
        let swap = map2(Frame::Cartesian, "t", "x");
        assert_eq!(
            pullback_metric(&swap, &[0.1, 0.2]).unwrap(),
            Matrix::diagonal(&[-1.0, 1.0])
        );
    }

    #[test]
    fn frame_conversions_agree_pointwise() {
        // F(u, v) = (u^3 + u, tanh(v)) in the null frame
        let f = map2(Frame::Null, "u^3 + u", "tanh(v)");
        let g = f.to_cartesian();
        assert_eq!(g.frame(), Frame::Cartesian);
        for &(x, t) in &[(0.2, -0.1), (0.5, 0.3), (-0.4, 0.2)] {
            let (u, v) = (x + t, x - t);
            let null_img = f.eval(&[u, v]).unwrap();
            let cart_img = g.eval(&[x, t]).unwrap();
            // from_null of the null image
            assert!((cart_img[0] - (null_img[0] + null_img[1]) / 2.0).abs() < 1e-15);
            assert!((cart_img[1] - (null_img[0] - null_img[1]) / 2.0).abs() < 1e-15);
        }
        let back = g.to_null_frame();
        for &(u, v) in &[(0.15, 0.35), (-0.2, 0.6)] {
            let a = f.eval(&[u, v]).unwrap();
            let b = back.eval(&[u, v]).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-14);
            assert!((a[1] - b[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn construction_errors() {
        let sig = mink2();
        let c = parse("x", &["x", "t"]).unwrap();
        assert!(matches!(
            SmoothMap::new(sig, Frame::Cartesian, vec![c.clone()]),
            Err(MapError::ComponentCount {
                expected: 2,
                got: 1
            })
        ));
        let other = parse("u", &["u", "v"]).unwrap();
        assert!(matches!(
            SmoothMap::new(sig, Frame::Cartesian, vec![c.clone(), other]),
            Err(MapError::VariableMismatch { index: 1 })
        ));
        let sig3 = Signature::new(3, 1).unwrap();
        let comps3: Vec<_> = (0..3)
            .map(|i| ScalarExpr::coordinate(i, &["a", "b", "c"]))
            .collect();
        assert!(matches!(
            SmoothMap::new(sig3, Frame::Null, comps3),
            Err(MapError::NullFrameRequires2D)
        ));
    }
}
