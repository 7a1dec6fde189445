//! Conformality verdicts.
//!
//! A diffeomorphism F of ℝⁿ_ν is conformal at a point when the pullback of
//! the metric is a positive multiple of the metric itself: Jᵀ η J = λ η
//! with λ > 0. This module decides that in two independent ways:
//!
//! * [`conformality_at`]: the direct Jacobian test, pointwise;
//! * [`probe_suite`]: the harmonic-probe test: Δ(φ∘F) must vanish for a
//!   finite family of target-coordinate functions φ with Δ′φ = 0 (all y_j,
//!   all y_j·y_k, and signature-dependent sums/differences of squares),
//!   together with the gradient side condition
//!   η(∇y₁, ∇y₁) > η(∇yₙ, ∇yₙ) when the metric is indefinite.
//!
//! The two routes are equivalent for n = 2 and agree on whole-space affine
//! maps in higher dimension; [`check_equivalence`] runs both and reports
//! agreement. The side condition is not redundant: the coordinate swap
//! (x, t) ↦ (t, x) of ℝ²₁ passes every probe yet reverses the sign of the
//! metric (Jᵀ η J = −η). Such signature-reversing maps are reported with
//! `anti_signature = true` rather than folded silently into "not
//! conformal".
//!
//! For whole-space conformal maps in dimension ≥ 3 the only possibilities
//! are affine, y = αAx + b with A η-orthogonal; [`liouville_fit`] recovers
//! (α, A, b) from samples and [`scaling_check`] verifies the induced
//! scaling identity Δ(φ∘F) = α²·(Δ′φ)∘F. In the Euclidean plane,
//! [`classify_cr`] decides holomorphic versus anti-holomorphic via the
//! Cauchy–Riemann relations.

use serde::Serialize;

use crate::diffops::{compose, frame_gram, laplacian, Frame, SmoothMap};
use crate::expr::{EvalError, ScalarExpr};
use crate::linalg::Matrix;
use crate::metric::Signature;
use thiserror::Error;

/// Default numerical tolerance for conformality residuals. Jets are exact
/// to rounding, so this is generous.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Floor guarding the λ ≈ 0 degeneracy.
const LAMBDA_FLOOR: f64 = 1e-300;

/// Relative determinant threshold below which a Jacobian counts as singular.
const SINGULAR_REL: f64 = 1e-12;

/// A point (and optionally a matrix) where a check failed.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub detail: String,
}

/// Outcome of the pointwise Jacobian test.
#[derive(Clone, Debug, Serialize)]
pub struct ConformalVerdict {
    /// Jᵀ η J = λ η with λ > 0, within tolerance.
    pub conformal: bool,
    /// The conformal factor λ (meaningful when `conformal` or
    /// `anti_signature` holds).
    pub factor: f64,
    /// Max-norm deviation of Jᵀ η J from λ η, normalized by |λ|.
    pub residual: f64,
    /// The test passed with λ < 0: a signature-reversing map.
    pub anti_signature: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Decides conformality of F at `p` from the Jacobian.
///
/// With G = Jᵀ η J (η taken in F's frame), the factor estimate is the
/// Frobenius projection λ = ⟨G, η⟩ / ⟨η, η⟩, which for the diagonal metric
/// is the ε-weighted mean (Σ ε_i G_ii)/n. The verdict requires
/// max|G − λη| ≤ tol·max(|λ|, floor) with λ > 0. A near-singular Jacobian
/// (|det J| ≤ 1e−12·‖J‖ⁿ) or a vanishing factor fails with a witness.
pub fn conformality_at(f: &SmoothMap, p: &[f64], tol: f64) -> Result<ConformalVerdict, EvalError> {
    let jac = f.jacobian(p)?;
    let g = frame_gram(f.sig(), f.frame());
    let gram = jac.transpose().mul(&g).mul(&jac);
    let lam = gram.frobenius_inner(&g) / g.frobenius_inner(&g);
    let deviation = gram.sub(&g.scale(lam)).max_abs();
    let denom = lam.abs().max(LAMBDA_FLOOR);
    let residual = deviation / denom;

    let witness = |detail: String| {
        Some(Witness {
            point: p.to_vec(),
            matrix: Some(gram.to_rows()),
            detail,
        })
    };

    let det = jac.det();
    let det_scale = jac.max_abs().powi(f.sig().n() as i32);
    if det.abs() <= SINGULAR_REL * det_scale {
        return Ok(ConformalVerdict {
            conformal: false,
            factor: lam,
            residual,
            anti_signature: false,
            witness: witness(format!("singular Jacobian: |det J| = {:e}", det.abs())),
        });
    }
    if lam.abs() <= LAMBDA_FLOOR {
        return Ok(ConformalVerdict {
            conformal: false,
            factor: lam,
            residual,
            anti_signature: false,
            witness: witness("degenerate conformal factor λ ≈ 0".to_string()),
        });
    }

    let within = deviation <= tol * denom;
    let conformal = within && lam > 0.0;
    let anti_signature = within && lam < 0.0;
    Ok(ConformalVerdict {
        conformal,
        factor: lam,
        residual,
        anti_signature,
        witness: if conformal {
            None
        } else if anti_signature {
            witness(format!("anti-conformal: JᵀηJ = λη with λ = {lam}"))
        } else {
            witness(format!(
                "JᵀηJ deviates from λη by {deviation:e} (λ = {lam})"
            ))
        },
    })
}

/// One harmonic probe and its worst wave-operator residual over the samples.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeRecord {
    /// Printed probe expression in target coordinates y1, …, yn.
    pub probe: String,
    /// max over samples of |Δ(φ∘F)|.
    pub max_residual: f64,
}

/// Result of running the harmonic-probe family against a map.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub probes: Vec<ProbeRecord>,
    /// Every probe residual within tolerance.
    pub suite_pass: bool,
    /// η(∇y₁, ∇y₁) > η(∇yₙ, ∇yₙ) at every sample (vacuously true for
    /// definite signatures).
    pub gradient_condition: bool,
    pub sample_count: usize,
    /// Largest probe residual seen.
    pub max_residual: f64,
}

/// The probe family for a signature, as expressions over y1, …, yn:
/// all y_j; all y_j·y_k (j < k); for indefinite signatures y_k² + y_n²
/// (spacelike k) and y₁² + y_k² (timelike k); for definite signatures
/// y₁² − y_k². Each has Δ′φ = 0 by construction.
pub fn harmonic_probes(sig: Signature) -> Vec<ScalarExpr> {
    let n = sig.n();
    let nu = sig.nu();
    let yvars: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let y = |i: usize| ScalarExpr::coordinate(i, &yvars);
    let mut probes = Vec::new();
    for j in 0..n {
        probes.push(y(j));
    }
    for j in 0..n {
        for k in (j + 1)..n {
            probes.push(y(j) * y(k));
        }
    }
    if sig.is_definite() {
        for k in 1..n {
            probes.push(y(0).powi(2) - y(k).powi(2));
        }
    } else {
        for k in 0..(n - nu) {
            probes.push(y(k).powi(2) + y(n - 1).powi(2));
        }
        // y1² + y_n² already appears above, so stop short of k = n.
        for k in (n - nu)..(n - 1) {
            probes.push(y(0).powi(2) + y(k).powi(2));
        }
    }
    probes
}

/// Runs the harmonic-probe suite for F over the given samples.
///
/// Null-frame maps are checked through their Cartesian companion (the
/// probe family is stated in Cartesian target coordinates), with the
/// samples converted accordingly.
pub fn probe_suite(
    f: &SmoothMap,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<ProbeReport, EvalError> {
    let (fc, pts) = cartesian_view(f, samples);
    let sig = fc.sig();
    let mut probes = Vec::new();
    let mut max_residual = 0.0f64;
    for probe in harmonic_probes(sig) {
        let composed = probe.substitute(fc.comps());
        let mut worst = 0.0f64;
        for p in &pts {
            worst = worst.max(laplacian(sig, &composed, p)?.abs());
        }
        max_residual = max_residual.max(worst);
        probes.push(ProbeRecord {
            probe: probe.to_string(),
            max_residual: worst,
        });
    }
    let suite_pass = probes.iter().all(|r| r.max_residual <= tol);

    let gradient_condition = if sig.is_definite() {
        true
    } else {
        let mut ok = true;
        for p in &pts {
            let jac = fc.jacobian(p)?;
            let q = |row: usize| -> f64 {
                sig.epsilons()
                    .zip(jac.row(row))
                    .map(|(eps, d)| eps * d * d)
                    .sum()
            };
            if q(0) <= q(sig.n() - 1) {
                ok = false;
                break;
            }
        }
        ok
    };

    Ok(ProbeReport {
        probes,
        suite_pass,
        gradient_condition,
        sample_count: pts.len(),
        max_residual,
    })
}

fn cartesian_view(f: &SmoothMap, samples: &[Vec<f64>]) -> (SmoothMap, Vec<Vec<f64>>) {
    match f.frame() {
        Frame::Cartesian => (f.clone(), samples.to_vec()),
        Frame::Null => {
            let fc = f.to_cartesian();
            let pts = samples
                .iter()
                .map(|p| vec![(p[0] + p[1]) / 2.0, (p[0] - p[1]) / 2.0])
                .collect();
            (fc, pts)
        }
    }
}

/// Agreement record between the probe path and the Jacobian path.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    /// probe suite ∧ gradient condition.
    pub probe_path_pass: bool,
    /// Pointwise Jacobian verdict at every sample.
    pub jacobian_path_pass: bool,
    /// The two paths reach the same verdict. Guaranteed for n = 2;
    /// reported (not an error) in higher dimension.
    pub agree: bool,
    pub probe: ProbeReport,
    /// Largest normalized Jacobian residual across conformal samples.
    pub max_jacobian_residual: f64,
    pub conformal_samples: usize,
    pub sample_count: usize,
}

/// Runs both conformality characterizations over the same samples and
/// reports whether they agree.
pub fn check_equivalence(
    f: &SmoothMap,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<EquivalenceReport, EvalError> {
    let probe = probe_suite(f, samples, tol)?;
    let mut all = true;
    let mut conformal_samples = 0;
    let mut max_jacobian_residual = 0.0f64;
    for p in samples {
        let v = conformality_at(f, p, tol)?;
        if v.conformal {
            conformal_samples += 1;
            max_jacobian_residual = max_jacobian_residual.max(v.residual);
        } else {
            all = false;
        }
    }
    let probe_path_pass = probe.suite_pass && probe.gradient_condition;
    Ok(EquivalenceReport {
        probe_path_pass,
        jacobian_path_pass: all,
        agree: probe_path_pass == all,
        probe,
        max_jacobian_residual,
        conformal_samples,
        sample_count: samples.len(),
    })
}

/// Errors from [`liouville_fit`].
#[derive(Error, Debug, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} affinely independent samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("samples are not affine: fit residual {residual:e} exceeds tolerance")]
    NotAffine { residual: f64 },
    #[error("linear part is not a multiple of an η-orthogonal matrix: residual {residual:e}")]
    NotEtaOrthogonal { residual: f64 },
}

/// The affine model y = αAx + b with A η-orthogonal (AᵀηA = η).
#[derive(Clone, Debug, Serialize)]
pub struct AffineModel {
    /// Homothety factor α > 0.
    pub alpha: f64,
    /// η-orthogonal matrix A.
    pub a: Vec<Vec<f64>>,
    /// Translation part.
    pub b: Vec<f64>,
    /// Max-norm residual of the least-squares affine fit.
    pub fit_residual: f64,
    /// max|AᵀηA − η|.
    pub orthogonality_residual: f64,
}

impl AffineModel {
    /// The linear part A as a matrix.
    pub fn a_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.a)
    }
}

/// Fits y ≈ Mx + b by least squares (normal equations with an explicit
/// rank check), then decomposes M = αA with α = |det M|^(1/n) and
/// validates AᵀηA = η.
///
/// Intended for n ≥ 3 where whole-space conformal maps are affine; n = 2
/// is accepted for testing.
pub fn liouville_fit(
    samples: &[(Vec<f64>, Vec<f64>)],
    sig: Signature,
    tol: f64,
) -> Result<AffineModel, FitError> {
    let n = sig.n();
    let needed = n + 1;
    if samples.len() < needed {
        return Err(FitError::InsufficientSamples {
            needed,
            got: samples.len(),
        });
    }

    // Normal equations for the design matrix Φ = [x | 1].
    let mut normal = Matrix::zeros(needed, needed);
    let mut rhs = vec![vec![0.0; needed]; n];
    let phi_row = |x: &[f64]| -> Vec<f64> {
        let mut r = x.to_vec();
        r.push(1.0);
        r
    };
    for (x, y) in samples {
        assert_eq!(x.len(), n, "sample source dimension mismatch");
        assert_eq!(y.len(), n, "sample target dimension mismatch");
        let row = phi_row(x);
        for i in 0..needed {
            for j in 0..needed {
                normal[(i, j)] += row[i] * row[j];
            }
            for (r, rhs_r) in rhs.iter_mut().enumerate() {
                rhs_r[i] += row[i] * y[r];
            }
        }
    }

    let mut m = Matrix::zeros(n, n);
    let mut b = vec![0.0; n];
    for r in 0..n {
        let theta = normal.solve(&rhs[r]).ok_or(FitError::InsufficientSamples {
            needed,
            got: samples.len(),
        })?;
        for c in 0..n {
            m[(r, c)] = theta[c];
        }
        b[r] = theta[n];
    }

    let mut fit_residual = 0.0f64;
    for (x, y) in samples {
        let pred = m.mul_vec(x);
        for r in 0..n {
            fit_residual = fit_residual.max((y[r] - pred[r] - b[r]).abs());
        }
    }
    if fit_residual > tol {
        return Err(FitError::NotAffine {
            residual: fit_residual,
        });
    }

    let det = m.det();
    let alpha = det.abs().powf(1.0 / n as f64);
    // negated form also rejects a NaN factor
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(alpha > 1e-150) {
        return Err(FitError::NotEtaOrthogonal {
            residual: f64::INFINITY,
        });
    }
    let a = m.scale(1.0 / alpha);
    let eta = sig.eta_matrix();
    let orthogonality_residual = a.transpose().mul(&eta).mul(&a).sub(&eta).max_abs();
    if orthogonality_residual > tol {
        return Err(FitError::NotEtaOrthogonal {
            residual: orthogonality_residual,
        });
    }

    Ok(AffineModel {
        alpha,
        a: a.to_rows(),
        b,
        fit_residual,
        orthogonality_residual,
    })
}

/// Result of checking Δ(φ∘F) = α²·(Δ′φ)∘F over samples.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    /// max over samples of |Δ(φ∘F)(p) − α²·(Δ′φ)(F(p))|.
    pub max_deviation: f64,
    /// Both sides vanish (e.g. φ linear): the check passes degenerately.
    pub vacuous: bool,
    pub pass: bool,
    pub sample_count: usize,
}

/// Verifies the scaling identity of an affine conformal map with
/// homothety factor `alpha`: the φ-Laplacian transforms with α².
pub fn scaling_check(
    f: &SmoothMap,
    alpha: f64,
    phi: &ScalarExpr,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<ScalingReport, EvalError> {
    let sig = f.sig();
    let composed = compose(phi, f);
    let mut max_deviation = 0.0f64;
    let mut max_rhs = 0.0f64;
    for p in samples {
        let lhs = laplacian(sig, &composed, p)?;
        let image = f.eval(p)?;
        let rhs = alpha * alpha * laplacian(sig, phi, &image)?;
        max_deviation = max_deviation.max((lhs - rhs).abs());
        max_rhs = max_rhs.max(rhs.abs());
    }
    Ok(ScalingReport {
        max_deviation,
        vacuous: max_rhs <= tol,
        pass: max_deviation <= tol,
        sample_count: samples.len(),
    })
}

/// Cauchy–Riemann classification of a Euclidean plane map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CRKind {
    /// u_x = v_y and u_y = −v_x with nonsingular Jacobian.
    Holomorphic,
    /// u_x = −v_y and u_y = v_x with nonsingular Jacobian.
    AntiHolomorphic,
    Neither,
}

/// CR classification with the residual of the winning orientation.
#[derive(Clone, Debug, Serialize)]
pub struct CRClass {
    pub kind: CRKind,
    /// max over samples of the classified orientation's CR residual; for
    /// `Neither`, the smaller of the two orientations' residuals.
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Classifies F = (u, v) on ℝ² as holomorphic or anti-holomorphic in
/// z = x + iy by evaluating both Cauchy–Riemann residuals at every
/// sample. A singular Jacobian at any sample yields `Neither` with a
/// witness. Panics unless the signature is (2, 0).
pub fn classify_cr(f: &SmoothMap, samples: &[Vec<f64>], tol: f64) -> Result<CRClass, EvalError> {
    assert!(
        f.sig().n() == 2 && f.sig().nu() == 0,
        "CR classification requires signature (2, 0)"
    );
    let mut holo_max = 0.0f64;
    let mut anti_max = 0.0f64;
    for p in samples {
        let jac = f.jacobian(p)?;
        let (ux, uy, vx, vy) = (jac[(0, 0)], jac[(0, 1)], jac[(1, 0)], jac[(1, 1)]);
        let det = jac.det();
        if det.abs() <= SINGULAR_REL * jac.max_abs().powi(2) {
            return Ok(CRClass {
                kind: CRKind::Neither,
                residual: holo_max.min(anti_max),
                witness: Some(Witness {
                    point: p.clone(),
                    matrix: Some(jac.to_rows()),
                    detail: "singular Jacobian (vanishing derivative)".to_string(),
                }),
            });
        }
        holo_max = holo_max.max((ux - vy).abs().max((uy + vx).abs()));
        anti_max = anti_max.max((ux + vy).abs().max((uy - vx).abs()));
    }
    let (kind, residual) = if holo_max <= tol {
        (CRKind::Holomorphic, holo_max)
    } else if anti_max <= tol {
        (CRKind::AntiHolomorphic, anti_max)
    } else {
        (CRKind::Neither, holo_max.min(anti_max))
    };
    Ok(CRClass {
        kind,
        residual,
        witness: None,
    })
}
