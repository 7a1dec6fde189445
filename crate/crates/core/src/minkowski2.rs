//! Conformal maps of two-dimensional Minkowski space.
//!
//! In null coordinates u = x + t, v = x − t every conformal transformation
//! of ℝ²₁ is of the form F(u, v) = (ψ(u), χ(v)) or F(u, v) = (ψ(v), χ(u))
//! for two one-variable diffeomorphisms ψ, χ that are either both
//! increasing or both decreasing. That classification drives everything
//! here:
//!
//! * [`MonotonePair`]: the datum (χ, ψ, pattern, branch), validated by
//!   sampling the derivatives over declared domains;
//! * [`build_map_from_pair`] / [`factor_map`]: the two directions of the
//!   classification, with a build/factor round trip exact to rounding;
//! * [`dalembert_decompose`]: splits a wave-equation solution X(x, t)
//!   into f(x + t) + g(x − t);
//! * [`compactification`]: the pair χ = ψ = (2/π)·atan, which maps all of
//!   ℝ²₁ conformally onto the open diamond |x| + |t| < 1;
//! * [`NullRectangle`], [`bounding_null_rectangle`],
//!   [`rectangle_equivalence`]: any two open null rectangles are
//!   conformally equivalent via an affine increasing pair;
//! * [`null_line_check`]: conformal maps carry null lines to null lines;
//!   the report also classifies causal character preservation.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::conformal::{conformality_at, ConformalVerdict};
use crate::diffops::{laplacian, Frame, SmoothMap};
use crate::expr::{EvalError, Func, ScalarExpr};
use crate::metric::Signature;

/// Number of interior samples used to validate monotonicity.
const MONO_SAMPLES: usize = 256;

/// Derivative magnitudes at or below this are treated as vanishing.
const DERIV_FLOOR: f64 = 1e-12;

/// To null coordinates: (x, t) ↦ (u, v) = (x + t, x − t).
pub fn to_null(p: (f64, f64)) -> (f64, f64) {
    (p.0 + p.1, p.0 - p.1)
}

/// From null coordinates: (u, v) ↦ (x, t) = ((u + v)/2, (u − v)/2).
pub fn from_null(q: (f64, f64)) -> (f64, f64) {
    ((q.0 + q.1) / 2.0, (q.0 - q.1) / 2.0)
}

/// Common monotonicity pattern of the pair (χ, ψ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pattern {
    BothIncreasing,
    BothDecreasing,
}

/// Which null coordinate each function consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// F(u, v) = (ψ(u), χ(v)).
    Direct,
    /// F(u, v) = (ψ(v), χ(u)).
    Swapped,
}

/// Errors from validating a monotone pair.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum PairError {
    #[error("mixed monotonicity: {detail}")]
    MixedMonotonicity { detail: String },
    #[error("{func} has |derivative| ≤ {DERIV_FLOOR:e} at {at}")]
    ZeroDerivative { func: &'static str, at: f64 },
    #[error(transparent)]
    Domain(#[from] EvalError),
}

/// The classification datum of a 2D Minkowski conformal map: two
/// one-variable diffeomorphisms with equal monotonicity, plus the branch.
///
/// Construction validates monotonicity by sampling the derivative at 256
/// interior points of each declared domain plus near-endpoint points:
/// every sample must have the same nonzero sign, across both functions.
/// The declared domains record where the pair has been validated (and,
/// for factored pairs, the rectangle sides they were read off); the
/// expressions themselves may well be defined beyond them.
#[derive(Clone, Debug)]
pub struct MonotonePair {
    psi: ScalarExpr,
    chi: ScalarExpr,
    psi_domain: (f64, f64),
    chi_domain: (f64, f64),
    pattern: Pattern,
    branch: Branch,
}

fn derivative_sign(
    f: &ScalarExpr,
    name: &'static str,
    (lo, hi): (f64, f64),
) -> Result<f64, PairError> {
    assert!(lo < hi, "domain must be a nonempty open interval");
    assert_eq!(f.arity(), 1, "monotone pair functions take one variable");
    let w = hi - lo;
    let mut points = Vec::with_capacity(MONO_SAMPLES + 2);
    points.push(lo + w * 1e-9);
    for i in 0..MONO_SAMPLES {
        points.push(lo + w * (i as f64 + 0.5) / MONO_SAMPLES as f64);
    }
    points.push(hi - w * 1e-9);
    let mut sign = 0.0;
    for s in points {
        let d = f.eval_jet(&[s])?.grad[0];
        if d.abs() <= DERIV_FLOOR {
            return Err(PairError::ZeroDerivative { func: name, at: s });
        }
        if sign == 0.0 {
            sign = d.signum();
        } else if d.signum() != sign {
            return Err(PairError::MixedMonotonicity {
                detail: format!("{name} changes direction at {s}"),
            });
        }
    }
    Ok(sign)
}

impl MonotonePair {
    /// Validates and packages (ψ, χ) with their declared domains. The
    /// pattern is detected from the sampled derivative signs.
    pub fn new(
        psi: ScalarExpr,
        psi_domain: (f64, f64),
        chi: ScalarExpr,
        chi_domain: (f64, f64),
        branch: Branch,
    ) -> Result<MonotonePair, PairError> {
        let s_psi = derivative_sign(&psi, "ψ", psi_domain)?;
        let s_chi = derivative_sign(&chi, "χ", chi_domain)?;
        if s_psi != s_chi {
            return Err(PairError::MixedMonotonicity {
                detail: format!("ψ is {} but χ is {}", direction(s_psi), direction(s_chi)),
            });
        }
        Ok(MonotonePair {
            psi,
            chi,
            psi_domain,
            chi_domain,
            pattern: if s_psi > 0.0 {
                Pattern::BothIncreasing
            } else {
                Pattern::BothDecreasing
            },
            branch,
        })
    }

    pub fn psi(&self) -> &ScalarExpr {
        &self.psi
    }

    pub fn chi(&self) -> &ScalarExpr {
        &self.chi
    }

    pub fn psi_domain(&self) -> (f64, f64) {
        self.psi_domain
    }

    pub fn chi_domain(&self) -> (f64, f64) {
        self.chi_domain
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }
}

fn direction(sign: f64) -> &'static str {
    if sign > 0.0 {
        "increasing"
    } else {
        "decreasing"
    }
}

fn mink2() -> Signature {
    Signature::new(2, 1).expect("(2, 1) is valid")
}

/// Builds the null-frame map of a validated pair:
/// F(u, v) = (ψ(u), χ(v)) for the direct branch, (ψ(v), χ(u)) for the
/// swapped one. Use [`SmoothMap::to_cartesian`] for the Cartesian
/// companion (χ(x+t) + ψ(x−t) form, up to the factor-2 bookkeeping of the
/// null frame).
pub fn build_map_from_pair(pair: &MonotonePair) -> SmoothMap {
    let uv = ["u", "v"];
    let u = ScalarExpr::coordinate(0, &uv);
    let v = ScalarExpr::coordinate(1, &uv);
    let (psi_arg, chi_arg) = match pair.branch {
        Branch::Direct => (u, v),
        Branch::Swapped => (v, u),
    };
    let comps = vec![
        pair.psi.substitute(&[psi_arg]),
        pair.chi.substitute(&[chi_arg]),
    ];
    SmoothMap::new(mink2(), Frame::Null, comps).expect("pair maps are well-formed")
}

/// An open axis-aligned rectangle (a₁, a₂) × (b₁, b₂) in null coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullRectangle {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Errors from rectangle construction.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum RectangleError {
    #[error("degenerate rectangle: zero width in {axis}")]
    Degenerate { axis: char },
}

impl NullRectangle {
    // negated comparisons so NaN bounds are rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<NullRectangle, RectangleError> {
        if !(a1 < a2) {
            return Err(RectangleError::Degenerate { axis: 'u' });
        }
        if !(b1 < b2) {
            return Err(RectangleError::Degenerate { axis: 'v' });
        }
        Ok(NullRectangle { a1, a2, b1, b2 })
    }

    /// The diamond D_M = {|x| + |t| < 1}, i.e. (−1, 1)² in null coordinates.
    pub fn diamond() -> NullRectangle {
        NullRectangle {
            a1: -1.0,
            a2: 1.0,
            b1: -1.0,
            b2: 1.0,
        }
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.a1 + self.a2) / 2.0, (self.b1 + self.b2) / 2.0)
    }

    /// `k × k` interior midpoint grid; never touches the (open) boundary.
    pub fn interior_grid(&self, k: usize) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(k * k);
        for i in 0..k {
            let u = self.a1 + (self.a2 - self.a1) * (i as f64 + 0.5) / k as f64;
            for j in 0..k {
                let v = self.b1 + (self.b2 - self.b1) * (j as f64 + 0.5) / k as f64;
                pts.push((u, v));
            }
        }
        pts
    }

    pub fn contains(&self, (u, v): (f64, f64)) -> bool {
        self.a1 < u && u < self.a2 && self.b1 < v && v < self.b2
    }
}

impl Serialize for NullRectangle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("NullRectangle", 2)?;
        s.serialize_field("u", &[self.a1, self.a2])?;
        s.serialize_field("v", &[self.b1, self.b2])?;
        s.end()
    }
}

/// Tight null-coordinate bounding rectangle of a point set (given in
/// Cartesian coordinates). Panics on an empty slice; zero width in either
/// null coordinate is an error.
pub fn bounding_null_rectangle(points: &[(f64, f64)]) -> Result<NullRectangle, RectangleError> {
    assert!(!points.is_empty(), "need at least one point");
    let mut umin = f64::INFINITY;
    let mut umax = f64::NEG_INFINITY;
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for &p in points {
        let (u, v) = to_null(p);
        umin = umin.min(u);
        umax = umax.max(u);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    NullRectangle::new(umin, umax, vmin, vmax)
}

/// The affine increasing pair carrying `src` onto `dst`:
/// ψ(u) = s_u·u + c_u with s_u = (dst.a₂ − dst.a₁)/(src.a₂ − src.a₁) and
/// c_u chosen so endpoints map to endpoints; likewise χ for v. The
/// expression is built in the anchored form s_u·(u − src.a₁) + dst.a₁, so
/// lower corners map exactly even in floating point.
pub fn rectangle_equivalence(src: &NullRectangle, dst: &NullRectangle) -> MonotonePair {
    let s = ["s"];
    let affine = |src_lo: f64, src_hi: f64, dst_lo: f64, dst_hi: f64| {
        let slope = (dst_hi - dst_lo) / (src_hi - src_lo);
        ScalarExpr::constant(slope, &s)
            * (ScalarExpr::coordinate(0, &s) - ScalarExpr::constant(src_lo, &s))
            + ScalarExpr::constant(dst_lo, &s)
    };
    let psi = affine(src.a1, src.a2, dst.a1, dst.a2);
    let chi = affine(src.b1, src.b2, dst.b1, dst.b2);
    MonotonePair::new(psi, (src.a1, src.a2), chi, (src.b1, src.b2), Branch::Direct)
        .expect("increasing affine maps always validate")
}

/// The compactifying pair χ = ψ = (2/π)·atan: its map sends every (u, v)
/// into (−1, 1)², i.e. all of ℝ²₁ into the diamond |x| + |t| < 1.
///
/// The declared domain (−1000, 1000) is the validated window; the map
/// itself is defined (and stays inside the diamond) everywhere.
pub fn compactification() -> MonotonePair {
    let s = ["s"];
    let f = ScalarExpr::constant(2.0 / std::f64::consts::PI, &s)
        * ScalarExpr::coordinate(0, &s).apply(Func::Atan);
    MonotonePair::new(
        f.clone(),
        (-1000.0, 1000.0),
        f,
        (-1000.0, 1000.0),
        Branch::Direct,
    )
    .expect("atan is strictly increasing")
}

/// The inverse pair χ = ψ = tan(π·s/2) on (−1, 1), carrying the diamond
/// back onto all of ℝ²₁.
pub fn compactification_inverse() -> MonotonePair {
    let s = ["s"];
    let f = (ScalarExpr::constant(std::f64::consts::FRAC_PI_2, &s) * ScalarExpr::coordinate(0, &s))
        .apply(Func::Tan);
    MonotonePair::new(f.clone(), (-1.0, 1.0), f, (-1.0, 1.0), Branch::Direct)
        .expect("tan is strictly increasing on (−π/2, π/2)")
}

/// Errors from [`factor_map`].
#[derive(Error, Debug, Clone)]
pub enum FactorError {
    #[error("map is not conformal on the rectangle: residual {residual:e} at {point:?}")]
    NotConformal {
        point: Vec<f64>,
        residual: f64,
        verdict: Box<ConformalVerdict>,
    },
    #[error("map is not separable: {detail}")]
    NotSeparable { detail: String },
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Domain(#[from] EvalError),
}

/// Factorizes a conformal null-frame map over a rectangle back into its
/// monotone pair.
///
/// Branch detection: if ∂U/∂v vanishes on a 17×17 interior grid
/// (relative to max(1, max|∂U/∂u|)) the branch is direct and
/// ψ(u) := U(u, v_mid), χ(v) := V(u_mid, v); symmetrically for the swapped
/// branch. The reconstruction is then verified against F on the grid.
/// Panics unless `f` is in the null frame.
pub fn factor_map(
    f: &SmoothMap,
    rect: &NullRectangle,
    tol: f64,
) -> Result<MonotonePair, FactorError> {
    assert_eq!(
        f.frame(),
        Frame::Null,
        "factor_map expects a null-frame map"
    );
    let grid = rect.interior_grid(17);

    let mut max_uu = 0.0f64;
    let mut max_uv = 0.0f64;
    let mut failed: Option<(Vec<f64>, ConformalVerdict)> = None;
    for &(u, v) in &grid {
        let p = [u, v];
        let verdict = conformality_at(f, &p, tol)?;
        if !verdict.conformal && failed.is_none() {
            failed = Some((p.to_vec(), verdict));
        }
        let jac = f.jacobian(&p)?;
        max_uu = max_uu.max(jac[(0, 0)].abs());
        max_uv = max_uv.max(jac[(0, 1)].abs());
    }

    // non-separability is diagnosed before a failed conformality precheck
    let branch = if max_uv <= tol * max_uu.max(1.0) {
        Branch::Direct
    } else if max_uu <= tol * max_uv.max(1.0) {
        Branch::Swapped
    } else {
        return Err(FactorError::NotSeparable {
            detail: format!(
                "neither partial of U vanishes on the grid (max|∂U/∂u| = {max_uu:e}, max|∂U/∂v| = {max_uv:e})"
            ),
        });
    };
    if let Some((point, verdict)) = failed {
        return Err(FactorError::NotConformal {
            residual: verdict.residual,
            point,
            verdict: Box::new(verdict),
        });
    }

    let (u_mid, v_mid) = rect.center();
    let s = ["s"];
    let var = ScalarExpr::coordinate(0, &s);
    let slice = |comp: &ScalarExpr, fixed_u: Option<f64>| match fixed_u {
        // fix v = v_mid, leave u free
        None => comp.substitute(&[var.clone(), ScalarExpr::constant(v_mid, &s)]),
        // fix u = u_mid, leave v free
        Some(u0) => comp.substitute(&[ScalarExpr::constant(u0, &s), var.clone()]),
    };
    let (psi, psi_dom, chi, chi_dom) = match branch {
        Branch::Direct => (
            slice(&f.comps()[0], None),
            (rect.a1, rect.a2),
            slice(&f.comps()[1], Some(u_mid)),
            (rect.b1, rect.b2),
        ),
        Branch::Swapped => (
            slice(&f.comps()[0], Some(u_mid)),
            (rect.b1, rect.b2),
            slice(&f.comps()[1], None),
            (rect.a1, rect.a2),
        ),
    };

    let pair = MonotonePair::new(psi, psi_dom, chi, chi_dom, branch)?;

    let rebuilt = build_map_from_pair(&pair);
    let mut worst = 0.0f64;
    for &(u, v) in &grid {
        let p = [u, v];
        let a = f.eval(&p)?;
        let b = rebuilt.eval(&p)?;
        worst = worst.max((a[0] - b[0]).abs().max((a[1] - b[1]).abs()));
    }
    if worst > tol {
        return Err(FactorError::NotSeparable {
            detail: format!("reconstruction mismatch {worst:e} exceeds tolerance"),
        });
    }
    Ok(pair)
}

/// Errors from [`dalembert_decompose`].
#[derive(Error, Debug, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("not a wave solution: |ΔX| = {residual:e} at (u, v) = {at:?}")]
    NotWaveSolution { residual: f64, at: (f64, f64) },
    #[error(transparent)]
    Domain(#[from] EvalError),
}

/// d'Alembert split of a wave-equation solution: X(x, t) = f(x+t) + g(x−t).
#[derive(Clone, Debug)]
pub struct DalembertSplit {
    /// f as a closed-form one-variable expression.
    pub f: ScalarExpr,
    /// g as a closed-form one-variable expression.
    pub g: ScalarExpr,
    /// Anchor (u₀, v₀): the rectangle center.
    pub base: (f64, f64),
    /// max over the validation grid of |ΔX|.
    pub wave_residual: f64,
    /// max over the validation grid of |f(u) + g(v) − X̃(u, v)|.
    pub reconstruction_error: f64,
}

/// Splits a solution X of the wave equation ΔX = 0 into
/// f(x + t) + g(x − t) over a null rectangle.
///
/// With X̃ the null-coordinate form of X and (u₀, v₀) the rectangle
/// center, f(u) := X̃(u, v₀) − X̃(u₀, v₀)/2 and g(v) := X̃(u₀, v) − X̃(u₀, v₀)/2;
/// the additive-constant ambiguity is fixed by this symmetric split. The
/// wave-equation residual is validated on a 65×65 interior grid first.
pub fn dalembert_decompose(
    x_expr: &ScalarExpr,
    rect: &NullRectangle,
    tol: f64,
) -> Result<DalembertSplit, DecomposeError> {
    assert_eq!(x_expr.arity(), 2, "X must be an expression in (x, t)");
    let sig = mink2();
    let grid = rect.interior_grid(65);
    let mut worst = 0.0f64;
    let mut worst_at = rect.center();
    for &(u, v) in &grid {
        let (x, t) = from_null((u, v));
        let r = laplacian(sig, x_expr, &[x, t])?.abs();
        if r > worst {
            worst = r;
            worst_at = (u, v);
        }
    }
    if worst > tol {
        return Err(DecomposeError::NotWaveSolution {
            residual: worst,
            at: worst_at,
        });
    }

    let uv = ["u", "v"];
    let u = ScalarExpr::coordinate(0, &uv);
    let v = ScalarExpr::coordinate(1, &uv);
    let half = ScalarExpr::constant(0.5, &uv);
    let x_tilde = x_expr.substitute(&[half.clone() * (u.clone() + v.clone()), half * (u - v)]);

    let (u0, v0) = rect.center();
    let anchor = x_tilde.eval_value(&[u0, v0])?;
    let s = ["s"];
    let var = ScalarExpr::coordinate(0, &s);
    let half_anchor = ScalarExpr::constant(anchor / 2.0, &s);
    let f = x_tilde.substitute(&[var.clone(), ScalarExpr::constant(v0, &s)]) - half_anchor.clone();
    let g = x_tilde.substitute(&[ScalarExpr::constant(u0, &s), var]) - half_anchor;

    let mut recon = 0.0f64;
    let mut recon_at = (u0, v0);
    for &(u, v) in &grid {
        let err = (f.eval_value(&[u])? + g.eval_value(&[v])? - x_tilde.eval_value(&[u, v])?).abs();
        if err > recon {
            recon = err;
            recon_at = (u, v);
        }
    }
    if recon > tol {
        return Err(DecomposeError::NotWaveSolution {
            residual: recon,
            at: recon_at,
        });
    }

    Ok(DalembertSplit {
        f,
        g,
        base: (u0, v0),
        wave_residual: worst,
        reconstruction_error: recon,
    })
}

/// Causal-character preservation across sampled tangent vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CausalPreservation {
    /// Spacelike ↦ spacelike, timelike ↦ timelike, null ↦ null.
    Causal,
    /// Spacelike and timelike exchanged, null preserved.
    AntiCausal,
    /// Neither pattern holds everywhere.
    Broken,
}

/// One sampled null line and how its image behaved.
#[derive(Clone, Debug, Serialize)]
pub struct LineRecord {
    /// E.g. "u = 0.25".
    pub line: String,
    /// Which image coordinate stayed constant ("U" or "V"), if any.
    pub constant_coord: Option<String>,
    /// Spread (max − min) of that coordinate along the line.
    pub deviation: f64,
}

/// Report of [`null_line_check`].
#[derive(Clone, Debug, Serialize)]
pub struct NullLineReport {
    pub lines: Vec<LineRecord>,
    /// Every sampled line mapped into a null line, consistently with one
    /// branch (direct: u-lines → U-lines).
    pub branch: Option<Branch>,
    pub causal: CausalPreservation,
    pub pass: bool,
    /// Largest constant-coordinate spread over all passing lines.
    pub max_deviation: f64,
}

/// Checks that F preserves null lines over a rectangle: each sampled line
/// u = const (resp. v = const) must map to a line of constant U or V,
/// consistently across lines, and tangent causal characters must be
/// uniformly preserved or uniformly exchanged. Panics unless `f` is in
/// the null frame.
pub fn null_line_check(
    f: &SmoothMap,
    rect: &NullRectangle,
    tol: f64,
) -> Result<NullLineReport, EvalError> {
    assert_eq!(
        f.frame(),
        Frame::Null,
        "null_line_check expects a null-frame map"
    );
    const LINES: usize = 9;
    const PER_LINE: usize = 33;

    let axis = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
        (0..k)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / k as f64)
            .collect()
    };
    let us = axis(rect.a1, rect.a2, LINES);
    let vs = axis(rect.b1, rect.b2, LINES);
    let u_dense = axis(rect.a1, rect.a2, PER_LINE);
    let v_dense = axis(rect.b1, rect.b2, PER_LINE);

    let mut lines = Vec::new();
    let mut max_deviation = 0.0f64;
    // (what u-lines map to, what v-lines map to): 0 = U const, 1 = V const
    let mut u_target: Option<usize> = None;
    let mut v_target: Option<usize> = None;
    let mut consistent = true;

    let scan = |label: String,
                pts: Vec<[f64; 2]>,
                target: &mut Option<usize>,
                consistent: &mut bool,
                lines: &mut Vec<LineRecord>,
                max_deviation: &mut f64|
     -> Result<(), EvalError> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &pts {
            let img = f.eval(p)?;
            for c in 0..2 {
                lo[c] = lo[c].min(img[c]);
                hi[c] = hi[c].max(img[c]);
            }
        }
        let spread = [hi[0] - lo[0], hi[1] - lo[1]];
        let scale = [
            hi[0].abs().max(lo[0].abs()).max(1.0),
            hi[1].abs().max(lo[1].abs()).max(1.0),
        ];
        let const_idx = (0..2).find(|&c| spread[c] <= tol * scale[c]);
        match const_idx {
            Some(c) => {
                *max_deviation = max_deviation.max(spread[c]);
                match *target {
                    None => *target = Some(c),
                    Some(prev) if prev == c => {}
                    Some(_) => *consistent = false,
                }
                lines.push(LineRecord {
                    line: label,
                    constant_coord: Some(if c == 0 { "U" } else { "V" }.to_string()),
                    deviation: spread[c],
                });
            }
            None => {
                *consistent = false;
                lines.push(LineRecord {
                    line: label,
                    constant_coord: None,
                    deviation: spread[0].min(spread[1]),
                });
            }
        }
        Ok(())
    };

    for &u in &us {
        let pts: Vec<[f64; 2]> = v_dense.iter().map(|&v| [u, v]).collect();
        scan(
            format!("u = {u}"),
            pts,
            &mut u_target,
            &mut consistent,
            &mut lines,
            &mut max_deviation,
        )?;
    }
    for &v in &vs {
        let pts: Vec<[f64; 2]> = u_dense.iter().map(|&u| [u, v]).collect();
        scan(
            format!("v = {v}"),
            pts,
            &mut v_target,
            &mut consistent,
            &mut lines,
            &mut max_deviation,
        )?;
    }

    // Direct: U depends on u alone, so u = const lines have constant U.
    let branch = match (consistent, u_target, v_target) {
        (true, Some(0), Some(1)) => Some(Branch::Direct),
        (true, Some(1), Some(0)) => Some(Branch::Swapped),
        _ => None,
    };

    // Causal character of pushed-forward tangents on a coarse grid. In the
    // null frame the quadratic form is q(w) = w_U · w_V; the spacelike test
    // vector (1, 1) has q = 1.
    let mut saw_preserved = false;
    let mut saw_flipped = false;
    let mut null_broken = false;
    for &(u, v) in rect.interior_grid(5).iter() {
        let jac = f.jacobian(&[u, v])?;
        let push = |w: [f64; 2]| {
            [
                jac[(0, 0)] * w[0] + jac[(0, 1)] * w[1],
                jac[(1, 0)] * w[0] + jac[(1, 1)] * w[1],
            ]
        };
        for null_dir in [[1.0, 0.0], [0.0, 1.0]] {
            let w = push(null_dir);
            if (w[0] * w[1]).abs() > tol * (w[0] * w[0] + w[1] * w[1]).max(1e-300) {
                null_broken = true;
            }
        }
        let w = push([1.0, 1.0]);
        let q = w[0] * w[1];
        if q > 0.0 {
            saw_preserved = true;
        } else if q < 0.0 {
            saw_flipped = true;
        }
    }
    let causal = match (null_broken, saw_preserved, saw_flipped) {
        (false, true, false) => CausalPreservation::Causal,
        (false, false, true) => CausalPreservation::AntiCausal,
        _ => CausalPreservation::Broken,
    };

    let pass = branch.is_some();
    Ok(NullLineReport {
        lines,
        branch,
        causal,
        pass,
        max_deviation,
    })
}
