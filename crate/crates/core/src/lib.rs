//! Conformal transformations of semi-Euclidean spaces, numerically.
//!
//! This crate constructs, verifies, factorizes and decomposes conformal
//! maps of ℝⁿ_ν, the flat space with metric
//! η(x, y) = Σ ε_i x_i y_i and ε = (+1, …, +1, −1, …, −1), with particular
//! attention to the two-dimensional Minkowski plane ℝ²₁, where conformal
//! maps are abundant and completely classifiable.
//!
//! The key facts the library turns into executable checks:
//!
//! * **Jacobian criterion.** F is conformal at a point iff Jᵀ η J = λ η
//!   with λ > 0 ([`conformal::conformality_at`]).
//! * **Harmonic-probe characterization.** F is conformal iff Δ(φ∘F) = 0
//!   for the probe family of target-coordinate functions φ with Δ′φ = 0,
//!   together with the gradient side condition
//!   η(∇y₁, ∇y₁) > η(∇yₙ, ∇yₙ) for indefinite signatures
//!   ([`conformal::probe_suite`]). The side condition matters: the
//!   coordinate swap of ℝ²₁ passes every probe but reverses the metric.
//! * **Liouville rigidity.** Whole-space conformal maps in dimension ≥ 3
//!   are affine, y = αAx + b with AᵀηA = η ([`conformal::liouville_fit`]),
//!   and scale the Laplacian by α² ([`conformal::scaling_check`]).
//! * **Plane dichotomy.** Euclidean-plane conformal maps are holomorphic
//!   or anti-holomorphic ([`conformal::classify_cr`]); Minkowski-plane
//!   ones split along null coordinates into monotone pairs
//!   ([`minkowski2::MonotonePair`]), which is constructive in both
//!   directions ([`minkowski2::build_map_from_pair`],
//!   [`minkowski2::factor_map`]).
//! * **Compactification.** χ = ψ = (2/π)·atan maps all of ℝ²₁ onto the
//!   bounded diamond |x| + |t| < 1 ([`minkowski2::compactification`]),
//!   which no conformal map of the Euclidean plane can do, and any
//!   two open null rectangles are conformally equivalent
//!   ([`minkowski2::rectangle_equivalence`]).
//!
//! Everything is evaluated through exact second-order jets
//! ([`expr::Jet2`]): derivatives carry rounding noise only, so residual
//! tolerances can sit at 1e−8 and below. All values are immutable after
//! construction and all operations are pure.
//!
//! ```
//! use confmap::conformal::{conformality_at, DEFAULT_TOL};
//! use confmap::minkowski2::{build_map_from_pair, compactification};
//!
//! let map = build_map_from_pair(&compactification());
//! let verdict = conformality_at(&map, &[0.0, 0.0], DEFAULT_TOL).unwrap();
//! assert!(verdict.conformal);
//! // λ = ψ′(0)·χ′(0) = (2/π)²
//! let expected = (2.0 / std::f64::consts::PI).powi(2);
//! assert!((verdict.factor - expected).abs() < 1e-15);
//! ```

pub mod conformal;
pub mod diffops;
pub mod expr;
pub mod linalg;
pub mod metric;
pub mod minkowski2;
pub mod sample;

pub use conformal::{conformality_at, probe_suite, ConformalVerdict, ProbeReport};
pub use diffops::{Frame, SmoothMap};
pub use expr::{parse, Jet2, ScalarExpr};
pub use metric::{causal_character, eta_inner, CausalCharacter, Signature};
pub use minkowski2::{MonotonePair, NullRectangle};
