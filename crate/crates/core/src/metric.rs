//! Semi-Euclidean metric structure.
//!
//! The space ℝⁿ_ν carries the flat diagonal metric
//!
//! ```text
//! η(x, y) = x₁y₁ + ⋯ + x_{n−ν} y_{n−ν} − x_{n−ν+1} y_{n−ν+1} − ⋯ − xₙ yₙ
//! ```
//!
//! so the first `n − ν` coordinates are spacelike and the last `ν` are
//! timelike. A [`Signature`] packages the pair `(n, ν)`; points and tangent
//! vectors are ordinary `&[f64]` slices of length `n`.
//!
//! Coordinates are 1-indexed in the documentation to match the usual
//! convention; indices in code are 0-based.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

/// Default relative tolerance for deciding that a vector is null.
pub const DEFAULT_NULL_TOL: f64 = 1e-10;

/// Errors from metric-level operations.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MetricError {
    /// A vector's length does not match the ambient dimension.
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Invalid (n, nu) pair.
    #[error("invalid signature: n = {n}, nu = {nu} (need n ≥ 1 and 0 ≤ nu ≤ n)")]
    InvalidSignature { n: usize, nu: usize },
}

/// The signature of a semi-Euclidean space ℝⁿ_ν: dimension `n` and index
/// `ν`, the count of −1 entries in the diagonal metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSignature")]
pub struct Signature {
    n: usize,
    nu: usize,
}

#[derive(Deserialize)]
struct RawSignature {
    n: usize,
    nu: usize,
}

impl TryFrom<RawSignature> for Signature {
    type Error = MetricError;
    fn try_from(raw: RawSignature) -> Result<Self, MetricError> {
        Signature::new(raw.n, raw.nu)
    }
}

impl Signature {
    /// Creates the signature of ℝⁿ_ν. Requires `n ≥ 1` and `0 ≤ ν ≤ n`.
    pub fn new(n: usize, nu: usize) -> Result<Self, MetricError> {
        if n == 0 || nu > n {
            return Err(MetricError::InvalidSignature { n, nu });
        }
        Ok(Signature { n, nu })
    }

    /// Euclidean signature (ν = 0).
    pub fn euclidean(n: usize) -> Self {
        Signature::new(n, 0).expect("n ≥ 1")
    }

    /// Dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Index `ν` (number of timelike directions).
    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Whether the metric is definite (ν = 0 or ν = n).
    pub fn is_definite(&self) -> bool {
        self.nu == 0 || self.nu == self.n
    }

    /// ε_i for the 0-based coordinate `i`: +1 for `i < n − ν`, −1 after.
    pub fn epsilon(&self, i: usize) -> f64 {
        assert!(i < self.n, "coordinate index out of range");
        if i < self.n - self.nu {
            1.0
        } else {
            -1.0
        }
    }

    /// Iterator over (ε₁, …, εₙ).
    pub fn epsilons(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.epsilon(i))
    }

    /// The diagonal metric matrix η = diag(ε₁, …, εₙ).
    pub fn eta_matrix(&self) -> Matrix {
        Matrix::diagonal(&self.epsilons().collect::<Vec<_>>())
    }

    fn check_dim(&self, v: &[f64]) -> Result<(), MetricError> {
        if v.len() != self.n {
            return Err(MetricError::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }
}

/// Causal character of a tangent vector, decided by the sign of η(v, v).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalCharacter {
    /// η(v, v) > 0.
    Spacelike,
    /// η(v, v) < 0.
    Timelike,
    /// η(v, v) = 0 within tolerance.
    Null,
}

/// The inner product η(a, b) = Σ ε_i a_i b_i.
pub fn eta_inner(sig: Signature, a: &[f64], b: &[f64]) -> Result<f64, MetricError> {
    sig.check_dim(a)?;
    sig.check_dim(b)?;
    Ok(sig
        .epsilons()
        .zip(a.iter().zip(b))
        .map(|(eps, (x, y))| eps * x * y)
        .sum())
}

/// Classifies `v` by the sign of η(v, v).
///
/// The null test is relative: `|η(v, v)| ≤ tol · |v|²` (Euclidean norm
/// squared), so the verdict is invariant under rescaling of `v`. Use
/// [`DEFAULT_NULL_TOL`] unless there is a reason not to.
pub fn causal_character(
    sig: Signature,
    v: &[f64],
    tol: f64,
) -> Result<CausalCharacter, MetricError> {
    sig.check_dim(v)?;
    let q = eta_inner(sig, v, v)?;
    let norm2: f64 = v.iter().map(|x| x * x).sum();
    if q.abs() <= tol * norm2 {
        Ok(CausalCharacter::Null)
    } else if q > 0.0 {
        Ok(CausalCharacter::Spacelike)
    } else {
        Ok(CausalCharacter::Timelike)
    }
}
