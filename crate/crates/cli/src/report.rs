//! The report JSON schema:
//! `{version, job, checks: [{name, pass, residual, witness?}], pass}`
//! plus optional `factorization` / `decomposition` / `fit` sections and
//! a `reason` string on failing runs. Reports are byte-deterministic for
//! a fixed job and version, and never serialize a NaN or infinity.

use serde::Serialize;

use crate::job::JobSpec;

#[derive(Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Sampled one-variable function table.
#[derive(Serialize)]
pub struct FnTable {
    pub var: String,
    pub points: Vec<[f64; 2]>,
}

#[derive(Serialize)]
pub struct FactorizationOut {
    pub branch: String,
    pub pattern: String,
    pub psi: FnTable,
    pub chi: FnTable,
    pub max_reconstruction_error: f64,
}

#[derive(Serialize)]
pub struct DecompositionOut {
    pub base: [f64; 2],
    pub f: FnTable,
    pub g: FnTable,
    pub reconstruction_error: f64,
}

#[derive(Serialize)]
pub struct FitOut {
    pub alpha: f64,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub fit_residual: f64,
    pub orthogonality_residual: f64,
}

#[derive(Serialize)]
pub struct Report {
    pub version: String,
    pub job: JobSpec,
    pub checks: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorization: Option<FactorizationOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitOut>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Report {
    pub fn new(job: JobSpec) -> Report {
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            job,
            checks: Vec::new(),
            factorization: None,
            decomposition: None,
            fit: None,
            pass: true,
            reason: None,
        }
    }

    /// Appends a check, clamping non-finite residuals (they fail the run
    /// and the witness records the original value).
    pub fn push_check(&mut self, name: &str, pass: bool, residual: f64, witness: Option<String>) {
        let (pass, residual, witness) = if residual.is_finite() {
            (pass, residual, witness)
        } else {
            let note = format!("non-finite residual ({residual})");
            let witness = match witness {
                Some(w) => Some(format!("{note}; {w}")),
                None => Some(note),
            };
            (false, f64::MAX, witness)
        };
        if !pass {
            self.pass = false;
        }
        self.checks.push(CheckEntry {
            name: name.to_string(),
            pass,
            residual,
            witness,
        });
    }

    pub fn add_reason(&mut self, piece: &str) {
        match &mut self.reason {
            Some(r) => {
                r.push_str("; ");
                r.push_str(piece);
            }
            None => self.reason = Some(piece.to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Samples a one-variable expression into a table at `count` points over
/// `(lo, hi)` (interior midpoints; the interval is open).
pub fn sample_table(
    expr: &confmap::expr::ScalarExpr,
    (lo, hi): (f64, f64),
    count: usize,
) -> Result<FnTable, confmap::expr::EvalError> {
    let var = expr
        .vars()
        .first()
        .cloned()
        .unwrap_or_else(|| "s".to_string());
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let s = lo + (hi - lo) * (i as f64 + 0.5) / count as f64;
        points.push([s, expr.eval_value(&[s])?]);
    }
    Ok(FnTable { var, points })
}
