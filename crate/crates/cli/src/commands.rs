//! The five subcommands. Each returns the text to print on stdout and the
//! process exit code: 0 pass, 1 numerical failure, 2 usage/evaluation
//! error (the job never produced a complete numerical verdict).

use confmap::conformal::{conformality_at, liouville_fit, probe_suite, FitError};
use confmap::diffops::Frame;
use confmap::expr::parse;
use confmap::minkowski2::{
    build_map_from_pair, dalembert_decompose, factor_map, null_line_check, Branch, DecomposeError,
    FactorError, NullRectangle, Pattern,
};
use confmap::sample;

use crate::job::{JobSpec, UsageError};
use crate::report::{sample_table, DecompositionOut, FactorizationOut, FitOut, Report};
use crate::svg;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Report for a job that never reached a numerical verdict.
pub fn usage_report(job: Option<JobSpec>, message: &str) -> String {
    let mut report = match job {
        Some(j) => Report::new(j),
        None => {
            // minimal schema-shaped output without a job echo
            return serde_json::to_string_pretty(&serde_json::json!({
                "version": env!("CARGO_PKG_VERSION"),
                "job": null,
                "checks": [{"name": "job", "pass": false, "residual": 0.0, "witness": message}],
                "pass": false,
                "reason": message,
            }))
            .expect("serializes");
        }
    };
    report.push_check("job", false, 0.0, Some(message.to_string()));
    report.add_reason(message);
    report.to_json()
}

fn rect_from_bounds(bounds: &[(f64, f64)]) -> Result<NullRectangle, UsageError> {
    if bounds.len() != 2 {
        return Err(UsageError("this command needs a 2D region".to_string()));
    }
    NullRectangle::new(bounds[0].0, bounds[0].1, bounds[1].0, bounds[1].1)
        .map_err(|e| UsageError(e.to_string()))
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Direct => "Direct",
        Branch::Swapped => "Swapped",
    }
}

fn pattern_name(p: Pattern) -> &'static str {
    match p {
        Pattern::BothIncreasing => "BothIncreasing",
        Pattern::BothDecreasing => "BothDecreasing",
    }
}

pub fn cmd_check(job: JobSpec) -> Result<(String, i32), UsageError> {
    let map = job.build_map()?;
    let bounds = job.bounds()?;
    let samples = sample::default_samples(&bounds, job.grid);
    let tol = job.tolerance;
    let mut report = Report::new(job.clone());

    // pointwise Jacobian criterion over the sample set
    let mut all_conformal = true;
    let mut all_failures_anti = true;
    let mut max_residual = 0.0f64;
    let mut witness: Option<String> = None;
    for p in &samples {
        let v = conformality_at(&map, p, tol)
            .map_err(|e| UsageError(format!("evaluation failed: {e}")))?;
        max_residual = max_residual.max(v.residual);
        if !v.conformal {
            all_conformal = false;
            if !v.anti_signature {
                all_failures_anti = false;
            }
            if witness.is_none() {
                witness = v.witness.map(|w| format!("{} at {:?}", w.detail, w.point));
            }
        }
    }
    report.push_check("conformality", all_conformal, max_residual, witness);
    if !all_conformal {
        if all_failures_anti {
            report.add_reason("anti-conformal (λ<0)");
        } else {
            report.add_reason("Jacobian criterion failed");
        }
    }

    // harmonic probes and the gradient side condition
    let probes = probe_suite(&map, &samples, tol)
        .map_err(|e| UsageError(format!("evaluation failed: {e}")))?;
    let probe_witness = (!probes.suite_pass).then(|| {
        probes
            .probes
            .iter()
            .filter(|r| r.max_residual > tol)
            .map(|r| r.probe.clone())
            .collect::<Vec<_>>()
            .join(", ")
    });
    report.push_check(
        "probe_suite",
        probes.suite_pass,
        probes.max_residual,
        probe_witness,
    );
    if !probes.suite_pass {
        report.add_reason("harmonic probe suite failed");
    }
    report.push_check(
        "gradient_condition",
        probes.gradient_condition,
        0.0,
        (!probes.gradient_condition)
            .then(|| "η(∇y1,∇y1) > η(∇yn,∇yn) fails at a sample".to_string()),
    );
    if !probes.gradient_condition {
        report.add_reason("gradient condition violated");
    }

    // null-line preservation, when the map lives in the null frame
    if map.frame() == Frame::Null {
        let rect = rect_from_bounds(&bounds)?;
        let lines = null_line_check(&map, &rect, tol)
            .map_err(|e| UsageError(format!("evaluation failed: {e}")))?;
        report.push_check(
            "null_lines",
            lines.pass,
            lines.max_deviation,
            (!lines.pass).then(|| "a null line maps off the null grid".to_string()),
        );
        if !lines.pass {
            report.add_reason("null-line preservation failed");
        }
    }

    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    Ok((report.to_json(), code))
}

pub fn cmd_factor(job: JobSpec) -> Result<(String, i32), UsageError> {
    if job.frame != Frame::Null {
        return Err(UsageError(
            "factor works on null-frame maps; pass --frame null with components in (u, v)"
                .to_string(),
        ));
    }
    let map = job.build_map()?;
    let bounds = job.bounds()?;
    let rect = rect_from_bounds(&bounds)?;
    let mut report = Report::new(job.clone());

    match factor_map(&map, &rect, job.tolerance) {
        Ok(pair) => {
            report.push_check("conformal_precheck", true, 0.0, None);
            report.push_check(
                "separability",
                true,
                0.0,
                Some(format!(
                    "branch={}, pattern={}",
                    branch_name(pair.branch()),
                    pattern_name(pair.pattern())
                )),
            );
            // reconstruction error on the verification grid
            let rebuilt = build_map_from_pair(&pair);
            let mut worst = 0.0f64;
            for (u, v) in rect.interior_grid(job.grid) {
                let a = map
                    .eval(&[u, v])
                    .map_err(|e| UsageError(format!("evaluation failed: {e}")))?;
                let b = rebuilt
                    .eval(&[u, v])
                    .map_err(|e| UsageError(format!("evaluation failed: {e}")))?;
                worst = worst.max((a[0] - b[0]).abs().max((a[1] - b[1]).abs()));
            }
            report.push_check("reconstruction", worst <= job.tolerance, worst, None);
            let tables = |expr, dom| {
                sample_table(expr, dom, job.grid)
                    .map_err(|e| UsageError(format!("evaluation failed: {e}")))
            };
            report.factorization = Some(FactorizationOut {
                branch: branch_name(pair.branch()).to_string(),
                pattern: pattern_name(pair.pattern()).to_string(),
                psi: tables(pair.psi(), pair.psi_domain())?,
                chi: tables(pair.chi(), pair.chi_domain())?,
                max_reconstruction_error: worst,
            });
        }
        Err(FactorError::NotConformal {
            point, residual, ..
        }) => {
            report.push_check(
                "conformal_precheck",
                false,
                residual,
                Some(format!("not conformal at {point:?}")),
            );
            report.add_reason("map is not conformal on the rectangle");
        }
        Err(FactorError::NotSeparable { detail }) => {
            report.push_check("conformal_precheck", true, 0.0, None);
            report.push_check("separability", false, 0.0, Some(detail));
            report.add_reason("map does not separate into (ψ, χ)");
        }
        Err(FactorError::Pair(e)) => {
            report.push_check("separability", false, 0.0, Some(e.to_string()));
            report.add_reason("recovered functions fail monotonicity validation");
        }
        Err(FactorError::Domain(e)) => {
            return Err(UsageError(format!("evaluation failed: {e}")));
        }
    }

    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    Ok((report.to_json(), code))
}

pub fn cmd_decompose(job: JobSpec) -> Result<(String, i32), UsageError> {
    let n = job.signature.n();
    let nu = job.signature.nu();
    if n != 2 || nu != 1 {
        return Err(UsageError(
            "decompose works in signature (2, 1)".to_string(),
        ));
    }
    if job.components.len() != 1 {
        return Err(UsageError(
            "decompose takes one component: X as an expression in (x, t)".to_string(),
        ));
    }
    let x_expr = parse(&job.components[0], &["x", "t"])
        .map_err(|e| UsageError(format!("component `{}`: {e}", job.components[0])))?;
    let bounds = job.bounds()?;
    let rect = rect_from_bounds(&bounds)?;
    let mut report = Report::new(job.clone());

    match dalembert_decompose(&x_expr, &rect, job.tolerance) {
        Ok(split) => {
            report.push_check("wave_equation", true, split.wave_residual, None);
            report.push_check(
                "reconstruction",
                split.reconstruction_error <= job.tolerance,
                split.reconstruction_error,
                None,
            );
            let f_table = sample_table(&split.f, (rect.a1, rect.a2), job.grid)
                .map_err(|e| UsageError(format!("evaluation failed: {e}")))?;
            let g_table = sample_table(&split.g, (rect.b1, rect.b2), job.grid)
                .map_err(|e| UsageError(format!("evaluation failed: {e}")))?;
            report.decomposition = Some(DecompositionOut {
                base: [split.base.0, split.base.1],
                f: f_table,
                g: g_table,
                reconstruction_error: split.reconstruction_error,
            });
        }
        Err(DecomposeError::NotWaveSolution { residual, at }) => {
            report.push_check(
                "wave_equation",
                false,
                residual,
                Some(format!("|ΔX| = {residual:e} at (u, v) = {at:?}")),
            );
            report.add_reason("X is not a wave-equation solution");
        }
        Err(DecomposeError::Domain(e)) => {
            return Err(UsageError(format!("evaluation failed: {e}")));
        }
    }

    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    Ok((report.to_json(), code))
}

pub fn cmd_fit(job: JobSpec) -> Result<(String, i32), UsageError> {
    let samples = job
        .samples
        .clone()
        .ok_or_else(|| UsageError("fit needs samples (job field or --samples FILE)".to_string()))?;
    let n = job.signature.n();
    for s in &samples {
        if s.x.len() != n || s.y.len() != n {
            return Err(UsageError(format!(
                "every sample must have {n} source and {n} target coordinates"
            )));
        }
    }
    let pairs: Vec<(Vec<f64>, Vec<f64>)> =
        samples.iter().map(|s| (s.x.clone(), s.y.clone())).collect();
    let mut report = Report::new(job.clone());

    match liouville_fit(&pairs, job.signature, job.tolerance) {
        Ok(model) => {
            report.push_check("affine_fit", true, model.fit_residual, None);
            report.push_check(
                "eta_orthogonality",
                true,
                model.orthogonality_residual,
                None,
            );
            report.fit = Some(FitOut {
                alpha: model.alpha,
                a: model.a.clone(),
                b: model.b.clone(),
                fit_residual: model.fit_residual,
                orthogonality_residual: model.orthogonality_residual,
            });
        }
        Err(FitError::InsufficientSamples { needed, got }) => {
            return Err(UsageError(format!(
                "need at least {needed} affinely independent samples, got {got}"
            )));
        }
        Err(FitError::NotAffine { residual }) => {
            report.push_check("affine_fit", false, residual, None);
            report.add_reason("samples are not affine");
        }
        Err(FitError::NotEtaOrthogonal { residual }) => {
            report.push_check("affine_fit", true, 0.0, None);
            report.push_check("eta_orthogonality", false, residual, None);
            report.add_reason("linear part is not η-orthogonal up to scale");
        }
    }

    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    Ok((report.to_json(), code))
}

pub fn cmd_grid(
    job: JobSpec,
    out: Option<std::path::PathBuf>,
) -> Result<(String, i32), UsageError> {
    if job.signature.n() != 2 {
        return Err(UsageError("grid rendering is 2D only".to_string()));
    }
    let map = job.build_map()?;
    let bounds = job.bounds()?;
    let draw_diamond = job.preset.as_deref() == Some("compactification");
    let doc = svg::render_grid(&map, &bounds, &job, draw_diamond);
    match out {
        Some(path) => {
            std::fs::write(&path, doc)
                .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
            Ok((String::new(), EXIT_PASS))
        }
        None => Ok((doc, EXIT_PASS)),
    }
}
