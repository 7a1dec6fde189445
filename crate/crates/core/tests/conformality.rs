//! Conformality verdict oracles: analytic factors, the counterexample
//! behaviour of the coordinate swap, Liouville fits of generated affine
//! conformal maps, and the CR classifier on classical holomorphic maps.

use confmap::conformal::{
    check_equivalence, classify_cr, conformality_at, liouville_fit, probe_suite, scaling_check,
    CRKind, DEFAULT_TOL,
};
use confmap::diffops::{Frame, SmoothMap};
use confmap::expr::{parse, ScalarExpr};
use confmap::linalg::Matrix;
use confmap::metric::Signature;
use confmap::minkowski2::{build_map_from_pair, compactification};
use confmap::sample::quasirandom;

fn mink2() -> Signature {
    Signature::new(2, 1).unwrap()
}

fn null_map(us: &str, vs: &str) -> SmoothMap {
    let vars = ["u", "v"];
    SmoothMap::new(
        mink2(),
        Frame::Null,
        vec![parse(us, &vars).unwrap(), parse(vs, &vars).unwrap()],
    )
    .unwrap()
}

#[test]
fn compactification_factor_at_origin_is_analytic() {
    let f = build_map_from_pair(&compactification());
    let v = conformality_at(&f, &[0.0, 0.0], DEFAULT_TOL).unwrap();
    assert!(v.conformal);
    // λ = ψ′(0)·χ′(0) = (2/π)² ≈ 0.4052847346
    let expected = (2.0 / std::f64::consts::PI).powi(2);
    assert!((v.factor - expected).abs() < 1e-15);
    assert!((v.factor - 0.4052847345693511).abs() < 1e-10);
}

#[test]
fn conformal_factor_matches_derivative_product_off_origin() {
    let f = null_map("u^3 + u", "tanh(v)");
    for p in quasirandom(&[(-0.9, 0.9), (-0.9, 0.9)], 40) {
        let v = conformality_at(&f, &p, DEFAULT_TOL).unwrap();
        assert!(v.conformal, "not conformal at {p:?}");
        let lam = (3.0 * p[0] * p[0] + 1.0) * (1.0 - p[1].tanh().powi(2));
        assert!((v.factor - lam).abs() <= 1e-12 * lam.abs());
    }
}

#[test]
fn probe_suite_agrees_with_jacobian_verdict_on_null_pair() {
    let f = null_map("u^3 + u", "tanh(v)");
    let samples = quasirandom(&[(-1.0, 1.0), (-1.0, 1.0)], 25);
    let report = probe_suite(&f, &samples, DEFAULT_TOL).unwrap();
    assert!(report.suite_pass, "max residual {}", report.max_residual);
    assert!(report.gradient_condition);
    for p in &samples {
        assert!(conformality_at(&f, p, DEFAULT_TOL).unwrap().conformal);
    }
}

#[test]
fn two_path_agreement_three_ways() {
    let samples = quasirandom(&[(-1.0, 1.0), (-1.0, 1.0)], 30);

    // compactification: both paths say conformal
    let f = build_map_from_pair(&compactification());
    let rep = check_equivalence(&f, &samples, DEFAULT_TOL).unwrap();
    assert!(rep.probe_path_pass && rep.jacobian_path_pass && rep.agree);

    // swap: probe path fails only through the gradient condition, the
    // Jacobian path through λ < 0; they agree on "not conformal"
    let vars = ["x", "t"];
    let swap = SmoothMap::new(
        mink2(),
        Frame::Cartesian,
        vec![parse("t", &vars).unwrap(), parse("x", &vars).unwrap()],
    )
    .unwrap();
    let rep = check_equivalence(&swap, &samples, DEFAULT_TOL).unwrap();
    assert!(rep.probe.suite_pass);
    assert!(!rep.probe.gradient_condition);
    assert!(!rep.probe_path_pass);
    assert!(!rep.jacobian_path_pass);
    assert!(rep.agree);
    let v = conformality_at(&swap, &samples[0], DEFAULT_TOL).unwrap();
    assert!(v.anti_signature && v.factor < 0.0);

    // shear: both paths say no, and the product probe is what catches it
    let shear = null_map("u + v", "v");
    let rep = check_equivalence(&shear, &samples, DEFAULT_TOL).unwrap();
    assert!(!rep.probe_path_pass && !rep.jacobian_path_pass && rep.agree);
    assert!(!rep.probe.suite_pass);
    let product_probe = rep
        .probe
        .probes
        .iter()
        .find(|r| r.probe == "y1*y2")
        .unwrap();
    assert!(product_probe.max_residual > 1.0);
}

#[test]
fn block_swap_in_r4_2_reproduces_the_counterexample() {
    // (x1, x2, x3, x4) ↦ (x3, x4, x1, x2) in ℝ⁴₂: every probe passes, the
    // gradient condition fails, and the Jacobian verdict is λ = −1.
    let sig = Signature::new(4, 2).unwrap();
    let vars = ["x1", "x2", "x3", "x4"];
    let f = SmoothMap::new(
        sig,
        Frame::Cartesian,
        ["x3", "x4", "x1", "x2"]
            .iter()
            .map(|c| parse(c, &vars).unwrap())
            .collect(),
    )
    .unwrap();
    let samples = quasirandom(&[(-2.0, 2.0); 4], 20);
    let report = probe_suite(&f, &samples, 1e-12).unwrap();
    assert!(report.suite_pass);
    assert!(!report.gradient_condition);
    let v = conformality_at(&f, &samples[0], DEFAULT_TOL).unwrap();
    assert!(v.anti_signature);
    assert!((v.factor + 1.0).abs() < 1e-15);
}

/// Boost mixing spacelike coordinate `i` with timelike coordinate `j`.
fn boost(sig: Signature, i: usize, j: usize, rapidity: f64) -> Matrix {
    let mut b = Matrix::identity(sig.n());
    b[(i, i)] = rapidity.cosh();
    b[(j, j)] = rapidity.cosh();
    b[(i, j)] = rapidity.sinh();
    b[(j, i)] = rapidity.sinh();
    b
}

fn rotation(sig: Signature, i: usize, j: usize, angle: f64) -> Matrix {
    let mut r = Matrix::identity(sig.n());
    r[(i, i)] = angle.cos();
    r[(j, j)] = angle.cos();
    r[(i, j)] = -angle.sin();
    r[(j, i)] = angle.sin();
    r
}

#[test]
fn liouville_fit_recovers_scaled_boost() {
    // y = 2·B·x + (1, 0, 0) with B a boost of rapidity 0.5 in ℝ³₁.
    let sig = Signature::new(3, 1).unwrap();
    let b = boost(sig, 0, 2, 0.5);
    let m = b.scale(2.0);
    let shift = [1.0, 0.0, 0.0];
    let samples: Vec<(Vec<f64>, Vec<f64>)> = quasirandom(&[(-2.0, 2.0); 3], 16)
        .into_iter()
        .map(|x| {
            let mut y = m.mul_vec(&x);
            for (yc, s) in y.iter_mut().zip(&shift) {
                *yc += s;
            }
            (x, y)
        })
        .collect();
    let model = liouville_fit(&samples, sig, 1e-8).unwrap();
    assert!((model.alpha - 2.0).abs() < 1e-8);
    assert!(model.a_matrix().sub(&b).max_abs() < 1e-8);
    for (got, want) in model.b.iter().zip(&shift) {
        assert!((got - want).abs() < 1e-8);
    }
    // AᵀηA = η holds by construction of the boost
    assert!(model.orthogonality_residual < 1e-10);
}

#[test]
fn scaling_identity_for_affine_conformal_maps() {
    // α = 2, φ = y1² in ℝ³₁: Δ′φ = 2, so Δ(φ∘F) must be α²·2 = 8.
    let sig = Signature::new(3, 1).unwrap();
    let b = boost(sig, 1, 2, 0.8);
    let f = SmoothMap::affine(sig, &b.scale(2.0), &[0.3, -1.0, 0.5]);
    let yvars = ["y1", "y2", "y3"];
    let phi = parse("y1^2", &yvars).unwrap();
    let samples = quasirandom(&[(-1.0, 1.0); 3], 20);
    let rep = scaling_check(&f, 2.0, &phi, &samples, 1e-9).unwrap();
    assert!(rep.pass, "max deviation {}", rep.max_deviation);
    assert!(!rep.vacuous);
    // and the ratio is α² = 4 against the target-side Laplacian of 2
    let composed = confmap::diffops::compose(&phi, &f);
    let lap = confmap::diffops::laplacian(sig, &composed, &samples[0]).unwrap();
    assert!((lap / 2.0 - 4.0).abs() < 1e-9);

    // α = 1 isometry: ratio 1
    let iso = SmoothMap::affine(sig, &rotation(sig, 0, 1, 0.4), &[0.0; 3]);
    let rep = scaling_check(&iso, 1.0, &phi, &samples, 1e-9).unwrap();
    assert!(rep.pass && !rep.vacuous);
    let composed = confmap::diffops::compose(&phi, &iso);
    let lap = confmap::diffops::laplacian(sig, &composed, &samples[0]).unwrap();
    assert!((lap - 2.0).abs() < 1e-9);
}

#[test]
fn cr_classifies_the_classical_examples() {
    let sig = Signature::euclidean(2);
    let vars = ["x", "y"];
    let mk = |u: &str, v: &str| {
        SmoothMap::new(
            sig,
            Frame::Cartesian,
            vec![parse(u, &vars).unwrap(), parse(v, &vars).unwrap()],
        )
        .unwrap()
    };
    // sample away from the origin where z² and z³ have vanishing derivative
    let samples = quasirandom(&[(0.2, 1.4), (0.2, 1.4)], 100);

    let z2 = mk("x^2 - y^2", "2*x*y");
    let z3 = mk("x^3 - 3*x*y^2", "3*x^2*y - y^3");
    let ez = mk("exp(x)*cos(y)", "exp(x)*sin(y)");
    for f in [&z2, &z3, &ez] {
        let c = classify_cr(f, &samples, 1e-10).unwrap();
        assert_eq!(c.kind, CRKind::Holomorphic);
        assert!(c.residual <= 1e-10);
    }

    let z2_bar = mk("x^2 - y^2", "-2*x*y");
    let c = classify_cr(&z2_bar, &samples, 1e-10).unwrap();
    assert_eq!(c.kind, CRKind::AntiHolomorphic);

    let stretch = mk("2*x", "y");
    assert_eq!(
        classify_cr(&stretch, &samples, 1e-10).unwrap().kind,
        CRKind::Neither
    );
    let skew = mk("x + y", "y");
    assert_eq!(
        classify_cr(&skew, &samples, 1e-10).unwrap().kind,
        CRKind::Neither
    );
}

#[test]
fn cr_agrees_with_jacobian_verdict_on_the_plane() {
    let sig = Signature::euclidean(2);
    let vars = ["x", "y"];
    let samples = quasirandom(&[(0.2, 1.4), (0.2, 1.4)], 40);
    for (u, v) in [
        ("x^2 - y^2", "2*x*y"),
        ("x", "-y"),
        ("2*x", "y"),
        ("x + y", "y"),
        ("exp(x)*cos(y)", "exp(x)*sin(y)"),
    ] {
        let f = SmoothMap::new(
            sig,
            Frame::Cartesian,
            vec![parse(u, &vars).unwrap(), parse(v, &vars).unwrap()],
        )
        .unwrap();
        let kind = classify_cr(&f, &samples, 1e-10).unwrap().kind;
        let all_conformal = samples
            .iter()
            .all(|p| conformality_at(&f, p, DEFAULT_TOL).unwrap().conformal);
        // Holomorphic or anti-holomorphic ⇔ conformal with λ > 0 everywhere
        assert_eq!(kind != CRKind::Neither, all_conformal, "map ({u}, {v})");
    }
}

#[test]
fn inversion_on_a_subset_splits_the_two_paths_in_dimension_three() {
    // x ↦ x/|x|² on a box away from the origin is conformal pointwise
    // (λ = 1/|x|⁴), but its components are not harmonic:
    // Δ(x_j/|x|²) = −2·x_j/|x|⁴ in ℝ³. The probe path quantifies over
    // whole-space probes, so it rejects while the Jacobian path accepts;
    // the equivalence report records the disagreement, it is not an error.
    let sig = Signature::euclidean(3);
    let vars = ["x1", "x2", "x3"];
    let inv = SmoothMap::new(
        sig,
        Frame::Cartesian,
        (0..3)
            .map(|i| parse(&format!("{} / (x1^2 + x2^2 + x3^2)", vars[i]), &vars).unwrap())
            .collect(),
    )
    .unwrap();
    let samples = quasirandom(&[(0.5, 1.5), (0.5, 1.5), (0.5, 1.5)], 20);
    for p in &samples {
        let v = conformality_at(&inv, p, DEFAULT_TOL).unwrap();
        assert!(v.conformal, "inversion not conformal at {p:?}");
        let r2: f64 = p.iter().map(|c| c * c).sum();
        let lam = 1.0 / (r2 * r2);
        assert!((v.factor - lam).abs() <= 1e-10 * lam);
    }
    let rep = check_equivalence(&inv, &samples, DEFAULT_TOL).unwrap();
    assert!(rep.jacobian_path_pass);
    assert!(!rep.probe_path_pass);
    assert!(!rep.agree);
    // the linear probe y1 is already the culprit: Δ(y₁∘F) = −2x₁/|x|⁴
    let y1 = rep.probe.probes.iter().find(|r| r.probe == "y1").unwrap();
    let p = &samples[0];
    let r2: f64 = p.iter().map(|c| c * c).sum();
    assert!(y1.max_residual >= 2.0 * p[0].abs() / (r2 * r2) - 1e-9);

    // and the affine fit refuses it, which is the only Liouville-side
    // signal for subset inversions
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = samples
        .iter()
        .map(|x| (x.clone(), inv.eval(x).unwrap()))
        .collect();
    assert!(matches!(
        liouville_fit(&pairs, sig, 1e-8),
        Err(confmap::conformal::FitError::NotAffine { .. })
    ));
}

#[test]
fn verdict_depends_only_on_the_jet_at_the_point() {
    // Two maps agreeing to first order at p get identical verdicts there:
    // identity versus identity plus terms vanishing quadratically at p.
    let p = [0.4, -0.7];
    let vars = ["x", "t"];
    let id = SmoothMap::identity(mink2());
    let perturbed = SmoothMap::new(
        mink2(),
        Frame::Cartesian,
        vec![
            parse("x + (x - 0.4)^2 * (t + 0.7)", &vars).unwrap(),
            parse("t + 3*(t + 0.7)^2", &vars).unwrap(),
        ],
    )
    .unwrap();
    let a = conformality_at(&id, &p, DEFAULT_TOL).unwrap();
    let b = conformality_at(&perturbed, &p, DEFAULT_TOL).unwrap();
    assert_eq!(a.conformal, b.conformal);
    assert_eq!(a.factor, b.factor);
    assert_eq!(a.residual, b.residual);
    // away from p the perturbed map is a different (non-conformal) animal
    let c = conformality_at(&perturbed, &[0.9, 0.0], DEFAULT_TOL).unwrap();
    assert!(!c.conformal);
}

#[test]
fn rescaling_a_conformal_map_scales_the_factor_quadratically() {
    let f = null_map("u^3 + u", "tanh(v)");
    let samples = quasirandom(&[(-0.9, 0.9), (-0.9, 0.9)], 15);
    for c in [0.5, 2.0, -3.0] {
        let vars = ["u", "v"];
        let scaled_comps: Vec<ScalarExpr> = f
            .comps()
            .iter()
            .map(|e| ScalarExpr::constant(c, &vars) * e.clone())
            .collect();
        let cf = SmoothMap::new(mink2(), Frame::Null, scaled_comps).unwrap();
        for p in &samples {
            let v0 = conformality_at(&f, p, DEFAULT_TOL).unwrap();
            let v1 = conformality_at(&cf, p, DEFAULT_TOL).unwrap();
            assert!(v1.conformal);
            let expect = c * c * v0.factor;
            assert!((v1.factor - expect).abs() <= 1e-12 * expect.abs());
        }
    }
}
