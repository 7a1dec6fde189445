//! Acceptance suite. Each test is one criterion, prints its own
//! `[acceptance] criterion N ... PASS` line and pins every tolerance in
//! code. Run with `cargo test -p confmap-cli --test acceptance`.

use std::process::Command;

use confmap::conformal::{
    classify_cr, conformality_at, liouville_fit, probe_suite, scaling_check, CRKind, DEFAULT_TOL,
};
use confmap::diffops::{Frame, SmoothMap};
use confmap::expr::{parse, ScalarExpr};
use confmap::linalg::Matrix;
use confmap::metric::Signature;
use confmap::minkowski2::{
    build_map_from_pair, compactification, dalembert_decompose, factor_map, from_null, to_null,
    Branch, DecomposeError, MonotonePair, NullRectangle, Pattern,
};
use confmap::sample::{grid, quasirandom};

/// splitmix64; all "random" draws in this suite are deterministic.
struct Rng(u64);

impl Rng {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

fn mink2() -> Signature {
    Signature::new(2, 1).unwrap()
}

fn cart_map(sig: Signature, vars: &[&str], comps: &[&str]) -> SmoothMap {
    SmoothMap::new(
        sig,
        Frame::Cartesian,
        comps.iter().map(|c| parse(c, vars).unwrap()).collect(),
    )
    .unwrap()
}

/// Criterion 1: compactification: conformal on a 33×33 grid over
/// (x, t) ∈ (−50, 50)² with residual ≤ 1e−9, and 10⁴ quasi-random points
/// with |x|, |t| ≤ 1e8 land strictly inside the diamond.
#[test]
fn acceptance_c1_compactification() {
    let null_map = build_map_from_pair(&compactification());
    let cart = null_map.to_cartesian();
    for p in grid(&[(-50.0, 50.0), (-50.0, 50.0)], 33, 0.01) {
        let v = conformality_at(&cart, &p, 1e-9).unwrap();
        assert!(v.conformal, "not conformal at {p:?}");
        assert!(v.residual <= 1e-9, "residual {} at {:?}", v.residual, p);
    }
    let mut checked = 0;
    for p in quasirandom(&[(-1e8, 1e8), (-1e8, 1e8)], 10_000) {
        let (u, v) = to_null((p[0], p[1]));
        let img = null_map.eval(&[u, v]).unwrap();
        let (x, t) = from_null((img[0], img[1]));
        assert!(
            x.abs() + t.abs() < 1.0,
            "image escaped the diamond at {p:?}"
        );
        checked += 1;
    }
    assert_eq!(checked, 10_000);
    println!("[acceptance] criterion 1 (compactification conformal + diamond containment): PASS");
}

/// Criterion 2: the swap counterexample: full probe suite passes at
/// 1e−12 yet the map is rejected through the gradient condition and the
/// anti-signature Jacobian verdict; same for the ℝ⁴₂ block swap.
#[test]
fn acceptance_c2_counterexample_discrimination() {
    // (x, t) ↦ (t, x) in ℝ²₁
    let swap = cart_map(mink2(), &["x", "t"], &["t", "x"]);
    let samples = quasirandom(&[(-3.0, 3.0), (-3.0, 3.0)], 50);
    let report = probe_suite(&swap, &samples, 1e-12).unwrap();
    assert!(report.suite_pass, "probe residual {}", report.max_residual);
    assert!(report.probes.iter().all(|r| r.max_residual <= 1e-12));
    assert!(!report.gradient_condition);
    for p in &samples {
        let v = conformality_at(&swap, p, DEFAULT_TOL).unwrap();
        assert!(v.anti_signature && !v.conformal);
    }

    // (x1, x2, x3, x4) ↦ (x3, x4, x1, x2) in ℝ⁴₂
    let sig42 = Signature::new(4, 2).unwrap();
    let block_swap = cart_map(sig42, &["x1", "x2", "x3", "x4"], &["x3", "x4", "x1", "x2"]);
    let samples4 = quasirandom(&[(-3.0, 3.0); 4], 30);
    let report = probe_suite(&block_swap, &samples4, 1e-12).unwrap();
    assert!(report.suite_pass);
    assert!(report.probes.iter().all(|r| r.max_residual <= 1e-12));
    assert!(!report.gradient_condition);
    for p in &samples4 {
        let v = conformality_at(&block_swap, p, DEFAULT_TOL).unwrap();
        assert!(v.anti_signature && !v.conformal);
    }
    println!("[acceptance] criterion 2 (swap counterexample discrimination, ℝ²₁ and ℝ⁴₂): PASS");
}

/// One increasing diffeomorphism from the polynomial / tanh / atan / exp
/// families.
fn increasing_fn(rng: &mut Rng, family: usize) -> ScalarExpr {
    let a = rng.in_range(0.3, 2.0);
    let b = rng.in_range(0.3, 1.5);
    let c = rng.in_range(-0.5, 0.5);
    let src = match family % 4 {
        0 => format!("{a}*s^3 + {b}*s + {c}"),
        1 => format!("{a}*tanh({b}*s) + 0.2*s + {c}"),
        2 => format!("{a}*atan({b}*s) + 0.2*s + {c}"),
        _ => format!("{a}*exp({b}*s) + 0.2*s + {c}"),
    };
    parse(&src, &["s"]).unwrap()
}

/// The randomized 20-map family: all four function families, both
/// branches, both monotonicity patterns.
fn pair_family() -> Vec<MonotonePair> {
    let mut rng = Rng(0xacce97ed);
    let dom = (-1.0, 1.0);
    (0..20)
        .map(|k| {
            let psi = increasing_fn(&mut rng, k);
            let chi = increasing_fn(&mut rng, k / 4 + 2);
            let branch = if k % 2 == 0 {
                Branch::Direct
            } else {
                Branch::Swapped
            };
            if (k / 2) % 2 == 0 {
                MonotonePair::new(psi, dom, chi, dom, branch).unwrap()
            } else {
                MonotonePair::new(-psi, dom, -chi, dom, branch).unwrap()
            }
        })
        .collect()
}

/// Criterion 3: two-path agreement over the 20-map family, with the
/// Jacobian factor matching ψ′χ′ within 1e−9 relative.
#[test]
fn acceptance_c3_two_path_agreement() {
    let family = pair_family();
    assert_eq!(family.len(), 20);
    assert!(family.iter().any(|p| p.branch() == Branch::Swapped));
    assert!(family
        .iter()
        .any(|p| p.pattern() == Pattern::BothDecreasing));
    let rect = NullRectangle::diamond();
    let mut samples: Vec<Vec<f64>> = rect
        .interior_grid(7)
        .into_iter()
        .map(|(u, v)| vec![u, v])
        .collect();
    samples.extend(quasirandom(&[(-0.95, 0.95), (-0.95, 0.95)], 16));

    for (k, pair) in family.iter().enumerate() {
        let f = build_map_from_pair(pair);
        let probes = probe_suite(&f, &samples, DEFAULT_TOL).unwrap();
        let probe_path = probes.suite_pass && probes.gradient_condition;
        let mut jacobian_path = true;
        for p in &samples {
            let v = conformality_at(&f, p, DEFAULT_TOL).unwrap();
            if !v.conformal {
                jacobian_path = false;
                continue;
            }
            let (pa, ca) = match pair.branch() {
                Branch::Direct => (p[0], p[1]),
                Branch::Swapped => (p[1], p[0]),
            };
            let lam = pair.psi().eval_jet(&[pa]).unwrap().grad[0]
                * pair.chi().eval_jet(&[ca]).unwrap().grad[0];
            assert!(
                (v.factor - lam).abs() <= 1e-9 * lam.abs(),
                "map {k}: λ = {} but ψ′χ′ = {}",
                v.factor,
                lam
            );
        }
        assert!(probe_path, "map {k}: probe path rejected a built map");
        assert!(jacobian_path, "map {k}: Jacobian path rejected a built map");
    }
    println!("[acceptance] criterion 3 (two-path agreement on 20 built maps): PASS");
}

/// Criterion 4: factorization round trip over the same family: branch
/// and pattern exact, functions recovered within 1e−9 pointwise.
#[test]
fn acceptance_c4_factorization_round_trip() {
    let rect = NullRectangle::diamond();
    for (k, pair) in pair_family().iter().enumerate() {
        let f = build_map_from_pair(pair);
        let got =
            factor_map(&f, &rect, 1e-9).unwrap_or_else(|e| panic!("factoring map {k} failed: {e}"));
        assert_eq!(got.branch(), pair.branch(), "map {k} branch");
        assert_eq!(got.pattern(), pair.pattern(), "map {k} pattern");
        for i in 0..65 {
            let s = -0.999 + 1.998 * i as f64 / 64.0;
            let dpsi =
                (got.psi().eval_value(&[s]).unwrap() - pair.psi().eval_value(&[s]).unwrap()).abs();
            let dchi =
                (got.chi().eval_value(&[s]).unwrap() - pair.chi().eval_value(&[s]).unwrap()).abs();
            assert!(dpsi <= 1e-9, "map {k}: ψ error {dpsi} at {s}");
            assert!(dchi <= 1e-9, "map {k}: χ error {dchi} at {s}");
        }
    }
    println!("[acceptance] criterion 4 (build/factor round trip on 20 maps): PASS");
}

/// Criterion 5: d'Alembert decomposition of 10 random wave solutions
/// with reconstruction ≤ 1e−9 on the 65×65 grid; x²·t is rejected.
#[test]
fn acceptance_c5_dalembert_decomposition() {
    let mut rng = Rng(0xda1e);
    let rect = NullRectangle::new(-2.0, 2.0, -2.0, 2.0).unwrap();
    let xt = ["x", "t"];
    let x = ScalarExpr::coordinate(0, &xt);
    let t = ScalarExpr::coordinate(1, &xt);
    for k in 0..10 {
        let f = increasing_fn(&mut rng, k);
        let g = increasing_fn(&mut rng, k + 1);
        // X = f(x + t) + g(x − t)
        let x_expr =
            f.substitute(&[x.clone() + t.clone()]) + g.substitute(&[x.clone() - t.clone()]);
        let split = dalembert_decompose(&x_expr, &rect, 1e-9)
            .unwrap_or_else(|e| panic!("solution {k} rejected: {e}"));
        assert!(
            split.reconstruction_error <= 1e-9,
            "solution {k}: reconstruction {}",
            split.reconstruction_error
        );
        // recovered f matches the input up to one shared constant
        let shift = split.f.eval_value(&[0.0]).unwrap() - f.eval_value(&[0.0]).unwrap();
        for i in 0..33 {
            let s = -1.9 + 3.8 * i as f64 / 32.0;
            let want = f.eval_value(&[s]).unwrap() + shift;
            let got = split.f.eval_value(&[s]).unwrap();
            assert!((want - got).abs() <= 1e-9, "solution {k} at {s}");
        }
    }
    let bad = parse("x^2 * t", &xt).unwrap();
    let err = dalembert_decompose(&bad, &rect, 1e-9).unwrap_err();
    assert!(matches!(err, DecomposeError::NotWaveSolution { .. }));
    println!("[acceptance] criterion 5 (d'Alembert reconstruction + rejection): PASS");
}

fn rotation(n: usize, i: usize, j: usize, angle: f64) -> Matrix {
    let mut r = Matrix::identity(n);
    r[(i, i)] = angle.cos();
    r[(j, j)] = angle.cos();
    r[(i, j)] = -angle.sin();
    r[(j, i)] = angle.sin();
    r
}

fn boost(n: usize, i: usize, j: usize, rapidity: f64) -> Matrix {
    let mut b = Matrix::identity(n);
    b[(i, i)] = rapidity.cosh();
    b[(j, j)] = rapidity.cosh();
    b[(i, j)] = rapidity.sinh();
    b[(j, i)] = rapidity.sinh();
    b
}

/// Criterion 6: Liouville fit of 10 random (α, A, b) triples in ℝ³₁ and
/// ℝ⁴₂: α within 1e−8 relative, AᵀηA = η within 1e−8, and the α² scaling
/// identity within 1e−9 on a nonvacuous probe.
#[test]
fn acceptance_c6_liouville_fit_and_scaling() {
    let mut rng = Rng(0x11f1);
    for k in 0..10 {
        let sig = if k % 2 == 0 {
            Signature::new(3, 1).unwrap()
        } else {
            Signature::new(4, 2).unwrap()
        };
        let n = sig.n();
        let alpha = rng.in_range(0.5, 4.0);
        // η-orthogonal A: rotation (equal-sign plane) · boost (mixed plane)
        let mut a = rotation(n, 0, 1, rng.in_range(-1.0, 1.0));
        a = a.mul(&boost(n, 0, n - 1, rng.in_range(-1.0, 1.0)));
        if n == 4 {
            a = a.mul(&rotation(n, 2, 3, rng.in_range(-1.0, 1.0)));
            a = a.mul(&boost(n, 1, 2, rng.in_range(-0.8, 0.8)));
        }
        let eta = sig.eta_matrix();
        assert!(a.transpose().mul(&eta).mul(&a).sub(&eta).max_abs() < 1e-12);
        let b: Vec<f64> = (0..n).map(|_| rng.in_range(-2.0, 2.0)).collect();
        let m = a.scale(alpha);

        let samples: Vec<(Vec<f64>, Vec<f64>)> = quasirandom(&vec![(-2.0, 2.0); n], 4 * n)
            .into_iter()
            .map(|x| {
                let mut y = m.mul_vec(&x);
                for (yc, bc) in y.iter_mut().zip(&b) {
                    *yc += bc;
                }
                (x, y)
            })
            .collect();
        let model =
            liouville_fit(&samples, sig, 1e-8).unwrap_or_else(|e| panic!("fit {k} failed: {e}"));
        assert!(
            (model.alpha - alpha).abs() <= 1e-8 * alpha,
            "fit {k}: α = {} vs {}",
            model.alpha,
            alpha
        );
        assert!(model.orthogonality_residual <= 1e-8);
        let a_fit = model.a_matrix();
        let check = a_fit.transpose().mul(&eta).mul(&a_fit).sub(&eta).max_abs();
        assert!(check <= 1e-8, "fit {k}: AᵀηA residual {check}");

        // nonvacuous probe φ = y1² (Δ′φ = 2)
        let f = SmoothMap::affine(sig, &m, &b);
        let yvars: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
        let phi = ScalarExpr::coordinate(0, &yvars).powi(2);
        let pts = quasirandom(&vec![(-1.0, 1.0); n], 15);
        let rep = scaling_check(&f, model.alpha, &phi, &pts, 1e-9).unwrap();
        assert!(rep.pass, "fit {k}: scaling deviation {}", rep.max_deviation);
        assert!(!rep.vacuous);
    }
    println!("[acceptance] criterion 6 (Liouville fit + α² scaling, 10 triples): PASS");
}

/// Criterion 7: CR classification of the classical examples with
/// residuals ≤ 1e−10 at 100 samples.
#[test]
fn acceptance_c7_cr_classification() {
    let sig = Signature::euclidean(2);
    let vars = ["x", "y"];
    let samples = quasirandom(&[(0.2, 1.4), (0.2, 1.4)], 100);
    assert_eq!(samples.len(), 100);
    let holo = [
        ("x^2 - y^2", "2*x*y"),             // z²
        ("x^3 - 3*x*y^2", "3*x^2*y - y^3"), // z³
        ("exp(x)*cos(y)", "exp(x)*sin(y)"), // exp(z)
    ];
    for (u, v) in holo {
        let f = cart_map(sig, &vars, &[u, v]);
        let c = classify_cr(&f, &samples, 1e-10).unwrap();
        assert_eq!(c.kind, CRKind::Holomorphic, "({u}, {v})");
        assert!(c.residual <= 1e-10);
        // conjugate: (u, −v)
        let neg_v = format!("-({v})");
        let fc = cart_map(sig, &vars, &[u, &neg_v]);
        let c = classify_cr(&fc, &samples, 1e-10).unwrap();
        assert_eq!(c.kind, CRKind::AntiHolomorphic, "conj ({u}, {v})");
        assert!(c.residual <= 1e-10);
    }
    for (u, v) in [("2*x", "y"), ("x + y", "y")] {
        let f = cart_map(sig, &vars, &[u, v]);
        let c = classify_cr(&f, &samples, 1e-10).unwrap();
        assert_eq!(c.kind, CRKind::Neither, "({u}, {v})");
    }
    println!("[acceptance] criterion 7 (CR classification of classical examples): PASS");
}

/// Criterion 8: rectangle equivalence D_M → (1,3)×(0,4): exact corners,
/// conformal at criterion-1 tolerance, and inverse composition is the
/// identity within 1e−12.
#[test]
fn acceptance_c8_rectangle_equivalence() {
    use confmap::minkowski2::rectangle_equivalence;
    let src = NullRectangle::diamond();
    let dst = NullRectangle::new(1.0, 3.0, 0.0, 4.0).unwrap();
    let pair = rectangle_equivalence(&src, &dst);
    // corner limits map to corner limits exactly
    assert_eq!(pair.psi().eval_value(&[-1.0]).unwrap(), 1.0);
    assert_eq!(pair.psi().eval_value(&[1.0]).unwrap(), 3.0);
    assert_eq!(pair.chi().eval_value(&[-1.0]).unwrap(), 0.0);
    assert_eq!(pair.chi().eval_value(&[1.0]).unwrap(), 4.0);

    let fwd = build_map_from_pair(&pair);
    for (u, v) in src.interior_grid(33) {
        let verdict = conformality_at(&fwd, &[u, v], 1e-9).unwrap();
        assert!(verdict.conformal && verdict.residual <= 1e-9);
    }
    let bwd = build_map_from_pair(&rectangle_equivalence(&dst, &src));
    for (u, v) in src.interior_grid(17) {
        let mid = fwd.eval(&[u, v]).unwrap();
        let back = bwd.eval(&mid).unwrap();
        assert!((back[0] - u).abs() <= 1e-12);
        assert!((back[1] - v).abs() <= 1e-12);
    }
    println!("[acceptance] criterion 8 (rectangle equivalence D_M → (1,3)×(0,4)): PASS");
}

/// Criterion 9: CLI determinism: byte-identical reports across runs and
/// the documented exit codes and reason string.
#[test]
fn acceptance_c9_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_conf");
    let job = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/jobs/compactification.json"
    );
    let run = || {
        Command::new(bin)
            .args(["check", "--job", job])
            .output()
            .expect("conf runs")
    };
    let first = run();
    let second = run();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(second.status.code(), Some(0));
    assert!(!first.stdout.is_empty());
    assert_eq!(
        first.stdout, second.stdout,
        "report is not byte-deterministic"
    );

    let swap_job = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/jobs/swap.json");
    let out = Command::new(bin)
        .args(["check", "--job", swap_job])
        .output()
        .expect("conf runs");
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("anti-conformal (λ<0); gradient condition violated"),
        "missing documented reason string:\n{text}"
    );
    println!("[acceptance] criterion 9 (CLI determinism + exit codes): PASS");
}
