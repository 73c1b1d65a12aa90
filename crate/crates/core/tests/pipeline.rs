//! End-to-end runs through curve, objective, dynamics and verification.

use decaylab::construct::{build_no_minimizer_objective, build_objective, ConvexObjective1D, ObjectiveDocument};
use decaylab::curves::{make_named_curve, CurveDocument, DecayCurve, NamedFamily};
use decaylab::flows::{integrate_gradient_flow, run_gd, FlowOptions, Objective, Quadratic, SampleSchedule};
use decaylab::verify::{self, ExcessWeight, Verdict};

fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

fn opts(dt: f64) -> FlowOptions {
    FlowOptions {
        rtol: 1e-10,
        atol: 1e-13,
        schedule: SampleSchedule::Uniform { dt },
    }
}

#[test]
fn shifted_cube_realized_and_verified() {
    // g(t) = (1+t)^-3, so ∫_0^∞ g = 1/2 and the Lyapunov bound is ½ x_0².
    let g = make_named_curve(NamedFamily::ShiftedPower { power: 3.0 }).unwrap();
    let obj = build_objective(&g, &uniform(0.0, 30.0, 600)).unwrap();
    let tr = integrate_gradient_flow(&obj, &[obj.x_right()], 30.0, &opts(0.01)).unwrap();
    for s in &tr.samples {
        let target = (1.0 + s.t).powi(-3);
        assert!((s.f - target).abs() <= 1e-5 * target, "t = {}: {} vs {target}", s.t, s.f);
    }
    let l = verify::lyapunov_gf(&tr, None, 1e-8).unwrap();
    assert!(l.lyapunov.passed() && l.rate.passed());
    let int = verify::excess_integral(&tr, ExcessWeight::One, 1e-8).unwrap();
    let total = int.series.last().unwrap().lhs;
    let closed = 0.5 * (1.0 - 31f64.powi(-2));
    // trapezoid error ≈ dt²/12 · |g'(0)| = 2.5e-5
    assert!((total - closed).abs() < 1e-4, "{total} vs {closed}");
    assert!(verify::self_contracting_check(&tr, 0.0).passed());
    let e = verify::energy_dissipation(&tr, 1e-8).unwrap();
    assert!(e.passed());
}

#[test]
fn objective_document_round_trip_preserves_values() {
    let g = make_named_curve(NamedFamily::Exponential { rate: 0.5 }).unwrap();
    let obj = build_objective(&g, &uniform(0.0, 20.0, 200)).unwrap();
    let json = serde_json::to_string(&obj.to_document()).unwrap();
    let doc: ObjectiveDocument = serde_json::from_str(&json).unwrap();
    let back = ConvexObjective1D::from_document(&doc).unwrap();
    for k in 0..=100 {
        let x = obj.x_right() * 1.2 * k as f64 / 100.0;
        assert_eq!(obj.eval(x), back.eval(x));
    }
    assert_eq!(obj.minimizer(), back.minimizer());
    assert_eq!(back, obj);
}

#[test]
fn curve_documents_round_trip() {
    let fams = [
        NamedFamily::Exponential { rate: 2.0 },
        NamedFamily::InverseSquare,
        NamedFamily::Power { power: 1.5 },
        NamedFamily::PowerLog { alpha: 1.5 },
    ];
    for f in fams {
        let g = make_named_curve(f).unwrap();
        let json = serde_json::to_string(&g.to_document()).unwrap();
        let doc: CurveDocument = serde_json::from_str(&json).unwrap();
        let back = DecayCurve::from_document(&doc).unwrap();
        assert_eq!(back, g, "{}", f.name());
    }
    let table = DecayCurve::piecewise_linear(vec![0.0, 1.0, 3.0], vec![2.0, 1.0, 0.0]).unwrap();
    let doc: CurveDocument = serde_json::from_str(&serde_json::to_string(&table.to_document()).unwrap()).unwrap();
    let back = DecayCurve::from_document(&doc).unwrap();
    for t in [0.0, 0.5, 2.0, 3.0, 4.0] {
        assert_eq!(back.eval(t), table.eval(t));
    }
}

#[test]
fn no_minimizer_flow_follows_the_curve() {
    let g = make_named_curve(NamedFamily::ShiftedPower { power: 1.0 }).unwrap();
    let obj = build_no_minimizer_objective(&g, &uniform(0.0, 50.0, 1000)).unwrap();
    assert!(obj.minimizer().is_none());
    let tr = integrate_gradient_flow(&obj, &[obj.knots()[0].x], 40.0, &opts(0.5)).unwrap();
    for s in &tr.samples {
        let target = 1.0 / (1.0 + s.t);
        assert!((s.f - target).abs() <= 1e-4 * target, "t = {}", s.t);
    }
    // With no minimizer the distance-based checks have nothing to compare to.
    assert!(matches!(verify::lyapunov_gf(&tr, None, 1e-8), Err(verify::VerifyError::MissingMinimizer)));
}

#[test]
fn gd_geometric_sum_oracle() {
    // On μx²/2 from 1 the iterates are (1 - ημ)^n, so
    // η Σ_{n≤N} f(x_n) = ημ/2 · (1 - q^{N+1})/(1 - q) with q = (1 - ημ)².
    for (mu, eta) in [(1.0, 0.5), (2.0, 0.3), (0.5, 1.9)] {
        let n = 40;
        let tr = run_gd(&Quadratic::scalar(mu), &[1.0], eta, n, Some(mu)).unwrap();
        let q: f64 = (1.0 - eta * mu) * (1.0 - eta * mu);
        let oracle = eta * mu / 2.0 * (1.0 - q.powi(n as i32 + 1)) / (1.0 - q);
        let r = verify::gd_sum_bound(&tr, eta, mu, 1e-3).unwrap();
        let sum = r.sum.series.last().unwrap().lhs;
        assert!((sum - oracle).abs() <= 1e-13 * oracle.max(1.0), "mu {mu} eta {eta}: {sum} vs {oracle}");
        assert!(r.sum.passed() && r.descent.passed());
    }
    // η above 2/L is rejected before any work.
    assert!(run_gd(&Quadratic::scalar(1.0), &[1.0], 2.5, 10, Some(1.0)).is_err());
}

#[test]
fn mismatched_eta_is_reported() {
    let tr = run_gd(&Quadratic::scalar(1.0), &[1.0], 0.5, 10, Some(1.0)).unwrap();
    assert!(matches!(
        verify::gd_sum_bound(&tr, 0.25, 1.0, 1e-3),
        Err(verify::VerifyError::ParameterMismatch(_))
    ));
}

#[test]
fn anisotropic_flow_lyapunov() {
    let q = Quadratic::new(vec![1.0, 1e-2, 1e-4]);
    let tr = integrate_gradient_flow(&q, &[1.0, 1.0, 1.0], 100.0, &opts(0.25)).unwrap();
    // Closed form: f(t) = ½ Σ μ_i e^{-2μ_i t}.
    for s in tr.samples.iter().step_by(40) {
        let exact: f64 = q.diag.iter().map(|m| 0.5 * m * (-2.0 * m * s.t).exp()).sum();
        assert!((s.f - exact).abs() <= 1e-8 * exact, "t = {}", s.t);
    }
    let l = verify::lyapunov_gf(&tr, None, 1e-8).unwrap();
    assert_eq!(l.lyapunov.verdict, Verdict::Pass);
    assert_eq!(q.minimizer(), Some(vec![0.0; 3]));
}
