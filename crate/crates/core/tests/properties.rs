//! Randomized invariants.

use decaylab::construct::build_objective;
use decaylab::curves::{make_named_curve, CurveDocument, DecayCurve, NamedFamily};
use decaylab::flows::{run_gd, run_heavy_ball_scheme, Quadratic};
use decaylab::majorize::{parse_rational, SequencePair};
use decaylab::sqrtcompare::compare_sqrt_integrals;
use decaylab::verify::{self, BoundPoint, DecayReport, Verdict};
use num_rational::BigRational;
use proptest::prelude::*;

fn verdict() -> impl Strategy<Value = Verdict> {
    prop_oneof![Just(Verdict::Pass), Just(Verdict::Fail), Just(Verdict::Inconclusive)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_combination_is_a_semilattice(a in verdict(), b in verdict(), c in verdict()) {
        prop_assert_eq!(a.combine(b), b.combine(a));
        prop_assert_eq!(a.combine(b).combine(c), a.combine(b.combine(c)));
        prop_assert_eq!(a.combine(a), a);
        prop_assert_eq!(a.combine(Verdict::Pass), a);
        prop_assert_eq!(a.combine(Verdict::Fail), Verdict::Fail);
    }

    #[test]
    fn bound_report_margin(pts in prop::collection::vec((0.0f64..10.0, -5.0f64..5.0, -5.0f64..5.0), 1..40)) {
        let series: Vec<BoundPoint> = pts.iter().map(|&(t, lhs, rhs)| BoundPoint { t, lhs, rhs }).collect();
        let r = DecayReport::bound("x", series.clone(), 0.0);
        let min = series.iter().map(|p| p.rhs - p.lhs).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(r.worst_margin, min);
        prop_assert_eq!(r.passed(), min >= 0.0);
    }

    #[test]
    fn rational_parsing_matches_fractions(p in -10_000i64..10_000, q in 1i64..10_000) {
        let expected = BigRational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&format!("{p}/{q}")).unwrap(), expected);
        // Decimal with three places.
        let text = format!("{}{}.{:03}", if p < 0 { "-" } else { "" }, p.abs() / 1000, p.abs() % 1000);
        prop_assert_eq!(parse_rational(&text).unwrap(), BigRational::new(p.into(), 1000.into()));
    }

    #[test]
    fn float_pairs_are_exact(a in prop::collection::vec(0.0f64..100.0, 1..8)) {
        let mut a = a;
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let pair = SequencePair::from_f64(&a, &a).unwrap();
        for (x, q) in a.iter().zip(pair.a()) {
            prop_assert_eq!(BigRational::from_float(*x).unwrap(), q.clone());
        }
    }

    #[test]
    fn named_documents_round_trip(rate in 0.01f64..10.0, power in 0.1f64..4.0, alpha in 1.01f64..3.0) {
        for f in [
            NamedFamily::Exponential { rate },
            NamedFamily::ShiftedPower { power },
            NamedFamily::Power { power },
            NamedFamily::PowerLog { alpha },
        ] {
            let g = make_named_curve(f).unwrap();
            let doc: CurveDocument = serde_json::from_str(&serde_json::to_string(&g.to_document()).unwrap()).unwrap();
            prop_assert_eq!(DecayCurve::from_document(&doc).unwrap(), g);
            let back = NamedFamily::from_params(f.name(), &f.params()).unwrap();
            prop_assert_eq!(back, f);
        }
    }

    #[test]
    fn gd_bound_on_random_quadratics(
        diag in prop::collection::vec(0.01f64..4.0, 1..5),
        frac in 0.05f64..0.95,
        x0 in prop::collection::vec(-3.0f64..3.0, 5),
    ) {
        let l = diag.iter().cloned().fold(0.0, f64::max);
        let eta = frac * 2.0 / l;
        let x0 = &x0[..diag.len()];
        let tr = run_gd(&Quadratic::new(diag.clone()), x0, eta, 50, Some(l)).unwrap();
        let r = verify::gd_sum_bound(&tr, eta, l, 1e-3).unwrap();
        prop_assert!(r.sum.passed());
        prop_assert!(r.descent.passed());
        // f(x_n) non-increasing
        prop_assert!(tr.samples.windows(2).all(|w| w[1].f <= w[0].f + 1e-15));
    }

    #[test]
    fn sqrt_sums_follow_domination(slow in 0.1f64..2.0, extra in 0.0f64..3.0, cells in 1usize..40) {
        // e^{-(slow+extra)t} ≤ e^{-slow t}; a large tail G(T) can break the
        // monotonicity the discrete statement needs.
        let lower = make_named_curve(NamedFamily::Exponential { rate: slow + extra }).unwrap();
        let upper = make_named_curve(NamedFamily::Exponential { rate: slow }).unwrap();
        let r = compare_sqrt_integrals(&lower, &upper, 5.0, cells).unwrap();
        prop_assert!(!r.hypotheses || r.holds(), "Σ√a = {}, Σ√b = {}", r.sum_sqrt_a, r.sum_sqrt_b);
        prop_assert_eq!(r.verdict() == Verdict::Fail, false);
        let total_a: f64 = r.a.iter().sum();
        prop_assert!((total_a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn long_spans_meet_the_hypotheses(rate in 0.5f64..2.0, extra in 0.0f64..2.0, cells in 1usize..11) {
        // With T = 40/rate and h·rate ≥ 4 each tail g(T) sits below the last
        // increment g(T)(e^{rate·h} - 1), so both sequences decrease.
        let lower = make_named_curve(NamedFamily::Exponential { rate: rate + extra }).unwrap();
        let upper = make_named_curve(NamedFamily::Exponential { rate }).unwrap();
        let t_span = 40.0 / rate;
        let r = compare_sqrt_integrals(&lower, &upper, t_span, cells).unwrap();
        prop_assert!(r.hypotheses);
        prop_assert!(r.holds());
        prop_assert!(r.certificate.is_some());
        prop_assert_eq!(r.verdict(), Verdict::Pass);
    }

    #[test]
    fn heavy_ball_scheme_on_quadratics_stays_bounded(mu in 0.01f64..10.0, alpha in 3.0f64..12.0) {
        // With h = 0.01 and μh < 1 the scheme is stable; |x_n| never exceeds the start.
        let tr = run_heavy_ball_scheme(&Quadratic::scalar(mu), &[1.0], alpha, 0.01, 400).unwrap();
        prop_assert!(tr.samples.iter().all(|s| s.x[0].abs() <= 1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn realization_matches_exponentials(rate in 0.2f64..3.0) {
        // Oracle: for g = e^{-rt}, √(-g') = √r e^{-rt/2}, Ψ(t) = (2/√r) e^{-rt/2},
        // so φ(x) = r x²/4.
        let g = make_named_curve(NamedFamily::Exponential { rate }).unwrap();
        let grid: Vec<f64> = (0..=200).map(|i| 10.0 / rate * i as f64 / 200.0).collect();
        let obj = build_objective(&g, &grid).unwrap();
        prop_assert!((obj.x_right() - 2.0 / rate.sqrt()).abs() < 1e-9 * obj.x_right());
        for k in 1..=50 {
            let x = obj.x_right() * k as f64 / 50.0;
            let exact = rate * x * x / 4.0;
            prop_assert!((obj.value(x) - exact).abs() <= 1e-6 * exact, "x = {x}: {} vs {exact}", obj.value(x));
        }
    }
}
