//! The acceptance experiments, shared by the `acceptance` test target and the
//! `verify-all` subcommand.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{build_heavy_ball_objective, build_objective};
use crate::curves::{make_named_curve, make_staircase, NamedFamily, RateFunction, StaircaseSpec, StaircaseVariant};
use crate::flows::{
    integrate_gradient_flow, integrate_heavy_ball_ode, run_gd, run_heavy_ball_scheme, run_sgd, FlowError,
    FlowOptions, Friction, Monomial, NoiseModel, OscillatorSpec, Quadratic, SampleSchedule, SgdConfig,
    Trajectory,
};
use crate::majorize::{self, AveragingMap, SequencePair};
use crate::spectral;
use crate::sqrtcompare::{self, FuzzParams};
use crate::verify::{self, ExcessWeight, SgdCheck, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    #[default]
    Default,
    /// Tighter integrator tolerances; criteria thresholds are unchanged.
    Strict,
}

impl ToleranceProfile {
    pub fn flow_options(self, schedule: SampleSchedule) -> FlowOptions {
        let (rtol, atol) = match self {
            ToleranceProfile::Default => (1e-10, 1e-13),
            ToleranceProfile::Strict => (1e-12, 1e-15),
        };
        FlowOptions { rtol, atol, schedule }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub profile: ToleranceProfile,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            profile: ToleranceProfile::Default,
        }
    }
}

/// Verdict of one experiment and the measurements behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            verdict: Verdict::Pass,
            details: Vec::new(),
        }
    }

    /// Records a measurement and fails the outcome unless `ok`.
    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.verdict = self.verdict.combine(Verdict::Fail);
        }
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, detail: String) {
        self.details.push(format!("     {detail}"));
    }

    fn error(err: impl std::fmt::Display) -> Self {
        Outcome {
            verdict: Verdict::Fail,
            details: vec![format!("FAIL error: {err}")],
        }
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub budget: Duration,
    run: fn(&SuiteOptions) -> Outcome,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub verdict: Verdict,
    pub details: Vec<String>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Criterion {
    /// Runs the experiment; exceeding the time budget is a failure.
    pub fn run(&self, opts: &SuiteOptions) -> CriterionResult {
        let start = Instant::now();
        let mut out = (self.run)(opts);
        let elapsed = start.elapsed();
        out.check(
            elapsed <= self.budget,
            format!("runtime {:.2} s within budget {:.0} s", elapsed.as_secs_f64(), self.budget.as_secs_f64()),
        );
        CriterionResult {
            id: self.id,
            title: self.title,
            verdict: out.verdict,
            details: out.details,
            elapsed,
            budget: self.budget,
        }
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: "realization", title: "1-D realization round trip for e^-t and (1+t)^-2", budget: secs(2), run: realization },
        Criterion { id: "integrability", title: "excess integrability on the x^4/64 flow", budget: secs(10), run: integrability },
        Criterion { id: "best_iterate", title: "best iterate in [t, t log t] on the x^4/64 flow", budget: secs(10), run: best_iterate },
        Criterion { id: "hilbert", title: "spectral slow-decay counterexample for t^-3/2", budget: secs(10), run: hilbert },
        Criterion { id: "gd", title: "gradient-descent summability on x^2/2", budget: secs(1), run: gd },
        Criterion { id: "sgd", title: "SGD with multiplicative noise, 10^4 replicas", budget: secs(30), run: sgd },
        Criterion { id: "heavy_ball", title: "heavy-ball weighted integrability and Lyapunov function", budget: secs(30), run: heavy_ball },
        Criterion { id: "fig1", title: "Nesterov oscillator panels, h = 0.003", budget: secs(120), run: fig1 },
        Criterion { id: "hb_no_minimizer", title: "heavy ball on an objective without minimizer", budget: secs(10), run: hb_no_minimizer },
        Criterion { id: "majorization", title: "exact averaging maps for 10^4 dominated pairs", budget: secs(20), run: majorization },
        Criterion { id: "sqrt_comparison", title: "sqrt-integral comparison fuzz and g_alpha barrier", budget: secs(60), run: sqrt_comparison },
        Criterion { id: "staircases", title: "staircase decay curves with phi(t) = t, R_n = 4^n", budget: secs(5), run: staircases },
        Criterion { id: "self_contraction", title: "self-contraction separates gradient flow from heavy ball", budget: secs(10), run: self_contraction },
    ]
}

pub fn run_all(opts: &SuiteOptions) -> Vec<CriterionResult> {
    criteria().iter().map(|c| c.run(opts)).collect()
}

/// Fail if any failed, inconclusive if any was, pass otherwise.
pub fn overall(results: &[CriterionResult]) -> Verdict {
    results.iter().fold(Verdict::Pass, |acc, r| acc.combine(r.verdict))
}

fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

macro_rules! tryo {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Outcome::error(e),
        }
    };
}

// ---------------------------------------------------------------------------
// Gradient flow

/// Flows on the realized objectives of `e^{-t}` and `(1+t)^{-2}`, together
/// with the decay curve and the closed-form objective.
pub struct RealizationRun {
    pub name: &'static str,
    pub curve: crate::curves::DecayCurve,
    pub oracle: fn(f64) -> f64,
    pub x_right: f64,
    pub trajectory: Trajectory,
}

pub fn realization_runs(profile: ToleranceProfile) -> Result<Vec<RealizationRun>, String> {
    let cases: [(&'static str, NamedFamily, fn(f64) -> f64); 2] = [
        ("exp", NamedFamily::Exponential { rate: 1.0 }, |x| x * x / 4.0),
        ("inverse_square", NamedFamily::InverseSquare, |x| x.powi(4) / 64.0),
    ];
    cases
        .into_iter()
        .map(|(name, fam, oracle)| {
            let curve = make_named_curve(fam).map_err(|e| e.to_string())?;
            let obj = build_objective(&curve, &uniform(0.0, 20.0, 400)).map_err(|e| e.to_string())?;
            let opts = profile.flow_options(SampleSchedule::Uniform { dt: 0.05 });
            let trajectory = integrate_gradient_flow(&obj, &[obj.x_right()], 20.0, &opts).map_err(|e| e.to_string())?;
            Ok(RealizationRun {
                name,
                curve,
                oracle,
                x_right: obj.x_right(),
                trajectory,
            })
        })
        .collect()
}

fn realization(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let runs = tryo!(realization_runs(opts.profile));
    for run in &runs {
        let mut worst_g: f64 = 0.0;
        let mut worst_oracle: f64 = 0.0;
        for s in &run.trajectory.samples {
            let g = run.curve.eval(s.t);
            worst_g = worst_g.max((s.f - g).abs() / g);
            let phi = (run.oracle)(s.x[0]);
            if phi > 0.0 {
                worst_oracle = worst_oracle.max((s.f - phi).abs() / phi);
            }
        }
        out.check(worst_g <= 1e-5, format!("{}: max |f(x_t) - g(t)|/g(t) on [0, 20] = {worst_g:.3e} (≤ 1e-5)", run.name));
        out.check(
            worst_oracle <= 1e-5,
            format!("{}: max relative gap to the closed-form objective = {worst_oracle:.3e} (≤ 1e-5)", run.name),
        );
        out.note(format!("{}: x_0 = {:.15}", run.name, run.x_right));
    }
    out
}

fn quartic() -> Monomial {
    Monomial {
        coeff: 1.0 / 64.0,
        power: 4.0,
    }
}

/// Gradient flow of `x⁴/64` from `2√2`, whose excess is `(1+t)^{-2}`.
pub fn quartic_flow(t_end: f64, profile: ToleranceProfile) -> Result<Trajectory, FlowError> {
    let sched = SampleSchedule::Geometric {
        first: 1e-3,
        ratio: 1.01,
    };
    integrate_gradient_flow(&quartic(), &[2.0 * 2f64.sqrt()], t_end, &profile.flow_options(sched))
}

fn integrability(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let tr = tryo!(quartic_flow(1e3, opts.profile));
    let r = tryo!(verify::excess_integral(&tr, ExcessWeight::One, 0.0));
    let total = r.series.last().unwrap().lhs;
    out.check((total - 1.0).abs() <= 1e-3, format!("∫_0^1000 excess = {total:.6} (1 ± 1e-3)"));
    out.check(r.passed(), format!("running integral stays ≤ ‖x_0‖²/2 = 4, margin {:.4}", r.worst_margin));
    let last = tr.last();
    let prod = last.t * last.f;
    let closed = last.t / (1.0 + last.t).powi(2);
    out.check(prod <= 1.1e-2, format!("t·excess at t = 1000 is {prod:.6e} (≤ 1.1e-2)"));
    out.check(
        (prod - closed).abs() <= 1e-6 * closed,
        format!("t·excess matches t/(1+t)² = {closed:.6e} to {:.1e}", (prod - closed).abs() / closed),
    );
    let lyap = tryo!(verify::lyapunov_gf(&tr, None, 1e-8));
    out.check(lyap.lyapunov.passed(), "t·excess + ½‖x - x*‖² non-increasing".into());
    out
}

fn best_iterate(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let tr = tryo!(quartic_flow(7e3, opts.profile));
    for t in [10.0, 100.0, 1000.0] {
        let r = tryo!(verify::best_iterate_bound(&tr, t));
        let p = r.series[0];
        out.check(r.passed(), format!("t = {t}: min s·excess = {:.4e} ≤ {:.4e}", p.lhs, p.rhs));
    }
    out
}

fn hilbert(_: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let g = tryo!(make_named_curve(NamedFamily::Power { power: 1.5 }));
    let prof = tryo!(spectral::build_profile(&g, 1e4, spectral::DEFAULT_NODES_PER_DECADE));
    let bias = prof.truncation_bias();
    let times: Vec<f64> = (0..=40).map(|k| 10f64.powf(k as f64 / 20.0)).collect();
    let mut worst: f64 = f64::INFINITY;
    let mut worst_bias: f64 = 0.0;
    for &t in &times {
        let f = spectral::gf_energy(&prof, t);
        worst = worst.min(f - (g.eval(t) - bias));
        worst_bias = worst_bias.max(bias / g.eval(t));
    }
    out.check(worst >= 0.0, format!("F(u(t)) ≥ g(t) - bias on 41 points of [1, 100], margin {worst:.3e}"));
    out.check(worst_bias < 0.1, format!("bias e²g(S_max) = {bias:.3e}, at most {:.2}% of g(t)", 100.0 * worst_bias));
    for t in [10.0f64, 100.0] {
        let v = t * spectral::gf_energy(&prof, t);
        out.check(v >= 0.9 * t.powf(-0.5), format!("t·F(u(t)) at t = {t}: {v:.4e} ≥ 0.9 t^-1/2 = {:.4e}", 0.9 * t.powf(-0.5)));
    }
    out
}

// ---------------------------------------------------------------------------
// Discrete time

fn gd(_: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let tr = tryo!(run_gd(&Quadratic::scalar(1.0), &[1.0], 0.5, 60, Some(1.0)));
    let r = tryo!(verify::gd_sum_bound(&tr, 0.5, 1.0, 1e-6));
    let total = r.sum.series.last().unwrap();
    out.check((total.lhs - 1.0 / 3.0).abs() <= 1e-12, format!("η Σ_{{n≤60}} excess = {:.15} (1/3 ± 1e-12)", total.lhs));
    out.check(r.sum.passed() && (total.rhs - 2.0 / 3.0).abs() < 1e-15, format!("bound {:.15} respected", total.rhs));
    let last = tr.last();
    let prod = last.t * last.f;
    out.check(prod < 1e-6, format!("n·excess at n = 60 is {prod:.3e} (< 1e-6)"));
    out.check(r.descent.passed(), "descent lemma holds at every step".into());
    out.note(format!("n log n liminf report: {}", r.n_log_n.verdict));
    out
}

fn sgd(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let cfg = SgdConfig {
        eta: 0.5,
        sigma: 1.0,
        steps: 100,
        seed: opts.seed,
        noise: NoiseModel::Rademacher,
        replicas: 10_000,
        lipschitz: Some(1.0),
    };
    let reps = tryo!(run_sgd(&Quadratic::scalar(1.0), &[1.0], &cfg));
    let check = SgdCheck {
        eta: 0.5,
        lipschitz: 1.0,
        sigma: 1.0,
        eps: 1e-3,
        delta: 0.01,
    };
    let r = tryo!(verify::sgd_bounds(&reps, &check));
    let (mean, se) = (r.mean_sum_value, r.mean_sum_stderr);
    out.check(
        (mean - 1.0).abs() <= 3.0 * se,
        format!("mean Σ excess = {mean:.5} ± {se:.5}, oracle x_0² = 1 within 3 s.e."),
    );
    out.check(r.mean_sum.passed(), format!("expected-sum bound {:.4}", r.mean_sum.series[0].rhs));
    let frac = reps.iter().filter(|t| t.last().f <= 1e-3).count() as f64 / reps.len() as f64;
    out.check(frac >= 0.99, format!("{:.2}% of replicas have f(x_100) ≤ 1e-3 (≥ 99%)", 100.0 * frac));
    out.check(r.almost_sure.passed(), format!("tail proxy: {:.2}% exceed 1e-3 in the last tenth", 100.0 * r.almost_sure.series[0].lhs));
    out.note(format!("mean descent report: {}", r.mean_descent.verdict));
    out
}

// ---------------------------------------------------------------------------
// Heavy ball

/// Heavy-ball ODE on `x²/2` from `x_0 = 1` at rest.
pub fn heavy_ball_quadratic(alpha: f64, t_end: f64, profile: ToleranceProfile) -> Result<Trajectory, FlowError> {
    let opts = profile.flow_options(SampleSchedule::Uniform { dt: 0.01 });
    integrate_heavy_ball_ode(&Quadratic::scalar(1.0), &[1.0], Friction::Nesterov { alpha }, 1e-6, t_end, &opts)
}

fn heavy_ball(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let runs: Vec<_> = [5.0, 3.0]
        .par_iter()
        .map(|&a| (a, heavy_ball_quadratic(a, 1e3, opts.profile)))
        .collect();
    for (alpha, tr) in runs {
        let tr = tryo!(tr);
        if alpha == 5.0 {
            let r = tryo!(verify::excess_integral(&tr, ExcessWeight::T, 0.0));
            let total = r.series.last().unwrap();
            out.check(r.passed(), format!("α = 5: ∫ t·excess = {:.4} ≤ {:.4}", total.lhs, total.rhs));
        }
        let s0 = &tr.samples[0];
        let l0 = s0.t * s0.t * s0.f + 0.5 * ((alpha - 1.0) * s0.x[0]).powi(2);
        let r = tryo!(verify::hb_lyapunov(&tr, None, alpha, 1e-6 / l0));
        let rise = r.lyapunov.series.iter().map(|p| p.lhs - p.rhs).fold(f64::NEG_INFINITY, f64::max);
        out.check(r.lyapunov.passed(), format!("α = {alpha}: Lyapunov function non-increasing, largest step increase {rise:.2e} (≤ 1e-6)"));
        out.check(r.energy.passed(), format!("α = {alpha}: energy bound holds"));
    }
    out
}

pub const FIG1_STEP: f64 = 0.003;
pub const FIG1_ALPHAS: [f64; 2] = [3.0, 10.0];
pub const FIG1_MUS: [f64; 4] = [0.001, 0.1, 1.0, 10.0];

/// Common horizon of the panels for `mu`: the latest transition time among
/// `alphas` plus eight half periods.
pub fn fig1_horizon(mu: f64, alphas: &[f64]) -> f64 {
    let latest = alphas.iter().fold(0.0f64, |m, &a| m.max(a / (2.0 * mu.sqrt())));
    latest + 8.0 * std::f64::consts::PI / mu.sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig1Panel {
    pub alpha: f64,
    pub mu: f64,
    pub h: f64,
    pub t_transition: f64,
    pub trajectory: Trajectory,
}

pub fn fig1_panel(alpha: f64, mu: f64, h: f64, horizon: f64) -> Result<Fig1Panel, FlowError> {
    let spec = OscillatorSpec::new(mu, alpha, 1.0)?;
    if !(h > 0.0 && horizon > 0.0) {
        return Err(FlowError::Precondition("need h > 0 and a positive horizon".into()));
    }
    let steps = (horizon / h.sqrt()).ceil() as usize;
    let trajectory = run_heavy_ball_scheme(&Quadratic::scalar(mu), &[spec.x0], alpha, h, steps)?;
    Ok(Fig1Panel {
        alpha,
        mu,
        h,
        t_transition: spec.t_transition(),
        trajectory,
    })
}

/// One panel per `(α, μ)`, ordered by `μ` then `α`.
pub fn fig1_panels(h: f64, alphas: &[f64], mus: &[f64]) -> Result<Vec<Fig1Panel>, FlowError> {
    let grid: Vec<(f64, f64)> = mus
        .iter()
        .flat_map(|&mu| alphas.iter().map(move |&a| (a, mu)))
        .collect();
    grid.par_iter()
        .map(|&(a, mu)| fig1_panel(a, mu, h, fig1_horizon(mu, alphas)))
        .collect()
}

/// Zero crossings of the first coordinate, linearly interpolated.
pub fn sign_changes(tr: &Trajectory) -> Vec<f64> {
    tr.samples
        .windows(2)
        .filter(|w| w[0].x[0] != 0.0 && w[0].x[0].signum() != w[1].x[0].signum())
        .map(|w| {
            let (x0, x1) = (w[0].x[0], w[1].x[0]);
            w[0].t + (w[1].t - w[0].t) * x0 / (x0 - x1)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig1Check {
    pub early_crossings: usize,
    /// `min |x(t)|` on `(0, t_transition)`.
    pub min_overdamped: f64,
    pub floor: f64,
    pub late_crossings: usize,
    /// Spacing of the last two crossings.
    pub last_interval: Option<f64>,
    pub half_period: f64,
}

pub fn check_fig1_panel(panel: &Fig1Panel) -> Fig1Check {
    let tr = &panel.trajectory;
    let step = panel.h.sqrt();
    let crossings = sign_changes(tr);
    let x0 = tr.samples[0].x[0].abs();
    let min_overdamped = tr
        .samples
        .iter()
        .filter(|s| s.t > 0.0 && s.t < panel.t_transition)
        .map(|s| s.x[0].abs())
        .fold(f64::INFINITY, f64::min);
    let late: Vec<f64> = crossings.iter().copied().filter(|&t| t > panel.t_transition).collect();
    Fig1Check {
        early_crossings: crossings.iter().filter(|&&t| t < panel.t_transition - step).count(),
        min_overdamped,
        floor: (-panel.alpha / 4.0).exp() * x0 - 1e-3,
        late_crossings: late.len(),
        last_interval: (late.len() >= 2).then(|| late[late.len() - 1] - late[late.len() - 2]),
        half_period: std::f64::consts::PI / panel.mu.sqrt(),
    }
}

impl Fig1Check {
    pub fn passes(&self, mu: f64) -> bool {
        let interval_ok = self
            .last_interval
            .is_some_and(|d| (d - self.half_period).abs() <= 0.15 * self.half_period);
        self.early_crossings == 0
            && self.min_overdamped >= self.floor
            && (mu < 0.1 || self.late_crossings >= 3)
            && interval_ok
    }
}

fn fig1(_: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let panels = tryo!(fig1_panels(FIG1_STEP, &FIG1_ALPHAS, &FIG1_MUS));
    for p in &panels {
        let c = check_fig1_panel(p);
        out.check(
            c.passes(p.mu),
            format!(
                "α = {:>2}, μ = {:<5}: t_tr = {:8.3}, early crossings {}, min|x| before t_tr {:.4} ≥ {:.4}, late crossings {}, last interval {} vs π/√μ = {:.3}",
                p.alpha,
                p.mu,
                p.t_transition,
                c.early_crossings,
                c.min_overdamped,
                c.floor,
                c.late_crossings,
                c.last_interval.map_or("n/a".into(), |d| format!("{d:.3}")),
                c.half_period
            ),
        );
    }
    out
}

/// Heavy ball from rest at `0` on the rescaled objective of `1/(1+t)`.
pub fn hb_no_minimizer_run(alpha: f64, profile: ToleranceProfile) -> Result<(crate::construct::ConvexObjective1D, Trajectory), String> {
    let g = make_named_curve(NamedFamily::ShiftedPower { power: 1.0 }).map_err(|e| e.to_string())?;
    let obj = build_heavy_ball_objective(&g, &uniform(0.0, 200.0, 4000)).map_err(|e| e.to_string())?;
    let opts = profile.flow_options(SampleSchedule::Uniform { dt: 0.05 });
    let tr = integrate_heavy_ball_ode(&obj, &[0.0], Friction::Nesterov { alpha }, 1e-6, 100.0, &opts)
        .map_err(|e| e.to_string())?;
    Ok((obj, tr))
}

fn hb_no_minimizer(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let g = tryo!(make_named_curve(NamedFamily::ShiftedPower { power: 1.0 }));
    for alpha in [3.0, 1.0] {
        let (obj, tr) = tryo!(hb_no_minimizer_run(alpha, opts.profile));
        let r = tryo!(verify::hb_speed_bound(&tr, Some(&obj), (1.0, 100.0), 1e-6));
        out.check(
            r.speed.passed(),
            format!("α = {alpha}: max speed {:.6} ≤ √(2 f(x_0)) = {:.6}", r.speed.series.iter().map(|p| p.lhs).fold(0.0, f64::max), r.speed.series[0].rhs),
        );
        let lower = r.lower.unwrap();
        out.check(lower.passed(), format!("α = {alpha}: f(x(t)) ≥ f(√(2f(0)) t) - 1e-6 on [1, 100], margin {:.3e}", lower.worst_margin));
        let above_g = tr.samples.iter().filter(|s| s.t >= 1.0).all(|s| s.f >= g.eval(s.t));
        out.check(above_g, format!("α = {alpha}: f(x(t)) ≥ g(t) on [1, 100]"));
    }
    out
}

// ---------------------------------------------------------------------------
// Majorization and √-integrals

fn majorization(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let pair = tryo!(SequencePair::from_integers(&[3, 1, 0], &[2, 2, 0]));
    let map = tryo!(majorize::build_averaging_map(&pair));
    let half = num_rational::BigRational::new(1.into(), 2.into());
    out.check(
        map.len() == 2 && map.weight(&[0, 1, 2]) == half && map.weight(&[1, 0, 2]) == half,
        format!("(3,1,0) vs (2,2,0): {}", map.to_text().trim().replace('\n', "; ")),
    );
    struct Stats {
        ok: bool,
        nontrivial: bool,
        support: usize,
    }
    let stats: Vec<Stats> = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = crate::flows::replica_rng(opts.seed ^ 0x6d61_6a6f, k);
            let n = 1 + (k as usize % 8);
            let pair = majorize::gen::dominated_pair(&mut rng, n, 1 + (k as i64 % 5));
            let ok_map = |m: &AveragingMap| {
                m.total_weight() == num_rational::BigRational::from_integer(1.into())
                    && m.average(pair.a()).iter().zip(pair.b()).all(|(x, b)| b >= x)
                    && m.verify(&pair).is_ok()
            };
            match majorize::build_averaging_map(&pair) {
                Ok(m) => Stats {
                    ok: ok_map(&m),
                    nontrivial: pair.b()[0] < pair.a()[0],
                    support: m.len(),
                },
                Err(_) => Stats {
                    ok: false,
                    nontrivial: false,
                    support: 0,
                },
            }
        })
        .collect();
    let failures = stats.iter().filter(|s| !s.ok).count();
    out.check(failures == 0, format!("10^4 pairs with n ≤ 8: {failures} failures (Σα = 1 and all dominations exact)"));
    out.note(format!(
        "{} pairs needed transpositions; largest support {}",
        stats.iter().filter(|s| s.nontrivial).count(),
        stats.iter().map(|s| s.support).max().unwrap_or(0)
    ));
    out
}

fn sqrt_comparison(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let params = FuzzParams {
        trials: 10_000,
        max_cells: 64,
        seed: opts.seed,
        t_span: 1.0,
    };
    let r = sqrtcompare::fuzz_counterexample_search(&params, Some(f64::cbrt));
    out.check(r.violations == 0, format!("{} trials with N ≤ 64: {} violations of Σ√b ≥ Σ√a", r.trials, r.violations));
    out.note(format!(
        "{} certified exactly, {} non-trivial, cube-root violations {:?}",
        r.certified, r.nontrivial, r.concave_violations
    ));
    let b = tryo!(sqrtcompare::barrier_experiment(1.5, 1e3, 1e6, 20_000));
    out.check(
        b.growth() >= 0.2,
        format!("g_1.5: √-integral estimate {:.4} at T = 1e3, {:.4} at T = 1e6, growth {:.4} (≥ 0.2)", b.estimate_short, b.estimate_long, b.growth()),
    );
    out.check(
        b.integral_long <= b.integral_closed + 1e-3,
        format!("∫_2^1e6 g_1.5 = {:.6} ≤ closed form {:.6} + 1e-3", b.integral_long, b.integral_closed),
    );
    out
}

/// Integral of a piecewise-smooth function over consecutive pieces.
fn piecewise_integral(f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
    breaks
        .windows(2)
        .map(|w| crate::quad::integrate(&f, w[0], w[1], 1e-15).value)
        .sum()
}

fn staircases(_: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let n = 10;
    for variant in [StaircaseVariant::Example2, StaircaseVariant::Example13] {
        let spec = StaircaseSpec::geometric(RateFunction::Identity, 4.0, n, variant);
        let g = tryo!(make_staircase(&spec, n));
        let radii = &spec.radii;
        let products: Vec<f64> = radii.iter().map(|&r| r * r * g.eval(r)).collect();
        let mut running = Vec::with_capacity(n);
        let mut m = f64::NEG_INFINITY;
        for &p in &products {
            m = m.max(p);
            running.push(m);
        }
        let increasing = running.windows(2).all(|w| w[1] > w[0]);
        out.check(
            increasing,
            format!("{variant:?}: max_{{n≤k}} R_n φ(R_n) g(R_n) = {}", running.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", ")),
        );
        let mut breaks = vec![0.0];
        match variant {
            StaircaseVariant::Example2 => {
                breaks.extend(radii.iter().copied());
                let series: f64 = radii.iter().map(|&r| 1.0 / r.sqrt()).sum();
                let integral = piecewise_integral(|t| g.eval(t), &breaks);
                out.check((integral - series).abs() <= 1e-9, format!("Example2: ∫g = {integral:.12}, Σ 1/√φ(R_n) = {series:.12}"));
            }
            StaircaseVariant::Example13 => {
                breaks.extend(radii.iter().map(|r| 2.0 * r));
                let c: Vec<f64> = radii.iter().map(|&r| 1.0 / (r * r.cbrt())).collect();
                let series_sqrt: f64 = 2.0 * radii.iter().map(|&r| 1.0 / r.cbrt()).sum::<f64>();
                // ∫g = ∫ s (Σ c_m 1_{s ≤ 2R_m})² ds = Σ_{m,k} c_m c_k (2 min(R_m, R_k))²/2
                let mut series_g = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let r = radii[i].min(radii[j]);
                        series_g += c[i] * c[j] * 2.0 * r * r;
                    }
                }
                let sqrt_int = piecewise_integral(|t| (-g.deriv(t)).max(0.0).sqrt(), &breaks);
                let integral = piecewise_integral(|t| g.eval(t), &breaks);
                out.check(
                    (sqrt_int - series_sqrt).abs() <= 1e-9,
                    format!("Example13: ∫√(-g') = {sqrt_int:.12}, 2Σ 1/∛φ(R_n) = {series_sqrt:.12}"),
                );
                out.check(
                    (integral - series_g).abs() <= 1e-9 * series_g.max(1.0),
                    format!("Example13: ∫g = {integral:.12}, double sum = {series_g:.12}"),
                );
            }
        }
    }
    out
}

fn self_contraction(opts: &SuiteOptions) -> Outcome {
    let mut out = Outcome::new();
    let mut flows: Vec<(String, Trajectory)> = tryo!(realization_runs(opts.profile))
        .into_iter()
        .map(|r| (format!("realized {}", r.name), r.trajectory))
        .collect();
    flows.push(("x^4/64".into(), tryo!(quartic_flow(1e3, opts.profile))));
    let flow_opts = opts.profile.flow_options(SampleSchedule::Uniform { dt: 0.05 });
    let q = Quadratic::new(vec![1.0, 0.1]);
    flows.push(("anisotropic quadratic".into(), tryo!(integrate_gradient_flow(&q, &[1.0, 1.0], 20.0, &flow_opts))));
    for (name, tr) in &flows {
        let r = verify::self_contracting_check(tr, 0.0);
        out.check(r.passed(), format!("gradient flow on {name}: self-contracting over {} samples", tr.samples.len()));
    }
    let osc = tryo!(fig1_panel(3.0, 1.0, FIG1_STEP, 20.0));
    let horizon_steps: Vec<_> = osc.trajectory.samples.iter().take_while(|s| s.t <= 20.0).cloned().collect();
    let tr = Trajectory {
        samples: horizon_steps,
        ..osc.trajectory.clone()
    };
    let r = verify::self_contracting_check(&tr, 0.0);
    out.check(
        r.verdict == Verdict::Fail && r.witness.is_some(),
        format!("oscillator μ = 1, α = 3 is not self-contracting, witness times {:?}", r.witness.as_deref().map(|w| w.iter().map(|t| format!("{t:.3}")).collect::<Vec<_>>())),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_markers() {
        let m = |a: f64, mu: f64| OscillatorSpec::new(mu, a, 1.0).unwrap().t_transition();
        assert!((m(3.0, 1.0) - 1.5).abs() < 1e-15);
        assert!((m(10.0, 0.001) - 158.113_883_008_418_97).abs() < 1e-9);
    }

    #[test]
    fn sign_changes_of_cosine() {
        let p = fig1_panel(3.0, 10.0, FIG1_STEP, fig1_horizon(10.0, &FIG1_ALPHAS)).unwrap();
        let c = check_fig1_panel(&p);
        assert!(c.passes(10.0), "{c:?}");
    }

    #[test]
    fn ids_are_unique() {
        let ids: std::collections::BTreeSet<_> = criteria().iter().map(|c| c.id).collect();
        assert_eq!(ids.len(), 13);
    }

    #[test]
    fn cheap_criteria_pass() {
        let opts = SuiteOptions::default();
        for c in criteria().iter().filter(|c| ["gd", "staircases", "realization"].contains(&c.id)) {
            let r = c.run(&opts);
            assert_eq!(r.verdict, Verdict::Pass, "{}: {:#?}", c.id, r.details);
        }
    }

    #[test]
    fn rng_streams_are_independent_of_order() {
        use rand::SeedableRng;
        let mut a = crate::flows::replica_rng(1, 5);
        let mut b = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        b.set_stream(5);
        use rand::RngCore;
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
