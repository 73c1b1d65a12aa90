//! Reports that turn trajectories into pass/fail/inconclusive verdicts.
//!
//! Every check compares a series `lhs(t) ≤ rhs(t) + tolerance`. Tolerances
//! passed to the functions are relative to the natural scale of the bound
//! (stated per function); the report stores the absolute value used.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flows::{Dynamics, Objective, Trajectory};
use crate::quad;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("minimizer unknown: pass x* explicitly")]
    MissingMinimizer,
    #[error("infimum unknown")]
    MissingInfimum,
    #[error("trajectory carries no velocities")]
    MissingVelocity,
    #[error("initial velocity is not zero (|v0| = {0:e})")]
    NonzeroVelocity(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("samples end at t = {last}, need coverage up to {needed}")]
    InsufficientCoverage { last: f64, needed: f64 },
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("replicas come from different configurations")]
    Heterogeneous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The horizon did not witness the claim; distinct from a failure.
    Inconclusive,
}

impl Verdict {
    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Point of a bound series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub name: String,
    pub series: Vec<BoundPoint>,
    pub verdict: Verdict,
    /// `min (rhs - lhs)` over the series; `+∞` for an empty series.
    pub worst_margin: f64,
    /// Absolute tolerance used.
    pub tolerance: f64,
    /// Sample times of a violating configuration, when one was found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

/// `{name, verdict, margin, tolerance}` summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub name: String,
    pub verdict: Verdict,
    pub margin: f64,
    pub tolerance: f64,
}

impl DecayReport {
    /// Pass iff `lhs ≤ rhs + tolerance` at every point.
    pub fn bound(name: impl Into<String>, series: Vec<BoundPoint>, tolerance: f64) -> Self {
        let worst_margin = series.iter().map(|p| p.rhs - p.lhs).fold(f64::INFINITY, f64::min);
        let ok = series.iter().all(|p| p.lhs <= p.rhs + tolerance);
        DecayReport {
            name: name.into(),
            series,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            worst_margin,
            tolerance,
            witness: None,
        }
    }

    fn with_verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            name: self.name.clone(),
            verdict: self.verdict,
            margin: self.worst_margin,
            tolerance: self.tolerance,
        }
    }

    /// Series as CSV `t,lhs,rhs`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let rows: Vec<Vec<f64>> = self.series.iter().map(|p| vec![p.t, p.lhs, p.rhs]).collect();
        crate::io::write_table(out, &["t", "lhs", "rhs"], &rows)
    }
}

fn xstar_of(traj: &Trajectory, xstar: Option<&[f64]>) -> Result<Vec<f64>, VerifyError> {
    xstar
        .map(|x| x.to_vec())
        .or_else(|| traj.meta.xstar.clone())
        .ok_or(VerifyError::MissingMinimizer)
}

fn fstar_of(traj: &Trajectory) -> Result<f64, VerifyError> {
    traj.meta.infimum.ok_or(VerifyError::MissingInfimum)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Non-increasing check: each point compares a value with its predecessor.
fn monotone_report(name: &str, ts: &[f64], values: &[f64], tolerance: f64) -> DecayReport {
    let series = (1..values.len())
        .map(|k| BoundPoint {
            t: ts[k],
            lhs: values[k],
            rhs: values[k - 1],
        })
        .collect();
    DecayReport::bound(name, series, tolerance)
}

/// Gradient-flow Lyapunov function and its consequence.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovGf {
    /// `L(t) = t(f - f*) + ½‖x - x*‖²` non-increasing.
    pub lyapunov: DecayReport,
    /// `f(x_t) - f* ≤ L(0)/t`.
    pub rate: DecayReport,
}

/// `tol` is relative to `L(0)`.
pub fn lyapunov_gf(traj: &Trajectory, xstar: Option<&[f64]>, tol: f64) -> Result<LyapunovGf, VerifyError> {
    let xs = xstar_of(traj, xstar)?;
    let fstar = traj.meta.infimum.unwrap_or_else(|| traj.samples[0].f.min(f64::INFINITY));
    let ts = traj.times();
    let lv: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| s.t * (s.f - fstar) + 0.5 * dist2(&s.x, &xs))
        .collect();
    let l0 = lv[0];
    let abs = tol * l0.abs().max(f64::MIN_POSITIVE);
    let rate = traj
        .samples
        .iter()
        .filter(|s| s.t > 0.0)
        .map(|s| BoundPoint {
            t: s.t,
            lhs: s.f - fstar,
            rhs: l0 / s.t,
        })
        .collect();
    Ok(LyapunovGf {
        lyapunov: monotone_report("lyapunov_gf", &ts, &lv, abs),
        rate: DecayReport::bound("gf_rate_L0_over_t", rate, abs),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcessWeight {
    One,
    T,
}

/// Cumulative `∫ w(t)(f - f*)` against the bound for the trajectory's dynamics:
/// `‖x₀ - x*‖²/2` for gradient flow with `w = 1`, and
/// `(α-1)²‖x₀ - x*‖²/(2(α-3))` for heavy ball with `w = t`. `tol` is relative
/// to the bound.
pub fn excess_integral(traj: &Trajectory, weight: ExcessWeight, tol: f64) -> Result<DecayReport, VerifyError> {
    let xs = xstar_of(traj, None)?;
    let fstar = fstar_of(traj)?;
    let d0 = dist2(&traj.samples[0].x, &xs);
    let bound = match (traj.meta.dynamics, weight) {
        (Dynamics::GradientFlow, ExcessWeight::One) => 0.5 * d0,
        (Dynamics::HeavyBallOde | Dynamics::HeavyBallScheme, ExcessWeight::T) => {
            let alpha = traj
                .meta
                .param("alpha")
                .ok_or_else(|| VerifyError::ParameterMismatch("alpha missing".into()))?;
            if !(alpha > 3.0) {
                return Err(VerifyError::Precondition(format!("weighted bound needs alpha > 3, got {alpha}")));
            }
            (alpha - 1.0).powi(2) * d0 / (2.0 * (alpha - 3.0))
        }
        (dyn_, w) => {
            return Err(VerifyError::Precondition(format!(
                "no excess-integral bound for {dyn_:?} with weight {w:?}"
            )))
        }
    };
    let ts = traj.times();
    let ys: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| {
            let w = match weight {
                ExcessWeight::One => 1.0,
                ExcessWeight::T => s.t,
            };
            w * (s.f - fstar)
        })
        .collect();
    let cum = quad::cumulative_trapezoid(&ts, &ys);
    let series = ts
        .iter()
        .zip(cum)
        .map(|(&t, c)| BoundPoint { t, lhs: c, rhs: bound })
        .collect();
    let name = match weight {
        ExcessWeight::One => "excess_integral",
        ExcessWeight::T => "weighted_excess_integral",
    };
    Ok(DecayReport::bound(name, series, tol * bound.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductWeight {
    T,
    TLogT,
    TLog2T,
    T2,
}

impl ProductWeight {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            ProductWeight::T => t,
            ProductWeight::TLogT => t * t.ln(),
            ProductWeight::TLog2T => t * t.ln().powi(2),
            ProductWeight::T2 => t * t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// `w(t)(f - f*) → 0`: passes when the sup over the last decade of
    /// samples is below `threshold`, inconclusive otherwise.
    LimZero { threshold: f64 },
    /// `liminf w(t)(f - f*) = 0`: some sample must drop below `threshold`.
    LiminfZero { threshold: f64 },
}

/// Weighted decay products. A finite run cannot refute either claim, so the
/// verdict is pass or inconclusive; lim claims are also inconclusive when the
/// trajectory ends before `min_horizon`.
pub fn decay_products(
    traj: &Trajectory,
    weight: ProductWeight,
    claim: Claim,
    min_horizon: f64,
) -> Result<DecayReport, VerifyError> {
    let fstar = fstar_of(traj)?;
    let t_end = traj.last().t;
    let prods: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|s| s.t > 1.0)
        .map(|s| (s.t, weight.eval(s.t) * (s.f - fstar)))
        .collect();
    let name = format!("decay_product_{weight:?}").to_lowercase();
    match claim {
        Claim::LimZero { threshold } => {
            let series: Vec<BoundPoint> = prods
                .iter()
                .filter(|(t, _)| *t >= t_end / 10.0)
                .map(|&(t, p)| BoundPoint { t, lhs: p, rhs: threshold })
                .collect();
            let r = DecayReport::bound(name, series, 0.0);
            if t_end < min_horizon || !r.passed() {
                Ok(r.with_verdict(Verdict::Inconclusive))
            } else {
                Ok(r)
            }
        }
        Claim::LiminfZero { threshold } => {
            let mut running = f64::INFINITY;
            let series: Vec<BoundPoint> = prods
                .iter()
                .map(|&(t, p)| {
                    running = running.min(p);
                    BoundPoint { t, lhs: running, rhs: threshold }
                })
                .collect();
            let witnessed = series.iter().any(|p| p.lhs <= p.rhs);
            let mut r = DecayReport::bound(name, series, 0.0);
            r.worst_margin = r.series.iter().map(|p| p.rhs - p.lhs).fold(f64::NEG_INFINITY, f64::max);
            Ok(r.with_verdict(if witnessed { Verdict::Pass } else { Verdict::Inconclusive }))
        }
    }
}

/// `min_{t ≤ s ≤ t log t} s(f(x_s) - f*) ≤ ‖x₀ - x*‖²/(2 log log t)` over the
/// recorded samples in the window.
pub fn best_iterate_bound(traj: &Trajectory, t: f64) -> Result<DecayReport, VerifyError> {
    if !(t > std::f64::consts::E) {
        return Err(VerifyError::Precondition(format!("need t > e, got {t}")));
    }
    let xs = xstar_of(traj, None)?;
    let fstar = fstar_of(traj)?;
    let hi = t * t.ln();
    let last = traj.last().t;
    if last < hi {
        return Err(VerifyError::InsufficientCoverage { last, needed: hi });
    }
    let min = traj
        .samples
        .iter()
        .filter(|s| s.t >= t && s.t <= hi)
        .map(|s| s.t * (s.f - fstar))
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(VerifyError::InsufficientCoverage { last, needed: hi });
    }
    let bound = dist2(&traj.samples[0].x, &xs) / (2.0 * t.ln().ln());
    Ok(DecayReport::bound(
        "best_iterate",
        vec![BoundPoint { t, lhs: min, rhs: bound }],
        0.0,
    ))
}

/// Length of the recorded path: trapezoid of the speed for continuous
/// dynamics (`‖v‖`, or `‖∇f‖` for gradient flow), polygonal length for
/// iterations.
pub fn path_length(traj: &Trajectory) -> f64 {
    match traj.meta.dynamics {
        Dynamics::GradientFlow => {
            let speeds: Vec<f64> = traj.samples.iter().map(|s| s.gnorm).collect();
            quad::trapezoid(&traj.times(), &speeds)
        }
        Dynamics::HeavyBallOde | Dynamics::ConstantFriction => {
            let speeds: Vec<f64> = traj.samples.iter().map(|s| s.v.as_deref().map_or(0.0, norm)).collect();
            quad::trapezoid(&traj.times(), &speeds)
        }
        _ => traj.samples.windows(2).map(|w| dist2(&w[0].x, &w[1].x).sqrt()).sum(),
    }
}

/// `f(x_t) - f* ≤ length²/(4t)` for a total path length `length`.
/// `tol` is absolute.
pub fn length_rate_bound(traj: &Trajectory, length: f64, tol: f64) -> Result<DecayReport, VerifyError> {
    let fstar = fstar_of(traj)?;
    let series = traj
        .samples
        .iter()
        .filter(|s| s.t > 0.0)
        .map(|s| BoundPoint {
            t: s.t,
            lhs: s.f - fstar,
            rhs: length * length / (4.0 * s.t),
        })
        .collect();
    Ok(DecayReport::bound("length_rate", series, tol))
}

/// Exhaustive self-contraction check: for every `k₃`, the distances
/// `‖x_k - x_{k₃}‖`, `k < k₃`, must be non-increasing in `k`. The series
/// holds the largest increase per `k₃`; `tol` is absolute.
pub fn self_contracting_check(traj: &Trajectory, tol: f64) -> DecayReport {
    let n = traj.samples.len();
    let mut series = Vec::new();
    let mut witness: Option<(f64, [usize; 3])> = None;
    for k3 in 2..n {
        let x3 = &traj.samples[k3].x;
        let mut worst = f64::NEG_INFINITY;
        let mut worst_k = 0;
        let mut prev = dist2(&traj.samples[0].x, x3).sqrt();
        for k in 1..k3 {
            let d = dist2(&traj.samples[k].x, x3).sqrt();
            if d - prev > worst {
                worst = d - prev;
                worst_k = k;
            }
            prev = d;
        }
        if worst > tol && witness.is_none_or(|(w, _)| worst > w) {
            witness = Some((worst, [worst_k - 1, worst_k, k3]));
        }
        series.push(BoundPoint {
            t: traj.samples[k3].t,
            lhs: worst,
            rhs: 0.0,
        });
    }
    let mut r = DecayReport::bound("self_contracting", series, tol);
    r.witness = witness.map(|(_, ks)| ks.iter().map(|&k| traj.samples[k].t).collect());
    r
}

/// Gradient-descent summability reports.
#[derive(Clone, Debug, PartialEq)]
pub struct GdReports {
    /// `η Σ_{k≤n} (f(x_k) - f*) ≤ ‖x₀ - x*‖²/2 + η/(2(1 - Lη/2))(f(x₀) - f*)`.
    pub sum: DecayReport,
    /// `n(f(x_n) - f*) → 0`.
    pub n_excess: DecayReport,
    /// `liminf n log n (f(x_n) - f*) = 0`.
    pub n_log_n: DecayReport,
    /// `f(x_{n+1}) ≤ f(x_n) - (1 - Lη/2)η‖∇f(x_n)‖²`.
    pub descent: DecayReport,
}

pub fn gd_sum_bound(traj: &Trajectory, eta: f64, lipschitz: f64, threshold: f64) -> Result<GdReports, VerifyError> {
    if traj.meta.dynamics != Dynamics::GradientDescent && traj.meta.dynamics != Dynamics::Sgd {
        return Err(VerifyError::Precondition("not a gradient-descent trajectory".into()));
    }
    if let Some(e) = traj.meta.param("eta") {
        if e != eta {
            return Err(VerifyError::ParameterMismatch(format!("eta {eta} vs recorded {e}")));
        }
    }
    if !(eta < 2.0 / lipschitz) {
        return Err(VerifyError::Precondition(format!("need eta < 2/L, got eta = {eta}, L = {lipschitz}")));
    }
    let xs = xstar_of(traj, None)?;
    let fstar = fstar_of(traj)?;
    let s0 = &traj.samples[0];
    let bound = 0.5 * dist2(&s0.x, &xs) + eta / (2.0 * (1.0 - lipschitz * eta / 2.0)) * (s0.f - fstar);
    let mut acc = 0.0;
    let sum_series = traj
        .samples
        .iter()
        .map(|s| {
            acc += eta * (s.f - fstar);
            BoundPoint { t: s.t, lhs: acc, rhs: bound }
        })
        .collect();
    let horizon = traj.last().t;
    let n_excess = decay_products(traj, ProductWeight::T, Claim::LimZero { threshold }, 0.0)?;
    let n_log_n = decay_products(traj, ProductWeight::TLogT, Claim::LiminfZero { threshold }, horizon)?;
    let c = (1.0 - lipschitz * eta / 2.0) * eta;
    let descent = traj
        .samples
        .windows(2)
        .map(|w| BoundPoint {
            t: w[1].t,
            lhs: w[1].f,
            rhs: w[0].f - c * w[0].gnorm * w[0].gnorm,
        })
        .collect();
    let scale = s0.f.abs().max(f64::MIN_POSITIVE);
    Ok(GdReports {
        sum: DecayReport::bound("gd_sum", sum_series, 1e-12 * bound.abs()),
        n_excess,
        n_log_n,
        descent: DecayReport::bound("gd_descent", descent, 1e-12 * scale),
    })
}

/// Monte Carlo reports over SGD replicas.
#[derive(Clone, Debug, PartialEq)]
pub struct SgdReports {
    /// Mean `Σ_n (f(X_n) - f*)` against the expected-sum bound, with a
    /// three-standard-error slack.
    pub mean_sum: DecayReport,
    pub mean_sum_value: f64,
    pub mean_sum_stderr: f64,
    /// Mean `f(X_n)` non-increasing within three standard errors.
    pub mean_descent: DecayReport,
    /// Fraction of replicas whose sup of `f - f*` over the last tenth of
    /// the run exceeds `eps`, against `delta`.
    pub almost_sure: DecayReport,
}

/// Parameters of [`sgd_bounds`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgdCheck {
    pub eta: f64,
    pub lipschitz: f64,
    pub sigma: f64,
    pub eps: f64,
    pub delta: f64,
}

impl SgdCheck {
    /// `η Σ E(f - f*) ≤ E‖X₀ - x*‖²/2 + η(1+σ²)/(1 - L(1+σ²)η/2) E(f(X₀) - f*)`,
    /// returned divided by `η`.
    pub fn sum_bound(&self, mean_dist2: f64, mean_f0: f64) -> f64 {
        let s = 1.0 + self.sigma * self.sigma;
        let denom = 1.0 - self.lipschitz * s * self.eta / 2.0;
        (0.5 * mean_dist2 + self.eta * s / denom * mean_f0) / self.eta
    }
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn sgd_bounds(replicas: &[Trajectory], check: &SgdCheck) -> Result<SgdReports, VerifyError> {
    let first = replicas
        .first()
        .ok_or_else(|| VerifyError::Precondition("no replicas".into()))?;
    let same = replicas.iter().all(|r| {
        r.meta.params == first.meta.params
            && r.meta.seed == first.meta.seed
            && r.meta.objective == first.meta.objective
            && r.samples.len() == first.samples.len()
    });
    if !same {
        return Err(VerifyError::Heterogeneous);
    }
    for (key, v) in [("eta", check.eta), ("sigma", check.sigma)] {
        if let Some(rec) = first.meta.param(key) {
            if rec != v {
                return Err(VerifyError::ParameterMismatch(format!("{key} {v} vs recorded {rec}")));
            }
        }
    }
    let xs = xstar_of(first, None)?;
    let fstar = fstar_of(first)?;
    let sums: Vec<f64> = replicas
        .iter()
        .map(|r| r.samples.iter().map(|s| s.f - fstar).sum())
        .collect();
    let (mean_sum, se_sum) = mean_stderr(&sums);
    let d2: Vec<f64> = replicas.iter().map(|r| dist2(&r.samples[0].x, &xs)).collect();
    let f0: Vec<f64> = replicas.iter().map(|r| r.samples[0].f - fstar).collect();
    let bound = check.sum_bound(mean_stderr(&d2).0, mean_stderr(&f0).0);
    let steps = first.samples.len();
    let mean_sum_report = DecayReport::bound(
        "sgd_mean_sum",
        vec![BoundPoint {
            t: first.last().t,
            lhs: mean_sum,
            rhs: bound,
        }],
        3.0 * se_sum,
    );

    let mut descent = Vec::with_capacity(steps);
    let mut prev: Option<(f64, f64)> = None;
    let mut worst_slack: f64 = 0.0;
    for n in 0..steps {
        let col: Vec<f64> = replicas.iter().map(|r| r.samples[n].f - fstar).collect();
        let (m, se) = mean_stderr(&col);
        if let Some((pm, pse)) = prev {
            worst_slack = worst_slack.max(3.0 * (se * se + pse * pse).sqrt());
            descent.push(BoundPoint {
                t: first.samples[n].t,
                lhs: m - 3.0 * (se * se + pse * pse).sqrt(),
                rhs: pm,
            });
        }
        prev = Some((m, se));
    }
    let tail_from = steps - steps.div_ceil(10);
    let exceed = replicas
        .iter()
        .filter(|r| r.samples[tail_from..].iter().any(|s| s.f - fstar > check.eps))
        .count() as f64
        / replicas.len() as f64;
    Ok(SgdReports {
        mean_sum: mean_sum_report,
        mean_sum_value: mean_sum,
        mean_sum_stderr: se_sum,
        mean_descent: DecayReport::bound("sgd_mean_descent", descent, 0.0),
        almost_sure: DecayReport::bound(
            "sgd_almost_sure_proxy",
            vec![BoundPoint {
                t: first.last().t,
                lhs: exceed,
                rhs: check.delta,
            }],
            0.0,
        ),
    })
}

/// Heavy-ball Lyapunov reports.
#[derive(Clone, Debug, PartialEq)]
pub struct HbLyapunov {
    /// `L(t) = t²(f - f*) + ½‖(α-1)(x - x*) + t v‖²` non-increasing (α ≥ 3).
    pub lyapunov: DecayReport,
    /// `t²(f - f* + ‖v‖²/4) ≤ L(t₀) + ((α-1)²/2)‖x - x*‖²`.
    pub energy: DecayReport,
    /// `f - f* ≤ L(t₀)/t²`.
    pub rate: DecayReport,
}

/// `tol` is relative to `L(t₀)`.
pub fn hb_lyapunov(traj: &Trajectory, xstar: Option<&[f64]>, alpha: f64, tol: f64) -> Result<HbLyapunov, VerifyError> {
    if !(alpha >= 3.0) {
        return Err(VerifyError::Precondition(format!("need alpha >= 3, got {alpha}")));
    }
    if traj.samples.iter().any(|s| s.v.is_none()) {
        return Err(VerifyError::MissingVelocity);
    }
    let xs = xstar_of(traj, xstar)?;
    let fstar = traj.meta.infimum.unwrap_or(0.0);
    let lv: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| {
            let v = s.v.as_ref().unwrap();
            let w: f64 = s
                .x
                .iter()
                .zip(v)
                .zip(&xs)
                .map(|((x, v), xs)| ((alpha - 1.0) * (x - xs) + s.t * v).powi(2))
                .sum();
            s.t * s.t * (s.f - fstar) + 0.5 * w
        })
        .collect();
    let l0 = lv[0];
    let abs = tol * l0.abs().max(f64::MIN_POSITIVE);
    let ts = traj.times();
    let energy = traj
        .samples
        .iter()
        .map(|s| {
            let v2: f64 = s.v.as_ref().unwrap().iter().map(|v| v * v).sum();
            BoundPoint {
                t: s.t,
                lhs: s.t * s.t * (s.f - fstar + v2 / 4.0),
                rhs: l0 + 0.5 * (alpha - 1.0).powi(2) * dist2(&s.x, &xs),
            }
        })
        .collect();
    let rate = traj
        .samples
        .iter()
        .filter(|s| s.t > 0.0)
        .map(|s| BoundPoint {
            t: s.t,
            lhs: s.f - fstar,
            rhs: l0 / (s.t * s.t),
        })
        .collect();
    Ok(HbLyapunov {
        lyapunov: monotone_report("hb_lyapunov", &ts, &lv, abs),
        energy: DecayReport::bound("hb_energy_bound", energy, abs),
        rate: DecayReport::bound("hb_rate", rate, abs),
    })
}

/// Speed and travel bounds for heavy ball started at rest.
#[derive(Clone, Debug, PartialEq)]
pub struct HbSpeed {
    /// `‖v(t)‖ ≤ √(2(f(x₀) - inf f))`.
    pub speed: DecayReport,
    /// `f(x₀ + √(2(f(x₀) - inf f)) t) ≤ f(x(t))` on the window (1-D objectives
    /// decreasing to the right).
    pub lower: Option<DecayReport>,
}

/// `tol` is absolute.
pub fn hb_speed_bound<O: Objective + ?Sized>(
    traj: &Trajectory,
    objective: Option<&O>,
    window: (f64, f64),
    tol: f64,
) -> Result<HbSpeed, VerifyError> {
    if traj.samples.iter().any(|s| s.v.is_none()) {
        return Err(VerifyError::MissingVelocity);
    }
    let s0 = &traj.samples[0];
    let v0 = norm(s0.v.as_ref().unwrap());
    let f0 = s0.f;
    let inf = traj.meta.infimum.unwrap_or(0.0);
    let cap = (2.0 * (f0 - inf)).max(0.0).sqrt();
    if v0 > 1e-12 * cap.max(1.0) {
        return Err(VerifyError::NonzeroVelocity(v0));
    }
    let speed = traj
        .samples
        .iter()
        .map(|s| BoundPoint {
            t: s.t,
            lhs: norm(s.v.as_ref().unwrap()),
            rhs: cap,
        })
        .collect();
    let lower = match objective {
        Some(obj) if obj.dim() == 1 => {
            let x0 = s0.x[0];
            let series = traj
                .samples
                .iter()
                .filter(|s| s.t >= window.0 && s.t <= window.1)
                .map(|s| BoundPoint {
                    t: s.t,
                    lhs: obj.value(&[x0 + cap * s.t]),
                    rhs: s.f,
                })
                .collect();
            Some(DecayReport::bound("hb_travel_lower_bound", series, tol))
        }
        _ => None,
    };
    Ok(HbSpeed {
        speed: DecayReport::bound("hb_speed", speed, tol),
        lower,
    })
}

/// Dissipation identity: the integrated dissipation equals the energy drop,
/// `f(x₀) - f(x_t)` for gradient flow and `E(t₀) - E(t)` with
/// `E = f + ‖v‖²/2` for second-order dynamics. `tol` is relative to the
/// initial energy drop scale `E(t₀) - inf f`.
pub fn energy_dissipation(traj: &Trajectory, tol: f64) -> Result<DecayReport, VerifyError> {
    if traj.dissipated.len() != traj.samples.len() {
        return Err(VerifyError::Precondition("trajectory did not track dissipation".into()));
    }
    let energy = |k: usize| {
        let s = &traj.samples[k];
        s.f + s.v.as_deref().map_or(0.0, |v| 0.5 * v.iter().map(|x| x * x).sum::<f64>())
    };
    let e0 = energy(0);
    let scale = (e0 - traj.meta.infimum.unwrap_or(0.0)).abs().max(f64::MIN_POSITIVE);
    let series = (0..traj.samples.len())
        .map(|k| BoundPoint {
            t: traj.samples[k].t,
            lhs: (traj.dissipated[k] - (e0 - energy(k))).abs(),
            rhs: 0.0,
        })
        .collect();
    Ok(DecayReport::bound("energy_dissipation", series, tol * scale))
}

/// `f + ‖v‖²/2` non-increasing; `tol` relative to its initial value.
pub fn total_energy_monotone(traj: &Trajectory, tol: f64) -> DecayReport {
    let e: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| s.f + s.v.as_deref().map_or(0.0, |v| 0.5 * v.iter().map(|x| x * x).sum::<f64>()))
        .collect();
    let abs = tol * e[0].abs().max(f64::MIN_POSITIVE);
    monotone_report("total_energy", &traj.times(), &e, abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{integrate_gradient_flow, run_gd, FlowOptions, Monomial, Quadratic};

    fn quartic_flow(t_end: f64) -> Trajectory {
        let obj = Monomial { coeff: 1.0 / 64.0, power: 4.0 };
        integrate_gradient_flow(&obj, &[2.0 * 2f64.sqrt()], t_end, &FlowOptions::default()).unwrap()
    }

    #[test]
    fn lyapunov_of_quadratic_flow() {
        let tr = integrate_gradient_flow(&Quadratic::scalar(0.5), &[2.0], 30.0, &FlowOptions::default()).unwrap();
        let r = lyapunov_gf(&tr, None, 1e-8).unwrap();
        assert!(r.lyapunov.passed());
        assert!(r.rate.passed());
        for p in &r.lyapunov.series {
            let exact = p.t * (-p.t).exp() + 2.0 * (-p.t).exp();
            assert!((p.lhs - exact).abs() < 1e-7);
        }
    }

    #[test]
    fn lyapunov_at_minimizer_is_zero() {
        let tr = integrate_gradient_flow(&Quadratic::scalar(1.0), &[0.0], 5.0, &FlowOptions::default()).unwrap();
        let r = lyapunov_gf(&tr, None, 1e-8).unwrap();
        assert!(r.lyapunov.series.iter().all(|p| p.lhs == 0.0));
    }

    #[test]
    fn quartic_rate_and_integral() {
        let tr = quartic_flow(1000.0);
        let r = lyapunov_gf(&tr, None, 1e-8).unwrap();
        let at10 = r.rate.series.iter().find(|p| p.t >= 10.0).unwrap();
        assert!(at10.lhs < at10.rhs);
        let int = excess_integral(&tr, ExcessWeight::One, 1e-9).unwrap();
        assert!(int.passed());
        assert!((int.series.last().unwrap().lhs - (1.0 - 1.0 / 1001.0)).abs() < 1e-3);
    }

    #[test]
    fn decay_products_verdicts() {
        let tr = quartic_flow(1000.0);
        let lim = decay_products(&tr, ProductWeight::T, Claim::LimZero { threshold: 1.1e-2 }, 100.0).unwrap();
        assert_eq!(lim.verdict, Verdict::Pass);
        let liminf = decay_products(&tr, ProductWeight::TLog2T, Claim::LiminfZero { threshold: 0.1 }, 100.0).unwrap();
        assert_eq!(liminf.verdict, Verdict::Pass);
        let short = decay_products(&quartic_flow(10.0), ProductWeight::T, Claim::LimZero { threshold: 1e-2 }, 100.0).unwrap();
        assert_eq!(short.verdict, Verdict::Inconclusive);
        let above = decay_products(&tr, ProductWeight::T, Claim::LimZero { threshold: 1e-4 }, 100.0).unwrap();
        assert_eq!(above.verdict, Verdict::Inconclusive);
        assert!(above.worst_margin < 0.0);
        let never = decay_products(&tr, ProductWeight::T2, Claim::LiminfZero { threshold: 1e-3 }, 0.0).unwrap();
        assert_eq!(never.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn best_iterate() {
        let tr = quartic_flow(100.0);
        let r = best_iterate_bound(&tr, 10.0).unwrap();
        assert!(r.passed());
        assert!(matches!(best_iterate_bound(&tr, 2.0), Err(VerifyError::Precondition(_))));
        assert!(matches!(
            best_iterate_bound(&quartic_flow(20.0), 10.0),
            Err(VerifyError::InsufficientCoverage { .. })
        ));
    }

    #[test]
    fn self_contraction_of_monotone_flow() {
        let tr = quartic_flow(50.0);
        let r = self_contracting_check(&tr, 0.0);
        assert!(r.passed());
        assert!(r.witness.is_none());
        let two = Trajectory {
            samples: tr.samples[..2].to_vec(),
            ..tr.clone()
        };
        assert!(self_contracting_check(&two, 0.0).passed());
    }

    #[test]
    fn gd_geometric_series() {
        let tr = run_gd(&Quadratic::scalar(1.0), &[1.0], 0.5, 60, Some(1.0)).unwrap();
        let r = gd_sum_bound(&tr, 0.5, 1.0, 1e-3).unwrap();
        assert!(r.sum.passed() && r.descent.passed() && r.n_excess.passed());
        let total = r.sum.series.last().unwrap();
        assert!((total.lhs - 1.0 / 3.0).abs() < 1e-12);
        assert!((total.rhs - 2.0 / 3.0).abs() < 1e-12);
        assert!(matches!(gd_sum_bound(&tr, 0.25, 1.0, 1e-6), Err(VerifyError::ParameterMismatch(_))));
    }

    #[test]
    fn verdict_combination() {
        use Verdict::*;
        assert_eq!(Pass.combine(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.combine(Fail), Fail);
        assert_eq!(Pass.combine(Pass), Pass);
    }
}
