//! Discrete comparison of `∫√(-g')` for ordered convex curves.
//!
//! On a uniform grid `t_i = t₀ + iT/N` a decreasing curve yields increments
//! `a_i = g(t_{i-1}) - g(t_i)`, `i ≤ N`, and `a_{N+1} = g(t₀ + T)`. Tail sums
//! telescope to grid values, so `G ≥ g` on the grid is tail-sum dominance of
//! the increment sequences, and the majorization certificate gives
//! `Σ√b ≥ Σ√a`.

use std::io::Write;

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::curves::{sqrt_deriv_integral, CurveError, DecayCurve, NamedFamily};
use crate::majorize::{self, AveragingMap, MajorizeError, SequencePair};
use crate::verify::Verdict;

/// Relative slack of grid comparisons, scaled by `g(t₀)`.
pub const GRID_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SqrtCompareError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("need N ≥ 1 and T > 0, got N = {n}, T = {t_span}")]
    BadGrid { n: usize, t_span: f64 },
    #[error("increments increase at t = {t}: curve is not convex")]
    NotConvex { t: f64 },
    #[error("increments are negative at t = {t}: curve is not decreasing")]
    NotDecreasing { t: f64 },
    #[error("G(t) = {upper} < g(t) = {lower} at t = {t}")]
    NotDominated { t: f64, lower: f64, upper: f64 },
    #[error(transparent)]
    Majorize(#[from] MajorizeError),
}

/// Uniform grid `t₀ + iT/N`, `i = 0..=N`, starting at the curve's `t_min`.
pub fn grid(curve: &DecayCurve, t_span: f64, n: usize) -> Vec<f64> {
    let t0 = curve.t_min();
    (0..=n)
        .map(|i| if i == n { t0 + t_span } else { t0 + t_span * i as f64 / n as f64 })
        .collect()
}

/// The `N + 1` increments. The first `N` must be non-increasing (convexity)
/// up to [`GRID_TOL`]; the tail term is `g(t₀ + T)` and is not ordered
/// against them.
pub fn discretize_increments(curve: &DecayCurve, t_span: f64, n: usize) -> Result<Vec<f64>, SqrtCompareError> {
    if n == 0 || !(t_span > 0.0) || !t_span.is_finite() {
        return Err(SqrtCompareError::BadGrid { n, t_span });
    }
    let ts = grid(curve, t_span, n);
    let gs: Vec<f64> = ts.iter().map(|&t| curve.eval(t)).collect();
    let tol = GRID_TOL * gs[0].abs().max(f64::MIN_POSITIVE);
    let mut inc: Vec<f64> = gs.windows(2).map(|w| w[0] - w[1]).collect();
    if let Some(k) = inc.iter().position(|&x| x < -tol) {
        return Err(SqrtCompareError::NotDecreasing { t: ts[k + 1] });
    }
    if let Some(k) = inc.windows(2).position(|w| w[1] > w[0] + tol) {
        return Err(SqrtCompareError::NotConvex { t: ts[k + 1] });
    }
    inc.iter_mut().for_each(|x| *x = x.max(0.0));
    inc.push(gs[n]);
    Ok(inc)
}

/// Outcome of [`compare_sqrt_integrals`].
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtComparison {
    pub t_span: f64,
    pub n: usize,
    /// Increments of the lower curve `g`.
    pub a: Vec<f64>,
    /// Increments of the upper curve `G`.
    pub b: Vec<f64>,
    pub sum_sqrt_a: f64,
    pub sum_sqrt_b: f64,
    /// Both sequences non-increasing, tail term included: the discrete
    /// inequality `Σ√b ≥ Σ√a` is then guaranteed.
    pub hypotheses: bool,
    /// Exact certificate when `hypotheses` holds and `N + 1` is within the
    /// majorization cap.
    pub certificate: Option<AveragingMap>,
    /// `√h Σ_{i≤N+1} √a_i`, the Riemann estimate of `∫√(-g')` with the tail
    /// weighted by `√h`.
    pub estimate_g: f64,
    pub estimate_upper: f64,
    /// `h · sup √(-g')` (resp. for `G`); infinite if the slope at `t₀` is.
    pub error_bound_g: f64,
    pub error_bound_upper: f64,
}

impl SqrtComparison {
    /// `Σ√b ≥ Σ√a` up to rounding.
    pub fn holds(&self) -> bool {
        self.sum_sqrt_b + sum_slack(self.sum_sqrt_a, self.n) >= self.sum_sqrt_a
    }

    /// Fail only when the hypotheses hold and the inequality does not;
    /// inconclusive when it fails outside the hypotheses.
    pub fn verdict(&self) -> Verdict {
        match (self.holds(), self.hypotheses) {
            (true, _) => Verdict::Pass,
            (false, true) => Verdict::Fail,
            (false, false) => Verdict::Inconclusive,
        }
    }

    /// CSV `i,a,b,sqrt_a,sqrt_b` with 1-based `i`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let rows: Vec<Vec<f64>> = self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (&a, &b))| vec![(i + 1) as f64, a, b, a.sqrt(), b.sqrt()])
            .collect();
        crate::io::write_table(out, &["i", "a", "b", "sqrt_a", "sqrt_b"], &rows)
    }
}

fn sum_slack(scale: f64, n: usize) -> f64 {
    4.0 * f64::EPSILON * (n as f64 + 1.0) * scale.abs().max(f64::MIN_POSITIVE)
}

fn is_non_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0])
}

/// Compares `g` (lower) and `G` (upper) on the uniform grid of `N` cells over
/// `[t₀, t₀ + T]`; both curves must share `t_min`.
pub fn compare_sqrt_integrals(
    lower: &DecayCurve,
    upper: &DecayCurve,
    t_span: f64,
    n: usize,
) -> Result<SqrtComparison, SqrtCompareError> {
    let a = discretize_increments(lower, t_span, n)?;
    let b = discretize_increments(upper, t_span, n)?;
    let ts = grid(lower, t_span, n);
    let tol = GRID_TOL * lower.eval(ts[0]).abs().max(f64::MIN_POSITIVE);
    for &t in &ts {
        let (gl, gu) = (lower.eval(t), upper.eval(t));
        if gu < gl - tol {
            return Err(SqrtCompareError::NotDominated { t, lower: gl, upper: gu });
        }
    }
    let hypotheses = is_non_increasing(&a) && is_non_increasing(&b);
    let certificate = if n < majorize::DEFAULT_CAP && hypotheses {
        certify(&ts.iter().map(|&t| lower.eval(t)).collect::<Vec<_>>(), &ts.iter().map(|&t| upper.eval(t)).collect::<Vec<_>>())
    } else {
        None
    };
    let h = t_span / n as f64;
    let sum_sqrt_a: f64 = a.iter().map(|x| x.sqrt()).sum();
    let sum_sqrt_b: f64 = b.iter().map(|x| x.sqrt()).sum();
    let sup = |c: &DecayCurve| h * (-c.deriv(ts[0])).max(0.0).sqrt();
    Ok(SqrtComparison {
        t_span,
        n,
        estimate_g: h.sqrt() * sum_sqrt_a,
        estimate_upper: h.sqrt() * sum_sqrt_b,
        error_bound_g: sup(lower),
        error_bound_upper: sup(upper),
        a,
        b,
        sum_sqrt_a,
        sum_sqrt_b,
        hypotheses,
        certificate,
    })
}

/// Exact certificate from the grid samples. The increments are differences of
/// the sampled values taken in rational arithmetic, so their tail sums
/// telescope back to the samples exactly.
fn certify(gl: &[f64], gu: &[f64]) -> Option<AveragingMap> {
    let inc = |gs: &[f64]| -> Option<Vec<BigRational>> {
        let q: Vec<BigRational> = gs.iter().map(|&x| BigRational::from_float(x)).collect::<Option<_>>()?;
        let mut v: Vec<BigRational> = q.windows(2).map(|w| &w[0] - &w[1]).collect();
        v.push(q.last()?.clone());
        Some(v)
    };
    let pair = SequencePair::new(inc(gl)?, inc(gu)?).ok()?;
    majorize::build_averaging_map(&pair).ok()
}

/// `G_r(t) = max(1 - r t, 0)`, whose `∫√(-G_r')` is `1/√r`.
pub fn steep_segment(rate: f64) -> Result<DecayCurve, CurveError> {
    crate::curves::make_named_curve(NamedFamily::LinearCutoff { rate })
}

/// Growth of the `√`-integral estimate for `g_α(t) = 1/(t log^α t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierReport {
    pub alpha: f64,
    pub t_short: f64,
    pub t_long: f64,
    pub estimate_short: f64,
    pub estimate_long: f64,
    /// `∫_2^{T_long} g_α` by quadrature.
    pub integral_long: f64,
    /// `∫_2^∞ g_α` in closed form.
    pub integral_closed: f64,
}

impl BarrierReport {
    pub fn growth(&self) -> f64 {
        self.estimate_long - self.estimate_short
    }
}

/// `Σ √(h_i Δg_i)` over cells that are uniform within each decade
/// (`cells_per_decade` per decade) from `t_min` to `t_end`.
pub fn sqrt_integral_log_cells(curve: &DecayCurve, t_end: f64, cells_per_decade: usize) -> Result<f64, CurveError> {
    let mut lo = curve.t_min();
    let mut total = 0.0;
    while lo < t_end {
        let hi = (10f64.powf(lo.log10().floor() + 1.0)).min(t_end);
        let hi = if hi <= lo { t_end } else { hi };
        total += window_estimate(curve, lo, hi, cells_per_decade)?;
        lo = hi;
    }
    Ok(total)
}

fn window_estimate(curve: &DecayCurve, start: f64, end: f64, cells: usize) -> Result<f64, CurveError> {
    let h = (end - start) / cells as f64;
    let mut prev = curve.eval(start);
    let mut value = 0.0;
    for i in 1..=cells {
        let t = if i == cells { end } else { start + h * i as f64 };
        let g = curve.eval(t);
        let inc = prev - g;
        if inc < -1e-12 * prev.abs() {
            return Err(CurveError::NotMonotone { t });
        }
        value += (h * inc.max(0.0)).sqrt();
        prev = g;
    }
    Ok(value)
}

pub fn barrier_experiment(
    alpha: f64,
    t_short: f64,
    t_long: f64,
    cells_per_decade: usize,
) -> Result<BarrierReport, CurveError> {
    let g = crate::curves::make_named_curve(NamedFamily::PowerLog { alpha })?;
    let closed = g.tail_integral(g.t_min()).unwrap_or(f64::INFINITY);
    Ok(BarrierReport {
        alpha,
        t_short,
        t_long,
        estimate_short: sqrt_integral_log_cells(&g, t_short, cells_per_decade)?,
        estimate_long: sqrt_integral_log_cells(&g, t_long, cells_per_decade)?,
        integral_long: g.integral(g.t_min(), t_long),
        integral_closed: closed,
    })
}

/// Uniform-cell estimate re-exported for convenience.
pub fn uniform_sqrt_integral(curve: &DecayCurve, t_end: f64, cells: usize) -> Result<f64, CurveError> {
    Ok(sqrt_deriv_integral(curve, t_end, cells)?.value)
}

/// Parameters of [`fuzz_counterexample_search`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FuzzParams {
    pub trials: usize,
    /// Largest number of cells `N`.
    pub max_cells: usize,
    pub seed: u64,
    /// Length of the window `[0, T]`.
    pub t_span: f64,
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            trials: 10_000,
            max_cells: 64,
            seed: 0,
            t_span: 1.0,
        }
    }
}

/// A failing configuration, shrunk.
#[derive(Clone, Debug, PartialEq)]
pub struct Reproducer {
    pub trial: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub sum_sqrt_a: f64,
    pub sum_sqrt_b: f64,
}

impl Reproducer {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let rows: Vec<Vec<f64>> = self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (&a, &b))| vec![(i + 1) as f64, a, b])
            .collect();
        crate::io::write_table(out, &["i", "a", "b"], &rows)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzReport {
    pub trials: usize,
    /// Violations of `Σ√b ≥ Σ√a`.
    pub violations: usize,
    /// Violations of `Σ c(b) ≥ Σ c(a)` for the extra concave function, if
    /// one was supplied; reported only.
    pub concave_violations: Option<usize>,
    /// Trials with `N + 1 ≤` the cap whose exact certificate verified.
    pub certified: usize,
    /// Trials where the identity did not suffice (`b₁ < a₁`).
    pub nontrivial: usize,
    pub reproducers: Vec<Reproducer>,
}

/// Piecewise-linear convex curve on the grid `iT/N`, zero from `T` on, with
/// the given cell increments.
fn curve_from_increments(inc: &[BigRational], t_span: f64) -> DecayCurve {
    let n = inc.len();
    let mut vals = vec![0.0; n + 1];
    let mut acc = BigRational::from_integer(0.into());
    for i in (0..n).rev() {
        acc += &inc[i];
        vals[i] = num_traits::ToPrimitive::to_f64(&acc).unwrap_or(f64::NAN);
    }
    let ts = (0..=n).map(|i| t_span * i as f64 / n as f64).collect();
    DecayCurve::piecewise_linear(ts, vals).expect("grid is increasing")
}

/// One trial: a dominated increment pair, realized as two piecewise-linear
/// convex curves, compared through [`compare_sqrt_integrals`].
fn trial<R: Rng>(rng: &mut R, params: &FuzzParams) -> (SequencePair, SqrtComparison) {
    let n = rng.gen_range(1..=params.max_cells);
    let denom = rng.gen_range(1..=16);
    let cells = majorize::gen::dominated_pair(rng, n, denom);
    let g = curve_from_increments(cells.a(), params.t_span);
    let upper = curve_from_increments(cells.b(), params.t_span);
    let cmp = compare_sqrt_integrals(&g, &upper, params.t_span, n).expect("generator yields dominated convex pairs");
    (cells, cmp)
}

/// Random search for `G ≥ g` with `Σ√b < Σ√a`. A hit would expose a defect
/// in this implementation; it is shrunk and returned as a reproducer.
/// `concave` is an optional extra increasing concave function whose
/// violations are counted but not treated as failures.
pub fn fuzz_counterexample_search(params: &FuzzParams, concave: Option<fn(f64) -> f64>) -> FuzzReport {
    struct Outcome {
        violation: Option<Reproducer>,
        concave_violation: bool,
        certified: bool,
        nontrivial: bool,
    }
    let outcomes: Vec<Outcome> = (0..params.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = crate::flows::replica_rng(params.seed, k as u64);
            let (pair, cmp) = trial(&mut rng, params);
            let violation = (!cmp.holds()).then(|| {
                let (a, b) = shrink_reproducer(cmp.a.clone(), cmp.b.clone(), |a, b| {
                    sum_sqrt(b) + sum_slack(sum_sqrt(a), a.len()) < sum_sqrt(a)
                });
                Reproducer {
                    trial: k,
                    sum_sqrt_a: sum_sqrt(&a),
                    sum_sqrt_b: sum_sqrt(&b),
                    a,
                    b,
                }
            });
            let concave_violation = concave.is_some_and(|c| {
                let sa: f64 = cmp.a.iter().map(|&x| c(x)).sum();
                let sb: f64 = cmp.b.iter().map(|&x| c(x)).sum();
                sb + sum_slack(sa, cmp.n) < sa
            });
            Outcome {
                violation,
                concave_violation,
                certified: cmp.certificate.is_some(),
                nontrivial: pair.b()[0] < pair.a()[0],
            }
        })
        .collect();
    FuzzReport {
        trials: params.trials,
        violations: outcomes.iter().filter(|o| o.violation.is_some()).count(),
        concave_violations: concave.map(|_| outcomes.iter().filter(|o| o.concave_violation).count()),
        certified: outcomes.iter().filter(|o| o.certified).count(),
        nontrivial: outcomes.iter().filter(|o| o.nontrivial).count(),
        reproducers: outcomes.into_iter().filter_map(|o| o.violation).collect(),
    }
}

fn sum_sqrt(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x.sqrt()).sum()
}

/// Greedy shrinking: drop entries and coarsen values while `fails` keeps
/// holding.
pub fn shrink_reproducer(
    mut a: Vec<f64>,
    mut b: Vec<f64>,
    fails: impl Fn(&[f64], &[f64]) -> bool,
) -> (Vec<f64>, Vec<f64>) {
    debug_assert!(fails(&a, &b));
    loop {
        let mut progressed = false;
        let mut k = 0;
        while k < a.len() && a.len() > 1 {
            let (mut a2, mut b2) = (a.clone(), b.clone());
            a2.remove(k);
            b2.remove(k);
            if fails(&a2, &b2) {
                (a, b) = (a2, b2);
                progressed = true;
            } else {
                k += 1;
            }
        }
        for k in 0..a.len() {
            for side in 0..2 {
                let v = if side == 0 { &a } else { &b };
                let rounded = (v[k] * 1e3).round() / 1e3;
                if rounded == v[k] {
                    continue;
                }
                let (mut a2, mut b2) = (a.clone(), b.clone());
                if side == 0 {
                    a2[k] = rounded;
                } else {
                    b2[k] = rounded;
                }
                if fails(&a2, &b2) {
                    (a, b) = (a2, b2);
                    progressed = true;
                }
            }
        }
        if !progressed {
            return (a, b);
        }
    }
}
