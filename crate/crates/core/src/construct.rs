//! One-dimensional convex objectives whose gradient flow follows a prescribed
//! decay curve, and the constructions without a minimizer.
//!
//! Objectives are knot tables `(x, φ, φ')` evaluated by cubic Hermite
//! interpolation, with closed-form extensions on both sides of the table.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{CurveError, DecayCurve, Flag};
use crate::{hermite, quad};

/// Absolute tolerance for `φ(0) = 0` in the minimizer check.
pub const MINIMIZER_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("square root of -g' is not integrable ({0})")]
    NonIntegrable(String),
    #[error("curve is not convex near t = {t}")]
    NotConvex { t: f64 },
    #[error("curve is not monotone decreasing near t = {t}")]
    NotMonotone { t: f64 },
    #[error("curve does not tend to zero: max over the last tenth of the horizon is {tail:.3e}")]
    NoLimit { tail: f64 },
    #[error("degenerate curve: {0}")]
    Degenerate(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub x: f64,
    pub phi: f64,
    pub dphi: f64,
}

/// Extension to the left of the first knot `x₀`:
/// `φ(x₀) + φ'(x₀)(x - x₀) + (x - x₀)²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeftExtension {
    Quadratic,
}

/// Extension to the right of the last knot `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RightExtension {
    /// `φ(X) + φ'(X)(x - X)`
    Linear,
    /// `φ(X) exp(φ'(X)(x - X)/φ(X))`: positive, decreasing, never zero.
    Exponential,
}

/// Piecewise convex objective on the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexObjective1D {
    knots: Vec<Knot>,
    /// Curve time of each knot, when the objective was built from a curve.
    times: Vec<f64>,
    x_right: f64,
    has_minimizer: bool,
    left_extension: LeftExtension,
    right_extension: RightExtension,
    /// Bound on the error of the anchoring of `x` at infinity.
    anchor_bias: f64,
}

impl ConvexObjective1D {
    /// Builds an objective from a raw knot table.
    pub fn from_knots(
        knots: Vec<Knot>,
        right_extension: RightExtension,
        has_minimizer: bool,
    ) -> Result<Self, ConstructError> {
        if knots.len() < 2 {
            return Err(ConstructError::InvalidGrid("need at least two knots".into()));
        }
        if knots.windows(2).any(|w| w[1].x <= w[0].x) {
            return Err(ConstructError::InvalidGrid(
                "knot positions must be strictly increasing".into(),
            ));
        }
        if let Some(w) = knots
            .windows(2)
            .find(|w| w[1].dphi < w[0].dphi - 1e-12 * (w[0].dphi.abs() + w[1].dphi.abs()))
        {
            return Err(ConstructError::NotConvex { t: w[1].x });
        }
        if right_extension == RightExtension::Exponential {
            let last = knots[knots.len() - 1];
            if !(last.phi > 0.0 && last.dphi < 0.0) {
                return Err(ConstructError::Degenerate(
                    "exponential extension needs positive value and negative slope".into(),
                ));
            }
        }
        let x_right = knots[knots.len() - 1].x;
        Ok(ConvexObjective1D {
            knots,
            times: Vec::new(),
            x_right,
            has_minimizer,
            left_extension: LeftExtension::Quadratic,
            right_extension,
            anchor_bias: 0.0,
        })
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    /// Curve times of the knots (empty for raw tables).
    pub fn knot_times(&self) -> &[f64] {
        &self.times
    }

    /// Right end `X` of the tabulated region.
    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn has_minimizer(&self) -> bool {
        self.has_minimizer
    }

    pub fn right_extension(&self) -> RightExtension {
        self.right_extension
    }

    pub fn anchor_bias(&self) -> f64 {
        self.anchor_bias
    }

    /// `(φ(x), φ'(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if x < first.x {
            let d = x - first.x;
            return (first.phi + first.dphi * d + d * d, first.dphi + 2.0 * d);
        }
        if x > last.x {
            let d = x - last.x;
            return match self.right_extension {
                RightExtension::Linear => (last.phi + last.dphi * d, last.dphi),
                RightExtension::Exponential => {
                    let e = (last.dphi * d / last.phi).exp();
                    (last.phi * e, last.dphi * e)
                }
            };
        }
        let i = self
            .knots
            .partition_point(|k| k.x <= x)
            .saturating_sub(1)
            .min(self.knots.len() - 2);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        hermite::segment(a.x, b.x, a.phi, b.phi, a.dphi, b.dphi, x)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    /// `inf φ`: zero for both constructions (attained only with a minimizer).
    pub fn infimum(&self) -> f64 {
        0.0
    }

    pub fn minimizer(&self) -> Option<f64> {
        self.has_minimizer.then_some(0.0)
    }

    /// Largest second derivative over the table and extensions.
    pub fn lipschitz(&self) -> f64 {
        let mut l: f64 = 2.0;
        for w in self.knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let h = b.x - a.x;
            let delta = (b.phi - a.phi) / h;
            l = l.max((6.0 * delta - 4.0 * a.dphi - 2.0 * b.dphi) / h);
            l = l.max((-6.0 * delta + 2.0 * a.dphi + 4.0 * b.dphi) / h);
        }
        if self.right_extension == RightExtension::Exponential {
            let last = self.knots[self.knots.len() - 1];
            l = l.max(last.dphi * last.dphi / last.phi);
        }
        l
    }

    pub fn to_document(&self) -> ObjectiveDocument {
        ObjectiveDocument {
            x: self.knots.iter().map(|k| k.x).collect(),
            phi: self.knots.iter().map(|k| k.phi).collect(),
            dphi: self.knots.iter().map(|k| k.dphi).collect(),
            t: self.times.iter().map(|&t| t.is_finite().then_some(t)).collect(),
            x_right: self.x_right,
            has_minimizer: self.has_minimizer,
            left_extension: self.left_extension,
            right_extension: self.right_extension,
            anchor_bias: self.anchor_bias,
        }
    }

    pub fn from_document(doc: &ObjectiveDocument) -> Result<Self, ConstructError> {
        let n = doc.x.len();
        if doc.phi.len() != n || doc.dphi.len() != n || !(doc.t.is_empty() || doc.t.len() == n) {
            return Err(ConstructError::InvalidGrid("knot columns differ in length".into()));
        }
        let knots = (0..n)
            .map(|i| Knot {
                x: doc.x[i],
                phi: doc.phi[i],
                dphi: doc.dphi[i],
            })
            .collect();
        let mut obj = ConvexObjective1D::from_knots(knots, doc.right_extension, doc.has_minimizer)?;
        if doc.x_right != obj.x_right {
            return Err(ConstructError::InvalidGrid(format!(
                "X = {} differs from the last knot {}",
                doc.x_right, obj.x_right
            )));
        }
        obj.times = doc.t.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
        obj.left_extension = doc.left_extension;
        obj.anchor_bias = doc.anchor_bias;
        Ok(obj)
    }

    /// Knot table as CSV with header `x,phi,dphi`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "phi", "dphi"])?;
        for k in &self.knots {
            w.write_record([fmt(k.x), fmt(k.phi), fmt(k.dphi)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializable knot table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveDocument {
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    /// Curve time per knot; `null` for the knot at the minimizer (time ∞).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<Option<f64>>,
    #[serde(rename = "X")]
    pub x_right: f64,
    pub has_minimizer: bool,
    pub left_extension: LeftExtension,
    pub right_extension: RightExtension,
    #[serde(default)]
    pub anchor_bias: f64,
}

fn check_grid(curve: &DecayCurve, grid: &[f64]) -> Result<(), ConstructError> {
    if grid.len() < 2 {
        return Err(ConstructError::InvalidGrid("need at least two times".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConstructError::InvalidGrid("times must be strictly increasing".into()));
    }
    if grid[0] < curve.t_min() {
        return Err(ConstructError::InvalidGrid(format!(
            "grid starts at {} before t_min = {}",
            grid[0],
            curve.t_min()
        )));
    }
    Ok(())
}

fn check_decreasing_convex(curve: &DecayCurve, grid: &[f64]) -> Result<(), ConstructError> {
    let flags = curve.flags();
    if !flags.monotone_decreasing.holds() {
        return Err(ConstructError::NotMonotone { t: grid[0] });
    }
    if !flags.convex.holds() {
        return Err(ConstructError::NotConvex { t: grid[0] });
    }
    let d: Vec<f64> = grid.iter().map(|&t| curve.deriv(t)).collect();
    if let Some(i) = d.iter().position(|&v| v > 0.0) {
        return Err(ConstructError::NotMonotone { t: grid[i] });
    }
    if let Some(i) = (0..d.len() - 1).find(|&i| d[i + 1] < d[i] - 1e-9 * d[i].abs()) {
        return Err(ConstructError::NotConvex { t: grid[i + 1] });
    }
    Ok(())
}

/// `∫_a^b √(-g')` by quadrature.
fn sqrt_deriv_piece(curve: &DecayCurve, a: f64, b: f64) -> f64 {
    let scale = (-curve.deriv(a)).max(0.0).sqrt() * (b - a);
    quad::integrate(|s| (-curve.deriv(s)).max(0.0).sqrt(), a, b, 1e-14 * scale.max(1e-300)).value
}

/// Realizes `curve` as a convex objective: the gradient flow started at
/// `X = Ψ(grid[0])` satisfies `φ(x_t) = g(grid[0] + t)`.
///
/// Knots sit at `x_j = Ψ(t_j)` with `Ψ(t) = ∫_t^∞ √(-g')`, `φ_j = g(t_j)` and
/// `φ'_j = √(-g'(t_j))`. The table is extended past the last grid time with
/// geometrically spaced times (ratio 1.05) until `Ψ` is negligible, and closed by the
/// knot `(0, 0, 0)`.
pub fn build_objective(curve: &DecayCurve, grid: &[f64]) -> Result<ConvexObjective1D, ConstructError> {
    check_grid(curve, grid)?;
    let flags = curve.flags();
    if !flags.limit_zero.holds() {
        return Err(ConstructError::Degenerate("curve is not known to tend to zero".into()));
    }
    if !flags.sqrt_deriv_integrable.holds() {
        return Err(ConstructError::NonIntegrable("flag is unknown".into()));
    }
    let t_last = *grid.last().unwrap();
    let mut times = grid.to_vec();
    // Tail times until Ψ drops below 1e-12 of its start, or the curve is flat.
    let psi_start_scale = match curve.sqrt_deriv_tail(grid[0]) {
        Some(v) if v.is_infinite() => return Err(ConstructError::NonIntegrable(format!("∫√(-g') from {} diverges", grid[0]))),
        Some(v) => v,
        None => sqrt_deriv_piece(curve, grid[0], t_last),
    };
    let mut t = t_last;
    for _ in 0..4000 {
        let next = t * 1.05 + 0.1;
        if curve.deriv(t) == 0.0 {
            break;
        }
        let tail = match curve.sqrt_deriv_tail(next) {
            Some(v) => v,
            None => (-curve.deriv(next)).sqrt() * next,
        };
        times.push(next);
        t = next;
        if tail <= 1e-12 * psi_start_scale {
            break;
        }
    }
    check_decreasing_convex(curve, &times)?;

    let (xs, anchor_bias) = match curve.sqrt_deriv_tail(grid[0]) {
        Some(_) => (
            times
                .iter()
                .map(|&t| curve.sqrt_deriv_tail(t).unwrap())
                .collect::<Vec<_>>(),
            0.0,
        ),
        None => {
            // accumulate from the far end; the remainder beyond the last time is dropped
            let mut xs = vec![0.0; times.len()];
            let last = times.len() - 1;
            let dropped = (-curve.deriv(times[last])).sqrt() * times[last];
            for j in (0..last).rev() {
                xs[j] = xs[j + 1] + sqrt_deriv_piece(curve, times[j], times[j + 1]);
            }
            (xs, dropped)
        }
    };
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(ConstructError::NonIntegrable("non-finite Ψ".into()));
    }

    // Knots in increasing x, closed by the minimizer.
    let mut knots: Vec<Knot> = Vec::with_capacity(times.len() + 1);
    let mut knot_times = Vec::with_capacity(times.len() + 1);
    knots.push(Knot {
        x: 0.0,
        phi: 0.0,
        dphi: 0.0,
    });
    knot_times.push(f64::INFINITY);
    for j in (0..times.len()).rev() {
        let x = xs[j];
        if x <= knots.last().unwrap().x {
            continue;
        }
        knots.push(Knot {
            x,
            phi: curve.eval(times[j]),
            dphi: (-curve.deriv(times[j])).max(0.0).sqrt(),
        });
        knot_times.push(times[j]);
    }
    let mut dphi: Vec<f64> = knots.iter().map(|k| k.dphi).collect();
    let kx: Vec<f64> = knots.iter().map(|k| k.x).collect();
    let ky: Vec<f64> = knots.iter().map(|k| k.phi).collect();
    hermite::monotone_limit(&kx, &ky, &mut dphi);
    for (k, d) in knots.iter_mut().zip(dphi) {
        k.dphi = d;
    }
    let has_minimizer = knots[0].phi.abs() <= MINIMIZER_TOL;
    let mut obj = ConvexObjective1D::from_knots(knots, RightExtension::Linear, has_minimizer)?;
    obj.times = knot_times;
    obj.anchor_bias = anchor_bias;
    Ok(obj)
}

/// Convex decreasing envelope `φ(t) = ∫_t^∞ (s - t)(-g'(s))/s ds` of `curve`,
/// which satisfies `g(2t)/2 ≤ φ(t) ≤ g(t)`.
pub fn build_no_minimizer_envelope(curve: &DecayCurve) -> Result<DecayCurve, ConstructError> {
    let flags = curve.flags();
    if !flags.monotone_decreasing.holds() {
        return Err(ConstructError::NotMonotone { t: curve.t_min() });
    }
    if !flags.limit_zero.holds() {
        return Err(ConstructError::Degenerate("curve is not known to tend to zero".into()));
    }
    Ok(DecayCurve::envelope_of(curve.clone()))
}

/// Settings for [`preprocess_monotone_smooth`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreprocessOptions {
    pub t_min: f64,
    /// `raw` is treated as zero past this time.
    pub horizon: f64,
    pub step: f64,
    /// Relative size of `raw` over the last tenth of the horizon that still
    /// counts as having reached zero.
    pub tail_tol: f64,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            t_min: 0.0,
            horizon: 50.0,
            step: 1e-3,
            tail_tol: 1e-6,
        }
    }
}

/// Replaces `raw` by its running maximum `m(t) = max_{s ≥ t} raw(s)` and then
/// by the moving average `∫_{t-1}^t m`, giving a non-increasing `C¹` curve on
/// `[t_min + 1, ∞)`.
pub fn preprocess_monotone_smooth<F>(raw: F, opts: PreprocessOptions) -> Result<DecayCurve, ConstructError>
where
    F: Fn(f64) -> f64,
{
    let PreprocessOptions {
        t_min,
        horizon,
        step,
        tail_tol,
    } = opts;
    if !(horizon > t_min + 1.0) || !(step > 0.0) {
        return Err(ConstructError::InvalidGrid("need horizon > t_min + 1 and step > 0".into()));
    }
    let n = ((horizon - t_min) / step).ceil() as usize;
    let h = (horizon - t_min) / n as f64;
    let ts: Vec<f64> = (0..=n).map(|i| t_min + h * i as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| raw(t).max(0.0)).collect();
    let peak = vals.iter().cloned().fold(0.0, f64::max);
    let tail_start = ts.partition_point(|&t| t < horizon - 0.1 * (horizon - t_min));
    let tail = vals[tail_start..].iter().cloned().fold(0.0, f64::max);
    if tail > tail_tol * peak.max(1.0) {
        return Err(ConstructError::NoLimit { tail });
    }
    let mut m = vals;
    *m.last_mut().unwrap() = 0.0;
    for i in (0..n).rev() {
        m[i] = m[i].max(m[i + 1]);
    }
    // m is piecewise linear on the grid; M is its exact running integral.
    let cumulative = quad::cumulative_trapezoid(&ts, &m);
    let per_unit = (1.0 / h).round() as usize;
    let shift_exact = (per_unit as f64 * h - 1.0).abs() < 1e-9;
    let m_at = |t: f64| -> f64 {
        if t >= horizon {
            return 0.0;
        }
        let i = hermite::locate(&ts, t);
        let w = (t - ts[i]) / h;
        m[i] + w * (m[i + 1] - m[i])
    };
    let big_m = |t: f64| -> f64 {
        if t >= horizon {
            return cumulative[n];
        }
        let i = hermite::locate(&ts, t);
        let s = t - ts[i];
        let slope = (m[i + 1] - m[i]) / h;
        cumulative[i] + m[i] * s + 0.5 * slope * s * s
    };
    let out_t: Vec<f64> = ts
        .iter()
        .copied()
        .filter(|&t| t >= t_min + 1.0 - 1e-12)
        .chain(std::iter::once(horizon + 1.0))
        .collect();
    let mut g = Vec::with_capacity(out_t.len());
    let mut dg = Vec::with_capacity(out_t.len());
    for (k, &t) in out_t.iter().enumerate() {
        let lower = t - 1.0;
        let v = if shift_exact && k + per_unit < ts.len() && t <= horizon {
            // both ends on the grid
            let j = ts.partition_point(|&s| s < t - 0.5 * h);
            cumulative[j] - cumulative[j - per_unit]
        } else {
            big_m(t) - big_m(lower)
        };
        g.push(v.max(0.0));
        dg.push((m_at(t) - m_at(lower)).min(0.0));
    }
    *g.last_mut().unwrap() = 0.0;
    *dg.last_mut().unwrap() = 0.0;
    for i in (0..g.len() - 1).rev() {
        g[i] = g[i].max(g[i + 1]);
    }
    hermite::monotone_limit(&out_t, &g, &mut dg);
    let flags = crate::curves::CurveFlags {
        monotone_decreasing: Flag::Asserted,
        convex: Flag::Unknown,
        limit_zero: Flag::Asserted,
        sqrt_deriv_integrable: Flag::Unknown,
    };
    Ok(DecayCurve::tabulated(out_t, g, dg, flags)?)
}

fn check_strictly_positive(curve: &DecayCurve, grid: &[f64]) -> Result<(), ConstructError> {
    check_decreasing_convex(curve, grid)?;
    if let Some(&t) = grid.iter().find(|&&t| !(curve.eval(t) > 0.0)) {
        return Err(ConstructError::Degenerate(format!("curve vanishes at t = {t}")));
    }
    if let Some(&t) = grid.iter().find(|&&t| !(curve.deriv(t) < 0.0)) {
        return Err(ConstructError::Degenerate(format!("curve is flat at t = {t}")));
    }
    Ok(())
}

/// Objective without minimizer: `f(Ψ₀(t)) = φ(t)` with
/// `Ψ₀(t) = ∫_{t_0}^t √(-φ')`, so `f` decreases towards its infimum `0`
/// without attaining it. Knots cover `grid`; beyond it the exponential
/// extension continues the last slope.
pub fn build_no_minimizer_objective(curve: &DecayCurve, grid: &[f64]) -> Result<ConvexObjective1D, ConstructError> {
    check_grid(curve, grid)?;
    check_strictly_positive(curve, grid)?;
    let speed = |t: f64| (-curve.deriv(t)).max(0.0).sqrt();
    let mut x = 0.0;
    let mut knots = Vec::with_capacity(grid.len());
    let mut prev_speed = speed(grid[0]);
    for (j, &t) in grid.iter().enumerate() {
        let s = speed(t);
        if j > 0 {
            let a = grid[j - 1];
            // Simpson on the cell
            x += (t - a) / 6.0 * (prev_speed + 4.0 * speed(0.5 * (a + t)) + s);
        }
        knots.push(Knot {
            x,
            phi: curve.eval(t),
            dphi: -s,
        });
        prev_speed = s;
    }
    let mut obj = ConvexObjective1D::from_knots(knots, RightExtension::Exponential, false)?;
    obj.times = grid.to_vec();
    Ok(obj)
}

/// Rescaled objective `f(x) = g(t_0 + x / (2√g(t_0)))` for the heavy-ball
/// lower bound. Knots at `x_j = 2√g(t_0)(t_j - t_0)`.
pub fn build_heavy_ball_objective(curve: &DecayCurve, grid: &[f64]) -> Result<ConvexObjective1D, ConstructError> {
    check_grid(curve, grid)?;
    check_strictly_positive(curve, grid)?;
    let t0 = grid[0];
    let c = 2.0 * curve.eval(t0).sqrt();
    let knots = grid
        .iter()
        .map(|&t| Knot {
            x: c * (t - t0),
            phi: curve.eval(t),
            dphi: curve.deriv(t) / c,
        })
        .collect();
    let mut obj = ConvexObjective1D::from_knots(knots, RightExtension::Exponential, false)?;
    obj.times = grid.to_vec();
    Ok(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{make_named_curve, NamedFamily};

    fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn exponential_gives_quadratic() {
        let g = make_named_curve(NamedFamily::Exponential { rate: 1.0 }).unwrap();
        let obj = build_objective(&g, &uniform(0.0, 20.0, 200)).unwrap();
        assert!((obj.x_right() - 2.0).abs() < 1e-14);
        assert!(obj.has_minimizer());
        for x in [0.0, 0.1, 0.7, 1.3, 2.0] {
            assert!((obj.value(x) - x * x / 4.0).abs() < 1e-12, "x={x}");
            assert!((obj.slope(x) - x / 2.0).abs() < 1e-12, "x={x}");
        }
        assert_eq!(obj.eval(0.0), (0.0, 0.0));
        // extensions
        assert_eq!(obj.value(-0.5), 0.25);
        assert!((obj.value(3.0) - (1.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn inverse_square_gives_quartic() {
        let g = make_named_curve(NamedFamily::InverseSquare).unwrap();
        let obj = build_objective(&g, &uniform(0.0, 20.0, 400)).unwrap();
        let x_big = 2.0 * 2f64.sqrt();
        assert!((obj.x_right() - x_big).abs() < 1e-14);
        for x in [0.05f64, 0.5, 1.0, 2.0, 2.8] {
            let exact = x.powi(4) / 64.0;
            assert!((obj.value(x) - exact).abs() < 1e-6 * exact, "x={x}: {} vs {exact}", obj.value(x));
        }
    }

    #[test]
    fn non_integrable_is_rejected() {
        let g = make_named_curve(NamedFamily::PowerLog { alpha: 1.5 }).unwrap();
        assert!(matches!(
            build_objective(&g, &uniform(2.0, 10.0, 10)),
            Err(ConstructError::NonIntegrable(_))
        ));
    }

    #[test]
    fn knots_are_convex() {
        let g = make_named_curve(NamedFamily::ShiftedPower { power: 3.0 }).unwrap();
        let obj = build_objective(&g, &uniform(0.0, 50.0, 100)).unwrap();
        assert!(obj.knots().windows(2).all(|w| w[0].dphi <= w[1].dphi));
        assert!(obj.knots().windows(2).all(|w| w[0].x < w[1].x));
    }

    #[test]
    fn power_log_without_closed_tail() {
        let g = make_named_curve(NamedFamily::PowerLog { alpha: 3.0 }).unwrap();
        let obj = build_objective(&g, &uniform(2.0, 40.0, 200)).unwrap();
        // Ψ(t_j) - Ψ(t_{j+1}) matches quadrature of √(-g') between grid times
        let ts = obj.knot_times();
        let k = obj.knots();
        let n = k.len();
        let piece = quad::integrate(|s| (-g.deriv(s)).sqrt(), ts[n - 1], ts[n - 2], 1e-14).value;
        assert!((k[n - 1].x - k[n - 2].x - piece).abs() < 1e-10);
        assert!(obj.anchor_bias() > 0.0);
    }

    #[test]
    fn envelope_sandwich() {
        for fam in [NamedFamily::Exponential { rate: 1.0 }, NamedFamily::ShiftedPower { power: 1.0 }] {
            let g = make_named_curve(fam).unwrap();
            let env = build_no_minimizer_envelope(&g).unwrap();
            for t in [1.0, 10.0, 100.0] {
                let v = env.eval(t);
                assert!(v <= g.eval(t) + 1e-14, "{fam:?} t={t}");
                assert!(v >= g.eval(2.0 * t) / 2.0 - 1e-14, "{fam:?} t={t}");
            }
        }
    }

    #[test]
    fn envelope_of_zero_is_zero() {
        let g = make_named_curve(NamedFamily::Constant { value: 0.0 }).unwrap();
        let env = build_no_minimizer_envelope(&g).unwrap();
        assert_eq!(env.eval(3.0), 0.0);
    }

    #[test]
    fn preprocess_of_monotone_input_is_moving_average() {
        let out = preprocess_monotone_smooth(
            |t: f64| (-t).exp(),
            PreprocessOptions {
                horizon: 40.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.t_min(), 1.0);
        for t in [1.0, 2.5, 7.0] {
            let exact = (-(t - 1.0f64)).exp() - (-t).exp();
            assert!((out.eval(t) - exact).abs() < 1e-6, "t={t}: {} vs {exact}", out.eval(t));
        }
    }

    #[test]
    fn preprocess_rejects_non_vanishing() {
        let r = preprocess_monotone_smooth(|_| 1.0, PreprocessOptions::default());
        assert!(matches!(r, Err(ConstructError::NoLimit { .. })));
    }

    #[test]
    fn preprocess_of_zero_is_zero() {
        let out = preprocess_monotone_smooth(|_| 0.0, PreprocessOptions::default()).unwrap();
        assert_eq!(out.eval(5.0), 0.0);
    }

    #[test]
    fn no_minimizer_objective_is_positive_and_decreasing() {
        let g = make_named_curve(NamedFamily::ShiftedPower { power: 1.0 }).unwrap();
        let env = build_no_minimizer_envelope(&g).unwrap();
        let grid: Vec<f64> = (0..=300).map(|i| 10f64.powf(-1.0 + i as f64 / 100.0)).collect();
        let obj = build_no_minimizer_objective(&env, &grid).unwrap();
        assert!(!obj.has_minimizer());
        let mut prev = f64::INFINITY;
        for i in 0..2000 {
            let x = i as f64 * 0.05;
            let v = obj.value(x);
            assert!(v > 0.0 && v < prev, "x={x}");
            prev = v;
        }
        assert!(obj.value(150.0) > 0.0);
    }

    #[test]
    fn constant_curve_is_rejected() {
        let g = make_named_curve(NamedFamily::Constant { value: 1.0 }).unwrap();
        assert!(matches!(
            build_no_minimizer_objective(&g, &uniform(0.0, 1.0, 4)),
            Err(ConstructError::Degenerate(_))
        ));
    }

    #[test]
    fn document_round_trip() {
        let g = make_named_curve(NamedFamily::Exponential { rate: 1.0 }).unwrap();
        let obj = build_objective(&g, &uniform(0.0, 5.0, 10)).unwrap();
        let json = serde_json::to_string(&obj.to_document()).unwrap();
        let back = ConvexObjective1D::from_document(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.value(1.234), obj.value(1.234));
        let mut buf = Vec::new();
        obj.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,phi,dphi\n"));
    }
}
