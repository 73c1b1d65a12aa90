//! Target decay curves `g(t)` for the excess energy.
//!
//! A [`DecayCurve`] is an immutable description of a non-negative, decreasing
//! function together with its derivative and a set of tri-state property
//! flags. Closed-form families, the two staircase constructions, tabulated
//! curves and the no-minimizer envelope all share this type so that the rest
//! of the crate (objective synthesis, spectral profiles, comparison of
//! square-root integrals) can consume any of them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{hermite, quad};

/// Default relative tolerance for checks on closed-form families.
pub const ANALYTIC_TOL: f64 = 1e-8;
/// Default relative tolerance for finite-difference checks.
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("unsupported parameter for {family}: {detail}")]
    UnsupportedParameter { family: &'static str, detail: String },
    #[error(
        "divergent weight series at truncation N = {n}: estimated tail {tail:.3e} \
         exceeds partial sum {partial:.3e}"
    )]
    DivergentSeries { n: usize, tail: f64, partial: f64 },
    #[error("curve is negative at t = {t}")]
    Negative { t: f64 },
    #[error("curve is not monotone decreasing near t = {t}")]
    NotMonotone { t: f64 },
    #[error("curve is not convex near t = {t}")]
    NotConvex { t: f64 },
    #[error("derivative disagrees with finite differences at t = {t}")]
    DerivativeMismatch { t: f64 },
    #[error("invalid curve table: {0}")]
    InvalidTable(String),
    #[error("invalid curve document: {0}")]
    InvalidDocument(String),
}

/// Tri-state status of a curve property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// Holds by construction (closed form or construction argument).
    Asserted,
    /// Checked numerically on a grid.
    Verified,
    Unknown,
}

impl Flag {
    pub fn holds(self) -> bool {
        !matches!(self, Flag::Unknown)
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Flag::Asserted
        } else {
            Flag::Unknown
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFlags {
    pub monotone_decreasing: Flag,
    pub convex: Flag,
    pub limit_zero: Flag,
    pub sqrt_deriv_integrable: Flag,
}

impl CurveFlags {
    pub const fn all(flag: Flag) -> Self {
        CurveFlags {
            monotone_decreasing: flag,
            convex: flag,
            limit_zero: flag,
            sqrt_deriv_integrable: flag,
        }
    }
}

/// Monotone rate function `φ` used by the staircase and flatness constructions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateFunction {
    /// `φ(t) = t`
    Identity,
    /// `φ(t) = t^exponent`
    Power { exponent: f64 },
    /// `φ(t) = log(1 + t)`
    Log1p,
}

impl RateFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            RateFunction::Identity => t,
            RateFunction::Power { exponent } => t.powf(exponent),
            RateFunction::Log1p => t.ln_1p(),
        }
    }
}

/// Closed-form families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedFamily {
    /// `e^{-rate t}` on `[0, ∞)`.
    Exponential { rate: f64 },
    /// `(1 + t)^{-2}` on `[0, ∞)`.
    InverseSquare,
    /// `(1 + t)^{-power}` on `[0, ∞)`.
    ShiftedPower { power: f64 },
    /// `t^{-power}` on `[1, ∞)`.
    Power { power: f64 },
    /// `1 / (t (log t)^alpha)` on `[2, ∞)`.
    PowerLog { alpha: f64 },
    /// `max(1 - rate t, 0)` on `[0, ∞)`.
    LinearCutoff { rate: f64 },
    /// `g ≡ value`.
    Constant { value: f64 },
}

impl NamedFamily {
    pub fn name(&self) -> &'static str {
        match self {
            NamedFamily::Exponential { .. } => "exponential",
            NamedFamily::InverseSquare => "inverse_square",
            NamedFamily::ShiftedPower { .. } => "shifted_power",
            NamedFamily::Power { .. } => "power",
            NamedFamily::PowerLog { .. } => "power_log",
            NamedFamily::LinearCutoff { .. } => "linear_cutoff",
            NamedFamily::Constant { .. } => "constant",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match *self {
            NamedFamily::Exponential { rate } | NamedFamily::LinearCutoff { rate } => {
                m.insert("rate".into(), rate);
            }
            NamedFamily::ShiftedPower { power } | NamedFamily::Power { power } => {
                m.insert("power".into(), power);
            }
            NamedFamily::PowerLog { alpha } => {
                m.insert("alpha".into(), alpha);
            }
            NamedFamily::Constant { value } => {
                m.insert("value".into(), value);
            }
            NamedFamily::InverseSquare => {}
        }
        m
    }

    pub fn from_params(name: &str, params: &BTreeMap<String, f64>) -> Result<Self, CurveError> {
        let get = |key: &str| {
            params.get(key).copied().ok_or_else(|| {
                CurveError::InvalidDocument(format!("family {name} needs parameter `{key}`"))
            })
        };
        let fam = match name {
            "exponential" => NamedFamily::Exponential { rate: get("rate")? },
            "inverse_square" => NamedFamily::InverseSquare,
            "shifted_power" => NamedFamily::ShiftedPower { power: get("power")? },
            "power" => NamedFamily::Power { power: get("power")? },
            "power_log" => NamedFamily::PowerLog { alpha: get("alpha")? },
            "linear_cutoff" => NamedFamily::LinearCutoff { rate: get("rate")? },
            "constant" => NamedFamily::Constant { value: get("value")? },
            other => {
                return Err(CurveError::InvalidDocument(format!("unknown family `{other}`")))
            }
        };
        let expected = fam.params();
        if let Some(extra) = params.keys().find(|k| !expected.contains_key(*k)) {
            return Err(CurveError::InvalidDocument(format!(
                "family {name} has no parameter `{extra}`"
            )));
        }
        Ok(fam)
    }

    fn t_min(&self) -> f64 {
        match self {
            NamedFamily::Power { .. } => 1.0,
            NamedFamily::PowerLog { .. } => 2.0,
            _ => 0.0,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        match *self {
            NamedFamily::Exponential { rate } => (-rate * t).exp(),
            NamedFamily::InverseSquare => (1.0 + t).powi(-2),
            NamedFamily::ShiftedPower { power } => (1.0 + t).powf(-power),
            NamedFamily::Power { power } => t.powf(-power),
            NamedFamily::PowerLog { alpha } => 1.0 / (t * t.ln().powf(alpha)),
            NamedFamily::LinearCutoff { rate } => (1.0 - rate * t).max(0.0),
            NamedFamily::Constant { value } => value,
        }
    }

    fn deriv(&self, t: f64) -> f64 {
        match *self {
            NamedFamily::Exponential { rate } => -rate * (-rate * t).exp(),
            NamedFamily::InverseSquare => -2.0 * (1.0 + t).powi(-3),
            NamedFamily::ShiftedPower { power } => -power * (1.0 + t).powf(-power - 1.0),
            NamedFamily::Power { power } => -power * t.powf(-power - 1.0),
            NamedFamily::PowerLog { alpha } => {
                let l = t.ln();
                -(1.0 / (t * t * l.powf(alpha)) + alpha / (t * t * l.powf(alpha + 1.0)))
            }
            NamedFamily::LinearCutoff { rate } => {
                if rate * t < 1.0 {
                    -rate
                } else {
                    0.0
                }
            }
            NamedFamily::Constant { .. } => 0.0,
        }
    }

    /// `∫_t^∞ g`, `INFINITY` when divergent.
    fn tail_integral(&self, t: f64) -> Option<f64> {
        Some(match *self {
            NamedFamily::Exponential { rate } => (-rate * t).exp() / rate,
            NamedFamily::InverseSquare => 1.0 / (1.0 + t),
            NamedFamily::ShiftedPower { power } if power > 1.0 => {
                (1.0 + t).powf(1.0 - power) / (power - 1.0)
            }
            NamedFamily::Power { power } if power > 1.0 => t.powf(1.0 - power) / (power - 1.0),
            NamedFamily::PowerLog { alpha } if alpha > 1.0 => {
                t.ln().powf(1.0 - alpha) / (alpha - 1.0)
            }
            NamedFamily::ShiftedPower { .. }
            | NamedFamily::Power { .. }
            | NamedFamily::PowerLog { .. } => f64::INFINITY,
            NamedFamily::LinearCutoff { rate } => {
                let r = (1.0 - rate * t).max(0.0);
                r * r / (2.0 * rate)
            }
            NamedFamily::Constant { value } => {
                if value == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        })
    }

    /// `∫_t^∞ √(-g')` when a closed form exists.
    fn sqrt_deriv_tail(&self, t: f64) -> Option<f64> {
        match *self {
            NamedFamily::Exponential { rate } => Some(2.0 * (-0.5 * rate * t).exp() / rate.sqrt()),
            NamedFamily::InverseSquare => Some(2.0 * 2f64.sqrt() / (1.0 + t).sqrt()),
            NamedFamily::ShiftedPower { power } if power > 1.0 => {
                Some(2.0 * power.sqrt() * (1.0 + t).powf(0.5 * (1.0 - power)) / (power - 1.0))
            }
            NamedFamily::Power { power } if power > 1.0 => {
                Some(2.0 * power.sqrt() * t.powf(0.5 * (1.0 - power)) / (power - 1.0))
            }
            NamedFamily::ShiftedPower { .. } | NamedFamily::Power { .. } => Some(f64::INFINITY),
            NamedFamily::PowerLog { alpha } if alpha <= 2.0 => Some(f64::INFINITY),
            NamedFamily::PowerLog { .. } => None,
            NamedFamily::LinearCutoff { rate } => Some(rate.sqrt() * (1.0 / rate - t).max(0.0)),
            NamedFamily::Constant { .. } => Some(0.0),
        }
    }

    fn flags(&self) -> CurveFlags {
        let sqrt_ok = match *self {
            NamedFamily::ShiftedPower { power } | NamedFamily::Power { power } => power > 1.0,
            NamedFamily::PowerLog { alpha } => alpha > 2.0,
            _ => true,
        };
        let limit_zero = match *self {
            NamedFamily::Constant { value } => value == 0.0,
            _ => true,
        };
        CurveFlags {
            monotone_decreasing: Flag::Asserted,
            convex: Flag::Asserted,
            limit_zero: Flag::from_bool(limit_zero),
            sqrt_deriv_integrable: Flag::from_bool(sqrt_ok),
        }
    }

    fn validate(&self) -> Result<(), CurveError> {
        let bad = |detail: String| {
            Err(CurveError::UnsupportedParameter {
                family: self.name(),
                detail,
            })
        };
        match *self {
            NamedFamily::Exponential { rate } | NamedFamily::LinearCutoff { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return bad(format!("rate must be positive, got {rate}"));
                }
            }
            NamedFamily::ShiftedPower { power } | NamedFamily::Power { power } => {
                if !(power.is_finite() && power > 0.0) {
                    return bad(format!("power must be positive, got {power}"));
                }
            }
            NamedFamily::PowerLog { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return bad(format!("alpha must be positive, got {alpha}"));
                }
            }
            NamedFamily::Constant { value } => {
                if !(value.is_finite() && value >= 0.0) {
                    return bad(format!("value must be finite and non-negative, got {value}"));
                }
            }
            NamedFamily::InverseSquare => {}
        }
        Ok(())
    }
}

/// Which staircase construction to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StaircaseVariant {
    /// `g = Σ 1/(R_n √φ(R_n)) 1_{(0, R_n]}`: piecewise-constant, integrable.
    Example2,
    /// `√(-g') = Σ 1/(R_n ∛φ(R_n)) 1_{(0, 2R_n]}`: piecewise-linear, convex.
    Example13,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseSpec {
    pub phi: RateFunction,
    pub radii: Vec<f64>,
    pub variant: StaircaseVariant,
}

impl StaircaseSpec {
    /// Radii `R_n = base^n` for `n = 1..=count`.
    pub fn geometric(phi: RateFunction, base: f64, count: usize, variant: StaircaseVariant) -> Self {
        StaircaseSpec {
            phi,
            radii: (1..=count).map(|n| base.powi(n as i32)).collect(),
            variant,
        }
    }

    /// Series weight `1/√φ(R_n)` or `1/∛φ(R_n)` whose summability the
    /// construction needs.
    pub fn series_term(&self, n: usize) -> f64 {
        let p = self.phi.eval(self.radii[n]);
        match self.variant {
            StaircaseVariant::Example2 => 1.0 / p.sqrt(),
            StaircaseVariant::Example13 => 1.0 / p.cbrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Staircase {
    variant: StaircaseVariant,
    phi: RateFunction,
    radii: Vec<f64>,
    /// Jump locations: `R_n` (example2) or `2 R_n` (example13).
    breaks: Vec<f64>,
    /// `suffix[k] = Σ_{n ≥ k} height_n`, with `suffix[N] = 0`.
    suffix: Vec<f64>,
    /// example13 only: `g(breaks[k])`.
    at_breaks: Vec<f64>,
}

impl Staircase {
    fn eval(&self, t: f64) -> f64 {
        // (0, R_n] is closed on the right: a break equal to t still counts.
        let k = self.breaks.partition_point(|&b| b < t);
        match self.variant {
            StaircaseVariant::Example2 => self.suffix[k],
            StaircaseVariant::Example13 => {
                if k == self.breaks.len() {
                    0.0
                } else {
                    let s = self.suffix[k];
                    self.at_breaks[k] + s * s * (self.breaks[k] - t.max(0.0))
                }
            }
        }
    }

    fn deriv(&self, t: f64) -> f64 {
        match self.variant {
            StaircaseVariant::Example2 => 0.0,
            StaircaseVariant::Example13 => {
                // right limit at jumps
                let k = self.breaks.partition_point(|&b| b <= t);
                let s = self.suffix[k];
                -s * s
            }
        }
    }

    fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        // (left, right, height) of each constant piece of g (example2) or of √(-g') (example13)
        (0..self.breaks.len()).map(move |k| {
            let left = if k == 0 { 0.0 } else { self.breaks[k - 1] };
            (left, self.breaks[k], self.suffix[k])
        })
    }

    fn tail_integral(&self, t: f64) -> f64 {
        match self.variant {
            StaircaseVariant::Example2 => self
                .pieces()
                .map(|(l, r, h)| h * (r - l.max(t)).max(0.0))
                .sum(),
            StaircaseVariant::Example13 => self
                .pieces()
                .map(|(l, r, h)| {
                    // ∫ (s - t) h² ds over (max(l, t), r]
                    let lo = l.max(t);
                    if r <= lo {
                        0.0
                    } else {
                        h * h * 0.5 * ((r - t).powi(2) - (lo - t).powi(2))
                    }
                })
                .sum(),
        }
    }

    fn sqrt_deriv_tail(&self, t: f64) -> Option<f64> {
        match self.variant {
            StaircaseVariant::Example2 => None,
            StaircaseVariant::Example13 => Some(
                self.pieces()
                    .map(|(l, r, h)| h * (r - l.max(t)).max(0.0))
                    .sum(),
            ),
        }
    }
}

/// `(t, g, g')` table. Piecewise-linear tables ignore `dg`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Table {
    t: Vec<f64>,
    g: Vec<f64>,
    dg: Vec<f64>,
}

impl Table {
    fn validate(&self) -> Result<(), CurveError> {
        if self.t.len() < 2 {
            return Err(CurveError::InvalidTable("need at least two knots".into()));
        }
        if self.g.len() != self.t.len() || self.dg.len() != self.t.len() {
            return Err(CurveError::InvalidTable("column lengths differ".into()));
        }
        if self.t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CurveError::InvalidTable(
                "knot times must be strictly increasing".into(),
            ));
        }
        if self.t.iter().chain(&self.g).chain(&self.dg).any(|v| !v.is_finite()) {
            return Err(CurveError::InvalidTable("non-finite entry".into()));
        }
        Ok(())
    }

    fn last(&self) -> usize {
        self.t.len() - 1
    }

    fn linear_eval(&self, t: f64) -> f64 {
        if t <= self.t[0] {
            return self.g[0];
        }
        if t >= self.t[self.last()] {
            return self.g[self.last()];
        }
        let i = hermite::locate(&self.t, t);
        let w = (t - self.t[i]) / (self.t[i + 1] - self.t[i]);
        self.g[i] + w * (self.g[i + 1] - self.g[i])
    }

    fn linear_deriv(&self, t: f64) -> f64 {
        if t >= self.t[self.last()] {
            return 0.0;
        }
        let i = self.t.partition_point(|&k| k <= t).saturating_sub(1);
        (self.g[i + 1] - self.g[i]) / (self.t[i + 1] - self.t[i])
    }

    fn hermite_eval(&self, t: f64) -> (f64, f64) {
        if t <= self.t[0] {
            return (self.g[0], self.dg[0]);
        }
        if t >= self.t[self.last()] {
            return (self.g[self.last()], 0.0);
        }
        let i = hermite::locate(&self.t, t);
        hermite::segment(
            self.t[i],
            self.t[i + 1],
            self.g[i],
            self.g[i + 1],
            self.dg[i],
            self.dg[i + 1],
            t,
        )
    }

    fn tail_after_last(&self) -> f64 {
        if self.g[self.last()] == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn linear_tail(&self, t: f64) -> f64 {
        let mut acc = self.tail_after_last();
        for i in 0..self.last() {
            let (a, b) = (self.t[i], self.t[i + 1]);
            if b <= t {
                continue;
            }
            let lo = a.max(t);
            let glo = self.linear_eval(lo);
            acc += 0.5 * (b - lo) * (glo + self.g[i + 1]);
        }
        if t < self.t[0] {
            acc += (self.t[0] - t) * self.g[0];
        }
        acc
    }

    fn linear_sqrt_tail(&self, t: f64) -> f64 {
        (0..self.last())
            .map(|i| {
                let (a, b) = (self.t[i], self.t[i + 1]);
                let slope = (self.g[i] - self.g[i + 1]) / (b - a);
                slope.max(0.0).sqrt() * (b - a.max(t)).max(0.0)
            })
            .sum()
    }

    fn hermite_tail(&self, t: f64) -> f64 {
        let mut acc = self.tail_after_last();
        for i in 0..self.last() {
            let (a, b) = (self.t[i], self.t[i + 1]);
            if b <= t {
                continue;
            }
            if a >= t {
                let h = b - a;
                acc += h * (self.g[i] + self.g[i + 1]) / 2.0 + h * h * (self.dg[i] - self.dg[i + 1]) / 12.0;
            } else {
                acc += quad::integrate(|s| self.hermite_eval(s).0, t, b, 1e-15).value;
            }
        }
        if t < self.t[0] {
            acc += (self.t[0] - t) * self.g[0];
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Named(NamedFamily),
    Staircase(Staircase),
    PiecewiseLinear(Table),
    Tabulated(Table),
    Envelope(Box<DecayCurve>),
}

/// A target excess-energy curve `t ↦ g(t)` on `[t_min, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    shape: Shape,
    t_min: f64,
    flags: CurveFlags,
}

/// Builds a closed-form curve.
pub fn make_named_curve(family: NamedFamily) -> Result<DecayCurve, CurveError> {
    family.validate()?;
    Ok(DecayCurve {
        shape: Shape::Named(family),
        t_min: family.t_min(),
        flags: family.flags(),
    })
}

/// Ratio-test estimate of the series tail beyond the truncation.
fn series_tail_estimate(terms: &[f64]) -> Option<f64> {
    let n = terms.len();
    if n < 2 {
        return Some(0.0);
    }
    let rho = terms[n - 1] / terms[n - 2];
    if !(rho < 1.0) {
        return None;
    }
    Some(terms[n - 1] * rho / (1.0 - rho))
}

/// Builds the staircase curve of `spec` truncated after `n` radii.
pub fn make_staircase(spec: &StaircaseSpec, n: usize) -> Result<DecayCurve, CurveError> {
    let fam = "staircase";
    if n > spec.radii.len() {
        return Err(CurveError::UnsupportedParameter {
            family: fam,
            detail: format!("truncation {n} exceeds {} radii", spec.radii.len()),
        });
    }
    let radii = spec.radii[..n].to_vec();
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(CurveError::UnsupportedParameter {
            family: fam,
            detail: "radii must be positive and strictly increasing".into(),
        });
    }
    let phis: Vec<f64> = radii.iter().map(|&r| spec.phi.eval(r)).collect();
    if phis.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(CurveError::UnsupportedParameter {
            family: fam,
            detail: "phi must be positive at every radius".into(),
        });
    }
    let terms: Vec<f64> = (0..n).map(|k| spec.series_term(k)).collect();
    let partial: f64 = terms.iter().sum();
    match series_tail_estimate(&terms) {
        Some(tail) if tail <= partial => {}
        other => {
            return Err(CurveError::DivergentSeries {
                n,
                tail: other.unwrap_or(f64::INFINITY),
                partial,
            })
        }
    }
    let (breaks, heights): (Vec<f64>, Vec<f64>) = match spec.variant {
        StaircaseVariant::Example2 => radii
            .iter()
            .zip(&phis)
            .map(|(&r, &p)| (r, 1.0 / (r * p.sqrt())))
            .unzip(),
        StaircaseVariant::Example13 => radii
            .iter()
            .zip(&phis)
            .map(|(&r, &p)| (2.0 * r, 1.0 / (r * p.cbrt())))
            .unzip(),
    };
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + heights[k];
    }
    let mut at_breaks = vec![0.0; n];
    if spec.variant == StaircaseVariant::Example13 {
        for k in (0..n.saturating_sub(1)).rev() {
            let s = suffix[k + 1];
            at_breaks[k] = at_breaks[k + 1] + s * s * (breaks[k + 1] - breaks[k]);
        }
    }
    let flags = match spec.variant {
        StaircaseVariant::Example2 => CurveFlags {
            monotone_decreasing: Flag::Asserted,
            convex: Flag::Unknown,
            limit_zero: Flag::Asserted,
            sqrt_deriv_integrable: Flag::Unknown,
        },
        StaircaseVariant::Example13 => CurveFlags::all(Flag::Asserted),
    };
    Ok(DecayCurve {
        shape: Shape::Staircase(Staircase {
            variant: spec.variant,
            phi: spec.phi,
            radii,
            breaks,
            suffix,
            at_breaks,
        }),
        t_min: 0.0,
        flags,
    })
}

impl DecayCurve {
    /// Piecewise-linear curve through `(t[i], g[i])`, constant after the last knot.
    pub fn piecewise_linear(t: Vec<f64>, g: Vec<f64>) -> Result<Self, CurveError> {
        let dg = vec![0.0; t.len()];
        let table = Table { t, g, dg };
        table.validate()?;
        let monotone = table.g.windows(2).all(|w| w[1] <= w[0]);
        let slopes: Vec<f64> = (0..table.last())
            .map(|i| (table.g[i + 1] - table.g[i]) / (table.t[i + 1] - table.t[i]))
            .collect();
        let convex = slopes.windows(2).all(|w| w[0] <= w[1]) && slopes.last().is_none_or(|&s| s <= 0.0);
        let limit_zero = table.g[table.last()] == 0.0;
        let t_min = table.t[0];
        Ok(DecayCurve {
            shape: Shape::PiecewiseLinear(table),
            t_min,
            flags: CurveFlags {
                monotone_decreasing: Flag::from_bool(monotone),
                convex: Flag::from_bool(convex && monotone),
                limit_zero: Flag::from_bool(limit_zero),
                sqrt_deriv_integrable: Flag::from_bool(limit_zero),
            },
        })
    }

    /// Cubic-Hermite interpolated table; constant after the last knot.
    pub fn tabulated(t: Vec<f64>, g: Vec<f64>, dg: Vec<f64>, flags: CurveFlags) -> Result<Self, CurveError> {
        let table = Table { t, g, dg };
        table.validate()?;
        let t_min = table.t[0];
        Ok(DecayCurve {
            shape: Shape::Tabulated(table),
            t_min,
            flags,
        })
    }

    pub(crate) fn envelope_of(base: DecayCurve) -> Self {
        let t_min = base.t_min;
        let limit = base.flags.limit_zero;
        DecayCurve {
            shape: Shape::Envelope(Box::new(base)),
            t_min,
            flags: CurveFlags {
                monotone_decreasing: Flag::Asserted,
                convex: Flag::Asserted,
                limit_zero: limit,
                sqrt_deriv_integrable: Flag::Unknown,
            },
        }
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn flags(&self) -> CurveFlags {
        self.flags
    }

    pub fn with_flags(mut self, flags: CurveFlags) -> Self {
        self.flags = flags;
        self
    }

    /// Short family name used in reports and file names.
    pub fn family(&self) -> &'static str {
        match &self.shape {
            Shape::Named(f) => f.name(),
            Shape::Staircase(s) => match s.variant {
                StaircaseVariant::Example2 => "staircase_example2",
                StaircaseVariant::Example13 => "staircase_example13",
            },
            Shape::PiecewiseLinear(_) => "piecewise_linear",
            Shape::Tabulated(_) => "tabulated",
            Shape::Envelope(_) => "envelope",
        }
    }

    pub fn named_family(&self) -> Option<NamedFamily> {
        match &self.shape {
            Shape::Named(f) => Some(*f),
            _ => None,
        }
    }

    /// `g(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Named(f) => f.eval(t),
            Shape::Staircase(s) => s.eval(t),
            Shape::PiecewiseLinear(tab) => tab.linear_eval(t),
            Shape::Tabulated(tab) => tab.hermite_eval(t).0,
            Shape::Envelope(base) => envelope_value(base, t),
        }
    }

    /// `g'(t)`; at a kink or jump of the derivative the right limit.
    pub fn deriv(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Named(f) => f.deriv(t),
            Shape::Staircase(s) => s.deriv(t),
            Shape::PiecewiseLinear(tab) => tab.linear_deriv(t),
            Shape::Tabulated(tab) => tab.hermite_eval(t).1,
            Shape::Envelope(base) => {
                if t <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    ((envelope_value(base, t) - base.eval(t)) / t).min(0.0)
                }
            }
        }
    }

    /// Closed-form `∫_t^∞ g`, `INFINITY` if divergent, `None` without a closed form.
    pub fn tail_integral(&self, t: f64) -> Option<f64> {
        match &self.shape {
            Shape::Named(f) => f.tail_integral(t),
            Shape::Staircase(s) => Some(s.tail_integral(t)),
            Shape::PiecewiseLinear(tab) => Some(tab.linear_tail(t)),
            Shape::Tabulated(tab) => Some(tab.hermite_tail(t)),
            Shape::Envelope(_) => None,
        }
    }

    /// Closed-form `∫_t^∞ √(-g')`, `INFINITY` if divergent, `None` without a closed form.
    pub fn sqrt_deriv_tail(&self, t: f64) -> Option<f64> {
        match &self.shape {
            Shape::Named(f) => f.sqrt_deriv_tail(t),
            Shape::Staircase(s) => s.sqrt_deriv_tail(t),
            Shape::PiecewiseLinear(tab) => Some(tab.linear_sqrt_tail(t)),
            Shape::Tabulated(_) | Shape::Envelope(_) => None,
        }
    }

    /// `∫_a^b g`: closed form where available, quadrature otherwise.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if let (Some(ta), Some(tb)) = (self.tail_integral(a), self.tail_integral(b)) {
            if ta.is_finite() && tb.is_finite() {
                return ta - tb;
            }
        }
        if a > 0.0 {
            quad::integrate_log_split(|t| self.eval(t), a, b, 1e-14).value
        } else {
            let head = quad::integrate(|t| self.eval(t), a, b.min(1.0), 1e-14).value;
            if b > 1.0 {
                head + quad::integrate_log_split(|t| self.eval(t), 1.0, b, 1e-14).value
            } else {
                head
            }
        }
    }

    /// Checks the curve invariants on `grid` and marks passing flags as
    /// verified. A failing check is an error only if it contradicts an
    /// asserted flag.
    pub fn verify_on(&self, grid: &[f64]) -> Result<DecayCurve, CurveError> {
        let tol = if matches!(self.shape, Shape::Named(_)) {
            ANALYTIC_TOL
        } else {
            FINITE_DIFFERENCE_TOL
        };
        let vals: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        if let Some((i, _)) = vals.iter().enumerate().find(|(_, &v)| v < -tol * scale) {
            return Err(CurveError::Negative { t: grid[i] });
        }
        let mut flags = self.flags;

        let monotone_bad = (0..grid.len().saturating_sub(1))
            .find(|&i| vals[i + 1] > vals[i] + tol * vals[i].abs().max(f64::MIN_POSITIVE))
            .or_else(|| grid.iter().position(|&t| self.deriv(t) > tol * scale));
        match monotone_bad {
            Some(i) if self.flags.monotone_decreasing.holds() => {
                return Err(CurveError::NotMonotone { t: grid[i] })
            }
            Some(_) => {}
            None => flags.monotone_decreasing = Flag::Verified,
        }

        let slopes: Vec<f64> = (0..grid.len().saturating_sub(1))
            .map(|i| (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i]))
            .collect();
        let convex_bad = (0..slopes.len().saturating_sub(1)).find(|&i| {
            let slack = tol * (slopes[i].abs() + slopes[i + 1].abs()) + 4.0 * f64::EPSILON * scale / (grid[i + 1] - grid[i]);
            slopes[i] > slopes[i + 1] + slack
        });
        match convex_bad {
            Some(i) if self.flags.convex.holds() => return Err(CurveError::NotConvex { t: grid[i + 1] }),
            Some(_) => {}
            None if grid.len() >= 3 => flags.convex = Flag::Verified,
            None => {}
        }

        if let Shape::Named(f) = &self.shape {
            if !matches!(f, NamedFamily::LinearCutoff { .. }) {
                for &t in grid {
                    let h = 1e-4 * t.abs().max(1.0);
                    let fd = (self.eval(t + h) - self.eval(t)) / h;
                    let d = self.deriv(t + 0.5 * h);
                    if (fd - d).abs() > FINITE_DIFFERENCE_TOL * d.abs() + 1e-12 * scale / h {
                        return Err(CurveError::DerivativeMismatch { t });
                    }
                }
            }
        }

        if let Some(tail) = self.tail_integral(self.t_min) {
            if tail.is_finite() && flags.monotone_decreasing.holds() {
                flags.limit_zero = Flag::Verified;
            }
        }
        if let Some(tail) = self.sqrt_deriv_tail(self.t_min) {
            if tail.is_finite() {
                flags.sqrt_deriv_integrable = Flag::Verified;
            }
        }
        Ok(DecayCurve {
            flags,
            ..self.clone()
        })
    }
}

fn envelope_value(base: &DecayCurve, t: f64) -> f64 {
    // t ∫_t^∞ g(s)/s² ds = ∫_0^1 g(t/u) du
    if t <= 0.0 {
        return base.eval(base.t_min);
    }
    let scale = base.eval(t).abs().max(f64::MIN_POSITIVE);
    quad::integrate(
        |u| if u <= 0.0 { 0.0 } else { base.eval(t / u) },
        0.0,
        1.0,
        1e-13 * scale,
    )
    .value
}

/// Riemann-sum estimate of `∫_{t_min}^{T} √(-g')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqrtDerivIntegral {
    /// `Σ √(h (g(t_i) - g(t_{i+1})))` over the uniform cells.
    pub value: f64,
    /// Bracketing bound `h (√(-g'(t_min)) - √(-g'(T)))`; infinite when the
    /// curve is not known to be convex.
    pub error_bound: f64,
    /// Closed-form `∫_T^∞ √(-g')` when available.
    pub tail: Option<f64>,
}

impl SqrtDerivIntegral {
    /// Estimate over `[t_min, ∞)` when the closed-form tail exists.
    pub fn total(&self) -> Option<f64> {
        self.tail.map(|t| self.value + t)
    }
}

/// Estimates `∫_{t_min}^{T} √(-g')` with `cells` uniform cells.
///
/// Each cell contributes `√(h Δg)` with `Δg` the exact increment of `g` over
/// the cell, so no derivative evaluations are needed. For convex curves the
/// cell term lies between the left and right Riemann terms of `√(-g')`.
pub fn sqrt_deriv_integral(curve: &DecayCurve, t_end: f64, cells: usize) -> Result<SqrtDerivIntegral, CurveError> {
    let t0 = curve.t_min();
    if !(t_end > t0) || cells == 0 {
        return Err(CurveError::UnsupportedParameter {
            family: curve.family(),
            detail: format!("need T > t_min = {t0} and at least one cell"),
        });
    }
    let h = (t_end - t0) / cells as f64;
    let mut prev = curve.eval(t0);
    let mut value = 0.0;
    for i in 1..=cells {
        let t = if i == cells { t_end } else { t0 + h * i as f64 };
        let g = curve.eval(t);
        let inc = prev - g;
        if inc < -1e-12 * prev.abs().max(f64::MIN_POSITIVE) {
            return Err(CurveError::NotMonotone { t });
        }
        value += (h * inc.max(0.0)).sqrt();
        prev = g;
    }
    let error_bound = if curve.flags().convex.holds() {
        let lead = (-curve.deriv(t0)).max(0.0).sqrt();
        let trail = (-curve.deriv(t_end)).max(0.0).sqrt();
        h * (lead - trail).max(0.0)
    } else {
        f64::INFINITY
    };
    Ok(SqrtDerivIntegral {
        value,
        error_bound,
        tail: curve.sqrt_deriv_tail(t_end).filter(|v| v.is_finite()),
    })
}

// ---------------------------------------------------------------------------
// Documents

/// Serializable form of a [`DecayCurve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveDocument {
    Named {
        family: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
        t_min: f64,
        flags: CurveFlags,
    },
    Staircase {
        variant: StaircaseVariant,
        phi_family: RateFunction,
        radii: Vec<f64>,
        #[serde(rename = "N")]
        n: usize,
    },
    Table {
        table: TableKind,
        t: Vec<f64>,
        g: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dg: Option<Vec<f64>>,
        flags: CurveFlags,
    },
    Envelope {
        envelope_of: Box<CurveDocument>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    PiecewiseLinear,
    Hermite,
}

impl DecayCurve {
    pub fn to_document(&self) -> CurveDocument {
        match &self.shape {
            Shape::Named(f) => CurveDocument::Named {
                family: f.name().to_string(),
                params: f.params(),
                t_min: self.t_min,
                flags: self.flags,
            },
            Shape::Staircase(s) => CurveDocument::Staircase {
                variant: s.variant,
                phi_family: s.phi,
                radii: s.radii.clone(),
                n: s.radii.len(),
            },
            Shape::PiecewiseLinear(tab) => CurveDocument::Table {
                table: TableKind::PiecewiseLinear,
                t: tab.t.clone(),
                g: tab.g.clone(),
                dg: None,
                flags: self.flags,
            },
            Shape::Tabulated(tab) => CurveDocument::Table {
                table: TableKind::Hermite,
                t: tab.t.clone(),
                g: tab.g.clone(),
                dg: Some(tab.dg.clone()),
                flags: self.flags,
            },
            Shape::Envelope(base) => CurveDocument::Envelope {
                envelope_of: Box::new(base.to_document()),
            },
        }
    }

    pub fn from_document(doc: &CurveDocument) -> Result<Self, CurveError> {
        match doc {
            CurveDocument::Named {
                family,
                params,
                t_min,
                flags,
            } => {
                let fam = NamedFamily::from_params(family, params)?;
                let mut curve = make_named_curve(fam)?;
                if *t_min < curve.t_min {
                    return Err(CurveError::InvalidDocument(format!(
                        "t_min {t_min} is below the domain start {} of {family}",
                        curve.t_min
                    )));
                }
                curve.t_min = *t_min;
                curve.flags = *flags;
                Ok(curve)
            }
            CurveDocument::Staircase {
                variant,
                phi_family,
                radii,
                n,
            } => make_staircase(
                &StaircaseSpec {
                    phi: *phi_family,
                    radii: radii.clone(),
                    variant: *variant,
                },
                *n,
            ),
            CurveDocument::Table {
                table,
                t,
                g,
                dg,
                flags,
            } => match table {
                TableKind::PiecewiseLinear => {
                    Ok(DecayCurve::piecewise_linear(t.clone(), g.clone())?.with_flags(*flags))
                }
                TableKind::Hermite => {
                    let dg = dg.clone().ok_or_else(|| {
                        CurveError::InvalidDocument("hermite table needs `dg`".into())
                    })?;
                    DecayCurve::tabulated(t.clone(), g.clone(), dg, *flags)
                }
            },
            CurveDocument::Envelope { envelope_of } => {
                Ok(DecayCurve::envelope_of(DecayCurve::from_document(envelope_of)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn exponential_values() {
        let g = make_named_curve(NamedFamily::Exponential { rate: 1.0 }).unwrap();
        for t in [0.0, 0.5, 3.0] {
            assert_eq!(g.eval(t), (-t).exp());
            assert_eq!(g.deriv(t), -(-t).exp());
        }
        assert_eq!(g.flags().convex, Flag::Asserted);
    }

    #[test]
    fn power_log_values() {
        let g = make_named_curve(NamedFamily::PowerLog { alpha: 1.5 }).unwrap();
        assert_eq!(g.t_min(), 2.0);
        let expected = 1.0 / (2.0 * 2f64.ln().powf(1.5));
        assert!((g.eval(2.0) - expected).abs() < 1e-15);
        let tail = g.tail_integral(2.0).unwrap();
        assert!((tail - 2f64.ln().powf(-0.5) / 0.5).abs() < 1e-12);
    }

    #[test]
    fn power_log_tail_matches_quadrature() {
        let g = make_named_curve(NamedFamily::PowerLog { alpha: 1.5 }).unwrap();
        let numeric = quad::integrate_log_split(|t| g.eval(t), 2.0, 1e6, 1e-14).value;
        let closed = g.tail_integral(2.0).unwrap() - g.tail_integral(1e6).unwrap();
        assert!((numeric - closed).abs() < 1e-9, "{numeric} vs {closed}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            make_named_curve(NamedFamily::PowerLog { alpha: 0.0 }),
            Err(CurveError::UnsupportedParameter { .. })
        ));
        assert!(make_named_curve(NamedFamily::Exponential { rate: -1.0 }).is_err());
        assert!(make_named_curve(NamedFamily::Constant { value: f64::NAN }).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for fam in [
            NamedFamily::Exponential { rate: 2.0 },
            NamedFamily::InverseSquare,
            NamedFamily::ShiftedPower { power: 1.0 },
            NamedFamily::Power { power: 1.5 },
            NamedFamily::PowerLog { alpha: 2.0 },
        ] {
            let g = make_named_curve(fam).unwrap();
            let grid = geometric_grid(g.t_min().max(1e-3), 1e4, 200);
            let v = g.verify_on(&grid).unwrap();
            assert_eq!(v.flags().monotone_decreasing, Flag::Verified, "{fam:?}");
            assert_eq!(v.flags().convex, Flag::Verified, "{fam:?}");
        }
    }

    #[test]
    fn sqrt_tails_match_quadrature() {
        for fam in [
            NamedFamily::Exponential { rate: 1.0 },
            NamedFamily::InverseSquare,
            NamedFamily::ShiftedPower { power: 3.0 },
            NamedFamily::Power { power: 1.5 },
        ] {
            let g = make_named_curve(fam).unwrap();
            let t = g.t_min() + 0.5;
            let numeric = quad::integrate_to_infinity(|s| (-g.deriv(s)).sqrt(), t, 1e-13).value;
            let closed = g.sqrt_deriv_tail(t).unwrap();
            assert!((numeric - closed).abs() < 1e-7 * closed, "{fam:?}: {numeric} vs {closed}");
        }
    }

    #[test]
    fn example2_integral_and_closed_interval() {
        let spec = StaircaseSpec::geometric(RateFunction::Identity, 4.0, 3, StaircaseVariant::Example2);
        let g = make_staircase(&spec, 3).unwrap();
        assert!((g.tail_integral(0.0).unwrap() - 0.875).abs() < 1e-15);
        // g(R_1) still contains the n = 1 term; just past R_1 it does not.
        let w1 = 1.0 / (4.0 * 2.0);
        assert!((g.eval(4.0) - g.eval(4.0 + 1e-9) - w1).abs() < 1e-15);
        assert_eq!(g.eval(64.0 + 1e-9), 0.0);
    }

    #[test]
    fn empty_staircase_is_zero() {
        let spec = StaircaseSpec::geometric(RateFunction::Identity, 4.0, 3, StaircaseVariant::Example2);
        let g = make_staircase(&spec, 0).unwrap();
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(10.0), 0.0);
        assert_eq!(g.tail_integral(0.0), Some(0.0));
    }

    #[test]
    fn divergent_staircase_is_rejected() {
        let spec = StaircaseSpec {
            phi: RateFunction::Identity,
            radii: (1..=50).map(|n| n as f64).collect(),
            variant: StaircaseVariant::Example2,
        };
        assert!(matches!(make_staircase(&spec, 50), Err(CurveError::DivergentSeries { .. })));
    }

    #[test]
    fn example13_is_convex_and_consistent() {
        let spec = StaircaseSpec::geometric(RateFunction::Identity, 4.0, 6, StaircaseVariant::Example13);
        let g = make_staircase(&spec, 6).unwrap();
        let grid: Vec<f64> = (0..4000).map(|i| i as f64 * 2.0).collect();
        let v = g.verify_on(&grid).unwrap();
        assert_eq!(v.flags().convex, Flag::Verified);
        // g(t) = ∫_t^∞ -g'
        for t in [0.0, 3.0, 8.0, 100.0, 2000.0] {
            let numeric: f64 = quad::integrate(|s| -g.deriv(s), t, 2.0 * 4096.0, 1e-12).value;
            assert!((numeric - g.eval(t)).abs() < 1e-9, "t={t}");
        }
        // derivative at a jump is the right limit
        let left = g.deriv(8.0 - 1e-9);
        assert_eq!(g.deriv(8.0), g.deriv(8.0 + 1e-9));
        assert!(g.deriv(8.0) > left);
    }

    #[test]
    fn sqrt_integral_of_exponential() {
        let g = make_named_curve(NamedFamily::Exponential { rate: 1.0 }).unwrap();
        let est = sqrt_deriv_integral(&g, 40.0, 400_000).unwrap();
        let total = est.total().unwrap();
        assert!((total - 2.0).abs() <= est.error_bound + 1e-12, "{est:?}");
        assert!(est.error_bound < 1e-4);
    }

    #[test]
    fn sqrt_integral_of_constant_is_zero() {
        let g = make_named_curve(NamedFamily::Constant { value: 3.0 }).unwrap();
        let est = sqrt_deriv_integral(&g, 10.0, 100).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn sqrt_integral_rejects_increasing_table() {
        let g = DecayCurve::piecewise_linear(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.8]).unwrap();
        assert!(matches!(sqrt_deriv_integral(&g, 2.0, 20), Err(CurveError::NotMonotone { .. })));
    }

    #[test]
    fn power_log_sqrt_integral_diverges_like_log_log() {
        let g = make_named_curve(NamedFamily::PowerLog { alpha: 2.0 }).unwrap();
        let est = sqrt_deriv_integral(&g, 1e6, 10_000_000).unwrap();
        let floor = 1e6f64.ln().ln() - 2f64.ln().ln();
        assert!(est.value >= floor - est.error_bound, "{} < {floor}", est.value);
    }

    #[test]
    fn linear_cutoff_sqrt_integral() {
        for r in [0.5, 4.0, 100.0] {
            let g = make_named_curve(NamedFamily::LinearCutoff { rate: r }).unwrap();
            assert!((g.sqrt_deriv_tail(0.0).unwrap() - 1.0 / r.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn documents_round_trip() {
        let curves = [
            make_named_curve(NamedFamily::PowerLog { alpha: 1.5 }).unwrap(),
            make_staircase(
                &StaircaseSpec::geometric(RateFunction::Identity, 4.0, 5, StaircaseVariant::Example13),
                5,
            )
            .unwrap(),
            DecayCurve::piecewise_linear(vec![0.0, 1.0, 3.0], vec![2.0, 1.0, 0.0]).unwrap(),
            DecayCurve::envelope_of(make_named_curve(NamedFamily::InverseSquare).unwrap()),
        ];
        for c in curves {
            let json = serde_json::to_string(&c.to_document()).unwrap();
            let doc: CurveDocument = serde_json::from_str(&json).unwrap();
            let back = DecayCurve::from_document(&doc).unwrap();
            for t in [0.0, 0.7, 2.5, 10.0] {
                let t = t + c.t_min();
                assert_eq!(back.eval(t), c.eval(t), "{json}");
            }
        }
    }

    #[test]
    fn document_rejects_unknown_parameter() {
        let doc: CurveDocument = serde_json::from_str(
            r#"{"family":"exponential","params":{"rate":1.0,"beta":2.0},"t_min":0.0,
               "flags":{"monotone_decreasing":"asserted","convex":"asserted","limit_zero":"asserted","sqrt_deriv_integrable":"asserted"}}"#,
        )
        .unwrap();
        assert!(DecayCurve::from_document(&doc).is_err());
    }
}
