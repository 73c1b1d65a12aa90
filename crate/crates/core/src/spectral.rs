//! Diagonal quadratic `F(u) = ½∫₁^∞ u(s)²/s ds` on a truncated log grid.
//!
//! Each node `s_j` is an independent mode with curvature `μ_j = 1/s_j`, so
//! gradient flow is explicit (`u(t, s) = e^{-t/s} u₀(s)`) and heavy-ball
//! dynamics reduce to one scalar oscillator per node.

use std::f64::consts::E;

use rayon::prelude::*;
use thiserror::Error;

use crate::curves::{DecayCurve, RateFunction};
use crate::flows::{run_heavy_ball_scheme, FlowError, Quadratic};

pub const DEFAULT_NODES_PER_DECADE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("curve is not integrable on [1, ∞)")]
    NonIntegrable,
    #[error("curve must be monotone decreasing and defined from t = 1")]
    BadCurve,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mode s = {s}: {source}")]
    Mode { s: f64, source: FlowError },
}

/// Initial datum `u₀(s) = √(-2e² s g'(s))` on `[1, S_max]`.
#[derive(Clone, Debug)]
pub struct SpectralProfile {
    pub s: Vec<f64>,
    /// Trapezoid weights in `log s`, so `Σ w_j h(s_j) ≈ ∫ h(s) ds`.
    pub w: Vec<f64>,
    pub u0: Vec<f64>,
    pub curve: DecayCurve,
}

impl SpectralProfile {
    pub fn s_max(&self) -> f64 {
        *self.s.last().unwrap()
    }

    /// Bound `e² g(S_max)` on the energy lost by truncating at `S_max`.
    pub fn truncation_bias(&self) -> f64 {
        E * E * self.curve.eval(self.s_max())
    }

    pub fn curvatures(&self) -> Vec<f64> {
        self.s.iter().map(|s| 1.0 / s).collect()
    }

    /// `Σ w_j u₀_j²`.
    pub fn norm_squared(&self) -> f64 {
        self.w.iter().zip(&self.u0).map(|(w, u)| w * u * u).sum()
    }

    /// `(1/2e²) Σ_{s_j ≥ t} w_j u₀_j²/s_j`: the middle term of the lower-bound chain.
    pub fn chain_term(&self, t: f64) -> f64 {
        0.5 / (E * E)
            * self
                .s
                .iter()
                .zip(&self.w)
                .zip(&self.u0)
                .filter(|((s, _), _)| **s >= t)
                .map(|((s, w), u)| w * u * u / s)
                .sum::<f64>()
    }
}

/// Log-spaced grid `10^{j/npd}` on `[1, s_max]` with trapezoid weights in `log s`.
pub fn log_grid(s_max: f64, nodes_per_decade: usize) -> (Vec<f64>, Vec<f64>) {
    let decades = s_max.log10();
    let m = ((decades * nodes_per_decade as f64).ceil() as usize).max(1);
    let s: Vec<f64> = (0..=m)
        .map(|j| if j == m { s_max } else { 10f64.powf(j as f64 / nodes_per_decade as f64) })
        .collect();
    let ls: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let mut w = vec![0.0; s.len()];
    for j in 0..m {
        let d = 0.5 * (ls[j + 1] - ls[j]);
        w[j] += d * s[j];
        w[j + 1] += d * s[j + 1];
    }
    (s, w)
}

pub fn build_profile(curve: &DecayCurve, s_max: f64, nodes_per_decade: usize) -> Result<SpectralProfile, SpectralError> {
    if !(s_max > 1.0) || nodes_per_decade == 0 {
        return Err(SpectralError::InvalidParameter("need S_max > 1 and nodes > 0".into()));
    }
    if !curve.flags().monotone_decreasing.holds() || curve.t_min() > 1.0 {
        return Err(SpectralError::BadCurve);
    }
    if let Some(tail) = curve.tail_integral(1.0) {
        if !tail.is_finite() {
            return Err(SpectralError::NonIntegrable);
        }
    }
    let (s, w) = log_grid(s_max, nodes_per_decade);
    let u0 = s
        .iter()
        .map(|&s| (-2.0 * E * E * s * curve.deriv(s)).max(0.0).sqrt())
        .collect();
    Ok(SpectralProfile {
        s,
        w,
        u0,
        curve: curve.clone(),
    })
}

/// `F(u(t)) = ½ Σ w_j u₀_j² e^{-2t/s_j}/s_j` along the gradient flow.
pub fn gf_energy(profile: &SpectralProfile, t: f64) -> f64 {
    0.5 * profile
        .s
        .iter()
        .zip(&profile.w)
        .zip(&profile.u0)
        .map(|((s, w), u)| w * u * u * (-2.0 * t / s).exp() / s)
        .sum::<f64>()
}

/// Rows `t, F_numeric, F_lower_bound, g_target, bias` for the gradient-flow
/// experiment; the lower bound is the chain term.
pub fn gf_table(profile: &SpectralProfile, times: &[f64]) -> Vec<Vec<f64>> {
    let bias = profile.truncation_bias();
    times
        .iter()
        .map(|&t| vec![t, gf_energy(profile, t), profile.chain_term(t), profile.curve.eval(t), bias])
        .collect()
}

/// `u_n = (1/n) 1_{(R_n, 1 + R_n)}` with `R_n = 1/φ(1/n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatnessPoint {
    pub n: usize,
    pub radius: f64,
    /// `‖u_n‖ = 1/n`.
    pub norm: f64,
    /// `F(u_n) = log(1 + 1/R_n)/(2n²)`.
    pub energy: f64,
    /// `1/(n R_n)`.
    pub bound: f64,
    /// `F(u_n)/φ(‖u_n‖)`.
    pub ratio: f64,
}

pub fn flatness_sequence(phi: RateFunction, n: usize) -> Result<FlatnessPoint, SpectralError> {
    if n == 0 {
        return Err(SpectralError::InvalidParameter("n must be at least 1".into()));
    }
    let nf = n as f64;
    let p = phi.eval(1.0 / nf);
    if !(p > 0.0) {
        return Err(SpectralError::InvalidParameter("phi(1/n) must be positive".into()));
    }
    let radius = 1.0 / p;
    let energy = (1.0 / radius).ln_1p() / (2.0 * nf * nf);
    Ok(FlatnessPoint {
        n,
        radius,
        norm: 1.0 / nf,
        energy,
        bound: 1.0 / (nf * radius),
        ratio: energy / p,
    })
}

/// Heavy-ball energy of the spectral profile at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HbEnergy {
    pub t: f64,
    /// `F(u(t))` from per-mode simulations.
    pub value: f64,
    /// `e^{-α/4} Σ_{s_j ≥ 4t²/α²} w_j u₀_j²/s_j`, the bound in its quoted form.
    pub quoted_bound: f64,
    /// `½ e^{-α/2} Σ_{s_j ≥ 4t²/α²} w_j u₀_j²/s_j`, what the per-mode
    /// estimate `|u(t)| ≥ e^{-α/4}|u₀|` yields.
    pub mode_bound: f64,
    /// Smallest `|u_j(t)|/u₀_j` over the modes with `s_j ≥ 4t²/α²`.
    pub min_mode_ratio: f64,
}

/// Runs every mode through the Nesterov scheme with step `h` up to time `t`.
pub fn hb_energy(profile: &SpectralProfile, alpha: f64, t: f64, h: f64) -> Result<HbEnergy, SpectralError> {
    if !(alpha >= 3.0) || !(h > 0.0) || !(t >= 0.0) {
        return Err(SpectralError::InvalidParameter("need alpha >= 3, h > 0, t >= 0".into()));
    }
    let steps = (t / h.sqrt()).round() as usize;
    let ratios: Vec<f64> = profile
        .s
        .par_iter()
        .map(|&s| {
            let tr = run_heavy_ball_scheme(&Quadratic::scalar(1.0 / s), &[1.0], alpha, h, steps)
                .map_err(|source| SpectralError::Mode { s, source })?;
            Ok(tr.last().x[0])
        })
        .collect::<Result<_, SpectralError>>()?;
    let cut = 4.0 * t * t / (alpha * alpha);
    let mut value = 0.0;
    let mut tail = 0.0;
    let mut min_ratio = f64::INFINITY;
    for j in 0..profile.s.len() {
        let (s, w, u) = (profile.s[j], profile.w[j], profile.u0[j]);
        value += 0.5 * w * (u * ratios[j]).powi(2) / s;
        if s >= cut {
            tail += w * u * u / s;
            min_ratio = min_ratio.min(ratios[j].abs());
        }
    }
    Ok(HbEnergy {
        t,
        value,
        quoted_bound: (-alpha / 4.0).exp() * tail,
        mode_bound: 0.5 * (-alpha / 2.0).exp() * tail,
        min_mode_ratio: min_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{make_named_curve, NamedFamily};

    fn power(p: f64) -> DecayCurve {
        make_named_curve(NamedFamily::Power { power: p }).unwrap()
    }

    #[test]
    fn profile_of_power_law() {
        let prof = build_profile(&power(1.5), 1e4, 64).unwrap();
        for (s, u) in prof.s.iter().zip(&prof.u0) {
            let exact = (3.0 * E * E).sqrt() * s.powf(-0.75);
            assert!((u - exact).abs() < 1e-12 * exact);
        }
        assert!(prof.curvatures().iter().all(|&m| m > 0.0 && m <= 1.0));
    }

    #[test]
    fn norm_identity() {
        let g = power(1.5);
        let prof = build_profile(&g, 1e4, 64).unwrap();
        let r = prof.s_max();
        let lhs = prof.norm_squared() / (2.0 * E * E);
        let rhs = g.eval(1.0) - r * g.eval(r) + g.integral(1.0, r);
        assert!((lhs - rhs).abs() < 1e-3 * rhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn energy_at_zero() {
        let g = power(1.5);
        let prof = build_profile(&g, 1e4, 64).unwrap();
        let exact = E * E * (g.eval(1.0) - g.eval(1e4));
        assert!((gf_energy(&prof, 0.0) - exact).abs() < 1e-3 * exact);
    }

    #[test]
    fn zero_curve_gives_zero_energy() {
        let g = make_named_curve(NamedFamily::Constant { value: 0.0 }).unwrap();
        let prof = build_profile(&g, 100.0, 16).unwrap();
        assert!(prof.u0.iter().all(|&u| u == 0.0));
        assert_eq!(gf_energy(&prof, 3.0), 0.0);
    }

    #[test]
    fn lower_bound_chain() {
        let g = power(1.5);
        let prof = build_profile(&g, 1e4, 64).unwrap();
        let bias = prof.truncation_bias();
        for t in [1.0, 10.0, 100.0] {
            let f = gf_energy(&prof, t);
            let mid = prof.chain_term(t);
            assert!(f >= mid && mid >= g.eval(t) - bias, "t={t}");
        }
    }

    #[test]
    fn non_integrable_rejected() {
        let g = power(1.0);
        assert!(matches!(build_profile(&g, 100.0, 8), Err(SpectralError::NonIntegrable)));
    }

    #[test]
    fn flatness_closed_form() {
        let p = flatness_sequence(RateFunction::Identity, 1).unwrap();
        assert_eq!(p.norm, 1.0);
        assert_eq!(p.radius, 1.0);
        for n in [2, 10, 1000] {
            let p = flatness_sequence(RateFunction::Identity, n).unwrap();
            let nf = n as f64;
            assert!((p.energy - ((1.0 + nf) / nf).ln() / (2.0 * nf * nf)).abs() < 1e-15);
            assert!(p.energy <= 1.0 / (nf * nf));
        }
    }

    #[test]
    fn hb_energy_at_zero_is_gf_energy() {
        let prof = build_profile(&power(1.5), 1e3, 16).unwrap();
        let e = hb_energy(&prof, 3.0, 0.0, 1e-3).unwrap();
        assert!((e.value - gf_energy(&prof, 0.0)).abs() < 1e-12);
    }
}
