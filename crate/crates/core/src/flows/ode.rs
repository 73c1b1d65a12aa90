//! Dormand–Prince 5(4) integrator with PI step-size control.
//!
//! Steps are clamped so that every requested output time is hit exactly;
//! no dense output is used.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64, state: Vec<f64> },
    #[error("step budget of {steps} exhausted at t = {t}")]
    TooManySteps { t: f64, steps: usize, state: Vec<f64> },
}

impl OdeError {
    /// Last state that passed the error test.
    pub fn last_good_state(&self) -> (f64, &[f64]) {
        match self {
            OdeError::StepUnderflow { t, state, .. }
            | OdeError::NonFinite { t, state }
            | OdeError::TooManySteps { t, state, .. } => (*t, state),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; estimated from the right-hand side when absent.
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h0: None,
            max_steps: 10_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;

/// Integrates `y' = rhs(t, y)` from `(t0, y0)` and returns the state at each
/// time in `outputs` (ascending, all `≥ t0`).
pub fn integrate<F>(mut rhs: F, t0: f64, y0: &[f64], outputs: &[f64], opts: &OdeOptions) -> Result<Vec<Vec<f64>>, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    rhs(t, &y, &mut k[0]);
    let mut h = opts.h0.unwrap_or_else(|| initial_step(&mut rhs, t, &y, &k[0], opts));
    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(outputs.len());

    for &target in outputs {
        while t < target {
            if steps >= opts.max_steps {
                return Err(OdeError::TooManySteps { t, steps, state: y });
            }
            let remaining = target - t;
            let clamped = h >= remaining;
            let step = if clamped { remaining } else { h };
            if step <= 16.0 * f64::EPSILON * t.abs().max(1e-300) && !clamped {
                return Err(OdeError::StepUnderflow { t, h: step, state: y });
            }
            steps += 1;

            for i in 0..n {
                tmp[i] = y[i] + step * A21 * k[0][i];
            }
            rhs(t + C2 * step, &tmp, &mut k[1]);
            for i in 0..n {
                tmp[i] = y[i] + step * (A31 * k[0][i] + A32 * k[1][i]);
            }
            rhs(t + C3 * step, &tmp, &mut k[2]);
            for i in 0..n {
                tmp[i] = y[i] + step * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
            }
            rhs(t + C4 * step, &tmp, &mut k[3]);
            for i in 0..n {
                tmp[i] = y[i] + step * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
            }
            rhs(t + C5 * step, &tmp, &mut k[4]);
            for i in 0..n {
                tmp[i] = y[i]
                    + step * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
            }
            let t_new = if clamped { target } else { t + step };
            rhs(t_new, &tmp, &mut k[5]);
            for i in 0..n {
                y_new[i] = y[i]
                    + step * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
            }
            rhs(t_new, &y_new, &mut k[6]);

            let mut err = 0.0;
            for i in 0..n {
                let e = step
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                if step <= 16.0 * f64::EPSILON * t.abs().max(1e-300) {
                    return Err(OdeError::NonFinite { t, state: y });
                }
                h = step * FAC_MIN;
                continue;
            }

            if err <= 1.0 {
                let fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * err.powf(-EXPO) * err_old.powf(BETA)).clamp(FAC_MIN, FAC_MAX)
                };
                err_old = err.max(1e-4);
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                // A step shortened to hit an output says nothing about the natural size.
                h = if clamped { h.max(step * fac) } else { step * fac };
            } else {
                let fac = (SAFETY * err.powf(-EXPO)).clamp(FAC_MIN, 1.0);
                h = step * fac;
                if h <= 16.0 * f64::EPSILON * t.abs().max(1e-300) {
                    return Err(OdeError::StepUnderflow { t, h, state: y });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step<F>(rhs: &mut F, t: f64, y: &[f64], f0: &[f64], opts: &OdeOptions) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len().max(1) as f64;
    let sc = |i: usize| opts.atol + opts.rtol * y[i].abs();
    let d0 = (y.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    rhs(t + h0, &y1, &mut f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .enumerate()
        .map(|(i, (a, b))| ((a - b) / sc(i)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let out = integrate(
            |_, y, dy| dy[0] = -y[0],
            0.0,
            &[1.0],
            &[1.0, 5.0, 20.0],
            &OdeOptions {
                atol: 1e-20,
                ..OdeOptions::default()
            },
        )
        .unwrap();
        for (y, t) in out.iter().zip([1.0f64, 5.0, 20.0]) {
            assert!((y[0] - (-t).exp()).abs() < 1e-7 * (-t).exp(), "t={t}: {}", y[0]);
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let out = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            &[10.0],
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((out[0][0] - 10f64.cos()).abs() < 1e-8);
        assert!((out[0][1] + 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn output_at_start_returns_initial_state() {
        let out = integrate(|_, _, dy| dy[0] = 1.0, 2.0, &[3.0], &[2.0, 3.0], &OdeOptions::default()).unwrap();
        assert_eq!(out[0], vec![3.0]);
        assert!((out[1][0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn blow_up_reports_last_good_state() {
        // y' = y², y(0) = 1 blows up at t = 1
        let err = integrate(|_, y, dy| dy[0] = y[0] * y[0], 0.0, &[1.0], &[2.0], &OdeOptions::default())
            .unwrap_err();
        let (t, state) = err.last_good_state();
        assert!(t < 1.0 && t > 0.99, "{err:?}");
        assert!(state[0] > 100.0);
    }
}
