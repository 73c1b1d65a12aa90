use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{norm, Objective};
use super::ode::{self, OdeOptions};
use super::trajectory::{Dynamics, Sample, Trajectory, TrajectoryMeta};
use super::FlowError;

/// Output times of an integrated trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleSchedule {
    /// `first · ratio^k`, preceded by the start time and closed by the end time.
    Geometric { first: f64, ratio: f64 },
    Uniform { dt: f64 },
    Times { times: Vec<f64> },
}

impl Default for SampleSchedule {
    fn default() -> Self {
        SampleSchedule::Geometric {
            first: 1e-3,
            ratio: 1.05,
        }
    }
}

impl SampleSchedule {
    /// Strictly increasing times in `[t0, t_end]`, starting at `t0` and ending at `t_end`.
    pub fn times(&self, t0: f64, t_end: f64) -> Vec<f64> {
        let mut out = vec![t0];
        let mut push = |t: f64| {
            if t > *out.last().unwrap() && t < t_end {
                out.push(t);
            }
        };
        match self {
            SampleSchedule::Geometric { first, ratio } => {
                let mut t = if t0 > 0.0 { first.max(t0 * ratio) } else { *first };
                while t < t_end && *ratio > 1.0 {
                    push(t);
                    t *= ratio;
                }
            }
            SampleSchedule::Uniform { dt } => {
                let n = ((t_end - t0) / dt).ceil() as usize;
                for i in 1..n {
                    push(t0 + dt * i as f64);
                }
            }
            SampleSchedule::Times { times } => {
                for &t in times {
                    push(t);
                }
            }
        }
        if t_end > t0 {
            out.push(t_end);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    pub schedule: SampleSchedule,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            rtol: 1e-9,
            atol: 1e-12,
            schedule: SampleSchedule::default(),
        }
    }
}

fn check_dim<O: Objective + ?Sized>(obj: &O, x0: &[f64]) -> Result<(), FlowError> {
    if obj.dim() != x0.len() {
        return Err(FlowError::DimensionMismatch {
            expected: obj.dim(),
            got: x0.len(),
        });
    }
    Ok(())
}

fn meta<O: Objective + ?Sized>(obj: &O, dynamics: Dynamics, params: &[(&str, f64)]) -> TrajectoryMeta {
    TrajectoryMeta {
        dynamics,
        params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
        seed: None,
        replica: None,
        noise: None,
        objective: obj.id(),
        xstar: obj.minimizer(),
        infimum: obj.infimum(),
    }
}

fn sample<O: Objective + ?Sized>(obj: &O, t: f64, x: &[f64], v: Option<&[f64]>, grad: &mut [f64]) -> Sample {
    obj.gradient(x, grad);
    Sample {
        t,
        x: x.to_vec(),
        v: v.map(|v| v.to_vec()),
        f: obj.value(x),
        gnorm: norm(grad),
    }
}

/// Integrates `ẋ = -∇f(x)` from `x0` on `[0, t_end]`.
///
/// The dissipated energy `∫‖∇f‖²` is carried as an extra state component and
/// stored in [`Trajectory::dissipated`].
pub fn integrate_gradient_flow<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    t_end: f64,
    opts: &FlowOptions,
) -> Result<Trajectory, FlowError> {
    check_dim(obj, x0)?;
    if !(t_end > 0.0) {
        return Err(FlowError::Precondition(format!("t_end must be positive, got {t_end}")));
    }
    let d = x0.len();
    let times = opts.schedule.times(0.0, t_end);
    let mut y0 = x0.to_vec();
    y0.push(0.0);
    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        ..OdeOptions::default()
    };
    let states = ode::integrate(
        |_, y, dy| {
            obj.gradient(&y[..d], &mut dy[..d]);
            let mut g2 = 0.0;
            for v in dy[..d].iter_mut() {
                g2 += *v * *v;
                *v = -*v;
            }
            dy[d] = g2;
        },
        0.0,
        &y0,
        &times,
        &ode_opts,
    )?;
    let mut grad = vec![0.0; d];
    let samples = times
        .iter()
        .zip(&states)
        .map(|(&t, y)| sample(obj, t, &y[..d], None, &mut grad))
        .collect();
    Ok(Trajectory {
        samples,
        dissipated: states.iter().map(|y| y[d]).collect(),
        meta: meta(
            obj,
            Dynamics::GradientFlow,
            &[("rtol", opts.rtol), ("atol", opts.atol), ("t_end", t_end)],
        ),
    })
}

fn descent_check(step: usize, before: f64, after: f64) -> Result<(), FlowError> {
    if !after.is_finite() || after > before + 1e-12 * before.abs().max(1e-300) {
        return Err(FlowError::Divergence { step, value: after });
    }
    Ok(())
}

/// Gradient descent `x_{n+1} = x_n - η∇f(x_n)` for `n < steps`.
pub fn run_gd<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    eta: f64,
    steps: usize,
    lipschitz: Option<f64>,
) -> Result<Trajectory, FlowError> {
    check_dim(obj, x0)?;
    if !(eta > 0.0) {
        return Err(FlowError::Precondition(format!("step size must be positive, got {eta}")));
    }
    if let Some(l) = lipschitz {
        if !(eta < 2.0 / l) {
            return Err(FlowError::Precondition(format!("step size {eta} is not below 2/L = {}", 2.0 / l)));
        }
    }
    let mut x = x0.to_vec();
    let mut grad = vec![0.0; x.len()];
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(sample(obj, 0.0, &x, None, &mut grad));
    for n in 0..steps {
        for (xi, gi) in x.iter_mut().zip(&grad) {
            *xi -= eta * gi;
        }
        let s = sample(obj, (n + 1) as f64, &x, None, &mut grad);
        descent_check(n + 1, samples[n].f, s.f)?;
        samples.push(s);
    }
    let mut params = vec![("eta", eta), ("steps", steps as f64)];
    if let Some(l) = lipschitz {
        params.push(("L", l));
    }
    Ok(Trajectory {
        samples,
        dissipated: Vec::new(),
        meta: meta(obj, Dynamics::GradientDescent, &params),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// `ζ = ±1`: meets the variance bound with equality.
    #[default]
    Rademacher,
    Gaussian,
}

impl NoiseModel {
    pub fn name(self) -> &'static str {
        match self {
            NoiseModel::Rademacher => "rademacher",
            NoiseModel::Gaussian => "gaussian",
        }
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            NoiseModel::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            NoiseModel::Gaussian => rng.sample(StandardNormal),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgdConfig {
    pub eta: f64,
    pub sigma: f64,
    pub steps: usize,
    pub seed: u64,
    pub noise: NoiseModel,
    pub replicas: usize,
    pub lipschitz: Option<f64>,
}

/// Random stream of `replica`: independent of scheduling and thread count.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// SGD with multiplicative noise `g_n = (1 + σζ_n)∇f(x_n)`, one trajectory
/// per replica. Replicas run in parallel and come back in replica order.
pub fn run_sgd<O: Objective + ?Sized>(obj: &O, x0: &[f64], cfg: &SgdConfig) -> Result<Vec<Trajectory>, FlowError> {
    check_dim(obj, x0)?;
    if !(cfg.eta > 0.0) || !(cfg.sigma >= 0.0) {
        return Err(FlowError::Precondition("need eta > 0 and sigma >= 0".into()));
    }
    if let Some(l) = cfg.lipschitz {
        let cap = 1.0 / (l * (1.0 + cfg.sigma * cfg.sigma));
        if cfg.eta > cap {
            return Err(FlowError::Precondition(format!(
                "step size {} exceeds 1/(L(1+σ²)) = {cap}",
                cfg.eta
            )));
        }
    }
    let mut params = vec![
        ("eta", cfg.eta),
        ("sigma", cfg.sigma),
        ("steps", cfg.steps as f64),
        ("replicas", cfg.replicas as f64),
    ];
    if let Some(l) = cfg.lipschitz {
        params.push(("L", l));
    }
    let base = meta(obj, Dynamics::Sgd, &params);
    Ok((0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(cfg.seed, r);
            let mut x = x0.to_vec();
            let mut grad = vec![0.0; x.len()];
            let mut samples = Vec::with_capacity(cfg.steps + 1);
            samples.push(sample(obj, 0.0, &x, None, &mut grad));
            for n in 0..cfg.steps {
                let scale = if cfg.sigma == 0.0 {
                    1.0
                } else {
                    1.0 + cfg.sigma * cfg.noise.draw(&mut rng)
                };
                for (xi, gi) in x.iter_mut().zip(&grad) {
                    *xi -= cfg.eta * (scale * gi);
                }
                samples.push(sample(obj, (n + 1) as f64, &x, None, &mut grad));
            }
            let mut m = base.clone();
            m.seed = Some(cfg.seed);
            m.replica = Some(r);
            m.noise = Some(cfg.noise.name().to_string());
            Trajectory {
                samples,
                dissipated: Vec::new(),
                meta: m,
            }
        })
        .collect())
}

/// Nesterov scheme `x_{n+1} = y_n - h∇f(y_n)`,
/// `y_{n+1} = x_{n+1} + n/(n+α)(x_{n+1} - x_n)`, recorded at `t_n = n√h`
/// with velocity `(x_{n+1} - x_n)/√h`. Values `α < 3` are accepted but fall
/// outside the regime the Lyapunov estimates cover.
pub fn run_heavy_ball_scheme<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    alpha: f64,
    h: f64,
    steps: usize,
) -> Result<Trajectory, FlowError> {
    check_dim(obj, x0)?;
    if !(h > 0.0) || !(alpha > 0.0) {
        return Err(FlowError::Precondition("need h > 0 and alpha > 0".into()));
    }
    let d = x0.len();
    let sq = h.sqrt();
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    xs.push(x0.to_vec());
    let mut y = x0.to_vec();
    let mut grad = vec![0.0; d];
    for n in 0..steps {
        obj.gradient(&y, &mut grad);
        let x_next: Vec<f64> = y.iter().zip(&grad).map(|(yi, gi)| yi - h * gi).collect();
        let mom = n as f64 / (n as f64 + alpha);
        let x_prev = &xs[n];
        for i in 0..d {
            y[i] = x_next[i] + mom * (x_next[i] - x_prev[i]);
        }
        if x_next.iter().any(|v| !v.is_finite() || v.abs() > 1e150) {
            return Err(FlowError::Divergence {
                step: n + 1,
                value: obj.value(&x_next),
            });
        }
        xs.push(x_next);
    }
    let samples = (0..=steps)
        .map(|n| {
            let (a, b) = if n < steps { (n, n + 1) } else { (n.saturating_sub(1), n) };
            let v: Vec<f64> = if steps == 0 {
                vec![0.0; d]
            } else {
                xs[b].iter().zip(&xs[a]).map(|(p, q)| (p - q) / sq).collect()
            };
            sample(obj, n as f64 * sq, &xs[n], Some(&v), &mut grad)
        })
        .collect();
    Ok(Trajectory {
        samples,
        dissipated: Vec::new(),
        meta: meta(
            obj,
            Dynamics::HeavyBallScheme,
            &[("alpha", alpha), ("h", h), ("steps", steps as f64)],
        ),
    })
}

/// Friction law of the second-order dynamics `ẍ = -c(t)ẋ - ∇f(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Friction {
    /// `c(t) = α/t`
    Nesterov { alpha: f64 },
    /// `c(t) = β`
    Constant { beta: f64 },
}

impl Friction {
    fn coefficient(self, t: f64) -> f64 {
        match self {
            Friction::Nesterov { alpha } => alpha / t,
            Friction::Constant { beta } => beta,
        }
    }
}

/// Default start time of the `α/t` integration: `max(h, 10⁻³)·α/(2√μ)` when
/// the curvature is known, `10⁻³` otherwise.
pub fn default_heavy_ball_start(alpha: f64, mu: Option<f64>, h: f64) -> f64 {
    match mu {
        Some(mu) if mu > 0.0 => h.max(1e-3) * alpha / (2.0 * mu.sqrt()),
        _ => 1e-3,
    }
}

/// Integrates `ẋ = v`, `v̇ = -c(t)v - ∇f(x)` with `v(t_start) = 0`.
///
/// The dissipated kinetic energy `∫c(t)‖v‖²` is tracked alongside.
pub fn integrate_heavy_ball_ode<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    friction: Friction,
    t_start: f64,
    t_end: f64,
    opts: &FlowOptions,
) -> Result<Trajectory, FlowError> {
    check_dim(obj, x0)?;
    if let Friction::Nesterov { .. } = friction {
        if !(t_start > 0.0) {
            return Err(FlowError::Precondition("α/t friction needs t_start > 0".into()));
        }
    }
    if !(t_end > t_start) {
        return Err(FlowError::Precondition("need t_end > t_start".into()));
    }
    let d = x0.len();
    let mut y0 = x0.to_vec();
    y0.extend(std::iter::repeat(0.0).take(d + 1));
    let times = opts.schedule.times(t_start, t_end);
    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        ..OdeOptions::default()
    };
    let states = ode::integrate(
        |t, y, dy| {
            let c = friction.coefficient(t);
            obj.gradient(&y[..d], &mut dy[d..2 * d]);
            let mut kinetic = 0.0;
            for i in 0..d {
                let v = y[d + i];
                dy[i] = v;
                dy[d + i] = -c * v - dy[d + i];
                kinetic += v * v;
            }
            dy[2 * d] = c * kinetic;
        },
        t_start,
        &y0,
        &times,
        &ode_opts,
    )?;
    let mut grad = vec![0.0; d];
    let samples = times
        .iter()
        .zip(&states)
        .map(|(&t, y)| sample(obj, t, &y[..d], Some(&y[d..2 * d]), &mut grad))
        .collect();
    let (dynamics, param) = match friction {
        Friction::Nesterov { alpha } => (Dynamics::HeavyBallOde, ("alpha", alpha)),
        Friction::Constant { beta } => (Dynamics::ConstantFriction, ("beta", beta)),
    };
    Ok(Trajectory {
        samples,
        dissipated: states.iter().map(|y| y[2 * d]).collect(),
        meta: meta(
            obj,
            dynamics,
            &[param, ("rtol", opts.rtol), ("t_start", t_start), ("t_end", t_end)],
        ),
    })
}

/// Nesterov oscillator `f(x) = μx²/2` with friction `α/t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    pub mu: f64,
    pub alpha: f64,
    pub x0: f64,
}

impl OscillatorSpec {
    pub fn new(mu: f64, alpha: f64, x0: f64) -> Result<Self, FlowError> {
        if !(mu > 0.0 && alpha > 0.0) {
            return Err(FlowError::Precondition("need mu > 0 and alpha > 0".into()));
        }
        Ok(OscillatorSpec { mu, alpha, x0 })
    }

    /// `α/(2√μ)`: the friction `α/t` equals the critical damping `2√μ`.
    pub fn t_transition(&self) -> f64 {
        self.alpha / (2.0 * self.mu.sqrt())
    }

    pub fn asymptotic_frequency(&self) -> f64 {
        self.mu.sqrt()
    }
}

/// Closed-form `(x(t), ẋ(t))` of `ẍ + βẋ + μx = 0`, `x(0) = x0`, `ẋ(0) = 0`.
pub fn classical_oscillator_solution(beta: f64, mu: f64, x0: f64, t: f64) -> (f64, f64) {
    let disc = 0.25 * beta * beta - mu;
    if disc.abs() <= 1e-12 * mu {
        let r = mu.sqrt();
        let e = (-r * t).exp();
        (x0 * (1.0 + r * t) * e, -x0 * r * r * t * e)
    } else if disc < 0.0 {
        let omega = (-disc).sqrt();
        let (c1, c2) = (x0, beta * x0 / (2.0 * omega));
        let e = (-0.5 * beta * t).exp();
        let (s, c) = (omega * t).sin_cos();
        let x = e * (c1 * c + c2 * s);
        let v = e * (-0.5 * beta * (c1 * c + c2 * s) + omega * (c2 * c - c1 * s));
        (x, v)
    } else {
        let root = disc.sqrt();
        let (lp, lm) = (-0.5 * beta + root, -0.5 * beta - root);
        let c1 = -lm * x0 / (lp - lm);
        let c2 = lp * x0 / (lp - lm);
        let (ep, em) = ((lp * t).exp(), (lm * t).exp());
        (c1 * ep + c2 * em, c1 * lp * ep + c2 * lm * em)
    }
}

#[cfg(test)]
mod tests {
    use super::super::objective::{Monomial, Quadratic};
    use super::*;

    #[test]
    fn gradient_flow_on_quadratic() {
        let obj = Quadratic::scalar(0.5);
        let tr = integrate_gradient_flow(&obj, &[2.0], 5.0, &FlowOptions::default()).unwrap();
        let last = tr.last();
        assert_eq!(last.t, 5.0);
        assert!((last.f - (-5f64).exp()).abs() < 1e-6 * (-5f64).exp());
        let diss = *tr.dissipated.last().unwrap();
        assert!((diss - (tr.samples[0].f - last.f)).abs() < 1e-8);
    }

    #[test]
    fn gradient_flow_at_minimizer_is_constant() {
        let obj = Quadratic::scalar(1.0);
        let tr = integrate_gradient_flow(&obj, &[0.0], 10.0, &FlowOptions::default()).unwrap();
        assert!(tr.samples.iter().all(|s| s.x[0] == 0.0 && s.f == 0.0));
    }

    #[test]
    fn quartic_flow() {
        let obj = Monomial { coeff: 1.0 / 64.0, power: 4.0 };
        let x0 = 2.0 * 2f64.sqrt();
        let tr = integrate_gradient_flow(&obj, &[x0], 100.0, &FlowOptions::default()).unwrap();
        for s in &tr.samples {
            let exact = (1.0 + s.t).powi(-2);
            assert!((s.f - exact).abs() < 1e-7 * exact, "t={}", s.t);
        }
    }

    #[test]
    fn gd_one_step_exact() {
        let obj = Quadratic::scalar(1.0);
        let tr = run_gd(&obj, &[3.0], 1.0, 5, Some(1.0)).unwrap();
        assert_eq!(tr.samples[1].x[0], 0.0);
        let s: f64 = tr.values().iter().sum();
        assert_eq!(s, 4.5);
    }

    #[test]
    fn gd_rejects_large_step() {
        let obj = Quadratic::scalar(1.0);
        assert!(matches!(run_gd(&obj, &[1.0], 3.0, 5, Some(1.0)), Err(FlowError::Precondition(_))));
        assert!(matches!(run_gd(&obj, &[1.0], 3.0, 5, None), Err(FlowError::Divergence { .. })));
    }

    #[test]
    fn sgd_without_noise_is_gd() {
        let obj = Quadratic::new(vec![1.0, 0.3]);
        let gd = run_gd(&obj, &[1.0, -2.0], 0.7, 50, None).unwrap();
        let cfg = SgdConfig {
            eta: 0.7,
            sigma: 0.0,
            steps: 50,
            seed: 1,
            noise: NoiseModel::Rademacher,
            replicas: 3,
            lipschitz: None,
        };
        for tr in run_sgd(&obj, &[1.0, -2.0], &cfg).unwrap() {
            let a: Vec<u64> = tr.values().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = gd.values().iter().map(|v| v.to_bits()).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sgd_is_reproducible_across_thread_counts() {
        let obj = Quadratic::scalar(1.0);
        let cfg = SgdConfig {
            eta: 0.5,
            sigma: 1.0,
            steps: 30,
            seed: 42,
            noise: NoiseModel::Gaussian,
            replicas: 16,
            lipschitz: Some(1.0),
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_sgd(&obj, &[1.0], &cfg).unwrap());
        let b = four.install(|| run_sgd(&obj, &[1.0], &cfg).unwrap());
        assert_eq!(a, b);
        assert_ne!(a[0].values(), a[1].values());
    }

    #[test]
    fn scheme_without_force_stays_put() {
        let obj = Quadratic::scalar(0.0);
        let tr = run_heavy_ball_scheme(&obj, &[1.5], 3.0, 0.01, 100).unwrap();
        assert!(tr.samples.iter().all(|s| s.x[0] == 1.5));
    }

    #[test]
    fn ode_without_force_stays_put() {
        let obj = Quadratic::scalar(0.0);
        let tr = integrate_heavy_ball_ode(&obj, &[1.5], Friction::Nesterov { alpha: 3.0 }, 1e-3, 10.0, &FlowOptions::default())
            .unwrap();
        assert!(tr.samples.iter().all(|s| s.x[0] == 1.5));
    }

    #[test]
    fn constant_friction_matches_closed_forms() {
        for (beta, mu) in [(2.0, 1.0), (0.5, 1.0), (5.0, 1.0), (0.0, 4.0)] {
            let obj = Quadratic::scalar(mu);
            let opts = FlowOptions {
                rtol: 1e-11,
                atol: 1e-13,
                schedule: SampleSchedule::Uniform { dt: 0.5 },
            };
            let tr = integrate_heavy_ball_ode(&obj, &[1.0], Friction::Constant { beta }, 0.0, 10.0, &opts).unwrap();
            for s in &tr.samples {
                let (x, v) = classical_oscillator_solution(beta, mu, 1.0, s.t);
                assert!((s.x[0] - x).abs() < 1e-6, "beta={beta} t={}", s.t);
                assert!((s.v.as_ref().unwrap()[0] - v).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn closed_form_special_cases() {
        assert_eq!(classical_oscillator_solution(1.0, 2.0, 3.0, 0.0), (3.0, 0.0));
        let (x, _) = classical_oscillator_solution(0.0, 4.0, 1.0, 0.7);
        assert!((x - (1.4f64).cos()).abs() < 1e-15);
        let (x, _) = classical_oscillator_solution(2.0, 1.0, 1.0, 2.0);
        assert!((x - 3.0 * (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn schedule_endpoints() {
        let t = SampleSchedule::default().times(0.0, 10.0);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 10.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        let t = SampleSchedule::default().times(0.5, 10.0);
        assert_eq!(t[0], 0.5);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }
}
