use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use decaylab::flows::{
    default_heavy_ball_start, integrate_gradient_flow, integrate_heavy_ball_ode, run_gd, run_heavy_ball_scheme, run_sgd,
    Friction, Objective, Trajectory,
};
use decaylab::io::write_table;
use decaylab::majorize::{self, SequencePair};
use decaylab::suite::{self, SuiteOptions, ToleranceProfile};
use decaylab::verify::{self, BoundPoint, Claim, DecayReport, ExcessWeight, ProductWeight, SgdCheck, Verdict};
use decaylab::{spectral, sqrtcompare};
use rayon::prelude::*;

use crate::config::{self, ensure, load, Construction, HeavyBallMethod};
use crate::report::{create, write_text, Reports};
use crate::UsageError;

pub struct Ctx {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub profile: ToleranceProfile,
}

impl Ctx {
    fn out_dir(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("cannot create {}", self.out.display()))?;
        Ok(&self.out)
    }

    fn finish(&self, reports: &Reports) -> Result<Verdict> {
        reports.print();
        reports.write(self.out_dir()?)?;
        Ok(reports.verdict())
    }
}

fn write_trajectory(dir: &Path, stem: &str, tr: &Trajectory) -> Result<()> {
    let p = dir.join(format!("{stem}.csv"));
    tr.write_csv(BufWriter::new(create(&p)?)).with_context(|| p.display().to_string())?;
    write_text(&dir.join(format!("{stem}.json")), &tr.meta_json())
}

fn table(dir: &Path, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let p = dir.join(name);
    write_table(BufWriter::new(create(&p)?), header, rows).with_context(|| p.display().to_string())
}

fn usage(e: impl std::fmt::Display) -> UsageError {
    UsageError(e.to_string())
}

pub fn construct(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::ConstructConfig = load(ctx.config.as_deref())?;
    ensure(cfg.rel_tol >= 0.0, "rel_tol", "must be non-negative")?;
    let g = cfg.curve.build("curve")?;
    let grid = cfg.grid.times(&g, "grid")?;
    let obj = config::construct(&g, &grid, cfg.construction)?;
    let dir = ctx.out_dir()?;
    let p = dir.join("objective.csv");
    obj.write_csv(BufWriter::new(create(&p)?)).with_context(|| p.display().to_string())?;
    write_text(&dir.join("objective.json"), &serde_json::to_string_pretty(&obj.to_document())?)?;
    write_text(&dir.join("curve.json"), &serde_json::to_string_pretty(&g.to_document())?)?;
    println!("{} knots, x_right = {:.15e}, minimizer {:?}", obj.knots().len(), obj.x_right(), obj.minimizer());

    let mut reports = Reports::default();
    if cfg.check_flow && cfg.construction != Construction::HeavyBall {
        let t0 = grid[0];
        let span = grid[grid.len() - 1] - t0;
        let x0 = if cfg.construction == Construction::Standard { obj.x_right() } else { obj.knots()[0].x };
        let opts = ctx.profile.flow_options(decaylab::flows::SampleSchedule::Uniform { dt: span / 400.0 });
        let tr = integrate_gradient_flow(&obj, &[x0], span, &opts)?;
        let series = tr
            .samples
            .iter()
            .filter_map(|s| {
                let target = g.eval(t0 + s.t);
                (target > 0.0).then(|| BoundPoint {
                    t: s.t,
                    lhs: (s.f - target).abs() / target,
                    rhs: cfg.rel_tol,
                })
            })
            .collect();
        reports.add(DecayReport::bound("flow_realizes_curve", series, 0.0));
        write_trajectory(dir, "flow", &tr)?;
    }
    ctx.finish(&reports)
}

fn product_check(reports: &mut Reports, tr: &Trajectory, threshold: Option<f64>) {
    if let Some(th) = threshold {
        let horizon = tr.samples[0].t + 10.0;
        reports.add_result("decay_product_t", verify::decay_products(tr, ProductWeight::T, Claim::LimZero { threshold: th }, horizon));
    }
}

pub fn flow(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::FlowConfig = load(ctx.config.as_deref())?;
    ensure(cfg.t_end > 0.0 && cfg.t_end.is_finite(), "t_end", "must be positive")?;
    let built = cfg.objective.build()?;
    let x0 = config::start_point(&built, &cfg.x0)?;
    let base = ctx.profile.flow_options(cfg.schedule.clone());
    let tr = integrate_gradient_flow(built.objective.as_ref(), &x0, cfg.t_end, &base)?;
    write_trajectory(ctx.out_dir()?, "trajectory", &tr)?;

    let mut reports = Reports::default();
    match verify::lyapunov_gf(&tr, None, cfg.rel_tol) {
        Ok(l) => {
            reports.add(l.lyapunov);
            reports.add(l.rate);
        }
        Err(e) => reports.error("gf_lyapunov", e),
    }
    reports.add_result("excess_integral", verify::excess_integral(&tr, ExcessWeight::One, cfg.rel_tol));
    reports.add_result("energy_dissipation", verify::energy_dissipation(&tr, cfg.rel_tol));
    reports.add(verify::self_contracting_check(&tr, 0.0));
    product_check(&mut reports, &tr, cfg.product_threshold);
    ctx.finish(&reports)
}

pub fn gd(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::GdConfig = load(ctx.config.as_deref())?;
    let built = cfg.objective.build()?;
    let x0 = config::start_point(&built, &cfg.x0)?;
    let lip = cfg
        .lipschitz
        .or_else(|| built.objective.lipschitz())
        .ok_or_else(|| usage("field `lipschitz`: objective has no global constant, set it explicitly"))?;
    ensure(cfg.eta > 0.0 && cfg.eta * lip < 2.0, "eta", format!("need 0 < eta < 2/L = {}", 2.0 / lip))?;
    ensure(cfg.steps > 0, "steps", "must be positive")?;
    let tr = run_gd(built.objective.as_ref(), &x0, cfg.eta, cfg.steps, Some(lip))?;
    write_trajectory(ctx.out_dir()?, "trajectory", &tr)?;
    let mut reports = Reports::default();
    match verify::gd_sum_bound(&tr, cfg.eta, lip, cfg.threshold) {
        Ok(r) => {
            println!("eta Σ excess = {:.15e}", r.sum.series.last().map_or(0.0, |p| p.lhs));
            for rep in [r.sum, r.n_excess, r.n_log_n, r.descent] {
                reports.add(rep);
            }
        }
        Err(e) => reports.error("gd_sum", e),
    }
    ctx.finish(&reports)
}

pub fn sgd(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::SgdConfig = load(ctx.config.as_deref())?;
    let built = cfg.objective.build()?;
    let x0 = config::start_point(&built, &cfg.x0)?;
    let lip = cfg
        .lipschitz
        .or_else(|| built.objective.lipschitz())
        .ok_or_else(|| usage("field `lipschitz`: objective has no global constant, set it explicitly"))?;
    ensure(cfg.replicas >= 2, "replicas", "need at least 2")?;
    ensure(cfg.steps > 0, "steps", "must be positive")?;
    ensure(cfg.sigma >= 0.0, "sigma", "must be non-negative")?;
    let s = 1.0 + cfg.sigma * cfg.sigma;
    ensure(cfg.eta > 0.0 && lip * s * cfg.eta < 2.0, "eta", format!("need 0 < eta < 2/(L(1+σ²)) = {}", 2.0 / (lip * s)))?;
    let seed = ctx.seed.unwrap_or(cfg.seed);
    let run = decaylab::flows::SgdConfig {
        eta: cfg.eta,
        sigma: cfg.sigma,
        steps: cfg.steps,
        seed,
        noise: cfg.noise,
        replicas: cfg.replicas,
        lipschitz: Some(lip),
    };
    let reps = run_sgd(built.objective.as_ref(), &x0, &run)?;
    let dir = ctx.out_dir()?;

    let fstar = built.objective.infimum().unwrap_or(0.0);
    let m = reps.len() as f64;
    let mean: Vec<Vec<f64>> = (0..=cfg.steps)
        .map(|n| {
            let xs: Vec<f64> = reps.iter().map(|r| r.samples[n].f - fstar).collect();
            let mu = xs.iter().sum::<f64>() / m;
            let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (m - 1.0);
            vec![n as f64, mu, (var / m).sqrt()]
        })
        .collect();
    table(dir, "mean.csv", &["n", "mean_excess", "stderr"], &mean)?;
    let sums: Vec<Vec<f64>> = reps
        .iter()
        .enumerate()
        .map(|(k, r)| vec![k as f64, r.samples.iter().map(|s| s.f - fstar).sum(), r.last().f - fstar])
        .collect();
    table(dir, "replicas.csv", &["replica", "sum_excess", "final_excess"], &sums)?;

    let check = SgdCheck {
        eta: cfg.eta,
        lipschitz: lip,
        sigma: cfg.sigma,
        eps: cfg.eps,
        delta: cfg.delta,
    };
    let mut reports = Reports::default();
    match verify::sgd_bounds(&reps, &check) {
        Ok(r) => {
            println!("mean Σ excess = {:.6} ± {:.6} (seed {seed})", r.mean_sum_value, r.mean_sum_stderr);
            for rep in [r.mean_sum, r.mean_descent, r.almost_sure] {
                reports.add(rep);
            }
        }
        Err(e) => reports.error("sgd", e),
    }
    ctx.finish(&reports)
}

pub fn heavyball(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::HeavyBallConfig = load(ctx.config.as_deref())?;
    ensure(cfg.alpha > 0.0, "alpha", "must be positive")?;
    let built = cfg.objective.build()?;
    let x0 = config::start_point(&built, &cfg.x0)?;
    let obj = built.objective.as_ref();
    let (tr, t_end) = match &cfg.method {
        HeavyBallMethod::Scheme { h, steps } => {
            ensure(*h > 0.0, "method.h", "must be positive")?;
            (run_heavy_ball_scheme(obj, &x0, cfg.alpha, *h, *steps)?, *steps as f64 * h.sqrt())
        }
        HeavyBallMethod::Ode { t_start, t_end, schedule } => {
            let t0 = t_start.unwrap_or(default_heavy_ball_start(cfg.alpha, None, 0.0));
            ensure(t0 > 0.0 && *t_end > t0, "method.t_end", "need 0 < t_start < t_end")?;
            let opts = ctx.profile.flow_options(schedule.clone());
            (integrate_heavy_ball_ode(obj, &x0, Friction::Nesterov { alpha: cfg.alpha }, t0, *t_end, &opts)?, *t_end)
        }
    };
    write_trajectory(ctx.out_dir()?, "trajectory", &tr)?;

    let mut reports = Reports::default();
    if cfg.alpha >= 3.0 {
        match verify::hb_lyapunov(&tr, None, cfg.alpha, cfg.rel_tol) {
            Ok(r) => {
                reports.add(r.lyapunov);
                reports.add(r.energy);
                reports.add(r.rate);
            }
            Err(e) => reports.error("hb_lyapunov", e),
        }
    }
    if cfg.alpha > 3.0 {
        reports.add_result("excess_integral_t", verify::excess_integral(&tr, ExcessWeight::T, cfg.rel_tol));
    }
    let lower_obj = match &built.realized {
        Some((o, Construction::HeavyBall)) => Some(o as &dyn Objective),
        _ => None,
    };
    let window = (1.0f64.min(t_end), t_end);
    if let HeavyBallMethod::Ode { .. } = cfg.method {
        match verify::hb_speed_bound(&tr, lower_obj, window, cfg.rel_tol) {
            Ok(r) => {
                reports.add(r.speed);
                if let Some(l) = r.lower {
                    reports.add(l);
                }
            }
            Err(e) => reports.error("hb_speed", e),
        }
        reports.add_result("energy_dissipation", verify::energy_dissipation(&tr, cfg.rel_tol));
        reports.add(verify::total_energy_monotone(&tr, cfg.rel_tol));
    } else {
        reports.skip("hb_speed", "the scheme starts with velocity -√h ∇f(x0), not at rest");
    }
    ctx.finish(&reports)
}

fn fig1_markers(dir: &Path, panels: &[suite::Fig1Panel]) -> Result<()> {
    let rows: Vec<Vec<f64>> = panels.iter().map(|p| vec![p.alpha, p.mu, p.t_transition]).collect();
    table(dir, "markers.csv", &["alpha", "mu", "t_transition"], &rows)
}

fn fig1_report(reports: &mut Reports, p: &suite::Fig1Panel) {
    let c = suite::check_fig1_panel(p);
    let verdict = if c.passes(p.mu) { Verdict::Pass } else { Verdict::Fail };
    println!(
        "alpha {:>4} mu {:>6}: t_tr {:.4}, crossings {} before / {} after, min |x| before {:.4} (floor {:.4}), last spacing {} vs π/√μ {:.4}",
        p.alpha,
        p.mu,
        p.t_transition,
        c.early_crossings,
        c.late_crossings,
        c.min_overdamped,
        c.floor,
        c.last_interval.map_or("n/a".into(), |d| format!("{d:.4}")),
        c.half_period
    );
    reports.manual(&format!("oscillator_alpha{}_mu{}", p.alpha, p.mu), verdict, c.min_overdamped - c.floor, 0.0);
}

pub fn oscillator(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::OscillatorConfig = load(ctx.config.as_deref())?;
    ensure(cfg.mu > 0.0, "mu", "must be positive")?;
    ensure(cfg.alpha > 0.0, "alpha", "must be positive")?;
    ensure(cfg.h > 0.0, "h", "must be positive")?;
    let horizon = cfg.horizon.unwrap_or_else(|| suite::fig1_horizon(cfg.mu, &[cfg.alpha]));
    ensure(horizon > 0.0, "horizon", "must be positive")?;
    let panel = suite::fig1_panel(cfg.alpha, cfg.mu, cfg.h, horizon)?;
    let dir = ctx.out_dir()?;
    write_trajectory(dir, "trajectory", &panel.trajectory)?;
    fig1_markers(dir, std::slice::from_ref(&panel))?;
    let crossings: Vec<Vec<f64>> = suite::sign_changes(&panel.trajectory).into_iter().map(|t| vec![t]).collect();
    table(dir, "crossings.csv", &["t"], &crossings)?;
    let mut reports = Reports::default();
    fig1_report(&mut reports, &panel);
    ctx.finish(&reports)
}

pub fn reproduce_fig1(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::Fig1Config = load(ctx.config.as_deref())?;
    ensure(cfg.h > 0.0, "h", "must be positive")?;
    ensure(cfg.mus.iter().all(|&m| m > 0.0), "mus", "entries must be positive")?;
    ensure(cfg.alphas.iter().all(|&a| a > 0.0), "alphas", "entries must be positive")?;
    if cfg.alphas.is_empty() || cfg.mus.is_empty() {
        println!("no panels requested");
        return Ok(Verdict::Pass);
    }
    let panels = suite::fig1_panels(cfg.h, &cfg.alphas, &cfg.mus)?;
    let dir = ctx.out_dir()?;
    let mut reports = Reports::default();
    for p in &panels {
        let stem = format!("fig1_alpha{}_mu{}", p.alpha, p.mu);
        let path = dir.join(format!("{stem}.csv"));
        p.trajectory.write_csv(BufWriter::new(create(&path)?)).with_context(|| path.display().to_string())?;
        fig1_report(&mut reports, p);
    }
    fig1_markers(dir, &panels)?;
    ctx.finish(&reports)
}

pub fn hilbert(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::HilbertConfig = load(ctx.config.as_deref())?;
    ensure(cfg.s_max > 1.0, "s_max", "must exceed 1")?;
    ensure(cfg.nodes_per_decade > 0, "nodes_per_decade", "must be positive")?;
    let g = cfg.curve.build("curve")?;
    let times = cfg.times.times("times")?;
    let prof = spectral::build_profile(&g, cfg.s_max, cfg.nodes_per_decade).map_err(usage)?;
    let dir = ctx.out_dir()?;
    let rows = spectral::gf_table(&prof, &times);
    table(dir, "energy.csv", &["t", "energy", "chain", "g", "bias"], &rows)?;
    let mut reports = Reports::default();
    let lower: Vec<BoundPoint> = rows.iter().map(|r| BoundPoint { t: r[0], lhs: r[3] - r[4], rhs: r[1] }).collect();
    reports.add(DecayReport::bound("energy_above_g_minus_bias", lower, 0.0));
    let chain: Vec<BoundPoint> = rows.iter().map(|r| BoundPoint { t: r[0], lhs: r[2], rhs: r[1] }).collect();
    reports.add(DecayReport::bound("energy_above_chain", chain, 1e-12));
    println!("truncation bias e²g(S_max) = {:.3e}", prof.truncation_bias());

    if let Some(hb) = cfg.heavy_ball {
        ensure(hb.alpha >= 3.0 && hb.h > 0.0, "heavy_ball", "need alpha ≥ 3 and h > 0")?;
        let energies = times
            .par_iter()
            .map(|&t| spectral::hb_energy(&prof, hb.alpha, t, hb.h))
            .collect::<Result<Vec<_>, _>>()
            .map_err(usage)?;
        let rows: Vec<Vec<f64>> = energies
            .iter()
            .map(|e| vec![e.t, e.value, e.quoted_bound, e.mode_bound, e.min_mode_ratio])
            .collect();
        table(dir, "heavy_ball.csv", &["t", "energy", "quoted_bound", "mode_bound", "min_mode_ratio"], &rows)?;
        let series = energies.iter().map(|e| BoundPoint { t: e.t, lhs: e.mode_bound, rhs: e.value }).collect();
        reports.add(DecayReport::bound("hb_energy_above_mode_bound", series, 0.0));
    }
    if let Some(fl) = cfg.flatness {
        ensure(fl.n >= 1, "flatness.n", "must be positive")?;
        let rows = (1..=fl.n)
            .map(|n| spectral::flatness_sequence(fl.phi, n).map(|p| vec![n as f64, p.radius, p.norm, p.energy, p.bound, p.ratio]))
            .collect::<Result<Vec<_>, _>>()
            .map_err(usage)?;
        table(dir, "flatness.csv", &["n", "radius", "norm", "energy", "bound", "ratio"], &rows)?;
        let series = rows.iter().map(|r| BoundPoint { t: r[0], lhs: r[3], rhs: r[4] }).collect();
        reports.add(DecayReport::bound("flatness_energy_bound", series, 0.0));
    }
    ctx.finish(&reports)
}

pub fn majorize(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::MajorizeConfig = load(ctx.config.as_deref())?;
    let text = |xs: &[config::Entry]| xs.iter().map(|e| e.to_text()).collect::<Result<Vec<_>, _>>();
    let pair = SequencePair::parse(&text(&cfg.a)?, &text(&cfg.b)?).map_err(|e| usage(format!("fields `a`, `b`: {e}")))?;
    let mut reports = Reports::default();
    if let Some(i) = majorize::first_dominance_violation(&pair) {
        println!("tail-sum dominance fails at index {} (1-based)", i + 1);
        reports.manual("tail_dominance", Verdict::Fail, f64::NAN, 0.0);
        return ctx.finish(&reports);
    }
    reports.manual("tail_dominance", Verdict::Pass, 0.0, 0.0);
    let map = majorize::build_averaging_map_with_cap(&pair, cfg.cap).map_err(|e| usage(format!("field `cap`: {e}")))?;
    let dir = ctx.out_dir()?;
    write_text(&dir.join("map.txt"), &map.to_text())?;
    print!("{}", map.to_text());
    let exact = map.verify(&pair);
    if let Err(e) = &exact {
        println!("certificate rejected: {e}");
    }
    reports.manual("averaging_map_exact", if exact.is_ok() { Verdict::Pass } else { Verdict::Fail }, 0.0, 0.0);
    let chain = majorize::jensen_sqrt_certificate(&pair, &map);
    println!(
        "Σ√b = {:.15e} ≥ Σ√(avg a) = {:.15e} ≥ Σ√a = {:.15e}",
        chain.sum_b, chain.sum_averaged, chain.sum_a
    );
    reports.manual("sqrt_chain", if chain.holds() { Verdict::Pass } else { Verdict::Fail }, chain.sum_b - chain.sum_a, chain.slack);
    ctx.finish(&reports)
}

pub fn sqrtcmp(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::SqrtCmpConfig = load(ctx.config.as_deref())?;
    let dir = ctx.out_dir()?;
    let mut reports = Reports::default();
    if let Some(c) = &cfg.compare {
        let lower = c.lower.build("compare.lower")?;
        let upper = c.upper.build("compare.upper")?;
        match sqrtcompare::compare_sqrt_integrals(&lower, &upper, c.t_span, c.cells) {
            Ok(r) => {
                let p = dir.join("compare.csv");
                r.write_csv(BufWriter::new(create(&p)?)).with_context(|| p.display().to_string())?;
                println!(
                    "Σ√a = {:.12e}, Σ√b = {:.12e}; ∫√(-g') ≈ {:.6} ± {:.1e}, ∫√(-G') ≈ {:.6} ± {:.1e}",
                    r.sum_sqrt_a, r.sum_sqrt_b, r.estimate_g, r.error_bound_g, r.estimate_upper, r.error_bound_upper
                );
                if let Some(map) = &r.certificate {
                    write_text(&dir.join("compare_map.txt"), &map.to_text())?;
                }
                if !r.hypotheses {
                    println!("increments (tail included) are not both non-increasing; the discrete inequality is not guaranteed");
                }
                reports.manual("sqrt_sums", r.verdict(), r.sum_sqrt_b - r.sum_sqrt_a, 0.0);
            }
            Err(sqrtcompare::SqrtCompareError::NotDominated { t, lower, upper }) => {
                println!("upper curve {upper:.6e} lies below lower curve {lower:.6e} at t = {t}");
                reports.manual("upper_dominates_lower", Verdict::Fail, upper - lower, 0.0);
            }
            Err(e) => return Err(usage(format!("section `compare`: {e}")).into()),
        }
    }
    if let Some(f) = &cfg.fuzz {
        ensure(f.trials > 0 && f.max_cells > 0 && f.t_span > 0.0, "fuzz", "need positive trials, max_cells and t_span")?;
        let params = sqrtcompare::FuzzParams {
            trials: f.trials,
            max_cells: f.max_cells,
            seed: ctx.seed.unwrap_or(f.seed),
            t_span: f.t_span,
        };
        let cube: Option<fn(f64) -> f64> = if f.cube_root { Some(f64::cbrt) } else { None };
        let r = sqrtcompare::fuzz_counterexample_search(&params, cube);
        println!(
            "fuzz: {} trials, {} violations, {} certified, {} non-trivial, cube-root violations {:?}",
            r.trials, r.violations, r.certified, r.nontrivial, r.concave_violations
        );
        for rep in &r.reproducers {
            let p = dir.join(format!("reproducer_{}.csv", rep.trial));
            rep.write_csv(BufWriter::new(create(&p)?)).with_context(|| p.display().to_string())?;
        }
        let bad = r.violations + r.concave_violations.unwrap_or(0);
        reports.manual("fuzz_no_counterexample", if bad == 0 { Verdict::Pass } else { Verdict::Fail }, 0.0 - bad as f64, 0.0);
    }
    if let Some(b) = &cfg.barrier {
        ensure(b.alpha > 1.0, "barrier.alpha", "must exceed 1")?;
        ensure(b.t_long > b.t_short && b.t_short > 2.0, "barrier", "need 2 < t_short < t_long")?;
        ensure(b.cells_per_decade > 0, "barrier.cells_per_decade", "must be positive")?;
        let r = sqrtcompare::barrier_experiment(b.alpha, b.t_short, b.t_long, b.cells_per_decade).map_err(usage)?;
        println!(
            "barrier g_{}: ∫√(-g') ≈ {:.6} to T = {:.0e}, {:.6} to T = {:.0e}; ∫g = {:.6} (closed form {:.6})",
            r.alpha, r.estimate_short, r.t_short, r.estimate_long, r.t_long, r.integral_long, r.integral_closed
        );
        let verdict = if r.growth() >= b.min_growth { Verdict::Pass } else { Verdict::Fail };
        reports.manual("barrier_growth", verdict, r.growth() - b.min_growth, 0.0);
    }
    ctx.finish(&reports)
}

pub fn verify_all(ctx: &Ctx) -> Result<Verdict> {
    let cfg: config::VerifyAllConfig = load(ctx.config.as_deref())?;
    let all = suite::criteria();
    for id in &cfg.only {
        ensure(all.iter().any(|c| c.id == id), "only", format!("unknown criterion `{id}`"))?;
    }
    let opts = SuiteOptions {
        seed: ctx.seed.unwrap_or(cfg.seed),
        profile: ctx.profile,
    };
    let selected: Vec<_> = all.iter().filter(|c| cfg.only.is_empty() || cfg.only.iter().any(|o| o == c.id)).collect();
    let mut results = Vec::with_capacity(selected.len());
    for c in selected {
        let r = c.run(&opts);
        println!("{:<13} {:<18} {:>7.2} s  {}", r.verdict.to_string().to_uppercase(), r.id, r.elapsed.as_secs_f64(), r.title);
        for d in &r.details {
            println!("    {d}");
        }
        results.push(r);
    }
    let dir = ctx.out_dir()?;
    let path = dir.join("summary.csv");
    let mut w = csv::Writer::from_writer(BufWriter::new(create(&path)?));
    w.write_record(["id", "verdict", "budget_s", "title"])?;
    for r in &results {
        w.write_record([r.id.to_string(), r.verdict.to_string(), r.budget.as_secs().to_string(), r.title.to_string()])?;
    }
    w.flush()?;
    let details: String = results
        .iter()
        .map(|r| format!("[{}] {}\n{}\n", r.id, r.verdict, r.details.iter().map(|d| format!("  {d}\n")).collect::<String>()))
        .collect();
    write_text(&dir.join("details.txt"), &details)?;
    let overall = suite::overall(&results);
    println!("overall: {overall}");
    Ok(overall)
}
