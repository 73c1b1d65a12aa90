//! TOML run configurations. Every file carries `schema_version = 1`; absent
//! fields take the defaults below, unknown fields are rejected. The version
//! field defaults to 0 so that a missing one is caught by [`load`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use decaylab::construct::{build_heavy_ball_objective, build_no_minimizer_objective, build_objective, ConvexObjective1D, ObjectiveDocument};
use decaylab::curves::{
    make_named_curve, make_staircase, CurveDocument, DecayCurve, NamedFamily, RateFunction, StaircaseSpec,
    StaircaseVariant,
};
use decaylab::flows::{Monomial, NoiseModel, Objective, Quadratic, SampleSchedule};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::UsageError;

pub const SCHEMA_VERSION: u32 = 1;

/// Reads `path` into `T`, or returns `T::default()` without a file.
pub fn load<T: DeserializeOwned + Default + Versioned>(path: Option<&Path>) -> Result<T, UsageError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: T = toml::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    match cfg.schema_version() {
        SCHEMA_VERSION => Ok(cfg),
        0 => Err(UsageError(format!("{}: missing field `schema_version` (expected {SCHEMA_VERSION})", path.display()))),
        v => Err(UsageError(format!(
            "{}: field `schema_version`: unsupported version {v} (expected {SCHEMA_VERSION})",
            path.display()
        ))),
    }
}

pub trait Versioned {
    fn schema_version(&self) -> u32;
}

macro_rules! versioned {
    ($($t:ty),*) => {
        $(impl Versioned for $t {
            fn schema_version(&self) -> u32 {
                self.schema_version
            }
        })*
    };
}

/// Shorthand for a check on a config field.
pub fn ensure(ok: bool, field: &str, msg: impl std::fmt::Display) -> Result<(), UsageError> {
    if ok {
        Ok(())
    } else {
        Err(UsageError(format!("field `{field}`: {msg}")))
    }
}

// ---------------------------------------------------------------------------
// Building blocks

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Named {
        family: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    /// Radii `base^n`, `n = 1..=count`.
    Staircase {
        variant: StaircaseVariant,
        phi: RateFunction,
        base: f64,
        count: usize,
    },
    /// Piecewise-linear interpolation of `(t, g)`.
    Table { t: Vec<f64>, g: Vec<f64> },
    /// JSON curve document as written by `construct`.
    Document { path: PathBuf },
}

impl CurveSpec {
    pub fn named(family: NamedFamily) -> Self {
        CurveSpec::Named {
            family: family.name().into(),
            params: family.params(),
        }
    }

    pub fn build(&self, field: &str) -> Result<DecayCurve, UsageError> {
        let bad = |e: &dyn std::fmt::Display| UsageError(format!("field `{field}`: {e}"));
        match self {
            CurveSpec::Named { family, params } => {
                let fam = NamedFamily::from_params(family, params).map_err(|e| bad(&e))?;
                make_named_curve(fam).map_err(|e| bad(&e))
            }
            CurveSpec::Staircase { variant, phi, base, count } => {
                ensure(*base > 1.0 && *count > 0, field, "staircase needs base > 1 and count ≥ 1")?;
                let spec = StaircaseSpec::geometric(*phi, *base, *count, *variant);
                make_staircase(&spec, *count).map_err(|e| bad(&e))
            }
            CurveSpec::Table { t, g } => DecayCurve::piecewise_linear(t.clone(), g.clone()).map_err(|e| bad(&e)),
            CurveSpec::Document { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| bad(&format!("{}: {e}", path.display())))?;
                let doc: CurveDocument =
                    serde_json::from_str(&text).map_err(|e| bad(&format!("{}: {e}", path.display())))?;
                DecayCurve::from_document(&doc).map_err(|e| bad(&e))
            }
        }
    }
}

impl Default for CurveSpec {
    fn default() -> Self {
        CurveSpec::named(NamedFamily::Exponential { rate: 1.0 })
    }
}

/// Uniform knot grid on `[t_min, t_end]` with `cells` cells.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub t_end: f64,
    pub cells: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { t_end: 20.0, cells: 400 }
    }
}

impl GridSpec {
    pub fn times(&self, curve: &DecayCurve, field: &str) -> Result<Vec<f64>, UsageError> {
        let t0 = curve.t_min();
        ensure(self.t_end > t0 && self.t_end.is_finite(), &format!("{field}.t_end"), format!("must exceed t_min = {t0}"))?;
        ensure(self.cells > 0, &format!("{field}.cells"), "must be positive")?;
        let n = self.cells as f64;
        Ok((0..=self.cells).map(|i| t0 + (self.t_end - t0) * i as f64 / n).collect())
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Gradient flow from `x_right` realizes `g`.
    #[default]
    Standard,
    /// Infimum `0` not attained; gradient flow from `0` realizes `g`.
    NoMinimizer,
    /// `f(x) = g(t₀ + x/(2√g(t₀)))` for heavy ball from rest at `0`.
    HeavyBall,
}

pub fn construct(curve: &DecayCurve, grid: &[f64], how: Construction) -> Result<ConvexObjective1D, UsageError> {
    let built = match how {
        Construction::Standard => build_objective(curve, grid),
        Construction::NoMinimizer => build_no_minimizer_objective(curve, grid),
        Construction::HeavyBall => build_heavy_ball_objective(curve, grid),
    };
    built.map_err(|e| UsageError(format!("field `curve`: {e}")))
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// `½ Σ μ_i x_i²`.
    Quadratic { diag: Vec<f64> },
    /// `c|x|^p`.
    Monomial { coeff: f64, power: f64 },
    /// 1-D objective synthesized from a decay curve.
    Realized {
        #[serde(default)]
        curve: CurveSpec,
        #[serde(default)]
        grid: GridSpec,
        #[serde(default)]
        construction: Construction,
    },
    /// JSON objective document as written by `construct`.
    Document { path: PathBuf },
}

impl Default for ObjectiveSpec {
    fn default() -> Self {
        ObjectiveSpec::Quadratic { diag: vec![1.0] }
    }
}

pub struct BuiltObjective {
    pub objective: Box<dyn Objective>,
    pub x0: Vec<f64>,
    /// Set for realized objectives.
    pub realized: Option<(ConvexObjective1D, Construction)>,
}

impl ObjectiveSpec {
    pub fn build(&self) -> Result<BuiltObjective, UsageError> {
        Ok(match self {
            ObjectiveSpec::Quadratic { diag } => {
                ensure(!diag.is_empty() && diag.iter().all(|&m| m >= 0.0 && m.is_finite()), "objective.diag", "need non-negative finite entries")?;
                BuiltObjective {
                    x0: vec![1.0; diag.len()],
                    objective: Box::new(Quadratic::new(diag.clone())),
                    realized: None,
                }
            }
            ObjectiveSpec::Monomial { coeff, power } => {
                ensure(*coeff > 0.0, "objective.coeff", "must be positive")?;
                ensure(*power >= 1.0, "objective.power", "must be at least 1")?;
                BuiltObjective {
                    x0: vec![1.0],
                    objective: Box::new(Monomial { coeff: *coeff, power: *power }),
                    realized: None,
                }
            }
            ObjectiveSpec::Realized { curve, grid, construction } => {
                let g = curve.build("objective.curve")?;
                let times = grid.times(&g, "objective.grid")?;
                let obj = construct(&g, &times, *construction)?;
                realized(obj, *construction)
            }
            ObjectiveSpec::Document { path } => {
                let bad = |e: &dyn std::fmt::Display| UsageError(format!("field `objective.path`: {}: {e}", path.display()));
                let text = std::fs::read_to_string(path).map_err(|e| bad(&e))?;
                let doc: ObjectiveDocument = serde_json::from_str(&text).map_err(|e| bad(&e))?;
                let obj = ConvexObjective1D::from_document(&doc).map_err(|e| bad(&e))?;
                let how = if obj.has_minimizer() { Construction::Standard } else { Construction::NoMinimizer };
                realized(obj, how)
            }
        })
    }
}

fn realized(obj: ConvexObjective1D, how: Construction) -> BuiltObjective {
    let x0 = match how {
        Construction::Standard => obj.x_right(),
        _ => obj.knots()[0].x,
    };
    BuiltObjective {
        objective: Box::new(obj.clone()),
        x0: vec![x0],
        realized: Some((obj, how)),
    }
}

pub fn start_point(built: &BuiltObjective, x0: &Option<Vec<f64>>) -> Result<Vec<f64>, UsageError> {
    match x0 {
        None => Ok(built.x0.clone()),
        Some(x) => {
            ensure(x.len() == built.objective.dim(), "x0", format!("expected {} entries, got {}", built.objective.dim(), x.len()))?;
            ensure(x.iter().all(|v| v.is_finite()), "x0", "entries must be finite")?;
            Ok(x.clone())
        }
    }
}

// ---------------------------------------------------------------------------
// Per-command files

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructConfig {
    #[serde(default)]
    pub schema_version: u32,
    pub curve: CurveSpec,
    pub grid: GridSpec,
    pub construction: Construction,
    /// Integrate the gradient flow and compare `f(x(t))` with `g(t)`.
    pub check_flow: bool,
    pub rel_tol: f64,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        ConstructConfig {
            schema_version: SCHEMA_VERSION,
            curve: CurveSpec::default(),
            grid: GridSpec::default(),
            construction: Construction::Standard,
            check_flow: true,
            rel_tol: 1e-5,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default)]
    pub schema_version: u32,
    pub objective: ObjectiveSpec,
    pub x0: Option<Vec<f64>>,
    pub t_end: f64,
    pub schedule: SampleSchedule,
    /// Relative tolerance of the monotonicity checks.
    pub rel_tol: f64,
    /// Optional `t·(f - f*) → 0` check over the last decade.
    pub product_threshold: Option<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            schema_version: SCHEMA_VERSION,
            objective: ObjectiveSpec::Realized {
                curve: CurveSpec::default(),
                grid: GridSpec::default(),
                construction: Construction::Standard,
            },
            x0: None,
            t_end: 20.0,
            schedule: SampleSchedule::Uniform { dt: 0.05 },
            rel_tol: 1e-8,
            product_threshold: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GdConfig {
    #[serde(default)]
    pub schema_version: u32,
    pub objective: ObjectiveSpec,
    pub x0: Option<Vec<f64>>,
    pub eta: f64,
    pub steps: usize,
    /// Defaults to the objective's own constant.
    pub lipschitz: Option<f64>,
    /// Threshold of the `n·excess` and `n log n·excess` claims.
    pub threshold: f64,
}

impl Default for GdConfig {
    fn default() -> Self {
        GdConfig {
            schema_version: SCHEMA_VERSION,
            objective: ObjectiveSpec::default(),
            x0: None,
            eta: 0.5,
            steps: 60,
            lipschitz: None,
            threshold: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SgdConfig {
    #[serde(default)]
    pub schema_version: u32,
    pub objective: ObjectiveSpec,
    pub x0: Option<Vec<f64>>,
    pub eta: f64,
    pub sigma: f64,
    pub steps: usize,
    pub replicas: usize,
    pub noise: NoiseModel,
    pub lipschitz: Option<f64>,
    pub seed: u64,
    pub eps: f64,
    pub delta: f64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            schema_version: SCHEMA_VERSION,
            objective: ObjectiveSpec::default(),
            x0: None,
            eta: 0.5,
            sigma: 1.0,
            steps: 100,
            replicas: 10_000,
            noise: NoiseModel::Rademacher,
            lipschitz: None,
            seed: 0,
            eps: 1e-3,
            delta: 0.01,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HeavyBallMethod {
    /// Nesterov scheme with step `h`, recorded at `t = n√h`.
    Scheme { h: f64, steps: usize },
    /// `α/t` ODE from rest at `t_start`.
    Ode {
        #[serde(default)]
        t_start: Option<f64>,
        t_end: f64,
        #[serde(default = "default_hb_schedule")]
        schedule: SampleSchedule,
    },
}

fn default_hb_schedule() -> SampleSchedule {
    SampleSchedule::Uniform { dt: 0.01 }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct HeavyBallConfig {
    #[serde(default)]
    pub schema_version: u32,
    pub objective: ObjectiveSpec,
    pub x0: Option<Vec<f64>>,
    pub alpha: f64,
    pub method: HeavyBallMethod,
    pub rel_tol: f64,
}

impl Default for HeavyBallConfig {
    fn default() -> Self {
        HeavyBallConfig {
            schema_version: SCHEMA_VERSION,
            objective: ObjectiveSpec::default(),
            x0: None,
            alpha: 5.0,
            method: HeavyBallMethod::Ode {
                t_start: None,
                t_end: 100.0,
                schedule: default_hb_schedule(),
            },
            rel_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OscillatorConfig {
    #[serde(default)]
    pub schema_version: u32,
    pub mu: f64,
    pub alpha: f64,
    pub h: f64,
    /// Defaults to the transition time plus eight half periods.
    pub horizon: Option<f64>,
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        OscillatorConfig {
            schema_version: SCHEMA_VERSION,
            mu: 1.0,
            alpha: 3.0,
            h: decaylab::suite::FIG1_STEP,
            horizon: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LogTimes {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Default for LogTimes {
    fn default() -> Self {
        LogTimes {
            start: 1.0,
            end: 100.0,
            count: 41,
        }
    }
}

impl LogTimes {
    pub fn times(&self, field: &str) -> Result<Vec<f64>, UsageError> {
        ensure(self.start > 0.0 && self.end >= self.start, field, "need 0 < start ≤ end")?;
        ensure(self.count >= 1, field, "count must be positive")?;
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let r = (self.end / self.start).ln() / (self.count - 1) as f64;
        Ok((0..self.count).map(|k| self.start * (r * k as f64).exp()).collect())
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HilbertHeavyBall {
    pub alpha: f64,
    pub h: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Flatness {
    pub phi: RateFunction,
    pub n: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct HilbertConfig {
    #[serde(default)]
    pub schema_version: u32,
    pub curve: CurveSpec,
    pub s_max: f64,
    pub nodes_per_decade: usize,
    pub times: LogTimes,
    pub heavy_ball: Option<HilbertHeavyBall>,
    pub flatness: Option<Flatness>,
}

impl Default for HilbertConfig {
    fn default() -> Self {
        HilbertConfig {
            schema_version: SCHEMA_VERSION,
            curve: CurveSpec::named(NamedFamily::Power { power: 1.5 }),
            s_max: 1e4,
            nodes_per_decade: decaylab::spectral::DEFAULT_NODES_PER_DECADE,
            times: LogTimes::default(),
            heavy_ball: None,
            flatness: None,
        }
    }
}

/// Sequence entry: an integer, a float (taken exactly) or a string such as
/// `"3/2"` or `"0.1"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Entry {
    pub fn to_text(&self) -> Result<String, UsageError> {
        Ok(match self {
            Entry::Int(i) => i.to_string(),
            Entry::Text(s) => s.clone(),
            Entry::Float(x) => {
                let q = num_rational::BigRational::from_float(*x)
                    .ok_or_else(|| UsageError(format!("non-finite entry {x}")))?;
                q.to_string()
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct MajorizeConfig {
    #[serde(default)]
    pub schema_version: u32,
    pub a: Vec<Entry>,
    pub b: Vec<Entry>,
    pub cap: usize,
}

impl Default for MajorizeConfig {
    fn default() -> Self {
        MajorizeConfig {
            schema_version: SCHEMA_VERSION,
            a: vec![Entry::Int(3), Entry::Int(1), Entry::Int(0)],
            b: vec![Entry::Int(2), Entry::Int(2), Entry::Int(0)],
            cap: decaylab::majorize::DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    pub lower: CurveSpec,
    pub upper: CurveSpec,
    pub t_span: f64,
    pub cells: usize,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzSection {
    pub trials: usize,
    pub max_cells: usize,
    pub t_span: f64,
    pub seed: u64,
    /// Also test `∛` alongside `√`.
    pub cube_root: bool,
}

impl Default for FuzzSection {
    fn default() -> Self {
        FuzzSection {
            trials: 1000,
            max_cells: 64,
            t_span: 1.0,
            seed: 0,
            cube_root: true,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BarrierSection {
    pub alpha: f64,
    pub t_short: f64,
    pub t_long: f64,
    pub cells_per_decade: usize,
    /// Minimal growth of the estimate between the two horizons.
    pub min_growth: f64,
}

impl Default for BarrierSection {
    fn default() -> Self {
        BarrierSection {
            alpha: 1.5,
            t_short: 1e3,
            t_long: 1e6,
            cells_per_decade: 2000,
            min_growth: 0.2,
        }
    }
}

/// Sections absent from a config file are skipped; without a file all three run.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SqrtCmpConfig {
    #[serde(default)]
    pub schema_version: u32,
    #[serde(default)]
    pub compare: Option<CompareSection>,
    #[serde(default)]
    pub fuzz: Option<FuzzSection>,
    #[serde(default)]
    pub barrier: Option<BarrierSection>,
}

impl Default for SqrtCmpConfig {
    fn default() -> Self {
        SqrtCmpConfig {
            schema_version: SCHEMA_VERSION,
            compare: Some(CompareSection {
                lower: CurveSpec::named(NamedFamily::Exponential { rate: 2.0 }),
                upper: CurveSpec::named(NamedFamily::Exponential { rate: 1.0 }),
                t_span: 5.0,
                cells: 10,
            }),
            fuzz: Some(FuzzSection::default()),
            barrier: Some(BarrierSection::default()),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Config {
    #[serde(default)]
    pub schema_version: u32,
    pub h: f64,
    pub alphas: Vec<f64>,
    pub mus: Vec<f64>,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Fig1Config {
            schema_version: SCHEMA_VERSION,
            h: decaylab::suite::FIG1_STEP,
            alphas: decaylab::suite::FIG1_ALPHAS.to_vec(),
            mus: decaylab::suite::FIG1_MUS.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyAllConfig {
    #[serde(default)]
    pub schema_version: u32,
    /// Criterion ids to run; all when empty.
    pub only: Vec<String>,
    pub seed: u64,
}

impl Default for VerifyAllConfig {
    fn default() -> Self {
        VerifyAllConfig {
            schema_version: SCHEMA_VERSION,
            only: Vec::new(),
            seed: 0,
        }
    }
}

versioned!(
    ConstructConfig,
    FlowConfig,
    GdConfig,
    SgdConfig,
    HeavyBallConfig,
    OscillatorConfig,
    HilbertConfig,
    MajorizeConfig,
    SqrtCmpConfig,
    Fig1Config,
    VerifyAllConfig
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_version_is_required() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "eta = 0.25\n").unwrap();
        let e = load::<GdConfig>(Some(&p)).unwrap_err();
        assert!(e.0.contains("schema_version"), "{}", e.0);
        std::fs::write(&p, "schema_version = 1\neta = 0.25\n").unwrap();
        let c = load::<GdConfig>(Some(&p)).unwrap();
        assert_eq!(c.eta, 0.25);
        assert_eq!(c.steps, 60);
    }

    #[test]
    fn unknown_fields_name_the_line() {
        let err = toml::from_str::<GdConfig>("schema_version = 1\nsteps = 3\netta = 0.1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("etta") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn nested_specs_parse() {
        let c: FlowConfig = toml::from_str(
            r#"
schema_version = 1
t_end = 5.0
[objective]
kind = "realized"
construction = "standard"
curve = { kind = "named", family = "shifted_power", params = { power = 2.0 } }
grid = { t_end = 10.0, cells = 100 }
"#,
        )
        .unwrap();
        let built = c.objective.build().unwrap();
        assert_eq!(built.objective.dim(), 1);
        assert!(built.realized.is_some());
        let bad = toml::from_str::<FlowConfig>("schema_version = 1\n[objective]\nkind = \"quadratic\"\ndiag = [1.0]\nextra = 1\n");
        assert!(bad.is_err());
    }

    #[test]
    fn entries_are_exact() {
        assert_eq!(Entry::Float(0.5).to_text().unwrap(), "1/2");
        assert_eq!(Entry::Int(-3).to_text().unwrap(), "-3");
        let c: MajorizeConfig = toml::from_str("schema_version = 1\na = [\"3/2\", 1]\nb = [1.25, 1.25]\n").unwrap();
        assert_eq!(c.a[0], Entry::Text("3/2".into()));
        assert_eq!(c.b[0], Entry::Float(1.25));
    }

    #[test]
    fn log_times() {
        let t = LogTimes { start: 1.0, end: 100.0, count: 3 }.times("t").unwrap();
        assert!((t[1] - 10.0).abs() < 1e-12 && (t[2] - 100.0).abs() < 1e-9);
    }
}
