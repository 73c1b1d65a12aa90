use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    GradientFlow,
    GradientDescent,
    Sgd,
    HeavyBallScheme,
    HeavyBallOde,
    ConstantFriction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Option<Vec<f64>>,
    pub f: f64,
    pub gnorm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub dynamics: Dynamics,
    /// Numeric parameters (`eta`, `alpha`, `sigma`, `h`, `rtol`, ...).
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replica: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<String>,
    pub objective: String,
    pub xstar: Option<Vec<f64>>,
    pub infimum: Option<f64>,
}

impl TrajectoryMeta {
    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}

/// Time-stamped samples of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Cumulative dissipated energy at each sample, when the integrator
    /// tracked it as an auxiliary variable.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dissipated: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.f).collect()
    }

    /// `f(x_t) - inf f`, or `None` when the infimum is unknown.
    pub fn excess(&self) -> Option<Vec<f64>> {
        let inf = self.meta.infimum?;
        Some(self.samples.iter().map(|s| s.f - inf).collect())
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.x.len())
    }

    /// CSV with header `t,x0..,v0..,f,gnorm`; velocity columns only when
    /// every sample carries a velocity.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let d = self.dim();
        let with_v = !self.samples.is_empty() && self.samples.iter().all(|s| s.v.is_some());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((0..d).map(|i| format!("x{i}")));
        if with_v {
            header.extend((0..d).map(|i| format!("v{i}")));
        }
        header.push("f".into());
        header.push("gnorm".into());
        w.write_record(&header)?;
        for s in &self.samples {
            let mut row = vec![crate::io::fmt_f64(s.t)];
            row.extend(s.x.iter().map(|&v| crate::io::fmt_f64(v)));
            if with_v {
                row.extend(s.v.as_ref().unwrap().iter().map(|&v| crate::io::fmt_f64(v)));
            }
            row.push(crate::io::fmt_f64(s.f));
            row.push(crate::io::fmt_f64(s.gnorm));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Metadata sidecar as pretty JSON.
    pub fn meta_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta).expect("metadata serializes")
    }
}
