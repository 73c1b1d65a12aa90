use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use decaylab::io::fmt_f64;
use decaylab::verify::{DecayReport, ReportSummary, Verdict, VerifyError};

/// Summaries of the checks run by one command.
#[derive(Default)]
pub struct Reports {
    rows: Vec<ReportSummary>,
    full: Vec<DecayReport>,
    skipped: Vec<(String, String)>,
}

impl Reports {
    pub fn add(&mut self, r: DecayReport) {
        self.rows.push(r.summary());
        self.full.push(r);
    }

    /// Checks whose data are missing (no minimizer, no velocity) are skipped;
    /// any other error makes the check inconclusive.
    pub fn add_result(&mut self, name: &str, r: Result<DecayReport, VerifyError>) {
        match r {
            Ok(r) => self.add(r),
            Err(e) => self.error(name, e),
        }
    }

    pub fn error(&mut self, name: &str, e: VerifyError) {
        match e {
            VerifyError::MissingMinimizer | VerifyError::MissingInfimum | VerifyError::MissingVelocity => {
                self.skipped.push((name.into(), e.to_string()))
            }
            other => {
                self.skipped.push((name.into(), other.to_string()));
                self.manual(name, Verdict::Inconclusive, f64::NAN, 0.0);
            }
        }
    }

    pub fn skip(&mut self, name: &str, why: &str) {
        self.skipped.push((name.into(), why.into()));
    }

    pub fn manual(&mut self, name: &str, verdict: Verdict, margin: f64, tolerance: f64) {
        self.rows.push(ReportSummary {
            name: name.into(),
            verdict,
            margin,
            tolerance,
        });
    }

    pub fn verdict(&self) -> Verdict {
        self.rows.iter().fold(Verdict::Pass, |v, r| v.combine(r.verdict))
    }

    pub fn print(&self) {
        for r in &self.rows {
            println!("{:<13} {:<28} margin {:>11.3e}  tol {:.1e}", r.verdict.to_string().to_uppercase(), r.name, r.margin, r.tolerance);
        }
        for (name, why) in &self.skipped {
            println!("{:<13} {:<28} {why}", "note", name);
        }
    }

    /// `reports.csv` plus one `check_<name>.csv` series per full report.
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let path = dir.join("reports.csv");
        let mut w = csv::Writer::from_writer(BufWriter::new(create(&path)?));
        w.write_record(["name", "verdict", "worst_margin", "tolerance"])?;
        for r in &self.rows {
            w.write_record([r.name.clone(), r.verdict.to_string(), fmt_f64(r.margin), fmt_f64(r.tolerance)])?;
        }
        w.flush()?;
        for r in &self.full {
            let p = dir.join(format!("check_{}.csv", file_stem(&r.name)));
            r.write_csv(BufWriter::new(create(&p)?)).with_context(|| p.display().to_string())?;
        }
        Ok(())
    }
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect()
}

pub fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).with_context(|| format!("cannot create {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
