//! Check reports and their JSON / CSV forms.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::tree::csv_err;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Ks,
    Chi2,
    Moment,
    Exact,
}

/// How `statistic` is compared with `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    AtLeast,
    AtMost,
}

impl Rule {
    pub fn holds(self, statistic: f64, threshold: f64) -> bool {
        match self {
            Rule::AtLeast => statistic >= threshold,
            Rule::AtMost => statistic <= threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Sample sizes fell below the check's power floor; the outcome is not evidence either way.
    Underpowered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Acceptance criterion number.
    pub criterion: u32,
    pub name: String,
    pub kind: CheckKind,
    pub statistic: f64,
    pub threshold: f64,
    pub rule: Rule,
    pub n_samples: Vec<u64>,
    pub seeds: Vec<u64>,
    /// `rule.holds(statistic, threshold)`.
    pub pass: bool,
    pub status: Status,
    pub details: serde_json::Value,
}

impl VerifyReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        criterion: u32,
        name: impl Into<String>,
        kind: CheckKind,
        statistic: f64,
        threshold: f64,
        rule: Rule,
        n_samples: Vec<u64>,
        seeds: Vec<u64>,
        details: serde_json::Value,
    ) -> Self {
        let pass = rule.holds(statistic, threshold);
        VerifyReport {
            criterion,
            name: name.into(),
            kind,
            statistic,
            threshold,
            rule,
            n_samples,
            seeds,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            details,
        }
    }

    /// A check that could not run; recorded as a failure.
    pub fn errored(criterion: u32, name: impl Into<String>, kind: CheckKind, err: &crate::Error) -> Self {
        VerifyReport {
            criterion,
            name: name.into(),
            kind,
            statistic: f64::NAN,
            threshold: f64::NAN,
            rule: Rule::AtLeast,
            n_samples: Vec::new(),
            seeds: Vec::new(),
            pass: false,
            status: Status::Fail,
            details: serde_json::json!({ "error": err.to_string() }),
        }
    }

    /// Marks the report underpowered when any sample size is below `floor`.
    pub fn with_power_floor(mut self, floor: u64) -> Self {
        if self.n_samples.iter().any(|&n| n < floor) {
            self.status = Status::Underpowered;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<VerifyReport>,
    pub config: serde_json::Value,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    /// Pretty JSON with sorted object keys; contains no timing data, so equal
    /// seeds give byte-identical output.
    pub fn canonical_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let mut s = serde_json::to_string_pretty(&value)?;
        s.push('\n');
        Ok(s)
    }

    /// `criterion,name,kind,status,statistic,threshold,rule,n_samples,seeds`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "criterion", "name", "kind", "status", "statistic", "threshold", "rule", "n_samples", "seeds",
        ])
        .map_err(csv_err)?;
        for c in &self.checks {
            let label = |v: serde_json::Value| v.as_str().unwrap_or_default().to_string();
            let sizes: Vec<String> = c.n_samples.iter().map(u64::to_string).collect();
            w.write_record([
                c.criterion.to_string(),
                c.name.clone(),
                label(serde_json::to_value(c.kind)?),
                label(serde_json::to_value(c.status)?),
                c.statistic.to_string(),
                c.threshold.to_string(),
                label(serde_json::to_value(c.rule)?),
                sizes.join(";"),
                c.seeds.len().to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}
