//! Versioned JSON reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Acceptance rule attached to one statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    /// `value ≤ bound`.
    AtMost { bound: f64 },
    /// `value > bound`.
    Above { bound: f64 },
    /// `|value − target| ≤ tolerance`.
    Within { target: f64, tolerance: f64 },
    /// `lo ≤ value ≤ hi`.
    Range { lo: f64, hi: f64 },
    /// Reported only.
    None,
}

impl Threshold {
    pub fn check(&self, value: f64) -> bool {
        match *self {
            Threshold::AtMost { bound } => value <= bound,
            Threshold::Above { bound } => value > bound,
            Threshold::Within { target, tolerance } => (value - target).abs() <= tolerance,
            Threshold::Range { lo, hi } => lo <= value && value <= hi,
            Threshold::None => true,
        }
    }

    pub fn gates(&self) -> bool {
        !matches!(self, Threshold::None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub threshold: Threshold,
}

impl Statistic {
    pub fn new(name: impl Into<String>, value: f64, stderr: Option<f64>, threshold: Threshold) -> Self {
        Self { name: name.into(), value, stderr, threshold }
    }

    /// `value` within `sigmas · stderr` of `target`.
    pub fn sigma_check(name: impl Into<String>, value: f64, stderr: f64, target: f64, sigmas: f64) -> Self {
        Self::new(name, value, Some(stderr), Threshold::Within { target, tolerance: sigmas * stderr })
    }

    pub fn diagnostic(name: impl Into<String>, value: f64) -> Self {
        Self::new(name, value, None, Threshold::None)
    }

    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.threshold.check(self.value)
    }
}

pub type Params = BTreeMap<String, serde_json::Value>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub experiment_id: String,
    pub params: Params,
    pub statistics: Vec<Statistic>,
    pub pass: bool,
    pub seed: u64,
    pub runtime_ms: u64,
}

impl ExperimentReport {
    /// `pass` is the conjunction of the gating thresholds.
    pub fn new(experiment_id: &str, params: Params, statistics: Vec<Statistic>, seed: u64, runtime_ms: u64) -> Self {
        let pass = statistics.iter().all(Statistic::passed);
        Self { schema: SCHEMA_VERSION, experiment_id: experiment_id.to_owned(), params, statistics, pass, seed, runtime_ms }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Statistic> {
        self.statistics.iter().filter(|s| !s.passed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_the_conjunction() {
        let ok = Statistic::new("a", 1.0, None, Threshold::AtMost { bound: 2.0 });
        let bad = Statistic::new("b", 0.001, None, Threshold::Above { bound: 0.01 });
        let diag = Statistic::diagnostic("c", -5.0);
        let r = ExperimentReport::new("x", Params::new(), vec![ok.clone(), diag.clone()], 1, 0);
        assert!(r.pass);
        let r = ExperimentReport::new("x", Params::new(), vec![ok, bad, diag], 1, 0);
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn thresholds() {
        assert!(Threshold::Within { target: 1.0, tolerance: 0.1 }.check(1.0625));
        assert!(!Threshold::Within { target: 1.0, tolerance: 0.1 }.check(1.2));
        assert!(Threshold::Range { lo: 0.85, hi: 1.2 }.check(0.85));
        assert!(!Threshold::Above { bound: 0.01 }.check(0.01));
        assert!(!Statistic::new("nan", f64::NAN, None, Threshold::None).passed());
    }

    #[test]
    fn json_round_trip() {
        let mut params = Params::new();
        params.insert("n".into(), 8.into());
        params.insert("delta".into(), "0.5+0.5i".into());
        let stats = vec![
            Statistic::sigma_check("mean", 0.1 + 0.2, 0.012345678901234567, 0.3, 4.0),
            Statistic::new("ks_p", 0.731, None, Threshold::Above { bound: 0.01 }),
            Statistic::new("var", 1.0 / 3.0, Some(1e-300), Threshold::Range { lo: 0.85, hi: 1.2 }),
            Statistic::diagnostic("budget", 0.25),
        ];
        let r = ExperimentReport::new("id", params, stats, u64::MAX, 17);
        let s = serde_json::to_string_pretty(&r).unwrap();
        let back: ExperimentReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(s.contains("\"schema\": 1"));
    }
}
