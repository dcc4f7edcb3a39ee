use condhaar_core::measures::{eigenangles, UnitaryMatrix};
use condhaar_core::stats::{ks_two_sample, Welford};
use condhaar_core::Result;

use super::{ExperimentError, Overrides};
use crate::report::{Statistic, Threshold};

/// Significance level of every two-sample KS gate.
pub const KS_LEVEL: f64 = 0.01;

pub fn ks_gate(name: impl Into<String>, xs: &[f64], ys: &[f64]) -> Result<Statistic> {
    let r = ks_two_sample(xs, ys)?;
    Ok(Statistic::new(name, r.p_value, None, Threshold::Above { bound: KS_LEVEL }))
}

/// Expected number of false KS failures among `tests` independent gates.
pub fn budget(tests: usize) -> Statistic {
    Statistic::diagnostic("false_failure_budget", tests as f64 * KS_LEVEL)
}

pub fn welford(xs: impl IntoIterator<Item = f64>) -> Welford {
    let mut w = Welford::new();
    for x in xs {
        w.push(x);
    }
    w
}

/// `mean(xs)` within four standard errors of `target`.
pub fn mean_gate(name: impl Into<String>, w: &Welford, target: f64) -> Result<Statistic> {
    let e = w.estimate()?;
    Ok(Statistic::sigma_check(name, e.value, e.stderr, target, 4.0))
}

/// `(Re Tr u, Im Tr u, Re Tr u², min |θ|)` with the `pinned` angles closest
/// to zero removed before taking the minimum.
pub fn spectral_stats(u: &UnitaryMatrix, pinned: usize) -> Result<[f64; 4]> {
    let tr = u.trace();
    let tr2 = u.trace_of_square();
    let rest = eigenangles(u)?.deflate(pinned)?;
    let min = rest.iter().map(|t| t.abs()).fold(f64::INFINITY, f64::min);
    Ok([tr.re, tr.im, tr2.re, min])
}

pub const SPECTRAL_NAMES: [&str; 4] = ["re_tr", "im_tr", "re_tr_sq", "min_abs_angle"];

/// Splits per-sample statistic arrays into columns.
pub fn columns<const K: usize>(rows: &[[f64; K]]) -> [Vec<f64>; K] {
    std::array::from_fn(|j| rows.iter().map(|r| r[j]).collect())
}

pub fn count(ov: &Overrides, default: usize, min: usize) -> std::result::Result<usize, ExperimentError> {
    let c = ov.count.unwrap_or(default);
    if c < min {
        return Err(ExperimentError::InvalidParams(format!("--count must be at least {min}")));
    }
    Ok(c)
}

pub fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidParams(msg.into())
}
