//! Gaussian limits of log characteristic polynomials at large `n`, sampled
//! through the product representations.

use condhaar_core::analytics::{jacobi_log_moments, unitary_log_moments};
use condhaar_core::charpoly::{
    alpha_schedule_general, alpha_schedule_group, sample_log_jacobi_det_pair, sample_log_z_product_unitary,
    unitary_factor_laws, AlphaSchedule, Group,
};
use condhaar_core::special::ln_gamma;
use condhaar_core::stats::{corr, normality_check};

use super::util::{count, invalid};
use super::{param, ExperimentError, Outcome, Overrides};
use crate::report::{Params, Statistic, Threshold};
use crate::runner::Runner;

const DEFAULT_N: usize = 10_000;
const DEFAULT_COUNT: usize = 20_000;
const KS_NORMAL_LEVEL: f64 = 0.001;
const VARIANCE_RATIO: (f64, f64) = (0.85, 1.2);
const MAX_ABS_CORR: f64 = 0.05;

/// Gates for one normalized coordinate with limiting variance `target_var`.
fn coordinate_gates(name: &str, xs: &[f64], target_var: f64, log_n: f64) -> Result<Vec<Statistic>, ExperimentError> {
    let r = normality_check(xs)?;
    let mean_tol = 5.0 * r.mean.stderr + 0.1 * (0.5 * log_n).sqrt();
    Ok(vec![
        Statistic::new(
            format!("{name}_mean"),
            r.mean.value,
            Some(r.mean.stderr),
            Threshold::Within { target: 0.0, tolerance: mean_tol },
        ),
        Statistic::new(
            format!("{name}_variance_ratio"),
            r.variance.value / target_var,
            Some(r.variance.stderr / target_var),
            Threshold::Range { lo: VARIANCE_RATIO.0, hi: VARIANCE_RATIO.1 },
        ),
        Statistic::new(
            format!("{name}_normal_ks_p"),
            r.ks.p_value,
            None,
            Threshold::Above { bound: KS_NORMAL_LEVEL },
        ),
        Statistic::new(format!("{name}_skewness"), r.skewness.value, Some(r.skewness.stderr), Threshold::None),
    ])
}

/// Gates `|r|`; the signed value is reported separately.
fn correlation_gate(name: &str, xs: &[f64], ys: &[f64]) -> Result<Statistic, ExperimentError> {
    let (r, se) = corr(xs, ys)?;
    Ok(Statistic::new(name, r.abs(), Some(se), Threshold::AtMost { bound: MAX_ABS_CORR }))
}

/// `(log det⁺ + c⁺, log det⁻ + c⁻)/scale` over `total` α-route draws.
struct PairSpec {
    schedule: AlphaSchedule,
    shift: (f64, f64),
    center: (f64, f64),
    scale: f64,
}

fn run_pair(runner: &Runner, label: &str, spec: &PairSpec, total: usize, log_n: f64) -> Result<Vec<Statistic>, ExperimentError> {
    let draws: Vec<(f64, f64)> = runner.samples(label, total, |rng| {
        let (lp, lm) = sample_log_jacobi_det_pair(&spec.schedule, rng);
        ((lp + spec.shift.0 - spec.center.0) / spec.scale, (lm + spec.shift.1 - spec.center.1) / spec.scale)
    });
    let (plus, minus): (Vec<f64>, Vec<f64>) = draws.into_iter().unzip();
    let mut out = coordinate_gates("plus", &plus, 1.0, log_n)?;
    out.extend(coordinate_gates("minus", &minus, 1.0, log_n)?);
    let (r, _) = corr(&plus, &minus)?;
    out.push(correlation_gate("abs_corr_plus_minus", &plus, &minus)?);
    out.push(Statistic::diagnostic("corr_plus_minus", r));
    let m = jacobi_log_moments(&spec.schedule);
    let s2 = spec.scale * spec.scale;
    out.push(Statistic::diagnostic("exact_mean_plus", (m.mean_plus + spec.shift.0 - spec.center.0) / spec.scale));
    out.push(Statistic::diagnostic("exact_mean_minus", (m.mean_minus + spec.shift.1 - spec.center.1) / spec.scale));
    out.push(Statistic::diagnostic("exact_variance_ratio_plus", m.var_plus / s2));
    out.push(Statistic::diagnostic("exact_variance_ratio_minus", m.var_minus / s2));
    out.push(Statistic::diagnostic("exact_corr", m.corr()));
    Ok(out)
}

fn dims(ov: &Overrides) -> Result<(usize, usize), ExperimentError> {
    let n = ov.n.unwrap_or(DEFAULT_N);
    if n < 2 {
        return Err(invalid("--n must be at least 2"));
    }
    Ok((n, count(ov, DEFAULT_COUNT, 1_000)?))
}

pub fn clt_jacobi(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let (n, total) = dims(ov)?;
    let beta = ov.beta.unwrap_or(2.0);
    let a = ov.a.unwrap_or(0.0);
    let b = ov.b.unwrap_or(0.0);
    if !(a >= 0.0 && b >= 0.0) {
        return Err(invalid("the Jacobi limit is stated for a, b >= 0"));
    }
    let log_n = (n as f64).ln();
    let spec = PairSpec {
        schedule: alpha_schedule_general(beta, a, b, n)?,
        shift: (0.0, 0.0),
        center: (-(0.5 - (2.0 * a + 1.0) / beta) * log_n, -(0.5 - (2.0 * b + 1.0) / beta) * log_n),
        scale: (2.0 / beta * log_n).sqrt(),
    };
    let mut params = Params::new();
    param(&mut params, "beta", beta);
    param(&mut params, "a", a);
    param(&mut params, "b", b);
    param(&mut params, "n", n);
    param(&mut params, "count", total);
    let statistics = run_pair(runner, "clt_jacobi", &spec, total, log_n)?;
    Ok(Outcome { params, statistics })
}

fn clt_group(runner: &Runner, ov: &Overrides, group: Group, label: &str) -> Result<Outcome, ExperimentError> {
    let (n, total) = dims(ov)?;
    let pp = ov.p_plus.unwrap_or(1);
    let pm = ov.p_minus.unwrap_or(0);
    let log_n = (n as f64).ln();
    let offset = match group {
        Group::So => -0.5,
        Group::Usp => 0.5,
    };
    let ln_fact = |k: usize| ln_gamma(k as f64 + 1.0);
    let ln4 = 4f64.ln();
    let spec = PairSpec {
        schedule: alpha_schedule_group(group, n, pp, pm)?,
        shift: (ln_fact(2 * pp) + pm as f64 * ln4, ln_fact(2 * pm) + pp as f64 * ln4),
        center: ((2.0 * pp as f64 + offset) * log_n, (2.0 * pm as f64 + offset) * log_n),
        scale: log_n.sqrt(),
    };
    let mut params = Params::new();
    param(&mut params, "n", n);
    param(&mut params, "p_plus", pp);
    param(&mut params, "p_minus", pm);
    param(&mut params, "count", total);
    param(&mut params, "statistic", "unnormalized derivatives (2p+)! 4^p- det+ and (2p-)! 4^p+ det-");
    let statistics = run_pair(runner, label, &spec, total, log_n)?;
    Ok(Outcome { params, statistics })
}

pub fn clt_so(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    clt_group(runner, ov, Group::So, "clt_so")
}

pub fn clt_usp(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    clt_group(runner, ov, Group::Usp, "clt_usp")
}

pub fn clt_unitary(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let (n, total) = dims(ov)?;
    let p = ov.p.unwrap_or(1);
    let laws = unitary_factor_laws(n, p)?;
    let log_n = (n as f64).ln();
    let scale = log_n.sqrt();
    let center = p as f64 * log_n;
    let draws: Vec<(f64, f64)> = runner.samples("clt_unitary", total, |rng| {
        let z = sample_log_z_product_unitary(&laws, p, rng);
        ((z.re - center) / scale, z.im / scale)
    });
    let (re, im): (Vec<f64>, Vec<f64>) = draws.into_iter().unzip();
    let mut statistics = coordinate_gates("re", &re, 0.5, log_n)?;
    statistics.extend(coordinate_gates("im", &im, 0.5, log_n)?);
    let (r, _) = corr(&re, &im)?;
    statistics.push(correlation_gate("abs_corr_re_im", &re, &im)?);
    statistics.push(Statistic::diagnostic("corr_re_im", r));
    let m = unitary_log_moments(n, p)?;
    statistics.push(Statistic::diagnostic("exact_mean_re", (m.mean - center) / scale));
    statistics.push(Statistic::diagnostic("exact_variance_ratio_re", m.var_re / log_n / 0.5));
    statistics.push(Statistic::diagnostic("exact_variance_ratio_im", m.var_im / log_n / 0.5));
    let mut params = Params::new();
    param(&mut params, "n", n);
    param(&mut params, "p", p);
    param(&mut params, "count", total);
    Ok(Outcome { params, statistics })
}
