use std::f64::consts::PI;

use condhaar_core::analytics::tilted_circle_pdf;
use condhaar_core::distributions::sample_beta_one;
use condhaar_core::measures::{
    eigenangles, product, sample_conditional_haar, sample_conditional_slipped, sample_conditioned_on_abs_z,
    sample_generalized_slip, sample_haar_unitary, sample_rotated_conditional, UnitaryMatrix,
};
use condhaar_core::quadrature::{integrate, QuadOptions};
use condhaar_core::stats::ks_one_sample;
use condhaar_core::{Complex64, Error, Result as CoreResult, RngStream};

use super::util::{budget, columns, count, invalid, ks_gate, spectral_stats, KS_LEVEL, SPECTRAL_NAMES};
use super::{param, ExperimentError, Outcome, Overrides};
use crate::report::{Params, Statistic, Threshold};
use crate::runner::Runner;

const DEFAULT_COUNT: usize = 10_000;

/// Draws `total` spectral statistic rows from `sampler`.
fn spectral_rows<F>(runner: &Runner, label: &str, total: usize, pinned: usize, sampler: F) -> CoreResult<Vec<[f64; 4]>>
where
    F: Fn(&mut RngStream) -> CoreResult<UnitaryMatrix> + Sync,
{
    runner.samples(label, total, |rng| sampler(rng).and_then(|u| spectral_stats(&u, pinned))).into_iter().collect()
}

/// Four KS gates between two constructions sharing a spectral law.
fn compare(prefix: &str, xs: &[[f64; 4]], ys: &[[f64; 4]]) -> CoreResult<Vec<Statistic>> {
    let (a, b) = (columns(xs), columns(ys));
    SPECTRAL_NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| ks_gate(format!("{prefix}{name}_ks_p"), &a[j], &b[j]))
        .collect()
}

fn finish(params: Params, mut statistics: Vec<Statistic>) -> Outcome {
    let tests = statistics.iter().filter(|s| matches!(s.threshold, Threshold::Above { bound } if bound == KS_LEVEL)).count();
    statistics.push(budget(tests));
    Outcome { params, statistics }
}

pub fn rotation_ks(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let n = ov.n.unwrap_or(4);
    if !(1..=12).contains(&n) {
        return Err(invalid("--n must be in 1..=12"));
    }
    let total = count(ov, DEFAULT_COUNT, 100)?;
    let mut params = Params::new();
    param(&mut params, "n", n);
    param(&mut params, "count", total);
    let xs = spectral_rows(runner, "rotation_ks/rotated", total, 0, |rng| sample_rotated_conditional(n, rng))?;
    let ys = spectral_rows(runner, "rotation_ks/haar", total, 0, |rng| sample_haar_unitary(n, rng))?;
    Ok(finish(params, compare("", &xs, &ys)?))
}

pub fn slipping_ks(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let cases = match (ov.n, ov.p) {
        (None, None) => vec![(6, 2), (5, 0)],
        (Some(n), Some(p)) if p < n && n <= 12 => vec![(n, p)],
        (Some(n), None) if (1..=12).contains(&n) => vec![(n, 0)],
        _ => return Err(invalid("need 0 <= p < n <= 12")),
    };
    let total = count(ov, DEFAULT_COUNT, 100)?;
    let mut params = Params::new();
    param(&mut params, "cases", cases.iter().map(|&(n, p)| vec![n, p]).collect::<Vec<_>>());
    param(&mut params, "count", total);
    let mut statistics = Vec::new();
    for (n, p) in cases {
        let tag = format!("n{n}_p{p}");
        let xs = spectral_rows(runner, &format!("slipping_ks/{tag}/plain"), total, p, |rng| {
            sample_conditional_haar(n, p, rng)
        })?;
        let ys = spectral_rows(runner, &format!("slipping_ks/{tag}/slipped"), total, p, |rng| {
            sample_conditional_slipped(n, p, rng)
        })?;
        statistics.extend(compare(&format!("{tag}_"), &xs, &ys)?);
    }
    Ok(finish(params, statistics))
}

pub fn general_slip_ks(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let total = count(ov, DEFAULT_COUNT, 100)?;
    let c = Complex64::new;
    let cases: [(usize, Vec<Complex64>, &str); 2] =
        [(4, vec![c(1.0, 0.0), c(0.5, 0.0)], "n4_d1_d0.5"), (3, vec![c(0.5, 0.5)], "n3_d0.5+0.5i")];
    let mut params = Params::new();
    param(&mut params, "cases", cases.iter().map(|(_, _, tag)| *tag).collect::<Vec<_>>());
    param(&mut params, "count", total);
    let mut statistics = Vec::new();
    for (n, deltas, tag) in &cases {
        let pinned = n - deltas.len();
        let pairs: Vec<([f64; 4], [f64; 4])> = runner
            .samples(&format!("general_slip_ks/{tag}"), total, |rng| {
                let (lo, hi) = sample_generalized_slip(*n, deltas, rng)?;
                Ok::<_, Error>((spectral_stats(&lo, pinned)?, spectral_stats(&hi, pinned)?))
            })
            .into_iter()
            .collect::<CoreResult<_>>()?;
        let (xs, ys): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        statistics.extend(compare(&format!("{tag}_"), &xs, &ys)?);
    }
    Ok(finish(params, statistics))
}

pub fn abs_z_conditioning_ks(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let n = ov.n.unwrap_or(3);
    if !(2..=10).contains(&n) {
        return Err(invalid("--n must be in 2..=10"));
    }
    let x = 1e-8;
    let total = count(ov, DEFAULT_COUNT, 100)?;
    let mut params = Params::new();
    param(&mut params, "n", n);
    param(&mut params, "x", x);
    param(&mut params, "count", total);
    param(&mut params, "acceptance_probe", "n=2, x=1");

    let draws: Vec<([f64; 4], f64)> = runner
        .samples("abs_z_conditioning_ks/conditioned", total, |rng| {
            let c = sample_conditioned_on_abs_z(n, x, rng)?;
            let head = UnitaryMatrix::new(product(&c.reflections[..n - 1])?)?;
            let dev = (c.matrix()?.det_id_minus().norm() - x).abs();
            Ok::<_, Error>((spectral_stats(&head, 1)?, dev))
        })
        .into_iter()
        .collect::<CoreResult<_>>()?;
    let worst = draws.iter().map(|d| d.1).fold(0.0, f64::max);
    let xs: Vec<[f64; 4]> = draws.into_iter().map(|d| d.0).collect();
    let ys = spectral_rows(runner, "abs_z_conditioning_ks/free", total, 1, |rng| sample_conditional_haar(n, 1, rng))?;
    let mut statistics = compare("", &xs, &ys)?;
    statistics.push(Statistic::new("max_abs_det_deviation", worst, None, Threshold::AtMost { bound: 1e-9 }));

    let attempts: Vec<u64> = runner
        .samples("abs_z_conditioning_ks/acceptance", total, |rng| sample_conditioned_on_abs_z(2, 1.0, rng).map(|c| c.attempts))
        .into_iter()
        .collect::<CoreResult<_>>()?;
    let tried: u64 = attempts.iter().sum();
    statistics.push(Statistic::diagnostic("acceptance_rate_n2_x1", total as f64 / tried as f64));
    Ok(finish(params, statistics))
}

pub fn last_eigenvalue_ks(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let n = ov.n.unwrap_or(5);
    if !(2..=12).contains(&n) {
        return Err(invalid("--n must be in 2..=12"));
    }
    let p = n - 1;
    let total = count(ov, DEFAULT_COUNT, 100)?;
    let mut params = Params::new();
    param(&mut params, "n", n);
    param(&mut params, "p", p);
    param(&mut params, "count", total);
    let matrix_route: Vec<f64> = runner
        .samples("last_eigenvalue_ks/matrix", total, |rng| {
            let u = sample_conditional_haar(n, p, rng)?;
            Ok::<_, Error>(eigenangles(&u)?.deflate(p)?[0])
        })
        .into_iter()
        .collect::<CoreResult<_>>()?;
    let formula: Vec<f64> = runner.samples("last_eigenvalue_ks/formula", total, |rng| {
        let r = Complex64::from_polar(sample_beta_one((n - 1) as f64, rng).sqrt(), rng.angle());
        let one = Complex64::new(1.0, 0.0);
        (-(one - r) / (one - r.conj())).arg()
    });
    let mut statistics = vec![ks_gate("angle_ks_p", &matrix_route, &formula)?];
    let pf = p as f64;
    let opts = QuadOptions::default();
    let cdf = |t: f64| integrate(|s| tilted_circle_pdf(pf, s), -PI, t, opts).map(|r| r.value).unwrap_or(f64::NAN);
    let r = ks_one_sample(&matrix_route, cdf)?;
    statistics.push(Statistic::new("angle_vs_density_ks_p", r.p_value, None, Threshold::Above { bound: KS_LEVEL }));
    Ok(finish(params, statistics))
}
