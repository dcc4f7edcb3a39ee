use std::f64::consts::PI;

use condhaar_core::analytics::weyl_density_unitary;
use condhaar_core::measures::sample_haar_unitary;
use condhaar_core::quadrature::{integrate, integrate_2d, QuadOptions};
use condhaar_core::stats::Welford;
use condhaar_core::{Complex64, Error};

use super::util::{count, mean_gate};
use super::{param, ExperimentError, Outcome, Overrides};
use crate::report::{Params, Statistic};
use crate::runner::Runner;

/// Class functions compared against quadrature: `Re Tr u`, `Im Tr u`,
/// `|Tr u|²`, `|Tr u²|²`, `|det(Id − u)|²`.
fn class_functions(angles: &[f64]) -> [f64; 5] {
    let z: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let tr: Complex64 = z.iter().sum();
    let tr2: Complex64 = z.iter().map(|w| w * w).sum();
    let det: Complex64 = z.iter().map(|w| Complex64::new(1.0, 0.0) - w).product();
    [tr.re, tr.im, tr.norm_sqr(), tr2.norm_sqr(), det.norm_sqr()]
}

const NAMES: [&str; 5] = ["re_tr", "im_tr", "abs_tr_sq", "abs_tr_u2_sq", "abs_det_id_minus_sq"];

/// `E f(u)` under Haar measure on `U(n)`, `n ∈ {2, 3}`, by iterated
/// quadrature of the Weyl density.
fn weyl_oracle(n: usize, k: usize) -> Result<f64, Error> {
    let opts = QuadOptions { abs_tol: 1e-9, rel_tol: 1e-11, max_intervals: 2000 };
    let f2 = |a: f64, b: f64| weyl_density_unitary(&[a, b]) * class_functions(&[a, b])[k];
    let norm2 = (2.0 * PI).powi(2);
    match n {
        2 => Ok(integrate_2d(f2, (-PI, PI), (-PI, PI), opts)?.value / norm2),
        3 => {
            let mut failure = None;
            let outer = integrate(
                |a| {
                    let inner = integrate_2d(
                        |b, c| weyl_density_unitary(&[a, b, c]) * class_functions(&[a, b, c])[k],
                        (-PI, PI),
                        (-PI, PI),
                        opts,
                    );
                    inner.map(|r| r.value).unwrap_or_else(|e| {
                        failure.get_or_insert(e);
                        0.0
                    })
                },
                -PI,
                PI,
                opts,
            )?;
            match failure {
                Some(e) => Err(e),
                None => Ok(outer.value / (2.0 * PI).powi(3)),
            }
        }
        _ => Err(Error::Domain("quadrature oracle covers n = 2, 3")),
    }
}

pub fn weyl_moments(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let n_samples = count(ov, 100_000, 1_000)?;
    let mut params = Params::new();
    param(&mut params, "count", n_samples);
    param(&mut params, "quadrature_n", vec![2, 3]);
    param(&mut params, "closed_form_n", (2..=6).collect::<Vec<_>>());
    let mut statistics = Vec::new();
    for n in 2..=6usize {
        let acc = runner.fold(
            &format!("weyl_moments/{n}"),
            n_samples,
            [Welford::new(); 5],
            |acc, rng| {
                let u = sample_haar_unitary(n, rng).expect("valid dimension");
                let tr = u.trace();
                let tr2 = u.trace_of_square();
                let det = u.det_id_minus();
                let v = [tr.re, tr.im, tr.norm_sqr(), tr2.norm_sqr(), det.norm_sqr()];
                for (w, x) in acc.iter_mut().zip(v) {
                    w.push(x);
                }
            },
            |a, b| a.iter_mut().zip(b).for_each(|(x, y)| x.merge(y)),
        );
        if n <= 3 {
            for (k, name) in NAMES.iter().enumerate() {
                let oracle = weyl_oracle(n, k)?;
                statistics.push(mean_gate(format!("{name}_n{n}_vs_quadrature"), &acc[k], oracle)?);
                statistics.push(Statistic::diagnostic(format!("{name}_n{n}_quadrature"), oracle));
            }
        }
        statistics.push(mean_gate(format!("abs_det_id_minus_sq_n{n}_vs_n_plus_1"), &acc[4], n as f64 + 1.0)?);
    }
    Ok(Outcome { params, statistics })
}
