use condhaar_core::analytics::{mf_cospower, mf_one_plus_sphere_coord, mf_tilted_coord, mf_tilted_update_target};
use condhaar_core::distributions::{sample_beta, sample_beta_one, sample_cospower_angle, TiltedLaw};
use condhaar_core::stats::ComplexWelford;
use condhaar_core::{Complex64, Result as CoreResult, RngStream};

use super::util::{budget, count, ks_gate, mean_gate};
use super::{param, ExperimentError, Outcome, Overrides};
use crate::report::{Params, Statistic};
use crate::runner::Runner;

const GRID_TS: [(f64, f64); 4] = [(1.0, 1.0), (2.0, 0.0), (2.0, 2.0), (4.0, 0.0)];
const GRID_LAMBDA: [f64; 2] = [1.0, 3.0];
const GRID_DELTA: [f64; 2] = [0.0, 1.0];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn deltas() -> [(Complex64, &'static str); 2] {
    [(c(1.0, 0.0), "d1"), (c(0.5, 0.5), "d0.5+0.5i")]
}

/// `|x|^t e^{is·arg x}`.
fn mf_term(x: Complex64, t: f64, s: f64) -> Complex64 {
    Complex64::from_polar(x.norm().powf(t), s * x.arg())
}

fn update_draw(lambda: f64, law: &TiltedLaw, rng: &mut RngStream) -> CoreResult<Complex64> {
    let y = law.sample(rng);
    let b = sample_beta(1.0, lambda - 1.0, rng)?;
    Ok(y - (1.0 - y.norm_sqr()) * b / (c(1.0, 0.0) - y.conj()))
}

fn complex_gates(prefix: &str, acc: &ComplexWelford, target: Complex64) -> CoreResult<Vec<Statistic>> {
    Ok(vec![mean_gate(format!("{prefix}_re"), &acc.re, target.re)?, mean_gate(format!("{prefix}_im"), &acc.im, target.im)?])
}

pub fn update_identity_ks(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let total = count(ov, 10_000, 100)?;
    let lambda = 3.0;
    let mut params = Params::new();
    param(&mut params, "lambda", lambda);
    param(&mut params, "delta", deltas().iter().map(|d| d.1).collect::<Vec<_>>());
    param(&mut params, "count", total);
    let mut statistics = Vec::new();
    let mut tests = 0;
    for (delta, tag) in deltas() {
        let law = TiltedLaw::new(lambda, delta)?;
        let target = TiltedLaw::new(lambda - 1.0, delta + 1.0)?;
        let lhs: Vec<Complex64> = runner
            .samples(&format!("update_identity_ks/{tag}/lhs"), total, |rng| update_draw(lambda, &law, rng))
            .into_iter()
            .collect::<CoreResult<_>>()?;
        let rhs: Vec<Complex64> = runner.samples(&format!("update_identity_ks/{tag}/rhs"), total, |rng| target.sample(rng));
        let part = |zs: &[Complex64], f: fn(&Complex64) -> f64| zs.iter().map(f).collect::<Vec<f64>>();
        statistics.push(ks_gate(format!("{tag}_re_ks_p"), &part(&lhs, |z| z.re), &part(&rhs, |z| z.re))?);
        statistics.push(ks_gate(format!("{tag}_im_ks_p"), &part(&lhs, |z| z.im), &part(&rhs, |z| z.im))?);
        statistics.push(ks_gate(format!("{tag}_abs_ks_p"), &part(&lhs, |z| z.norm()), &part(&rhs, |z| z.norm()))?);
        tests += 3;
        let mut acc = ComplexWelford::default();
        for &x in &lhs {
            acc.push(mf_term(c(1.0, 0.0) - x, 2.0, 0.0));
        }
        let exact = mf_tilted_update_target(lambda, delta, 2.0, 0.0)?;
        statistics.extend(complex_gates(&format!("{tag}_transform_t2_s0"), &acc, exact)?);
    }
    statistics.push(budget(tests));
    Ok(Outcome { params, statistics })
}

/// Monte Carlo transform of `draw` against its closed form.
fn transform_case<F>(runner: &Runner, label: &str, total: usize, t: f64, s: f64, draw: F) -> ComplexWelford
where
    F: Fn(&mut RngStream) -> Complex64 + Sync,
{
    runner.fold(
        label,
        total,
        ComplexWelford::default(),
        |acc, rng| acc.push(mf_term(draw(rng), t, s)),
        |a, b| a.merge(b),
    )
}

pub fn transform_grid(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let total = count(ov, 100_000, 100)?;
    let mut params = Params::new();
    param(&mut params, "t_s", GRID_TS.iter().map(|&(t, s)| vec![t, s]).collect::<Vec<_>>());
    param(&mut params, "lambda", GRID_LAMBDA.to_vec());
    param(&mut params, "delta", GRID_DELTA.to_vec());
    param(&mut params, "cospower_z", "lambda + i*delta");
    param(&mut params, "count", total);
    let mut statistics = Vec::new();
    for &(t, s) in &GRID_TS {
        for &lambda in &GRID_LAMBDA {
            let tag = format!("sphere_l{lambda}_t{t}_s{s}");
            let acc = transform_case(runner, &format!("transform_grid/{tag}"), total, t, s, |rng| {
                c(1.0, 0.0) + Complex64::from_polar(sample_beta_one(lambda, rng).sqrt(), rng.angle())
            });
            let exact = mf_one_plus_sphere_coord(lambda, t, s)?;
            statistics.extend(complex_gates(&tag, &acc, c(exact, 0.0))?);
            for &delta in &GRID_DELTA {
                let z = c(lambda, delta);
                let tag = format!("cospower_z{lambda}+{delta}i_t{t}_s{s}");
                let acc = transform_case(runner, &format!("transform_grid/{tag}"), total, t, s, |rng| {
                    let phi = sample_cospower_angle(z.re, z.im, rng).expect("Re z > -1/2");
                    Complex64::from_polar(2.0 * phi.cos(), phi)
                });
                statistics.extend(complex_gates(&tag, &acc, mf_cospower(z, t, s)?)?);

                let d = c(delta, 0.0);
                let law = TiltedLaw::new(lambda, d)?;
                let tag = format!("tilted_l{lambda}_d{delta}_t{t}_s{s}");
                let acc = transform_case(runner, &format!("transform_grid/{tag}"), total, t, s, |rng| {
                    c(1.0, 0.0) - law.sample(rng)
                });
                statistics.extend(complex_gates(&tag, &acc, mf_tilted_coord(lambda, d, t, s)?)?);
            }
        }
    }
    Ok(Outcome { params, statistics })
}

pub fn tilted_routes_ks(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let total = count(ov, 10_000, 100)?;
    let lambda = 3.0;
    let mut params = Params::new();
    param(&mut params, "lambda", lambda);
    param(&mut params, "delta", deltas().iter().map(|d| d.1).collect::<Vec<_>>());
    param(&mut params, "count", total);
    let mut statistics = Vec::new();
    for (delta, tag) in deltas() {
        let law = TiltedLaw::new(lambda, delta)?;
        let rejection: Vec<Complex64> = runner
            .samples(&format!("tilted_routes_ks/{tag}/rejection"), total, |rng| law.sample_by_rejection(rng))
            .into_iter()
            .collect::<CoreResult<_>>()?;
        let angle_beta: Vec<Complex64> =
            runner.samples(&format!("tilted_routes_ks/{tag}/angle_beta"), total, |rng| law.sample_by_angle_beta(rng));
        let part = |zs: &[Complex64], f: fn(&Complex64) -> f64| zs.iter().map(f).collect::<Vec<f64>>();
        statistics.push(ks_gate(format!("{tag}_re_ks_p"), &part(&rejection, |z| z.re), &part(&angle_beta, |z| z.re))?);
        statistics.push(ks_gate(format!("{tag}_im_ks_p"), &part(&rejection, |z| z.im), &part(&angle_beta, |z| z.im))?);
    }
    statistics.push(budget(4));
    Ok(Outcome { params, statistics })
}
