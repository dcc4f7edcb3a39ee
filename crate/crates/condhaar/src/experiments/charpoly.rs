use condhaar_core::analytics::{expected_sq_modulus_zp, fst_one_minus_moment, fst_one_plus_moment};
use condhaar_core::charpoly::{
    alpha_schedule_general, alpha_schedule_group, det_pair_from_alphas, factorial, sample_alphas,
    sample_jacobi_n1, sample_z_product_unitary, z_derivative, AlphaSchedule, Group,
};
use condhaar_core::measures::{eigenangles, sample_conditional_haar};
use condhaar_core::stats::Welford;
use condhaar_core::{Complex64, Result as CoreResult};

use super::util::{budget, count, invalid, ks_gate, mean_gate, welford};
use super::{param, ExperimentError, Outcome, Overrides};
use crate::report::{Params, Statistic, Threshold};
use crate::runner::Runner;

pub fn route_equivalence(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let n = ov.n.unwrap_or(8);
    let ps = match ov.p {
        Some(p) => vec![p],
        None => vec![1, 2],
    };
    if n == 0 || n > 12 || ps.iter().any(|&p| p >= n) {
        return Err(invalid("need 0 <= p < n <= 12"));
    }
    let total = count(ov, 10_000, 100)?;
    let mut params = Params::new();
    param(&mut params, "n", n);
    param(&mut params, "p", ps.clone());
    param(&mut params, "count", total);
    let mut statistics = Vec::new();
    for p in ps {
        let matrix: Vec<Complex64> = runner
            .samples(&format!("route_equivalence/{n}/{p}/matrix"), total, |rng| {
                let u = sample_conditional_haar(n, p, rng)?;
                z_derivative(&eigenangles(&u)?, p)
            })
            .into_iter()
            .collect::<CoreResult<_>>()?;
        let prod: Vec<Complex64> = runner
            .samples(&format!("route_equivalence/{n}/{p}/product"), total, |rng| sample_z_product_unitary(n, p, rng))
            .into_iter()
            .collect::<CoreResult<_>>()?;
        let modulus = |zs: &[Complex64]| zs.iter().map(|z| z.norm()).collect::<Vec<_>>();
        let arg = |zs: &[Complex64]| zs.iter().map(|z| z.arg()).collect::<Vec<_>>();
        statistics.push(ks_gate(format!("p{p}_abs_z_ks_p"), &modulus(&matrix), &modulus(&prod))?);
        statistics.push(ks_gate(format!("p{p}_arg_z_ks_p"), &arg(&matrix), &arg(&prod))?);
        let exact = expected_sq_modulus_zp(n, p)?;
        let pf = factorial(p);
        let sq = |zs: &[Complex64]| welford(zs.iter().map(|z| (z / pf).norm_sqr()));
        statistics.push(mean_gate(format!("p{p}_matrix_sq_modulus"), &sq(&matrix), exact)?);
        statistics.push(mean_gate(format!("p{p}_product_sq_modulus"), &sq(&prod), exact)?);
    }
    let tests = statistics.iter().filter(|s| s.name.ends_with("_ks_p")).count();
    statistics.push(budget(tests));
    Ok(Outcome { params, statistics })
}

pub fn jacobi_one_level(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let cases = match (ov.a, ov.b) {
        (None, None) => vec![(-0.5, -0.5), (1.5, -0.5), (2.5, 0.5)],
        (Some(a), Some(b)) if a > -1.0 && b > -1.0 => vec![(a, b)],
        _ => return Err(invalid("give both --a and --b, each > -1")),
    };
    let total = count(ov, 100_000, 100)?;
    let mut params = Params::new();
    param(&mut params, "cases", cases.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>());
    param(&mut params, "count", total);
    let mut statistics = Vec::new();
    for (a, b) in cases {
        let tag = format!("a{a}_b{b}");
        let schedule = alpha_schedule_general(2.0, a, b, 1)?;
        let alpha_route: Vec<(f64, f64)> = runner.samples(&format!("jacobi_one_level/{tag}/alpha"), total, |rng| {
            let alphas = sample_alphas(&schedule, rng);
            let pair = det_pair_from_alphas(&alphas);
            let a0 = alphas[0];
            (pair.z_plus, (pair.z_plus * pair.z_minus - 4.0 * (1.0 - a0 * a0)).abs())
        });
        let direct: Vec<f64> = runner
            .samples(&format!("jacobi_one_level/{tag}/direct"), total, |rng| sample_jacobi_n1(a, b, rng).map(|x| 2.0 - x))
            .into_iter()
            .collect::<CoreResult<_>>()?;
        let plus: Vec<f64> = alpha_route.iter().map(|r| r.0).collect();
        let worst = alpha_route.iter().map(|r| r.1).fold(0.0, f64::max);
        statistics.push(ks_gate(format!("{tag}_det_plus_ks_p"), &plus, &direct)?);
        statistics.push(Statistic::new(
            format!("{tag}_pair_identity_max_error"),
            worst,
            None,
            Threshold::AtMost { bound: 16.0 * f64::EPSILON },
        ));
        let mean = 4.0 * (a + 1.0) / (a + b + 2.0);
        statistics.push(mean_gate(format!("{tag}_det_plus_mean"), &welford(plus.iter().copied()), mean)?);
    }
    let tests = statistics.iter().filter(|s| s.name.ends_with("_ks_p")).count();
    statistics.push(budget(tests));
    Ok(Outcome { params, statistics })
}

/// `(E det⁺, E det⁻, E (det⁺)²)` from the `f_{s,t}` moments.
fn schedule_moments(schedule: &AlphaSchedule) -> CoreResult<[f64; 3]> {
    let mut m = [2.0, 2.0, 4.0];
    for (k, &(s, t)) in schedule.pairs().iter().enumerate() {
        m[0] *= fst_one_minus_moment(s, t, 1.0)?;
        m[1] *= if k % 2 == 0 { fst_one_plus_moment(s, t, 1.0)? } else { fst_one_minus_moment(s, t, 1.0)? };
        m[2] *= fst_one_minus_moment(s, t, 2.0)?;
    }
    Ok(m)
}

pub(super) fn parse_group(name: &str) -> Result<Group, ExperimentError> {
    match name {
        "so" => Ok(Group::So),
        "usp" => Ok(Group::Usp),
        _ => Err(invalid("--group must be so or usp here")),
    }
}

pub(super) fn group_name(g: Group) -> &'static str {
    match g {
        Group::So => "so",
        Group::Usp => "usp",
    }
}

pub fn group_moments(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let groups = match &ov.group {
        Some(g) => vec![parse_group(g)?],
        None => vec![Group::So, Group::Usp],
    };
    let n = ov.n.unwrap_or(4);
    if n == 0 {
        return Err(invalid("--n must be positive"));
    }
    let ps = match (ov.p_plus, ov.p_minus) {
        (None, None) => vec![(0, 0), (1, 0), (1, 1)],
        (pp, pm) => vec![(pp.unwrap_or(0), pm.unwrap_or(0))],
    };
    let total = count(ov, 100_000, 100)?;
    let mut params = Params::new();
    param(&mut params, "groups", groups.iter().map(|&g| group_name(g)).collect::<Vec<_>>());
    param(&mut params, "n", n);
    param(&mut params, "p_plus_p_minus", ps.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>());
    param(&mut params, "count", total);
    let mut statistics = Vec::new();
    for &g in &groups {
        for &(pp, pm) in &ps {
            let tag = format!("{}_p{pp}_{pm}", group_name(g));
            let schedule = alpha_schedule_group(g, n, pp, pm)?;
            let exact = schedule_moments(&schedule)?;
            let acc = runner.fold(
                &format!("group_moments/{tag}"),
                total,
                [Welford::new(); 3],
                |acc, rng| {
                    let d = det_pair_from_alphas(&sample_alphas(&schedule, rng));
                    acc[0].push(d.z_plus);
                    acc[1].push(d.z_minus);
                    acc[2].push(d.z_plus * d.z_plus);
                },
                |a, b| a.iter_mut().zip(b).for_each(|(x, y)| x.merge(y)),
            );
            for (k, name) in ["det_plus_mean", "det_minus_mean", "det_plus_sq_mean"].iter().enumerate() {
                statistics.push(mean_gate(format!("{tag}_{name}"), &acc[k], exact[k])?);
            }
        }
    }
    Ok(Outcome { params, statistics })
}
