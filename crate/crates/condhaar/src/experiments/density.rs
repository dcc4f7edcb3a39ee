use condhaar_core::analytics::{beta_pdf, jacobi_edge_constant, tilted_circle_modulus_pdf};
use condhaar_core::charpoly::{alpha_schedule_general, alpha_schedule_group, sample_alphas, unitary_factor_laws, Group};
use condhaar_core::stats::{conditional_density_slope, log_grid, quantile_sorted, tail_slope, TailWindow, Welford};
use condhaar_core::special::ln_gamma;

use super::charpoly::{group_name, parse_group};
use super::util::{count, invalid};
use super::{param, ExperimentError, Outcome, Overrides};
use crate::report::{Params, Statistic, Threshold};
use crate::runner::Runner;

/// One density-exponent case: `|Z_U^(p)|` or the `SO`/`USp` derivative at 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityCase {
    Unitary { n: usize, p: usize },
    Group { group: Group, n: usize, p: usize },
}

impl DensityCase {
    pub fn target(&self) -> f64 {
        match *self {
            DensityCase::Unitary { p, .. } => 2.0 * p as f64,
            DensityCase::Group { group, p, .. } => group.jacobi_exponents(p, 0).0,
        }
    }

    pub fn tolerance(&self) -> f64 {
        if self.target() <= 2.0 {
            0.15
        } else {
            0.2
        }
    }

    fn tag(&self) -> String {
        match *self {
            DensityCase::Unitary { n, p } => format!("unitary_n{n}_p{p}"),
            DensityCase::Group { group, n, p } => format!("{}_n{n}_p{p}", group_name(group)),
        }
    }
}

/// Builds a case from CLI flags; `--n` defaults to 4 and `--p` to 1.
pub fn density_case(ov: &Overrides) -> Result<DensityCase, ExperimentError> {
    let n = ov.n.unwrap_or(4);
    let p = ov.p.unwrap_or(1);
    match ov.group.as_deref().unwrap_or("unitary") {
        "unitary" | "unitary-conditional" => {
            if p == 0 || n < p + 2 {
                return Err(invalid("unitary density needs p >= 1 and n >= p + 2"));
            }
            Ok(DensityCase::Unitary { n, p })
        }
        g => {
            let group = parse_group(g)?;
            if n < 2 {
                return Err(invalid("group density needs n >= 2"));
            }
            Ok(DensityCase::Group { group, n, p })
        }
    }
}

/// Draws `(V·W, W)` where `V` has a known density near zero.
fn draw_pairs(runner: &Runner, case: DensityCase, total: usize) -> Result<(Vec<f64>, Vec<f64>, Box<dyn Fn(f64) -> f64>), ExperimentError> {
    let label = format!("density_exponents/{}", case.tag());
    match case {
        DensityCase::Unitary { n, p } => {
            let laws = unitary_factor_laws(n, p)?;
            let ln_pf = ln_gamma(p as f64 + 1.0);
            let pairs: Vec<(f64, f64)> = runner.samples(&label, total, |rng| {
                let first = laws[0].sample_log_one_minus(rng).re;
                let rest: f64 = laws[1..].iter().map(|l| l.sample_log_one_minus(rng).re).sum::<f64>() + ln_pf;
                ((first + rest).exp(), rest.exp())
            });
            let pf = p as f64;
            let (z, w) = pairs.into_iter().unzip();
            Ok((z, w, Box::new(move |rho| tilted_circle_modulus_pdf(pf, rho))))
        }
        DensityCase::Group { group, n, p } => {
            let schedule = alpha_schedule_group(group, n, p, 0)?;
            let last = schedule.count() - 1;
            let (s, t) = schedule.pairs()[last];
            let pairs: Vec<(f64, f64)> = runner.samples(&label, total, |rng| {
                let alphas = sample_alphas(&schedule, rng);
                let w: f64 = alphas[..last].iter().map(|a| 1.0 - a).product();
                (2.0 * (1.0 - alphas[last]) * w, w)
            });
            let (z, w) = pairs.into_iter().unzip();
            Ok((z, w, Box::new(move |v| beta_pdf(s, t, v / 4.0) / 4.0)))
        }
    }
}

fn case_statistics(runner: &Runner, case: DensityCase, total: usize) -> Result<Vec<Statistic>, ExperimentError> {
    let tag = case.tag();
    let (mut z, w, g) = draw_pairs(runner, case, total)?;
    z.sort_by(f64::total_cmp);
    let q05 = quantile_sorted(&z, 0.05);
    let eps = log_grid(q05 * 1e-4, q05 * 1e-2, 20);
    let fit = conditional_density_slope(&eps, &w, g)?;
    let mut out = vec![Statistic::new(
        format!("{tag}_slope"),
        fit.slope,
        Some(fit.stderr),
        Threshold::Within { target: case.target(), tolerance: case.tolerance() },
    )];
    match tail_slope(&z, TailWindow::default()) {
        Ok(h) => out.push(Statistic::new(format!("{tag}_histogram_slope"), h.slope, Some(h.stderr), Threshold::None)),
        Err(_) => out.push(Statistic::diagnostic(format!("{tag}_histogram_window_too_sparse"), 1.0)),
    }
    out.push(Statistic::diagnostic(format!("{tag}_q05"), q05));
    Ok(out)
}

pub fn density_exponents(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let total = count(ov, 1_000_000, 100_000)?;
    let cases = if ov.group.is_none() && ov.n.is_none() && ov.p.is_none() {
        vec![
            DensityCase::Unitary { n: 4, p: 1 },
            DensityCase::Unitary { n: 4, p: 2 },
            DensityCase::Group { group: Group::So, n: 4, p: 1 },
            DensityCase::Group { group: Group::Usp, n: 4, p: 1 },
        ]
    } else {
        vec![density_case(ov)?]
    };
    let mut params = Params::new();
    param(&mut params, "cases", cases.iter().map(DensityCase::tag).collect::<Vec<_>>());
    param(&mut params, "count", total);
    param(&mut params, "estimator", "E[g(eps/W)/W] on 20 log-spaced eps in [q05*1e-4, q05*1e-2]");
    let mut statistics = Vec::new();
    for case in cases {
        statistics.extend(case_statistics(runner, case, total)?);
    }
    Ok(Outcome { params, statistics })
}

pub fn edge_constant(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let beta = ov.beta.unwrap_or(2.0);
    let a = ov.a.unwrap_or(-0.5);
    let b = ov.b.unwrap_or(1.5);
    let n = ov.n.unwrap_or(3);
    if n < 2 {
        return Err(invalid("--n must be at least 2"));
    }
    let total = count(ov, 1_000_000, 1_000)?;
    let schedule = alpha_schedule_general(beta, a, b, n)?;
    let exact = jacobi_edge_constant(beta, a, b, n)?;
    let eps = 1e-6;
    let last = schedule.count() - 1;
    let (s, t) = schedule.pairs()[last];
    let acc = runner.fold(
        "edge_constant",
        total,
        Welford::new(),
        |acc, rng| {
            let alphas = sample_alphas(&schedule, rng);
            let w: f64 = 2.0 * alphas[..last].iter().map(|x| 1.0 - x).product::<f64>();
            // Density of det⁺ = (1 − α_last)·w at eps, divided by eps^a.
            acc.push(0.5 * beta_pdf(s, t, eps / (2.0 * w)) / w / eps.powf(a));
        },
        |x, y| x.merge(y),
    );
    let e = acc.estimate()?;
    let mut params = Params::new();
    param(&mut params, "beta", beta);
    param(&mut params, "a", a);
    param(&mut params, "b", b);
    param(&mut params, "n", n);
    param(&mut params, "eps", eps);
    param(&mut params, "count", total);
    let statistics = vec![
        Statistic::sigma_check("density_over_eps_pow_a", e.value, e.stderr, exact, 4.0),
        Statistic::diagnostic("closed_form_constant", exact),
    ];
    Ok(Outcome { params, statistics })
}
