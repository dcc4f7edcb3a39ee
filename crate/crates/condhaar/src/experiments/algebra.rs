use condhaar_core::charpoly::det_id_minus_product;
use condhaar_core::linalg::CMatrix;
use condhaar_core::measures::{
    eigenangles, product, sample_conditional_haar, sample_conditional_orthogonal, sample_reflections, UnitaryMatrix,
};
use condhaar_core::{Error, RngStream};

use super::util::{count, invalid};
use super::{param, ExperimentError, Outcome, Overrides};
use crate::report::{Params, Statistic, Threshold};
use crate::runner::Runner;

const MAX_N: usize = 10;

fn dims(ov: &Overrides) -> Result<Vec<usize>, ExperimentError> {
    match ov.n {
        Some(n) if (1..=MAX_N).contains(&n) => Ok(vec![n]),
        Some(_) => Err(invalid(format!("--n must be in 1..={MAX_N}"))),
        None => Ok((1..=MAX_N).collect()),
    }
}

pub fn det_identity(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let ns = dims(ov)?;
    let n_samples = count(ov, 1_000, 1)?;
    let mut params = Params::new();
    param(&mut params, "n", ns.clone());
    param(&mut params, "count", n_samples);
    let mut statistics = Vec::new();
    for &n in &ns {
        let dev = runner
            .chunks(&format!("det_identity/{n}"), n_samples, 250, |rng, len| -> Result<f64, Error> {
                let mut worst = 0.0f64;
                for _ in 0..len {
                    let rs = sample_reflections(n, n, rng)?;
                    let lhs = det_id_minus_product(&rs)?;
                    let u = product(&rs)?;
                    let rhs = CMatrix::identity(n).sub(&u).det();
                    worst = worst.max((lhs - rhs).norm());
                }
                Ok(worst)
            })
            .into_iter()
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))?;
        statistics.push(Statistic::new(
            format!("max_deviation_n{n}"),
            dev,
            None,
            Threshold::AtMost { bound: 1e-9 * n as f64 },
        ));
    }
    Ok(Outcome { params, statistics })
}

#[derive(Clone, Copy, Default)]
struct Tally {
    samples: u64,
    invariant_failures: u64,
    multiplicity_failures: u64,
    max_defect: f64,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        self.samples += o.samples;
        self.invariant_failures += o.invariant_failures;
        self.multiplicity_failures += o.multiplicity_failures;
        self.max_defect = self.max_defect.max(o.max_defect);
    }

    fn record(&mut self, draw: condhaar_core::Result<UnitaryMatrix>, p: usize) {
        self.samples += 1;
        match draw {
            Ok(u) => {
                self.max_defect = self.max_defect.max(u.matrix().unitarity_defect());
                let pinned = eigenangles(&u).map(|a| a.pinned_count()).unwrap_or(0);
                if pinned < p {
                    self.multiplicity_failures += 1;
                }
            }
            Err(_) => {
                self.invariant_failures += 1;
                self.multiplicity_failures += 1;
            }
        }
    }
}

type Sampler = fn(usize, usize, &mut RngStream) -> condhaar_core::Result<UnitaryMatrix>;

pub fn unitarity_conditioning(runner: &Runner, ov: &Overrides) -> Result<Outcome, ExperimentError> {
    let ns = dims(ov)?;
    let n_samples = count(ov, 1_000, 1)?;
    let mut cases = Vec::new();
    for &n in &ns {
        match ov.p {
            Some(p) if p < n => cases.push((n, p)),
            Some(_) => return Err(invalid("--p must be below --n")),
            None => cases.extend((0..n).map(|p| (n, p))),
        }
    }
    let mut params = Params::new();
    param(&mut params, "cases", cases.iter().map(|&(n, p)| vec![n, p]).collect::<Vec<_>>());
    param(&mut params, "count_per_case", n_samples);
    param(&mut params, "deflation_tolerance", condhaar_core::DEFLATION_TOLERANCE);
    let families: [(&str, Sampler); 2] =
        [("unitary", sample_conditional_haar), ("orthogonal", sample_conditional_orthogonal)];
    let mut statistics = Vec::new();
    for (family, sampler) in families {
        let mut total = Tally::default();
        for &(n, p) in &cases {
            let label = format!("unitarity_conditioning/{family}/{n}/{p}");
            let t = runner.fold(&label, n_samples, Tally::default(), |t, rng| t.record(sampler(n, p, rng), p), Tally::merge);
            total.merge(&t);
        }
        statistics.push(Statistic::diagnostic(format!("{family}_samples"), total.samples as f64));
        statistics.push(Statistic::new(
            format!("{family}_invariant_failures"),
            total.invariant_failures as f64,
            None,
            Threshold::AtMost { bound: 0.0 },
        ));
        statistics.push(Statistic::new(
            format!("{family}_multiplicity_failures"),
            total.multiplicity_failures as f64,
            None,
            Threshold::AtMost { bound: 0.0 },
        ));
        statistics.push(Statistic::new(
            format!("{family}_max_unitarity_defect"),
            total.max_defect,
            None,
            Threshold::AtMost { bound: condhaar_core::measures::UNITARITY_TOLERANCE },
        ));
    }
    Ok(Outcome { params, statistics })
}
