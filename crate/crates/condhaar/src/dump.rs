//! Raw draws for external plotting: CSV with a header row, or JSON.

use std::io::{self, Write};
use std::str::FromStr;

use condhaar_core::charpoly::{alpha_schedule_general, alpha_schedule_group, sample_jacobi_det_pair, sample_z_product_unitary, Group};
use condhaar_core::measures::sample_conditional_orthogonal;
use condhaar_core::{Complex64, Result as CoreResult};
use serde_json::{json, Value};

use crate::experiments::{ExperimentError, Overrides};
use crate::runner::Runner;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleGroup {
    Unitary,
    UnitaryConditional,
    OrthogonalConditional,
    So,
    Usp,
    Jacobi,
}

impl FromStr for SampleGroup {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "unitary" => SampleGroup::Unitary,
            "unitary-conditional" => SampleGroup::UnitaryConditional,
            "orthogonal-conditional" => SampleGroup::OrthogonalConditional,
            "so" => SampleGroup::So,
            "usp" => SampleGroup::Usp,
            "jacobi" => SampleGroup::Jacobi,
            other => return Err(ExperimentError::InvalidParams(format!("unknown group `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Draws {
    /// `Z` at 1 through the product route.
    Z(Vec<Complex64>),
    /// Row-major matrices of dimension `n`.
    Matrices { n: usize, entries: Vec<Vec<Complex64>> },
    /// Normalized `(det(2Id − u), det(2Id + u))`.
    Pairs(Vec<(f64, f64)>),
}

impl Draws {
    pub fn len(&self) -> usize {
        match self {
            Draws::Z(v) => v.len(),
            Draws::Matrices { entries, .. } => entries.len(),
            Draws::Pairs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn bad(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidParams(msg.into())
}

/// Draws `ov.count` samples (default 1000) from `group`.
pub fn sample(runner: &Runner, group: SampleGroup, ov: &Overrides) -> Result<Draws, ExperimentError> {
    let count = ov.count.unwrap_or(1000);
    let n = ov.n.unwrap_or(8);
    let label = "sample";
    let refuse = |flags: &[(&str, bool)]| match flags.iter().find(|f| f.1) {
        Some((name, _)) => Err(bad(format!("--{name} does not apply to this group"))),
        None => Ok(()),
    };
    match group {
        SampleGroup::Unitary | SampleGroup::UnitaryConditional => {
            refuse(&[("p-plus", ov.p_plus.is_some()), ("p-minus", ov.p_minus.is_some()), ("beta", ov.beta.is_some()), ("a", ov.a.is_some()), ("b", ov.b.is_some())])?;
            let p = match group {
                SampleGroup::Unitary => {
                    refuse(&[("p", ov.p.is_some())])?;
                    0
                }
                _ => ov.p.unwrap_or(1),
            };
            let zs = runner.samples(label, count, |rng| sample_z_product_unitary(n, p, rng));
            Ok(Draws::Z(zs.into_iter().collect::<CoreResult<_>>()?))
        }
        SampleGroup::OrthogonalConditional => {
            refuse(&[("p-plus", ov.p_plus.is_some()), ("p-minus", ov.p_minus.is_some()), ("beta", ov.beta.is_some()), ("a", ov.a.is_some()), ("b", ov.b.is_some())])?;
            let p = ov.p.unwrap_or(1);
            let ms = runner.samples(label, count, |rng| {
                sample_conditional_orthogonal(n, p, rng).map(|u| u.matrix().as_slice().to_vec())
            });
            Ok(Draws::Matrices { n, entries: ms.into_iter().collect::<CoreResult<_>>()? })
        }
        SampleGroup::So | SampleGroup::Usp => {
            refuse(&[("p", ov.p.is_some()), ("beta", ov.beta.is_some()), ("a", ov.a.is_some()), ("b", ov.b.is_some())])?;
            let g = if group == SampleGroup::So { Group::So } else { Group::Usp };
            let schedule = alpha_schedule_group(g, n, ov.p_plus.unwrap_or(0), ov.p_minus.unwrap_or(0))?;
            Ok(Draws::Pairs(pairs(runner, label, count, &schedule)))
        }
        SampleGroup::Jacobi => {
            refuse(&[("p", ov.p.is_some()), ("p-plus", ov.p_plus.is_some()), ("p-minus", ov.p_minus.is_some())])?;
            let schedule = alpha_schedule_general(ov.beta.unwrap_or(2.0), ov.a.unwrap_or(0.0), ov.b.unwrap_or(0.0), n)?;
            Ok(Draws::Pairs(pairs(runner, label, count, &schedule)))
        }
    }
}

fn pairs(runner: &Runner, label: &str, count: usize, schedule: &condhaar_core::charpoly::AlphaSchedule) -> Vec<(f64, f64)> {
    runner.samples(label, count, |rng| {
        let d = sample_jacobi_det_pair(schedule, rng);
        (d.z_plus, d.z_minus)
    })
}

pub fn write(draws: &Draws, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(draws, out),
        Format::Json => {
            serde_json::to_writer(&mut *out, &to_json(draws))?;
            writeln!(out)
        }
    }
}

fn write_csv(draws: &Draws, out: &mut dyn Write) -> io::Result<()> {
    match draws {
        Draws::Z(zs) => {
            writeln!(out, "re_z,im_z")?;
            for z in zs {
                writeln!(out, "{},{}", z.re, z.im)?;
            }
        }
        Draws::Matrices { n, entries } => {
            writeln!(out, "n,{n}")?;
            for m in entries {
                let row: Vec<String> = m.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
                writeln!(out, "{}", row.join(","))?;
            }
        }
        Draws::Pairs(ps) => {
            writeln!(out, "det_plus,det_minus")?;
            for (p, m) in ps {
                writeln!(out, "{p},{m}")?;
            }
        }
    }
    Ok(())
}

fn to_json(draws: &Draws) -> Value {
    match draws {
        Draws::Z(zs) => Value::Array(zs.iter().map(|z| json!({"re_z": z.re, "im_z": z.im})).collect()),
        Draws::Matrices { n, entries } => Value::Array(
            entries
                .iter()
                .map(|m| json!({"n": n, "re": m.iter().map(|z| z.re).collect::<Vec<_>>(), "im": m.iter().map(|z| z.im).collect::<Vec<_>>()}))
                .collect(),
        ),
        Draws::Pairs(ps) => Value::Array(ps.iter().map(|(p, m)| json!({"det_plus": p, "det_minus": m})).collect()),
    }
}
