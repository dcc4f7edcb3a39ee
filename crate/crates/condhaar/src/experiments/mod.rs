//! Registry of named verification experiments.

mod algebra;
mod appendix;
mod charpoly;
mod clt;
mod density;
mod haar;
mod spectral;
mod util;

use std::time::Instant;

use serde_json::Value;

use crate::report::{ExperimentReport, Params, Statistic};
use crate::runner::Runner;

pub use density::{density_case, DensityCase};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("unknown experiment id `{0}`")]
    UnknownId(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Core(#[from] condhaar_core::Error),
}

/// Optional parameter overrides taken from the command line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub group: Option<String>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub p_plus: Option<usize>,
    pub p_minus: Option<usize>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub count: Option<usize>,
}

impl Overrides {
    fn given(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags: [(&'static str, bool); 9] = [
            ("group", self.group.is_some()),
            ("n", self.n.is_some()),
            ("p", self.p.is_some()),
            ("p-plus", self.p_plus.is_some()),
            ("p-minus", self.p_minus.is_some()),
            ("beta", self.beta.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("count", self.count.is_some()),
        ];
        for (name, set) in flags {
            if set {
                out.push(name);
            }
        }
        out
    }
}

pub struct Outcome {
    pub params: Params,
    pub statistics: Vec<Statistic>,
}

type RunFn = fn(&Runner, &Overrides) -> Result<Outcome, ExperimentError>;

pub struct Experiment {
    pub id: &'static str,
    /// Acceptance criterion this experiment belongs to.
    pub criterion: u8,
    pub anchor: &'static str,
    pub accepts: &'static [&'static str],
    run: RunFn,
}

const REGISTRY: &[Experiment] = &[
    Experiment {
        id: "det_identity",
        criterion: 1,
        anchor: "det(Id - r1...rn) = prod(1 - r_kk) for products of reflections",
        accepts: &["n", "count"],
        run: algebra::det_identity,
    },
    Experiment {
        id: "unitarity_conditioning",
        criterion: 2,
        anchor: "conditional Haar measure as a product of n-p reflections",
        accepts: &["n", "p", "count"],
        run: algebra::unitarity_conditioning,
    },
    Experiment {
        id: "weyl_moments",
        criterion: 3,
        anchor: "Haar measure as a product of reflections; Weyl integration formula",
        accepts: &["count"],
        run: haar::weyl_moments,
    },
    Experiment {
        id: "rotation_ks",
        criterion: 4,
        anchor: "u = e^{i theta} r1...r_{n-1} in spectral law",
        accepts: &["n", "count"],
        run: spectral::rotation_ks,
    },
    Experiment {
        id: "slipping_ks",
        criterion: 4,
        anchor: "slipping: r1...r_{n-p} and p-tilted r_{p+1}...r_n share their spectral law",
        accepts: &["n", "p", "count"],
        run: spectral::slipping_ks,
    },
    Experiment {
        id: "general_slip_ks",
        criterion: 4,
        anchor: "slipping with general complex tilts delta_1..delta_m",
        accepts: &["count"],
        run: spectral::general_slip_ks,
    },
    Experiment {
        id: "abs_z_conditioning_ks",
        criterion: 4,
        anchor: "continuous family of measures conditioned on |det(Id - u)| = x",
        accepts: &["n", "count"],
        run: spectral::abs_z_conditioning_ks,
    },
    Experiment {
        id: "last_eigenvalue_ks",
        criterion: 4,
        anchor: "single nontrivial eigenvalue -(1 - r11)/(1 - conj r11)",
        accepts: &["n", "count"],
        run: spectral::last_eigenvalue_ks,
    },
    Experiment {
        id: "route_equivalence",
        criterion: 5,
        anchor: "Z_U^(p) as p! times a product of independent tilted coordinates",
        accepts: &["n", "p", "count"],
        run: charpoly::route_equivalence,
    },
    Experiment {
        id: "jacobi_one_level",
        criterion: 6,
        anchor: "alpha-coefficient law of (det(2Id - u), det(2Id + u)), one level",
        accepts: &["a", "b", "count"],
        run: charpoly::jacobi_one_level,
    },
    Experiment {
        id: "group_moments",
        criterion: 7,
        anchor: "SO/USp derivatives at +1 and -1 through independent alpha-coefficients",
        accepts: &["group", "n", "p-plus", "p-minus", "count"],
        run: charpoly::group_moments,
    },
    Experiment {
        id: "density_exponents",
        criterion: 8,
        anchor: "density of |Z| and det(2Id - u) near zero: exponents 2p and a",
        accepts: &["group", "n", "p", "count"],
        run: density::density_exponents,
    },
    Experiment {
        id: "edge_constant",
        criterion: 8,
        anchor: "explicit constant c(n) in h_n(eps) ~ c(n) eps^a",
        accepts: &["beta", "a", "b", "n", "count"],
        run: density::edge_constant,
    },
    Experiment {
        id: "clt_jacobi",
        criterion: 9,
        anchor: "central limit theorem for (log det(2Id - u), log det(2Id + u)), Jacobi ensemble",
        accepts: &["beta", "a", "b", "n", "count"],
        run: clt::clt_jacobi,
    },
    Experiment {
        id: "clt_so",
        criterion: 9,
        anchor: "central limit theorem for log Z_SO at +1 and -1",
        accepts: &["n", "p-plus", "p-minus", "count"],
        run: clt::clt_so,
    },
    Experiment {
        id: "clt_usp",
        criterion: 9,
        anchor: "central limit theorem for log Z_USp at +1 and -1",
        accepts: &["n", "p-plus", "p-minus", "count"],
        run: clt::clt_usp,
    },
    Experiment {
        id: "clt_unitary",
        criterion: 9,
        anchor: "central limit theorem for log Z_U^(p)",
        accepts: &["n", "p", "count"],
        run: clt::clt_unitary,
    },
    Experiment {
        id: "update_identity_ks",
        criterion: 10,
        anchor: "Y - (1 - |Y|^2) B/(1 - conj Y) is the (delta+1)-tilted coordinate",
        accepts: &["count"],
        run: appendix::update_identity_ks,
    },
    Experiment {
        id: "transform_grid",
        criterion: 10,
        anchor: "Mellin-Fourier transforms of 1 + sphere coordinate, 2cos(phi)e^{i phi}, tilted coordinates",
        accepts: &["count"],
        run: appendix::transform_grid,
    },
    Experiment {
        id: "tilted_routes_ks",
        criterion: 10,
        anchor: "1 - Y = 2cos(phi) e^{i phi} B: angle-times-beta against rejection",
        accepts: &["count"],
        run: appendix::tilted_routes_ks,
    },
];

pub fn registry() -> &'static [Experiment] {
    REGISTRY
}

pub fn find(id: &str) -> Result<&'static Experiment, ExperimentError> {
    REGISTRY.iter().find(|e| e.id == id).ok_or_else(|| ExperimentError::UnknownId(id.to_owned()))
}

impl Experiment {
    /// Runs with `overrides` applied. `timing = false` zeroes `runtime_ms`.
    pub fn run(
        &self,
        runner: &Runner,
        overrides: &Overrides,
        timing: bool,
    ) -> Result<ExperimentReport, ExperimentError> {
        if let Some(bad) = overrides.given().into_iter().find(|g| !self.accepts.contains(g)) {
            return Err(ExperimentError::InvalidParams(format!("`{}` does not take --{bad}", self.id)));
        }
        let start = Instant::now();
        let out = (self.run)(runner, overrides)?;
        let ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
        Ok(ExperimentReport::new(self.id, out.params, out.statistics, runner.seed(), ms))
    }
}

/// Every registered experiment with default parameters, in registry order.
pub fn run_all(runner: &Runner, timing: bool) -> Result<Vec<ExperimentReport>, ExperimentError> {
    REGISTRY.iter().map(|e| e.run(runner, &Overrides::default(), timing)).collect()
}

fn param(params: &mut Params, key: &str, value: impl Into<Value>) {
    params.insert(key.to_owned(), value.into());
}
