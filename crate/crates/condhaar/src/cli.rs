//! Command-line front end. Exit codes: 0 pass, 1 verification failure, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dump::{self, Format, SampleGroup};
use crate::experiments::{find, registry, run_all, ExperimentError, Overrides};
use crate::report::{ExperimentReport, Threshold};
use crate::runner::Runner;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "condhaar", version, about = "Samplers and verification suites for conditioned random unitary matrices")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump raw draws from one construction.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run one experiment by id, or all of them.
    Verify {
        /// Experiment id (see `list`).
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        id: Option<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Small-value density exponents of characteristic polynomial derivatives.
    Density {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Gaussian limit suites for log characteristic polynomials.
    Clt {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print experiment ids, criteria and anchors.
    List,
}

#[derive(Debug, Default, Args)]
struct ParamArgs {
    /// unitary, unitary-conditional, orthogonal-conditional, so, usp or jacobi.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long = "p-plus")]
    p_plus: Option<usize>,
    #[arg(long = "p-minus")]
    p_minus: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
}

impl ParamArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            group: self.group.clone(),
            n: self.n,
            p: self.p,
            p_plus: self.p_plus,
            p_minus: self.p_minus,
            beta: self.beta,
            a: self.a,
            b: self.b,
            count: self.count,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report `runtime_ms` as 0 so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

impl OutputArgs {
    fn runner(&self) -> Result<Runner, Failure> {
        let threads = self.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        Runner::new(self.seed, threads).map_err(|e| Failure::Io(io::Error::other(e)))
    }

    fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::List => {
            let mut out = io::stdout().lock();
            for e in registry() {
                writeln!(out, "{}\t{}\t{}", e.id, e.criterion, e.anchor)?;
            }
            Ok(EXIT_PASS)
        }
        Command::Sample { params, out } => {
            let group: SampleGroup = params.group.as_deref().unwrap_or("unitary-conditional").parse()?;
            let mut ov = params.overrides();
            ov.group = None;
            let draws = dump::sample(&out.runner()?, group, &ov)?;
            let mut sink = out.sink()?;
            dump::write(&draws, out.format(), &mut sink)?;
            sink.flush()?;
            Ok(EXIT_PASS)
        }
        Command::Verify { id, all, params, out } => {
            let runner = out.runner()?;
            let reports = if all {
                if params.overrides() != Overrides::default() {
                    return Err(Failure::Usage("`verify --all` runs default parameters only".into()));
                }
                run_all(&runner, !out.no_timing)?
            } else {
                let id = id.expect("clap requires an id without --all");
                vec![find(&id)?.run(&runner, &params.overrides(), !out.no_timing)?]
            };
            emit(&reports, &out)
        }
        Command::Density { params, out } => {
            let runner = out.runner()?;
            let report = find("density_exponents")?.run(&runner, &params.overrides(), !out.no_timing)?;
            emit(&[report], &out)
        }
        Command::Clt { params, out } => {
            let runner = out.runner()?;
            let mut ov = params.overrides();
            let ids: Vec<&str> = match ov.group.take().as_deref() {
                None => vec!["clt_jacobi", "clt_so", "clt_usp", "clt_unitary"],
                Some("jacobi") => vec!["clt_jacobi"],
                Some("so") => vec!["clt_so"],
                Some("usp") => vec!["clt_usp"],
                Some("unitary") | Some("unitary-conditional") => vec!["clt_unitary"],
                Some(g) => return Err(Failure::Usage(format!("no central limit suite for group `{g}`"))),
            };
            let reports =
                ids.into_iter().map(|id| find(id)?.run(&runner, &ov, !out.no_timing)).collect::<Result<Vec<_>, _>>()?;
            emit(&reports, &out)
        }
    }
}

/// Writes the reports, prints a one-line verdict per experiment to stderr,
/// and maps the conjunction of verdicts to an exit code.
fn emit(reports: &[ExperimentReport], out: &OutputArgs) -> Result<i32, Failure> {
    let mut sink = out.sink()?;
    match out.format() {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, reports).map_err(io::Error::from)?;
            writeln!(sink)?;
        }
        Format::Csv => write_reports_csv(reports, &mut sink)?,
    }
    sink.flush()?;
    for r in reports {
        eprintln!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.experiment_id);
        for s in r.failures() {
            eprintln!("    {} = {} ({:?})", s.name, s.value, s.threshold);
        }
    }
    Ok(if reports.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL })
}

fn write_reports_csv(reports: &[ExperimentReport], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "experiment_id,seed,statistic,value,stderr,threshold,lo,hi,passed")?;
    for r in reports {
        for s in &r.statistics {
            let (kind, lo, hi) = match s.threshold {
                Threshold::AtMost { bound } => ("at_most", String::new(), bound.to_string()),
                Threshold::Above { bound } => ("above", bound.to_string(), String::new()),
                Threshold::Within { target, tolerance } => {
                    ("within", (target - tolerance).to_string(), (target + tolerance).to_string())
                }
                Threshold::Range { lo, hi } => ("range", lo.to_string(), hi.to_string()),
                Threshold::None => ("none", String::new(), String::new()),
            };
            let stderr = s.stderr.map(|e| e.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{},{},{},{},{}", r.experiment_id, r.seed, s.name, s.value, stderr, kind, lo, hi, s.passed())?;
        }
    }
    Ok(())
}
