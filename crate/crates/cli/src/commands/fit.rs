use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use qfisize::datasets::{read_record, MeasurementRecord};
use qfisize::fit::{fit, FitProblem, FitReport, ModelKind};

use crate::error::{CliError, CliResult};
use crate::output::{Lines, Output};
use crate::plot::curve_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// Wigner cut of a damped cat: A e^{−2θ²} cos(2√S θ + φ)
    Wigner,
    /// Parity fringe A cos(Nθ + φ)
    Fringe,
}

#[derive(Debug, Clone, Args)]
pub struct ModelChoice {
    /// Model to fit; defaults to the one implied by the record kind
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Particle number of the fringe model
    #[arg(long)]
    pub n: Option<usize>,
}

impl ModelChoice {
    pub fn kind(&self, rec: &MeasurementRecord) -> CliResult<ModelKind> {
        let particles = || -> CliResult<usize> {
            match self.n {
                Some(n) => Ok(n),
                None => rec
                    .meta_usize("particles")?
                    .ok_or_else(|| CliError::usage("the fringe model needs --n (or 'particles' in the record)")),
            }
        };
        Ok(match self.model {
            Some(ModelArg::Wigner) => ModelKind::WignerCat,
            Some(ModelArg::Fringe) => ModelKind::Fringe {
                particles: particles()?,
            },
            None => match rec.kind {
                qfisize::datasets::RecordKind::WignerCut => ModelKind::WignerCat,
                qfisize::datasets::RecordKind::ParityFringe => ModelKind::Fringe {
                    particles: particles()?,
                },
                other => return Err(CliError::usage(format!("cannot fit a {other} record"))),
            },
        })
    }
}

pub fn fit_record(rec: &MeasurementRecord, choice: &ModelChoice) -> CliResult<FitReport> {
    let kind = choice.kind(rec)?;
    let problem = FitProblem::new(rec.samples.clone(), kind)?;
    Ok(fit(&problem)?)
}

pub fn fit_lines(r: &FitReport) -> Lines {
    let mut l = Lines::default();
    l.push(
        "model",
        match r.model {
            ModelKind::WignerCat => "A e^{-2θ²} cos(2√S θ + φ)".to_string(),
            ModelKind::Fringe { particles } => format!("A cos({particles}θ + φ)"),
        },
    );
    for ((name, v), se) in r.parameter_names.iter().zip(&r.parameters).zip(&r.std_errors) {
        l.push(name, format!("{v:.6} ± {se:.6}"));
    }
    l.push("chi²", format!("{:.4} (dof {}, reduced {:.4})", r.chi_square, r.dof, r.reduced_chi_square()));
    l.push("converged", format!("{} after {} iterations", if r.converged { "yes" } else { "no" }, r.iterations));
    if r.unit_weights {
        l.push("weights", "unit (all σ zero; covariance scaled by χ²/dof)");
    }
    if !r.unidentifiable.is_empty() {
        l.push("unidentifiable", r.unidentifiable.join(", "));
    }
    for w in &r.warnings {
        l.push("warning", w);
    }
    l
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Record file (wigner_cut or parity_fringe)
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub model: ModelChoice,
    /// Write the fitted curve as CSV
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long, default_value_t = 401)]
    pub curve_points: usize,
}

#[derive(Serialize)]
struct FitOutput<'a> {
    input: String,
    fit: &'a FitReport,
    curve: Option<String>,
}

pub fn run(args: &FitArgs) -> CliResult<Output> {
    let rec = read_record(&args.input)?;
    let report = fit_record(&rec, &args.model)?;
    let mut l = fit_lines(&report);
    if let Some(path) = &args.curve {
        let s = rec.settings();
        let (lo, hi) = (s[0], s[s.len() - 1]);
        std::fs::write(path, curve_csv(lo, hi, args.curve_points, |t| report.value(t)))?;
        l.push("curve", path.display());
    }
    Output::new(
        l.render(),
        FitOutput {
            input: args.input.display().to_string(),
            fit: &report,
            curve: args.curve.as_ref().map(|p| p.display().to_string()),
        },
    )
}
