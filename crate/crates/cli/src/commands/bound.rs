use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use qfisize::bounds::{
    bhattacharyya_bound, fitted_bound, histogram_bound, pairwise_scan, shortcut_a2s, static_bound,
    BoundResult, DecibelConvention, DecibelReference, MonteCarlo, PairwiseOptions, PairwiseScan,
    ProbabilityPair, StaticInput, StaticSystem, VarianceRecord, DEFAULT_MC_SAMPLES,
};
use qfisize::datasets::read_record;
use qfisize::fit::{FitReport, ModelKind};
use qfisize::states::{FringeModel, WignerCatModel};

use super::fit::{fit_lines, fit_record, ModelArg, ModelChoice};
use crate::error::{CliError, CliResult};
use crate::output::{bound_lines, interval_text, require, Lines, Output};
use crate::plot::{pairwise_csv, pairwise_svg};

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(subcommand)]
    pub command: BoundCommand,
    /// Exit with status 4 when no significant bound results
    #[arg(long, global = true)]
    pub require_significant: bool,
}

#[derive(Debug, Subcommand)]
pub enum BoundCommand {
    /// Uncertainty-relation bound from a variance and a commutator mean, or from squeezing
    Static(StaticArgs),
    /// Bhattacharyya bound on every pair of points of a two-outcome record
    Pairwise(PairwiseArgs),
    /// Bhattacharyya bound on a fitted fringe model
    Fitted(FittedArgs),
    /// Bhattacharyya bound on a pair of histograms
    Histogram(HistogramArgs),
    /// A²S (Wigner cut) or A²N (parity fringe) estimate
    Shortcut(ShortcutArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    PhotonicMode,
    Spin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceArg {
    /// Vacuum quadrature noise
    Vacuum,
    /// Coherent spin state (Wineland parameter)
    Css,
}

#[derive(Debug, Args)]
pub struct StaticArgs {
    /// variance_record file
    #[arg(long, conflicts_with_all = ["db", "variance", "inverse_squeezing"])]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "photonic-mode")]
    pub system: SystemArg,
    #[arg(long, default_value_t = 1)]
    pub modes: usize,
    #[arg(long)]
    pub particles: Option<usize>,
    /// Squeezing in dB relative to the reference
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["variance", "inverse_squeezing"])]
    pub db: Option<f64>,
    /// Symmetric dB error (sets both --db-minus and --db-plus)
    #[arg(long, conflicts_with_all = ["db_minus", "db_plus"])]
    pub db_se: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub db_minus: f64,
    #[arg(long, default_value_t = 0.0)]
    pub db_plus: f64,
    /// Reference the dB figure is quoted against; must match --system
    #[arg(long, value_enum)]
    pub reference: Option<ReferenceArg>,
    /// Negative dB values mean squeezing
    #[arg(long)]
    pub negative_is_squeezed: bool,
    /// Var Y
    #[arg(long, requires = "z", conflicts_with = "inverse_squeezing")]
    pub variance: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub variance_se: f64,
    /// ⟨Z⟩ with Z = i[X, Y]
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub z_se: f64,
    /// Inverse squeezing parameter 1/ξ²
    #[arg(long)]
    pub inverse_squeezing: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub minus: f64,
    #[arg(long, default_value_t = 0.0)]
    pub plus: f64,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Monte Carlo draws per interval
    #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl McArgs {
    fn mc(&self) -> MonteCarlo {
        MonteCarlo {
            samples: self.mc_samples,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct PairwiseArgs {
    /// wigner_cut or parity_fringe record
    #[arg(long)]
    pub input: PathBuf,
    /// Largest index distance between the two points of a pair
    #[arg(long, default_value_t = 3)]
    pub max_gap: usize,
    #[command(flatten)]
    pub mc: McArgs,
    /// Write one CSV row per pair (center,gap,bound,low,high)
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Write an SVG scatter of the pair bounds
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Number of highest pairs listed
    #[arg(long, default_value_t = 5)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct FittedArgs {
    /// Record to fit; alternatively give the model parameters
    #[arg(long, conflicts_with_all = ["a", "s"])]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelChoice,
    /// Coherence amplitude
    #[arg(long = "A", id = "a")]
    pub a: Option<f64>,
    /// Separation 4|α|² of the Wigner-cut model
    #[arg(long = "S", id = "s")]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long = "A-se", default_value_t = 0.0)]
    pub a_se: f64,
    #[arg(long = "S-se", default_value_t = 0.0)]
    pub s_se: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi_se: f64,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    /// fock_histogram_pair record
    #[arg(long)]
    pub input: PathBuf,
    /// Delta-method interval instead of the bootstrap
    #[arg(long)]
    pub delta: bool,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct ShortcutArgs {
    /// Record to fit first; alternatively give A with S or --n
    #[arg(long, conflicts_with_all = ["a", "s"])]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelChoice,
    #[arg(long = "A", id = "a")]
    pub a: Option<f64>,
    #[arg(long = "S", id = "s")]
    pub s: Option<f64>,
}

#[derive(Serialize)]
struct SingleBound<'a> {
    bound: &'a BoundResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<&'a FitReport>,
}

pub fn run(args: &BoundArgs) -> CliResult<Output> {
    let strict = args.require_significant;
    match &args.command {
        BoundCommand::Static(a) => single(static_cmd(a)?, None, strict),
        BoundCommand::Pairwise(a) => pairwise(a, strict),
        BoundCommand::Fitted(a) => {
            let (model, fit) = model_from(a.input.as_ref(), &a.model, a.a, a.s, a.phi, [a.a_se, a.s_se, a.phi_se])?;
            let b = match &model {
                Model::Wigner(m) => fitted_bound(m)?,
                Model::Fringe(m) => fitted_bound(m)?,
            };
            single(b, fit, strict)
        }
        BoundCommand::Histogram(a) => {
            let rec = read_record(&a.input)?;
            let pair = ProbabilityPair::from_record(&rec)?;
            let b = if a.delta || pair.sigma_p.is_none() {
                bhattacharyya_bound(&pair)?
            } else {
                histogram_bound(&pair, a.mc.mc())?
            };
            single(b, None, strict)
        }
        BoundCommand::Shortcut(a) => {
            let (model, fit) = model_from(a.input.as_ref(), &a.model, a.a, a.s, 0.0, [0.0; 3])?;
            let b = match &model {
                Model::Wigner(m) => shortcut_a2s(m)?,
                Model::Fringe(m) => shortcut_a2s(m)?,
            };
            single(b, fit, strict)
        }
    }
}

fn single(b: BoundResult, fit: Option<FitReport>, strict: bool) -> CliResult<Output> {
    let mut text = String::new();
    if let Some(f) = &fit {
        text.push_str(&fit_lines(f).render());
        text.push('\n');
    }
    text.push_str(&bound_lines(&b).render());
    let mut out = Output::new(
        text,
        SingleBound {
            bound: &b,
            fit: fit.as_ref(),
        },
    )?;
    out.failure = require(strict, b.significant, b.method.as_str());
    Ok(out)
}

fn static_cmd(a: &StaticArgs) -> CliResult<BoundResult> {
    if let Some(path) = &a.input {
        return Ok(static_bound(&VarianceRecord::from_record(&read_record(path)?)?)?);
    }
    let system = match a.system {
        SystemArg::PhotonicMode => StaticSystem::PhotonicModes { modes: a.modes },
        SystemArg::Spin => StaticSystem::Spin {
            particles: a
                .particles
                .ok_or_else(|| CliError::usage("--system spin requires --particles"))?,
        },
    };
    let input = if let Some(db) = a.db {
        let (minus, plus) = match a.db_se {
            Some(se) => (se, se),
            None => (a.db_minus, a.db_plus),
        };
        let convention = (a.reference.is_some() || a.negative_is_squeezed).then_some(DecibelConvention {
            reference: match a.reference {
                Some(ReferenceArg::Vacuum) => DecibelReference::Vacuum,
                Some(ReferenceArg::Css) => DecibelReference::CoherentSpinState,
                None => match system {
                    StaticSystem::PhotonicModes { .. } => DecibelReference::Vacuum,
                    StaticSystem::Spin { .. } => DecibelReference::CoherentSpinState,
                },
            },
            positive_is_squeezed: !a.negative_is_squeezed,
        });
        StaticInput::Decibels {
            db,
            minus,
            plus,
            convention,
        }
    } else if let (Some(variance), Some(z_mean)) = (a.variance, a.z) {
        StaticInput::Moments {
            variance,
            variance_se: a.variance_se,
            z_mean,
            z_se: a.z_se,
        }
    } else if let Some(value) = a.inverse_squeezing {
        StaticInput::InverseSqueezing {
            value,
            minus: a.minus,
            plus: a.plus,
        }
    } else {
        return Err(CliError::usage(
            "bound static needs --input, --db, --variance with --z, or --inverse-squeezing",
        ));
    };
    Ok(static_bound(&VarianceRecord { input, system })?)
}

enum Model {
    Wigner(WignerCatModel),
    Fringe(FringeModel),
}

fn model_from(
    input: Option<&PathBuf>,
    choice: &ModelChoice,
    a: Option<f64>,
    s: Option<f64>,
    phi: f64,
    se: [f64; 3],
) -> CliResult<(Model, Option<FitReport>)> {
    if let Some(path) = input {
        let rec = read_record(path)?;
        let report = fit_record(&rec, choice)?;
        let model = match report.model {
            ModelKind::WignerCat => Model::Wigner(report.wigner_model()?),
            ModelKind::Fringe { .. } => Model::Fringe(report.fringe_model()?),
        };
        return Ok((model, Some(report)));
    }
    let a = a.ok_or_else(|| CliError::usage("give --input or the model amplitude --A"))?;
    let fringe = choice.model == Some(ModelArg::Fringe) || (s.is_none() && choice.n.is_some());
    let model = if fringe {
        if s.is_some() {
            return Err(CliError::usage("--S belongs to the Wigner-cut model, not the fringe model"));
        }
        let n = choice
            .n
            .ok_or_else(|| CliError::usage("the fringe model needs --n"))?;
        let cov = [[se[0] * se[0], 0.0], [0.0, se[2] * se[2]]];
        Model::Fringe(FringeModel::with_covariance(a, n, phi, cov)?)
    } else {
        let s = s.ok_or_else(|| CliError::usage("give --S (Wigner cut) or --n (parity fringe)"))?;
        let cov = [
            [se[0] * se[0], 0.0, 0.0],
            [0.0, se[1] * se[1], 0.0],
            [0.0, 0.0, se[2] * se[2]],
        ];
        Model::Wigner(WignerCatModel::with_covariance(a, s, phi, cov)?)
    };
    Ok((model, None))
}

#[derive(Serialize)]
struct PairwiseOutput<'a> {
    input: String,
    options: &'a PairwiseOptions,
    pairs: usize,
    significant_pairs: usize,
    digest: String,
    scan: &'a PairwiseScan,
}

fn pairwise(a: &PairwiseArgs, strict: bool) -> CliResult<Output> {
    let rec = read_record(&a.input)?;
    let opts = PairwiseOptions::for_record(&rec, a.max_gap, a.mc.mc())?;
    let scan = pairwise_scan(&rec.samples, &opts)?;
    let csv = pairwise_csv(&scan);
    let digest = format!("{:x}", Sha256::digest(csv.as_bytes()));
    let significant = scan.pairs.iter().filter(|p| p.bound.significant).count();

    let mut l = Lines::default();
    l.push("record", format!("{} ({} points)", rec.kind, rec.samples.len()));
    l.push("pairs", format!("{} (max gap {}), {significant} significant", scan.pairs.len(), a.max_gap));
    l.push("Monte Carlo", format!("{} draws, seed {}", a.mc.mc_samples, a.mc.seed));
    match scan.best() {
        Some(p) => {
            l.push(
                "best pair",
                format!("#{} and #{} (centre {:.4}, gap {})", p.first, p.second, p.center, p.gap),
            );
            l.push("N_eff ≥", format!("{:.2}", p.bound.neff_lower));
            if let Some(i) = p.bound.neff_interval() {
                l.push("interval", interval_text(&i, 1.0));
            }
        }
        None => {
            l.push("best pair", "none significant");
        }
    }
    if let Some(path) = &a.plot_data {
        std::fs::write(path, &csv)?;
        l.push("plot data", path.display());
    }
    if let Some(path) = &a.svg {
        std::fs::write(path, pairwise_svg(&scan))?;
        l.push("svg", path.display());
    }
    l.push("digest", &digest);
    let mut text = l.render();
    let mut ranked: Vec<_> = scan.pairs.iter().collect();
    ranked.sort_by(|x, y| y.bound.neff_lower.total_cmp(&x.bound.neff_lower));
    if a.top > 0 && !ranked.is_empty() {
        text.push_str("\n  first second    centre  gap    N_eff ≥  significant\n");
        for p in ranked.iter().take(a.top) {
            text.push_str(&format!(
                "  {:>5} {:>6} {:>9.4} {:>4} {:>10.2}  {}\n",
                p.first,
                p.second,
                p.center,
                p.gap,
                p.bound.neff_lower,
                if p.bound.significant { "yes" } else { "no" }
            ));
        }
    }
    let mut out = Output::new(
        text,
        PairwiseOutput {
            input: a.input.display().to_string(),
            options: &opts,
            pairs: scan.pairs.len(),
            significant_pairs: significant,
            digest: digest.clone(),
            scan: &scan,
        },
    )?;
    out.failure = require(strict, significant > 0, "pairwise");
    Ok(out)
}
