use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use qfisize::datasets::{
    simulate_record, uniform_grid, write_record, MeasurementRecord, Protocol, Shots, DEFAULT_POINTS,
    DEFAULT_THETA0,
};
use qfisize::states::ParityAxis;

use crate::error::{CliError, CliResult};
use crate::output::{Lines, Output};
use crate::state_args::{parse_vec3, StateArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    /// Displaced photon parity along a quadrature
    WignerCut,
    /// Collective rotation followed by a product parity
    ParityFringe,
    /// Fock populations before and after a displacement
    Histogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    X,
    Y,
    Z,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Defaults to wigner-cut for phase-space states, parity-fringe for spins
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    /// Grid spacing θ₀
    #[arg(long, default_value_t = DEFAULT_THETA0)]
    pub theta0: f64,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
    /// Quadrature angle of the displacement
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub angle: f64,
    /// Rotation axis of the parity fringe, as x,y,z
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,1", allow_hyphen_values = true)]
    pub rotation_axis: [f64; 3],
    /// Parity read out after the rotation
    #[arg(long, value_enum, default_value = "x")]
    pub measure: MeasureArg,
    /// Displacement between the two histograms
    #[arg(long, default_value_t = 0.1)]
    pub delta_theta: f64,
    /// Shots per setting, or 'inf' for exact expectations
    #[arg(long, default_value = "1000")]
    pub shots: Shots,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record file to write; printed to stdout otherwise
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    output: Option<String>,
    record: &'a MeasurementRecord,
}

pub fn run(args: &SimulateArgs) -> CliResult<Output> {
    let spec = args.state.spec()?;
    let protocol = match args.protocol.unwrap_or(if spec.is_spin() {
        ProtocolArg::ParityFringe
    } else {
        ProtocolArg::WignerCut
    }) {
        ProtocolArg::WignerCut => Protocol::WignerCut {
            angle: args.angle,
            grid: grid(args)?,
        },
        ProtocolArg::ParityFringe => Protocol::ParityFringe {
            axis: args.rotation_axis,
            measure: match args.measure {
                MeasureArg::X => ParityAxis::X,
                MeasureArg::Y => ParityAxis::Y,
                MeasureArg::Z => ParityAxis::Z,
            },
            grid: grid(args)?,
        },
        ProtocolArg::Histogram => Protocol::FockHistogramPair {
            angle: args.angle,
            delta_theta: args.delta_theta,
        },
    };
    let rec = simulate_record(&spec, &protocol, args.shots, args.seed, args.state.cutoff)?;
    let text = match &args.output {
        Some(path) => {
            write_record(&rec, path)?;
            let mut l = Lines::default();
            l.push("wrote", path.display());
            l.push("kind", rec.kind);
            l.push("samples", rec.samples.len());
            l.push("state", spec.describe());
            l.push("shots", args.shots);
            l.push("seed", args.seed);
            l.render()
        }
        None => rec.to_csv(),
    };
    Output::new(
        text,
        SimulateOutput {
            output: args.output.as_ref().map(|p| p.display().to_string()),
            record: &rec,
        },
    )
}

fn grid(args: &SimulateArgs) -> CliResult<Vec<f64>> {
    if args.theta0.is_nan() || args.theta0 <= 0.0 || args.points == 0 {
        return Err(CliError::usage("--theta0 must be positive and --points at least 1"));
    }
    Ok(uniform_grid(args.theta0, args.points))
}
