use clap::Args;
use serde::Serialize;

use qfisize::qfi::{effective_size, EffectiveSize, GeneratorFamily, SystemKind};
use qfisize::states::{analytic_neff, make_state_with_cutoff, AnalyticNeff};

use crate::error::CliResult;
use crate::output::{Lines, Output};
use crate::state_args::StateArgs;

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub state: StateArgs,
}

#[derive(Serialize)]
struct ExactReport {
    state: String,
    effective_size: EffectiveSize,
    closed_form: Option<AnalyticNeff>,
}

pub fn run(args: &ExactArgs) -> CliResult<Output> {
    let spec = args.state.spec()?;
    let rho = make_state_with_cutoff(&spec, args.state.cutoff)?;
    let family = GeneratorFamily::for_space(rho.space());
    let e = effective_size(&rho, family)?;
    let closed = analytic_neff(&spec).ok();

    let mut l = Lines::default();
    l.push("state", spec.describe());
    l.push(
        "system",
        match e.system {
            SystemKind::PhaseSpace { modes } => format!("phase space, {modes} mode(s)"),
            SystemKind::Spin { particles } => format!("{particles} spin-1/2 particles"),
        },
    );
    l.push("QFI", format!("{:.6}", e.qfi.value));
    l.push("generator", &e.qfi.generator);
    l.push("normalization", e.normalization);
    l.push("N_eff", format!("{:.3}", e.value));
    if let Some(t) = &closed {
        let tag = if t.approximate { " (approximate)" } else { "" };
        l.push("closed form", format!("{:.3}{tag}", t.value));
    }
    l.push("convention", e.qfi.convention_note);
    let text = format!("N_eff = {:.3}\n{}", e.value, l.render());
    Output::new(
        text,
        ExactReport {
            state: spec.describe(),
            effective_size: e,
            closed_form: closed,
        },
    )
}
