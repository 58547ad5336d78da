use clap::Args;
use serde::Serialize;

use qfisize::bounds::{fitted_bound, shortcut_a2s, BoundResult};
use qfisize::datasets::{lookup, registry, EntrySystem, ExperimentEntry, MethodTag, PublishedBound};
use qfisize::states::{FringeModel, WignerCatModel};

use crate::error::{CliError, CliResult};
use crate::output::Output;

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ReportArgs {
    /// Registry id of one experiment
    #[arg(long)]
    pub dataset: Option<String>,
    /// Every registry entry
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    /// computed / published
    pub ratio: f64,
    /// The computed interval (or value) meets the published one, the
    /// latter widened by half a unit of its last printed digit.
    pub overlap: bool,
}

#[derive(Debug, Serialize)]
pub struct ReportRow {
    pub id: &'static str,
    pub description: &'static str,
    pub system: EntrySystem,
    pub method: &'static str,
    pub published: PublishedBound,
    pub computed: Option<BoundResult>,
    pub comparison: Option<Comparison>,
    pub note: String,
}

const ROUNDING: f64 = 0.05;

fn compute(e: &ExperimentEntry) -> CliResult<(Option<BoundResult>, String)> {
    let a = e.input("A");
    let s = e.input("S").or_else(|| e.input("alpha").map(|x| 4.0 * x * x));
    let b = match (e.method, a, s, e.input("N")) {
        (MethodTag::Fitted, Some(a), Some(s), _) => {
            let b = fitted_bound(&WignerCatModel::new(a, s, 0.0)?)?;
            (Some(b), format!("fitted Wigner-cut model, A = {a}, S = {s:.2}"))
        }
        (MethodTag::Shortcut, Some(a), Some(s), _) => {
            let b = shortcut_a2s(&WignerCatModel::new(a, s, 0.0)?)?;
            (Some(b), format!("A²S with A = {a}, S = {s}"))
        }
        (MethodTag::Fitted, None, None, Some(n)) => {
            let a = (e.published.value / n).sqrt();
            let b = fitted_bound(&FringeModel::new(a, n as usize, 0.0)?)?;
            (Some(b), format!("fitted fringe, A = {a:.4} implied by the published A²N, N = {n}"))
        }
        _ => (None, "published value only".to_string()),
    };
    Ok(b)
}

pub fn row(e: &ExperimentEntry) -> CliResult<ReportRow> {
    let (computed, note) = compute(e)?;
    let comparison = computed.as_ref().map(|b| {
        let (plo, phi) = e.published.interval();
        let (plo, phi) = if e.published.minus == 0.0 && e.published.plus == 0.0 {
            (plo - ROUNDING, phi + ROUNDING)
        } else {
            (plo, phi)
        };
        let (clo, chi) = b
            .neff_interval()
            .map(|i| (i.low, i.high))
            .unwrap_or((b.neff_lower, b.neff_lower));
        Comparison {
            ratio: b.neff_lower / e.published.value,
            overlap: clo <= phi && chi >= plo,
        }
    });
    Ok(ReportRow {
        id: e.id,
        description: e.description,
        system: e.system,
        method: e.method.label(),
        published: e.published,
        computed,
        comparison,
        note,
    })
}

fn published_text(p: &PublishedBound) -> String {
    if p.minus == 0.0 && p.plus == 0.0 {
        format!("{:.1}", p.value)
    } else if p.minus == p.plus {
        format!("{:.1} ± {:.1}", p.value, p.minus)
    } else {
        format!("{:.1} -{:.1}/+{:.1}", p.value, p.minus, p.plus)
    }
}

pub fn table(rows: &[ReportRow]) -> String {
    let mut out = format!(
        "{:<18} {:<28} {:>17} {:>10} {:>7} {:>8}  {}\n",
        "experiment", "using", "published N_eff ≥", "computed", "ratio", "overlap", "note"
    );
    for r in rows {
        let (computed, ratio, overlap) = match (&r.computed, &r.comparison) {
            (Some(b), Some(c)) => (
                format!("{:.2}", b.neff_lower),
                format!("{:.3}", c.ratio),
                if c.overlap { "yes" } else { "no" }.to_string(),
            ),
            _ => ("-".into(), "-".into(), "-".into()),
        };
        out.push_str(&format!(
            "{:<18} {:<28} {:>17} {:>10} {:>7} {:>8}  {}\n",
            r.id,
            r.method,
            published_text(&r.published),
            computed,
            ratio,
            overlap,
            r.note
        ));
    }
    out
}

pub fn run(args: &ReportArgs) -> CliResult<Output> {
    let entries: Vec<&ExperimentEntry> = match &args.dataset {
        Some(id) => vec![lookup(id).ok_or_else(|| {
            let ids: Vec<&str> = registry().iter().map(|e| e.id).collect();
            CliError::usage(format!("unknown dataset '{id}'; known: {}", ids.join(", ")))
        })?],
        None => registry().iter().collect(),
    };
    let rows = entries.into_iter().map(row).collect::<CliResult<Vec<_>>>()?;
    Output::new(table(&rows), &rows)
}
