use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use qfisize::bounds::{BoundResult, Interval, IntervalKind};

use crate::error::{CliError, CliResult};

/// What a command prints: human-readable text and its JSON mirror.
pub struct Output {
    pub text: String,
    pub json: Value,
    /// Reported after printing (e.g. exit 4 for `--require-significant`).
    pub failure: Option<CliError>,
}

impl Output {
    pub fn new(text: String, json: impl Serialize) -> CliResult<Self> {
        let json = serde_json::to_value(json).map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(Self {
            text,
            json,
            failure: None,
        })
    }
}

/// Aligned `key  value` lines.
#[derive(Default)]
pub struct Lines(Vec<(String, String)>);

impl Lines {
    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let width = self.0.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.0 {
            let pad = width - k.chars().count();
            writeln!(out, "{k}{}  {v}", " ".repeat(pad)).unwrap();
        }
        out
    }
}

pub fn kind_name(k: IntervalKind) -> &'static str {
    match k {
        IntervalKind::Exact => "exact",
        IntervalKind::DeltaMethod => "delta method",
        IntervalKind::MonteCarlo => "Monte Carlo percentile",
        IntervalKind::MonteCarloBasic => "Monte Carlo basic bootstrap",
        IntervalKind::Mapped => "mapped from input errors",
    }
}

pub fn interval_text(i: &Interval, scale: f64) -> String {
    format!("[{:.4}, {:.4}] ({})", i.low * scale, i.high * scale, kind_name(i.kind))
}

/// Lines common to every bound report.
pub fn bound_lines(b: &BoundResult) -> Lines {
    let mut l = Lines::default();
    l.push("method", b.method.as_str());
    l.push("QFI ≥", format!("{:.6}", b.qfi_lower));
    l.push("normalization", b.normalization);
    let mut neff = format!("{:.2}", b.neff_lower);
    if b.approximate {
        neff.push_str(&format!(" (≈ {:.1}, approximate)", b.neff_lower));
    }
    l.push("N_eff ≥", neff);
    match b.neff_interval() {
        Some(i) => l.push("interval", interval_text(&i, 1.0)),
        None => l.push("interval", "none (no uncertainties given)"),
    };
    if let Some(c) = b.cross_check {
        l.push("cross-check", interval_text(&c, 1.0 / b.normalization));
    }
    l.push("significant", if b.significant { "yes" } else { "no" });
    for w in &b.inputs_digest.warnings {
        l.push("warning", w);
    }
    l
}

pub fn require(flag: bool, significant: bool, what: &str) -> Option<CliError> {
    (flag && !significant).then(|| CliError::NotSignificant(format!("{what}: no significant bound")))
}
