//! Lower bounds on the QFI from measured data.
//!
//! - [`static_bound`]: uncertainty relation `⟨i[X,Y]⟩² / (4 Var Y)`, or its
//!   squeezing-parameter forms.
//! - [`bhattacharyya_bound`]: `arccos²B / δθ²` for one pair of distributions.
//! - [`pairwise_scan`]: the same on all nearby pairs of a parity record.
//! - [`fitted_bound`]: the same optimized over a fitted fringe model.
//! - [`shortcut_a2s`]: the `A²S` / `A²N` quick estimate.
//! - [`histogram_bound`]: Fock-histogram pairs with Monte-Carlo errors.
//!
//! Intervals are 1-sigma equivalent (16th/84th percentiles or ±1 standard
//! error).

mod bhattacharyya;
mod fitted;
mod pairwise;
mod static_bound;

use std::collections::BTreeMap;

use serde::Serialize;

pub use bhattacharyya::{bhattacharyya_bound, histogram_bound, ProbabilityPair};
pub use fitted::{fitted_bound, fitted_optimum, pair_bound, shortcut_a2s, FittedOptimum};
pub use pairwise::{pairwise_scan, PairBound, PairwiseOptions, PairwiseScan};
pub use static_bound::{
    static_bound, DecibelConvention, DecibelReference, StaticInput, StaticSystem, VarianceRecord,
};

use crate::error::{Error, Result};

/// Lower and upper percentiles of the reported intervals.
pub const COVERAGE: (f64, f64) = (0.16, 0.84);

pub const DEFAULT_MC_SAMPLES: usize = 2000;

/// Monte-Carlo settings; every replicate stream derives from `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self {
            samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Static,
    BhattacharyyaPairwise,
    BhattacharyyaFitted,
    Histogram,
    #[serde(rename = "shortcut_A2S")]
    ShortcutA2S,
}

impl BoundMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundMethod::Static => "static",
            BoundMethod::BhattacharyyaPairwise => "bhattacharyya_pairwise",
            BoundMethod::BhattacharyyaFitted => "bhattacharyya_fitted",
            BoundMethod::Histogram => "histogram",
            BoundMethod::ShortcutA2S => "shortcut_A2S",
        }
    }
}

/// How an interval was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// Exact inputs: zero width.
    Exact,
    DeltaMethod,
    MonteCarlo,
    /// Monte-Carlo percentiles reflected about the point estimate.
    MonteCarloBasic,
    /// Published error bar mapped through a monotone conversion.
    Mapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
    pub kind: IntervalKind,
}

impl Interval {
    pub fn new(low: f64, high: f64, kind: IntervalKind) -> Self {
        Self { low, high, kind }
    }

    pub fn exact(v: f64) -> Self {
        Self::new(v, v, IntervalKind::Exact)
    }

    /// Widened to contain `v`.
    pub fn containing(self, v: f64) -> Self {
        Self::new(self.low.min(v), self.high.max(v), self.kind)
    }

    pub fn scaled(self, s: f64) -> Self {
        Self::new(self.low * s, self.high * s, self.kind)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.high - self.low)
    }
}

/// Inputs and settings that determine a result.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub operation: String,
    pub inputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub mc_samples: Option<usize>,
    /// Inputs that were clipped into their physical range.
    pub clipped: Vec<String>,
    pub warnings: Vec<String>,
}

impl Provenance {
    pub fn new(operation: &str) -> Self {
        Self {
            operation: operation.to_string(),
            ..Self::default()
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_mc(mut self, seed: u64, samples: usize) -> Self {
        self.seed = Some(seed);
        self.rng = Some(crate::rng::GENERATOR_NAME.to_string());
        self.mc_samples = Some(samples);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub method: BoundMethod,
    pub qfi_lower: f64,
    pub neff_lower: f64,
    /// Classical reference QFI dividing `qfi_lower`.
    pub normalization: f64,
    /// Interval on `qfi_lower`; `None` when no uncertainty is available.
    pub interval: Option<Interval>,
    /// Independent second interval (delta method next to Monte Carlo).
    pub cross_check: Option<Interval>,
    pub significant: bool,
    /// True for heuristic formulas that are not strict bounds.
    pub approximate: bool,
    pub inputs_digest: Provenance,
}

impl BoundResult {
    fn new(
        method: BoundMethod,
        qfi_lower: f64,
        normalization: f64,
        interval: Option<Interval>,
        inputs_digest: Provenance,
    ) -> Self {
        let interval = interval.map(|i| i.containing(qfi_lower));
        Self {
            method,
            qfi_lower,
            neff_lower: qfi_lower / normalization,
            normalization,
            interval,
            cross_check: None,
            significant: interval.is_some_and(|i| i.low > 0.0),
            approximate: false,
            inputs_digest,
        }
    }

    /// Interval on `neff_lower`.
    pub fn neff_interval(&self) -> Option<Interval> {
        self.interval.map(|i| i.scaled(1.0 / self.normalization))
    }
}

/// `arccos B` from the Hellinger form `1 − B = ½Σ(√p − √q)²`, which keeps
/// full relative precision as `B → 1`. `B` is clipped to `[0, 1]`.
pub fn bhattacharyya_angle(p: &[f64], q: &[f64]) -> f64 {
    let h: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let (ra, rb) = (a.max(0.0).sqrt(), b.max(0.0).sqrt());
            if ra + rb == 0.0 {
                0.0
            } else {
                let d = (a.max(0.0) - b.max(0.0)) / (ra + rb);
                d * d
            }
        })
        .sum::<f64>()
        * 0.5;
    2.0 * (0.5 * h.clamp(0.0, 1.0)).sqrt().asin()
}

/// `Σ √(p_i q_i)` clipped to `[0, 1]`.
pub fn bhattacharyya_coefficient(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Angle for two-outcome distributions given as `(1 ± W)` pairs, each
/// entry already the stable complement.
pub(crate) fn two_outcome_angle(plus1: f64, minus1: f64, plus2: f64, minus2: f64) -> f64 {
    bhattacharyya_angle(
        &[0.5 * plus1, 0.5 * minus1],
        &[0.5 * plus2, 0.5 * minus2],
    )
}

/// Linear-interpolated quantile of an ascending sample.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// 16th/84th percentile interval of Monte-Carlo replicates.
pub(crate) fn percentile_interval(mut draws: Vec<f64>) -> Interval {
    draws.sort_by(f64::total_cmp);
    Interval::new(
        quantile(&draws, COVERAGE.0),
        quantile(&draws, COVERAGE.1),
        IntervalKind::MonteCarlo,
    )
}

pub(crate) fn check_step(delta_theta: f64) -> Result<()> {
    if delta_theta == 0.0 || !delta_theta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "perturbation step δθ = {delta_theta} must be finite and nonzero"
        )));
    }
    Ok(())
}
