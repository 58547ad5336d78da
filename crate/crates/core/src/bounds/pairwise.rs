use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::{
    percentile_interval, two_outcome_angle, BoundMethod, BoundResult, Interval, IntervalKind,
    MonteCarlo, Provenance,
};
use crate::datasets::{MeasurementRecord, RecordKind, Sample};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseOptions {
    /// Largest index distance `|n − m|` considered.
    pub max_gap: usize,
    pub mc: MonteCarlo,
    /// Generator parameter per unit setting (½ for spin rotations).
    pub generator_scale: f64,
    pub normalization: f64,
}

impl PairwiseOptions {
    pub fn new(max_gap: usize, mc: MonteCarlo) -> Self {
        Self {
            max_gap,
            mc,
            generator_scale: 1.0,
            normalization: 1.0,
        }
    }

    /// Scale and normalization read from a Wigner-cut or parity-fringe record.
    pub fn for_record(rec: &MeasurementRecord, max_gap: usize, mc: MonteCarlo) -> Result<Self> {
        let (generator_scale, normalization) = match rec.kind {
            RecordKind::WignerCut => (1.0, rec.meta_usize("modes")?.unwrap_or(1) as f64),
            RecordKind::ParityFringe => (
                0.5,
                rec.meta_usize("particles")?
                    .ok_or_else(|| Error::Validation("parity_fringe record needs 'particles'".into()))?
                    as f64,
            ),
            other => {
                return Err(Error::Validation(format!(
                    "pairwise scans need a wigner_cut or parity_fringe record, got {other}"
                )))
            }
        };
        Ok(Self {
            max_gap,
            mc,
            generator_scale,
            normalization,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairBound {
    pub first: usize,
    pub second: usize,
    pub gap: usize,
    /// Midpoint of the two settings.
    pub center: f64,
    pub delta_theta: f64,
    pub bound: BoundResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseScan {
    /// Ordered by first index, then gap.
    pub pairs: Vec<PairBound>,
    /// Index into `pairs` of the largest significant bound.
    pub best: Option<usize>,
}

impl PairwiseScan {
    pub fn best(&self) -> Option<&PairBound> {
        self.best.map(|i| &self.pairs[i])
    }
}

fn pair_value(wn: f64, wm: f64, step: f64) -> f64 {
    let a = two_outcome_angle(1.0 + wn, 1.0 - wn, 1.0 + wm, 1.0 - wm);
    a * a / (step * step)
}

/// Delta-method interval; `None` at `|W| = 1` where it is undefined.
fn delta_interval(wn: f64, wm: f64, sn: f64, sm: f64, step: f64, b: f64) -> Option<Interval> {
    if wn.abs() >= 1.0 || wm.abs() >= 1.0 {
        return None;
    }
    let x = two_outcome_angle(1.0 + wn, 1.0 - wn, 1.0 + wm, 1.0 - wm);
    let ratio = if x < 1e-8 { 1.0 } else { x / x.sin() };
    let db_dcoef = -2.0 * ratio / (step * step);
    let grad = |a: f64, c: f64| 0.25 * (((1.0 + c) / (1.0 + a)).sqrt() - ((1.0 - c) / (1.0 - a)).sqrt());
    let g_n = db_dcoef * grad(wn, wm);
    let g_m = db_dcoef * grad(wm, wn);
    let sd = ((g_n * sn).powi(2) + (g_m * sm).powi(2)).sqrt();
    Some(Interval::new((b - sd).max(0.0), b + sd, IntervalKind::DeltaMethod))
}

/// Bhattacharyya bound for every pair of samples at index distance
/// `1..=max_gap`, with `p± = (1 ± W_n)/2`, `q± = (1 ± W_m)/2` and
/// `δθ = θ_m − θ_n`. Values with `|W| > 1` are clipped and flagged.
/// Intervals come from resampling `W' ~ normal(W, σ)`; the delta method
/// is attached as a cross-check.
pub fn pairwise_scan(samples: &[Sample], opts: &PairwiseOptions) -> Result<PairwiseScan> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "pairwise scan needs ≥ 2 samples, got {}",
            samples.len()
        )));
    }
    if opts.max_gap == 0 {
        return Err(Error::InvalidParameter("max_gap must be ≥ 1".into()));
    }
    if !(opts.generator_scale > 0.0) || !(opts.normalization > 0.0) {
        return Err(Error::InvalidParameter("scale and normalization must be positive".into()));
    }
    for (i, s) in samples.iter().enumerate() {
        if !s.value.is_finite() || !s.setting.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite sample {i}")));
        }
        if !(s.sigma >= 0.0) || !s.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sample {i}: σ = {} must be ≥ 0", s.sigma)));
        }
        if i > 0 && !(s.setting > samples[i - 1].setting) {
            return Err(Error::InvalidParameter("settings must be strictly increasing".into()));
        }
    }

    let mut clipped = Vec::new();
    let mut warnings = Vec::new();
    let w: Vec<f64> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s.value.abs() > 1.0 {
                clipped.push(format!("W[{i}] = {}", s.value));
                if s.value.abs() - 1.0 > 3.0 * s.sigma {
                    warnings.push(format!("W[{i}] = {} exceeds 1 by more than 3σ", s.value));
                }
            }
            s.value.clamp(-1.0, 1.0)
        })
        .collect();

    let mut pairs = Vec::new();
    let mut task = 0u64;
    for n in 0..samples.len() {
        for gap in 1..=opts.max_gap {
            let m = n + gap;
            if m >= samples.len() {
                break;
            }
            let dt = samples[m].setting - samples[n].setting;
            let step = opts.generator_scale * dt;
            let b = pair_value(w[n], w[m], step);
            let (sn, sm) = (samples[n].sigma, samples[m].sigma);
            let mut prov = Provenance::new("pairwise_scan")
                .input("first", n)
                .input("second", m)
                .input("delta_theta", dt)
                .input("generator_scale", opts.generator_scale);
            prov.clipped = clipped
                .iter()
                .filter(|c| c.starts_with(&format!("W[{n}]")) || c.starts_with(&format!("W[{m}]")))
                .cloned()
                .collect();
            prov.warnings = warnings
                .iter()
                .filter(|c| c.starts_with(&format!("W[{n}]")) || c.starts_with(&format!("W[{m}]")))
                .cloned()
                .collect();
            let (interval, cross) = if (sn == 0.0 && sm == 0.0) || opts.mc.samples == 0 {
                (Interval::exact(b), None)
            } else {
                prov = prov.with_mc(opts.mc.seed, opts.mc.samples);
                let mut r = rng::stream(opts.mc.seed, task);
                let draw = |mean: f64, sd: f64, r: &mut rand_chacha::ChaCha8Rng| -> Result<f64> {
                    if sd == 0.0 {
                        return Ok(mean);
                    }
                    let v = Normal::new(mean, sd)
                        .map_err(|e| Error::Distribution(e.to_string()))?
                        .sample(r);
                    Ok(v.clamp(-1.0, 1.0))
                };
                let mut draws = Vec::with_capacity(opts.mc.samples);
                for _ in 0..opts.mc.samples {
                    let a = draw(w[n], sn, &mut r)?;
                    let c = draw(w[m], sm, &mut r)?;
                    draws.push(pair_value(a, c, step));
                }
                (
                    percentile_interval(draws),
                    delta_interval(w[n], w[m], sn, sm, step, b),
                )
            };
            task += 1;
            let mut bound = BoundResult::new(
                BoundMethod::BhattacharyyaPairwise,
                b,
                opts.normalization,
                Some(interval),
                prov,
            );
            bound.cross_check = cross;
            pairs.push(PairBound {
                first: n,
                second: m,
                gap,
                center: 0.5 * (samples[n].setting + samples[m].setting),
                delta_theta: dt,
                bound,
            });
        }
    }
    let best = pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| p.bound.significant)
        .max_by(|a, b| a.1.bound.qfi_lower.total_cmp(&b.1.bound.qfi_lower))
        .map(|(i, _)| i);
    Ok(PairwiseScan { pairs, best })
}
