use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{
    bhattacharyya_angle, check_step, percentile_interval, BoundMethod, BoundResult, Interval,
    IntervalKind, MonteCarlo, Provenance,
};
use crate::datasets::{MeasurementRecord, RecordKind};
use crate::error::{Error, Result};
use crate::rng;

/// Outcome distributions of one measurement before (`p`) and after (`q`)
/// the perturbation `exp(−i X δθ·scale)`, aligned by outcome index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub delta_theta: f64,
    pub sigma_p: Option<Vec<f64>>,
    pub sigma_q: Option<Vec<f64>>,
    /// Generator parameter per unit `δθ` (1 for displacements, ½ for
    /// spin rotations written as `exp(−i θ n̂·J)`).
    pub generator_scale: f64,
    pub normalization: f64,
}

const SUM_TOL: f64 = 1e-9;

impl ProbabilityPair {
    pub fn new(p: Vec<f64>, q: Vec<f64>, delta_theta: f64) -> Result<Self> {
        let pair = Self {
            p,
            q,
            delta_theta,
            sigma_p: None,
            sigma_q: None,
            generator_scale: 1.0,
            normalization: 1.0,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn with_uncertainty(mut self, sigma_p: Vec<f64>, sigma_q: Vec<f64>) -> Result<Self> {
        self.sigma_p = Some(sigma_p);
        self.sigma_q = Some(sigma_q);
        self.validate()?;
        Ok(self)
    }

    pub fn with_scale(mut self, generator_scale: f64, normalization: f64) -> Result<Self> {
        self.generator_scale = generator_scale;
        self.normalization = normalization;
        self.validate()?;
        Ok(self)
    }

    /// From a `fock_histogram_pair` record (`delta_theta` and optional
    /// `modes` in meta).
    pub fn from_record(rec: &MeasurementRecord) -> Result<Self> {
        if rec.kind != RecordKind::FockHistogramPair {
            return Err(Error::Validation(format!("expected fock_histogram_pair, got {}", rec.kind)));
        }
        let q = rec
            .second
            .as_ref()
            .ok_or_else(|| Error::Validation("histogram pair without q column".into()))?;
        let dt = rec
            .meta_f64("delta_theta")?
            .ok_or_else(|| Error::Validation("missing delta_theta".into()))?;
        let modes = rec.meta_usize("modes")?.unwrap_or(1) as f64;
        Self::new(rec.values(), q.iter().map(|s| s.value).collect(), dt)?
            .with_uncertainty(rec.sigmas(), q.iter().map(|s| s.sigma).collect())?
            .with_scale(1.0, modes)
    }

    pub fn validate(&self) -> Result<()> {
        check_step(self.delta_theta)?;
        if self.p.len() != self.q.len() || self.p.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "distributions have {} and {} outcomes",
                self.p.len(),
                self.q.len()
            )));
        }
        for (name, d) in [("p", &self.p), ("q", &self.q)] {
            if d.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidParameter(format!("{name} has entries outside [0, 1]")));
            }
            let s: f64 = d.iter().sum();
            if (s - 1.0).abs() > SUM_TOL {
                return Err(Error::InvalidParameter(format!("{name} sums to {s}, not 1")));
            }
        }
        for (name, s) in [("sigma_p", &self.sigma_p), ("sigma_q", &self.sigma_q)] {
            if let Some(s) = s {
                if s.len() != self.p.len() {
                    return Err(Error::InvalidParameter(format!("{name} length mismatch")));
                }
                if s.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidParameter(format!("{name} must be finite and ≥ 0")));
                }
            }
        }
        if !(self.generator_scale > 0.0) || !(self.normalization > 0.0) {
            return Err(Error::InvalidParameter("scale and normalization must be positive".into()));
        }
        Ok(())
    }

    fn step(&self) -> f64 {
        self.generator_scale * self.delta_theta
    }

    fn bound_of(&self, p: &[f64], q: &[f64]) -> f64 {
        let a = bhattacharyya_angle(p, q);
        a * a / (self.step() * self.step())
    }

    fn provenance(&self, op: &str) -> Provenance {
        Provenance::new(op)
            .input("outcomes", self.p.len())
            .input("delta_theta", self.delta_theta)
            .input("generator_scale", self.generator_scale)
    }
}

/// `I ≥ arccos²B / δθ²` with `B = Σ √(p_i q_i)` clipped to `[0, 1]`.
/// With per-entry errors the interval is the delta-method one.
pub fn bhattacharyya_bound(pair: &ProbabilityPair) -> Result<BoundResult> {
    pair.validate()?;
    let b = pair.bound_of(&pair.p, &pair.q);
    let interval = match (&pair.sigma_p, &pair.sigma_q) {
        (Some(sp), Some(sq)) => delta_interval(pair, sp, sq, b),
        _ => Some(Interval::exact(b)),
    };
    let mut prov = pair.provenance("bhattacharyya_bound");
    if interval.is_none() {
        prov.warnings.push(
            "delta method undefined: an empty bin has a nonzero error; use the bootstrap interval".into(),
        );
    }
    Ok(BoundResult::new(
        BoundMethod::BhattacharyyaPairwise,
        b,
        pair.normalization,
        interval,
        prov,
    ))
}

fn delta_interval(pair: &ProbabilityPair, sp: &[f64], sq: &[f64], b: f64) -> Option<Interval> {
    if sp.iter().chain(sq).all(|s| *s == 0.0) {
        return Some(Interval::exact(b));
    }
    let x = bhattacharyya_angle(&pair.p, &pair.q);
    // d(x²/s²)/dB = −2x / (s² sin x), finite as x → 0
    let ratio = if x < 1e-8 { 1.0 } else { x / x.sin() };
    let db_dcoef = -2.0 * ratio / (pair.step() * pair.step());
    // Fluctuations keep each distribution normalized, so the gradient of
    // B = Σ√(p q) along p_j is ½√(q_j/p_j) − B/2 (and likewise for q).
    let coef: f64 = pair.p.iter().zip(&pair.q).map(|(a, c)| (a * c).sqrt()).sum();
    let mut var = 0.0;
    for i in 0..pair.p.len() {
        let (p, q) = (pair.p[i], pair.q[i]);
        for (s, num, den) in [(sp[i], q, p), (sq[i], p, q)] {
            if s == 0.0 {
                continue;
            }
            if den <= 0.0 {
                return None;
            }
            let g = db_dcoef * 0.5 * ((num / den).sqrt() - coef);
            var += (g * s).powi(2);
        }
    }
    let sd = var.sqrt();
    Some(Interval::new((b - sd).max(0.0), b + sd, IntervalKind::DeltaMethod))
}

/// Bhattacharyya bound on full Fock histograms. The interval resamples
/// every bin from `normal(value, σ)`, clips at 0 and renormalizes; since
/// noise can only lower `B`, percentiles are reflected about the point
/// estimate (basic bootstrap) so the interval reaches 0 when the noise
/// dominates the signal.
pub fn histogram_bound(pair: &ProbabilityPair, mc: MonteCarlo) -> Result<BoundResult> {
    pair.validate()?;
    let b = pair.bound_of(&pair.p, &pair.q);
    let zeros = vec![0.0; pair.p.len()];
    let sp = pair.sigma_p.as_deref().unwrap_or(&zeros);
    let sq = pair.sigma_q.as_deref().unwrap_or(&zeros);
    let mut prov = pair.provenance("histogram_bound");
    if sp.iter().chain(sq).all(|s| *s == 0.0) || mc.samples == 0 {
        return Ok(BoundResult::new(
            BoundMethod::Histogram,
            b,
            pair.normalization,
            Some(Interval::exact(b)),
            prov,
        ));
    }
    prov = prov.with_mc(mc.seed, mc.samples);
    let mut draws = Vec::with_capacity(mc.samples);
    for k in 0..mc.samples {
        let mut r = rng::stream(mc.seed, k as u64);
        let mut resample = |d: &[f64], s: &[f64]| -> Result<Vec<f64>> {
            let mut v = Vec::with_capacity(d.len());
            for (&m, &sd) in d.iter().zip(s) {
                let x = if sd > 0.0 {
                    Normal::new(m, sd)
                        .map_err(|e| Error::Distribution(e.to_string()))?
                        .sample(&mut r)
                } else {
                    m
                };
                v.push(x.max(0.0));
            }
            let total: f64 = v.iter().sum();
            if total > 0.0 {
                v.iter_mut().for_each(|x| *x /= total);
            }
            Ok(v)
        };
        let p = resample(&pair.p, sp)?;
        let q = resample(&pair.q, sq)?;
        draws.push(pair.bound_of(&p, &q));
    }
    let pct = percentile_interval(draws);
    let basic = Interval::new(2.0 * b - pct.high, 2.0 * b - pct.low, IntervalKind::MonteCarloBasic);
    let mut res = BoundResult::new(BoundMethod::Histogram, b, pair.normalization, Some(basic), prov);
    res.cross_check = Some(pct);
    Ok(res)
}
