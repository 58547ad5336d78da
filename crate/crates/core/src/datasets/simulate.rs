//! Synthetic measurement records drawn from exact state evolution.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::record::{MeasurementRecord, RecordKind, Sample};
use crate::error::{Error, Result};
use crate::rng;
use crate::state_space::SpaceSpec;
use crate::states::{make_state_with_cutoff, DisplacedParityScan, ParityAxis, SpinParityScan, StateSpec};

pub const DEFAULT_THETA0: f64 = 0.02;
pub const DEFAULT_POINTS: usize = 81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shots {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Finite(n) => write!(f, "{n}"),
            Shots::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinite") {
            return Ok(Shots::Infinite);
        }
        match s.parse::<u64>() {
            Ok(n) if n >= 1 => Ok(Shots::Finite(n)),
            _ => Err(Error::InvalidParameter(format!("shots '{s}' must be ≥ 1 or 'inf'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum Protocol {
    /// Displacement along `X_angle` (on every mode) then photon parity.
    WignerCut { angle: f64, grid: Vec<f64> },
    /// Collective rotation about `axis` then the product parity along `measure`.
    ParityFringe {
        axis: [f64; 3],
        measure: ParityAxis,
        grid: Vec<f64>,
    },
    /// Fock populations before and after a displacement by `delta_theta`.
    FockHistogramPair { angle: f64, delta_theta: f64 },
}

/// `θ = n θ₀` for `points` values of `n` centred on zero.
pub fn uniform_grid(theta0: f64, points: usize) -> Vec<f64> {
    let half = (points as i64 - 1) / 2;
    (0..points as i64).map(|i| (i - half) as f64 * theta0).collect()
}

/// Common spacing `θ₀` if every setting is an integer multiple of it.
fn grid_spacing(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let rough = grid[1] - grid[0];
    if !(rough > 0.0) {
        return None;
    }
    let n_first = (grid[0] / rough).round();
    let n_last = (grid[grid.len() - 1] / rough).round();
    let t0 = if n_last > n_first {
        (grid[grid.len() - 1] - grid[0]) / (n_last - n_first)
    } else {
        rough
    };
    let on_grid = grid.iter().all(|t| {
        let n = t / t0;
        (n - n.round()).abs() <= 1e-9 * n.abs().max(1.0)
    });
    on_grid.then_some(t0)
}

/// Estimated standard error of a ±1 average from `k` of `n` positive
/// outcomes, using `(k+1)/(n+2)` so that all-equal outcomes keep a
/// nonzero error bar.
pub fn parity_sigma(k: u64, n: u64) -> f64 {
    let p = (k as f64 + 1.0) / (n as f64 + 2.0);
    2.0 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Standard error of a bin frequency `k / n`, floored the same way.
pub fn frequency_sigma(k: u64, n: u64) -> f64 {
    let p = (k as f64 + 1.0) / (n as f64 + 2.0);
    (p * (1.0 - p) / n as f64).sqrt()
}

fn draw_parity(w: f64, shots: Shots, rng: &mut impl Rng) -> Result<(f64, f64)> {
    match shots {
        Shots::Infinite => Ok((w, 0.0)),
        Shots::Finite(n) => {
            let p = (0.5 * (1.0 + w)).clamp(0.0, 1.0);
            let k = Binomial::new(n, p)
                .map_err(|e| Error::Distribution(e.to_string()))?
                .sample(rng);
            Ok((2.0 * k as f64 / n as f64 - 1.0, parity_sigma(k, n)))
        }
    }
}

fn draw_histogram(probs: &[f64], shots: Shots, rng: &mut impl Rng) -> Result<Vec<Sample>> {
    let clean: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let total: f64 = clean.iter().sum();
    match shots {
        Shots::Infinite => Ok(clean
            .iter()
            .enumerate()
            .map(|(i, p)| Sample::new(i as f64, p / total, 0.0))
            .collect()),
        Shots::Finite(n) => {
            // multinomial via conditional binomials
            let mut left = n;
            let mut mass = 1.0;
            let mut out = Vec::with_capacity(clean.len());
            for (i, p) in clean.iter().enumerate() {
                let p = p / total;
                let k = if left == 0 || mass <= 0.0 {
                    0
                } else {
                    let c = (p / mass).clamp(0.0, 1.0);
                    Binomial::new(left, c)
                        .map_err(|e| Error::Distribution(e.to_string()))?
                        .sample(rng)
                };
                left -= k;
                mass -= p;
                out.push(Sample::new(i as f64, k as f64 / n as f64, frequency_sigma(k, n)));
            }
            Ok(out)
        }
    }
}

/// Simulates a record from the exact state; deterministic given `seed`.
/// `cutoff` overrides the per-mode Fock truncation.
pub fn simulate_record(
    spec: &StateSpec,
    protocol: &Protocol,
    shots: Shots,
    seed: u64,
    cutoff: Option<usize>,
) -> Result<MeasurementRecord> {
    let rho = make_state_with_cutoff(spec, cutoff)?;
    let mut meta = BTreeMap::new();
    meta.insert("source".to_string(), "simulated".to_string());
    meta.insert("state".to_string(), spec.describe());
    meta.insert("seed".to_string(), seed.to_string());
    meta.insert("shots".to_string(), shots.to_string());
    match protocol {
        Protocol::WignerCut { angle, grid } => {
            let modes = match rho.space() {
                SpaceSpec::Fock { modes, .. } => modes,
                _ => return Err(Error::InvalidParameter("wigner_cut needs a phase-space state".into())),
            };
            let scan = DisplacedParityScan::new(&rho, *angle)?;
            let mut samples = Vec::with_capacity(grid.len());
            for (i, &t) in grid.iter().enumerate() {
                let w = scan.at(t)?;
                let (v, s) = draw_parity(w, shots, &mut rng::stream(seed, i as u64))?;
                samples.push(Sample::new(t, v, s));
            }
            meta.insert("system".to_string(), "phase_space".to_string());
            meta.insert("modes".to_string(), modes.to_string());
            meta.insert("angle".to_string(), angle.to_string());
            if let Some(t0) = grid_spacing(grid) {
                meta.insert("theta0".to_string(), t0.to_string());
            }
            MeasurementRecord::series(RecordKind::WignerCut, samples, meta)
        }
        Protocol::ParityFringe {
            axis,
            measure,
            grid,
        } => {
            let particles = match rho.space() {
                SpaceSpec::Spin { particles } => particles,
                _ => return Err(Error::InvalidParameter("parity_fringe needs a spin state".into())),
            };
            let scan = SpinParityScan::new(&rho, *axis, *measure)?;
            let mut samples = Vec::with_capacity(grid.len());
            for (i, &t) in grid.iter().enumerate() {
                let w = scan.at(t)?;
                let (v, s) = draw_parity(w, shots, &mut rng::stream(seed, i as u64))?;
                samples.push(Sample::new(t, v, s));
            }
            meta.insert("system".to_string(), "spin".to_string());
            meta.insert("particles".to_string(), particles.to_string());
            if let Some(t0) = grid_spacing(grid) {
                meta.insert("theta0".to_string(), t0.to_string());
            }
            MeasurementRecord::series(RecordKind::ParityFringe, samples, meta)
        }
        Protocol::FockHistogramPair { angle, delta_theta } => {
            if *delta_theta == 0.0 || !delta_theta.is_finite() {
                return Err(Error::InvalidParameter("delta_theta must be finite and nonzero".into()));
            }
            let modes = match rho.space() {
                SpaceSpec::Fock { modes, .. } => modes,
                _ => return Err(Error::InvalidParameter("histograms need a phase-space state".into())),
            };
            let scan = DisplacedParityScan::new(&rho, *angle)?;
            let f = scan.populations(0.0)?;
            let g = scan.populations(*delta_theta)?;
            let p = draw_histogram(&f, shots, &mut rng::stream(seed, 0))?;
            let q = draw_histogram(&g, shots, &mut rng::stream(seed, 1))?;
            meta.insert("system".to_string(), "phase_space".to_string());
            meta.insert("modes".to_string(), modes.to_string());
            meta.insert("angle".to_string(), angle.to_string());
            meta.insert("delta_theta".to_string(), delta_theta.to_string());
            MeasurementRecord::histogram_pair(p, q, meta)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_space::C64;
    use crate::states::{CatSpec, ParityModel, WignerCatModel};

    fn cat(alpha: f64, damping: f64) -> StateSpec {
        StateSpec::Cat(CatSpec::new(C64::new(alpha, 0.0), 0.0, damping).unwrap())
    }

    #[test]
    fn grid_is_centred() {
        let g = uniform_grid(0.02, 81);
        assert_eq!(g.len(), 81);
        assert_eq!(g[40], 0.0);
        assert_eq!(g[0], -0.8);
        assert_eq!(grid_spacing(&g), Some(0.02));
    }

    #[test]
    fn infinite_shots_give_exact_cut() {
        let grid = uniform_grid(0.02, 21);
        let rec = simulate_record(
            &cat(4.0, 0.57),
            &Protocol::WignerCut { angle: 0.0, grid },
            Shots::Infinite,
            1,
            None,
        )
        .unwrap();
        let model = WignerCatModel::new(0.57, 64.0, 0.0).unwrap();
        for s in &rec.samples {
            assert_eq!(s.sigma, 0.0);
            assert!((s.value - model.parity(s.setting)).abs() < 1e-9);
        }
        assert_eq!(rec.meta_str("theta0"), Some("0.02"));
    }

    #[test]
    fn vacuum_fringe_is_flat() {
        let rec = simulate_record(
            &StateSpec::Fock { n: 0 },
            &Protocol::WignerCut {
                angle: 0.0,
                grid: vec![0.0],
            },
            Shots::Infinite,
            0,
            None,
        )
        .unwrap();
        assert!((rec.samples[0].value - 1.0).abs() < 1e-12);
        let spin = simulate_record(
            &StateSpec::SpinCoherent {
                particles: 4,
                axis: [0.0, 0.0, 1.0],
            },
            &Protocol::ParityFringe {
                axis: [0.0, 0.0, 1.0],
                measure: ParityAxis::Z,
                grid: uniform_grid(0.1, 5),
            },
            Shots::Infinite,
            0,
            None,
        )
        .unwrap();
        for s in &spin.samples {
            assert!((s.value - 1.0).abs() < 1e-12 && s.sigma == 0.0);
        }
    }

    #[test]
    fn deterministic_by_seed() {
        let p = Protocol::WignerCut {
            angle: 0.0,
            grid: uniform_grid(0.05, 11),
        };
        let a = simulate_record(&cat(2.0, 0.8), &p, Shots::Finite(500), 7, None).unwrap();
        let b = simulate_record(&cat(2.0, 0.8), &p, Shots::Finite(500), 7, None).unwrap();
        let c = simulate_record(&cat(2.0, 0.8), &p, Shots::Finite(500), 8, None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn histogram_sums_to_one() {
        let rec = simulate_record(
            &cat(2.0, 1.0),
            &Protocol::FockHistogramPair {
                angle: 0.0,
                delta_theta: 1e-3,
            },
            Shots::Finite(1000),
            3,
            None,
        )
        .unwrap();
        let sp: f64 = rec.values().iter().sum();
        let sq: f64 = rec.second.as_ref().unwrap().iter().map(|s| s.value).sum();
        assert!((sp - 1.0).abs() < 1e-12 && (sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_guard() {
        let r = simulate_record(
            &cat(20.0, 1.0),
            &Protocol::WignerCut {
                angle: 0.0,
                grid: vec![0.0],
            },
            Shots::Infinite,
            0,
            Some(40),
        );
        assert!(matches!(r, Err(Error::Truncation { .. })));
    }

    #[test]
    fn shots_parse() {
        assert_eq!("inf".parse::<Shots>().unwrap(), Shots::Infinite);
        assert_eq!("500".parse::<Shots>().unwrap(), Shots::Finite(500));
        assert!("0".parse::<Shots>().is_err());
    }
}
