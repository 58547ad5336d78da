use serde::{Deserialize, Serialize};

use super::{BoundMethod, BoundResult, Interval, IntervalKind, Provenance};
use crate::datasets::{MeasurementRecord, RecordKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StaticSystem {
    PhotonicModes { modes: usize },
    Spin { particles: usize },
}

impl StaticSystem {
    pub fn normalization(&self) -> f64 {
        match *self {
            StaticSystem::PhotonicModes { modes } => modes as f64,
            StaticSystem::Spin { particles } => particles as f64,
        }
    }

    fn default_reference(&self) -> DecibelReference {
        match self {
            StaticSystem::PhotonicModes { .. } => DecibelReference::Vacuum,
            StaticSystem::Spin { .. } => DecibelReference::CoherentSpinState,
        }
    }
}

/// Noise reference the decibel figure is quoted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecibelReference {
    /// Vacuum quadrature noise (`Var = 1`, `⟨Z⟩² = 4`).
    Vacuum,
    /// Coherent spin state; the figure is the Wineland parameter `1/ξ²`.
    CoherentSpinState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecibelConvention {
    pub reference: DecibelReference,
    /// Positive decibels mean noise below the reference.
    pub positive_is_squeezed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum StaticInput {
    /// Measured `Var Y` and `⟨Z⟩` with `Z = i[X, Y]`, with standard errors.
    Moments {
        variance: f64,
        variance_se: f64,
        z_mean: f64,
        z_se: f64,
    },
    /// Squeezing in decibels with optional lower/upper errors in dB.
    Decibels {
        db: f64,
        minus: f64,
        plus: f64,
        convention: Option<DecibelConvention>,
    },
    /// Inverse squeezing parameter `1/ξ²` quoted directly.
    InverseSqueezing { value: f64, minus: f64, plus: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceRecord {
    pub input: StaticInput,
    pub system: StaticSystem,
}

impl VarianceRecord {
    pub fn moments(system: StaticSystem, variance: f64, variance_se: f64, z_mean: f64, z_se: f64) -> Self {
        Self {
            input: StaticInput::Moments {
                variance,
                variance_se,
                z_mean,
                z_se,
            },
            system,
        }
    }

    pub fn decibels(system: StaticSystem, db: f64) -> Self {
        Self {
            input: StaticInput::Decibels {
                db,
                minus: 0.0,
                plus: 0.0,
                convention: None,
            },
            system,
        }
    }

    /// Reads a `variance_record` file: meta `system` (`photonic` with
    /// `modes`, or `spin` with `particles`) and exactly one of
    /// `variance`+`z`, `squeezing_db`, `inverse_squeezing`.
    pub fn from_record(rec: &MeasurementRecord) -> Result<Self> {
        if rec.kind != RecordKind::VarianceRecord {
            return Err(Error::Validation(format!("expected a variance_record, got {}", rec.kind)));
        }
        let system = match rec.meta_str("system") {
            Some("photonic") | Some("phase_space") => StaticSystem::PhotonicModes {
                modes: rec.meta_usize("modes")?.unwrap_or(1),
            },
            Some("spin") => StaticSystem::Spin {
                particles: rec
                    .meta_usize("particles")?
                    .ok_or_else(|| Error::Validation("spin record requires 'particles'".into()))?,
            },
            other => {
                return Err(Error::Validation(format!(
                    "unknown system {other:?} (expected photonic or spin)"
                )))
            }
        };
        let num = |k: &str| rec.meta_f64(k);
        let modes = [
            num("variance")?.is_some() || num("z")?.is_some(),
            num("squeezing_db")?.is_some(),
            num("inverse_squeezing")?.is_some(),
        ];
        if modes.iter().filter(|m| **m).count() != 1 {
            return Err(Error::Validation(
                "variance_record needs exactly one of (variance, z), squeezing_db, inverse_squeezing".into(),
            ));
        }
        let input = if modes[0] {
            let need = |k: &str| -> Result<f64> {
                num(k)?.ok_or_else(|| Error::Validation(format!("variance_record missing '{k}'")))
            };
            StaticInput::Moments {
                variance: need("variance")?,
                variance_se: num("variance_se")?.unwrap_or(0.0),
                z_mean: need("z")?,
                z_se: num("z_se")?.unwrap_or(0.0),
            }
        } else if modes[1] {
            let se = num("db_se")?.unwrap_or(0.0);
            StaticInput::Decibels {
                db: num("squeezing_db")?.unwrap_or(0.0),
                minus: num("db_minus")?.unwrap_or(se),
                plus: num("db_plus")?.unwrap_or(se),
                convention: None,
            }
        } else {
            let se = num("se")?.unwrap_or(0.0);
            StaticInput::InverseSqueezing {
                value: num("inverse_squeezing")?.unwrap_or(0.0),
                minus: num("minus")?.unwrap_or(se),
                plus: num("plus")?.unwrap_or(se),
            }
        };
        Ok(Self { input, system })
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {v} must be finite and ≥ 0")));
    }
    Ok(())
}

/// Uncertainty-relation bound `I(X) ≥ ⟨Z⟩² / (4 Var Y)`.
pub fn static_bound(rec: &VarianceRecord) -> Result<BoundResult> {
    let norm = rec.system.normalization();
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter("system size must be ≥ 1".into()));
    }
    let prov = Provenance::new("static_bound").input("system", format!("{:?}", rec.system));
    match rec.input {
        StaticInput::Moments {
            variance,
            variance_se,
            z_mean,
            z_se,
        } => {
            if !(variance > 0.0) || !variance.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "variance {variance} must be positive"
                )));
            }
            if !z_mean.is_finite() {
                return Err(Error::InvalidParameter("⟨Z⟩ must be finite".into()));
            }
            nonneg("variance_se", variance_se)?;
            nonneg("z_se", z_se)?;
            let b = z_mean * z_mean / (4.0 * variance);
            let d_v = -b / variance;
            let d_z = z_mean / (2.0 * variance);
            let sd = ((d_v * variance_se).powi(2) + (d_z * z_se).powi(2)).sqrt();
            let interval = if sd == 0.0 {
                Interval::exact(b)
            } else {
                Interval::new((b - sd).max(0.0), b + sd, IntervalKind::DeltaMethod)
            };
            let prov = prov
                .input("variance", variance)
                .input("variance_se", variance_se)
                .input("z_mean", z_mean)
                .input("z_se", z_se);
            Ok(BoundResult::new(BoundMethod::Static, b, norm, Some(interval), prov))
        }
        StaticInput::Decibels {
            db,
            minus,
            plus,
            convention,
        } => {
            if !db.is_finite() {
                return Err(Error::InvalidParameter("decibel value must be finite".into()));
            }
            nonneg("db minus", minus)?;
            nonneg("db plus", plus)?;
            let conv = convention.unwrap_or(DecibelConvention {
                reference: rec.system.default_reference(),
                positive_is_squeezed: true,
            });
            if conv.reference != rec.system.default_reference() {
                return Err(Error::InvalidParameter(format!(
                    "{:?} reference does not apply to {:?}",
                    conv.reference, rec.system
                )));
            }
            let sign = if conv.positive_is_squeezed { 1.0 } else { -1.0 };
            let factor = |d: f64| 10f64.powf(sign * d / 10.0);
            let neff = factor(db);
            let (lo, hi) = (factor(db - sign * minus), factor(db + sign * plus));
            let interval = if minus == 0.0 && plus == 0.0 {
                Interval::exact(neff * norm)
            } else {
                Interval::new(lo.min(hi) * norm, lo.max(hi) * norm, IntervalKind::Mapped)
            };
            let prov = prov
                .input("squeezing_db", db)
                .input("db_minus", minus)
                .input("db_plus", plus)
                .input("reference", format!("{:?}", conv.reference))
                .input("positive_is_squeezed", conv.positive_is_squeezed);
            Ok(BoundResult::new(BoundMethod::Static, neff * norm, norm, Some(interval), prov))
        }
        StaticInput::InverseSqueezing { value, minus, plus } => {
            nonneg("inverse squeezing", value)?;
            nonneg("minus", minus)?;
            nonneg("plus", plus)?;
            let interval = if minus == 0.0 && plus == 0.0 {
                Interval::exact(value * norm)
            } else {
                Interval::new((value - minus).max(0.0) * norm, (value + plus) * norm, IntervalKind::Mapped)
            };
            let prov = prov
                .input("inverse_squeezing", value)
                .input("minus", minus)
                .input("plus", plus);
            Ok(BoundResult::new(BoundMethod::Static, value * norm, norm, Some(interval), prov))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_MODE: StaticSystem = StaticSystem::PhotonicModes { modes: 1 };

    #[test]
    fn vacuum_saturates() {
        let r = static_bound(&VarianceRecord::moments(ONE_MODE, 1.0, 0.0, -2.0, 0.0)).unwrap();
        assert_eq!(r.qfi_lower, 1.0);
        assert_eq!(r.neff_lower, 1.0);
        assert!(r.significant);
    }

    #[test]
    fn decibels() {
        let r = static_bound(&VarianceRecord::decibels(ONE_MODE, 15.0)).unwrap();
        assert!((r.neff_lower - 31.622776601683793).abs() < 1e-12);
        let r = static_bound(&VarianceRecord::decibels(ONE_MODE, 10.0)).unwrap();
        assert!((r.neff_lower - 10.0).abs() < 1e-12);
        let anti = VarianceRecord {
            input: StaticInput::Decibels {
                db: -10.0,
                minus: 0.0,
                plus: 0.0,
                convention: Some(DecibelConvention {
                    reference: DecibelReference::Vacuum,
                    positive_is_squeezed: false,
                }),
            },
            system: ONE_MODE,
        };
        assert!((static_bound(&anti).unwrap().neff_lower - 10.0).abs() < 1e-12);
    }

    #[test]
    fn spin_inverse_squeezing() {
        let rec = VarianceRecord {
            input: StaticInput::InverseSqueezing {
                value: 70.8,
                minus: 4.7,
                plus: 5.1,
            },
            system: StaticSystem::Spin { particles: 500_000 },
        };
        let r = static_bound(&rec).unwrap();
        assert!((r.neff_lower - 70.8).abs() < 1e-12);
        let i = r.neff_interval().unwrap();
        assert!((i.low - 66.1).abs() < 1e-9 && (i.high - 75.9).abs() < 1e-9);
    }

    #[test]
    fn delta_method() {
        let r = static_bound(&VarianceRecord::moments(ONE_MODE, 0.5, 0.01, -2.0, 0.02)).unwrap();
        assert_eq!(r.qfi_lower, 2.0);
        // ∂b/∂V = −4, ∂b/∂Z = −2
        let sd = ((4.0f64 * 0.01).powi(2) + (2.0f64 * 0.02).powi(2)).sqrt();
        let i = r.interval.unwrap();
        assert!((i.high - 2.0 - sd).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(static_bound(&VarianceRecord::moments(ONE_MODE, 0.0, 0.0, -2.0, 0.0)).is_err());
        assert!(static_bound(&VarianceRecord::moments(ONE_MODE, -1.0, 0.0, -2.0, 0.0)).is_err());
        let wrong_ref = VarianceRecord {
            input: StaticInput::Decibels {
                db: 3.0,
                minus: 0.0,
                plus: 0.0,
                convention: Some(DecibelConvention {
                    reference: DecibelReference::CoherentSpinState,
                    positive_is_squeezed: true,
                }),
            },
            system: ONE_MODE,
        };
        assert!(static_bound(&wrong_ref).is_err());
    }
}
