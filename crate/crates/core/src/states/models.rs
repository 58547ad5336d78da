use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit on fitted amplitudes (slack above the physical 1).
pub const AMPLITUDE_MAX: f64 = 1.05;

/// A two-outcome (parity) fringe `W(θ) ∈ [−1, 1]` as a function of a
/// control setting θ, with a parameter covariance.
pub trait ParityModel {
    fn parity(&self, theta: f64) -> f64;

    /// `1 − W(θ)` evaluated without cancellation near `W = 1`.
    fn one_minus(&self, theta: f64) -> f64 {
        1.0 - self.parity(theta)
    }

    /// `1 + W(θ)` evaluated without cancellation near `W = −1`.
    fn one_plus(&self, theta: f64) -> f64 {
        1.0 + self.parity(theta)
    }

    /// Generator parameter per unit setting: the perturbation is
    /// `exp(−i X θ · generator_scale)`.
    fn generator_scale(&self) -> f64;

    /// Classical reference QFI used for the effective size.
    fn normalization(&self) -> f64;

    fn fringe_period(&self) -> f64;

    fn parameters(&self) -> Vec<f64>;

    fn parameter_names(&self) -> &'static [&'static str];

    fn covariance(&self) -> Vec<Vec<f64>>;

    /// Same model with the free parameters replaced (covariance kept).
    fn with_parameters(&self, params: &[f64]) -> Self
    where
        Self: Sized;
}

/// Wigner-function cut of a damped cat, `W(θ) = A e^{−2θ²} cos(2√S θ + φ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerCatModel {
    pub amplitude: f64,
    pub separation: f64,
    pub phase: f64,
    /// Covariance of (A, S, φ).
    pub covariance: [[f64; 3]; 3],
}

impl WignerCatModel {
    pub fn new(amplitude: f64, separation: f64, phase: f64) -> Result<Self> {
        Self::with_covariance(amplitude, separation, phase, [[0.0; 3]; 3])
    }

    pub fn with_covariance(
        amplitude: f64,
        separation: f64,
        phase: f64,
        covariance: [[f64; 3]; 3],
    ) -> Result<Self> {
        if !(0.0..=AMPLITUDE_MAX).contains(&amplitude) {
            return Err(Error::InvalidParameter(format!(
                "amplitude {amplitude} outside [0, {AMPLITUDE_MAX}]"
            )));
        }
        if !(separation > 0.0) || !separation.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "separation S = {separation} must be positive"
            )));
        }
        check_covariance(&covariance.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?;
        Ok(Self {
            amplitude,
            separation,
            phase,
            covariance,
        })
    }

    /// Fringe angular frequency `2√S`.
    pub fn frequency(&self) -> f64 {
        2.0 * self.separation.sqrt()
    }
}

impl ParityModel for WignerCatModel {
    fn parity(&self, theta: f64) -> f64 {
        wigner_cut_model(self, theta)
    }

    fn one_minus(&self, theta: f64) -> f64 {
        let env = (-2.0 * theta * theta).exp();
        let half = 0.5 * (self.frequency() * theta + self.phase);
        let a = self.amplitude;
        // 1 − A e cos x = (1 − A) + A[(1 − e) + 2e sin²(x/2)]
        let inner = -(-2.0 * theta * theta).exp_m1() + 2.0 * env * half.sin().powi(2);
        ((1.0 - a) + a * inner).max(0.0)
    }

    fn one_plus(&self, theta: f64) -> f64 {
        let env = (-2.0 * theta * theta).exp();
        let half = 0.5 * (self.frequency() * theta + self.phase);
        let a = self.amplitude;
        let inner = -(-2.0 * theta * theta).exp_m1() + 2.0 * env * half.cos().powi(2);
        ((1.0 - a) + a * inner).max(0.0)
    }

    fn generator_scale(&self) -> f64 {
        1.0
    }

    fn normalization(&self) -> f64 {
        1.0
    }

    fn fringe_period(&self) -> f64 {
        PI / self.separation.sqrt()
    }

    fn parameters(&self) -> Vec<f64> {
        vec![self.amplitude, self.separation, self.phase]
    }

    fn parameter_names(&self) -> &'static [&'static str] {
        &["A", "S", "phi"]
    }

    fn covariance(&self) -> Vec<Vec<f64>> {
        self.covariance.iter().map(|r| r.to_vec()).collect()
    }

    fn with_parameters(&self, p: &[f64]) -> Self {
        Self {
            amplitude: p[0],
            separation: p[1],
            phase: p[2],
            covariance: self.covariance,
        }
    }
}

/// `A e^{−2θ²} cos(2√S θ + φ)`.
pub fn wigner_cut_model(m: &WignerCatModel, theta: f64) -> f64 {
    m.amplitude * (-2.0 * theta * theta).exp() * (m.frequency() * theta + m.phase).cos()
}

/// Parity fringe of an N-particle GHZ-type state under a collective
/// rotation by angle θ: `A cos(Nθ + φ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeModel {
    pub amplitude: f64,
    pub particles: usize,
    pub phase: f64,
    /// Covariance of (A, φ); N is fixed.
    pub covariance: [[f64; 2]; 2],
}

impl FringeModel {
    pub fn new(amplitude: f64, particles: usize, phase: f64) -> Result<Self> {
        Self::with_covariance(amplitude, particles, phase, [[0.0; 2]; 2])
    }

    pub fn with_covariance(
        amplitude: f64,
        particles: usize,
        phase: f64,
        covariance: [[f64; 2]; 2],
    ) -> Result<Self> {
        if !(0.0..=AMPLITUDE_MAX).contains(&amplitude) {
            return Err(Error::InvalidParameter(format!(
                "amplitude {amplitude} outside [0, {AMPLITUDE_MAX}]"
            )));
        }
        if particles == 0 {
            return Err(Error::InvalidParameter("particle count must be ≥ 1".into()));
        }
        check_covariance(&covariance.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?;
        Ok(Self {
            amplitude,
            particles,
            phase,
            covariance,
        })
    }
}

impl ParityModel for FringeModel {
    fn parity(&self, theta: f64) -> f64 {
        fringe_model(self, theta)
    }

    fn one_minus(&self, theta: f64) -> f64 {
        let half = 0.5 * (self.particles as f64 * theta + self.phase);
        ((1.0 - self.amplitude) + 2.0 * self.amplitude * half.sin().powi(2)).max(0.0)
    }

    fn one_plus(&self, theta: f64) -> f64 {
        let half = 0.5 * (self.particles as f64 * theta + self.phase);
        ((1.0 - self.amplitude) + 2.0 * self.amplitude * half.cos().powi(2)).max(0.0)
    }

    /// A rotation by θ is `exp(−i (θ/2) X)` for `X = 2 n̂·J`.
    fn generator_scale(&self) -> f64 {
        0.5
    }

    fn normalization(&self) -> f64 {
        self.particles as f64
    }

    fn fringe_period(&self) -> f64 {
        2.0 * PI / self.particles as f64
    }

    fn parameters(&self) -> Vec<f64> {
        vec![self.amplitude, self.phase]
    }

    fn parameter_names(&self) -> &'static [&'static str] {
        &["A", "phi"]
    }

    fn covariance(&self) -> Vec<Vec<f64>> {
        self.covariance.iter().map(|r| r.to_vec()).collect()
    }

    fn with_parameters(&self, p: &[f64]) -> Self {
        Self {
            amplitude: p[0],
            particles: self.particles,
            phase: p[1],
            covariance: self.covariance,
        }
    }
}

/// `A cos(Nθ + φ)`.
pub fn fringe_model(m: &FringeModel, theta: f64) -> f64 {
    m.amplitude * (m.particles as f64 * theta + m.phase).cos()
}

/// Symmetric and PSD to 1e-10.
fn check_covariance(c: &[Vec<f64>]) -> Result<()> {
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            if !c[i][j].is_finite() || (c[i][j] - c[j][i]).abs() > 1e-10 {
                return Err(Error::InvalidParameter("covariance not symmetric".into()));
            }
        }
    }
    let eig = crate::state_space::eigen::real_symmetric_eigenvalues(c)?;
    if eig[0] < -1e-10 * eig[n - 1].abs().max(1.0) {
        return Err(Error::InvalidParameter(
            "covariance not positive semidefinite".into(),
        ));
    }
    Ok(())
}
