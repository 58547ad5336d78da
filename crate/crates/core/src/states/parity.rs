//! Exact parity expectations of displaced / rotated states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state_space::operators::{
    collective_quadrature, fock_parity_diagonal, spin_axis, spin_parity_x, spin_parity_y,
    spin_parity_z,
};
use crate::state_space::{ComplexMatrix, DensityMatrix, Propagator, SpaceSpec};

/// `Tr[Π U ρ U†]` with `U = exp(−iθ X_ϑ)` (for two modes, `X = Σ_i X^{(i)}_ϑ`).
pub fn exact_displaced_parity(rho: &DensityMatrix, angle: f64, theta: f64) -> Result<f64> {
    DisplacedParityScan::new(rho, angle)?.at(theta)
}

/// Repeated displaced-parity evaluation with one cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct DisplacedParityScan {
    rho: DensityMatrix,
    propagator: Propagator,
    parity: Vec<f64>,
}

impl DisplacedParityScan {
    pub fn new(rho: &DensityMatrix, angle: f64) -> Result<Self> {
        let (cutoff, modes) = match rho.space() {
            SpaceSpec::Fock { cutoff, modes } => (cutoff, modes),
            _ => return Err(Error::WrongSpace { expected: "Fock" }),
        };
        let x = collective_quadrature(rho.space(), &vec![angle; modes])?;
        Ok(Self {
            rho: rho.clone(),
            propagator: Propagator::new(&x)?,
            parity: fock_parity_diagonal(cutoff, modes),
        })
    }

    /// `U ρ U†`, checked for truncation.
    pub fn evolved(&self, theta: f64) -> Result<DensityMatrix> {
        let moved = self.rho.evolved(&self.propagator, theta);
        moved.check_truncation()?;
        Ok(moved)
    }

    /// Fock populations of the displaced state.
    pub fn populations(&self, theta: f64) -> Result<Vec<f64>> {
        Ok(self.evolved(theta)?.populations())
    }

    pub fn at(&self, theta: f64) -> Result<f64> {
        let pops = self.populations(theta)?;
        Ok(pops.iter().zip(&self.parity).map(|(p, s)| p * s).sum())
    }
}

/// Axis of the product parity `⊗ m̂·σ` read out after the rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityAxis {
    X,
    Y,
    Z,
}

impl ParityAxis {
    fn operator(self, space: SpaceSpec) -> Result<ComplexMatrix> {
        match self {
            ParityAxis::X => spin_parity_x(space),
            ParityAxis::Y => spin_parity_y(space),
            ParityAxis::Z => spin_parity_z(space),
        }
    }
}

/// `Tr[Π_m R ρ R†]` for a collective rotation `R = exp(−iθ n̂·J)`.
pub fn exact_spin_parity(
    rho: &DensityMatrix,
    axis: [f64; 3],
    measure: ParityAxis,
    theta: f64,
) -> Result<f64> {
    SpinParityScan::new(rho, axis, measure)?.at(theta)
}

#[derive(Debug, Clone)]
pub struct SpinParityScan {
    rho: DensityMatrix,
    propagator: Propagator,
    parity: ComplexMatrix,
}

impl SpinParityScan {
    pub fn new(rho: &DensityMatrix, axis: [f64; 3], measure: ParityAxis) -> Result<Self> {
        let space = rho.space();
        let x = spin_axis(space, axis)?;
        Ok(Self {
            rho: rho.clone(),
            propagator: Propagator::new(&x)?,
            parity: measure.operator(space)?,
        })
    }

    /// Rotated state; the generator `2 n̂·J` runs for θ/2.
    pub fn evolved(&self, theta: f64) -> DensityMatrix {
        self.rho.evolved(&self.propagator, theta / 2.0)
    }

    pub fn populations(&self, theta: f64) -> Vec<f64> {
        self.evolved(theta).populations()
    }

    pub fn at(&self, theta: f64) -> Result<f64> {
        Ok(self.evolved(theta).expectation(&self.parity).re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_state, CatSpec, FringeModel, ParityModel, StateSpec, WignerCatModel};
    use num_complex::Complex64 as C64;

    #[test]
    fn vacuum_and_single_photon() {
        let vac = make_state(&StateSpec::Fock { n: 0 }).unwrap();
        assert!((exact_displaced_parity(&vac, 0.3, 0.0).unwrap() - 1.0).abs() < 1e-14);
        let one = make_state(&StateSpec::Fock { n: 1 }).unwrap();
        assert!((exact_displaced_parity(&one, 0.0, 0.0).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn ideal_cat_matches_cut_model() {
        let a = 2.0f64;
        let cat = make_state(&StateSpec::Cat(CatSpec::new(C64::new(a, 0.0), 0.0, 1.0).unwrap())).unwrap();
        // Closed form with branch overlap o = e^{−2α²}:
        // W = e^{−2θ²} (cos 4αθ + o) / (1 + o)
        let o = (-2.0 * a * a).exp();
        let closed = |t: f64| (-2.0 * t * t).exp() * ((4.0 * a * t).cos() + o) / (1.0 + o);
        let exact = exact_displaced_parity(&cat, 0.0, 0.1).unwrap();
        assert!((exact - closed(0.1)).abs() < 1e-9);
        let eq7 = (-0.02f64).exp() * 0.8f64.cos();
        assert!((exact - eq7).abs() <= 2.0 * o);

        let model = WignerCatModel::new(1.0, 16.0, 0.0).unwrap();
        let scan = DisplacedParityScan::new(&cat, 0.0).unwrap();
        for i in 0..=40 {
            let t = -0.75 + 0.0375 * i as f64;
            let w = scan.at(t).unwrap();
            assert!((w - closed(t)).abs() < 1e-9);
            assert!((w - model.parity(t)).abs() <= 2.0 * o);
        }

        // larger amplitude: overlap negligible, the cut model holds to 1e-6
        let big = make_state(&StateSpec::Cat(CatSpec::new(C64::new(3.0, 0.0), 0.0, 1.0).unwrap())).unwrap();
        let model = WignerCatModel::new(1.0, 36.0, 0.0).unwrap();
        let scan = DisplacedParityScan::new(&big, 0.0).unwrap();
        for i in 0..=20 {
            let t = (-3.0 + 0.3 * i as f64) / 6.0;
            assert!((scan.at(t).unwrap() - model.parity(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn damped_cat_phase_convention() {
        // φ enters as cos(2√S θ + φ)
        let a = 2.5;
        let spec = CatSpec::new(C64::new(a, 0.0), 0.7, 0.6).unwrap();
        let cat = make_state(&StateSpec::Cat(spec)).unwrap();
        let model = WignerCatModel::new(0.6, 4.0 * a * a, 0.7).unwrap();
        let scan = DisplacedParityScan::new(&cat, 0.0).unwrap();
        let s = 4.0 * a * a;
        let tol = 2.0 * (-2.0 * a * a).exp();
        for i in 0..=20 {
            let t = (-1.0 + 0.1 * i as f64) / s.sqrt();
            assert!((scan.at(t).unwrap() - model.parity(t)).abs() <= tol);
        }
    }

    #[test]
    fn ghz_parity_fringe() {
        let ghz = make_state(&StateSpec::Ghz {
            particles: 8,
            damping: 1.0,
            phase: 0.0,
        })
        .unwrap();
        let v = exact_spin_parity(&ghz, [0.0, 0.0, 1.0], ParityAxis::X, 0.05).unwrap();
        assert!((v - 0.4f64.cos()).abs() < 1e-9);

        let damped = make_state(&StateSpec::Ghz {
            particles: 5,
            damping: 0.63,
            phase: -0.4,
        })
        .unwrap();
        let model = FringeModel::new(0.63, 5, -0.4).unwrap();
        let scan = SpinParityScan::new(&damped, [0.0, 0.0, 1.0], ParityAxis::X).unwrap();
        for i in 0..30 {
            let t = -1.5 + 0.1 * i as f64;
            assert!((scan.at(t).unwrap() - model.parity(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn wrong_space() {
        let ghz = make_state(&StateSpec::Ghz {
            particles: 2,
            damping: 1.0,
            phase: 0.0,
        })
        .unwrap();
        assert!(DisplacedParityScan::new(&ghz, 0.0).is_err());
    }
}
