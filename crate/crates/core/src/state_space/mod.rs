//! Finite-dimensional Hilbert spaces: truncated Fock space for one or two
//! bosonic modes and the symmetric (Dicke) subspace of N two-level systems.
//!
//! Quadrature convention used throughout the crate:
//! `X_ϑ = e^{iϑ} a + e^{-iϑ} a†`, so `x = X_0 = a + a†`,
//! `p = X_{-π/2} = i(a† − a)` and `[x, p] = 2i`. Coherent states have unit
//! quadrature variance and the vacuum has QFI 1 for every `X_ϑ`.

pub mod eigen;
pub mod matrix;
pub mod operators;
pub mod state;

use serde::Serialize;

use crate::error::{Error, Result};

pub use eigen::{eig_hermitian, EigenDecomposition};
pub use matrix::{ComplexMatrix, C64};
pub use operators::{GeneratorLabel, ObservableMatrix, Propagator};
pub use state::DensityMatrix;

/// Number of top Fock levels that must be (numerically) empty.
pub const TAIL_LEVELS: usize = 5;
/// Largest tolerated population in the top [`TAIL_LEVELS`] levels.
pub const TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// `modes` bosonic modes, each truncated to `cutoff` levels (0..cutoff-1).
    Fock { cutoff: usize, modes: usize },
    /// Symmetric subspace of `particles` qubits, basis |k⟩ = Dicke state
    /// with k excitations, k = 0..=N.
    Spin { particles: usize },
}

impl SpaceSpec {
    pub fn fock(cutoff: usize, modes: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidParameter(format!("Fock cutoff {cutoff} < 2")));
        }
        if !(1..=2).contains(&modes) {
            return Err(Error::InvalidParameter(format!(
                "mode count {modes} unsupported (1 or 2)"
            )));
        }
        Ok(SpaceSpec::Fock { cutoff, modes })
    }

    pub fn spin(particles: usize) -> Result<Self> {
        if particles == 0 {
            return Err(Error::InvalidParameter("particle count must be ≥ 1".into()));
        }
        Ok(SpaceSpec::Spin { particles })
    }

    pub fn dimension(&self) -> usize {
        match *self {
            SpaceSpec::Fock { cutoff, modes } => cutoff.pow(modes as u32),
            SpaceSpec::Spin { particles } => particles + 1,
        }
    }

    /// Classical-state normalization of the effective size: the mode count
    /// in phase space, the particle count for spins.
    pub fn normalization(&self) -> f64 {
        match *self {
            SpaceSpec::Fock { modes, .. } => modes as f64,
            SpaceSpec::Spin { particles } => particles as f64,
        }
    }

    pub fn is_fock(&self) -> bool {
        matches!(self, SpaceSpec::Fock { .. })
    }

    pub fn is_spin(&self) -> bool {
        matches!(self, SpaceSpec::Spin { .. })
    }

    pub(crate) fn fock_params(&self) -> Result<(usize, usize)> {
        match *self {
            SpaceSpec::Fock { cutoff, modes } => Ok((cutoff, modes)),
            _ => Err(Error::WrongSpace { expected: "Fock" }),
        }
    }

    pub(crate) fn spin_particles(&self) -> Result<usize> {
        match *self {
            SpaceSpec::Spin { particles } => Ok(particles),
            _ => Err(Error::WrongSpace { expected: "spin" }),
        }
    }
}

/// Largest cutoff chosen automatically; larger spaces must be requested
/// explicitly.
pub const MAX_DEFAULT_CUTOFF: usize = 300;

/// Default single-mode cutoff for a state of amplitude |α|:
/// `ceil(|α|² + 8|α| + 20)`, capped at [`MAX_DEFAULT_CUTOFF`].
pub fn default_cutoff(amplitude: f64) -> usize {
    let a = amplitude.abs();
    ((a * a + 8.0 * a + 20.0).ceil() as usize).min(MAX_DEFAULT_CUTOFF)
}
