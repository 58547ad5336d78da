//! Classical and benchmark states, the analytic fringe models of cat and GHZ
//! states, and exact parity evaluators used to cross-check the models.

mod models;
mod parity;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state_space::matrix::{kron_vec, ComplexMatrix, C64, ONE, ZERO};
use crate::state_space::{default_cutoff, DensityMatrix, SpaceSpec, TAIL_LEVELS};

pub use models::{fringe_model, wigner_cut_model, FringeModel, ParityModel, WignerCatModel, AMPLITUDE_MAX};
pub use parity::{exact_displaced_parity, exact_spin_parity, ParityAxis, DisplacedParityScan, SpinParityScan};

/// Largest Hilbert-space dimension accepted for two-mode states.
pub const MAX_TWO_MODE_DIM: usize = 4096;

/// Cat state `|α⟩ + e^{iφ}|−α⟩` with coherence damped by `damping` (A).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub alpha: C64,
    pub phase: f64,
    pub damping: f64,
}

impl CatSpec {
    pub fn new(alpha: C64, phase: f64, damping: f64) -> Result<Self> {
        let spec = Self {
            alpha,
            phase,
            damping,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `S = 4|α|²`.
    pub fn separation(&self) -> f64 {
        4.0 * self.alpha.norm_sqr()
    }

    fn validate(&self) -> Result<()> {
        check_damping(self.damping)?;
        if !self.alpha.re.is_finite() || !self.alpha.im.is_finite() || !self.phase.is_finite() {
            return Err(Error::InvalidParameter("non-finite cat parameter".into()));
        }
        Ok(())
    }
}

fn check_damping(a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!(
            "coherence amplitude {a} outside [0, 1]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum StateSpec {
    Coherent { alpha: C64 },
    /// Squeezed vacuum with the `x` quadrature anti-squeezed (`Var x = e^{2r}`);
    /// for two modes, the two-mode squeezed vacuum (`Var(x₁+x₂) = 2e^{2r}`).
    Squeezed { r: f64, modes: usize },
    Fock { n: usize },
    Cat(CatSpec),
    /// `|α,β⟩ + |−α,−β⟩` with damped coherence.
    TwoModeCat { alpha: C64, beta: C64, damping: f64 },
    /// `|0…0⟩ + e^{iφ}|1…1⟩` with damped coherence.
    Ghz { particles: usize, damping: f64, phase: f64 },
    Dicke { particles: usize, excitations: usize },
    SpinCoherent { particles: usize, axis: [f64; 3] },
    /// `e^{−iχt J_z²}` applied to the x-polarized spin-coherent state.
    OneAxisTwisted { particles: usize, twist: f64 },
}

impl StateSpec {
    pub fn describe(&self) -> String {
        match self {
            StateSpec::Coherent { alpha } => format!("coherent(α={alpha})"),
            StateSpec::Squeezed { r, modes } => format!("squeezed(r={r}, modes={modes})"),
            StateSpec::Fock { n } => format!("fock(n={n})"),
            StateSpec::Cat(c) => format!(
                "cat(α={}, φ={}, A={})",
                c.alpha, c.phase, c.damping
            ),
            StateSpec::TwoModeCat {
                alpha,
                beta,
                damping,
            } => format!("two_mode_cat(α={alpha}, β={beta}, A={damping})"),
            StateSpec::Ghz {
                particles,
                damping,
                phase,
            } => format!("ghz(N={particles}, A={damping}, φ={phase})"),
            StateSpec::Dicke {
                particles,
                excitations,
            } => format!("dicke(N={particles}, k={excitations})"),
            StateSpec::SpinCoherent { particles, axis } => {
                format!("spin_coherent(N={particles}, axis={axis:?})")
            }
            StateSpec::OneAxisTwisted { particles, twist } => {
                format!("one_axis_twisted(N={particles}, χt={twist})")
            }
        }
    }

    pub fn is_spin(&self) -> bool {
        matches!(
            self,
            StateSpec::Ghz { .. }
                | StateSpec::Dicke { .. }
                | StateSpec::SpinCoherent { .. }
                | StateSpec::OneAxisTwisted { .. }
        )
    }
}

/// Builds the state with the default truncation rule.
pub fn make_state(spec: &StateSpec) -> Result<DensityMatrix> {
    make_state_with_cutoff(spec, None)
}

/// Builds the state, optionally overriding the per-mode Fock cutoff. The
/// truncation check runs either way.
pub fn make_state_with_cutoff(spec: &StateSpec, cutoff: Option<usize>) -> Result<DensityMatrix> {
    let rho = match *spec {
        StateSpec::Coherent { alpha } => {
            let d = cutoff.unwrap_or_else(|| default_cutoff(alpha.norm()));
            let space = SpaceSpec::fock(d, 1)?;
            DensityMatrix::pure(space, coherent_vector(alpha, d))?
        }
        StateSpec::Squeezed { r, modes } => squeezed(r, modes, cutoff)?,
        StateSpec::Fock { n } => {
            let d = cutoff.unwrap_or_else(|| default_cutoff((n as f64).sqrt()).max(n + 2 * TAIL_LEVELS));
            let space = SpaceSpec::fock(d, 1)?;
            if n >= d {
                return Err(Error::Truncation { cutoff: d, tail: 1.0 });
            }
            let mut v = vec![ZERO; d];
            v[n] = ONE;
            DensityMatrix::pure(space, v)?
        }
        StateSpec::Cat(c) => {
            c.validate()?;
            let d = cutoff.unwrap_or_else(|| default_cutoff(c.alpha.norm()));
            let space = SpaceSpec::fock(d, 1)?;
            let plus = coherent_vector(c.alpha, d);
            let minus = coherent_vector(-c.alpha, d);
            damped_pair(space, plus, minus, c.damping, c.phase)?
        }
        StateSpec::TwoModeCat {
            alpha,
            beta,
            damping,
        } => {
            check_damping(damping)?;
            let d = match cutoff {
                Some(d) => d,
                None => two_mode_cutoff(alpha.norm().max(beta.norm())),
            };
            let space = SpaceSpec::fock(d, 2)?;
            if space.dimension() > MAX_TWO_MODE_DIM {
                return Err(Error::InvalidParameter(format!(
                    "two-mode dimension {} exceeds {MAX_TWO_MODE_DIM}",
                    space.dimension()
                )));
            }
            let plus = kron_vec(&coherent_vector(alpha, d), &coherent_vector(beta, d));
            let minus = kron_vec(&coherent_vector(-alpha, d), &coherent_vector(-beta, d));
            damped_pair(space, plus, minus, damping, 0.0)?
        }
        StateSpec::Ghz {
            particles,
            damping,
            phase,
        } => {
            check_damping(damping)?;
            let space = SpaceSpec::spin(particles)?;
            let d = particles + 1;
            let mut up = vec![ZERO; d];
            up[0] = ONE;
            let mut down = vec![ZERO; d];
            down[particles] = ONE;
            damped_pair(space, up, down, damping, phase)?
        }
        StateSpec::Dicke {
            particles,
            excitations,
        } => {
            let space = SpaceSpec::spin(particles)?;
            if excitations > particles {
                return Err(Error::InvalidParameter(format!(
                    "{excitations} excitations exceed N = {particles}"
                )));
            }
            let mut v = vec![ZERO; particles + 1];
            v[excitations] = ONE;
            DensityMatrix::pure(space, v)?
        }
        StateSpec::SpinCoherent { particles, axis } => {
            let space = SpaceSpec::spin(particles)?;
            DensityMatrix::pure(space, spin_coherent_vector(particles, axis)?)?
        }
        StateSpec::OneAxisTwisted { particles, twist } => {
            let space = SpaceSpec::spin(particles)?;
            let mut v = spin_coherent_vector(particles, [1.0, 0.0, 0.0])?;
            let half = particles as f64 / 2.0;
            for (k, z) in v.iter_mut().enumerate() {
                let m = half - k as f64;
                *z *= C64::from_polar(1.0, -twist * m * m);
            }
            DensityMatrix::pure(space, v)?
        }
    };
    rho.check_truncation()?;
    Ok(rho)
}

/// `(|u⟩⟨u| + |w⟩⟨w| + A e^{iφ}|w⟩⟨u| + A e^{−iφ}|u⟩⟨w|)`, normalized with the
/// exact overlap ⟨u|w⟩.
fn damped_pair(space: SpaceSpec, u: Vec<C64>, w: Vec<C64>, a: f64, phi: f64) -> Result<DensityMatrix> {
    let coh = C64::from_polar(a, phi);
    let coeffs = ComplexMatrix::from_row_major(vec![ONE, coh.conj(), coh, ONE])?;
    DensityMatrix::mixture(space, vec![u, w], coeffs)
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!`, n < d.
pub fn coherent_vector(alpha: C64, d: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(d);
    let mut amp = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..d {
        if n > 0 {
            amp = amp * alpha / (n as f64).sqrt();
        }
        v.push(amp);
    }
    v
}

/// Smallest per-mode cutoff whose top levels hold < 1e-12 of a Poisson
/// distribution with mean |α|².
fn two_mode_cutoff(amplitude: f64) -> usize {
    let mean = amplitude * amplitude;
    let mut p = (-mean).exp();
    let mut cdf = p;
    let mut n = 0usize;
    // first level whose upper tail drops below 1e-12
    while 1.0 - cdf > 1e-12 && n < 10_000 {
        n += 1;
        p *= mean / n as f64;
        cdf += p;
        if p < 1e-14 && (n as f64) > mean {
            break;
        }
    }
    (n + 1 + TAIL_LEVELS).max(8)
}

fn squeezed(r: f64, modes: usize, cutoff: Option<usize>) -> Result<DensityMatrix> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidParameter(format!("squeezing r = {r} must be ≥ 0")));
    }
    let t = r.tanh();
    match modes {
        1 => {
            // c_{2n} = (tanh r)^n √((2n)!) / (2ⁿ n!) / √cosh r
            let mut coeffs = vec![1.0 / r.cosh().sqrt()];
            while coeffs.len() < 1000 {
                let n = coeffs.len() - 1;
                let next = coeffs[n] * t * ((2 * n + 1) as f64 / (2 * n + 2) as f64).sqrt();
                if next * next < 1e-13 {
                    break;
                }
                coeffs.push(next);
            }
            let d = cutoff.unwrap_or(2 * coeffs.len() + 2 * TAIL_LEVELS);
            let space = SpaceSpec::fock(d, 1)?;
            let mut v = vec![ZERO; d];
            for (n, c) in coeffs.iter().enumerate() {
                if 2 * n < d {
                    v[2 * n] = C64::new(*c, 0.0);
                }
            }
            DensityMatrix::pure(space, v)
        }
        2 => {
            let mut coeffs = vec![1.0 / r.cosh()];
            while coeffs.len() < 1000 {
                let next = coeffs[coeffs.len() - 1] * t;
                if next * next < 1e-13 {
                    break;
                }
                coeffs.push(next);
            }
            let d = cutoff.unwrap_or(coeffs.len() + 2 * TAIL_LEVELS);
            let space = SpaceSpec::fock(d, 2)?;
            if space.dimension() > MAX_TWO_MODE_DIM {
                return Err(Error::InvalidParameter(format!(
                    "two-mode dimension {} exceeds {MAX_TWO_MODE_DIM}",
                    space.dimension()
                )));
            }
            let mut v = vec![ZERO; d * d];
            for (n, c) in coeffs.iter().enumerate().take(d) {
                v[n * d + n] = C64::new(*c, 0.0);
            }
            DensityMatrix::pure(space, v)
        }
        _ => Err(Error::InvalidParameter(format!(
            "squeezing supports 1 or 2 modes, got {modes}"
        ))),
    }
}

/// Spin-coherent state along `axis` in the Dicke basis:
/// `c_k = √C(N,k) cos(ϑ/2)^{N−k} (sin(ϑ/2) e^{iφ})^k`.
pub fn spin_coherent_vector(n: usize, axis: [f64; 3]) -> Result<Vec<C64>> {
    let norm = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "spin axis has norm {norm}, expected 1"
        )));
    }
    let polar = axis[2].clamp(-1.0, 1.0).acos();
    let azimuth = axis[1].atan2(axis[0]);
    let (c, s) = ((polar / 2.0).cos(), (polar / 2.0).sin());
    let mut binom = 1.0f64;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        let mag = binom.sqrt() * c.powi((n - k) as i32) * s.powi(k as i32);
        out.push(C64::from_polar(mag, azimuth * k as f64));
    }
    Ok(out)
}

/// Closed-form effective size of a benchmark state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticNeff {
    pub value: f64,
    /// The formula is approximate (cat states).
    pub approximate: bool,
    pub source: &'static str,
}

/// Closed-form effective size.
///
/// For Dicke states this is the commonly quoted `2k(N−k)/(N−1) + 1`, which differs
/// from the collective-generator optimum `2k(N−k)/N + 1`
/// ([`dicke_collective_neff`]). Both are kept so the discrepancy stays
/// visible.
pub fn analytic_neff(spec: &StateSpec) -> Result<AnalyticNeff> {
    let formula = |value, approximate| {
        Ok(AnalyticNeff {
            value,
            approximate,
            source: "closed form",
        })
    };
    match *spec {
        StateSpec::Coherent { .. } | StateSpec::SpinCoherent { .. } => formula(1.0, false),
        StateSpec::Squeezed { r, .. } => formula((2.0 * r).exp(), false),
        StateSpec::Fock { n } => formula(2.0 * n as f64 + 1.0, false),
        StateSpec::Cat(c) if c.damping == 1.0 => formula(c.separation() + 1.0, true),
        StateSpec::Ghz {
            particles,
            damping: 1.0,
            ..
        } => formula(particles as f64, false),
        StateSpec::Dicke {
            particles,
            excitations,
        } if particles >= 2 => {
            let (n, k) = (particles as f64, excitations as f64);
            formula(2.0 * k * (n - k) / (n - 1.0) + 1.0, false)
        }
        _ => Err(Error::NoFormula(spec.describe())),
    }
}

/// `2k(N−k)/N + 1`: Dicke effective size for collective generators.
pub fn dicke_collective_neff(particles: usize, excitations: usize) -> f64 {
    let (n, k) = (particles as f64, excitations as f64);
    2.0 * k * (n - k) / n + 1.0
}
