use clap::{Args, ValueEnum};
use num_complex::Complex64 as C64;

use qfisize::states::{CatSpec, StateSpec};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Coherent,
    Squeezed,
    Fock,
    Cat,
    TwoModeCat,
    Ghz,
    Dicke,
    SpinCoherent,
    Twisted,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub state: StateKind,
    /// Photon number (fock) or particle count (spin states)
    #[arg(long)]
    pub n: Option<usize>,
    /// Dicke excitation number
    #[arg(long)]
    pub k: Option<usize>,
    /// Coherent amplitude (real part)
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_im: f64,
    /// Second-mode amplitude of a two-mode cat
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Squeezing parameter
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub modes: usize,
    /// Coherence amplitude A of the branch superposition
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
    /// Relative phase of the branches
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phase: f64,
    /// One-axis twisting strength χt
    #[arg(long)]
    pub twist: Option<f64>,
    /// Spin-coherent polarization, as x,y,z
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub direction: Option<[f64; 3]>,
    /// Per-mode Fock cutoff
    #[arg(long)]
    pub cutoff: Option<usize>,
}

pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err(format!("expected three comma-separated numbers, got '{s}'")),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, state: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("--state {state} requires --{flag}")))
}

impl StateArgs {
    pub fn spec(&self) -> CliResult<StateSpec> {
        Ok(match self.state {
            StateKind::Coherent => StateSpec::Coherent {
                alpha: C64::new(need(self.alpha, "alpha", "coherent")?, self.alpha_im),
            },
            StateKind::Squeezed => StateSpec::Squeezed {
                r: need(self.r, "r", "squeezed")?,
                modes: self.modes,
            },
            StateKind::Fock => StateSpec::Fock {
                n: need(self.n, "n", "fock")?,
            },
            StateKind::Cat => StateSpec::Cat(CatSpec::new(
                C64::new(need(self.alpha, "alpha", "cat")?, self.alpha_im),
                self.phase,
                self.damping,
            )?),
            StateKind::TwoModeCat => StateSpec::TwoModeCat {
                alpha: C64::new(need(self.alpha, "alpha", "two-mode-cat")?, self.alpha_im),
                beta: C64::new(need(self.beta, "beta", "two-mode-cat")?, 0.0),
                damping: self.damping,
            },
            StateKind::Ghz => StateSpec::Ghz {
                particles: need(self.n, "n", "ghz")?,
                damping: self.damping,
                phase: self.phase,
            },
            StateKind::Dicke => StateSpec::Dicke {
                particles: need(self.n, "n", "dicke")?,
                excitations: need(self.k, "k", "dicke")?,
            },
            StateKind::SpinCoherent => StateSpec::SpinCoherent {
                particles: need(self.n, "n", "spin-coherent")?,
                axis: self.direction.unwrap_or([0.0, 0.0, 1.0]),
            },
            StateKind::Twisted => StateSpec::OneAxisTwisted {
                particles: need(self.n, "n", "twisted")?,
                twist: need(self.twist, "twist", "twisted")?,
            },
        })
    }
}
