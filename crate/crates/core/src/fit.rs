//! Weighted least-squares fits of parity records to the damped-cat cut
//! `A e^{−2θ²} cos(2√S θ + φ)` or the spin fringe `A cos(Nθ + φ)`.
//!
//! The cut is fitted internally in `(A, √S, φ)`; the reported covariance
//! is transformed back to `(A, S, φ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::datasets::{MeasurementRecord, RecordKind, Sample};
use crate::error::{Error, Result};
use crate::state_space::eigen::real_symmetric_eigen;
use crate::states::{FringeModel, WignerCatModel, AMPLITUDE_MAX};

pub const MAX_ITERATIONS: usize = 500;
pub const CHI2_TOL: f64 = 1e-10;
pub const STEP_TOL: f64 = 1e-10;
/// Eigenvalues of the normal matrix below this fraction of the largest
/// are treated as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    WignerCat,
    Fringe { particles: usize },
}

impl ModelKind {
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::WignerCat => &["A", "S", "phi"],
            ModelKind::Fringe { .. } => &["A", "phi"],
        }
    }

    pub fn parameter_count(self) -> usize {
        self.parameter_names().len()
    }
}

/// Model value at `θ` for external parameters `(A, S, φ)` / `(A, φ)`.
pub fn model_value(kind: ModelKind, params: &[f64], theta: f64) -> f64 {
    match kind {
        ModelKind::WignerCat => {
            params[0] * (-2.0 * theta * theta).exp() * (2.0 * params[1].sqrt() * theta + params[2]).cos()
        }
        ModelKind::Fringe { particles } => params[0] * (particles as f64 * theta + params[1]).cos(),
    }
}

/// Analytic gradient of [`model_value`] in the external parameters.
pub fn model_gradient(kind: ModelKind, params: &[f64], theta: f64) -> Vec<f64> {
    match kind {
        ModelKind::WignerCat => {
            let r = params[1].sqrt();
            let g = internal_gradient(kind, &[params[0], r, params[2]], theta);
            vec![g[0], g[1] / (2.0 * r), g[2]]
        }
        ModelKind::Fringe { .. } => internal_gradient(kind, params, theta),
    }
}

/// Gradient in the internal parameters `(A, r = √S, φ)` / `(A, φ)`.
fn internal_gradient(kind: ModelKind, x: &[f64], theta: f64) -> Vec<f64> {
    match kind {
        ModelKind::WignerCat => {
            let env = (-2.0 * theta * theta).exp();
            let arg = 2.0 * x[1] * theta + x[2];
            let (s, c) = arg.sin_cos();
            vec![env * c, -x[0] * env * s * 2.0 * theta, -x[0] * env * s]
        }
        ModelKind::Fringe { particles } => {
            let (s, c) = (particles as f64 * theta + x[1]).sin_cos();
            vec![c, -x[0] * s]
        }
    }
}

fn internal_value(kind: ModelKind, x: &[f64], theta: f64) -> f64 {
    match kind {
        ModelKind::WignerCat => x[0] * (-2.0 * theta * theta).exp() * (2.0 * x[1] * theta + x[2]).cos(),
        ModelKind::Fringe { particles } => x[0] * (particles as f64 * theta + x[1]).cos(),
    }
}

fn to_internal(kind: ModelKind, p: &[f64]) -> Vec<f64> {
    match kind {
        ModelKind::WignerCat => vec![p[0], p[1].max(0.0).sqrt(), p[2]],
        ModelKind::Fringe { .. } => p.to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitProblem {
    pub samples: Vec<Sample>,
    pub model: ModelKind,
    /// External parameters; [`initial_guess`] when absent.
    pub initial: Option<Vec<f64>>,
}

impl FitProblem {
    pub fn new(samples: Vec<Sample>, model: ModelKind) -> Result<Self> {
        let p = Self {
            samples,
            model,
            initial: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Cut records fit the cat model, fringe records the spin model.
    pub fn from_record(rec: &MeasurementRecord) -> Result<Self> {
        let model = match rec.kind {
            RecordKind::WignerCut => ModelKind::WignerCat,
            RecordKind::ParityFringe => ModelKind::Fringe {
                particles: rec
                    .meta_usize("particles")?
                    .ok_or_else(|| Error::Validation("parity_fringe record needs 'particles'".into()))?,
            },
            other => return Err(Error::Validation(format!("cannot fit a {other} record"))),
        };
        Self::new(rec.samples.clone(), model)
    }

    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self> {
        self.initial = Some(initial);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.model.parameter_count();
        if self.samples.len() <= k {
            return Err(Error::Fit(format!(
                "{} points cannot determine {k} parameters",
                self.samples.len()
            )));
        }
        if let ModelKind::Fringe { particles: 0 } = self.model {
            return Err(Error::InvalidParameter("particle count must be ≥ 1".into()));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if !s.setting.is_finite() || !s.value.is_finite() || !s.sigma.is_finite() || s.sigma < 0.0 {
                return Err(Error::Fit(format!("invalid sample {i}")));
            }
        }
        let zeros = self.samples.iter().filter(|s| s.sigma == 0.0).count();
        if zeros != 0 && zeros != self.samples.len() {
            return Err(Error::Fit("σ must be positive for every point (or zero for all)".into()));
        }
        if let Some(x) = &self.initial {
            if x.len() != k || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Fit(format!("initial guess needs {k} finite values")));
            }
        }
        Ok(())
    }

    fn weights(&self) -> (Vec<f64>, bool) {
        if self.samples.iter().all(|s| s.sigma == 0.0) {
            (vec![1.0; self.samples.len()], true)
        } else {
            (self.samples.iter().map(|s| 1.0 / s.sigma).collect(), false)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub model: ModelKind,
    pub parameter_names: Vec<String>,
    /// `(A, S, φ)` or `(A, φ)`; `A ∈ [0, 1.05]`, `φ ∈ (−π, π]`.
    pub parameters: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub std_errors: Vec<f64>,
    pub chi_square: f64,
    pub dof: usize,
    pub converged: bool,
    pub iterations: usize,
    /// True when all σ were zero and unit weights were used.
    pub unit_weights: bool,
    /// Parameters the data cannot determine (null directions of the
    /// normal matrix); their covariance entries are from the pseudo-inverse.
    pub unidentifiable: Vec<String>,
    pub warnings: Vec<String>,
}

impl FitReport {
    pub fn value(&self, theta: f64) -> f64 {
        model_value(self.model, &self.parameters, theta)
    }

    pub fn reduced_chi_square(&self) -> f64 {
        if self.dof == 0 {
            f64::NAN
        } else {
            self.chi_square / self.dof as f64
        }
    }

    pub fn wigner_model(&self) -> Result<WignerCatModel> {
        match self.model {
            ModelKind::WignerCat => {
                let c = &self.covariance;
                let cov = [
                    [c[0][0], c[0][1], c[0][2]],
                    [c[1][0], c[1][1], c[1][2]],
                    [c[2][0], c[2][1], c[2][2]],
                ];
                WignerCatModel::with_covariance(self.parameters[0], self.parameters[1], self.parameters[2], cov)
            }
            _ => Err(Error::Fit("report is not a Wigner-cut fit".into())),
        }
    }

    pub fn fringe_model(&self) -> Result<FringeModel> {
        match self.model {
            ModelKind::Fringe { particles } => {
                let c = &self.covariance;
                FringeModel::with_covariance(
                    self.parameters[0],
                    particles,
                    self.parameters[1],
                    [[c[0][0], c[0][1]], [c[1][0], c[1][1]]],
                )
            }
            _ => Err(Error::Fit("report is not a fringe fit".into())),
        }
    }
}

/// Starting point: `A₀ = max|v|`, frequency and phase from the peak of
/// the record's discrete Fourier transform (`S₀ = (ω₀/2)²`).
pub fn initial_guess(samples: &[Sample], kind: ModelKind) -> Result<Vec<f64>> {
    if samples.len() < 8 {
        return Err(Error::Fit(format!(
            "initial guess needs ≥ 8 points, got {}",
            samples.len()
        )));
    }
    let a0 = samples.iter().map(|s| s.value.abs()).fold(0.0, f64::max);
    let a0 = if a0.is_finite() { a0 } else { 1.0 };
    let dft = |w: f64| -> (f64, f64) {
        samples.iter().fold((0.0, 0.0), |(re, im), s| {
            let (sn, cs) = (w * s.setting).sin_cos();
            (re + s.value * cs, im - s.value * sn)
        })
    };
    let phase_at = |w: f64| {
        let (re, im) = dft(w);
        if re == 0.0 && im == 0.0 {
            0.0
        } else {
            im.atan2(re)
        }
    };
    match kind {
        ModelKind::Fringe { particles } => Ok(vec![a0, phase_at(particles as f64)]),
        ModelKind::WignerCat => {
            let mut settings: Vec<f64> = samples.iter().map(|s| s.setting).collect();
            settings.sort_by(f64::total_cmp);
            let span = settings[settings.len() - 1] - settings[0];
            let min_gap = settings
                .windows(2)
                .map(|w| w[1] - w[0])
                .filter(|d| *d > 0.0)
                .fold(f64::INFINITY, f64::min);
            if !(span > 0.0) || !min_gap.is_finite() {
                return Err(Error::Fit("settings must span a nonzero range".into()));
            }
            let dw = 2.0 * PI / (16.0 * span);
            let w_max = PI / min_gap;
            let n = ((w_max / dw).floor() as usize).max(2);
            let power: Vec<f64> = (1..=n)
                .map(|k| {
                    let (re, im) = dft(k as f64 * dw);
                    re * re + im * im
                })
                .collect();
            let (imax, pmax) = power
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
            let mut w0 = (imax + 1) as f64 * dw;
            if pmax > 0.0 && imax > 0 && imax + 1 < power.len() {
                let (l, c, r) = (power[imax - 1], power[imax], power[imax + 1]);
                let den = l - 2.0 * c + r;
                if den < 0.0 {
                    w0 += 0.5 * (l - r) / den * dw;
                }
            }
            let w0 = if w0.is_finite() && w0 > 0.0 { w0 } else { dw };
            Ok(vec![a0, 0.25 * w0 * w0, phase_at(w0)])
        }
    }
}

/// Solves the small dense system `m x = b` by Gaussian elimination with
/// partial pivoting; `None` when singular.
fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

struct Normal {
    jtj: Vec<Vec<f64>>,
    jtr: Vec<f64>,
    chi2: f64,
}

fn normal_equations(problem: &FitProblem, w: &[f64], x: &[f64]) -> Normal {
    let k = x.len();
    let mut jtj = vec![vec![0.0; k]; k];
    let mut jtr = vec![0.0; k];
    let mut chi2 = 0.0;
    for (s, &wi) in problem.samples.iter().zip(w) {
        let r = (s.value - internal_value(problem.model, x, s.setting)) * wi;
        let g: Vec<f64> = internal_gradient(problem.model, x, s.setting)
            .into_iter()
            .map(|v| v * wi)
            .collect();
        chi2 += r * r;
        for a in 0..k {
            jtr[a] += g[a] * r;
            for b in 0..k {
                jtj[a][b] += g[a] * g[b];
            }
        }
    }
    Normal { jtj, jtr, chi2 }
}

fn chi_square(problem: &FitProblem, w: &[f64], x: &[f64]) -> f64 {
    problem
        .samples
        .iter()
        .zip(w)
        .map(|(s, wi)| ((s.value - internal_value(problem.model, x, s.setting)) * wi).powi(2))
        .sum()
}

struct LmOutcome {
    x: Vec<f64>,
    chi2: f64,
    iterations: usize,
    converged: bool,
}

fn levenberg_marquardt(problem: &FitProblem, w: &[f64], x0: Vec<f64>) -> LmOutcome {
    let mut x = x0;
    let mut lambda = 1e-3;
    let mut ne = normal_equations(problem, w, &x);
    for it in 1..=MAX_ITERATIONS {
        if ne.chi2 == 0.0 {
            return LmOutcome {
                x,
                chi2: 0.0,
                iterations: it - 1,
                converged: true,
            };
        }
        let k = x.len();
        let max_diag = (0..k).map(|i| ne.jtj[i][i]).fold(0.0, f64::max);
        loop {
            let mut m = ne.jtj.clone();
            for i in 0..k {
                m[i][i] += lambda * ne.jtj[i][i].max(1e-12 * max_diag).max(1e-300);
            }
            let step = solve(m, ne.jtr.clone());
            let Some(step) = step else {
                lambda *= 10.0;
                if lambda > 1e20 {
                    return LmOutcome {
                        x,
                        chi2: ne.chi2,
                        iterations: it,
                        converged: false,
                    };
                }
                continue;
            };
            let step_norm = step.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let chi2_new = chi_square(problem, w, &trial);
            if chi2_new.is_finite() && chi2_new <= ne.chi2 {
                let rel = (ne.chi2 - chi2_new) / ne.chi2;
                x = trial;
                lambda = (lambda / 10.0).max(1e-12);
                ne = normal_equations(problem, w, &x);
                if rel < CHI2_TOL || step_norm < STEP_TOL * (x_norm + STEP_TOL) {
                    return LmOutcome {
                        x,
                        chi2: ne.chi2,
                        iterations: it,
                        converged: true,
                    };
                }
                break;
            }
            if step_norm < STEP_TOL * (x_norm + STEP_TOL) {
                return LmOutcome {
                    x,
                    chi2: ne.chi2,
                    iterations: it,
                    converged: true,
                };
            }
            lambda *= 10.0;
            if lambda > 1e20 {
                return LmOutcome {
                    x,
                    chi2: ne.chi2,
                    iterations: it,
                    converged: false,
                };
            }
            break;
        }
    }
    LmOutcome {
        x,
        chi2: ne.chi2,
        iterations: MAX_ITERATIONS,
        converged: false,
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let mut p = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

/// Weighted Levenberg–Marquardt fit. Covariance is the (pseudo-)inverse
/// of the weighted normal matrix at the optimum; with all-zero σ the fit
/// is unweighted and the covariance is scaled by `χ²/dof`.
pub fn fit(problem: &FitProblem) -> Result<FitReport> {
    problem.validate()?;
    let kind = problem.model;
    let k = kind.parameter_count();
    let (w, unit_weights) = problem.weights();
    let start = match &problem.initial {
        Some(x) => x.clone(),
        None => initial_guess(&problem.samples, kind)?,
    };
    let x0 = to_internal(kind, &start);
    let mut outcome = levenberg_marquardt(problem, &w, x0.clone());
    if kind == ModelKind::WignerCat && problem.initial.is_none() {
        // the frequency guess is only as good as the Fourier grid
        for f in [0.9, 0.95, 1.05, 1.1] {
            let mut alt = x0.clone();
            alt[1] *= f;
            let o = levenberg_marquardt(problem, &w, alt);
            if o.chi2 < outcome.chi2 * (1.0 - 1e-9) {
                outcome = o;
            }
        }
    }
    let LmOutcome {
        mut x,
        chi2,
        iterations,
        converged,
    } = outcome;

    let ne = normal_equations(problem, &w, &x);
    let (evals, evecs) = real_symmetric_eigen(&ne.jtj)?;
    let top = evals.iter().cloned().fold(0.0, f64::max);
    if !(top > 0.0) || !top.is_finite() {
        return Err(Error::Fit("normal matrix is singular: data do not constrain the model".into()));
    }
    let mut cov_int = vec![vec![0.0; k]; k];
    let mut unidentifiable = Vec::new();
    for (lam, v) in evals.iter().zip(&evecs) {
        if *lam > RANK_TOL * top {
            for a in 0..k {
                for b in 0..k {
                    cov_int[a][b] += v[a] * v[b] / lam;
                }
            }
        } else {
            for (a, name) in kind.parameter_names().iter().enumerate() {
                if v[a].abs() > 0.5 && !unidentifiable.contains(&name.to_string()) {
                    unidentifiable.push(name.to_string());
                }
            }
        }
    }
    let dof = problem.samples.len() - k;
    let mut warnings = Vec::new();
    if unit_weights {
        let s2 = chi2 / dof as f64;
        cov_int.iter_mut().flatten().for_each(|c| *c *= s2);
        warnings.push("all σ are zero: unweighted fit, covariance scaled by χ²/dof".into());
    }
    if !converged {
        warnings.push(format!("no convergence after {iterations} iterations"));
    }

    // canonical signs: A ≥ 0, √S ≥ 0
    let amp_sign = if x[0] < 0.0 { -1.0 } else { 1.0 };
    let phase_idx = k - 1;
    let mut signs = vec![1.0; k];
    if amp_sign < 0.0 {
        x[0] = -x[0];
        x[phase_idx] += PI;
        signs[0] = -1.0;
    }
    if kind == ModelKind::WignerCat && x[1] < 0.0 {
        x[1] = -x[1];
        x[2] = -x[2];
        signs[1] *= -1.0;
        signs[2] *= -1.0;
    }
    x[phase_idx] = wrap_phase(x[phase_idx]);
    for a in 0..k {
        for b in 0..k {
            cov_int[a][b] *= signs[a] * signs[b];
        }
    }

    // (A, r, φ) → (A, S = r², φ)
    let (mut params, jac) = match kind {
        ModelKind::WignerCat => (vec![x[0], x[1] * x[1], x[2]], vec![1.0, 2.0 * x[1], 1.0]),
        ModelKind::Fringe { .. } => (x.clone(), vec![1.0; k]),
    };
    let covariance: Vec<Vec<f64>> = (0..k)
        .map(|a| (0..k).map(|b| jac[a] * cov_int[a][b] * jac[b]).collect())
        .collect();
    // symmetrize against rounding
    let covariance: Vec<Vec<f64>> = (0..k)
        .map(|a| (0..k).map(|b| 0.5 * (covariance[a][b] + covariance[b][a])).collect())
        .collect();
    if params[0] > AMPLITUDE_MAX {
        warnings.push(format!(
            "fitted amplitude {} exceeds {AMPLITUDE_MAX}; reported value clipped",
            params[0]
        ));
        params[0] = AMPLITUDE_MAX;
    }
    let std_errors = (0..k).map(|a| covariance[a][a].max(0.0).sqrt()).collect();
    Ok(FitReport {
        model: kind,
        parameter_names: kind.parameter_names().iter().map(|s| s.to_string()).collect(),
        parameters: params,
        covariance,
        std_errors,
        chi_square: chi2,
        dof,
        converged,
        iterations,
        unit_weights,
        unidentifiable,
        warnings,
    })
}
