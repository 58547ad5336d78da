//! Exact QFI, QFI matrices over generator families, generator optimization
//! and the effective size.
//!
//! For `ρ = Σ_i λ_i |i⟩⟨i|` the convex roof of the variance is
//!
//! ```text
//! I_ρ(X) = ½ Σ_{i,j: λ_i+λ_j > ε} (λ_i − λ_j)² / (λ_i + λ_j) · |⟨i|X|j⟩|²
//! ```
//!
//! Only the support of ρ is diagonalized. Pairs with one index in the kernel
//! contribute `λ_i ⟨i|X P_ker X|i⟩`, which is evaluated as
//! `λ_i (‖X|i⟩‖² − Σ_{j ∈ supp} |⟨i|X|j⟩|²)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::nelder_mead_max;
use crate::state_space::eigen::real_symmetric_top;
use crate::state_space::matrix::{inner, C64};
use crate::state_space::operators::{collective_quadrature, quadrature, spin_axis};
use crate::state_space::{DensityMatrix, GeneratorLabel, ObservableMatrix, SpaceSpec};

pub const CONVENTION_NOTE: &str =
    "QFI = convex roof of variance (one quarter of the metrological QFI)";

/// Pairs with `λ_i + λ_j` at or below this are skipped.
pub const PAIR_EPS: f64 = 1e-12;

/// Grid points per angle in the two-mode phase-space search.
pub const ANGLE_GRID: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct QfiValue {
    pub value: f64,
    pub generator: GeneratorLabel,
    pub convention_note: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct QfiMatrix {
    pub generators: Vec<GeneratorLabel>,
    pub entries: Vec<Vec<f64>>,
}

impl QfiMatrix {
    /// `cᵀ M c`, the QFI of `Σ_k c_k G_k`.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        let n = self.entries.len();
        assert_eq!(c.len(), n);
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                acc += c[k] * self.entries[k][l] * c[l];
            }
        }
        acc
    }
}

/// Exact QFI of `rho` for generator `x`.
pub fn qfi_exact(rho: &DensityMatrix, x: &ObservableMatrix) -> Result<QfiValue> {
    let m = qfi_matrix(rho, std::slice::from_ref(x))?;
    Ok(QfiValue {
        value: m.entries[0][0].max(0.0),
        generator: x.label().clone(),
        convention_note: CONVENTION_NOTE,
    })
}

/// QFI matrix `M_kl = ½ Σ_ij w_ij Re[⟨i|G_k|j⟩⟨j|G_l|i⟩]`, with
/// `w_ij = (λ_i − λ_j)²/(λ_i + λ_j)`.
pub fn qfi_matrix(rho: &DensityMatrix, generators: &[ObservableMatrix]) -> Result<QfiMatrix> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("no generators given".into()));
    }
    for g in generators {
        if g.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                got: g.dim(),
            });
        }
    }
    let terms = rho.spectrum()?;
    let r = terms.len();
    let lambdas: Vec<f64> = terms.iter().map(|t| t.weight).collect();
    // images[k][i] = G_k |i⟩
    let images: Vec<Vec<Vec<C64>>> = generators
        .iter()
        .map(|g| terms.iter().map(|t| g.matrix().apply(&t.vector)).collect())
        .collect();
    // elements[k][i][j] = ⟨i|G_k|j⟩
    let elements: Vec<Vec<Vec<C64>>> = images
        .iter()
        .map(|img| {
            (0..r)
                .map(|i| (0..r).map(|j| inner(&terms[i].vector, &img[j])).collect())
                .collect()
        })
        .collect();

    let n = generators.len();
    let mut entries = vec![vec![0.0; n]; n];
    for k in 0..n {
        for l in k..n {
            let mut acc = 0.0;
            for i in 0..r {
                for j in 0..r {
                    let s = lambdas[i] + lambdas[j];
                    if s <= PAIR_EPS {
                        continue;
                    }
                    let d = lambdas[i] - lambdas[j];
                    let w = d * d / s;
                    if w == 0.0 {
                        continue;
                    }
                    acc += 0.5 * w * (elements[k][i][j] * elements[l][j][i]).re;
                }
                // kernel part: λ_i ⟨G_k i| P_ker |G_l i⟩
                let mut kernel = inner(&images[k][i], &images[l][i]);
                for j in 0..r {
                    kernel -= elements[k][i][j] * elements[l][j][i];
                }
                acc += lambdas[i] * kernel.re;
            }
            entries[k][l] = acc;
            entries[l][k] = acc;
        }
    }
    Ok(QfiMatrix {
        generators: generators.iter().map(|g| g.label().clone()).collect(),
        entries,
    })
}

/// `Var_ρ(X)`, an upper bound on the QFI and equal to it for pure states.
pub fn variance(rho: &DensityMatrix, x: &ObservableMatrix) -> f64 {
    rho.variance(x.matrix())
}

/// Generator families over which the effective size is maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorFamily {
    /// `Σ_i X^{(i)}_{ϑ_i}`, one free quadrature angle per mode.
    PhaseSpace,
    /// `2 n̂·J` for a unit axis n̂ (same axis on every particle).
    CollectiveSpin,
}

impl GeneratorFamily {
    pub fn for_space(space: SpaceSpec) -> Self {
        match space {
            SpaceSpec::Fock { .. } => GeneratorFamily::PhaseSpace,
            SpaceSpec::Spin { .. } => GeneratorFamily::CollectiveSpin,
        }
    }
}

/// Optimal generator of a family and its QFI.
#[derive(Debug, Clone)]
pub struct OptimalGenerator {
    pub generator: ObservableMatrix,
    pub qfi: QfiValue,
    /// Per-mode quadrature angles (phase space) or the spin axis.
    pub parameters: Vec<f64>,
}

/// Maximizes the QFI over `family`.
///
/// One mode: top eigenpair of the 2×2 QFI matrix over `{x, p}`. Two modes:
/// grid over both angles followed by simplex refinement (the per-mode
/// unit-modulus constraint makes this a non-eigen problem). Spins: top
/// eigenpair of the 3×3 QFI matrix over `{2J_x, 2J_y, 2J_z}`.
pub fn optimize_generator(rho: &DensityMatrix, family: GeneratorFamily) -> Result<OptimalGenerator> {
    let space = rho.space();
    match (family, space) {
        (GeneratorFamily::PhaseSpace, SpaceSpec::Fock { modes, .. }) => {
            let mut gens = Vec::with_capacity(2 * modes);
            for mode in 0..modes {
                gens.push(quadrature(space, mode, 0.0)?);
                gens.push(quadrature(space, mode, -PI / 2.0)?);
            }
            let m = qfi_matrix(rho, &gens)?;
            let angles = if modes == 1 {
                let (_, c) = real_symmetric_top(&m.entries)?;
                // X_ϑ = cos ϑ x − sin ϑ p
                vec![wrap_half_turn((-c[1]).atan2(c[0]))]
            } else {
                best_angle_pair(&m)
            };
            let generator = collective_quadrature(space, &angles)?;
            let q = qfi_exact(rho, &generator)?;
            Ok(OptimalGenerator {
                generator,
                qfi: q,
                parameters: angles,
            })
        }
        (GeneratorFamily::CollectiveSpin, SpaceSpec::Spin { .. }) => {
            let gens = [
                spin_axis(space, [1.0, 0.0, 0.0])?,
                spin_axis(space, [0.0, 1.0, 0.0])?,
                spin_axis(space, [0.0, 0.0, 1.0])?,
            ];
            let m = qfi_matrix(rho, &gens)?;
            let (_, mut c) = real_symmetric_top(&m.entries)?;
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            c.iter_mut().for_each(|v| *v /= norm);
            let pivot = (0..3)
                .max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs()).then(b.cmp(&a)))
                .unwrap_or(0);
            if c[pivot] < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
            let axis = [c[0], c[1], c[2]];
            let generator = spin_axis(space, axis)?;
            let q = qfi_exact(rho, &generator)?;
            Ok(OptimalGenerator {
                generator,
                qfi: q,
                parameters: axis.to_vec(),
            })
        }
        _ => Err(Error::InvalidParameter(format!(
            "generator family {family:?} does not apply to {space:?}"
        ))),
    }
}

/// Maps an angle to (−π/2, π/2]; `X_{ϑ+π} = −X_ϑ` has the same QFI.
fn wrap_half_turn(a: f64) -> f64 {
    let mut t = a.rem_euclid(PI);
    if t > PI / 2.0 {
        t -= PI;
    }
    t
}

fn angle_weights(angles: &[f64]) -> Vec<f64> {
    angles
        .iter()
        .flat_map(|&t| [t.cos(), -t.sin()])
        .collect()
}

/// Grid + refinement over (ϑ₁, ϑ₂) of `cᵀMc`. The global sign symmetry is
/// removed by restricting ϑ₁ to a half turn.
fn best_angle_pair(m: &QfiMatrix) -> Vec<f64> {
    let value = |a: &[f64]| m.quadratic_form(&angle_weights(a));
    let mut best = (f64::NEG_INFINITY, vec![0.0, 0.0]);
    for i in 0..ANGLE_GRID {
        let t1 = -PI / 2.0 + PI * i as f64 / ANGLE_GRID as f64;
        for j in 0..ANGLE_GRID {
            let t2 = -PI + 2.0 * PI * j as f64 / ANGLE_GRID as f64;
            let v = value(&[t1, t2]);
            // strict > keeps the lexicographically smallest angles on ties
            if v > best.0 + 1e-12 * best.0.abs() {
                best = (v, vec![t1, t2]);
            }
        }
    }
    let step = PI / ANGLE_GRID as f64;
    let (x, v) = nelder_mead_max(value, &best.1, &[step, step], 1e-15, 2000);
    let chosen = if v >= best.0 { x } else { best.1 };
    // canonical representative: ϑ₁ ∈ (−π/2, π/2], ϑ₂ shifted with it
    let t1 = wrap_half_turn(chosen[0]);
    let shift = t1 - chosen[0];
    let mut t2 = (chosen[1] + shift).rem_euclid(2.0 * PI);
    if t2 > PI {
        t2 -= 2.0 * PI;
    }
    vec![t1, t2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    PhaseSpace { modes: usize },
    Spin { particles: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveSize {
    pub value: f64,
    /// Maximal QFI of classical states: mode count or particle count.
    pub normalization: f64,
    pub system: SystemKind,
    pub qfi: QfiValue,
    pub generator_parameters: Vec<f64>,
}

/// `N_eff = max_X I_ρ(X) / N`.
pub fn effective_size(rho: &DensityMatrix, family: GeneratorFamily) -> Result<EffectiveSize> {
    let opt = optimize_generator(rho, family)?;
    let space = rho.space();
    let system = match space {
        SpaceSpec::Fock { modes, .. } => SystemKind::PhaseSpace { modes },
        SpaceSpec::Spin { particles } => SystemKind::Spin { particles },
    };
    let normalization = space.normalization();
    Ok(EffectiveSize {
        value: opt.qfi.value / normalization,
        normalization,
        system,
        qfi: opt.qfi,
        generator_parameters: opt.parameters,
    })
}

/// `√I`, optionally converted to physical units by `scale` (length per
/// phase-space unit).
pub fn coherence_length(qfi: f64, scale: Option<f64>) -> Result<f64> {
    if !(qfi >= 0.0) {
        return Err(Error::InvalidParameter(format!("QFI {qfi} must be ≥ 0")));
    }
    Ok(qfi.sqrt() * scale.unwrap_or(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_space::matrix::ComplexMatrix;
    use crate::states::{make_state, CatSpec, StateSpec};

    fn real(a: f64) -> C64 {
        C64::new(a, 0.0)
    }

    #[test]
    fn coherent_state_has_unit_qfi() {
        let rho = make_state(&StateSpec::Coherent {
            alpha: C64::new(1.3, -0.4),
        })
        .unwrap();
        for &t in &[0.0, 0.9, -2.0] {
            let x = quadrature(rho.space(), 0, t).unwrap();
            assert!((qfi_exact(&rho, &x).unwrap().value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn maximally_mixed_qubit() {
        let s = SpaceSpec::spin(1).unwrap();
        let rho = DensityMatrix::from_matrix(s, ComplexMatrix::from_real_diagonal(&[0.5, 0.5])).unwrap();
        let z = spin_axis(s, [0.0, 0.0, 1.0]).unwrap();
        assert!(qfi_exact(&rho, &z).unwrap().value.abs() < 1e-15);
    }

    #[test]
    fn fock_three() {
        let rho = make_state(&StateSpec::Fock { n: 3 }).unwrap();
        let x = quadrature(rho.space(), 0, 0.0).unwrap();
        assert!((qfi_exact(&rho, &x).unwrap().value - 7.0).abs() < 1e-9);
    }

    #[test]
    fn vacuum_and_squeezed_matrices() {
        let vac = make_state(&StateSpec::Fock { n: 0 }).unwrap();
        let s = vac.space();
        let gens = [quadrature(s, 0, 0.0).unwrap(), quadrature(s, 0, -PI / 2.0).unwrap()];
        let m = qfi_matrix(&vac, &gens).unwrap();
        assert!((m.entries[0][0] - 1.0).abs() < 1e-12 && (m.entries[1][1] - 1.0).abs() < 1e-12);
        assert!(m.entries[0][1].abs() < 1e-12);

        let r = 0.8;
        let sq = make_state(&StateSpec::Squeezed { r, modes: 1 }).unwrap();
        let s = sq.space();
        let gens = [quadrature(s, 0, 0.0).unwrap(), quadrature(s, 0, -PI / 2.0).unwrap()];
        let m = qfi_matrix(&sq, &gens).unwrap();
        assert!((m.entries[0][0] - (2.0 * r).exp()).abs() < 1e-8);
        assert!((m.entries[1][1] - (-2.0 * r).exp()).abs() < 1e-8);
        assert!(m.entries[0][1].abs() < 1e-10);
    }

    #[test]
    fn ghz_optimum_is_z() {
        let rho = make_state(&StateSpec::Ghz {
            particles: 8,
            damping: 1.0,
            phase: 0.0,
        })
        .unwrap();
        let opt = optimize_generator(&rho, GeneratorFamily::CollectiveSpin).unwrap();
        assert!((opt.qfi.value - 64.0).abs() < 1e-9);
        assert!((opt.parameters[2] - 1.0).abs() < 1e-9);
        let neff = effective_size(&rho, GeneratorFamily::CollectiveSpin).unwrap();
        assert!((neff.value - 8.0).abs() < 1e-9);
    }

    #[test]
    fn cat_optimal_angle_follows_alpha() {
        let rho = make_state(&StateSpec::Cat(CatSpec::new(real(2.0), 0.0, 1.0).unwrap())).unwrap();
        let opt = optimize_generator(&rho, GeneratorFamily::PhaseSpace).unwrap();
        assert!(opt.parameters[0].abs() < 1e-6);
        // for α = |α| e^{iχ}, ⟨X_ϑ⟩ = 2|α| cos(ϑ + χ): optimum at ϑ = −χ
        let chi = 0.6;
        let rho = make_state(&StateSpec::Cat(
            CatSpec::new(C64::from_polar(2.0, chi), 0.0, 1.0).unwrap(),
        ))
        .unwrap();
        let opt = optimize_generator(&rho, GeneratorFamily::PhaseSpace).unwrap();
        assert!((opt.parameters[0] + chi).abs() < 1e-6);
    }

    #[test]
    fn two_mode_cat_equal_weights() {
        let rho = make_state(&StateSpec::TwoModeCat {
            alpha: real(2.7),
            beta: real(3.1),
            damping: 1.0,
        })
        .unwrap();
        let opt = optimize_generator(&rho, GeneratorFamily::PhaseSpace).unwrap();
        assert!(opt.parameters[0].abs() < 1e-3 && opt.parameters[1].abs() < 1e-3, "{:?}", opt.parameters);
        // 4(α+β)² + 2 up to branch-overlap corrections
        let expect = 4.0 * 5.8f64.powi(2) + 2.0;
        assert!((opt.qfi.value - expect).abs() / expect < 1e-6);
    }

    #[test]
    fn dicke_collective_value() {
        let rho = make_state(&StateSpec::Dicke {
            particles: 4,
            excitations: 2,
        })
        .unwrap();
        let neff = effective_size(&rho, GeneratorFamily::CollectiveSpin).unwrap();
        assert!((neff.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn family_mismatch() {
        let rho = make_state(&StateSpec::Fock { n: 1 }).unwrap();
        assert!(optimize_generator(&rho, GeneratorFamily::CollectiveSpin).is_err());
    }

    #[test]
    fn coherence_length_values() {
        assert_eq!(coherence_length(0.0, None).unwrap(), 0.0);
        let q = 0.57f64.powi(2) * 4.0 * 5.9f64.powi(2);
        assert!((coherence_length(q, None).unwrap() - 6.726).abs() < 1e-9);
        assert!(coherence_length(-1.0, None).is_err());
    }
}
