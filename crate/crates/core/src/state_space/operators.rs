//! Fock-space and collective-spin operators, generators and their unitaries.

use std::fmt;

use serde::Serialize;

use super::eigen::{eig_hermitian, EigenDecomposition, HERMITIAN_TOL};
use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use super::SpaceSpec;
use crate::error::{Error, Result};

/// What a generator represents.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GeneratorLabel {
    /// `X^{(mode)}_ϑ` for a single mode.
    ModeQuadrature { mode: usize, angle: f64 },
    /// `Σ_i X^{(i)}_{ϑ_i}`, one angle per mode.
    Quadrature { angles: Vec<f64> },
    /// `2 n̂·J` for a unit axis n̂.
    SpinAxis { axis: [f64; 3] },
    /// Arbitrary Hermitian matrix.
    Custom { description: String },
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorLabel::ModeQuadrature { mode, angle } => {
                write!(f, "X^({})_{{{:.6}}}", mode + 1, angle)
            }
            GeneratorLabel::Quadrature { angles } => {
                let parts: Vec<String> = angles
                    .iter()
                    .enumerate()
                    .map(|(i, a)| format!("X^({})_{{{:.6}}}", i + 1, a))
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
            GeneratorLabel::SpinAxis { axis } => write!(
                f,
                "2 n·J, n = ({:.6}, {:.6}, {:.6})",
                axis[0], axis[1], axis[2]
            ),
            GeneratorLabel::Custom { description } => write!(f, "{description}"),
        }
    }
}

/// A Hermitian generator on a given space.
#[derive(Debug, Clone)]
pub struct ObservableMatrix {
    space: SpaceSpec,
    matrix: ComplexMatrix,
    label: GeneratorLabel,
}

impl ObservableMatrix {
    pub fn new(space: SpaceSpec, matrix: ComplexMatrix, label: GeneratorLabel) -> Result<Self> {
        if matrix.dim() != space.dimension() {
            return Err(Error::DimensionMismatch {
                expected: space.dimension(),
                got: matrix.dim(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: defect });
        }
        Ok(Self {
            space,
            matrix,
            label,
        })
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &GeneratorLabel {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `Σ_k c_k G_k` over generators on a common space.
    pub fn combination(
        terms: &[(f64, &ObservableMatrix)],
        label: GeneratorLabel,
    ) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty combination".into()))?;
        let space = first.1.space;
        let mut acc = ComplexMatrix::zeros(space.dimension());
        for (c, g) in terms {
            if g.space != space {
                return Err(Error::DimensionMismatch {
                    expected: space.dimension(),
                    got: g.dim(),
                });
            }
            acc = &acc + &g.matrix.scale_real(*c);
        }
        Self::new(space, acc, label)
    }

    /// `U X U†`
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix).matmul(&u.adjoint()).hermitian_part();
        Self::new(self.space, m, self.label.clone())
    }
}

fn single_mode_annihilation(cutoff: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn embed(op: &ComplexMatrix, cutoff: usize, modes: usize, mode: usize) -> Result<ComplexMatrix> {
    if mode >= modes {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} out of range for {modes} mode(s)"
        )));
    }
    Ok(match (modes, mode) {
        (1, _) => op.clone(),
        (_, 0) => op.kron(&ComplexMatrix::identity(cutoff)),
        _ => ComplexMatrix::identity(cutoff).kron(op),
    })
}

/// Annihilation operator `a` of `mode`, with `a[n−1, n] = √n`.
pub fn annihilation(space: SpaceSpec, mode: usize) -> Result<ComplexMatrix> {
    let (cutoff, modes) = space.fock_params()?;
    embed(&single_mode_annihilation(cutoff), cutoff, modes, mode)
}

pub fn creation(space: SpaceSpec, mode: usize) -> Result<ComplexMatrix> {
    Ok(annihilation(space, mode)?.adjoint())
}

/// Number operator of one mode.
pub fn number(space: SpaceSpec, mode: usize) -> Result<ComplexMatrix> {
    let (cutoff, modes) = space.fock_params()?;
    let diag: Vec<f64> = (0..cutoff).map(|n| n as f64).collect();
    embed(&ComplexMatrix::from_real_diagonal(&diag), cutoff, modes, mode)
}

/// Total photon-number parity `(−1)^{Σ n_i}`.
pub fn fock_parity(space: SpaceSpec) -> Result<ComplexMatrix> {
    let (cutoff, modes) = space.fock_params()?;
    Ok(ComplexMatrix::from_real_diagonal(&fock_parity_diagonal(
        cutoff, modes,
    )))
}

pub(crate) fn fock_parity_diagonal(cutoff: usize, modes: usize) -> Vec<f64> {
    (0..cutoff.pow(modes as u32))
        .map(|i| {
            let total = if modes == 1 { i } else { i / cutoff + i % cutoff };
            if total % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// Single-mode quadrature `X_ϑ = e^{iϑ} a + e^{−iϑ} a†` of `mode`.
pub fn quadrature(space: SpaceSpec, mode: usize, angle: f64) -> Result<ObservableMatrix> {
    let (cutoff, modes) = space.fock_params()?;
    let a = single_mode_annihilation(cutoff);
    let phase = C64::from_polar(1.0, angle);
    let x = &a.scale(phase) + &a.adjoint().scale(phase.conj());
    let m = embed(&x, cutoff, modes, mode)?;
    ObservableMatrix::new(space, m, GeneratorLabel::ModeQuadrature { mode, angle })
}

/// `Σ_i X^{(i)}_{ϑ_i}` with one angle per mode.
pub fn collective_quadrature(space: SpaceSpec, angles: &[f64]) -> Result<ObservableMatrix> {
    let (_, modes) = space.fock_params()?;
    if angles.len() != modes {
        return Err(Error::InvalidParameter(format!(
            "{} angle(s) given for {modes} mode(s)",
            angles.len()
        )));
    }
    let mut acc = ComplexMatrix::zeros(space.dimension());
    for (mode, &angle) in angles.iter().enumerate() {
        acc = &acc + quadrature(space, mode, angle)?.matrix();
    }
    ObservableMatrix::new(
        space,
        acc,
        GeneratorLabel::Quadrature {
            angles: angles.to_vec(),
        },
    )
}

/// Angular-momentum matrices `(J_x, J_y, J_z)` for j = N/2 in the Dicke
/// basis |k⟩, k = number of excitations, `J_z|k⟩ = (N/2 − k)|k⟩`.
pub fn spin_matrices(space: SpaceSpec) -> Result<[ComplexMatrix; 3]> {
    let n = space.spin_particles()?;
    let dim = n + 1;
    let half = n as f64 / 2.0;
    let mut jplus = ComplexMatrix::zeros(dim);
    // J+ |k⟩ = √(k (N − k + 1)) |k − 1⟩
    for k in 1..dim {
        jplus[(k - 1, k)] = C64::new(((k * (n - k + 1)) as f64).sqrt(), 0.0);
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale_real(0.5);
    let jy = (&jplus - &jminus).scale(C64::new(0.0, -0.5));
    let jz = ComplexMatrix::from_real_diagonal(
        &(0..dim).map(|k| half - k as f64).collect::<Vec<_>>(),
    );
    Ok([jx, jy, jz])
}

/// Collective generator `X_n̂ = 2 n̂·J = Σ_i n̂·σ^{(i)}`; `‖X_n̂‖ = N`.
pub fn spin_axis(space: SpaceSpec, axis: [f64; 3]) -> Result<ObservableMatrix> {
    let norm = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "spin axis has norm {norm}, expected 1"
        )));
    }
    let [jx, jy, jz] = spin_matrices(space)?;
    let m = &(&jx.scale_real(2.0 * axis[0]) + &jy.scale_real(2.0 * axis[1]))
        + &jz.scale_real(2.0 * axis[2]);
    ObservableMatrix::new(space, m, GeneratorLabel::SpinAxis { axis })
}

/// Parity of the excitation number, `⊗σ_z = (−1)^k` on the Dicke basis.
pub fn spin_parity_z(space: SpaceSpec) -> Result<ComplexMatrix> {
    let n = space.spin_particles()?;
    Ok(ComplexMatrix::from_real_diagonal(
        &(0..=n)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
            .collect::<Vec<_>>(),
    ))
}

/// `⊗σ_x`, which maps Dicke |k⟩ to |N − k⟩.
pub fn spin_parity_x(space: SpaceSpec) -> Result<ComplexMatrix> {
    let n = space.spin_particles()?;
    let mut m = ComplexMatrix::zeros(n + 1);
    for k in 0..=n {
        m[(n - k, k)] = ONE;
    }
    Ok(m)
}

/// `⊗σ_y`: |k⟩ ↦ i^{N−k} (−i)^k |N − k⟩.
pub fn spin_parity_y(space: SpaceSpec) -> Result<ComplexMatrix> {
    let n = space.spin_particles()?;
    let mut m = ComplexMatrix::zeros(n + 1);
    let i = C64::new(0.0, 1.0);
    for k in 0..=n {
        m[(n - k, k)] = i.powu((n - k) as u32) * (-i).powu(k as u32);
    }
    Ok(m)
}

/// `exp(−iθX)` built from the eigendecomposition of `X`.
pub fn unitary_from_generator(x: &ObservableMatrix, theta: f64) -> Result<ComplexMatrix> {
    Ok(Propagator::new(x)?.unitary(theta))
}

/// Cached eigendecomposition of a generator for repeated `exp(−iθX)`.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: EigenDecomposition,
}

impl Propagator {
    pub fn new(x: &ObservableMatrix) -> Result<Self> {
        Ok(Self {
            eig: eig_hermitian(x.matrix())?,
        })
    }

    pub fn unitary(&self, theta: f64) -> ComplexMatrix {
        self.eig
            .reconstruct_with(|l| C64::from_polar(1.0, -theta * l))
    }

    /// `exp(−iθX) v` in O(d²).
    pub fn apply(&self, theta: f64, v: &[C64]) -> Vec<C64> {
        let vecs = &self.eig.eigenvectors;
        let n = self.eig.dim();
        let mut coeffs = vec![ZERO; n];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = ZERO;
            for i in 0..n {
                acc += vecs[(i, k)].conj() * v[i];
            }
            *c = acc * C64::from_polar(1.0, -theta * self.eig.eigenvalues[k]);
        }
        (0..n)
            .map(|i| {
                vecs.row(i)
                    .iter()
                    .zip(&coeffs)
                    .fold(ZERO, |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_space::matrix::I;
    use std::f64::consts::PI;

    #[test]
    fn x0_entries_for_d3() {
        let s = SpaceSpec::fock(3, 1).unwrap();
        let x = quadrature(s, 0, 0.0).unwrap();
        let m = x.matrix();
        assert!((m[(0, 1)] - ONE).norm() < 1e-15);
        assert!((m[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!(m.is_hermitian(0.0));
    }

    #[test]
    fn d2_commutator_lowest_element() {
        let s = SpaceSpec::fock(2, 1).unwrap();
        let x = quadrature(s, 0, 0.0).unwrap();
        let p = quadrature(s, 0, -PI / 2.0).unwrap();
        let c = x.matrix().commutator(p.matrix());
        assert!((c[(0, 0)] - I * 2.0).norm() < 1e-14);
        // truncation corrupts the top diagonal element only
        assert!((c[(1, 1)] + I * 2.0).norm() < 1e-14);
    }

    #[test]
    fn parity_d4() {
        let s = SpaceSpec::fock(4, 1).unwrap();
        let p = fock_parity(s).unwrap();
        let expect = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 1.0, -1.0]);
        assert_eq!(p, expect);
    }

    #[test]
    fn canonical_commutator_on_lower_levels() {
        let d = 24;
        let s = SpaceSpec::fock(d, 1).unwrap();
        for &t in &[0.0, 0.4, 1.3, -2.2] {
            let a = quadrature(s, 0, t).unwrap();
            let b = quadrature(s, 0, t + PI / 2.0).unwrap();
            let c = a.matrix().commutator(b.matrix());
            for i in 0..d / 2 {
                for j in 0..d / 2 {
                    // X_ϑ with this convention: [X_ϑ, X_{ϑ+π/2}] = −2i.
                    let expect = if i == j { -I * 2.0 } else { ZERO };
                    assert!((c[(i, j)] - expect).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn pauli_z_for_single_spin() {
        let s = SpaceSpec::spin(1).unwrap();
        let x = spin_axis(s, [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(*x.matrix(), ComplexMatrix::from_real_diagonal(&[1.0, -1.0]));
    }

    #[test]
    fn spin_spectra() {
        let s = SpaceSpec::spin(2).unwrap();
        let e = eig_hermitian(spin_axis(s, [0.0, 0.0, 1.0]).unwrap().matrix()).unwrap();
        assert_eq!(e.eigenvalues, vec![-2.0, 0.0, 2.0]);
        let s8 = SpaceSpec::spin(8).unwrap();
        let axis = [0.6, 0.0, 0.8];
        let e = eig_hermitian(spin_axis(s8, axis).unwrap().matrix()).unwrap();
        assert!((e.eigenvalues[8] - 8.0).abs() < 1e-10);
    }

    #[test]
    fn spin_commutation() {
        for n in 1..10 {
            let [jx, jy, jz] = spin_matrices(SpaceSpec::spin(n).unwrap()).unwrap();
            let c = jx.commutator(&jy);
            assert!(c.max_abs_diff(&jz.scale(I)) < 1e-12);
        }
    }

    #[test]
    fn rejects_wrong_space_and_axis() {
        let f = SpaceSpec::fock(3, 1).unwrap();
        let s = SpaceSpec::spin(3).unwrap();
        assert!(spin_axis(f, [0.0, 0.0, 1.0]).is_err());
        assert!(quadrature(s, 0, 0.0).is_err());
        assert!(spin_axis(s, [1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn unitary_basics() {
        let s = SpaceSpec::spin(1).unwrap();
        let z = spin_axis(s, [0.0, 0.0, 1.0]).unwrap();
        let u0 = unitary_from_generator(&z, 0.0).unwrap();
        assert!(u0.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        let u = unitary_from_generator(&z, PI / 2.0).unwrap();
        let expect = ComplexMatrix::from_diagonal(&[-I, I]);
        assert!(u.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn displacement_of_vacuum() {
        let s = SpaceSpec::fock(60, 1).unwrap();
        let x = quadrature(s, 0, 0.0).unwrap();
        let prop = Propagator::new(&x).unwrap();
        let mut vac = vec![ZERO; 60];
        vac[0] = ONE;
        let v = prop.apply(0.3, &vac);
        // e^{−iθ(a+a†)} = D(−iθ): coherent amplitudes e^{−|β|²/2} β^n/√n!
        let beta = C64::new(0.0, -0.3);
        let mut amp = C64::new((-0.045f64).exp(), 0.0);
        for (n, z) in v.iter().enumerate().take(30) {
            if n > 0 {
                amp = amp * beta / (n as f64).sqrt();
            }
            assert!((z - amp).norm() < 1e-10);
        }
        let a = annihilation(s, 0).unwrap();
        let mean = crate::state_space::matrix::inner(&v, &a.apply(&v));
        assert!((mean - beta).norm() < 1e-6);
    }

    #[test]
    fn group_property_and_unitarity() {
        let s = SpaceSpec::fock(12, 1).unwrap();
        let x = quadrature(s, 0, 0.7).unwrap();
        let u1 = unitary_from_generator(&x, 0.2).unwrap();
        let u2 = unitary_from_generator(&x, -0.45).unwrap();
        let u12 = unitary_from_generator(&x, -0.25).unwrap();
        assert!(u1.matmul(&u2).max_abs_diff(&u12) < 1e-8);
        assert!(u1
            .adjoint()
            .matmul(&u1)
            .max_abs_diff(&ComplexMatrix::identity(12))
            < 1e-8);
    }

    #[test]
    fn two_mode_embedding() {
        let s = SpaceSpec::fock(3, 2).unwrap();
        let a1 = annihilation(s, 0).unwrap();
        let a2 = annihilation(s, 1).unwrap();
        // modes commute
        assert!(a1.commutator(&a2).max_abs() < 1e-15);
        // |1,0⟩ has index 3
        assert!((a1[(0, 3)] - ONE).norm() < 1e-15);
        assert!((a2[(0, 1)] - ONE).norm() < 1e-15);
        let par = fock_parity(s).unwrap();
        assert_eq!(par[(4, 4)].re, 1.0);
        assert_eq!(par[(3, 3)].re, -1.0);
    }
}
