//! Density matrices, stored either densely or as a low-rank mixture
//! `ρ = Σ_ab C_ab |v_a⟩⟨v_b|` over a handful of (not necessarily orthogonal)
//! vectors. The mixture form keeps cat states on large two-mode spaces
//! cheap: nothing of size d² is ever formed for them.

use super::eigen::eig_hermitian;
use super::matrix::{inner, norm_sqr, ComplexMatrix, C64, ZERO};
use super::operators::Propagator;
use super::{SpaceSpec, TAIL_LEVELS, TAIL_TOL};
use crate::error::{Error, Result};

/// Validation tolerance for Hermiticity, trace and positivity.
pub const STATE_TOL: f64 = 1e-10;

/// Eigenvalues at or below this are treated as the kernel of ρ.
pub const SUPPORT_EPS: f64 = 1e-13;

#[derive(Debug, Clone)]
enum Repr {
    Dense(ComplexMatrix),
    Mixture {
        vectors: Vec<Vec<C64>>,
        coeffs: ComplexMatrix,
    },
}

/// One eigenpair of ρ with nonzero weight.
#[derive(Debug, Clone)]
pub struct SpectralTerm {
    pub weight: f64,
    pub vector: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    space: SpaceSpec,
    repr: Repr,
}

impl DensityMatrix {
    /// Validates and wraps a dense matrix.
    pub fn from_matrix(space: SpaceSpec, m: ComplexMatrix) -> Result<Self> {
        if m.dim() != space.dimension() {
            return Err(Error::DimensionMismatch {
                expected: space.dimension(),
                got: m.dim(),
            });
        }
        let defect = m.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {defect:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} ≠ 1")));
        }
        let rho = Self {
            space,
            repr: Repr::Dense(m.hermitian_part()),
        };
        let min = eig_hermitian(rho.dense_ref().unwrap())?.eigenvalues[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(rho)
    }

    /// Pure state |ψ⟩⟨ψ|; `psi` is normalized here.
    pub fn pure(space: SpaceSpec, psi: Vec<C64>) -> Result<Self> {
        Self::mixture(space, vec![psi], ComplexMatrix::identity(1))
    }

    /// `ρ ∝ Σ_ab C_ab |v_a⟩⟨v_b|`, normalized to unit trace.
    pub fn mixture(space: SpaceSpec, vectors: Vec<Vec<C64>>, coeffs: ComplexMatrix) -> Result<Self> {
        if vectors.is_empty() || coeffs.dim() != vectors.len() {
            return Err(Error::InvalidState(
                "coefficient matrix does not match the vector list".into(),
            ));
        }
        let d = space.dimension();
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
        if coeffs.hermiticity_defect() > STATE_TOL * coeffs.max_abs().max(1.0) {
            return Err(Error::InvalidState("mixture coefficients not Hermitian".into()));
        }
        let k = vectors.len();
        let mut tr = ZERO;
        for a in 0..k {
            for b in 0..k {
                tr += coeffs[(a, b)] * inner(&vectors[b], &vectors[a]);
            }
        }
        if !(tr.re > 0.0) || !tr.re.is_finite() {
            return Err(Error::InvalidState(format!("non-positive trace {tr}")));
        }
        let rho = Self {
            space,
            repr: Repr::Mixture {
                vectors,
                coeffs: coeffs.hermitian_part().scale_real(1.0 / tr.re),
            },
        };
        let min = rho.min_eigenvalue()?;
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(rho)
    }

    /// Convex combination `p ρ + (1 − p) σ`.
    pub fn convex(&self, other: &Self, p: f64) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("mixing weight {p} ∉ [0,1]")));
        }
        let m = &self.to_dense().scale_real(p) + &other.to_dense().scale_real(1.0 - p);
        Self::from_matrix(self.space, m)
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dimension()
    }

    fn dense_ref(&self) -> Option<&ComplexMatrix> {
        match &self.repr {
            Repr::Dense(m) => Some(m),
            Repr::Mixture { .. } => None,
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        match &self.repr {
            Repr::Dense(m) => m.clone(),
            Repr::Mixture { vectors, coeffs } => {
                let d = self.dim();
                let mut m = ComplexMatrix::zeros(d);
                for (a, va) in vectors.iter().enumerate() {
                    for (b, vb) in vectors.iter().enumerate() {
                        let c = coeffs[(a, b)];
                        if c == ZERO {
                            continue;
                        }
                        for i in 0..d {
                            let ci = c * va[i];
                            if ci == ZERO {
                                continue;
                            }
                            for j in 0..d {
                                m[(i, j)] += ci * vb[j].conj();
                            }
                        }
                    }
                }
                m
            }
        }
    }

    /// Eigenpairs with weight above [`SUPPORT_EPS`], largest first.
    pub fn spectrum(&self) -> Result<Vec<SpectralTerm>> {
        let mut terms = self.full_spectrum()?;
        terms.retain(|t| t.weight > SUPPORT_EPS);
        Ok(terms)
    }

    fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .full_spectrum()?
            .iter()
            .map(|t| t.weight)
            .fold(f64::INFINITY, f64::min))
    }

    fn full_spectrum(&self) -> Result<Vec<SpectralTerm>> {
        let mut terms = match &self.repr {
            Repr::Dense(m) => {
                let eig = eig_hermitian(m)?;
                (0..eig.dim())
                    .map(|k| SpectralTerm {
                        weight: eig.eigenvalues[k],
                        vector: eig.vector(k),
                    })
                    .collect::<Vec<_>>()
            }
            Repr::Mixture { vectors, coeffs } => mixture_spectrum(vectors, coeffs)?,
        };
        terms.sort_by(|a, b| b.weight.total_cmp(&a.weight));
        Ok(terms)
    }

    /// `Tr(ρ O)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        assert_eq!(op.dim(), self.dim());
        match &self.repr {
            Repr::Dense(m) => m.trace_product(op),
            Repr::Mixture { vectors, coeffs } => {
                let applied: Vec<Vec<C64>> = vectors.iter().map(|v| op.apply(v)).collect();
                let mut acc = ZERO;
                for (a, oa) in applied.iter().enumerate() {
                    for (b, vb) in vectors.iter().enumerate() {
                        // Tr(|v_a⟩⟨v_b| O) = ⟨v_b|O|v_a⟩
                        acc += coeffs[(a, b)] * inner(vb, oa);
                    }
                }
                acc
            }
        }
    }

    /// `Var_ρ(X) = ⟨X²⟩ − ⟨X⟩²`, with `X²` applied as `X(Xv)`.
    pub fn variance(&self, x: &ComplexMatrix) -> f64 {
        let mean = self.expectation(x).re;
        let second = match &self.repr {
            Repr::Dense(m) => m.trace_product(&x.matmul(x)).re,
            Repr::Mixture { vectors, coeffs } => {
                let applied: Vec<Vec<C64>> = vectors.iter().map(|v| x.apply(v)).collect();
                let mut acc = ZERO;
                for (a, xa) in applied.iter().enumerate() {
                    for (b, xb) in applied.iter().enumerate() {
                        acc += coeffs[(a, b)] * inner(xb, xa);
                    }
                }
                acc.re
            }
        };
        second - mean * mean
    }

    /// Diagonal of ρ in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(m) => m.diagonal().iter().map(|z| z.re).collect(),
            Repr::Mixture { vectors, coeffs } => {
                let d = self.dim();
                let mut pops = vec![0.0; d];
                for (a, va) in vectors.iter().enumerate() {
                    for (b, vb) in vectors.iter().enumerate() {
                        let c = coeffs[(a, b)];
                        for (i, p) in pops.iter_mut().enumerate() {
                            *p += (c * va[i] * vb[i].conj()).re;
                        }
                    }
                }
                pops
            }
        }
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> Result<f64> {
        Ok(self
            .spectrum()?
            .iter()
            .map(|t| t.weight * t.weight)
            .sum())
    }

    /// `U ρ U†`.
    pub fn transformed(&self, u: &ComplexMatrix) -> Self {
        let repr = match &self.repr {
            Repr::Dense(m) => Repr::Dense(u.matmul(m).matmul(&u.adjoint()).hermitian_part()),
            Repr::Mixture { vectors, coeffs } => Repr::Mixture {
                vectors: vectors.iter().map(|v| u.apply(v)).collect(),
                coeffs: coeffs.clone(),
            },
        };
        Self {
            space: self.space,
            repr,
        }
    }

    /// `e^{−iθX} ρ e^{iθX}`.
    pub fn evolved(&self, prop: &Propagator, theta: f64) -> Self {
        match &self.repr {
            Repr::Dense(_) => self.transformed(&prop.unitary(theta)),
            Repr::Mixture { vectors, coeffs } => Self {
                space: self.space,
                repr: Repr::Mixture {
                    vectors: vectors.iter().map(|v| prop.apply(theta, v)).collect(),
                    coeffs: coeffs.clone(),
                },
            },
        }
    }

    /// Population in the top `levels` Fock levels of any mode. Zero for spins.
    pub fn tail_mass(&self, levels: usize) -> f64 {
        let SpaceSpec::Fock { cutoff, modes } = self.space else {
            return 0.0;
        };
        let start = cutoff.saturating_sub(levels);
        self.populations()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let (n1, n2) = if modes == 1 { (*i, 0) } else { (i / cutoff, i % cutoff) };
                n1 >= start || n2 >= start
            })
            .map(|(_, p)| p.max(0.0))
            .sum()
    }

    /// Fails when the top Fock levels carry more than [`TAIL_TOL`].
    pub fn check_truncation(&self) -> Result<()> {
        if let SpaceSpec::Fock { cutoff, .. } = self.space {
            let tail = self.tail_mass(TAIL_LEVELS);
            if tail >= TAIL_TOL {
                return Err(Error::Truncation { cutoff, tail });
            }
        }
        Ok(())
    }
}

fn mixture_spectrum(vectors: &[Vec<C64>], coeffs: &ComplexMatrix) -> Result<Vec<SpectralTerm>> {
    let k = vectors.len();
    let gram = ComplexMatrix::from_fn(k, |a, b| inner(&vectors[a], &vectors[b]));
    let geig = eig_hermitian(&gram.hermitian_part())?;
    let gmax = geig.eigenvalues[k - 1];
    let keep: Vec<usize> = (0..k)
        .filter(|&m| geig.eigenvalues[m] > 1e-14 * gmax)
        .collect();
    let r = keep.len();
    let d = vectors[0].len();
    // Orthonormal basis u_m = Σ_a w_m[a] v_a / √g_m of the span.
    let basis: Vec<Vec<C64>> = keep
        .iter()
        .map(|&m| {
            let g = geig.eigenvalues[m].sqrt();
            let mut u = vec![ZERO; d];
            for (a, va) in vectors.iter().enumerate() {
                let w = geig.eigenvectors[(a, m)] / g;
                for (ui, vi) in u.iter_mut().zip(va) {
                    *ui += w * vi;
                }
            }
            u
        })
        .collect();
    // T_ma = ⟨u_m|v_a⟩ = √g_m conj(w_m[a]); R = T C T†.
    let t: Vec<Vec<C64>> = keep
        .iter()
        .map(|&m| {
            let g = geig.eigenvalues[m].sqrt();
            (0..k).map(|a| geig.eigenvectors[(a, m)].conj() * g).collect()
        })
        .collect();
    let reduced = ComplexMatrix::from_fn(r, |m, n| {
        let mut acc = ZERO;
        for a in 0..k {
            for b in 0..k {
                acc += t[m][a] * coeffs[(a, b)] * t[n][b].conj();
            }
        }
        acc
    });
    let reig = eig_hermitian(&reduced.hermitian_part())?;
    Ok((0..r)
        .map(|j| {
            let mut v = vec![ZERO; d];
            for (m, u) in basis.iter().enumerate() {
                let y = reig.eigenvectors[(m, j)];
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi += y * ui;
                }
            }
            let n = norm_sqr(&v).sqrt();
            v.iter_mut().for_each(|z| *z /= n);
            SpectralTerm {
                weight: reig.eigenvalues[j],
                vector: v,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_space::matrix::ONE;

    fn basis(d: usize, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; d];
        v[i] = ONE;
        v
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let s = SpaceSpec::spin(1).unwrap();
        let not_unit = ComplexMatrix::from_real_diagonal(&[0.7, 0.7]);
        assert!(DensityMatrix::from_matrix(s, not_unit).is_err());
        let negative = ComplexMatrix::from_real_diagonal(&[1.2, -0.2]);
        assert!(DensityMatrix::from_matrix(s, negative).is_err());
        let ok = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        assert!(DensityMatrix::from_matrix(s, ok).is_ok());
    }

    #[test]
    fn mixture_matches_dense() {
        let s = SpaceSpec::fock(4, 1).unwrap();
        let v0 = basis(4, 0);
        let mut v1 = basis(4, 1);
        v1[2] = C64::new(0.0, 1.0);
        let c = ComplexMatrix::from_row_major(vec![
            C64::new(0.5, 0.0),
            C64::new(0.1, 0.05),
            C64::new(0.1, -0.05),
            C64::new(0.25, 0.0),
        ])
        .unwrap();
        let rho = DensityMatrix::mixture(s, vec![v0, v1], c).unwrap();
        let dense = DensityMatrix::from_matrix(s, rho.to_dense()).unwrap();
        let a: Vec<f64> = rho.spectrum().unwrap().iter().map(|t| t.weight).collect();
        let b: Vec<f64> = dense.spectrum().unwrap().iter().map(|t| t.weight).collect();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let op = ComplexMatrix::from_fn(4, |i, j| C64::new((i + j) as f64, i as f64 - j as f64));
        assert!((rho.expectation(&op) - dense.expectation(&op)).norm() < 1e-12);
        assert!((rho.variance(&op) - dense.variance(&op)).abs() < 1e-12);
        for (p, q) in rho.populations().iter().zip(dense.populations()) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_mass_flags_truncation() {
        let s = SpaceSpec::fock(8, 1).unwrap();
        let rho = DensityMatrix::pure(s, basis(8, 6)).unwrap();
        assert!(rho.check_truncation().is_err());
        let ok = DensityMatrix::pure(s, basis(8, 2)).unwrap();
        assert!(ok.check_truncation().is_ok());
    }
}
