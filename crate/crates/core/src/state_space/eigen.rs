//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first strips the phase of the pivot element `a_pq` with a
//! diagonal unitary, then applies the real symmetric Jacobi rotation that
//! annihilates the (now real) pivot. The accumulated product of the
//! rotations is the unitary matrix of eigenvectors.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Tolerance on the Hermiticity of the input, relative to its largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Copy of column `k`.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// V f(Λ) V†
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).fold(ZERO, |acc, k| acc + v[(i, k)] * fl[k] * v[(j, k)].conj())
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| C64::new(l, 0.0))
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// Output ordering is deterministic: ascending eigenvalues, and each
/// eigenvector is rotated so its largest-magnitude component (first one on
/// ties) is real and positive.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot diagonalize a 0×0 matrix".into()));
    }
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian { deviation: defect });
    }

    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let mut converged = n == 1;
    for sweep in 0..MAX_SWEEPS {
        let off: f64 = off_diagonal_norm_sqr(&a);
        if off.sqrt() <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Late sweeps: drop pivots that are below the diagonal's resolution.
                if sweep > 3 && app.abs() + 100.0 * mag == app.abs() && aqq.abs() + 100.0 * mag == aqq.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // W = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
                let wpp = C64::new(c, 0.0);
                let wpq = C64::new(s, 0.0);
                let wqp = -phase.conj() * s;
                let wqq = phase.conj() * c;
                rotate(&mut a, &mut v, p, q, [wpp, wpq, wqp, wqq]);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm_sqr(&a).sqrt();
        if off > 1e-12 * scale {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vecs = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let mut column: Vec<C64> = (0..n).map(|i| v[(i, k)]).collect();
        fix_phase(&mut column);
        for (i, z) in column.into_iter().enumerate() {
            vecs[(i, col)] = z;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vecs,
    })
}

fn off_diagonal_norm_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += a[(i, j)].norm_sqr();
            }
        }
    }
    off
}

/// A ← W† A W and V ← V W for W acting on the (p, q) plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, w: [C64; 4]) {
    let [wpp, wpq, wqp, wqq] = w;
    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * wpp + akq * wqp;
        a[(k, q)] = akp * wpq + akq * wqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = wpp.conj() * apk + wqp.conj() * aqk;
        a[(q, k)] = wpq.conj() * apk + wqq.conj() * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * wpp + vkq * wqp;
        v[(k, q)] = vkp * wpq + vkq * wqq;
    }
}

fn fix_phase(column: &mut [C64]) {
    let max = column.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = column
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-9))
        .unwrap_or(0);
    let phase = column[pivot] / column[pivot].norm();
    let rot = phase.conj();
    for z in column.iter_mut() {
        *z *= rot;
    }
    column[pivot] = C64::new(column[pivot].re, 0.0);
}

/// Top eigenpair of a small real symmetric matrix, via the Hermitian solver.
pub fn real_symmetric_top(m: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let n = m.len();
    let cm = ComplexMatrix::from_fn(n, |i, j| C64::new(m[i][j], 0.0));
    let eig = eig_hermitian(&cm)?;
    let top = eig.vector(n - 1).iter().map(|z| z.re).collect();
    Ok((eig.eigenvalues[n - 1], top))
}

/// Ascending eigenvalues and matching eigenvectors of a small real
/// symmetric matrix.
pub fn real_symmetric_eigen(m: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = m.len();
    let cm = ComplexMatrix::from_fn(n, |i, j| C64::new(m[i][j], 0.0));
    let eig = eig_hermitian(&cm)?;
    let vecs = (0..n).map(|k| eig.vector(k).iter().map(|z| z.re).collect()).collect();
    Ok((eig.eigenvalues, vecs))
}

/// Eigenvalues of a small real symmetric matrix.
pub fn real_symmetric_eigenvalues(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = m.len();
    let cm = ComplexMatrix::from_fn(n, |i, j| C64::new(m[i][j], 0.0));
    Ok(eig_hermitian(&cm)?.eigenvalues)
}

#[allow(dead_code)]
fn identity_defect(v: &ComplexMatrix) -> f64 {
    v.adjoint().matmul(v).max_abs_diff(&ComplexMatrix::identity(v.dim()))
}
