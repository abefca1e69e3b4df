//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.
//!
//! Deterministic sweep order (row-major over the upper triangle), so the
//! decomposition is bit-reproducible for a given input.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol;

/// Eigendecomposition of a Hermitian matrix: `A = V Λ V†` with real
/// eigenvalues in ascending order and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Rejects inputs whose Hermiticity defect exceeds [`tol::HERMITIAN_TOL`]
/// relative to the matrix scale.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEig> {
    let n = a.dim();
    let scale = a.frobenius_norm().max(1.0);
    let defect = a.hermiticity_defect();
    if defect > tol::HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect));
    }

    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let target = tol::JACOBI_OFF_TOL * scale;

    for sweep in 0..=tol::JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= target {
            return Ok(sorted(m, v));
        }
        if sweep == tol::JACOBI_MAX_SWEEPS {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    Err(Error::NoConvergence(tol::JACOBI_MAX_SWEEPS))
}

/// One complex Jacobi rotation zeroing `m[(p, q)]`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let phase = apq / abs;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = m.dim();
    // Right multiplication by J: columns p, q.
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = mip * c - miq * s * phase.conj();
        m[(i, q)] = mip * s * phase + miq * c;
    }
    // Left multiplication by J†: rows p, q.
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = mpj * c - mqj * s * phase;
        m[(q, j)] = mpj * s * phase.conj() + mqj * c;
    }
    // Clean the targeted element and keep the diagonal exactly real.
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c - viq * s * phase.conj();
        v[(i, q)] = vip * s * phase + viq * c;
    }
}

fn sorted(m: ComplexMatrix, v: ComplexMatrix) -> HermitianEig {
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap().then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    HermitianEig { values, vectors }
}
