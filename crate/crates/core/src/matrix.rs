//! Dense complex matrices and vectors on a truncated number basis.
//!
//! Everything here is value-semantic: operations return fresh matrices and
//! never alias their inputs across module boundaries.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tol;

/// Dense square complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag_real(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        m
    }

    /// Diagonal matrix from complex entries.
    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim * self.dim {
            out.data[i] = (self.data[i] + adj.data[i]) * 0.5;
        }
        out
    }

    /// Max-abs deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Max-abs deviation of `U U†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self * &self.adjoint();
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((prod[(i, j)] - expect).norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, v.dim()));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(ComplexVector::new(out))
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::DimensionMismatch(self.dim, other.dim))
        } else {
            Ok(())
        }
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix addition");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix subtraction");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[l * n + j];
                }
            }
        }
        out
    }
}

/// Dense complex vector.
#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexVector[")?;
        for z in &self.data {
            write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
        }
        write!(f, " ]")
    }
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Self {
        assert!(!data.is_empty(), "vector dimension must be positive");
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); dim])
    }

    /// Standard basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut v = Self::zeros(dim);
        v.data[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { data: self.data.iter().map(|z| z / n).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.data[i] * other.data[j].conj();
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

/// Which bracket `bracket` computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    Commutator,
    Anticommutator,
}

/// `AB − BA` or `AB + BA`.
pub fn bracket(a: &ComplexMatrix, b: &ComplexMatrix, kind: BracketKind) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    let ab = a * b;
    let ba = b * a;
    Ok(match kind {
        BracketKind::Commutator => &ab - &ba,
        BracketKind::Anticommutator => &ab + &ba,
    })
}

/// `U A U†`, rejecting `U` that is not unitary within [`tol::UNITARY_TOL`].
pub fn conjugate_unitary(u: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.check_same_dim(a)?;
    let defect = u.unitarity_defect();
    if defect > tol::UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok(&(u * a) * &u.adjoint())
}

/// `Tr(H ρⁿ)`, `n ≥ 1`.
pub fn trace_moment(h: &ComplexMatrix, rho: &ComplexMatrix, n: u32) -> Result<C64> {
    h.check_same_dim(rho)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "trace_moment requires n >= 1; use trace directly for n = 0".into(),
        ));
    }
    let mut power = rho.clone();
    for _ in 1..n {
        power = &power * rho;
    }
    Ok((h * &power).trace())
}

/// Diagnostic flags for a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityReport {
    pub hermitian: bool,
    pub psd: bool,
    pub trace_one: bool,
}

/// Checks Hermiticity, positive semidefiniteness and unit trace at
/// tolerance `tol`.
pub fn density_check(rho: &ComplexMatrix, tol: f64) -> DensityReport {
    let hermitian = rho.hermiticity_defect() <= tol;
    let psd = if hermitian {
        match crate::eig::eig_hermitian(rho) {
            Ok(eig) => eig.values.first().map(|&v| v >= -tol).unwrap_or(true),
            Err(_) => false,
        }
    } else {
        // Check the Hermitian part's spectrum; the Hermitian flag already failed.
        crate::eig::eig_hermitian(&rho.hermitian_part())
            .map(|e| e.values.first().map(|&v| v >= -tol).unwrap_or(true))
            .unwrap_or(false)
    };
    let trace_one = (rho.trace() - C64::new(1.0, 0.0)).norm() <= tol;
    DensityReport { hermitian, psd, trace_one }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::NumberHamiltonian;
    use crate::scenario::ScenarioParams;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_commutes() {
        let a = ComplexMatrix::diag(&[c(1.0, 2.0), c(-0.5, 0.3), c(0.0, 1.0)]);
        let id = ComplexMatrix::identity(3);
        let comm = bracket(&id, &a, BracketKind::Commutator).unwrap();
        assert!(comm.max_abs() < 1e-15);
    }

    #[test]
    fn diagonal_conjugation_of_matrix_unit() {
        // [N, |j⟩⟨l|] = (j − l)|j⟩⟨l| for diagonal N.
        let n = ComplexMatrix::diag_real(&[0.0, 1.0, 2.0, 3.0]);
        let (j, l) = (3usize, 1usize);
        let mut unit = ComplexMatrix::zeros(4);
        unit[(j, l)] = c(1.0, 0.0);
        let comm = bracket(&n, &unit, BracketKind::Commutator).unwrap();
        let expect = unit.scale_re((j - l) as f64);
        assert!((&comm - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn scenario_rho0_is_projector_like_with_a_five() {
        // [H, ρ(0)²] = 5 [H, ρ(0)].
        let params = ScenarioParams::default();
        let h = params.hamiltonian().unwrap().matrix();
        let rho0 = params.rho0();
        let rho0_sq = &rho0 * &rho0;
        let lhs = bracket(&h, &rho0_sq, BracketKind::Commutator).unwrap();
        let rhs = bracket(&h, &rho0, BracketKind::Commutator).unwrap().scale_re(5.0);
        assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn bracket_rejects_dimension_mismatch() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(bracket(&a, &b, BracketKind::Commutator).is_err());
    }

    #[test]
    fn conjugate_by_identity_is_identity_map() {
        let a = ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.5)]);
        let u = ComplexMatrix::identity(2);
        let out = conjugate_unitary(&u, &a).unwrap();
        assert!((&out - &a).max_abs() < 1e-15);
    }

    #[test]
    fn conjugate_rejects_non_unitary() {
        let u = ComplexMatrix::diag_real(&[2.0, 1.0]);
        let a = ComplexMatrix::identity(2);
        assert!(matches!(conjugate_unitary(&u, &a), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn trace_moment_of_diagonal_density() {
        let n = ComplexMatrix::diag_real(&[0.0, 1.0, 2.0]);
        let p = ComplexMatrix::diag_real(&[0.5, 0.3, 0.2]);
        let m = trace_moment(&n, &p, 1).unwrap();
        assert!((m - c(0.3 + 0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_moment_rejects_n_zero() {
        let a = ComplexMatrix::identity(2);
        assert!(trace_moment(&a, &a, 0).is_err());
    }

    #[test]
    fn block_number_moment_of_scenario_rho0() {
        // Tr(N ρ(0)) = (15+√5)(k+1)/2 with block level labels k, k+1, k+2.
        let params = ScenarioParams::default();
        let ham = params.hamiltonian().unwrap();
        let n_mat = NumberHamiltonian::new(1.0, ham.r(), ham.dim(), ham.block_start())
            .unwrap()
            .matrix();
        let rho0 = params.rho0();
        let k = params.level_k();
        let expect = (15.0 + 5f64.sqrt()) * (k + 1.0) / 2.0;
        let m = trace_moment(&n_mat, &rho0, 1).unwrap();
        assert!((m.re - expect).abs() < 1e-12);
        assert!(m.im.abs() < crate::tol::REAL_TOL);
    }

    #[test]
    fn density_check_scenario() {
        let params = ScenarioParams::default();
        let rho0 = params.rho0();
        let report = density_check(&rho0, 1e-10);
        assert!(report.hermitian);
        assert!(report.psd);
        assert!(!report.trace_one); // Tr ρ(0) = (15+√5)/2

        let trace = rho0.trace().re;
        assert!((trace - (15.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);

        let normalized = rho0.scale_re(1.0 / trace);
        let report = density_check(&normalized, 1e-10);
        assert!(report.hermitian && report.psd && report.trace_one);
    }

    #[test]
    fn density_check_zero_matrix() {
        let z = ComplexMatrix::zeros(3);
        let report = density_check(&z, 1e-10);
        assert!(report.psd);
        assert!(!report.trace_one);
    }
}
