//! Number-operator Hamiltonians with a designated equally-spaced
//! three-level block.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// `H = ε·diag(r, r+1, …, r+d−1)` on a truncated number basis, together
/// with the Fock index of a three-level block `(n_k, n_k+1, n_k+2)`.
///
/// The block is equally spaced by construction; the level label of the
/// block start is `k = r + n_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberHamiltonian {
    eps: f64,
    r: f64,
    dim: usize,
    block_start: usize,
}

impl NumberHamiltonian {
    pub fn new(eps: f64, r: f64, dim: usize, block_start: usize) -> Result<Self> {
        if !(eps.is_finite() && r.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Hamiltonian parameters".into()));
        }
        if block_start + 2 >= dim {
            return Err(Error::InvalidArgument(format!(
                "three-level block at {} does not fit in dimension {}",
                block_start, dim
            )));
        }
        Ok(Self { eps, r, dim, block_start })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_start(&self) -> usize {
        self.block_start
    }

    /// Level label of Fock index `n`: `r + n`.
    pub fn level(&self, n: usize) -> f64 {
        self.r + n as f64
    }

    /// Level label of the block start, `k = r + n_k`.
    pub fn level_k(&self) -> f64 {
        self.level(self.block_start)
    }

    /// Energy of Fock index `n`: `ε(r + n)`.
    pub fn energy(&self, n: usize) -> f64 {
        self.eps * self.level(n)
    }

    /// Dense matrix of `H`.
    pub fn matrix(&self) -> ComplexMatrix {
        let entries: Vec<f64> = (0..self.dim).map(|n| self.energy(n)).collect();
        ComplexMatrix::diag_real(&entries)
    }

    /// `W_a(t) = e^{−iaHt}`: diagonal unitary with entries `e^{−iaε(r+n)t}`.
    pub fn phase_evolution(&self, a: f64, t: f64) -> ComplexMatrix {
        let entries: Vec<C64> = (0..self.dim)
            .map(|n| C64::from_polar(1.0, -a * self.energy(n) * t))
            .collect();
        ComplexMatrix::diag(&entries)
    }
}
