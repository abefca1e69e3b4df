//! Physical readouts from a density matrix in the truncated number basis:
//! position expectation, real-space probability density on a grid, and
//! spectra along a trajectory.

use crate::eig::eig_hermitian;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol;

/// Largest Fock index for which the eigenfunction recurrence stays
/// well-scaled in double precision.
pub const MAX_HERMITE_N: usize = 200;

/// Half-width of the reliable evaluation window for [`hermite_psi`].
pub const MAX_HERMITE_X: f64 = 20.0;

/// `⟨x⟩ = √2 Σ_n √(n+1) Re ρ_{n+1,n}` in oscillator units.
pub fn mean_x(rho: &ComplexMatrix) -> f64 {
    let n = rho.dim();
    let mut acc = 0.0;
    for m in 0..n.saturating_sub(1) {
        acc += ((m + 1) as f64).sqrt() * rho[(m + 1, m)].re;
    }
    2f64.sqrt() * acc
}

/// Harmonic-oscillator eigenfunction `ψ_n(x)` (unit mass/frequency),
/// evaluated by the stable two-term recurrence
/// `ψ_{n+1} = √(2/(n+1)) x ψ_n − √(n/(n+1)) ψ_{n−1}`.
pub fn hermite_psi(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_N {
        return Err(Error::InvalidArgument(format!(
            "oscillator eigenfunction order {n} exceeds supported maximum {MAX_HERMITE_N}"
        )));
    }
    if !x.is_finite() || x.abs() > MAX_HERMITE_X {
        return Err(Error::InvalidArgument(format!(
            "evaluation point {x} outside supported window |x| <= {MAX_HERMITE_X}"
        )));
    }
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return Ok(psi0);
    }
    let mut prev = psi0;
    let mut cur = 2f64.sqrt() * x * psi0;
    for m in 1..n {
        let mf = m as f64;
        let next = (2.0 / (mf + 1.0)).sqrt() * x * cur - (mf / (mf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Probability density `Σ_{mn} ρ_{mn} ψ_m(x) ψ_n(x)`; the imaginary part
/// cancels for Hermitian `ρ` and is discarded.
pub fn position_density(rho: &ComplexMatrix, x: f64) -> Result<f64> {
    let dim = rho.dim();
    if dim > MAX_HERMITE_N + 1 {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} exceeds eigenfunction support ({})",
            MAX_HERMITE_N + 1
        )));
    }
    let basis: Vec<f64> = (0..dim).map(|n| hermite_psi(n, x)).collect::<Result<_>>()?;
    let mut acc = 0.0;
    for m in 0..dim {
        // Diagonal plus twice the real part of the upper triangle.
        acc += rho[(m, m)].re * basis[m] * basis[m];
        for n in (m + 1)..dim {
            acc += 2.0 * rho[(m, n)].re * basis[m] * basis[n];
        }
    }
    Ok(acc)
}

/// A sampled space-time probability density `|ψ|²`-style surface.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub t_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// `values[i][j]` is the density at `(t_grid[i], x_grid[j])`.
    pub values: Vec<Vec<f64>>,
    /// Largest negative excursion that was clamped to zero.
    pub max_clamp: f64,
}

/// Evaluates the position density of `rho_at(t)` over a rectangular grid,
/// clamping the tiny negative values that truncation noise produces.
pub fn density_grid<F>(rho_at: F, t_grid: &[f64], x_grid: &[f64]) -> Result<DensityGrid>
where
    F: Fn(f64) -> ComplexMatrix,
{
    let mut values = Vec::with_capacity(t_grid.len());
    let mut max_clamp = 0.0f64;
    for &t in t_grid {
        let rho = rho_at(t);
        let mut row = Vec::with_capacity(x_grid.len());
        for &x in x_grid {
            let mut d = position_density(&rho, x)?;
            if d < 0.0 {
                max_clamp = max_clamp.max(-d);
                if -d > tol::DENSITY_CLAMP_TOL * rho.trace().re.abs().max(1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "density {d:.3e} at (t={t}, x={x}) is negative beyond truncation noise"
                    )));
                }
                d = 0.0;
            }
            row.push(d);
        }
        values.push(row);
    }
    Ok(DensityGrid { t_grid: t_grid.to_vec(), x_grid: x_grid.to_vec(), values, max_clamp })
}

/// Ascending eigenvalues of `rho_at(t)` for each grid time.
pub fn spectrum_trajectory<F>(rho_at: F, t_grid: &[f64]) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> ComplexMatrix,
{
    t_grid.iter().map(|&t| Ok(eig_hermitian(&rho_at(t))?.values)).collect()
}

/// Composite Simpson rule on a uniform grid; requires an odd sample count.
pub fn simpson_uniform(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "Simpson rule needs an odd sample count >= 3, got {n}"
        )));
    }
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * h / 3.0)
}
