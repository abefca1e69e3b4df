//! Right-hand sides and fixed-step RK4 integration for the three
//! evolution equations, plus residual checks and solution combinators.
//!
//! The integrator is the independent numerical oracle: closed forms are
//! always cross-checked against trajectories produced here.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::{bracket, BracketKind, ComplexMatrix, ComplexVector};
use crate::tol;

const MAX_STEPS: f64 = 1e7;

/// `−i[H, ρ²]`.
pub fn nonlinear_rhs(h: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rho_sq = rho * rho;
    Ok(bracket(h, &rho_sq, BracketKind::Commutator)?.scale(C64::new(0.0, -1.0)))
}

/// `−i[h(t), ρ]`.
pub fn linear_rhs(h: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(bracket(h, rho, BracketKind::Commutator)?.scale(C64::new(0.0, -1.0)))
}

/// `−i(Hρ + ρH − μH²)ψ` — the time half of the Lax pair.
pub fn lax_rhs(
    h: &ComplexMatrix,
    rho: &ComplexMatrix,
    mu: C64,
    psi: &ComplexVector,
) -> Result<ComplexVector> {
    let anticomm = bracket(h, rho, BracketKind::Anticommutator)?;
    let h_sq = h * h;
    let gen = &anticomm - &h_sq.scale(mu);
    Ok(gen.apply(psi)?.scale(C64::new(0.0, -1.0)))
}

/// Time-stamped matrix samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct MatrixTrajectory {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub samples: Vec<(f64, ComplexMatrix)>,
    /// Largest per-step Hermiticity re-symmetrization delta observed.
    pub max_symmetrization_delta: f64,
}

/// Time-stamped vector samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct VectorTrajectory {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub samples: Vec<(f64, ComplexVector)>,
}

fn step_plan(t0: f64, t1: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    let span = (t1 - t0).abs();
    if span / dt > MAX_STEPS {
        return Err(Error::InvalidArgument("too many integration steps".into()));
    }
    let n = (span / dt).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64; // signed; |h| <= dt
    Ok((n, h))
}

fn rk4_matrix_step<F>(rhs: &F, t: f64, y: &ComplexMatrix, h: f64) -> Result<ComplexMatrix>
where
    F: Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    let half = C64::new(h / 2.0, 0.0);
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + h / 2.0, &(y + &k1.scale(half)))?;
    let k3 = rhs(t + h / 2.0, &(y + &k2.scale(half)))?;
    let k4 = rhs(t + h, &(y + &k3.scale(C64::new(h, 0.0))))?;
    let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_re(2.0);
    Ok(y + &incr.scale_re(h / 6.0))
}

/// Classical RK4 over `[t0, t1]` (either direction) with Hermiticity
/// re-symmetrization after every step. Calls `observe` at `t0` and after
/// each step.
pub fn integrate_matrix_with<F, O>(
    rhs: F,
    rho0: &ComplexMatrix,
    t0: f64,
    t1: f64,
    dt: f64,
    mut observe: O,
) -> Result<f64>
where
    F: Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
    O: FnMut(usize, f64, &ComplexMatrix),
{
    let (n, h) = step_plan(t0, t1, dt)?;
    let mut y = rho0.clone();
    let mut max_delta = 0.0f64;
    observe(0, t0, &y);
    for step in 0..n {
        let t = t0 + step as f64 * h;
        y = rk4_matrix_step(&rhs, t, &y, h)?;
        if !y.is_finite() {
            return Err(Error::NonFinite { step });
        }
        let sym = y.hermitian_part();
        max_delta = max_delta.max((&y - &sym).max_abs());
        y = sym;
        observe(step + 1, t0 + (step + 1) as f64 * h, &y);
    }
    Ok(max_delta)
}

/// As [`integrate_matrix_with`] but collecting a trajectory, keeping every
/// `record_every`-th sample (the endpoints always included).
pub fn integrate_matrix<F>(
    rhs: F,
    rho0: &ComplexMatrix,
    t0: f64,
    t1: f64,
    dt: f64,
    record_every: usize,
) -> Result<MatrixTrajectory>
where
    F: Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    let stride = record_every.max(1);
    let (n, _) = step_plan(t0, t1, dt)?;
    let mut samples = Vec::with_capacity(n / stride + 2);
    let max_delta = integrate_matrix_with(rhs, rho0, t0, t1, dt, |step, t, y| {
        if step % stride == 0 || step == n {
            samples.push((t, y.clone()));
        }
    })?;
    Ok(MatrixTrajectory { t0, t1, dt, samples, max_symmetrization_delta: max_delta })
}

/// RK4 for vector states; renormalizes after every step when `renormalize`
/// is set (the Lax generator is non-normal, so the raw norm drifts).
pub fn integrate_vector_with<F, O>(
    rhs: F,
    psi0: &ComplexVector,
    t0: f64,
    t1: f64,
    dt: f64,
    renormalize: bool,
    mut observe: O,
) -> Result<()>
where
    F: Fn(f64, &ComplexVector) -> Result<ComplexVector>,
    O: FnMut(usize, f64, &ComplexVector),
{
    let (n, h) = step_plan(t0, t1, dt)?;
    let half = C64::new(h / 2.0, 0.0);
    let full = C64::new(h, 0.0);
    let mut y = psi0.clone();
    observe(0, t0, &y);
    for step in 0..n {
        let t = t0 + step as f64 * h;
        let k1 = rhs(t, &y)?;
        let k2 = rhs(t + h / 2.0, &y.add(&k1.scale(half)))?;
        let k3 = rhs(t + h / 2.0, &y.add(&k2.scale(half)))?;
        let k4 = rhs(t + h, &y.add(&k3.scale(full)))?;
        let incr = k1.add(&k4).add(&k2.add(&k3).scale(C64::new(2.0, 0.0)));
        y = y.add(&incr.scale(C64::new(h / 6.0, 0.0)));
        if !y.is_finite() {
            return Err(Error::NonFinite { step });
        }
        if renormalize {
            y = y.normalized();
        }
        observe(step + 1, t0 + (step + 1) as f64 * h, &y);
    }
    Ok(())
}

/// Max centered-difference residual `‖ρ̇ − rhs(t, ρ)‖_F` over interior
/// samples of a uniformly sampled trajectory.
pub fn vne_residual<F>(traj: &MatrixTrajectory, rhs: F) -> Result<f64>
where
    F: Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix>,
{
    let s = &traj.samples;
    if s.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 samples for centered differences".into()));
    }
    let mut worst = 0.0f64;
    for j in 1..s.len() - 1 {
        let h = s[j + 1].0 - s[j - 1].0;
        let deriv = (&s[j + 1].1 - &s[j - 1].1).scale_re(1.0 / h);
        let f = rhs(s[j].0, &s[j].1)?;
        worst = worst.max((&deriv - &f).frobenius_norm());
    }
    Ok(worst)
}

/// Result of checking the two algebraic solution-class conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionClassReport {
    /// `[H, ρ² − aρ] = 0`: conjugation by `e^{−iaHt}` solves the flow.
    pub is_projector_like: bool,
    /// `ρ² − aρ = 0`.
    pub is_algebraic: bool,
    pub a: f64,
}

pub fn classify_solution(
    rho0: &ComplexMatrix,
    h: &ComplexMatrix,
    a: f64,
    tol: f64,
) -> Result<SolutionClassReport> {
    let rho_sq = rho0 * rho0;
    let diff = &rho_sq - &rho0.scale_re(a);
    let is_algebraic = diff.max_abs() <= tol;
    let comm = bracket(h, &diff, BracketKind::Commutator)?;
    // The algebraic condition implies the commutator one exactly.
    let is_projector_like = is_algebraic || comm.max_abs() <= tol;
    Ok(SolutionClassReport { is_projector_like, is_algebraic, a })
}

/// A time-dependent matrix together with its analytic time derivative.
#[derive(Clone)]
pub struct MatrixFlow {
    value: Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>,
}

impl MatrixFlow {
    pub fn new(
        value: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
        derivative: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), derivative: Arc::new(derivative) }
    }

    pub fn value(&self, t: f64) -> ComplexMatrix {
        (self.value)(t)
    }

    pub fn derivative(&self, t: f64) -> ComplexMatrix {
        (self.derivative)(t)
    }
}

/// `t ↦ c·ρ(c·t)`; maps solutions of the nonlinear flow to solutions.
pub fn rescale_solution(flow: &MatrixFlow, c: f64) -> Result<MatrixFlow> {
    if c == 0.0 {
        return Err(Error::InvalidArgument("rescale factor must be nonzero".into()));
    }
    let fv = flow.clone();
    let fd = flow.clone();
    Ok(MatrixFlow::new(
        move |t| fv.value(c * t).scale_re(c),
        move |t| fd.derivative(c * t).scale_re(c * c),
    ))
}

/// `ρ(t) = Σ_k p_k ρ_k(p_k t)` for solutions with pairwise disjoint
/// supports (checked at `t = 0`).
pub fn weak_superposition(parts: &[(f64, MatrixFlow)]) -> Result<MatrixFlow> {
    if parts.is_empty() {
        return Err(Error::InvalidArgument("weak superposition needs at least one part".into()));
    }
    let at0: Vec<ComplexMatrix> = parts.iter().map(|(_, f)| f.value(0.0)).collect();
    for j in 0..at0.len() {
        for l in 0..at0.len() {
            if j == l {
                continue;
            }
            let prod = &at0[j] * &at0[l];
            if prod.max_abs() > tol::SUPPORT_TOL {
                return Err(Error::InvalidArgument(format!(
                    "supports of parts {j} and {l} overlap (‖ρ_jρ_l‖ = {:.3e})",
                    prod.max_abs()
                )));
            }
        }
    }
    let scaled: Result<Vec<MatrixFlow>> =
        parts.iter().map(|(p, f)| rescale_solution(f, *p)).collect();
    let scaled = scaled?;
    let scaled_d = scaled.clone();
    let dim = at0[0].dim();
    Ok(MatrixFlow::new(
        move |t| {
            scaled.iter().fold(ComplexMatrix::zeros(dim), |acc, f| &acc + &f.value(t))
        },
        move |t| {
            scaled_d.iter().fold(ComplexMatrix::zeros(dim), |acc, f| &acc + &f.derivative(t))
        },
    ))
}

/// Max over `t_grid` of `‖ρ̇(t) + i[H, ρ(t)²]‖_F` using the flow's
/// analytic derivative.
pub fn nonlinear_residual_analytic(
    flow: &MatrixFlow,
    h: &ComplexMatrix,
    t_grid: &[f64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in t_grid {
        let rho = flow.value(t);
        let rhs = nonlinear_rhs(h, &rho)?;
        worst = worst.max((&flow.derivative(t) - &rhs).frobenius_norm());
    }
    Ok(worst)
}

/// Uniform grid of `n` points covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
