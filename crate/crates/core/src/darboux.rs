//! The binary dressing machinery: rank-1 projector, dressing operator,
//! density transform, annihilation operator, Lax eigen-residuals, the
//! alternative partner Hamiltonian and the full reconstruction pipeline
//! `ρ(0) → ψ_i(t) → U_i(t) → σ(t) → c·σ(c·t)`.

use num_complex::Complex64 as C64;

use crate::dynamics::integrate_vector_with;
use crate::error::{Error, Result};
use crate::matrix::{bracket, conjugate_unitary, BracketKind, ComplexMatrix, ComplexVector};
use crate::scenario::ScenarioParams;
use crate::tol;

/// Spectral parameters of one dressing step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressingParams {
    pub mu: C64,
    pub lambda: C64,
    /// Lax eigenvalue, always obtained numerically (Rayleigh quotient).
    pub z_mu: C64,
}

/// Rank-1 projector `P = ψψ†/⟨ψ,ψ⟩`.
pub fn projector(psi: &ComplexVector) -> Result<ComplexMatrix> {
    let norm_sq = psi.norm().powi(2);
    if norm_sq.sqrt() <= tol::ZERO_VECTOR_TOL {
        return Err(Error::InvalidArgument("cannot project on a near-zero vector".into()));
    }
    Ok(psi.outer(psi).scale_re(1.0 / norm_sq))
}

/// Analytic `Ṗ` for `P = ψψ†/⟨ψ,ψ⟩`, including the normalization
/// derivative (the Lax generator is non-normal, so `‖ψ‖` drifts).
pub fn projector_derivative(psi: &ComplexVector, psi_dot: &ComplexVector) -> Result<ComplexMatrix> {
    let norm_sq = psi.norm().powi(2);
    if norm_sq.sqrt() <= tol::ZERO_VECTOR_TOL {
        return Err(Error::InvalidArgument("cannot differentiate a near-zero projector".into()));
    }
    let cross = &psi_dot.outer(psi) + &psi.outer(psi_dot);
    let norm_dot = 2.0 * psi.inner(psi_dot).re;
    Ok(&cross.scale_re(1.0 / norm_sq) - &psi.outer(psi).scale_re(norm_dot / (norm_sq * norm_sq)))
}

/// Coefficient `(μ−μ̄)/μ̄` of the rank-1 correction in `U_μ`.
pub fn dressing_coefficient(mu: C64) -> C64 {
    let mu_bar = mu.conj();
    (mu - mu_bar) / mu_bar
}

fn require_projector(p: &ComplexMatrix) -> Result<()> {
    let idem = (&(p * p) - p).max_abs();
    let herm = p.hermiticity_defect();
    if idem > tol::PROJECTOR_TOL || herm > tol::PROJECTOR_TOL {
        return Err(Error::InvalidArgument(format!(
            "not a projector (idempotency {idem:.3e}, hermiticity {herm:.3e})"
        )));
    }
    Ok(())
}

/// Dressing operator `U_μ = 1 + ((μ−μ̄)/μ̄)P`; unitary for nonreal `μ`.
pub fn dressing_operator(mu: C64, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    if mu.im == 0.0 {
        return Err(Error::InvalidArgument(
            "dressing requires nonreal mu (real mu gives no unitary rotation)".into(),
        ));
    }
    require_projector(p)?;
    Ok(&ComplexMatrix::identity(p.dim()) + &p.scale(dressing_coefficient(mu)))
}

/// `ρ₁ = U_μ ρ U_μ†`; preserves trace and spectrum.
pub fn transform_density(rho: &ComplexMatrix, mu: C64, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let u = dressing_operator(mu, p)?;
    conjugate_unitary(&u, rho)
}

/// Annihilation operator `A = 1 − ((μ−μ̄)/(λ−μ̄))P`; kills `ψ_μ` at `λ = μ`.
pub fn annihilation_operator(lambda: C64, mu: C64, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mu_bar = mu.conj();
    if (lambda - mu_bar).norm() < 1e-14 {
        return Err(Error::InvalidArgument("annihilation operator has a pole at lambda = conj(mu)".into()));
    }
    require_projector(p)?;
    let coeff = (mu - mu_bar) / (lambda - mu_bar);
    Ok(&ComplexMatrix::identity(p.dim()) - &p.scale(coeff))
}

/// `‖(ρ−ωH)ψ̂ − zψ̂‖` for the normalized direction `ψ̂`.
pub fn lax_eigen_residual(
    rho: &ComplexMatrix,
    h: &ComplexMatrix,
    omega: C64,
    z: C64,
    psi: &ComplexVector,
) -> Result<f64> {
    let psi_hat = psi.normalized();
    let lax = rho - &h.scale(omega);
    Ok(lax.apply(&psi_hat)?.sub(&psi_hat.scale(z)).norm())
}

/// Rayleigh estimate `⟨ψ̂, (ρ−ωH)ψ̂⟩` of the Lax eigenvalue.
pub fn rayleigh_z(
    rho: &ComplexMatrix,
    h: &ComplexMatrix,
    omega: C64,
    psi: &ComplexVector,
) -> Result<C64> {
    let psi_hat = psi.normalized();
    let lax = rho - &h.scale(omega);
    Ok(psi_hat.inner(&lax.apply(&psi_hat)?))
}

/// A dressing snapshot at one time: the Lax vector with its projector and
/// the induced unitary.
#[derive(Debug, Clone)]
pub struct DressingState {
    pub t: f64,
    pub psi: ComplexVector,
    pub projector: ComplexMatrix,
    pub dressing: ComplexMatrix,
}

impl DressingState {
    pub fn new(mu: C64, psi: ComplexVector, t: f64) -> Result<Self> {
        let p = projector(&psi)?;
        let u = dressing_operator(mu, &p)?;
        Ok(Self { t, psi, projector: p, dressing: u })
    }
}

/// Alternative partner Hamiltonian `h₁ = iU̇_μU_μ† + aU_μHU_μ†`, with `U̇`
/// built from the analytic `Ṗ`.
pub fn partner_hamiltonian_alt(
    mu: C64,
    psi: &ComplexVector,
    psi_dot: &ComplexVector,
    a: f64,
    h: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let p = projector(psi)?;
    let u = dressing_operator(mu, &p)?;
    let p_dot = projector_derivative(psi, psi_dot)?;
    let u_dot = p_dot.scale(dressing_coefficient(mu));
    let term1 = (&u_dot * &u.adjoint()).scale(C64::new(0.0, 1.0));
    let term2 = (&(&u * h) * &u.adjoint()).scale_re(a);
    Ok(&term1 + &term2)
}

/// Lax time derivative specialized to diagonal `H = diag(e)`: avoids the
/// dense matrix products of [`lax_rhs`] in the long reconstruction runs.
fn lax_rhs_diag(
    energies: &[f64],
    rho: &ComplexMatrix,
    mu: C64,
    psi: &ComplexVector,
) -> ComplexVector {
    let n = energies.len();
    let mut out = ComplexVector::zeros(n);
    for i in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += rho[(i, j)].scale(energies[i] + energies[j]) * psi[j];
        }
        acc -= mu.scale(energies[i] * energies[i]) * psi[i];
        out[i] = C64::new(0.0, -1.0) * acc;
    }
    out
}

/// [`partner_hamiltonian_alt`] specialized to diagonal `H`; expands the
/// products of `U = 1 + cP` so only two dense matrix products remain.
fn partner_hamiltonian_alt_diag(
    mu: C64,
    psi: &ComplexVector,
    psi_dot: &ComplexVector,
    a: f64,
    energies: &[f64],
) -> Result<ComplexMatrix> {
    let n = energies.len();
    let p = projector(psi)?;
    let p_dot = projector_derivative(psi, psi_dot)?;
    let c = dressing_coefficient(mu);

    // iU̇U† = i c Ṗ + i c c̄ ṖP.
    let pdot_p = &p_dot * &p;
    let mut out = &p_dot.scale(C64::new(0.0, 1.0) * c)
        + &pdot_p.scale(C64::new(0.0, 1.0) * c * c.conj());

    // aUHU† = a(H + cPH + c̄HP + |c|² PHP), with PH/HP diagonal scalings.
    let mut ph = p.clone();
    let mut hp = p.clone();
    for i in 0..n {
        for j in 0..n {
            ph[(i, j)] = ph[(i, j)].scale(energies[j]);
            hp[(i, j)] = hp[(i, j)].scale(energies[i]);
        }
    }
    let php = &ph * &p;
    out = &out
        + &(&(&ph.scale(c) + &hp.scale(c.conj())) + &php.scale_re(c.norm_sqr())).scale_re(a);
    for i in 0..n {
        out[(i, i)] += C64::new(a * energies[i], 0.0);
    }
    Ok(out)
}

/// Output of the reconstruction pipeline on a uniform `t` grid.
#[derive(Debug, Clone)]
pub struct DressedRun {
    /// Grid in the normalized time variable `t` (the closed form's time).
    pub times: Vec<f64>,
    /// `σ(c·t) = U_i(c·t) ρ(c·t) U_i(c·t)†` at each grid point.
    pub sigma: Vec<ComplexMatrix>,
    /// `c·σ(c·t)`: the normalized-rescaled comparison trajectory.
    pub rescaled: Vec<ComplexMatrix>,
    /// Normalized Lax vector at each grid point.
    pub psi: Vec<ComplexVector>,
    /// Lax eigenvalue fixed at its `τ = 0` Rayleigh value.
    pub z0: C64,
    /// Max `‖(ρ(τ)−μH)ψ̂ − z₀ψ̂‖` observed along the run.
    pub max_lax_residual: f64,
}

/// Grid values of `t0 + j·dt` not exceeding `t1`, with `t1` appended when
/// the last step is partial.
fn time_grid(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    let span = t1 - t0;
    let n = (span.abs() / dt).floor() as usize;
    let step = dt * span.signum();
    let mut grid: Vec<f64> = (0..=n).map(|j| t0 + j as f64 * step).collect();
    if (grid.last().copied().unwrap() - t1).abs() > 1e-12 * dt.max(1.0) {
        grid.push(t1);
    }
    Ok(grid)
}

/// Integrates the Lax vector through an ordered list of target times
/// starting from `(start_time, start_state)`, invoking `record` at every
/// target.
fn propagate_through<F>(
    rhs: &F,
    start: (f64, &ComplexVector),
    targets: &[f64],
    dt: f64,
    record: &mut dyn FnMut(f64, &ComplexVector),
) -> Result<()>
where
    F: Fn(f64, &ComplexVector) -> Result<ComplexVector>,
{
    let (mut t_cur, mut psi) = (start.0, start.1.clone());
    for &t_next in targets {
        if (t_next - t_cur).abs() > 0.0 {
            let mut last = psi.clone();
            integrate_vector_with(rhs, &psi, t_cur, t_next, dt, true, |_, _, y| {
                last = y.clone();
            })?;
            psi = last;
            t_cur = t_next;
        }
        record(t_cur, &psi);
    }
    Ok(())
}

/// Runs the full pipeline: propagates `ψ_i` under the Lax time equation
/// with the exactly evolved seed `ρ(τ) = W₅ρ(0)W₅†`, dresses at every grid
/// point and emits both `σ(c·t)` and the rescaled `c·σ(c·t)`.
///
/// `dt` is the integration step (in `t` units); samples are recorded every
/// `record_every` steps so long windows do not hold one matrix per step.
pub fn reconstruct_dressed(
    params: &ScenarioParams,
    t0: f64,
    t1: f64,
    dt: f64,
    record_every: usize,
) -> Result<DressedRun> {
    params.validate()?;
    let c = params.rescale_c();
    let mu = params.mu();
    let ham = params.hamiltonian()?;
    let energies: Vec<f64> = (0..params.dim).map(|n| ham.energy(n)).collect();
    let psi0 = params.psi0();
    let scenario = *params;

    let rhs = move |tau: f64, psi: &ComplexVector| -> Result<ComplexVector> {
        Ok(lax_rhs_diag(&energies, &scenario.rho_seed(tau), mu, psi))
    };

    let h = ham.matrix();
    let z0 = rayleigh_z(&params.rho0(), &h, mu, &psi0)?;

    let grid_t = time_grid(t0, t1, dt * record_every.max(1) as f64)?;
    let tau_of = |t: f64| c * t;
    let dtau = c * dt;

    // Split the grid at τ = 0 and propagate backward/forward from the
    // initial condition.
    let mut backward: Vec<f64> = grid_t.iter().copied().filter(|&t| t < 0.0).collect();
    backward.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let forward: Vec<f64> = grid_t.iter().copied().filter(|&t| t >= 0.0).collect();

    let mut collected: Vec<(f64, ComplexVector)> = Vec::with_capacity(grid_t.len());
    {
        let mut rec = |tau: f64, psi: &ComplexVector| collected.push((tau, psi.clone()));
        let back_taus: Vec<f64> = backward.iter().map(|&t| tau_of(t)).collect();
        propagate_through(&rhs, (0.0, &psi0), &back_taus, dtau, &mut rec)?;
        let fwd_taus: Vec<f64> = forward.iter().map(|&t| tau_of(t)).collect();
        propagate_through(&rhs, (0.0, &psi0), &fwd_taus, dtau, &mut rec)?;
    }
    collected.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut run = DressedRun {
        times: Vec::with_capacity(collected.len()),
        sigma: Vec::with_capacity(collected.len()),
        rescaled: Vec::with_capacity(collected.len()),
        psi: Vec::with_capacity(collected.len()),
        z0,
        max_lax_residual: 0.0,
    };
    for (tau, psi) in collected {
        let rho_tau = params.rho_seed(tau);
        let p = projector(&psi)?;
        let sigma = transform_density(&rho_tau, mu, &p)?;
        let resid = lax_eigen_residual(&rho_tau, &h, mu, z0, &psi)?;
        run.max_lax_residual = run.max_lax_residual.max(resid);
        run.times.push(tau / c);
        run.rescaled.push(sigma.scale_re(c));
        run.sigma.push(sigma);
        run.psi.push(psi.normalized());
    }
    Ok(run)
}

/// Result of cross-checking the alternative partner Hamiltonian.
#[derive(Debug, Clone, Copy)]
pub struct AltPartnerCheck {
    /// Max Frobenius deviation between the `h₁ = iU̇U† + aUHU†` evolution
    /// of `σ` and the directly dressed trajectory.
    pub max_deviation: f64,
    /// Max Hermiticity defect of `h₁(τ)` along the run.
    pub max_hermiticity_defect: f64,
}

/// Integrates `iσ̇ = [h₁^{alt}(τ), σ]` jointly with the Lax vector from
/// `σ(0) = U_i(0)ρ(0)U_i(0)†` and compares against algebraic dressing at
/// every grid point.
pub fn alt_partner_check(
    params: &ScenarioParams,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<AltPartnerCheck> {
    params.validate()?;
    let c = params.rescale_c();
    let mu = params.mu();
    let ham = params.hamiltonian()?;
    let energies: Vec<f64> = (0..params.dim).map(|n| ham.energy(n)).collect();
    let scenario = *params;

    let lax = |tau: f64, psi: &ComplexVector| -> ComplexVector {
        lax_rhs_diag(&energies, &scenario.rho_seed(tau), mu, psi)
    };
    let h1_alt = |tau: f64, psi: &ComplexVector| -> Result<ComplexMatrix> {
        let psi_dot = lax(tau, psi);
        partner_hamiltonian_alt_diag(mu, psi, &psi_dot, 5.0, &energies)
    };

    let psi0 = params.psi0();
    let sigma0 = transform_density(&params.rho0(), mu, &projector(&psi0)?)?;

    let mut check = AltPartnerCheck { max_deviation: 0.0, max_hermiticity_defect: 0.0 };
    let dtau = c * dt;

    for tau_end in [c * t0, c * t1] {
        if tau_end == 0.0 {
            continue;
        }
        let n = ((tau_end.abs()) / dtau).ceil().max(1.0) as usize;
        let hstep = tau_end / n as f64;
        let compare_every = (n / 64).max(1);
        let mut psi = psi0.clone();
        let mut sigma = sigma0.clone();
        for step in 0..n {
            let tau = step as f64 * hstep;
            // One RK4 step of the coupled (ψ, σ) system.
            let (mut kpsi, mut ksig) = (Vec::with_capacity(4), Vec::with_capacity(4));
            let nodes = [0.0, 0.5, 0.5, 1.0];
            for (stage, &frac) in nodes.iter().enumerate() {
                let t_stage = tau + frac * hstep;
                let (psi_s, sig_s) = if stage == 0 {
                    (psi.clone(), sigma.clone())
                } else {
                    let w = if stage == 3 { hstep } else { hstep / 2.0 };
                    let kp: &ComplexVector = &kpsi[stage - 1];
                    let ks: &ComplexMatrix = &ksig[stage - 1];
                    (psi.add(&kp.scale(C64::new(w, 0.0))), &sigma + &ks.scale_re(w))
                };
                let dpsi = lax(t_stage, &psi_s);
                let h1 = h1_alt(t_stage, &psi_s)?;
                check.max_hermiticity_defect =
                    check.max_hermiticity_defect.max(h1.hermiticity_defect());
                let dsig = bracket(&h1, &sig_s, BracketKind::Commutator)?
                    .scale(C64::new(0.0, -1.0));
                kpsi.push(dpsi);
                ksig.push(dsig);
            }
            let incr_psi = kpsi[0]
                .add(&kpsi[3])
                .add(&kpsi[1].add(&kpsi[2]).scale(C64::new(2.0, 0.0)))
                .scale(C64::new(hstep / 6.0, 0.0));
            let incr_sig = (&(&ksig[0] + &ksig[3]) + &(&ksig[1] + &ksig[2]).scale_re(2.0))
                .scale_re(hstep / 6.0);
            psi = psi.add(&incr_psi).normalized();
            sigma = (&sigma + &incr_sig).hermitian_part();
            if !sigma.is_finite() || !psi.is_finite() {
                return Err(Error::NonFinite { step });
            }
            // Periodically compare against the algebraic dressing route.
            if (step + 1) % compare_every == 0 || step + 1 == n {
                let tau_now = (step + 1) as f64 * hstep;
                let dressed =
                    transform_density(&scenario.rho_seed(tau_now), mu, &projector(&psi)?)?;
                check.max_deviation =
                    check.max_deviation.max((&sigma - &dressed).frobenius_norm());
            }
        }
    }
    Ok(check)
}
