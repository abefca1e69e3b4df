//! Closed forms for the worked three-level oscillator example: the seed
//! density matrix, the initial Lax vector, the Rabi envelopes, the exact
//! scattering solution and its partner Hamiltonians.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::NumberHamiltonian;
use crate::matrix::{bracket, BracketKind, ComplexMatrix, ComplexVector};

const SQRT5: f64 = 2.23606797749979;

/// Parameters of the exact solution family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    /// Energy scale ε of `H = εN`.
    pub eps: f64,
    /// Level offset: `N = diag(r, r+1, …)`.
    pub r: f64,
    /// Fock index of the three-level block start.
    pub n_k: usize,
    /// Truncation size of the number basis.
    pub dim: usize,
    /// Initial-condition parameter steering the scattering.
    pub alpha: f64,
    /// Partner-Hamiltonian gauge constants.
    pub c1: f64,
    pub c2: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self { eps: 1.0, r: 0.5, n_k: 2, dim: 16, alpha: 5.0, c1: 0.0, c2: 0.0 }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        if self.n_k + 2 >= self.dim {
            return Err(Error::InvalidArgument("block does not fit in truncation".into()));
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<NumberHamiltonian> {
        self.validate()?;
        NumberHamiltonian::new(self.eps, self.r, self.dim, self.n_k)
    }

    /// Level label of the block start, `k = r + n_k`.
    pub fn level_k(&self) -> f64 {
        self.r + self.n_k as f64
    }

    /// `ω₀ = 10ε/(15+√5)`.
    pub fn omega0(&self) -> f64 {
        10.0 * self.eps / (15.0 + SQRT5)
    }

    /// Scale factor `c = 2/(15+√5) = 1/Tr ρ(0)` linking the dressed and
    /// the normalized solutions via `ρ₁(t) = c·σ(c·t)`.
    pub fn rescale_c(&self) -> f64 {
        2.0 / (15.0 + SQRT5)
    }

    /// Dressing parameter `μ = i/ε`.
    pub fn mu(&self) -> C64 {
        C64::new(0.0, 1.0 / self.eps)
    }

    /// The seed density matrix (unnormalized, `Tr ρ(0) = (15+√5)/2`),
    /// embedded at the block.
    pub fn rho0(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        let nk = self.n_k;
        m[(nk, nk)] = C64::new(2.5, 0.0);
        m[(nk + 1, nk + 1)] = C64::new((5.0 + SQRT5) / 2.0, 0.0);
        m[(nk + 2, nk + 2)] = C64::new(2.5, 0.0);
        m[(nk, nk + 2)] = C64::new(-1.5, 0.0);
        m[(nk + 2, nk)] = C64::new(-1.5, 0.0);
        m
    }

    /// Initial Lax vector `ψ_i(0)`.
    ///
    /// The outer-component phases `e^{∓iφ/2}` with `cos(φ/2) = √((3−√5)/6)`,
    /// `sin(φ/2) = √((3+√5)/6)` place the vector inside the degenerate
    /// eigenspace of `ρ(0) − μH`, which is what makes the dressing pipeline
    /// close (eigen-residual at machine precision for every α).
    pub fn psi0(&self) -> ComplexVector {
        let na = 1.0 / (1.0 + self.alpha * self.alpha).sqrt();
        let ch = ((3.0 - SQRT5) / 6.0).sqrt();
        let sh = ((3.0 + SQRT5) / 6.0).sqrt();
        let wing = self.alpha * na / 2f64.sqrt();
        let mut v = ComplexVector::zeros(self.dim);
        v[self.n_k] = C64::new(ch, -sh) * wing;
        v[self.n_k + 1] = C64::new(na, 0.0);
        v[self.n_k + 2] = C64::new(ch, sh) * wing;
        v
    }

    /// Validates the parameters and returns `(ρ(0), ψ_i(0), ω₀)`.
    pub fn init(&self) -> Result<(ComplexMatrix, ComplexVector, f64)> {
        self.validate()?;
        Ok((self.rho0(), self.psi0(), self.omega0()))
    }

    /// Exact evolution of the seed: `ρ(t) = W₅(t) ρ(0) W₅(t)†`.
    ///
    /// `W₅` is diagonal, so the conjugation is applied entrywise:
    /// `ρ_{mn}(t) = ρ_{mn}(0) e^{−i5ε(m−n)t}`.
    pub fn rho_seed(&self, t: f64) -> ComplexMatrix {
        let mut m = self.rho0();
        let nk = self.n_k;
        // (i, j) = (n_k, n_k+2): e^{−i5ε((n_k)−(n_k+2))t} = e^{+10iεt}.
        let phase = C64::from_polar(1.0, 10.0 * self.eps * t);
        m[(nk, nk + 2)] *= phase;
        m[(nk + 2, nk)] *= phase.conj();
        m
    }
}

/// The Rabi envelopes and their analytic time derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Envelopes {
    pub xi: C64,
    pub zeta: C64,
    pub xi_dot: C64,
    pub zeta_dot: C64,
}

/// Evaluates `ξ(t)`, `ζ(t)` and their derivatives.
///
/// Written so that no intermediate overflows for any finite `t`: for
/// `w = ω₀t/5 ≥ 0` the rational parts are expressed in `e^{−w}`, for
/// `w < 0` in `e^{w}`.
pub fn envelopes(params: &ScenarioParams, t: f64) -> Envelopes {
    let w0 = params.omega0();
    let alpha = params.alpha;
    let a2 = alpha * alpha;
    let w = w0 * t / 5.0;

    // ξ = C α e^{iω₀t} / D, D = e^w + α² e^{−w}.
    let c_xi = C64::new(2.0, 3.0 - SQRT5) * ((3.0 + SQRT5) / 3.0).sqrt();
    let (inv_d, ddot_over_d2) = if w >= 0.0 {
        let q = (-w).exp(); // ≤ 1
        let denom = 1.0 + a2 * q * q;
        (q / denom, (w0 / 5.0) * q * (1.0 - a2 * q * q) / (denom * denom))
    } else {
        let p = w.exp(); // < 1
        let denom = p * p + a2;
        (p / denom, (w0 / 5.0) * p * (p * p - a2) / (denom * denom))
    };
    let phase1 = C64::from_polar(1.0, w0 * t);
    let xi = c_xi * alpha * inv_d * phase1;
    let xi_dot = c_xi * alpha * phase1 * (C64::new(0.0, w0) * inv_d - ddot_over_d2);

    // ζ = env·e^{2iω₀t}, env = −(9v + (1+4√5 i)α²)/(3(v+α²)), v = e^{2w}.
    let zcoef = C64::new(1.0, 4.0 * SQRT5);
    let (env, env_dot) = if w >= 0.0 {
        let q = (-2.0 * w).exp();
        let denom = 1.0 + a2 * q;
        let env = -(C64::new(9.0, 0.0) + zcoef * a2 * q) / (3.0 * denom);
        let env_dot = -C64::new(8.0, -4.0 * SQRT5).scale(a2)
            * (2.0 * w0 / 5.0 * q / (3.0 * denom * denom));
        (env, env_dot)
    } else {
        let v = (2.0 * w).exp();
        let denom = v + a2;
        let env = -(C64::new(9.0 * v, 0.0) + zcoef * a2) / (3.0 * denom);
        let env_dot = -C64::new(8.0, -4.0 * SQRT5).scale(a2)
            * (2.0 * w0 / 5.0 * v / (3.0 * denom * denom));
        (env, env_dot)
    };
    let phase2 = C64::from_polar(1.0, 2.0 * w0 * t);
    let zeta = env * phase2;
    let zeta_dot = (env_dot + C64::new(0.0, 2.0 * w0) * env) * phase2;

    Envelopes { xi, zeta, xi_dot, zeta_dot }
}

/// Which asymptotic regime of the interaction picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeLimit {
    Past,
    Future,
}

/// The exact normalized scattering solution `ρ₁(t)` with its interaction
/// picture and analytic derivative.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormSolution {
    params: ScenarioParams,
}

pub fn rho1_closed(params: &ScenarioParams) -> ClosedFormSolution {
    ClosedFormSolution { params: *params }
}

impl ClosedFormSolution {
    pub fn params(&self) -> &ScenarioParams {
        &self.params
    }

    fn block(&self, xi: C64, zeta: C64, diag: Option<[f64; 3]>) -> ComplexMatrix {
        let norm = 15.0 + SQRT5;
        let nk = self.params.n_k;
        let mut m = ComplexMatrix::zeros(self.params.dim);
        if let Some(d) = diag {
            m[(nk, nk)] = C64::new(d[0] / norm, 0.0);
            m[(nk + 1, nk + 1)] = C64::new(d[1] / norm, 0.0);
            m[(nk + 2, nk + 2)] = C64::new(d[2] / norm, 0.0);
        }
        m[(nk, nk + 1)] = xi / norm;
        m[(nk + 1, nk)] = xi.conj() / norm;
        m[(nk + 1, nk + 2)] = xi / norm;
        m[(nk + 2, nk + 1)] = xi.conj() / norm;
        m[(nk, nk + 2)] = zeta / norm;
        m[(nk + 2, nk)] = zeta.conj() / norm;
        m
    }

    /// `ρ₁(t)`.
    pub fn rho1(&self, t: f64) -> ComplexMatrix {
        let env = envelopes(&self.params, t);
        self.block(env.xi, env.zeta, Some([5.0, 5.0 + SQRT5, 5.0]))
    }

    /// Analytic `ρ̇₁(t)` (the diagonal is time-independent).
    pub fn rho1_dot(&self, t: f64) -> ComplexMatrix {
        let env = envelopes(&self.params, t);
        self.block(env.xi_dot, env.zeta_dot, None)
    }

    /// Interaction picture `ρ_int(t) = e^{+iω₀Nt} ρ₁(t) e^{−iω₀Nt}`.
    pub fn rho_int(&self, t: f64) -> ComplexMatrix {
        let w0 = self.params.omega0();
        let env = envelopes(&self.params, t);
        // Entry (m, n) picks up e^{iω₀(m−n)t}; this cancels one/both ω₀
        // oscillations of ξ/ζ.
        let xi_int = env.xi * C64::from_polar(1.0, -w0 * t);
        let zeta_int = env.zeta * C64::from_polar(1.0, -2.0 * w0 * t);
        self.block(xi_int, zeta_int, Some([5.0, 5.0 + SQRT5, 5.0]))
    }

    /// The two asymptotic interaction-picture matrices.
    pub fn rho_int_limit(&self, which: TimeLimit) -> ComplexMatrix {
        let zeta = match which {
            TimeLimit::Past => C64::new(-1.0 / 3.0, -4.0 * SQRT5 / 3.0),
            TimeLimit::Future => C64::new(-3.0, 0.0),
        };
        self.block(C64::new(0.0, 0.0), zeta, Some([5.0, 5.0 + SQRT5, 5.0]))
    }

    /// The solution as a flow with its analytic derivative.
    pub fn flow(&self) -> crate::dynamics::MatrixFlow {
        let a = *self;
        let b = *self;
        crate::dynamics::MatrixFlow::new(move |t| a.rho1(t), move |t| b.rho1_dot(t))
    }
}

/// Partner-Hamiltonian variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H1Variant {
    /// `H̃ + H₁(t)` with the three-level coefficient pattern.
    General,
    /// The 1/cosh pulse at `α = 1`, `c₁ = −(k+1)`, `εc₂ = −ω₀c₁`.
    Sech,
    /// Re-split around `H̃′ = ω₀N + (ω₀/√5)(k+c₁+1)|k+1⟩⟨k+1|`; equals the
    /// general variant minus the constant shift `(ω₀c₁+εc₂)·1`.
    Detuned,
}

/// Anticommutator form of the partner Hamiltonian,
/// `h₁ = (H+εc₁)ρ₁ + ρ₁(H+εc₁) + εc₂·1`, built from the normalized `ρ₁`.
pub fn h1_anticommutator(params: &ScenarioParams, t: f64) -> Result<ComplexMatrix> {
    let ham = params.hamiltonian()?;
    let rho1 = rho1_closed(params).rho1(t);
    let mut shifted = ham.matrix();
    for n in 0..params.dim {
        shifted[(n, n)] += C64::new(params.eps * params.c1, 0.0);
    }
    let mut h1 = bracket(&shifted, &rho1, BracketKind::Anticommutator)?;
    for n in 0..params.dim {
        h1[(n, n)] += C64::new(params.eps * params.c2, 0.0);
    }
    Ok(h1)
}

/// The closed-form partner Hamiltonian `h₁(t)`.
pub fn h1_closed(params: &ScenarioParams, t: f64, variant: H1Variant) -> Result<ComplexMatrix> {
    params.validate()?;
    let w0 = params.omega0();
    let k = params.level_k();
    let nk = params.n_k;
    let env = envelopes(params, t);

    match variant {
        H1Variant::General | H1Variant::Detuned => {
            let mut m = ComplexMatrix::zeros(params.dim);
            // Nonperturbed diagonal.
            for n in 0..params.dim {
                let level = params.r + n as f64;
                let diag = match variant {
                    H1Variant::General => w0 * (level + params.c1) + params.eps * params.c2,
                    _ => w0 * level,
                };
                m[(n, n)] = C64::new(diag, 0.0);
            }
            m[(nk + 1, nk + 1)] += C64::new(w0 / SQRT5 * (k + params.c1 + 1.0), 0.0);
            let cxi_lo = w0 / 5.0 * (k + params.c1 + 0.5);
            let cxi_hi = w0 / 5.0 * (k + params.c1 + 1.5);
            let czeta = w0 / 5.0 * (k + params.c1 + 1.0);
            m[(nk, nk + 1)] = env.xi.scale(cxi_lo);
            m[(nk + 1, nk)] = env.xi.conj().scale(cxi_lo);
            m[(nk + 1, nk + 2)] = env.xi.scale(cxi_hi);
            m[(nk + 2, nk + 1)] = env.xi.conj().scale(cxi_hi);
            m[(nk, nk + 2)] = env.zeta.scale(czeta);
            m[(nk + 2, nk)] = env.zeta.conj().scale(czeta);
            Ok(m)
        }
        H1Variant::Sech => {
            let tol = 1e-12;
            let c1_req = -(k + 1.0);
            if (params.alpha - 1.0).abs() > tol
                || (params.c1 - c1_req).abs() > tol
                || (params.eps * params.c2 + w0 * params.c1).abs() > tol
            {
                return Err(Error::InvalidArgument(
                    "sech variant requires alpha = 1, c1 = -(k+1), eps*c2 = -omega0*c1".into(),
                ));
            }
            let mut m = ComplexMatrix::zeros(params.dim);
            for n in 0..params.dim {
                m[(n, n)] = C64::new(w0 * (params.r + n as f64), 0.0);
            }
            let d = C64::new(2.0, 3.0 - SQRT5) * ((3.0 + SQRT5) / 12.0).sqrt();
            let pulse = d * C64::from_polar(1.0, w0 * t)
                * (w0 / (10.0 * (w0 * t / 5.0).cosh()));
            m[(nk, nk + 1)] = -pulse;
            m[(nk + 1, nk)] = -pulse.conj();
            m[(nk + 1, nk + 2)] = pulse;
            m[(nk + 2, nk + 1)] = pulse.conj();
            Ok(m)
        }
    }
}

/// Eigenvalues `(−e(t), 0, +e(t))` of the block restriction of `h₁` at
/// `c₁ = −(k+1)`, `c₂ = 0`, with `e(t) = (ω₀/5)√(25+4u)`.
pub fn h1_block_eigenvalues(params: &ScenarioParams, t: f64) -> Result<(f64, f64, f64)> {
    params.validate()?;
    let k = params.level_k();
    if (params.c1 + k + 1.0).abs() > 1e-12 || params.c2.abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "block eigenvalue formula requires c1 = -(k+1), c2 = 0".into(),
        ));
    }
    let w0 = params.omega0();
    let w = w0 * t / 5.0;
    let alpha = params.alpha;
    // u = (α/D)², D = e^w + α²e^{−w}; evaluated overflow-safely.
    let root = if w >= 0.0 {
        let q = (-w).exp();
        alpha * q / (1.0 + alpha * alpha * q * q)
    } else {
        let p = w.exp();
        alpha * p / (p * p + alpha * alpha)
    };
    let u = root * root;
    let e = w0 / 5.0 * (25.0 + 4.0 * u).sqrt();
    Ok((-e, 0.0, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::eig_hermitian;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn seed_trace() {
        let p = ScenarioParams::default();
        approx(p.rho0().trace().re, (15.0 + SQRT5) / 2.0, 1e-12);
    }

    #[test]
    fn psi0_is_normalized_for_any_alpha() {
        for &alpha in &[0.0, 0.3, 1.0, 5.0, -2.0, 100.0] {
            let p = ScenarioParams { alpha, ..Default::default() };
            approx(p.psi0().norm(), 1.0, 1e-12);
        }
    }

    #[test]
    fn psi0_at_alpha_zero_is_middle_level() {
        let p = ScenarioParams { alpha: 0.0, ..Default::default() };
        let v = p.psi0();
        assert!((v[p.n_k + 1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(v[p.n_k].norm() < 1e-15 && v[p.n_k + 2].norm() < 1e-15);
    }

    #[test]
    fn psi0_is_lax_eigenvector() {
        // ψ_i(0) sits in the degenerate eigenspace of ρ(0) − μH with
        // eigenvalue (5+√5)/2 − i(k+1).
        for &alpha in &[0.2, 1.0, 5.0, -3.0] {
            let p = ScenarioParams { alpha, ..Default::default() };
            let ham = p.hamiltonian().unwrap();
            let lax = &p.rho0() - &ham.matrix().scale(p.mu());
            let psi = p.psi0();
            let z = C64::new((5.0 + SQRT5) / 2.0, -(p.level_k() + 1.0));
            let resid = lax.apply(&psi).unwrap().sub(&psi.scale(z)).norm();
            assert!(resid < 1e-12, "alpha {alpha}: residual {resid:.3e}");
        }
    }

    #[test]
    fn xi_modulus_at_origin_alpha_one() {
        let p = ScenarioParams { alpha: 1.0, ..Default::default() };
        approx(envelopes(&p, 0.0).xi.norm(), 2f64.sqrt(), 1e-12);
    }

    #[test]
    fn zeta_at_origin_alpha_one() {
        let p = ScenarioParams { alpha: 1.0, ..Default::default() };
        let z = envelopes(&p, 0.0).zeta;
        assert!((z - C64::new(-5.0 / 3.0, -2.0 * SQRT5 / 3.0)).norm() < 1e-12);
        approx(z.norm(), 5f64.sqrt(), 1e-12);
    }

    #[test]
    fn alpha_zero_means_no_scattering() {
        let p = ScenarioParams { alpha: 0.0, ..Default::default() };
        let w0 = p.omega0();
        for &t in &[-30.0, -1.0, 0.0, 2.5, 60.0] {
            let env = envelopes(&p, t);
            assert!(env.xi.norm() < 1e-15);
            let expect = C64::from_polar(3.0, 2.0 * w0 * t + std::f64::consts::PI);
            assert!((env.zeta - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_derivatives_match_centered_differences() {
        let p = ScenarioParams::default();
        let h = 1e-6;
        for &t in &[-20.0, -3.0, 0.0, 0.7, 10.0, 55.0] {
            let e = envelopes(&p, t);
            let plus = envelopes(&p, t + h);
            let minus = envelopes(&p, t - h);
            let fd_xi = (plus.xi - minus.xi) / (2.0 * h);
            let fd_zeta = (plus.zeta - minus.zeta) / (2.0 * h);
            let scale_xi = e.xi_dot.norm().max(1.0);
            let scale_zeta = e.zeta_dot.norm().max(1.0);
            assert!((fd_xi - e.xi_dot).norm() / scale_xi < 1e-7, "t = {t}");
            assert!((fd_zeta - e.zeta_dot).norm() / scale_zeta < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn envelopes_finite_at_extreme_times() {
        let p = ScenarioParams::default();
        for &t in &[-1e6, -400.0, 400.0, 1e6] {
            let e = envelopes(&p, t);
            for z in [e.xi, e.zeta, e.xi_dot, e.zeta_dot] {
                assert!(z.re.is_finite() && z.im.is_finite(), "t = {t}");
            }
        }
    }

    #[test]
    fn rho1_unit_trace_and_constant_spectrum() {
        let sol = rho1_closed(&ScenarioParams::default());
        let norm = 15.0 + SQRT5;
        let expect = [2.0 / norm, (5.0 + SQRT5) / norm, 8.0 / norm];
        for &t in &[-25.0, -4.0, 0.0, 7.3, 60.0] {
            let rho = sol.rho1(t);
            approx(rho.trace().re, 1.0, 1e-12);
            let eig = eig_hermitian(&rho).unwrap();
            let top = &eig.values[rho.dim() - 3..];
            for (got, want) in top.iter().zip(expect.iter()) {
                assert!((got - want).abs() < 1e-10, "t = {t}");
            }
        }
    }

    #[test]
    fn interaction_picture_limits() {
        let p = ScenarioParams::default();
        let sol = rho1_closed(&p);
        let big_t = 200.0 / p.omega0();
        let past = (&sol.rho_int(-big_t) - &sol.rho_int_limit(TimeLimit::Past)).frobenius_norm();
        let future =
            (&sol.rho_int(big_t) - &sol.rho_int_limit(TimeLimit::Future)).frobenius_norm();
        assert!(past < 1e-6, "past deviation {past:.3e}");
        assert!(future < 1e-6, "future deviation {future:.3e}");
        // The two asymptotic states genuinely differ.
        let gap = (&sol.rho_int_limit(TimeLimit::Past) - &sol.rho_int_limit(TimeLimit::Future))
            .max_abs();
        assert!(gap > 1e-2);
    }

    #[test]
    fn rho1_block_independent_of_truncation() {
        let small = ScenarioParams { dim: 5, ..Default::default() };
        let large = ScenarioParams { dim: 16, ..Default::default() };
        let (a, b) = (rho1_closed(&small), rho1_closed(&large));
        for &t in &[-3.0, 0.0, 12.0] {
            let (ma, mb) = (a.rho1(t), b.rho1(t));
            for i in 0..3 {
                for j in 0..3 {
                    let (ia, ja) = (small.n_k + i, small.n_k + j);
                    assert!((ma[(ia, ja)] - mb[(ia, ja)]).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn h1_general_is_hermitian() {
        let p = ScenarioParams { c1: 0.7, c2: -0.2, ..Default::default() };
        for &t in &[-10.0, 0.0, 3.3, 40.0] {
            let h1 = h1_closed(&p, t, H1Variant::General).unwrap();
            assert!(h1.hermiticity_defect() < 1e-14);
        }
    }

    #[test]
    fn h1_block_trace_time_independent() {
        let p = ScenarioParams { c1: 0.7, c2: -0.2, ..Default::default() };
        let block_trace = |t: f64| {
            let m = h1_closed(&p, t, H1Variant::General).unwrap();
            (0..3).map(|i| m[(p.n_k + i, p.n_k + i)].re).sum::<f64>()
        };
        let at0 = block_trace(0.0);
        for &t in &[-20.0, 1.0, 35.0] {
            approx(block_trace(t), at0, 1e-12);
        }
    }

    #[test]
    fn sech_agrees_with_general_at_special_parameters() {
        let base = ScenarioParams { alpha: 1.0, ..Default::default() };
        let k = base.level_k();
        let c1 = -(k + 1.0);
        let c2 = -base.omega0() * c1 / base.eps;
        let p = ScenarioParams { c1, c2, ..base };
        for &t in &[-8.0, 0.0, 0.9, 17.0] {
            let gen = h1_closed(&p, t, H1Variant::General).unwrap();
            let sech = h1_closed(&p, t, H1Variant::Sech).unwrap();
            assert!((&gen - &sech).max_abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn sech_rejects_wrong_parameters() {
        let p = ScenarioParams::default();
        assert!(h1_closed(&p, 0.0, H1Variant::Sech).is_err());
    }

    #[test]
    fn detuned_is_general_minus_constant_shift() {
        let p = ScenarioParams { c1: 0.4, c2: 1.1, ..Default::default() };
        let shift = p.omega0() * p.c1 + p.eps * p.c2;
        for &t in &[-2.0, 0.0, 6.0] {
            let gen = h1_closed(&p, t, H1Variant::General).unwrap();
            let det = h1_closed(&p, t, H1Variant::Detuned).unwrap();
            let mut expect = gen.clone();
            for n in 0..p.dim {
                expect[(n, n)] -= C64::new(shift, 0.0);
            }
            assert!((&det - &expect).max_abs() < 1e-12);
        }
    }

    #[test]
    fn block_eigenvalue_formula() {
        let base = ScenarioParams::default();
        let k = base.level_k();
        let p = ScenarioParams { c1: -(k + 1.0), c2: 0.0, ..base };
        let w0 = p.omega0();

        // Asymptotes ±ω₀.
        let (lo, mid, hi) = h1_block_eigenvalues(&p, 400.0).unwrap();
        approx(lo, -w0, 1e-9);
        approx(mid, 0.0, 1e-15);
        approx(hi, w0, 1e-9);

        // At e^{2ω₀t/5} = α²: u = 1/4, e = (ω₀/5)√26.
        let t_star = 5.0 * p.alpha.abs().ln() / w0;
        let (_, _, e) = h1_block_eigenvalues(&p, t_star).unwrap();
        approx(e, w0 / 5.0 * 26f64.sqrt(), 1e-12);

        // α = 0: (−ω₀, 0, ω₀) for all t.
        let p0 = ScenarioParams { alpha: 0.0, ..p };
        for &t in &[-11.0, 0.0, 23.0] {
            let (lo, _, hi) = h1_block_eigenvalues(&p0, t).unwrap();
            approx(lo, -w0, 1e-14);
            approx(hi, w0, 1e-14);
        }

        // Wrong gauge constants are rejected.
        assert!(h1_block_eigenvalues(&base, 0.0).is_err());
    }

    #[test]
    fn block_eigenvalues_match_eigensolver() {
        let base = ScenarioParams::default();
        let k = base.level_k();
        let p = ScenarioParams { c1: -(k + 1.0), c2: 0.0, ..base };
        for &t in &[-9.0, 0.0, 5.0 * p.alpha.ln() / p.omega0(), 30.0] {
            let h1 = h1_closed(&p, t, H1Variant::General).unwrap();
            let mut block = ComplexMatrix::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    block[(i, j)] = h1[(p.n_k + i, p.n_k + j)];
                }
            }
            let eig = eig_hermitian(&block).unwrap();
            let (lo, mid, hi) = h1_block_eigenvalues(&p, t).unwrap();
            approx(eig.values[0], lo, 1e-9);
            approx(eig.values[1], mid, 1e-9);
            approx(eig.values[2], hi, 1e-9);
        }
    }
}
