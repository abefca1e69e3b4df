//! The verification suite: every release-gating numerical check, each
//! expressed as a measured value against a pinned tolerance. The CLI and
//! the acceptance tests both run [`run_all`].

use num_complex::Complex64 as C64;

use crate::darboux::{alt_partner_check, reconstruct_dressed, DressedRun};
use crate::dynamics::{
    integrate_matrix_with, linspace, nonlinear_residual_analytic, nonlinear_rhs,
    weak_superposition,
};
use crate::eig::eig_hermitian;
use crate::error::Result;
use crate::matrix::{bracket, BracketKind, ComplexMatrix};
use crate::observables::{mean_x, position_density, simpson_uniform};
use crate::scenario::{
    h1_anticommutator, h1_block_eigenvalues, h1_closed, rho1_closed, H1Variant, ScenarioParams,
    TimeLimit,
};

const SQRT5: f64 = 2.23606797749979;

/// One measured quantity inside a criterion.
#[derive(Debug, Clone)]
pub struct CheckPart {
    pub label: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// One verification criterion (possibly several measured parts).
#[derive(Debug, Clone)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub parts: Vec<CheckPart>,
    pub pass: bool,
}

/// Outcome of the full suite.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Multiplier applied to every tolerance (1.0 = pinned values).
    pub tol_scale: f64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One human-readable line per criterion.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let worst = c
                    .parts
                    .iter()
                    .max_by(|a, b| {
                        (a.measured / a.tolerance)
                            .partial_cmp(&(b.measured / b.tolerance))
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .expect("every check has parts");
                format!(
                    "[{}] {:>2}. {} (worst: {} = {:.3e}, tol {:.1e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.name,
                    worst.label,
                    worst.measured,
                    worst.tolerance,
                )
            })
            .collect()
    }
}

struct Builder {
    tol_scale: f64,
    checks: Vec<Check>,
}

impl Builder {
    fn part(&self, label: impl Into<String>, measured: f64, tolerance: f64) -> CheckPart {
        CheckPart {
            label: label.into(),
            measured,
            tolerance,
            pass: measured.is_finite() && measured <= tolerance * self.tol_scale,
        }
    }

    fn push(&mut self, id: usize, name: &'static str, parts: Vec<CheckPart>) {
        let pass = parts.iter().all(|p| p.pass);
        self.checks.push(Check { id, name, parts, pass });
    }
}

fn block3(m: &ComplexMatrix, start: usize) -> ComplexMatrix {
    let mut b = ComplexMatrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            b[(i, j)] = m[(start + i, start + j)];
        }
    }
    b
}

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Max RK4-vs-exact error for the nonlinear flow over `[0, t1]`.
fn nonlinear_rk4_error(
    params: &ScenarioParams,
    t1: f64,
    dt: f64,
    mut sample: impl FnMut(f64, &ComplexMatrix),
) -> Result<f64> {
    let h = params.hamiltonian()?.matrix();
    let rho0 = params.rho0();
    let mut worst = 0.0f64;
    integrate_matrix_with(|_, r| nonlinear_rhs(&h, r), &rho0, 0.0, t1, dt, |step, t, y| {
        let exact = params.rho_seed(t);
        worst = worst.max((y - &exact).frobenius_norm());
        let _ = step;
        sample(t, y);
    })?;
    Ok(worst)
}

/// Least-squares-style scan for the time-scale factor that best matches
/// the dressed run to the closed form; reported when criterion 6 fails.
fn best_fit_time_scale(params: &ScenarioParams, run: &DressedRun) -> f64 {
    let c = params.rescale_c();
    let sol = rho1_closed(params);
    let stride = (run.times.len() / 40).max(1);
    let mut best = (f64::INFINITY, c);
    for step in 0..=150 {
        let s = c * (0.5 + 1.5 * step as f64 / 150.0);
        let mut err = 0.0f64;
        for (idx, t) in run.times.iter().enumerate().step_by(stride) {
            let tau = c * t;
            let cmp = &run.sigma[idx].scale_re(s) - &sol.rho1(tau / s);
            err = err.max(cmp.frobenius_norm());
        }
        if err < best.0 {
            best = (err, s);
        }
    }
    best.1
}

/// Runs the entire suite at the given parameters. `tol_scale` multiplies
/// every tolerance (1.0 keeps the pinned values; tiny values force the
/// failure path for exit-code testing).
pub fn run_all(params: &ScenarioParams, tol_scale: f64) -> Result<VerificationReport> {
    params.validate()?;
    let mut b = Builder { tol_scale, checks: Vec::with_capacity(14) };

    let ham = params.hamiltonian()?;
    let h = ham.matrix();
    let energies: Vec<f64> = (0..params.dim).map(|n| ham.energy(n)).collect();
    let sol = rho1_closed(params);
    let w0 = params.omega0();
    let big_t = 200.0 / w0;
    let norm5 = 15.0 + SQRT5;

    // --- 1 & 9a: nonlinear integration vs the conjugation closed form,
    // collecting invariant samples along the way.
    let mut invariants_t0: Option<[f64; 4]> = None;
    let mut invariant_drift = 0.0f64;
    let mut sample_count = 0usize;
    let rk4_err = nonlinear_rk4_error(params, 20.0, 1e-3, |_, y| {
        sample_count += 1;
        if (sample_count - 1) % 20 != 0 {
            return;
        }
        let mut vals = [0.0f64; 4];
        let mut power = y.clone();
        for v in vals.iter_mut() {
            let mut tr = 0.0;
            for i in 0..power.dim() {
                tr += energies[i] * power[(i, i)].re;
            }
            *v = tr;
            power = &power * y;
        }
        match &invariants_t0 {
            None => invariants_t0 = Some(vals),
            Some(base) => {
                // Moments grow like ‖ρ‖ⁿ (up to ~1e3 here), so drift is
                // measured relative to the initial magnitude.
                for (v, b0) in vals.iter().zip(base.iter()) {
                    invariant_drift = invariant_drift.max((v - b0).abs() / b0.abs().max(1.0));
                }
            }
        }
    })?;
    b.push(
        1,
        "nonlinear flow matches phase-conjugation closed form",
        vec![b.part("max Frobenius error, t in [0,20]", rk4_err, 1e-7)],
    );

    // --- 2, 3a, 4 (subsampled), 9b: one pass over the long window.
    let grid = linspace(-25.0, 60.0, 10_000);
    let mut resid_anticomm = 0.0f64;
    let mut resid_commutant = 0.0f64;
    let mut energy_drift = 0.0f64;
    let mut energy_t0: Option<f64> = None;
    let mut spectrum_dev = 0.0f64;
    let expected_spectrum: Vec<f64> = {
        let mut v = vec![0.0; params.dim - 3];
        v.extend_from_slice(&[2.0 / norm5, (5.0 + SQRT5) / norm5, 8.0 / norm5]);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    for (idx, &t) in grid.iter().enumerate() {
        let rho1 = sol.rho1(t);
        let rho1_dot = sol.rho1_dot(t);
        let h1a = h1_anticommutator(params, t)?;
        let comm = bracket(&h1a, &rho1, BracketKind::Commutator)?;
        let lhs = rho1_dot.scale(C64::new(0.0, 1.0));
        resid_anticomm = resid_anticomm.max((&lhs - &comm).frobenius_norm());

        let h1g = h1_closed(params, t, H1Variant::General)?;
        let diff = &h1g - &h1a;
        resid_commutant = resid_commutant
            .max(bracket(&diff, &rho1, BracketKind::Commutator)?.frobenius_norm());

        let energy = trace_product(&h1g, &rho1).re;
        match energy_t0 {
            None => energy_t0 = Some(energy),
            Some(e0) => energy_drift = energy_drift.max((energy - e0).abs()),
        }

        if idx % 30 == 0 {
            let eig = eig_hermitian(&rho1)?;
            for (got, want) in eig.values.iter().zip(expected_spectrum.iter()) {
                spectrum_dev = spectrum_dev.max((got - want).abs());
            }
        }
    }
    b.push(
        2,
        "closed form satisfies the linear equation with the anticommutator Hamiltonian",
        vec![b.part("max residual over 1e4 samples", resid_anticomm, 1e-10)],
    );

    // 3b: pulse variant vs general variant at the special parameters.
    let sech_params = {
        let k = params.level_k();
        let c1 = -(k + 1.0);
        ScenarioParams { alpha: 1.0, c1, c2: -w0 * c1 / params.eps, ..*params }
    };
    let mut sech_dev = 0.0f64;
    for &t in linspace(-25.0, 60.0, 200).iter() {
        let gen = h1_closed(&sech_params, t, H1Variant::General)?;
        let sech = h1_closed(&sech_params, t, H1Variant::Sech)?;
        sech_dev = sech_dev.max((&gen - &sech).max_abs());
    }
    b.push(
        3,
        "Hamiltonian variants agree up to the commutant",
        vec![
            b.part("max commutator norm, general vs anticommutator", resid_commutant, 1e-9),
            b.part("max entrywise pulse-vs-general deviation", sech_dev, 1e-12),
        ],
    );
    b.push(
        4,
        "solution spectrum is constant",
        vec![b.part("max eigenvalue deviation", spectrum_dev, 1e-10)],
    );

    // --- 5: asymptotic interaction-picture limits.
    let past =
        (&sol.rho_int(-big_t) - &sol.rho_int_limit(TimeLimit::Past)).frobenius_norm();
    let future =
        (&sol.rho_int(big_t) - &sol.rho_int_limit(TimeLimit::Future)).frobenius_norm();
    b.push(
        5,
        "interaction picture reaches its two asymptotic limits",
        vec![
            b.part("past-limit deviation", past, 1e-6),
            b.part("future-limit deviation", future, 1e-6),
        ],
    );

    // --- 6 & 12: the dressing reconstruction pipeline.
    let run = reconstruct_dressed(params, -25.0, 60.0, 1e-3, 20)?;
    let mut dressing_dev = 0.0f64;
    for (t, m) in run.times.iter().zip(run.rescaled.iter()) {
        dressing_dev = dressing_dev.max((m - &sol.rho1(*t)).frobenius_norm());
    }
    let mut label6 = String::from("max rescaled-dressing vs closed-form error");
    if dressing_dev > 1e-6 * tol_scale {
        let best = best_fit_time_scale(params, &run);
        label6 = format!(
            "max rescaled-dressing vs closed-form error (best-fit scale/c = {:.6})",
            best / params.rescale_c()
        );
    }
    b.push(6, "dressing pipeline reproduces the closed form after rescaling", vec![b.part(
        label6,
        dressing_dev,
        1e-6,
    )]);

    // --- 7: evolution under the alternative partner Hamiltonian.
    let alt = alt_partner_check(params, -25.0, 60.0, 2e-3)?;
    b.push(
        7,
        "alternative partner Hamiltonian regenerates the dressed trajectory",
        vec![
            b.part("max deviation from algebraic dressing", alt.max_deviation, 1e-6),
            b.part("max Hermiticity defect of the partner", alt.max_hermiticity_defect, 1e-10),
        ],
    );

    // --- 8: block eigenvalue trajectory.
    let p8 = ScenarioParams { c1: -(params.level_k() + 1.0), c2: 0.0, ..*params };
    let mut eig_dev = 0.0f64;
    let t_star = 5.0 * p8.alpha.abs().ln() / w0;
    let mut grid8 = linspace(-30.0, 45.0, 301);
    grid8.push(t_star);
    for &t in &grid8 {
        let (lo, mid, hi) = h1_block_eigenvalues(&p8, t)?;
        let block = block3(&h1_closed(&p8, t, H1Variant::General)?, p8.n_k);
        let eig = eig_hermitian(&block)?;
        for (got, want) in eig.values.iter().zip([lo, mid, hi].iter()) {
            eig_dev = eig_dev.max((got - want).abs());
        }
    }
    let (_, _, e_inf) = h1_block_eigenvalues(&p8, 400.0)?;
    let (_, _, e_minf) = h1_block_eigenvalues(&p8, -400.0)?;
    let asym_dev = (e_inf - w0).abs().max((e_minf - w0).abs());
    let (_, _, e_star) = h1_block_eigenvalues(&p8, t_star)?;
    let star_dev = (e_star - w0 / 5.0 * 26f64.sqrt()).abs();
    b.push(
        8,
        "partner block eigenvalues follow the closed-form trajectory",
        vec![
            b.part("max eigensolver vs formula deviation", eig_dev, 1e-9),
            b.part("asymptote deviation from the base splitting", asym_dev, 1e-9),
            b.part("crossover value deviation", star_dev, 1e-12),
        ],
    );

    // --- 9: conserved quantities.
    b.push(
        9,
        "energy-moment integrals of motion are conserved",
        vec![
            b.part("max relative drift of Tr(H rho^n), n = 1..4", invariant_drift, 1e-8),
            b.part("max drift of Tr(h1 rho1)", energy_drift, 1e-10),
        ],
    );

    // --- 10: position-space density diagnostics.
    let x_n = 4801usize;
    let x_half = 12.0;
    let x_step = 2.0 * x_half / (x_n - 1) as f64;
    let x_grid: Vec<f64> = (0..x_n).map(|i| -x_half + i as f64 * x_step).collect();
    let mut norm_dev = 0.0f64;
    let mut sym_dev = 0.0f64;
    let mut meanx_route_dev = 0.0f64;
    let mut meanx_asym = 0.0f64;
    for &t in &[-big_t, 0.0, 7.5, big_t] {
        let rho = sol.rho1(t);
        let slice: Vec<f64> =
            x_grid.iter().map(|&x| position_density(&rho, x)).collect::<Result<_>>()?;
        norm_dev = norm_dev.max((simpson_uniform(&slice, x_step)? - 1.0).abs());
        if t.abs() == big_t {
            for i in 0..x_n / 2 {
                sym_dev = sym_dev.max((slice[i] - slice[x_n - 1 - i]).abs());
            }
            meanx_asym = meanx_asym.max(mean_x(&rho).abs());
        }
    }
    for &t in &[0.0, 7.3] {
        let rho = sol.rho1(t);
        let weighted: Vec<f64> = x_grid
            .iter()
            .map(|&x| Ok(x * position_density(&rho, x)?))
            .collect::<Result<_>>()?;
        let quad = simpson_uniform(&weighted, x_step)?;
        meanx_route_dev = meanx_route_dev.max((quad - mean_x(&rho)).abs());
    }
    b.push(
        10,
        "position densities normalize, symmetrize and agree on the mean",
        vec![
            b.part("max |slice integral - 1|", norm_dev, 1e-6),
            b.part("max asymptotic x-asymmetry", sym_dev, 1e-6),
            b.part("ladder vs quadrature mean-x deviation", meanx_route_dev, 1e-6),
            b.part("asymptotic |mean x|", meanx_asym, 1e-6),
        ],
    );

    // --- 11: scattering time moves forward with alpha.
    let mut peaks = Vec::new();
    for &alpha in &[5.0, 10.0, 20.0, 50.0, 100.0] {
        let pa = ScenarioParams { alpha, ..*params };
        let sa = rho1_closed(&pa);
        let mut best = (0.0f64, 0.0f64);
        for &t in linspace(0.0, 60.0, 6001).iter() {
            let v = mean_x(&sa.rho1(t)).abs();
            if v > best.0 {
                best = (v, t);
            }
        }
        peaks.push(best.1);
    }
    let mut backstep = 0.0f64;
    for w in peaks.windows(2) {
        backstep = backstep.max(w[0] - w[1]);
    }
    let p0 = ScenarioParams { alpha: 0.0, ..*params };
    let s0 = rho1_closed(&p0);
    let frozen = s0.rho_int(0.0);
    let mut frozen_dev = 0.0f64;
    for &t in linspace(-25.0, 60.0, 500).iter() {
        frozen_dev = frozen_dev.max((&s0.rho_int(t) - &frozen).frobenius_norm());
    }
    b.push(
        11,
        "peak displacement time is nondecreasing in alpha; alpha = 0 freezes",
        vec![
            b.part("largest backward step of the peak time", backstep, 1e-12),
            b.part("interaction-picture drift at alpha = 0", frozen_dev, 1e-12),
        ],
    );

    // --- 12: eigen-relation along the Lax integration.
    b.push(
        12,
        "Lax eigen-residual stays small along the reconstruction",
        vec![b.part("max residual with z fixed at its initial value", run.max_lax_residual, 1e-8)],
    );

    // --- 13: disjoint-support combination still solves the flow.
    let pa = *params;
    let pb = ScenarioParams { n_k: params.n_k + 5, ..*params };
    pb.validate()?;
    let combined =
        weak_superposition(&[(0.3, rho1_closed(&pa).flow()), (0.7, rho1_closed(&pb).flow())])?;
    let super_resid =
        nonlinear_residual_analytic(&combined, &h, &linspace(-10.0, 10.0, 101))?;
    b.push(
        13,
        "weighted disjoint blocks remain a solution",
        vec![b.part("max nonlinear residual", super_resid, 1e-8)],
    );

    // --- 14: measured convergence order of the integrator.
    let e1 = nonlinear_rk4_error(params, 3.0, 8e-3, |_, _| {})?;
    let e2 = nonlinear_rk4_error(params, 3.0, 4e-3, |_, _| {})?;
    let order = (e1 / e2).log2();
    b.push(
        14,
        "integrator shows fourth-order convergence",
        vec![b.part(format!("|measured order {:.3} - 4|", order), (order - 4.0).abs(), 0.2)],
    );

    Ok(VerificationReport { tol_scale, checks: b.checks })
}
