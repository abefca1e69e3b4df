//! `vne`: verification, trajectory export, figure data and parameter scans
//! for the exact-scattering density-matrix engine.

mod config;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use config::ScenarioConfig;
use vne_core::darboux::reconstruct_dressed;
use vne_core::dynamics::{integrate_matrix, integrate_vector_with, lax_rhs, nonlinear_rhs};
use vne_core::error::Error as CoreError;
use vne_core::matrix::{bracket, trace_moment, BracketKind, ComplexMatrix};
use vne_core::observables::{mean_x, position_density};
use vne_core::scenario::{h1_anticommutator, rho1_closed, ScenarioParams, TimeLimit};
use vne_core::verify::run_all;

#[derive(Parser)]
#[command(name = "vne", about = "Exact scattering solutions of density-matrix flows", version)]
struct Cli {
    /// JSON configuration file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the scattering parameter alpha.
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Override the truncation dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full verification suite; exit 0 iff every check passes.
    Verify {
        /// Multiply every tolerance by this factor.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Write the JSON report here (stdout always gets the summary).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate one of the flows and export a trajectory CSV.
    Evolve {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, allow_negative_numbers = true)]
        t0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t1: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        record_every: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the data behind the three reference figures.
    Figures {
        #[arg(long, value_enum)]
        which: Fig,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep alpha and summarize the scattering transition per value.
    Scan {
        /// Range specification MIN:MAX:COUNT.
        #[arg(long, allow_negative_numbers = true)]
        alphas: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Nonlinear,
    LinearPartner,
    Lax,
    Dressed,
}

#[derive(Copy, Clone, ValueEnum)]
enum Fig {
    Fig1,
    Fig2,
    Fig3,
}

fn main() {
    let code = run();
    std::process::exit(code);
}

fn fail(msg: impl std::fmt::Display, code: i32) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn run() -> i32 {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("VNE_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => return fail("VNE_THREADS must be a positive integer", 2),
        }
    }

    let mut cfg = match &cli.config {
        Some(path) => match ScenarioConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(e, 2),
        },
        None => ScenarioConfig::default(),
    };
    if let Some(alpha) = cli.alpha {
        cfg.alpha = alpha;
    }
    if let Some(dim) = cli.dim {
        cfg.dim = dim;
    }

    match cli.cmd {
        Cmd::Verify { tol_scale, out } => cmd_verify(&cfg, tol_scale, out.as_deref()),
        Cmd::Evolve { mode, t0, t1, dt, record_every, out } => {
            if let Some(v) = t0 {
                cfg.t0 = v;
            }
            if let Some(v) = t1 {
                cfg.t1 = v;
            }
            if let Some(v) = dt {
                cfg.dt = v;
            }
            if let Some(v) = record_every {
                cfg.record_every = v;
            }
            if !(cfg.dt > 0.0) {
                return fail("dt must be positive", 2);
            }
            if cfg.record_every == 0 {
                return fail("record-every must be at least 1", 2);
            }
            cmd_evolve(&cfg, mode, &out)
        }
        Cmd::Figures { which, out } => cmd_figures(&cfg, which, &out),
        Cmd::Scan { alphas, out } => match parse_range(&alphas) {
            Ok(values) => cmd_scan(&cfg, &values, &out),
            Err(e) => fail(e, 2),
        },
    }
}

/// 17-significant-digit formatting: round-trip exact for f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

// ---------------------------------------------------------------- verify

fn cmd_verify(cfg: &ScenarioConfig, tol_scale: f64, out: Option<&Path>) -> i32 {
    let tol_scale = tol_scale * cfg.tol_scale;
    let report = match run_all(&cfg.params(), tol_scale) {
        Ok(r) => r,
        Err(e) => return fail(e, 1),
    };
    for line in report.lines() {
        println!("{line}");
    }
    let overall = report.all_pass();
    println!("overall: {}", if overall { "PASS" } else { "FAIL" });

    if let Some(path) = out {
        let checks: Vec<serde_json::Value> = report
            .checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "id": c.id,
                    "name": c.name,
                    "pass": c.pass,
                    "parts": c.parts.iter().map(|p| serde_json::json!({
                        "label": p.label,
                        "measured": p.measured,
                        "tolerance": p.tolerance,
                        "pass": p.pass,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "tol_scale": report.tol_scale,
            "overall_pass": overall,
            "checks": checks,
        });
        if let Err(e) = write_file(path, &serde_json::to_string_pretty(&doc).unwrap()) {
            return fail(e, 1);
        }
    }
    if overall {
        0
    } else {
        1
    }
}

// ---------------------------------------------------------------- evolve

fn block_header(prefix: &str) -> String {
    let mut cols = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            cols.push(format!("re_{prefix}{i}{j}"));
            cols.push(format!("im_{prefix}{i}{j}"));
        }
    }
    cols.join(",")
}

fn block_row(m: &ComplexMatrix, start: usize) -> String {
    let mut cols = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let z = m[(start + i, start + j)];
            cols.push(fmt(z.re));
            cols.push(fmt(z.im));
        }
    }
    cols.join(",")
}

fn observable_row(m: &ComplexMatrix, h: &ComplexMatrix) -> Result<String, CoreError> {
    let mut cols = vec![fmt(mean_x(m))];
    for n in 1..=4u32 {
        cols.push(fmt(trace_moment(h, m, n)?.re));
    }
    Ok(cols.join(","))
}

fn cmd_evolve(cfg: &ScenarioConfig, mode: Mode, out: &Path) -> i32 {
    let params = cfg.params();
    if let Err(e) = params.validate() {
        return fail(e, 2);
    }
    let ham = params.hamiltonian().expect("validated");
    let h = ham.matrix();
    let nk = params.n_k;
    let mut csv = String::new();

    let result: Result<(), CoreError> = (|| {
        match mode {
            Mode::Nonlinear => {
                csv.push_str(&format!("t,{},mean_x,energy,m2,m3,m4\n", block_header("rho_")));
                let traj = integrate_matrix(
                    |_, r| nonlinear_rhs(&h, r),
                    &params.rho0(),
                    cfg.t0,
                    cfg.t1,
                    cfg.dt,
                    cfg.record_every,
                )?;
                for (t, m) in &traj.samples {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        fmt(*t),
                        block_row(m, nk),
                        observable_row(m, &h)?
                    ));
                }
            }
            Mode::LinearPartner => {
                csv.push_str(&format!("t,{},mean_x,energy,m2,m3,m4\n", block_header("rho_")));
                let rhs = |t: f64, r: &ComplexMatrix| -> Result<ComplexMatrix, CoreError> {
                    let h1 = h1_anticommutator(&params, t)?;
                    Ok(bracket(&h1, r, BracketKind::Commutator)?.scale(C64::new(0.0, -1.0)))
                };
                let rho_start = rho1_closed(&params).rho1(cfg.t0);
                let traj =
                    integrate_matrix(rhs, &rho_start, cfg.t0, cfg.t1, cfg.dt, cfg.record_every)?;
                for (t, m) in &traj.samples {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        fmt(*t),
                        block_row(m, nk),
                        observable_row(m, &h)?
                    ));
                }
            }
            Mode::Lax => {
                let mut cols = vec!["t".to_string()];
                for i in 0..3 {
                    cols.push(format!("re_psi{i}"));
                    cols.push(format!("im_psi{i}"));
                }
                csv.push_str(&cols.join(","));
                csv.push('\n');
                let mu = params.mu();
                let stride = cfg.record_every;
                integrate_vector_with(
                    |t, psi| lax_rhs(&h, &params.rho_seed(t), mu, psi),
                    &params.psi0(),
                    cfg.t0,
                    cfg.t1,
                    cfg.dt,
                    true,
                    |step, t, psi| {
                        if step % stride != 0 {
                            return;
                        }
                        let mut row = vec![fmt(t)];
                        for i in 0..3 {
                            row.push(fmt(psi[nk + i].re));
                            row.push(fmt(psi[nk + i].im));
                        }
                        csv.push_str(&row.join(","));
                        csv.push('\n');
                    },
                )?;
            }
            Mode::Dressed => {
                csv.push_str(&format!("t,{},mean_x,energy,m2,m3,m4\n", block_header("rho_")));
                let run =
                    reconstruct_dressed(&params, cfg.t0, cfg.t1, cfg.dt, cfg.record_every)?;
                for (t, m) in run.times.iter().zip(run.rescaled.iter()) {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        fmt(*t),
                        block_row(m, nk),
                        observable_row(m, &h)?
                    ));
                }
            }
        }
        Ok(())
    })();

    match result {
        Ok(()) => match write_file(out, &csv) {
            Ok(()) => 0,
            Err(e) => fail(e, 1),
        },
        Err(CoreError::NonFinite { step }) => {
            fail(format!("integration aborted at step {step}: non-finite state"), 1)
        }
        Err(e) => fail(e, 1),
    }
}

// --------------------------------------------------------------- figures

fn time_grid(t0: f64, t1: f64, step: f64) -> Vec<f64> {
    let n = ((t1 - t0) / step).round() as usize;
    (0..=n).map(|i| t0 + i as f64 * step).collect()
}

fn metadata_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    out.with_file_name(name)
}

fn cmd_figures(cfg: &ScenarioConfig, which: Fig, out: &Path) -> i32 {
    let params = cfg.params();
    if let Err(e) = params.validate() {
        return fail(e, 2);
    }
    let mut csv = String::new();
    let meta;

    match which {
        Fig::Fig1 => {
            let alphas = [5.0, 10.0, 20.0, 50.0, 100.0];
            let t_grid = time_grid(cfg.t0, cfg.t1, 0.05);
            csv.push_str("alpha,t,mean_x\n");
            for &alpha in &alphas {
                let pa = ScenarioParams { alpha, ..params };
                let sol = rho1_closed(&pa);
                for &t in &t_grid {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        fmt(alpha),
                        fmt(t),
                        fmt(mean_x(&sol.rho1(t)))
                    ));
                }
            }
            meta = serde_json::json!({
                "figure": "fig1",
                "alphas": alphas,
                "t0": cfg.t0, "t1": cfg.t1, "t_step": 0.05,
                "dim": cfg.dim, "eps": cfg.eps,
            });
        }
        Fig::Fig2 | Fig::Fig3 => {
            let (t0, t1, t_step, label) = match which {
                Fig::Fig2 => (0.0, 20.0, 0.1, "fig2"),
                _ => (-25.0, 60.0, 0.25, "fig3"),
            };
            let t_grid = time_grid(t0, t1, t_step);
            let x_grid = cfg.x_grid();
            let sol = rho1_closed(&params);
            let rows: Result<Vec<String>, CoreError> = t_grid
                .par_iter()
                .map(|&t| {
                    let rho = sol.rho1(t);
                    let mut chunk = String::new();
                    for &x in &x_grid {
                        let d = position_density(&rho, x)?.max(0.0);
                        chunk.push_str(&format!("{},{},{}\n", fmt(t), fmt(x), fmt(d)));
                    }
                    Ok(chunk)
                })
                .collect();
            csv.push_str("t,x,density\n");
            match rows {
                Ok(chunks) => {
                    for c in chunks {
                        csv.push_str(&c);
                    }
                }
                Err(e) => return fail(e, 1),
            }
            meta = serde_json::json!({
                "figure": label,
                "t0": t0, "t1": t1, "t_step": t_step,
                "x_min": cfg.x_min, "x_max": cfg.x_max, "x_points": cfg.x_points,
                "alpha": cfg.alpha, "dim": cfg.dim, "eps": cfg.eps,
            });
        }
    }

    if let Err(e) = write_file(out, &csv) {
        return fail(e, 1);
    }
    let meta_text = serde_json::to_string_pretty(&meta).unwrap();
    match write_file(&metadata_path(out), &meta_text) {
        Ok(()) => 0,
        Err(e) => fail(e, 1),
    }
}

// ------------------------------------------------------------------ scan

fn parse_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range must be MIN:MAX:COUNT, got '{spec}'"));
    }
    let min: f64 = parts[0].parse().map_err(|_| format!("bad range minimum '{}'", parts[0]))?;
    let max: f64 = parts[1].parse().map_err(|_| format!("bad range maximum '{}'", parts[1]))?;
    let count: usize =
        parts[2].parse().map_err(|_| format!("bad range count '{}'", parts[2]))?;
    if count == 0 {
        return Err("range count must be at least 1".into());
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let mut vals: Vec<f64> =
        (0..count).map(|i| min + (max - min) * i as f64 / (count - 1) as f64).collect();
    // Deterministic deduplication: sort then drop exact repeats.
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup();
    Ok(vals)
}

struct ScanRow {
    alpha: f64,
    transition_time: Option<f64>,
    past_limit_dev: f64,
    future_limit_dev: f64,
    energy_drift: f64,
}

fn scan_one(params: &ScenarioParams, alpha: f64) -> Result<ScanRow, CoreError> {
    let pa = ScenarioParams { alpha, ..*params };
    let sol = rho1_closed(&pa);
    let w0 = pa.omega0();
    let big_t = 200.0 / w0;

    // Transition time: argmax of ‖dρ_int/dt‖ via centered differences.
    let grid = vne_core::dynamics::linspace(-60.0, 90.0, 3001);
    let h = grid[1] - grid[0];
    let mut best = (0.0f64, f64::NAN);
    for &t in &grid {
        let slope = (&sol.rho_int(t + h) - &sol.rho_int(t - h))
            .frobenius_norm()
            / (2.0 * h);
        if slope > best.0 {
            best = (slope, t);
        }
    }
    let transition_time = if best.0 > 1e-12 { Some(best.1) } else { None };

    let past_limit_dev =
        (&sol.rho_int(-big_t) - &sol.rho_int_limit(TimeLimit::Past)).frobenius_norm();
    let future_limit_dev =
        (&sol.rho_int(big_t) - &sol.rho_int_limit(TimeLimit::Future)).frobenius_norm();

    let mut energy_drift = 0.0f64;
    let mut e0 = None;
    for &t in vne_core::dynamics::linspace(-25.0, 60.0, 500).iter() {
        let h1 = h1_anticommutator(&pa, t)?;
        let rho1 = sol.rho1(t);
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..rho1.dim() {
            for j in 0..rho1.dim() {
                tr += h1[(i, j)] * rho1[(j, i)];
            }
        }
        match e0 {
            None => e0 = Some(tr.re),
            Some(base) => energy_drift = energy_drift.max((tr.re - base).abs()),
        }
    }

    Ok(ScanRow { alpha, transition_time, past_limit_dev, future_limit_dev, energy_drift })
}

fn cmd_scan(cfg: &ScenarioConfig, alphas: &[f64], out: &Path) -> i32 {
    let params = cfg.params();
    if let Err(e) = params.validate() {
        return fail(e, 2);
    }
    let rows: Result<Vec<ScanRow>, CoreError> =
        alphas.par_iter().map(|&a| scan_one(&params, a)).collect();
    let rows = match rows {
        Ok(r) => r,
        Err(e) => return fail(e, 1),
    };

    let mut csv = String::from(
        "alpha,transition_defined,transition_time,past_limit_dev,future_limit_dev,energy_drift\n",
    );
    for r in &rows {
        let (defined, t) = match r.transition_time {
            Some(t) => ("1", fmt(t)),
            None => ("0", "nan".to_string()),
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(r.alpha),
            defined,
            t,
            fmt(r.past_limit_dev),
            fmt(r.future_limit_dev),
            fmt(r.energy_drift)
        ));
    }
    match write_file(out, &csv) {
        Ok(()) => 0,
        Err(e) => fail(e, 1),
    }
}
