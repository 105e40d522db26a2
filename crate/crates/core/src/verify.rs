//! Self-verification battery.
//!
//! Runs every analytic certificate and closed-loop property the library
//! promises, each against an independent oracle (quadrature, truncated
//! series, discrete recursions, or benchmark runs), and reports one
//! pass/fail line per property. The CLI `verify` subcommand and the
//! acceptance test suite both drive this battery.

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::adaptive::{self, AdaptiveConfig};
use crate::ankle::{closed_loop_residual_check, PdGains};
use crate::error::{Error, Result};
use crate::fourier;
use crate::gait::{self, GaitSpec};
use crate::metrics::compute_metrics;
use crate::planner::{self, PlannerGains};
use crate::sim::{jump_consistency_check, run_simulation, Controller, SimConfig, SimTrace};
use crate::surface::SurfaceMotion;

/// Battery knobs. The defaults are the shipped configuration; loosening the
/// Riccati tolerance exists purely as a negative control to show the
/// residual check has teeth.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub dare_tolerance: f64,
    pub dare_max_iters: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { dare_tolerance: 1e-12, dare_max_iters: 100_000 }
    }
}

/// Outcome of one property check.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl PropertyCheck {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// Truncated-series matrix exponential (30+ terms), used as an oracle for
/// the hold-equivalent operators. Kept in the verification layer; the
/// implementation path uses scaling-based exponentials.
pub fn series_expm(a: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let mut acc = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for j in 1..=terms {
        term = &term * a / j as f64;
        acc += &term;
    }
    acc
}

struct Bench {
    spec: GaitSpec,
    planner: PlannerGains,
    pd: PdGains,
    adaptive: AdaptiveConfig,
}

impl Bench {
    fn new(opts: &VerifyOptions) -> Result<Self> {
        let spec = GaitSpec::nominal();
        let q = Matrix2::from_diagonal(&Vector2::new(planner::DEFAULT_Q[0], planner::DEFAULT_Q[1]));
        let planner = planner::build_planner_with_tolerance(
            &spec,
            q,
            planner::DEFAULT_R,
            opts.dare_tolerance,
            opts.dare_max_iters,
        )?;
        Ok(Self { spec, planner, pd: PdGains::nominal(), adaptive: AdaptiveConfig::nominal() })
    }

    fn run(&self, controller: Controller, motion: SurfaceMotion) -> Result<SimTrace> {
        let config = SimConfig::new(controller, motion);
        run_simulation(&config, &self.spec, &self.planner, &self.pd, &self.adaptive)
    }
}

/// Run the whole battery. Infrastructure failures (a run that errors out
/// unexpectedly) surface as `Err`; property outcomes are in the returned
/// checks.
pub fn run_battery(opts: &VerifyOptions) -> Result<Vec<PropertyCheck>> {
    let bench = Bench::new(opts)?;
    let mut checks = vec![
        check_dare_residual(&bench),
        check_lyapunov_residual(&bench),
        check_planner_decay(&bench),
        check_step_transition_identity(&bench),
        check_profile_periodicity(&bench),
        check_discretization_fidelity(&bench)?,
        check_fourier_amplitude(&bench),
        check_fourier_reconstruction(&bench),
    ];

    // Shared benchmark runs.
    let pd1 = bench.run(Controller::PdFf, SurfaceMotion::case1())?;
    let pd2 = bench.run(Controller::PdFf, SurfaceMotion::case2())?;
    let pd3 = bench.run(Controller::PdFf, SurfaceMotion::case3())?;
    let ad1 = bench.run(Controller::Adaptive, SurfaceMotion::case1())?;
    let ad2 = bench.run(Controller::Adaptive, SurfaceMotion::case2())?;
    let ad3 = bench.run(Controller::Adaptive, SurfaceMotion::case3())?;

    checks.push(check_error_continuity(&bench, &[&pd1, &pd2, &pd3, &ad1, &ad2, &ad3]));
    checks.push(check_residual_certificate(&bench, &pd1, &pd2));
    checks.push(check_projection_bound(&bench, &[&ad1, &ad2, &ad3]));
    checks.push(check_covariance_corridor(&bench, &[&ad1, &ad2, &ad3]));
    checks.push(check_boundedness(&[&pd1, &pd2, &pd3, &ad1, &ad2, &ad3]));
    checks.push(check_adaptive_superiority(&pd2, &ad2, &pd3, &ad3)?);
    checks.push(check_velocity_fit(&bench, &[&pd1, &pd2, &ad1, &ad2])?);
    checks.push(check_torque_budget(&bench, &pd2, &ad2)?);
    checks.push(check_ankle_off_motivation(&bench));
    checks.push(check_substep_convergence(&bench)?);

    Ok(checks)
}

fn check_dare_residual(bench: &Bench) -> PropertyCheck {
    let r = bench.planner.dare_residual();
    PropertyCheck::new(
        "dare_residual",
        r <= 1e-9,
        format!("Riccati residual Frobenius norm {r:.3e} (limit 1e-9)"),
    )
}

fn check_lyapunov_residual(bench: &Bench) -> PropertyCheck {
    let r = bench.pd.lyapunov_residual();
    PropertyCheck::new(
        "lyapunov_residual",
        r <= 1e-10,
        format!("Lyapunov residual {r:.3e} (limit 1e-10)"),
    )
}

fn check_planner_decay(bench: &Bench) -> PropertyCheck {
    // Post-touchdown profile-error recursion from the rest start.
    let map = bench.planner.profile_error_map();
    let mut ec = gait::desired_initial_state(&bench.spec).as_vector();
    let mut norms = vec![ec.norm()];
    for _ in 0..10 {
        ec = map * ec;
        norms.push(ec.norm());
    }
    let decay = norms[10] / norms[0];
    // Contraction ratio measured after the non-normal transient (two steps).
    let measured = (norms[10] / norms[2]).powf(1.0 / 8.0);
    let rho = bench.planner.spectral_radius();
    let ratio_ok = (measured - rho).abs() <= 0.1 * rho;
    PropertyCheck::new(
        "planner_decay",
        decay <= 1e-3 && ratio_ok,
        format!(
            "10-step decay {decay:.3e} (limit 1e-3); measured ratio {measured:.4} vs spectral radius {rho:.4}"
        ),
    )
}

fn check_step_transition_identity(bench: &Bench) -> PropertyCheck {
    let a_s = gait::step_transition(&bench.spec);
    let m = a_s - Matrix2::identity();
    let target = Vector2::new(bench.spec.nominal_step(), 0.0);
    let mut worst: f64 = 0.0;
    for k in 1..=30 {
        let xd = gait::desired_state(&bench.spec, bench.spec.touchdown_time(k)).as_vector();
        worst = worst.max((m * xd - target).norm());
    }
    PropertyCheck::new(
        "step_transition_identity",
        worst <= 1e-9,
        format!("max |(A_s - I) xd(t_k+) - [Ts v, 0]| over k<=30: {worst:.3e} (limit 1e-9)"),
    )
}

fn check_profile_periodicity(bench: &Bench) -> PropertyCheck {
    let spec = &bench.spec;
    let reference = gait::desired_state(spec, spec.touchdown_time(1));
    let mut worst: f64 = 0.0;
    for k in 2..=30 {
        let xk = gait::desired_state(spec, spec.touchdown_time(k));
        worst = worst.max((xk.pos - reference.pos).abs().max((xk.vel - reference.vel).abs()));
    }
    // Flow-and-reset cycle must come back to the same state as well.
    let mut x = reference;
    for _ in 0..5 {
        x = gait::propagate_profile(x, spec.step_period, spec);
        x = gait::touchdown_jump(x, spec.nominal_step());
    }
    worst = worst.max((x.pos - reference.pos).abs().max((x.vel - reference.vel).abs()));
    PropertyCheck::new(
        "profile_periodicity",
        worst <= 1e-9,
        format!("max post-touchdown deviation {worst:.3e} (limit 1e-9)"),
    )
}

fn check_discretization_fidelity(bench: &Bench) -> Result<PropertyCheck> {
    let ops = adaptive::discretize(&bench.adaptive, &bench.pd)?;
    let t = bench.adaptive.t_samp;
    let n = bench.adaptive.n_phi;
    let sigma = bench.adaptive.sigma;

    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -bench.pd.kp, -bench.pd.kd]);
    let a_oracle = series_expm(&(a.clone() * t), 35);
    let mut worst = (0..4)
        .map(|i| (ops.a_d[(i / 2, i % 2)] - a_oracle[(i / 2, i % 2)]).abs())
        .fold(0.0f64, f64::max);

    let mut f = DMatrix::<f64>::from_diagonal_element(n, n, -sigma);
    for i in 0..n - 1 {
        f[(i, i + 1)] = sigma;
    }
    let f_oracle = series_expm(&(f.clone() * t), 35);
    worst = worst.max((ops.f_d.clone() - f_oracle).abs().max());

    let dim = 2 + n;
    let mut block = DMatrix::<f64>::zeros(dim, dim);
    block.view_mut((0, 0), (2, 2)).copy_from(&a);
    block[(0, 2)] = bench.pd.b[0] * sigma;
    block[(1, 2)] = bench.pd.b[1] * sigma;
    block.view_mut((2, 2), (n, n)).copy_from(&f);
    let blk_oracle = series_expm(&(block * t), 35);
    worst = worst.max((ops.phi_block.clone() - blk_oracle).abs().max());

    Ok(PropertyCheck::new(
        "discretization_fidelity",
        worst <= 1e-12,
        format!("max |operator - series oracle| = {worst:.3e} (limit 1e-12)"),
    ))
}

fn check_fourier_amplitude(bench: &Bench) -> PropertyCheck {
    let spec = &bench.spec;
    let xi1 = fourier::fourier_amplitudes(spec, 1)[0];
    // Simpson quadrature over the jump-free period.
    let ts = spec.step_period;
    let n = 20_000usize;
    let h = ts / n as f64;
    let f = |t: f64| {
        gait::desired_state(spec, t).pos * (2.0 * std::f64::consts::PI * t / ts).sin()
    };
    let a = -0.5 * ts;
    let mut s = f(a) + f(a + ts);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * j as f64);
    }
    let numeric = (2.0 / ts) * s * h / 3.0;
    let amp_err = (xi1 - numeric).abs();

    let xi = fourier::fourier_amplitudes(spec, 1000);
    let scaled: Vec<f64> = (100..=1000).map(|k| k as f64 * xi[k - 1].abs()).collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0f64, f64::max);
    let spread = hi / lo - 1.0;

    PropertyCheck::new(
        "fourier_amplitude",
        amp_err <= 1e-6 && spread <= 0.05,
        format!("xi_1 vs quadrature: {amp_err:.3e} (limit 1e-6); k|xi_k| spread {spread:.3e} (limit 0.05)"),
    )
}

fn check_fourier_reconstruction(bench: &Bench) -> PropertyCheck {
    let mut prev = f64::INFINITY;
    let mut detail = String::new();
    let mut monotone = true;
    for n in [1usize, 5, 20, 100] {
        let r = fourier::fourier_reconstruction_check(&bench.spec, n);
        if r.max_error_interior >= prev {
            monotone = false;
        }
        detail.push_str(&format!("n={n}: {:.3e}; ", r.max_error_interior));
        prev = r.max_error_interior;
    }
    PropertyCheck::new(
        "fourier_reconstruction",
        monotone,
        format!("interior max error must decrease monotonically: {detail}"),
    )
}

fn check_error_continuity(bench: &Bench, traces: &[&SimTrace]) -> PropertyCheck {
    let mut worst: f64 = 0.0;
    for t in traces {
        let rep = jump_consistency_check(t, &bench.spec);
        worst = worst
            .max(rep.max_error_discontinuity)
            .max(rep.max_profile_jump_mismatch)
            .max(rep.max_desired_jump_mismatch);
    }
    PropertyCheck::new(
        "error_continuity",
        worst <= 1e-12,
        format!("max touchdown discontinuity/jump mismatch {worst:.3e} (limit 1e-12)"),
    )
}

fn check_residual_certificate(bench: &Bench, pd1: &SimTrace, pd2: &SimTrace) -> PropertyCheck {
    let vert = crate::plant::VerticalRegulation::ideal(&bench.spec);
    let cert = closed_loop_residual_check(&bench.pd, pd2, &SurfaceMotion::case2(), &vert, &bench.spec);
    let quiet_terminal = pd1.rows.last().map(|r| r.error.norm()).unwrap_or(f64::INFINITY);
    let passed = cert.applicable && cert.tail_inside && quiet_terminal <= 1e-4;
    PropertyCheck::new(
        "residual_certificate",
        passed,
        format!(
            "norm condition {} (rho1 {:.3} < {:.3}); tail max |e| {:.3e} vs radius {:.3e}; quiet terminal |e| {:.3e} (limit 1e-4)",
            if cert.applicable { "holds" } else { "fails" },
            cert.rho1,
            1.0 / (2.0 * cert.l_norm),
            cert.tail_max_error,
            cert.radius,
            quiet_terminal
        ),
    )
}

fn check_projection_bound(bench: &Bench, traces: &[&SimTrace]) -> PropertyCheck {
    let cap = bench.adaptive.theta_bound;
    let mut worst: f64 = 0.0;
    for t in traces {
        for r in &t.rows {
            worst = worst.max(r.theta_norm);
        }
    }
    PropertyCheck::new(
        "projection_bound",
        worst <= cap + 1e-12,
        format!("max |theta| over adaptive runs {worst:.3e} (cap {cap})"),
    )
}

fn check_covariance_corridor(bench: &Bench, traces: &[&SimTrace]) -> PropertyCheck {
    let (lo, hi) = bench.adaptive.covariance_bounds();
    let tol = 1e-9;
    let mut ok = true;
    let mut entered_any = false;
    let mut detail = String::new();
    for t in traces {
        let mut entered = false;
        let mut floor: f64 = f64::INFINITY;
        for r in &t.rows {
            floor = floor.min(r.p_eig_min);
            let inside = r.p_eig_min >= lo - tol && r.p_eig_max <= hi + tol;
            if !entered && inside {
                entered = true;
                entered_any = true;
            } else if entered && !inside {
                ok = false;
            }
        }
        // The floor must never fall below the corridor even before entry.
        if floor < lo - tol {
            ok = false;
        }
        detail.push_str(&format!("entered={entered} floor={floor:.3e}; "));
    }
    PropertyCheck::new(
        "covariance_corridor",
        ok,
        format!("corridor [{lo:.3e}, {hi:.3e}]; once inside, stays inside; {detail}entered_any={entered_any}"),
    )
}

fn check_boundedness(traces: &[&SimTrace]) -> PropertyCheck {
    let mut worst: f64 = 0.0;
    for t in traces {
        for r in &t.rows {
            for v in [
                r.plant.pos,
                r.plant.vel,
                r.desired.pos,
                r.desired.vel,
                r.commanded.pos,
                r.commanded.vel,
                r.error.pos,
                r.error.vel,
                r.tau_commanded,
                r.v,
                r.zeta,
                r.theta_norm,
            ] {
                worst = worst.max(v.abs());
            }
        }
    }
    PropertyCheck::new(
        "boundedness",
        worst <= 1e3,
        format!("largest signal magnitude over stabilized runs {worst:.3e} (limit 1e3)"),
    )
}

fn check_adaptive_superiority(
    pd2: &SimTrace,
    ad2: &SimTrace,
    pd3: &SimTrace,
    ad3: &SimTrace,
) -> Result<PropertyCheck> {
    let r2 = compute_metrics(ad2)?.rmse / compute_metrics(pd2)?.rmse;
    let r3 = compute_metrics(ad3)?.rmse / compute_metrics(pd3)?.rmse;
    Ok(PropertyCheck::new(
        "adaptive_superiority",
        r2 <= 0.67 && r3 <= 0.67,
        format!("RMSE ratio adaptive/pd: case2 {r2:.3}, case3 {r3:.3} (limit 0.67)"),
    ))
}

fn check_velocity_fit(bench: &Bench, traces: &[&SimTrace]) -> Result<PropertyCheck> {
    let target = bench.spec.desired_velocity;
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for t in traces {
        let fit = compute_metrics(t)?.fit_slope;
        worst = worst.max((fit - target).abs() / target);
        detail.push_str(&format!("{:.5} ", fit));
    }
    Ok(PropertyCheck::new(
        "velocity_fit",
        worst <= 0.01,
        format!("fit slopes {detail}(target {target}, worst relative error {worst:.4})"),
    ))
}

fn check_torque_budget(bench: &Bench, pd2: &SimTrace, ad2: &SimTrace) -> Result<PropertyCheck> {
    let limit = bench.spec.torque_limit;
    let t_pd = compute_metrics(pd2)?.trq;
    let t_ad = compute_metrics(ad2)?.trq;
    Ok(PropertyCheck::new(
        "torque_budget",
        t_pd < limit && t_ad < limit,
        format!("commanded torque peaks: pd_ff {t_pd:.2}, adaptive {t_ad:.2} (limit {limit})"),
    ))
}

fn check_ankle_off_motivation(bench: &Bench) -> PropertyCheck {
    // Footstep control alone leaves the continuous phase unstabilized: the
    // profile error still converges, but the tracking error grows without
    // bound (numerically seeded by integration rounding along the unstable
    // mode, typically ending in divergence before the horizon).
    let outcome = bench.run(Controller::AnkleOff, SurfaceMotion::case1());
    let (diverged, trace) = match outcome {
        Ok(t) => (false, t),
        Err(Error::Diverged { trace, .. }) => (true, *trace),
        Err(e) => {
            return PropertyCheck::new(
                "ankle_off_motivation",
                false,
                format!("unexpected failure: {e}"),
            )
        }
    };
    let ec_last =
        trace.touchdowns.last().map(|td| td.profile_error_post.norm()).unwrap_or(f64::INFINITY);
    let max_e = trace.rows.iter().map(|r| r.error.norm()).fold(0.0f64, f64::max);
    let grew = diverged || max_e > 0.1;
    PropertyCheck::new(
        "ankle_off_motivation",
        ec_last <= 1e-6 && grew,
        format!(
            "profile error at last touchdown {ec_last:.3e} (limit 1e-6); tracking error {} (diverged: {diverged}, max |e| {max_e:.3e})",
            if grew { "grows" } else { "stayed small" }
        ),
    )
}

fn check_substep_convergence(bench: &Bench) -> Result<PropertyCheck> {
    let mut c4 = SimConfig::new(Controller::PdFf, SurfaceMotion::case2());
    c4.substeps = 4;
    let mut c8 = c4.clone();
    c8.substeps = 8;
    let t4 = run_simulation(&c4, &bench.spec, &bench.planner, &bench.pd, &bench.adaptive)?;
    let t8 = run_simulation(&c8, &bench.spec, &bench.planner, &bench.pd, &bench.adaptive)?;
    let a = t4.rows.last().unwrap().plant;
    let b = t8.rows.last().unwrap().plant;
    let diff = (a.pos - b.pos).abs().max((a.vel - b.vel).abs());
    Ok(PropertyCheck::new(
        "substep_convergence",
        diff < 1e-7,
        format!("terminal state shift when halving the substep: {diff:.3e} (limit 1e-7)"),
    ))
}
