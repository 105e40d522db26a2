//! Continuous ankle-torque control and its stability certificate.
//!
//! The torque combines a feed-forward term that cancels the pendulum's
//! tipping moment and height-mismatch term with PD feedback on the tracking
//! error, plus an input channel for the adaptive compensator. With the
//! torque substituted into the plant, the error obeys
//! de/dt = (A + D(t)) e + B (v - d(t)), where A = [[0, 1], [-kp, -kd]],
//! B = [0, kp], D carries the vertical surface acceleration, and d lumps
//! the surface-induced forcing.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::gait::{GaitSpec, PendulumState};
use crate::plant::VerticalRegulation;
use crate::sim::SimTrace;
use crate::surface::SurfaceMotion;

/// PD gains with the derived closed-loop matrices and Lyapunov certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdGains {
    pub kp: f64,
    pub kd: f64,
    /// Closed-loop error matrix [[0, 1], [-kp, -kd]].
    pub a: Matrix2<f64>,
    /// Input map [0, kp].
    pub b: Vector2<f64>,
    /// Solution of A' L + L A = -I.
    pub l: Matrix2<f64>,
}

impl PdGains {
    pub fn new(kp: f64, kd: f64) -> Result<Self> {
        if !(kp.is_finite() && kp > 0.0 && kd.is_finite() && kd > 0.0) {
            return Err(Error::invalid("PD gains must be positive and finite"));
        }
        let a = Matrix2::new(0.0, 1.0, -kp, -kd);
        let b = Vector2::new(0.0, kp);
        // Closed-form Lyapunov solve: with L = [[l11, l12], [l12, l22]], the
        // equation A'L + LA = -I reduces to three scalar conditions.
        let l12 = 1.0 / (2.0 * kp);
        let l22 = (1.0 + 2.0 * l12) / (2.0 * kd);
        let l11 = kd * l12 + kp * l22;
        let l = Matrix2::new(l11, l12, l12, l22);
        Ok(Self { kp, kd, a, b, l })
    }

    /// Controller gains used for the benchmark runs: kp = 25, kd = 10.
    pub fn nominal() -> Self {
        Self::new(25.0, 10.0).expect("nominal gains are valid")
    }

    /// Max-norm residual of A'L + LA + I.
    pub fn lyapunov_residual(&self) -> f64 {
        (self.a.transpose() * self.l + self.l * self.a + Matrix2::identity())
            .abs()
            .max()
    }

    /// Spectral norm of the symmetric Lyapunov solution.
    pub fn l_norm(&self) -> f64 {
        let (a, b, c) = (self.l[(0, 0)], self.l[(0, 1)], self.l[(1, 1)]);
        let mean = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        mean + rad
    }
}

/// Commanded ankle torque, before saturation:
/// tau = m z [ (-g/z - kp) e - kd edot - (g/z_d - g/z) xc + kp v ].
pub fn ankle_torque(
    gains: &PdGains,
    error: PendulumState,
    commanded_pos: f64,
    z_sc: f64,
    v: f64,
    spec: &GaitSpec,
) -> Result<f64> {
    if z_sc <= 0.0 {
        return Err(Error::SingularHeight(z_sc));
    }
    let g = spec.gravity;
    let height_mismatch = g / spec.nominal_height - g / z_sc;
    Ok(spec.mass
        * z_sc
        * ((-g / z_sc - gains.kp) * error.pos
            - gains.kd * error.vel
            - height_mismatch * commanded_pos
            + gains.kp * v))
}

/// The lumped input disturbance d(t) = (-1/kp)(x.. - xc/z * z..).
///
/// Analysis-only: the controller never evaluates this (the surface motion is
/// unknown to it); tests use it to check the closed-loop error algebra.
pub fn input_disturbance_oracle(
    t: f64,
    commanded_pos: f64,
    z_sc: f64,
    motion: &SurfaceMotion,
    gains: &PdGains,
) -> f64 {
    let (xddot_ws, zddot_ws) = motion.accel(t);
    (-1.0 / gains.kp) * (xddot_ws - commanded_pos / z_sc * zddot_ws)
}

/// Residual-set certificate for the PD loop without the adaptive channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCertificate {
    /// Spectral norm of the Lyapunov solution.
    pub l_norm: f64,
    /// Bound on the forcing magnitude sup |x.. - xc/z * z..|.
    pub rho0: f64,
    /// Bound on the parametric perturbation sup |z.. / z|.
    pub rho1: f64,
    /// Whether rho1 < 1 / (2 ||L||); the certificate only applies then.
    pub applicable: bool,
    /// Radius of the residual set, 2 ||L|| rho0 / (1 - 2 rho1 ||L||).
    pub radius: f64,
    /// Largest |e(t)| observed past `tail_start`.
    pub tail_max_error: f64,
    pub tail_start: f64,
    /// Tail samples all inside the residual set (meaningful when applicable).
    pub tail_inside: bool,
}

/// Evaluate the residual-set certificate against a completed run.
///
/// The disturbance bounds come from the motion's declared envelopes and the
/// worst-case height; the commanded-position bound uses the larger of the
/// measured post-transient sup and the profile's own amplitude T_s v^d / 2.
pub fn closed_loop_residual_check(
    gains: &PdGains,
    trace: &SimTrace,
    motion: &SurfaceMotion,
    vert: &VerticalRegulation,
    spec: &GaitSpec,
) -> ResidualCertificate {
    let l_norm = gains.l_norm();
    let (x_bar, z_bar) = motion.accel_bounds();
    let z_min = vert.min_height();
    let rho1 = z_bar / z_min;

    let transient_end = 5.0;
    let tail_start = 10.0;
    let mut xc_sup: f64 = 0.5 * spec.nominal_step();
    let mut tail_max: f64 = 0.0;
    for row in &trace.rows {
        if row.t >= transient_end {
            xc_sup = xc_sup.max(row.commanded.pos.abs());
        }
        if row.t > tail_start {
            tail_max = tail_max.max(row.error.norm());
        }
    }

    let rho0 = x_bar + xc_sup / z_min * z_bar;
    let applicable = rho1 < 1.0 / (2.0 * l_norm);
    let radius = if applicable {
        2.0 * l_norm * rho0 / (1.0 - 2.0 * rho1 * l_norm)
    } else {
        f64::INFINITY
    };
    ResidualCertificate {
        l_norm,
        rho0,
        rho1,
        applicable,
        radius,
        tail_max_error: tail_max,
        tail_start,
        tail_inside: applicable && tail_max <= radius,
    }
}
