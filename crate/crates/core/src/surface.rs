//! Surface motion profiles and their analytic accelerations.
//!
//! The plant consumes support-point accelerations in the world frame. Each
//! motion variant stores a closed-form position profile and differentiates
//! it symbolically, so no finite differencing ever happens in the control
//! path. Positions are exposed too; tests integrate the accelerations back
//! to positions to pin the derivative formulas down.

use serde::{Deserialize, Serialize};

/// One sinusoidal acceleration component a sin(w t + phase).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sinusoid {
    /// Acceleration amplitude (m/s^2).
    pub amplitude: f64,
    /// Angular frequency (rad/s).
    pub frequency: f64,
    /// Phase offset (rad).
    pub phase: f64,
}

/// Acceleration profile of one axis: bias + sum of sinusoids.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisMotion {
    /// Constant acceleration bias (m/s^2).
    pub bias: f64,
    pub components: Vec<Sinusoid>,
}

impl AxisMotion {
    fn accel(&self, t: f64) -> f64 {
        let mut a = self.bias;
        for c in &self.components {
            a += c.amplitude * (c.frequency * t + c.phase).sin();
        }
        a
    }

    /// Position reached from rest at the origin under this acceleration.
    fn position(&self, t: f64) -> f64 {
        let mut p = 0.5 * self.bias * t * t;
        for c in &self.components {
            let (a, w, ph) = (c.amplitude, c.frequency, c.phase);
            p += (a / w) * ph.cos() * t - (a / (w * w)) * ((w * t + ph).sin() - ph.sin());
        }
        p
    }

    fn accel_bound(&self) -> f64 {
        self.bias.abs() + self.components.iter().map(|c| c.amplitude.abs()).sum::<f64>()
    }
}

/// Closed-form motion of the support surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SurfaceMotion {
    /// Fixed ground.
    Stationary,
    /// Constant-parameter sinusoid sums per axis.
    SinusoidSum { x: AxisMotion, z: AxisMotion },
    /// Scripted non-periodic motion: a decaying polynomial-modulated sweep
    /// in x and a two-tone profile with a slow quadratic chirp in z.
    /// x(t) = 0.004 t^2 sin(4t) e^(-t/5),
    /// z(t) = 0.04 (0.5 cos(6t) + cos(0.1 t^2) - 1.5).
    TransientChirp,
}

impl SurfaceMotion {
    /// Benchmark case "case1": no surface motion.
    pub fn case1() -> Self {
        SurfaceMotion::Stationary
    }

    /// Benchmark case "case2": x(t) = 0.2 (1 - cos 0.7t), z(t) = 0.5 (1 - cos 0.4t).
    ///
    /// Expressed as acceleration sinusoids: the second derivative of
    /// c (1 - cos(w t)) is c w^2 cos(w t) = c w^2 sin(w t + pi/2), and the
    /// generic double integral from rest recovers the position exactly.
    pub fn case2() -> Self {
        let half_pi = std::f64::consts::FRAC_PI_2;
        SurfaceMotion::SinusoidSum {
            x: AxisMotion {
                bias: 0.0,
                components: vec![Sinusoid { amplitude: 0.2 * 0.7 * 0.7, frequency: 0.7, phase: half_pi }],
            },
            z: AxisMotion {
                bias: 0.0,
                components: vec![Sinusoid { amplitude: 0.5 * 0.4 * 0.4, frequency: 0.4, phase: half_pi }],
            },
        }
    }

    /// Benchmark case "case3": the transient chirp profile.
    pub fn case3() -> Self {
        SurfaceMotion::TransientChirp
    }

    /// Look up a benchmark case by its CLI identifier.
    pub fn from_case_id(id: &str) -> Option<Self> {
        match id {
            "case1" => Some(Self::case1()),
            "case2" => Some(Self::case2()),
            "case3" => Some(Self::case3()),
            _ => None,
        }
    }

    /// World-frame support-point acceleration (x, z) at time `t`.
    pub fn accel(&self, t: f64) -> (f64, f64) {
        match self {
            SurfaceMotion::Stationary => (0.0, 0.0),
            SurfaceMotion::SinusoidSum { x, z } => (x.accel(t), z.accel(t)),
            SurfaceMotion::TransientChirp => (chirp_xddot(t), chirp_zddot(t)),
        }
    }

    /// World-frame support-point position (x, z) at time `t`, starting from
    /// rest at the origin.
    pub fn position(&self, t: f64) -> (f64, f64) {
        match self {
            SurfaceMotion::Stationary => (0.0, 0.0),
            SurfaceMotion::SinusoidSum { x, z } => (x.position(t), z.position(t)),
            SurfaceMotion::TransientChirp => (
                0.004 * t * t * (4.0 * t).sin() * (-t / 5.0).exp(),
                0.04 * (0.5 * (6.0 * t).cos() + (0.1 * t * t).cos() - 1.5),
            ),
        }
    }

    /// Declared uniform acceleration bounds (sup |x..|, sup |z..|).
    ///
    /// For sinusoid sums this is the triangle-inequality envelope. The
    /// transient chirp grows quadratically in its z chirp term, so its bound
    /// holds on the 15 s evaluation horizon (checked by test against a dense
    /// grid supremum).
    pub fn accel_bounds(&self) -> (f64, f64) {
        match self {
            SurfaceMotion::Stationary => (0.0, 0.0),
            SurfaceMotion::SinusoidSum { x, z } => (x.accel_bound(), z.accel_bound()),
            SurfaceMotion::TransientChirp => (0.88, 1.02),
        }
    }

    /// Number of sinusoidal components across both axes, used by the
    /// adaptive-order sanity warning. The transient chirp counts its three
    /// oscillatory terms.
    pub fn sinusoid_count(&self) -> usize {
        match self {
            SurfaceMotion::Stationary => 0,
            SurfaceMotion::SinusoidSum { x, z } => x.components.len() + z.components.len(),
            SurfaceMotion::TransientChirp => 3,
        }
    }
}

// d^2/dt^2 of 0.004 t^2 sin(4t) e^(-t/5), expanded by the product rule.
fn chirp_xddot(t: f64) -> f64 {
    let (s, c) = (4.0 * t).sin_cos();
    0.004
        * (-t / 5.0).exp()
        * (2.0 * s + (16.0 * c - 0.8 * s) * t - (15.96 * s + 1.6 * c) * t * t)
}

// d^2/dt^2 of 0.04 (0.5 cos(6t) + cos(0.1 t^2) - 1.5).
fn chirp_zddot(t: f64) -> f64 {
    let q = 0.1 * t * t;
    0.04 * (-18.0 * (6.0 * t).cos() - 0.2 * q.sin() - 0.04 * t * t * q.cos())
}
