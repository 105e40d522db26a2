//! Gait parameters and the desired/commanded motion profiles.
//!
//! The walker is reduced to a point mass on a massless leg. Between
//! touchdowns the horizontal CoM state flows under the inverted-pendulum
//! field; at the scheduled touchdown instants the support point moves by
//! the step length, which shifts the relative coordinate instantaneously.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Horizontal CoM state relative to the current support point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumState {
    /// Position of the CoM relative to the support point (m).
    pub pos: f64,
    /// Velocity of the CoM relative to the support point (m/s).
    pub vel: f64,
}

impl PendulumState {
    pub const ZERO: PendulumState = PendulumState { pos: 0.0, vel: 0.0 };

    pub fn new(pos: f64, vel: f64) -> Self {
        Self { pos, vel }
    }

    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.pos, self.vel)
    }

    pub fn from_vector(v: Vector2<f64>) -> Self {
        Self { pos: v.x, vel: v.y }
    }

    pub fn norm(&self) -> f64 {
        self.pos.hypot(self.vel)
    }

    pub fn is_finite(&self) -> bool {
        self.pos.is_finite() && self.vel.is_finite()
    }
}

/// Gait timing and pendulum constants.
///
/// `lambda` is never stored: it is recomputed from gravity and nominal
/// height every time so it cannot go stale when fields change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitSpec {
    /// Step period T_s (s). Touchdowns are scheduled at t_k = (k - 0.5) T_s.
    pub step_period: f64,
    /// Desired average walking velocity (m/s).
    pub desired_velocity: f64,
    /// Nominal CoM height above the support point (m).
    pub nominal_height: f64,
    /// Gravitational acceleration (m/s^2).
    pub gravity: f64,
    /// Robot mass (kg). Scales torque magnitudes only.
    pub mass: f64,
    /// Ankle torque limit (N.m).
    pub torque_limit: f64,
}

impl GaitSpec {
    pub fn new(
        step_period: f64,
        desired_velocity: f64,
        nominal_height: f64,
        gravity: f64,
        mass: f64,
        torque_limit: f64,
    ) -> Result<Self> {
        let positive = [
            ("step_period", step_period),
            ("nominal_height", nominal_height),
            ("gravity", gravity),
            ("mass", mass),
            ("torque_limit", torque_limit),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if !desired_velocity.is_finite() {
            return Err(Error::invalid("desired_velocity must be finite"));
        }
        Ok(Self {
            step_period,
            desired_velocity,
            nominal_height,
            gravity,
            mass,
            torque_limit,
        })
    }

    /// Benchmark gait used throughout the test suite and as the CLI default:
    /// T_s = 0.5 s, v = 0.2 m/s, height 0.74 m, g = 9.81, m = 32 kg, limit 40 N.m.
    pub fn nominal() -> Self {
        Self::new(0.5, 0.2, 0.74, 9.81, 32.0, 40.0).expect("nominal gait is valid")
    }

    /// Pendulum frequency sqrt(g / z) (1/s), recomputed on every call.
    pub fn lambda(&self) -> f64 {
        (self.gravity / self.nominal_height).sqrt()
    }

    /// Scheduled touchdown instant t_k = (k - 0.5) T_s for k >= 1.
    pub fn touchdown_time(&self, k: usize) -> f64 {
        (k as f64 - 0.5) * self.step_period
    }

    /// Nominal step length covered per period at the desired velocity.
    pub fn nominal_step(&self) -> f64 {
        self.step_period * self.desired_velocity
    }
}

/// Desired and commanded profile states at one instant.
///
/// The commanded profile starts at the plant's initial state and is pulled
/// toward the desired profile by the footstep planner, which keeps the
/// tracking error continuous across touchdowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePair {
    pub desired: PendulumState,
    pub commanded: PendulumState,
}

impl ProfilePair {
    /// Profile error e^c = desired - commanded.
    pub fn profile_error(&self) -> PendulumState {
        PendulumState::new(
            self.desired.pos - self.commanded.pos,
            self.desired.vel - self.commanded.vel,
        )
    }
}

/// State-transition matrix of the pendulum flow over `dt`:
/// [[cosh(l dt), sinh(l dt)/l], [l sinh(l dt), cosh(l dt)]].
pub fn flow_matrix(spec: &GaitSpec, dt: f64) -> Matrix2<f64> {
    let l = spec.lambda();
    let c = (l * dt).cosh();
    let s = (l * dt).sinh();
    Matrix2::new(c, s / l, l * s, c)
}

/// Transition matrix over one full step period.
pub fn step_transition(spec: &GaitSpec) -> Matrix2<f64> {
    flow_matrix(spec, spec.step_period)
}

/// Initial desired state: zero position, velocity chosen so the profile
/// averages exactly the desired velocity over each step period.
pub fn desired_initial_state(spec: &GaitSpec) -> PendulumState {
    let l = spec.lambda();
    let vel = spec.desired_velocity * spec.step_period * l / (2.0 * (0.5 * l * spec.step_period).sinh());
    PendulumState::new(0.0, vel)
}

/// Propagate a profile state through the continuous pendulum flow for `dt`.
pub fn propagate_profile(state: PendulumState, dt: f64, spec: &GaitSpec) -> PendulumState {
    debug_assert!(dt >= 0.0, "propagation interval must be non-negative");
    PendulumState::from_vector(flow_matrix(spec, dt) * state.as_vector())
}

/// Touchdown map: the support point moves forward by `u`, so the relative
/// position drops by `u` while the velocity is untouched.
pub fn touchdown_jump(state: PendulumState, u: f64) -> PendulumState {
    PendulumState::new(state.pos - u, state.vel)
}

/// Desired profile evaluated in closed form.
///
/// The profile is the periodic saddle orbit of the pendulum flow with a
/// position reset of T_s v^d at every touchdown, so it is computed directly
/// from the wrapped phase instead of being integrated forward (numerically
/// propagating a saddle orbit for many steps amplifies rounding along the
/// unstable direction). At a touchdown instant the post-jump value is
/// returned; the pre-impact value is `desired_state(t) + [T_s v^d, 0]`.
pub fn desired_state(spec: &GaitSpec, t: f64) -> PendulumState {
    let l = spec.lambda();
    let ts = spec.step_period;
    // Wrapped phase in [-T_s/2, T_s/2), zero mid-stance.
    let k = (t / ts + 0.5).floor();
    let s = t - k * ts;
    let c = spec.desired_velocity * ts / (2.0 * (0.5 * l * ts).sinh());
    PendulumState::new(c * (l * s).sinh(), c * l * (l * s).cosh())
}
