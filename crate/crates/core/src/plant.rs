//! The disturbed variable-length inverted pendulum plant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{GaitSpec, PendulumState};
use crate::surface::SurfaceMotion;

/// Height regulation of the CoM above the support point.
///
/// A full-size robot regulates its CoM height imperfectly; this models the
/// residual as a bounded sinusoidal wobble around the nominal height. The
/// wobble amplitude must stay below the nominal height so the pendulum
/// length never reaches zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalRegulation {
    pub nominal: f64,
    pub wobble_amplitude: f64,
    pub wobble_frequency: f64,
}

impl VerticalRegulation {
    pub fn new(nominal: f64, wobble_amplitude: f64, wobble_frequency: f64) -> Result<Self> {
        if !(nominal.is_finite() && nominal > 0.0) {
            return Err(Error::invalid("nominal height must be positive"));
        }
        if !(wobble_amplitude.is_finite() && wobble_amplitude >= 0.0) {
            return Err(Error::invalid("wobble amplitude must be non-negative"));
        }
        if wobble_amplitude >= nominal {
            return Err(Error::invalid(format!(
                "wobble amplitude {wobble_amplitude} must be below the nominal height {nominal}"
            )));
        }
        if !wobble_frequency.is_finite() {
            return Err(Error::invalid("wobble frequency must be finite"));
        }
        Ok(Self { nominal, wobble_amplitude, wobble_frequency })
    }

    /// Perfect height regulation at the gait's nominal height.
    pub fn ideal(spec: &GaitSpec) -> Self {
        Self { nominal: spec.nominal_height, wobble_amplitude: 0.0, wobble_frequency: 0.0 }
    }

    /// CoM height above the support point at time `t`.
    pub fn height(&self, t: f64) -> f64 {
        self.nominal + self.wobble_amplitude * (self.wobble_frequency * t).sin()
    }

    /// Smallest height the profile can reach.
    pub fn min_height(&self) -> f64 {
        self.nominal - self.wobble_amplitude
    }
}

/// Continuous-phase vector field of the pendulum:
/// d/dt [x, xdot] = [xdot, (g + z..)/z * x - x.. - tau / (m z)].
pub fn plant_rhs(
    state: PendulumState,
    t: f64,
    tau: f64,
    motion: &SurfaceMotion,
    vert: &VerticalRegulation,
    spec: &GaitSpec,
) -> Result<PendulumState> {
    let z = vert.height(t);
    if z <= 0.0 {
        return Err(Error::SingularHeight(z));
    }
    let (xddot_ws, zddot_ws) = motion.accel(t);
    let accel = (spec.gravity + zddot_ws) / z * state.pos - xddot_ws - tau / (spec.mass * z);
    Ok(PendulumState::new(state.vel, accel))
}

/// Integrate the plant over `[t0, t0 + dt]` with a held ankle torque, using
/// `substeps` classical Runge-Kutta stages of equal width. The surface
/// motion and height profile are evaluated at the stage times; only the
/// torque is zero-order held.
#[allow(clippy::too_many_arguments)]
pub fn integrate_held_torque(
    state: PendulumState,
    t0: f64,
    dt: f64,
    substeps: u32,
    tau: f64,
    motion: &SurfaceMotion,
    vert: &VerticalRegulation,
    spec: &GaitSpec,
) -> Result<PendulumState> {
    let h = dt / substeps as f64;
    let mut x = state.as_vector();
    for s in 0..substeps {
        let t = t0 + h * s as f64;
        let f = |tt: f64, v: nalgebra::Vector2<f64>| -> Result<nalgebra::Vector2<f64>> {
            Ok(plant_rhs(PendulumState::from_vector(v), tt, tau, motion, vert, spec)?.as_vector())
        };
        let k1 = f(t, x)?;
        let k2 = f(t + 0.5 * h, x + k1 * (0.5 * h))?;
        let k3 = f(t + 0.5 * h, x + k2 * (0.5 * h))?;
        let k4 = f(t + h, x + k3 * h)?;
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(PendulumState::from_vector(x))
}
