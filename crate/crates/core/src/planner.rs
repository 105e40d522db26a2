//! Discrete LQR step-length planner.
//!
//! Once per step, the planner picks the next step length so the commanded
//! profile converges to the desired profile. The regulated output is the
//! per-step travel/boundary-velocity mismatch y = (A_s - I) e^c, whose
//! step-to-step dynamics are (A_s, B_s); the gain comes from the
//! discrete-time algebraic Riccati equation solved by fixed-point iteration
//! of the Riccati recursion.

use nalgebra::{Matrix2, RowVector2, Vector2};

use crate::error::{Error, Result};
use crate::gait::{self, GaitSpec, PendulumState};

/// Default LQR weights. The state weight is the identity; the input weight
/// leans expensive, which places the closed-loop poles near the reflected
/// plant poles (contraction ratio about 0.37 per step for the nominal gait)
/// and keeps the transient step lengths gentle.
pub const DEFAULT_Q: [f64; 2] = [1.0, 1.0];
pub const DEFAULT_R: f64 = 10.0;

/// Step lengths beyond this are kinematically implausible for a desk-scale
/// biped; the simulator flags them in the run warnings.
pub const STEP_WARN_THRESHOLD: f64 = 0.6;

const DARE_TOL: f64 = 1e-12;
const DARE_MAX_ITERS: usize = 100_000;

/// Precomputed step-to-step matrices and the LQR gain.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerGains {
    /// Flow over one step period, exp(A_lambda T_s).
    pub a_s: Matrix2<f64>,
    /// Input map of the per-step output dynamics, (A_s - I) B_1.
    pub b_s: Vector2<f64>,
    /// LQR gain, K = (R + B' P B)^-1 B' P A.
    pub k: RowVector2<f64>,
    /// Riccati fixed point.
    pub p_s: Matrix2<f64>,
    pub q: Matrix2<f64>,
    pub r: f64,
}

/// Build the planner for a gait, solving the Riccati equation from P = Q.
pub fn build_planner(spec: &GaitSpec, q: Matrix2<f64>, r: f64) -> Result<PlannerGains> {
    build_planner_with_tolerance(spec, q, r, DARE_TOL, DARE_MAX_ITERS)
}

/// As [`build_planner`], with the iteration tolerance exposed. Loosening the
/// tolerance is useful only as a negative control for the residual checks.
pub fn build_planner_with_tolerance(
    spec: &GaitSpec,
    q: Matrix2<f64>,
    r: f64,
    tol: f64,
    max_iters: usize,
) -> Result<PlannerGains> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("input weight R must be positive"));
    }
    let sym_gap = (q[(0, 1)] - q[(1, 0)]).abs();
    if sym_gap > 1e-12 || q[(0, 0)] < 0.0 || q[(1, 1)] < 0.0 || q.determinant() < -1e-12 {
        return Err(Error::invalid("state weight Q must be symmetric positive semidefinite"));
    }

    let a_s = gait::step_transition(spec);
    let b_s = (a_s - Matrix2::identity()) * Vector2::new(1.0, 0.0);

    let mut p = q;
    let mut converged = false;
    for _ in 0..max_iters {
        let pb = p * b_s;
        let denom = r + (b_s.transpose() * pb)[(0, 0)];
        let atp = a_s.transpose() * p;
        let next = atp * a_s + q - (atp * b_s) * (b_s.transpose() * p * a_s) / denom;
        let delta = (next - p).abs().max();
        p = next;
        // Scale-aware stop: large weight matrices push the iterate noise
        // floor above any fixed absolute threshold.
        if delta < tol * (1.0 + p.abs().max()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!(
            "Riccati iteration did not converge within {max_iters} iterations"
        )));
    }

    let denom = r + (b_s.transpose() * p * b_s)[(0, 0)];
    let k = (b_s.transpose() * p * a_s) / denom;
    Ok(PlannerGains { a_s, b_s, k, p_s: p, q, r })
}

impl PlannerGains {
    /// Planner with the default weights.
    pub fn with_defaults(spec: &GaitSpec) -> Result<Self> {
        build_planner(spec, Matrix2::from_diagonal(&Vector2::new(DEFAULT_Q[0], DEFAULT_Q[1])), DEFAULT_R)
    }

    /// Frobenius norm of the Riccati equation residual at `p_s`.
    pub fn dare_residual(&self) -> f64 {
        let pb = self.p_s * self.b_s;
        let denom = self.r + (self.b_s.transpose() * pb)[(0, 0)];
        let atp = self.a_s.transpose() * self.p_s;
        let rhs = atp * self.a_s + self.q
            - (atp * self.b_s) * (self.b_s.transpose() * self.p_s * self.a_s) / denom;
        (rhs - self.p_s).norm()
    }

    /// Closed-loop step map A_s - B_s K.
    pub fn closed_loop(&self) -> Matrix2<f64> {
        self.a_s - self.b_s * self.k
    }

    /// Spectral radius of the closed-loop step map.
    pub fn spectral_radius(&self) -> f64 {
        spectral_radius_2x2(&self.closed_loop())
    }

    /// Step-to-step map of the profile error e^c itself (similar to the
    /// closed loop through A_s - I, so it shares its spectrum).
    pub fn profile_error_map(&self) -> Matrix2<f64> {
        self.a_s - Vector2::new(1.0, 0.0) * (self.k * (self.a_s - Matrix2::identity()))
    }

    /// Determinant of the 2x2 controllability matrix [B_s, A_s B_s].
    pub fn controllability_det(&self) -> f64 {
        let ab = self.a_s * self.b_s;
        Matrix2::from_columns(&[self.b_s, ab]).determinant()
    }
}

/// Spectral radius of a real 2x2 matrix via the characteristic polynomial.
pub fn spectral_radius_2x2(m: &Matrix2<f64>) -> f64 {
    let tr = m.trace();
    let det = m.determinant();
    let disc = 0.25 * tr * tr - det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        (0.5 * tr + root).abs().max((0.5 * tr - root).abs())
    } else {
        det.abs().sqrt()
    }
}

/// Step length for touchdown k+1 from the post-touchdown profile error at k:
/// u = T_s v^d - K (A_s - I) e^c(t_k^+). No saturation is applied here.
pub fn step_length(planner: &PlannerGains, ec_plus: PendulumState, spec: &GaitSpec) -> f64 {
    let y = (planner.a_s - Matrix2::identity()) * ec_plus.as_vector();
    spec.nominal_step() - (planner.k * y)[(0, 0)]
}

/// Touchdown map of the commanded profile; identical to the plant's.
pub fn commanded_jump(state: PendulumState, u: f64) -> PendulumState {
    gait::touchdown_jump(state, u)
}
