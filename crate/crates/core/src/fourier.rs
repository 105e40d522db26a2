//! Fourier decomposition of the desired profile.
//!
//! The desired position is periodic with the step period and odd around
//! mid-stance, so it expands into a pure sine series. The coefficients have
//! a closed form; their 1/k tail is what bounds the truncation error of the
//! sinusoid model of the height-coupled disturbance.

use crate::gait::{desired_state, GaitSpec};

/// Closed-form sine-series amplitudes of the desired position profile,
/// xi_k = 4 pi v T k / (lambda^2 T^2 + 4 pi^2 k^2) with alternating sign.
pub fn fourier_amplitudes(spec: &GaitSpec, n: usize) -> Vec<f64> {
    let l = spec.lambda();
    let ts = spec.step_period;
    let lt2 = l * l * ts * ts;
    (1..=n)
        .map(|k| {
            let kf = k as f64;
            let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
            sign * 4.0 * std::f64::consts::PI * spec.desired_velocity * ts * kf
                / (lt2 + 4.0 * std::f64::consts::PI * std::f64::consts::PI * kf * kf)
        })
        .collect()
}

/// Truncated-series reconstruction error report.
///
/// The profile jumps at the touchdown phase, where the series converges to
/// the jump midpoint and the pointwise error is fixed at half the step
/// length no matter how many terms are kept. `max_error_full` includes that
/// neighborhood; `max_error_interior` restricts to the middle of the stance
/// (wrapped phase within a third of the period), where the truncation error
/// actually shrinks with the number of terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionReport {
    pub n_terms: usize,
    pub grid_points: usize,
    pub max_error_full: f64,
    pub max_error_interior: f64,
}

/// Compare the truncated sine series against the closed-form profile on a
/// 1 kHz grid spanning one period.
pub fn fourier_reconstruction_check(spec: &GaitSpec, n_terms: usize) -> ReconstructionReport {
    let xi = fourier_amplitudes(spec, n_terms);
    let ts = spec.step_period;
    let grid_points = (ts * 1000.0).round().max(2.0) as usize;
    let mut max_full: f64 = 0.0;
    let mut max_interior: f64 = 0.0;
    for j in 0..grid_points {
        let t = ts * j as f64 / grid_points as f64;
        let mut series = 0.0;
        for (k, amp) in xi.iter().enumerate() {
            series += amp * (2.0 * std::f64::consts::PI * (k + 1) as f64 * t / ts).sin();
        }
        let err = (series - desired_state(spec, t).pos).abs();
        max_full = max_full.max(err);
        // Wrapped phase, zero mid-stance; the jump sits at |phase| = ts/2.
        let phase = t - ts * (t / ts + 0.5).floor();
        if phase.abs() <= ts / 3.0 {
            max_interior = max_interior.max(err);
        }
    }
    ReconstructionReport {
        n_terms,
        grid_points,
        max_error_full: max_full,
        max_error_interior: max_interior,
    }
}
