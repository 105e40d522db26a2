//! Reduced-order simulation of bipedal walking on a moving surface.
//!
//! The robot is modeled as a variable-length inverted pendulum whose support
//! point rides on a surface with unknown horizontal and vertical motion.
//! Two control inputs keep it walking: a once-per-step footstep length from
//! a discrete LQR planner, and a continuous ankle torque combining PD
//! feedback, feed-forward, and an adaptive compensator that learns the
//! surface-induced disturbance online.
//!
//! The crate provides the plant and profiles ([`gait`], [`plant`],
//! [`surface`]), the controllers ([`planner`], [`ankle`], [`adaptive`]),
//! a deterministic closed-loop engine ([`sim`]), evaluation metrics and
//! reports ([`metrics`], [`fourier`]), scenario files ([`scenario`]), and a
//! self-verification battery ([`verify`]). The `deckwalker` binary wraps
//! all of it behind `run`, `compare`, and `verify` subcommands.

pub mod adaptive;
pub mod ankle;
pub mod error;
pub mod fourier;
pub mod gait;
pub mod metrics;
pub mod planner;
pub mod plant;
pub mod scenario;
pub mod sim;
pub mod surface;
pub mod verify;

pub use adaptive::{adaptive_tick, discretize, AdaptiveConfig, AdaptiveState, DiscreteOperators};
pub use ankle::{ankle_torque, closed_loop_residual_check, input_disturbance_oracle, PdGains, ResidualCertificate};
pub use error::{Error, Result};
pub use fourier::{fourier_amplitudes, fourier_reconstruction_check, ReconstructionReport};
pub use gait::{desired_initial_state, desired_state, propagate_profile, step_transition, touchdown_jump, GaitSpec, PendulumState, ProfilePair};
pub use metrics::{compare_report, compute_metrics, write_plot_data, ComparisonReport, MetricsRecord};
pub use planner::{build_planner, commanded_jump, step_length, PlannerGains};
pub use plant::{integrate_held_torque, plant_rhs, VerticalRegulation};
pub use scenario::{BuiltScenario, Scenario};
pub use sim::{jump_consistency_check, run_simulation, Controller, JumpReport, SimConfig, SimTrace, TouchdownEvent, TraceRow};
pub use surface::{AxisMotion, Sinusoid, SurfaceMotion};
pub use verify::{run_battery, PropertyCheck, VerifyOptions};
