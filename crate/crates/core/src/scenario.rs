//! Scenario files: a TOML document with one section per subsystem.
//!
//! Every field has a benchmark default, so the empty document is a valid
//! scenario (quiet ground, adaptive controller, 15 s at 500 Hz). Unknown
//! keys are rejected rather than silently ignored.

use nalgebra::Matrix2;
use serde::Deserialize;
use std::path::Path;

use crate::adaptive::AdaptiveConfig;
use crate::ankle::PdGains;
use crate::error::{Error, Result};
use crate::gait::GaitSpec;
use crate::planner::{self, PlannerGains};
use crate::sim::{Controller, SimConfig};
use crate::surface::{AxisMotion, Sinusoid, SurfaceMotion};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub gait: GaitSection,
    pub surface: SurfaceSection,
    pub vertical: VerticalSection,
    pub controller: ControllerSection,
    pub planner: PlannerSection,
    pub adaptive: AdaptiveSection,
    pub sim: SimSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaitSection {
    pub step_period: f64,
    pub desired_velocity: f64,
    pub nominal_height: f64,
    pub gravity: f64,
    pub mass: f64,
    pub torque_limit: f64,
}

impl Default for GaitSection {
    fn default() -> Self {
        Self {
            step_period: 0.5,
            desired_velocity: 0.2,
            nominal_height: 0.74,
            gravity: 9.81,
            mass: 32.0,
            torque_limit: 40.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSection {
    /// Builtin case id ("case1", "case2", "case3"). Leave unset to describe
    /// a custom sinusoid sum with the fields below.
    pub case: Option<String>,
    pub x_bias: f64,
    pub z_bias: f64,
    pub x_components: Vec<SinusoidToml>,
    pub z_components: Vec<SinusoidToml>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinusoidToml {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct VerticalSection {
    pub wobble_amplitude: f64,
    pub wobble_frequency: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    /// "pd_ff", "adaptive", or "ankle_off".
    pub kind: String,
    pub kp: f64,
    pub kd: f64,
}

impl Default for ControllerSection {
    fn default() -> Self {
        Self { kind: "adaptive".into(), kp: 25.0, kd: 10.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerSection {
    pub q_diag: [f64; 2],
    pub r: f64,
}

impl Default for PlannerSection {
    fn default() -> Self {
        Self { q_diag: planner::DEFAULT_Q, r: planner::DEFAULT_R }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaptiveSection {
    pub sigma: f64,
    pub order: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub theta_bound: f64,
    pub p0_scale: f64,
}

impl Default for AdaptiveSection {
    fn default() -> Self {
        let c = AdaptiveConfig::nominal();
        Self {
            sigma: c.sigma,
            order: c.n_phi,
            alpha: c.alpha,
            beta: c.beta,
            gamma: c.gamma,
            delta: c.delta,
            theta_bound: c.theta_bound,
            p0_scale: c.p0_scale,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub duration: f64,
    pub sample_rate: f64,
    pub substeps: u32,
    pub saturation: bool,
    pub noise_std: f64,
    pub seed: u64,
    pub step_warn_threshold: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            duration: 15.0,
            sample_rate: 500.0,
            substeps: 4,
            saturation: true,
            noise_std: 0.0,
            seed: 0,
            step_warn_threshold: planner::STEP_WARN_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub trace: String,
    pub metrics: String,
    pub summary: String,
    pub plots: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            trace: "trace.csv".into(),
            metrics: "metrics.csv".into(),
            summary: "summary.txt".into(),
            plots: "plots".into(),
        }
    }
}

/// Everything needed to run: validated configs built from a scenario.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub spec: GaitSpec,
    pub planner: PlannerGains,
    pub pd: PdGains,
    pub adaptive: AdaptiveConfig,
    pub sim: SimConfig,
    pub output: OutputSection,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// A builtin benchmark scenario: case id plus controller, all defaults.
    pub fn builtin(case: &str, controller: Controller) -> Result<Self> {
        SurfaceMotion::from_case_id(case)
            .ok_or_else(|| Error::Scenario(format!("unknown case id {case:?}")))?;
        let mut s = Scenario::default();
        s.surface.case = Some(case.to_string());
        s.controller.kind = controller.id().to_string();
        Ok(s)
    }

    pub fn motion(&self) -> Result<SurfaceMotion> {
        match &self.surface.case {
            Some(id) => {
                if !self.surface.x_components.is_empty()
                    || !self.surface.z_components.is_empty()
                    || self.surface.x_bias != 0.0
                    || self.surface.z_bias != 0.0
                {
                    return Err(Error::Scenario(
                        "surface.case and custom components are mutually exclusive".into(),
                    ));
                }
                SurfaceMotion::from_case_id(id)
                    .ok_or_else(|| Error::Scenario(format!("unknown case id {id:?}")))
            }
            None => {
                let convert = |v: &[SinusoidToml]| {
                    v.iter()
                        .map(|s| Sinusoid {
                            amplitude: s.amplitude,
                            frequency: s.frequency,
                            phase: s.phase,
                        })
                        .collect()
                };
                if self.surface.x_components.is_empty()
                    && self.surface.z_components.is_empty()
                    && self.surface.x_bias == 0.0
                    && self.surface.z_bias == 0.0
                {
                    return Ok(SurfaceMotion::Stationary);
                }
                Ok(SurfaceMotion::SinusoidSum {
                    x: AxisMotion {
                        bias: self.surface.x_bias,
                        components: convert(&self.surface.x_components),
                    },
                    z: AxisMotion {
                        bias: self.surface.z_bias,
                        components: convert(&self.surface.z_components),
                    },
                })
            }
        }
    }

    /// Validate and assemble all run configs.
    pub fn build(&self) -> Result<BuiltScenario> {
        let g = &self.gait;
        let spec = GaitSpec::new(
            g.step_period,
            g.desired_velocity,
            g.nominal_height,
            g.gravity,
            g.mass,
            g.torque_limit,
        )?;

        let controller = Controller::from_id(&self.controller.kind).ok_or_else(|| {
            Error::Scenario(format!(
                "unknown controller kind {:?} (expected pd_ff, adaptive, or ankle_off)",
                self.controller.kind
            ))
        })?;
        let pd = PdGains::new(self.controller.kp, self.controller.kd)?;

        let q = Matrix2::new(self.planner.q_diag[0], 0.0, 0.0, self.planner.q_diag[1]);
        let planner = planner::build_planner(&spec, q, self.planner.r)?;

        let a = &self.adaptive;
        let adaptive = AdaptiveConfig {
            sigma: a.sigma,
            n_phi: a.order,
            alpha: a.alpha,
            beta: a.beta,
            gamma: a.gamma,
            delta: a.delta,
            theta_bound: a.theta_bound,
            t_samp: 1.0 / self.sim.sample_rate,
            p0_scale: a.p0_scale,
        };
        adaptive.validate()?;

        let mut sim = SimConfig::new(controller, self.motion()?);
        sim.duration = self.sim.duration;
        sim.sample_rate = self.sim.sample_rate;
        sim.substeps = self.sim.substeps;
        sim.saturation = self.sim.saturation;
        sim.noise_std = self.sim.noise_std;
        sim.seed = self.sim.seed;
        sim.step_warn_threshold = self.sim.step_warn_threshold;
        sim.wobble_amplitude = self.vertical.wobble_amplitude;
        sim.wobble_frequency = self.vertical.wobble_frequency;

        Ok(BuiltScenario { spec, planner, pd, adaptive, sim, output: self.output.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_builds_with_defaults() {
        let s = Scenario::from_toml("").unwrap();
        let b = s.build().unwrap();
        assert_eq!(b.spec.step_period, 0.5);
        assert_eq!(b.sim.controller, Controller::Adaptive);
        assert_eq!(b.sim.motion, SurfaceMotion::Stationary);
        assert_eq!(b.adaptive.t_samp, 1.0 / 500.0);
        assert_eq!(b.pd.kp, 25.0);
    }

    #[test]
    fn builtin_case_selection() {
        let s = Scenario::builtin("case2", Controller::PdFf).unwrap();
        let b = s.build().unwrap();
        assert_eq!(b.sim.motion, SurfaceMotion::case2());
        assert_eq!(b.sim.controller, Controller::PdFf);
        assert!(Scenario::builtin("case7", Controller::PdFf).is_err());
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let err = Scenario::from_toml("[gait]\nstep_perod = 0.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown field"), "{msg}");
        assert!(msg.contains("line"), "no location in {msg}");
    }

    #[test]
    fn custom_sinusoid_surface() {
        let text = r#"
[surface]
x_bias = 0.01
[[surface.x_components]]
amplitude = 0.098
frequency = 0.7
phase = 1.5707963267948966
[[surface.z_components]]
amplitude = 0.08
frequency = 0.4
"#;
        let s = Scenario::from_toml(text).unwrap();
        match s.motion().unwrap() {
            SurfaceMotion::SinusoidSum { x, z } => {
                assert_eq!(x.bias, 0.01);
                assert_eq!(x.components.len(), 1);
                assert_eq!(z.components[0].phase, 0.0);
            }
            other => panic!("unexpected motion {other:?}"),
        }
    }

    #[test]
    fn case_and_custom_components_conflict() {
        let text = r#"
[surface]
case = "case2"
[[surface.x_components]]
amplitude = 0.1
frequency = 1.0
"#;
        let s = Scenario::from_toml(text).unwrap();
        assert!(s.motion().is_err());
    }

    #[test]
    fn bad_controller_kind() {
        let s = Scenario::from_toml("[controller]\nkind = \"mystery\"\n").unwrap();
        assert!(s.build().is_err());
    }

    #[test]
    fn scenario_overrides_flow_into_configs() {
        let text = r#"
[gait]
mass = 40.0

[controller]
kind = "pd_ff"
kp = 30.0

[sim]
duration = 10.0
noise_std = 0.001
seed = 42

[vertical]
wobble_amplitude = 0.02
wobble_frequency = 1.5
"#;
        let b = Scenario::from_toml(text).unwrap().build().unwrap();
        assert_eq!(b.spec.mass, 40.0);
        assert_eq!(b.pd.kp, 30.0);
        assert_eq!(b.sim.duration, 10.0);
        assert_eq!(b.sim.seed, 42);
        assert_eq!(b.sim.wobble_amplitude, 0.02);
    }
}
