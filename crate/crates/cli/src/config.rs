//! Scenario configuration: TOML sections `[network]`, `[schedule]`,
//! `[sim]`, `[diffraction]`, `[analysis]`, `[output]` plus top-level
//! `scenario` and `model`. Every key can be overridden from the command
//! line via `--section.key=value`; unknown keys are rejected.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Fig2,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig7,
    DoubleslitSweep,
    DoubleslitTransient,
    Custom,
}

pub const SCENARIO_NAMES: &[&str] = &[
    "fig2",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig7",
    "doubleslit_sweep",
    "doubleslit_transient",
    "custom",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    Local,
    Nonlocal,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub scenario: Scenario,
    pub model: ModelChoice,
    pub network: NetworkConfig,
    pub schedule: ScheduleConfig,
    pub sim: SimConfig,
    pub diffraction: DiffractionConfig,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            scenario: Scenario::Fig7,
            model: ModelChoice::Both,
            network: NetworkConfig::default(),
            schedule: ScheduleConfig::default(),
            sim: SimConfig::default(),
            diffraction: DiffractionConfig::default(),
            analysis: AnalysisConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    /// Source-to-detector flight per arm, m.
    pub arm_length_m: f64,
    /// AOM position downstream of BS1, m.
    pub aom_position_m: f64,
    pub balanced: bool,
    /// Extra arm-B length applied when `balanced = false`, m.
    pub arm_b_extra_m: f64,
    /// Laser coherence length, m.
    pub coherence_length_m: f64,
    pub wavelength_m: f64,
    /// Static arm-B carrier phase offset, rad.
    pub arm_phase_b_rad: f64,
    /// Thermal phase drift amplitude on arm B, rad (fiber variant).
    pub drift_amplitude_rad: f64,
    pub drift_period_s: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            arm_length_m: 15.0,
            aom_position_m: 0.0,
            balanced: true,
            arm_b_extra_m: 1.0,
            coherence_length_m: 50.0,
            wavelength_m: 633e-9,
            arm_phase_b_rad: 0.0,
            drift_amplitude_rad: 0.0,
            drift_period_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventConfig {
    pub component: String,
    /// "on" or "off".
    pub target: String,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    pub ramp_duration_s: f64,
    /// Empty means the scenario preset supplies its own events.
    pub events: Vec<EventConfig>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            ramp_duration_s: 10e-9,
            events: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub t_emit_s: f64,
    pub wavelength_m: f64,
    pub coherence_length_m: f64,
    pub peak_amp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub dt_s: f64,
    /// Empty means a continuous source; otherwise a pulsed packet train.
    pub packets: Vec<PacketConfig>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            t_start_s: -20e-9,
            t_end_s: 100e-9,
            dt_s: 0.5e-9,
            packets: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffractionConfig {
    pub wavelength_m: f64,
    pub slit_separation_m: f64,
    pub slit_width_m: f64,
    /// Screen distances for the sweep, m.
    pub distances_m: Vec<f64>,
    pub grid_points: usize,
    /// Screen half-width, m; 0 picks a per-distance default.
    pub grid_half_width_m: f64,
    /// Distance used by the doubleslit_transient scenario, m.
    pub transient_z_m: f64,
    /// Which slit closes at the switch (1 or 2).
    pub close_slit: u8,
    pub switch_time_s: f64,
    /// Screen observation times for the transient scenario, s.
    pub sample_times_s: Vec<f64>,
}

impl Default for DiffractionConfig {
    fn default() -> Self {
        Self {
            wavelength_m: 633e-9,
            slit_separation_m: 0.6e-3,
            slit_width_m: 0.1e-3,
            distances_m: vec![5e-3, 0.3, 3.0],
            grid_points: 2001,
            grid_half_width_m: 0.0,
            transient_z_m: 3.0,
            close_slit: 2,
            switch_time_s: 0.0,
            sample_times_s: vec![5e-9, 15e-9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Onset threshold as a fraction of the full-range change.
    pub onset_threshold: f64,
    /// Baseline length in samples (window = samples * dt).
    pub baseline_samples: usize,
    /// Below this visibility, interference counts as disappeared.
    pub visibility_cutoff: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            onset_threshold: 0.01,
            baseline_samples: 20,
            visibility_cutoff: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

impl Config {
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
