//! Interferometer topologies as directed component graphs with physical
//! edge lengths. Paths from the source to each detector are enumerated
//! with their cumulative flight delay and static scattering amplitude
//! (all AOMs on).

use num_complex::Complex64;
use std::collections::{HashMap, HashSet};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::optics::{ComplexAmplitude, MIRROR_FACTOR, SPEED_OF_LIGHT};

/// Kind of optical component plus its kind-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    Source,
    BeamSplitter,
    Mirror,
    Aom {
        /// Switching ramp duration, s.
        ramp_duration: f64,
    },
    DelayLine {
        /// Static carrier phase added to the path amplitude, rad.
        extra_phase: f64,
        /// Amplitude of the slow thermal phase drift, rad. 0 disables it.
        drift_amplitude: f64,
        /// Period of the thermal drift sinusoid, s.
        drift_period: f64,
    },
    Detector {
        /// Human-readable port label, e.g. "power meter 1".
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: String,
    pub kind: ComponentKind,
}

/// Directed link between two component ports. Flight delay is
/// `length / c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: String,
    pub from_port: u8,
    pub to: String,
    pub to_port: u8,
    /// Physical length, m. Must be positive.
    pub length: f64,
}

#[derive(Debug, Clone, Default)]
pub struct OpticalNetwork {
    components: Vec<Component>,
    edges: Vec<Edge>,
}

/// One component visited along a path, with the cumulative flight delay
/// from the source to its input.
#[derive(Debug, Clone, PartialEq)]
pub struct PathHop {
    pub id: String,
    pub delay_from_source: f64,
    /// Product of static scattering factors accumulated before entering
    /// this component.
    pub amplitude_into: ComplexAmplitude,
}

/// A simple source-to-detector path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// Ordered component ids, source first, detector last.
    pub hops: Vec<PathHop>,
    /// Total source-to-detector flight delay, s.
    pub total_delay: f64,
    /// Product of static scattering factors along the path, all AOMs on.
    pub static_amplitude: ComplexAmplitude,
}

impl PathRecord {
    pub fn component_ids(&self) -> Vec<&str> {
        self.hops.iter().map(|h| h.id.as_str()).collect()
    }
}

impl OpticalNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_component(&mut self, id: impl Into<String>, kind: ComponentKind) {
        self.components.push(Component {
            id: id.into(),
            kind,
        });
    }

    pub fn add_edge(
        &mut self,
        from: impl Into<String>,
        from_port: u8,
        to: impl Into<String>,
        to_port: u8,
        length: f64,
    ) {
        self.edges.push(Edge {
            from: from.into(),
            from_port,
            to: to.into(),
            to_port,
            length,
        });
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn component_mut(&mut self, id: &str) -> Option<&mut Component> {
        self.components.iter_mut().find(|c| c.id == id)
    }

    /// Detector components in insertion order.
    pub fn detectors(&self) -> Vec<&Component> {
        self.components
            .iter()
            .filter(|c| matches!(c.kind, ComponentKind::Detector { .. }))
            .collect()
    }

    pub fn source(&self) -> Option<&Component> {
        self.components
            .iter()
            .find(|c| matches!(c.kind, ComponentKind::Source))
    }

    /// Structural validation. Returns every violation found, not just the
    /// first; an empty list means the network is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();

        let mut seen = HashSet::new();
        for c in &self.components {
            if !seen.insert(c.id.as_str()) {
                violations.push(format!("duplicate component id `{}`", c.id));
            }
        }

        let sources: Vec<_> = self
            .components
            .iter()
            .filter(|c| matches!(c.kind, ComponentKind::Source))
            .collect();
        if sources.len() != 1 {
            violations.push(format!("expected exactly one source, found {}", sources.len()));
        }

        for e in &self.edges {
            if self.component(&e.from).is_none() {
                violations.push(format!("edge references unknown component `{}`", e.from));
            }
            if self.component(&e.to).is_none() {
                violations.push(format!("edge references unknown component `{}`", e.to));
            }
            if !(e.length > 0.0) {
                violations.push(format!(
                    "nonpositive length {} on edge {} -> {}",
                    e.length, e.from, e.to
                ));
            }
        }

        for c in &self.components {
            let n_in = self.edges.iter().filter(|e| e.to == c.id).count();
            let n_out = self.edges.iter().filter(|e| e.from == c.id).count();
            match &c.kind {
                ComponentKind::Source => {
                    if n_in > 0 {
                        violations.push(format!("source `{}` has incoming edges", c.id));
                    }
                }
                ComponentKind::Detector { .. } => {
                    if n_out > 0 {
                        violations.push(format!("detector `{}` has outgoing edges", c.id));
                    }
                }
                ComponentKind::BeamSplitter => {
                    if n_in > 2 || n_out > 2 {
                        violations.push(format!(
                            "beam splitter `{}` has {} inputs / {} outputs (max 2 each)",
                            c.id, n_in, n_out
                        ));
                    }
                    let mut in_ports = HashSet::new();
                    let mut out_ports = HashSet::new();
                    for e in &self.edges {
                        if e.to == c.id {
                            if e.to_port > 1 {
                                violations
                                    .push(format!("beam splitter `{}` input port > 1", c.id));
                            }
                            if !in_ports.insert(e.to_port) {
                                violations.push(format!(
                                    "beam splitter `{}` input port {} used twice",
                                    c.id, e.to_port
                                ));
                            }
                        }
                        if e.from == c.id {
                            if e.from_port > 1 {
                                violations
                                    .push(format!("beam splitter `{}` output port > 1", c.id));
                            }
                            if !out_ports.insert(e.from_port) {
                                violations.push(format!(
                                    "beam splitter `{}` output port {} used twice",
                                    c.id, e.from_port
                                ));
                            }
                        }
                    }
                }
                _ => {
                    if n_in > 1 || n_out > 1 {
                        violations.push(format!(
                            "component `{}` has {} inputs / {} outputs (max 1 each)",
                            c.id, n_in, n_out
                        ));
                    }
                }
            }
        }

        if self.has_cycle() {
            violations.push("graph contains a cycle".into());
        } else if let Some(src) = self.source() {
            let reachable = self.reachable_from(&src.id);
            for det in self.detectors() {
                if !reachable.contains(det.id.as_str()) {
                    violations.push(format!("unreachable detector `{}`", det.id));
                }
            }
        }

        violations
    }

    /// Validate and convert violations into an error.
    pub fn check_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(v))
        }
    }

    fn has_cycle(&self) -> bool {
        // Kahn's algorithm on component ids.
        let mut indeg: HashMap<&str, usize> =
            self.components.iter().map(|c| (c.id.as_str(), 0)).collect();
        for e in &self.edges {
            if let Some(d) = indeg.get_mut(e.to.as_str()) {
                *d += 1;
            }
        }
        let mut queue: Vec<&str> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(id, _)| *id)
            .collect();
        let mut removed = 0;
        while let Some(id) = queue.pop() {
            removed += 1;
            for e in self.edges.iter().filter(|e| e.from == id) {
                if let Some(d) = indeg.get_mut(e.to.as_str()) {
                    *d -= 1;
                    if *d == 0 {
                        queue.push(e.to.as_str());
                    }
                }
            }
        }
        removed < self.components.len()
    }

    fn reachable_from<'a>(&'a self, start: &'a str) -> HashSet<&'a str> {
        let mut seen = HashSet::new();
        let mut stack = vec![start];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            for e in self.edges.iter().filter(|e| e.from == id) {
                stack.push(self.component(&e.to).map(|c| c.id.as_str()).unwrap_or(""));
            }
        }
        seen.remove("");
        seen
    }

    /// All simple source-to-detector paths, each with exact cumulative
    /// delay and static amplitude (AOMs on). Paths are returned sorted by
    /// their component-id sequence, so the result is independent of edge
    /// insertion order.
    pub fn enumerate_paths(&self, detector_id: &str) -> Result<Vec<PathRecord>> {
        self.check_valid()?;
        let det = self
            .component(detector_id)
            .ok_or_else(|| Error::UnknownComponent(detector_id.into()))?;
        if !matches!(det.kind, ComponentKind::Detector { .. }) {
            return Err(Error::UnknownComponent(format!(
                "`{detector_id}` is not a detector"
            )));
        }
        let src = self
            .source()
            .ok_or_else(|| Error::InvalidNetwork(vec!["no source".into()]))?;

        let mut paths = Vec::new();
        let mut hops = vec![PathHop {
            id: src.id.clone(),
            delay_from_source: 0.0,
            amplitude_into: Complex64::new(1.0, 0.0),
        }];
        self.dfs(&src.id, 0, Complex64::new(1.0, 0.0), 0.0, detector_id, &mut hops, &mut paths);
        paths.sort_by(|a, b| a.component_ids().cmp(&b.component_ids()));
        Ok(paths)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        at: &str,
        in_port: u8,
        amp: ComplexAmplitude,
        delay: f64,
        target: &str,
        hops: &mut Vec<PathHop>,
        paths: &mut Vec<PathRecord>,
    ) {
        if at == target {
            paths.push(PathRecord {
                hops: hops.clone(),
                total_delay: delay,
                static_amplitude: amp,
            });
            return;
        }
        let kind = match self.component(at) {
            Some(c) => &c.kind,
            None => return,
        };
        for e in self.edges.iter().filter(|e| e.from == at) {
            if hops.iter().any(|h| h.id == e.to) {
                continue; // simple paths only
            }
            let factor = scatter_factor(kind, in_port, e.from_port);
            let next_delay = delay + e.length / SPEED_OF_LIGHT;
            hops.push(PathHop {
                id: e.to.clone(),
                delay_from_source: next_delay,
                amplitude_into: amp * factor,
            });
            self.dfs(&e.to, e.to_port, amp * factor, next_delay, target, hops, paths);
            hops.pop();
        }
    }
}

/// Static scattering factor applied when light traverses a component from
/// `in_port` to `out_port`, with AOMs fully on.
pub fn scatter_factor(kind: &ComponentKind, in_port: u8, out_port: u8) -> ComplexAmplitude {
    match kind {
        ComponentKind::Source => Complex64::new(1.0, 0.0),
        ComponentKind::BeamSplitter => {
            if in_port == out_port {
                Complex64::new(FRAC_1_SQRT_2, 0.0)
            } else {
                Complex64::new(0.0, FRAC_1_SQRT_2)
            }
        }
        ComponentKind::Mirror => MIRROR_FACTOR,
        ComponentKind::Aom { .. } => Complex64::new(1.0, 0.0),
        ComponentKind::DelayLine { extra_phase, .. } => {
            Complex64::from_polar(1.0, *extra_phase)
        }
        ComponentKind::Detector { .. } => Complex64::new(1.0, 0.0),
    }
}

/// Geometry knobs for the standard two-arm interferometer builder.
#[derive(Debug, Clone, PartialEq)]
pub struct MziParams {
    /// Source-to-detector flight per arm, m.
    pub arm_length: f64,
    /// AOM position, m downstream of the first beam splitter. 0 places
    /// the AOMs adjacent to it, leaving the full arm flight between the
    /// AOM and the detectors.
    pub aom_position: f64,
    /// Extra length on arm B, m. 0 builds a balanced interferometer.
    pub arm_b_extra_length: f64,
    /// Static carrier phase offset on arm B, rad.
    pub arm_phase_b: f64,
    /// Thermal phase drift amplitude on arm B, rad (fiber variant).
    pub drift_amplitude: f64,
    /// Thermal drift period, s.
    pub drift_period: f64,
    /// AOM switching ramp duration, s.
    pub aom_ramp_duration: f64,
    /// Length of the short connector edges, m.
    pub connector_length: f64,
}

impl Default for MziParams {
    fn default() -> Self {
        Self {
            arm_length: 15.0,
            aom_position: 0.0,
            arm_b_extra_length: 0.0,
            arm_phase_b: 0.0,
            drift_amplitude: 0.0,
            drift_period: 1.0,
            aom_ramp_duration: 10e-9,
            connector_length: 1e-6,
        }
    }
}

/// Standard component ids produced by [`build_mzi_with`].
pub mod mzi_ids {
    pub const SOURCE: &str = "src";
    pub const BS1: &str = "bs1";
    pub const BS2: &str = "bs2";
    pub const AOM1: &str = "aom1";
    pub const AOM2: &str = "aom2";
    pub const LINE_A: &str = "line_a";
    pub const LINE_B: &str = "line_b";
    pub const DET1: &str = "det1";
    pub const DET2: &str = "det2";
}

/// Build a two-arm interferometer: BS1 -> {arm A with AOM1, arm B with
/// AOM2} -> BS2 -> {det1 ("power meter 1"), det2 ("power meter 2")}.
///
/// Arms are routed so the balanced network sends all power to det1; det2
/// is the dark port. Each arm contains a delay line carrying the optional
/// arm-B phase knobs.
pub fn build_mzi_with(p: &MziParams) -> Result<OpticalNetwork> {
    use mzi_ids::*;
    if !(p.arm_length > 0.0) {
        return Err(Error::Construction(format!(
            "arm length must be > 0, got {}",
            p.arm_length
        )));
    }
    let l0 = p.connector_length;
    if !(l0 > 0.0) || l0 * 8.0 >= p.arm_length {
        return Err(Error::Construction("connector length out of range".into()));
    }
    if p.aom_position < 0.0 {
        return Err(Error::Construction("AOM position must be >= 0".into()));
    }
    let pos = p.aom_position.max(l0);
    let rest = p.arm_length - l0 - pos - l0 - l0;
    if rest <= 0.0 {
        return Err(Error::Construction(format!(
            "AOM position {} m does not fit inside the {} m arm",
            p.aom_position, p.arm_length
        )));
    }

    let mut net = OpticalNetwork::new();
    net.add_component(SOURCE, ComponentKind::Source);
    net.add_component(BS1, ComponentKind::BeamSplitter);
    net.add_component(
        AOM1,
        ComponentKind::Aom {
            ramp_duration: p.aom_ramp_duration,
        },
    );
    net.add_component(
        AOM2,
        ComponentKind::Aom {
            ramp_duration: p.aom_ramp_duration,
        },
    );
    net.add_component(
        LINE_A,
        ComponentKind::DelayLine {
            extra_phase: 0.0,
            drift_amplitude: 0.0,
            drift_period: 1.0,
        },
    );
    net.add_component(
        LINE_B,
        ComponentKind::DelayLine {
            extra_phase: p.arm_phase_b,
            drift_amplitude: p.drift_amplitude,
            drift_period: p.drift_period,
        },
    );
    net.add_component(BS2, ComponentKind::BeamSplitter);
    net.add_component(
        DET1,
        ComponentKind::Detector {
            label: "power meter 1".into(),
        },
    );
    net.add_component(
        DET2,
        ComponentKind::Detector {
            label: "power meter 2".into(),
        },
    );

    net.add_edge(SOURCE, 0, BS1, 0, l0);
    // Arm A: BS1 port c -> AOM1 -> line A -> BS2 port b.
    net.add_edge(BS1, 0, AOM1, 0, pos);
    net.add_edge(AOM1, 0, LINE_A, 0, l0);
    net.add_edge(LINE_A, 0, BS2, 1, rest);
    // Arm B: BS1 port d -> AOM2 -> line B -> BS2 port a (crossed).
    net.add_edge(BS1, 1, AOM2, 0, pos);
    net.add_edge(AOM2, 0, LINE_B, 0, l0);
    net.add_edge(LINE_B, 0, BS2, 0, rest + p.arm_b_extra_length);
    net.add_edge(BS2, 0, DET1, 0, l0);
    net.add_edge(BS2, 1, DET2, 0, l0);

    net.check_valid()?;
    Ok(net)
}

/// Convenience wrapper over [`build_mzi_with`]. An unbalanced build adds
/// 1 m to arm B.
pub fn build_mzi(arm_length: f64, aom_position: f64, balanced: bool) -> Result<OpticalNetwork> {
    build_mzi_with(&MziParams {
        arm_length,
        aom_position,
        arm_b_extra_length: if balanced { 0.0 } else { 1.0 },
        ..MziParams::default()
    })
}
