//! Time-stepped simulation of field propagation through an optical
//! network under two switchable semantics:
//!
//! * **local** — a component's state is sampled at the retarded time
//!   `t - delay(component -> detector)`, so state changes reach the
//!   detectors at the speed of light;
//! * **nonlocal** — component states are sampled at the detection time
//!   `t` itself, so a switch is felt at the detectors instantly.
//!
//! A closed-form static path-sum oracle cross-checks the stepped engine.

use num_complex::Complex64;
use std::collections::{HashMap, HashSet};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::network::{ComponentKind, OpticalNetwork, PathRecord};
use crate::optics::{coherence_factor, packet_envelope, AomTimeline, SwitchEvent, WavePacket};

/// Maximum number of samples a single run may produce.
pub const SAMPLE_GUARD: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationModel {
    Local,
    NonLocal,
}

impl PropagationModel {
    pub fn name(&self) -> &'static str {
        match self {
            PropagationModel::Local => "local",
            PropagationModel::NonLocal => "nonlocal",
        }
    }
}

/// Source drive: steady unit-power carrier, or a train of wave packets.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceMode {
    Continuous,
    Pulsed(Vec<WavePacket>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub t_start: f64,
    pub t_end: f64,
    /// Sample step, s. Default 0.5 ns.
    pub dt: f64,
    pub source_mode: SourceMode,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            t_start: -20e-9,
            t_end: 100e-9,
            dt: 0.5e-9,
            source_mode: SourceMode::Continuous,
        }
    }
}

impl SimParams {
    fn sample_times(&self) -> Result<Vec<f64>> {
        if !(self.t_end > self.t_start) {
            return Err(Error::Guard(format!(
                "t_end {} must exceed t_start {}",
                self.t_end, self.t_start
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Guard(format!("dt must be > 0, got {}", self.dt)));
        }
        let span = (self.t_end - self.t_start) / self.dt;
        if !span.is_finite() || span > SAMPLE_GUARD as f64 {
            return Err(Error::Guard(format!(
                "{span:.0} samples exceeds the {SAMPLE_GUARD} guard"
            )));
        }
        let n = (span + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.t_start + i as f64 * self.dt).collect())
    }
}

/// One commanded state change of a named AOM.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEvent {
    pub component_id: String,
    pub target_on: bool,
    pub time: f64,
}

/// Timed AOM on/off events with a shared finite ramp duration.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSchedule {
    pub ramp_duration: f64,
    pub events: Vec<ScheduleEvent>,
}

impl SwitchingSchedule {
    pub fn empty(ramp_duration: f64) -> Self {
        Self {
            ramp_duration,
            events: Vec::new(),
        }
    }

    /// Single off event, the Fig.-7-style drive.
    pub fn off_at(component_id: impl Into<String>, time: f64, ramp_duration: f64) -> Self {
        Self {
            ramp_duration,
            events: vec![ScheduleEvent {
                component_id: component_id.into(),
                target_on: false,
                time,
            }],
        }
    }

    /// Validate against a network and expand into one timeline per AOM.
    /// AOMs without events stay on.
    pub fn timelines(&self, net: &OpticalNetwork) -> Result<Vec<(String, AomTimeline)>> {
        let mut per_component: HashMap<&str, Vec<SwitchEvent>> = HashMap::new();
        for ev in &self.events {
            match net.component(&ev.component_id) {
                Some(c) if matches!(c.kind, ComponentKind::Aom { .. }) => {}
                Some(_) => {
                    return Err(Error::InvalidSchedule(format!(
                        "`{}` is not an AOM",
                        ev.component_id
                    )))
                }
                None => return Err(Error::UnknownComponent(ev.component_id.clone())),
            }
            per_component
                .entry(ev.component_id.as_str())
                .or_default()
                .push(SwitchEvent {
                    time: ev.time,
                    target_on: ev.target_on,
                });
        }
        let mut out = Vec::new();
        for c in net.components() {
            if let ComponentKind::Aom { .. } = c.kind {
                let tl = match per_component.remove(c.id.as_str()) {
                    Some(evs) => AomTimeline::from_events(self.ramp_duration, evs)?,
                    None => AomTimeline::always_on(self.ramp_duration),
                };
                out.push((c.id.clone(), tl));
            }
        }
        Ok(out)
    }
}

/// Uniformly sampled optical power at one detector, normalized so the
/// source power is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorTrace {
    pub detector_id: String,
    pub times: Vec<f64>,
    pub powers: Vec<f64>,
}

impl DetectorTrace {
    pub fn dt(&self) -> f64 {
        if self.times.len() >= 2 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }
}

/// Full result of one run: detector traces plus the power diverted out of
/// the network by AOM first-order beams, sample by sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub times: Vec<f64>,
    pub traces: Vec<DetectorTrace>,
    pub diverted: Vec<f64>,
}

impl SimOutput {
    pub fn trace(&self, detector_id: &str) -> Option<&DetectorTrace> {
        self.traces.iter().find(|t| t.detector_id == detector_id)
    }
}

// Precomputed per-path dynamic elements.
struct DynAom {
    timeline_idx: usize,
    downstream_delay: f64,
}

struct DynDrift {
    amplitude: f64,
    period: f64,
    downstream_delay: f64,
}

struct PathCtx {
    static_amp: Complex64,
    total_delay: f64,
    aoms: Vec<DynAom>,
    drifts: Vec<DynDrift>,
}

struct DetectorCtx {
    id: String,
    paths: Vec<PathCtx>,
}

// One distinct source-to-AOM prefix, for first-order (diverted) power
// accounting.
struct DumpPrefix {
    static_amp: Complex64,
    upstream_aoms: Vec<usize>,
    delay_to_aom: f64,
}

struct AomDump {
    timeline_idx: usize,
    downstream_min: f64,
    prefixes: Vec<DumpPrefix>,
}

struct RunCtx {
    timelines: Vec<AomTimeline>,
    detectors: Vec<DetectorCtx>,
    dumps: Vec<AomDump>,
}

fn build_run_ctx(net: &OpticalNetwork, sched: &SwitchingSchedule) -> Result<RunCtx> {
    net.check_valid()?;
    let named = sched.timelines(net)?;
    let index: HashMap<&str, usize> = named
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (id.as_str(), i))
        .collect();

    let mut detectors = Vec::new();
    let mut dump_map: HashMap<usize, AomDump> = HashMap::new();
    let mut seen_prefixes: HashSet<(usize, Vec<String>)> = HashSet::new();

    for det in net.detectors() {
        let records: Vec<PathRecord> = net.enumerate_paths(&det.id)?;
        let mut paths = Vec::new();
        for rec in &records {
            let mut aoms = Vec::new();
            let mut drifts = Vec::new();
            for (hop_i, hop) in rec.hops.iter().enumerate() {
                let kind = &net.component(&hop.id).expect("validated").kind;
                match kind {
                    ComponentKind::Aom { .. } => {
                        let idx = index[hop.id.as_str()];
                        let downstream = rec.total_delay - hop.delay_from_source;
                        aoms.push(DynAom {
                            timeline_idx: idx,
                            downstream_delay: downstream,
                        });

                        let dump = dump_map.entry(idx).or_insert(AomDump {
                            timeline_idx: idx,
                            downstream_min: downstream,
                            prefixes: Vec::new(),
                        });
                        dump.downstream_min = dump.downstream_min.min(downstream);
                        let prefix_ids: Vec<String> =
                            rec.hops[..hop_i].iter().map(|h| h.id.clone()).collect();
                        if seen_prefixes.insert((idx, prefix_ids)) {
                            let upstream = rec.hops[..hop_i]
                                .iter()
                                .filter(|h| {
                                    matches!(
                                        net.component(&h.id).expect("validated").kind,
                                        ComponentKind::Aom { .. }
                                    )
                                })
                                .map(|h| index[h.id.as_str()])
                                .collect();
                            dump.prefixes.push(DumpPrefix {
                                static_amp: hop.amplitude_into,
                                upstream_aoms: upstream,
                                delay_to_aom: hop.delay_from_source,
                            });
                        }
                    }
                    ComponentKind::DelayLine {
                        drift_amplitude,
                        drift_period,
                        ..
                    } if *drift_amplitude != 0.0 => {
                        drifts.push(DynDrift {
                            amplitude: *drift_amplitude,
                            period: *drift_period,
                            downstream_delay: rec.total_delay - hop.delay_from_source,
                        });
                    }
                    _ => {}
                }
            }
            paths.push(PathCtx {
                static_amp: rec.static_amplitude,
                total_delay: rec.total_delay,
                aoms,
                drifts,
            });
        }
        detectors.push(DetectorCtx {
            id: det.id.clone(),
            paths,
        });
    }

    let mut dumps: Vec<AomDump> = dump_map.into_values().collect();
    dumps.sort_by_key(|d| d.timeline_idx);
    Ok(RunCtx {
        timelines: named.into_iter().map(|(_, tl)| tl).collect(),
        detectors,
        dumps,
    })
}

#[inline]
fn sample_time(model: PropagationModel, t: f64, downstream_delay: f64) -> f64 {
    match model {
        PropagationModel::Local => t - downstream_delay,
        PropagationModel::NonLocal => t,
    }
}

fn drift_factor(d: &DynDrift, t_s: f64) -> Complex64 {
    let phase = d.amplitude * (TAU * t_s / d.period).sin();
    Complex64::from_polar(1.0, phase)
}

/// Run the engine. Detector traces are deterministic functions of the
/// inputs; source power is normalized to 1.
pub fn simulate(
    net: &OpticalNetwork,
    sched: &SwitchingSchedule,
    model: PropagationModel,
    params: &SimParams,
) -> Result<SimOutput> {
    let ctx = build_run_ctx(net, sched)?;
    let times = params.sample_times()?;

    let mut traces: Vec<DetectorTrace> = ctx
        .detectors
        .iter()
        .map(|d| DetectorTrace {
            detector_id: d.id.clone(),
            times: times.clone(),
            powers: Vec::with_capacity(times.len()),
        })
        .collect();
    let mut diverted = Vec::with_capacity(times.len());

    match &params.source_mode {
        SourceMode::Continuous => {
            for &t in &times {
                for (d, trace) in ctx.detectors.iter().zip(traces.iter_mut()) {
                    let mut field = Complex64::new(0.0, 0.0);
                    for p in &d.paths {
                        let mut amp = p.static_amp;
                        for a in &p.aoms {
                            let ts = sample_time(model, t, a.downstream_delay);
                            amp *= ctx.timelines[a.timeline_idx].transmission(ts);
                        }
                        for dr in &p.drifts {
                            let ts = sample_time(model, t, dr.downstream_delay);
                            amp *= drift_factor(dr, ts);
                        }
                        field += amp;
                    }
                    trace.powers.push(field.norm_sqr());
                }
                diverted.push(diverted_power_continuous(&ctx, model, t));
            }
        }
        SourceMode::Pulsed(packets) => {
            for p in packets {
                // re-validate in case the caller built the struct directly
                WavePacket::new(p.t_emit, p.wavelength, p.coherence_length, p.peak_amp)?;
            }
            for &t in &times {
                for (d, trace) in ctx.detectors.iter().zip(traces.iter_mut()) {
                    trace
                        .powers
                        .push(pulsed_power(&ctx, d, packets, model, t));
                }
                diverted.push(diverted_power_pulsed(&ctx, packets, t));
            }
        }
    }

    Ok(SimOutput {
        times,
        traces,
        diverted,
    })
}

fn diverted_power_continuous(ctx: &RunCtx, model: PropagationModel, t: f64) -> f64 {
    let mut total = 0.0;
    for dump in &ctx.dumps {
        let ts = sample_time(model, t, dump.downstream_min);
        let mut incident = Complex64::new(0.0, 0.0);
        for pre in &dump.prefixes {
            let mut amp = pre.static_amp;
            for &up in &pre.upstream_aoms {
                amp *= ctx.timelines[up].transmission(ts);
            }
            incident += amp;
        }
        let tau = ctx.timelines[dump.timeline_idx].transmission(ts);
        total += incident.norm_sqr() * (1.0 - tau * tau);
    }
    total
}

// Pulsed-mode power: packet energy always travels with the packet (the
// AOM gate is sampled when the packet passed it), while the pairwise
// interference term is gated by the AOM state sampled per the chosen
// semantics. Under local semantics the two samplings coincide and the
// power reduces to |sum of fields|^2 for fully coherent packets.
fn pulsed_power(
    ctx: &RunCtx,
    det: &DetectorCtx,
    packets: &[WavePacket],
    model: PropagationModel,
    t: f64,
) -> f64 {
    struct Contribution {
        base: Complex64,
        env: f64,
        tau_energy: f64,
        tau_interf: f64,
        arrival: f64,
        wavelength: f64,
    }

    let mut contributions = Vec::with_capacity(packets.len() * det.paths.len());
    for pk in packets {
        for p in &det.paths {
            let env = packet_envelope(t, pk, p.total_delay);
            let mut tau_energy = 1.0;
            let mut tau_interf = 1.0;
            for a in &p.aoms {
                let tl = &ctx.timelines[a.timeline_idx];
                tau_energy *= tl.transmission(t - a.downstream_delay);
                tau_interf *= tl.transmission(sample_time(model, t, a.downstream_delay));
            }
            let mut base = p.static_amp;
            for dr in &p.drifts {
                base *= drift_factor(dr, t - dr.downstream_delay);
            }
            contributions.push(Contribution {
                base,
                env,
                tau_energy,
                tau_interf,
                arrival: pk.t_emit + p.total_delay,
                wavelength: pk.wavelength,
            });
        }
    }

    let mut power = 0.0;
    for c in &contributions {
        let a = c.env * c.tau_energy;
        power += a * a * c.base.norm_sqr();
    }
    let n = contributions.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (ci, cj) = (&contributions[i], &contributions[j]);
            let rel = (ci.wavelength - cj.wavelength).abs() / ci.wavelength.max(cj.wavelength);
            if rel > 1e-12 {
                continue; // incoherent carriers
            }
            // Both packets satisfy the coherent precondition (shared L_c),
            // so either sigma serves for the mutual-coherence width.
            let sigma = packets[i / det.paths.len()].sigma_t();
            let gamma = gaussian_coherence(ci.arrival - cj.arrival, sigma);
            power += 2.0
                * gamma
                * (ci.base * cj.base.conj()).re
                * ci.env
                * cj.env
                * ci.tau_interf
                * cj.tau_interf;
        }
    }
    power.max(0.0)
}

#[inline]
fn gaussian_coherence(delta: f64, sigma: f64) -> f64 {
    let r = delta / sigma;
    (-(r * r)).exp()
}

fn diverted_power_pulsed(ctx: &RunCtx, packets: &[WavePacket], t: f64) -> f64 {
    let mut total = 0.0;
    for dump in &ctx.dumps {
        let ts = t - dump.downstream_min;
        let tau = ctx.timelines[dump.timeline_idx].transmission(ts);
        for pre in &dump.prefixes {
            let mut amp2 = pre.static_amp.norm_sqr();
            for &up in &pre.upstream_aoms {
                let tu = ctx.timelines[up].transmission(ts);
                amp2 *= tu * tu;
            }
            for pk in packets {
                let env = packet_envelope(ts, pk, pre.delay_to_aom);
                total += amp2 * env * env * (1.0 - tau * tau);
            }
        }
    }
    total
}

/// Closed-form static cross-check: per-detector power via the direct
/// path-sum `P_d = |sum_p a_p * prod(tau)|^2`, no time stepping.
///
/// `states` maps AOM ids to a static amplitude transmission in [0, 1];
/// unlisted AOMs count as fully on.
pub fn analytic_oracle(
    net: &OpticalNetwork,
    states: &HashMap<String, f64>,
) -> Result<Vec<(String, f64)>> {
    net.check_valid()?;
    let mut out = Vec::new();
    for det in net.detectors() {
        let mut field = Complex64::new(0.0, 0.0);
        for path in net.enumerate_paths(&det.id)? {
            let mut amp = path.static_amplitude;
            for hop in &path.hops {
                if let Some(c) = net.component(&hop.id) {
                    if matches!(c.kind, ComponentKind::Aom { .. }) {
                        amp *= states.get(&hop.id).copied().unwrap_or(1.0);
                    }
                }
            }
            field += amp;
        }
        out.push((det.id.clone(), field.norm_sqr()));
    }
    Ok(out)
}

/// Sweep the static phase of one delay line over a full turn and report
/// the per-detector powers, for fringe-visibility measurement on static
/// networks.
pub fn phase_scan(
    net: &OpticalNetwork,
    line_id: &str,
    n_points: usize,
) -> Result<Vec<(f64, Vec<(String, f64)>)>> {
    net.check_valid()?;
    match net.component(line_id).map(|c| &c.kind) {
        Some(ComponentKind::DelayLine { .. }) => {}
        Some(_) => {
            return Err(Error::UnknownComponent(format!(
                "`{line_id}` is not a delay line"
            )))
        }
        None => return Err(Error::UnknownComponent(line_id.into())),
    }
    let mut out = Vec::with_capacity(n_points);
    let mut scratch = net.clone();
    for k in 0..n_points {
        let phi = TAU * k as f64 / n_points as f64;
        if let Some(c) = scratch.component_mut(line_id) {
            if let ComponentKind::DelayLine { extra_phase, .. } = &mut c.kind {
                *extra_phase = phi;
            }
        }
        let powers = analytic_oracle(&scratch, &HashMap::new())?;
        out.push((phi, powers));
    }
    Ok(out)
}

/// Parameters of the in-flight-packet scenario: a short pulse clears the
/// AOMs, then both AOMs are switched off while the packet is still
/// between the AOMs and the second beam splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Params {
    pub mzi: crate::network::MziParams,
    pub packet: WavePacket,
    /// Time at which both AOMs are commanded off, s.
    pub switch_time: f64,
    pub ramp_duration: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl Default for Fig2Params {
    fn default() -> Self {
        // 0.9 m coherence length gives a 3 ns envelope; the packet passes
        // the AOMs at -20 ns, well before the switch at t = 0.
        Self {
            mzi: crate::network::MziParams::default(),
            packet: WavePacket {
                t_emit: -20e-9,
                wavelength: 633e-9,
                coherence_length: 0.9,
                peak_amp: 1.0,
            },
            switch_time: 0.0,
            ramp_duration: 10e-9,
            t_start: -20e-9,
            t_end: 100e-9,
            dt: 0.5e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Result {
    pub local: SimOutput,
    pub nonlocal: SimOutput,
    /// Set when the packet had not fully cleared the AOMs at the switch.
    pub warning: Option<String>,
}

/// Run the in-flight-packet scenario under both semantics. Under local
/// semantics the packet still interferes at the second beam splitter;
/// under nonlocal semantics the interference term is suppressed while the
/// packet energy (already past the AOMs) still reaches the detectors.
pub fn run_fig2_scenario(p: &Fig2Params) -> Result<Fig2Result> {
    let net = crate::network::build_mzi_with(&p.mzi)?;
    let mut warning = None;
    // Time the packet center passes the AOMs, plus a 4-sigma tail.
    if let Ok(paths) = net.enumerate_paths(crate::network::mzi_ids::DET1) {
        if let Some(hop) = paths
            .iter()
            .flat_map(|r| r.hops.iter())
            .find(|h| h.id.starts_with("aom"))
        {
            let tail = p.packet.t_emit + hop.delay_from_source + 4.0 * p.packet.sigma_t();
            if tail > p.switch_time {
                warning = Some(format!(
                    "packet tail clears the AOMs at {:.3e} s, after the switch at {:.3e} s",
                    tail, p.switch_time
                ));
            }
        }
    }
    let mut sched = SwitchingSchedule::empty(p.ramp_duration);
    for id in [crate::network::mzi_ids::AOM1, crate::network::mzi_ids::AOM2] {
        sched.events.push(ScheduleEvent {
            component_id: id.into(),
            target_on: false,
            time: p.switch_time,
        });
    }
    let params = SimParams {
        t_start: p.t_start,
        t_end: p.t_end,
        dt: p.dt,
        source_mode: SourceMode::Pulsed(vec![p.packet]),
    };
    let local = simulate(&net, &sched, PropagationModel::Local, &params)?;
    let nonlocal = simulate(&net, &sched, PropagationModel::NonLocal, &params)?;
    Ok(Fig2Result {
        local,
        nonlocal,
        warning,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4cParams {
    pub mzi: crate::network::MziParams,
    pub packet1: WavePacket,
    pub packet2: Option<WavePacket>,
    pub schedule: SwitchingSchedule,
    pub model: PropagationModel,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4cResult {
    pub output: SimOutput,
    /// Mutual-coherence weight of the packet-2/packet-1 interference term
    /// at the second beam splitter: gamma of their relative arrival delay.
    pub coherence_weight: f64,
    pub warning: Option<String>,
}

/// Two sequential packets through the interferometer; the cross term
/// between their overlapping envelopes is weighted by the mutual
/// coherence of their relative arrival delay.
pub fn run_fig4c_scenario(p: &Fig4cParams) -> Result<Fig4cResult> {
    let net = crate::network::build_mzi_with(&p.mzi)?;
    let mut warning = None;
    let mut packets = vec![p.packet1];
    let mut weight = 1.0;
    if let Some(p2) = p.packet2 {
        let rel = (p2.wavelength - p.packet1.wavelength).abs()
            / p.packet1.wavelength.max(p2.wavelength);
        if rel > 1e-12 {
            warning = Some(format!(
                "wavelength mismatch ({} m vs {} m): packets are incoherent",
                p.packet1.wavelength, p2.wavelength
            ));
            weight = 0.0;
        } else {
            weight = coherence_factor(p2.t_emit - p.packet1.t_emit, &p.packet1);
        }
        packets.push(p2);
    }
    let params = SimParams {
        t_start: p.t_start,
        t_end: p.t_end,
        dt: p.dt,
        source_mode: SourceMode::Pulsed(packets),
    };
    let output = simulate(&net, &p.schedule, p.model, &params)?;
    Ok(Fig4cResult {
        output,
        coherence_weight: weight,
        warning,
    })
}
