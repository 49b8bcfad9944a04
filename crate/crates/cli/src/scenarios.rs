//! Scenario presets: each reproduces one of the configurations discussed
//! in the source experiment proposal, plus free-form `custom` runs.

use std::fmt::Write as _;
use std::path::PathBuf;

use mzsim_core::analysis::{
    detect_onset, discriminate_models, visibility, visibility_from_extremes, Verdict,
};
use mzsim_core::diffraction::{
    classify_regime, fringe_spacing, pattern_change_time, slit_pattern, ClassifierThresholds,
    Regime, ScreenGrid, SlitGeometry,
};
use mzsim_core::engine::{
    analytic_oracle, phase_scan, run_fig2_scenario, run_fig4c_scenario, simulate, Fig2Params,
    Fig4cParams, PropagationModel, ScheduleEvent, SimOutput, SimParams, SourceMode,
    SwitchingSchedule,
};
use mzsim_core::network::{build_mzi_with, mzi_ids, MziParams, OpticalNetwork};
use mzsim_core::optics::WavePacket;
use mzsim_core::SPEED_OF_LIGHT;

use crate::config::*;
use crate::output::{profile_csv, trace_csv, write_file};
use crate::CliError;

pub struct RunOutcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

pub fn run(cfg: &Config) -> Result<RunOutcome, CliError> {
    let mut ctx = Ctx {
        cfg,
        summary: String::new(),
        files: Vec::new(),
    };
    let _ = writeln!(ctx.summary, "scenario: {}", scenario_name(cfg.scenario));
    match cfg.scenario {
        Scenario::Fig7 => run_fig7(&mut ctx)?,
        Scenario::Fig4a => run_fig4a(&mut ctx)?,
        Scenario::Fig4b => run_fig4b(&mut ctx)?,
        Scenario::Fig2 => run_fig2(&mut ctx)?,
        Scenario::Fig4c => run_fig4c(&mut ctx)?,
        Scenario::DoubleslitSweep => run_doubleslit_sweep(&mut ctx)?,
        Scenario::DoubleslitTransient => run_doubleslit_transient(&mut ctx)?,
        Scenario::Custom => run_custom(&mut ctx)?,
    }
    let summary_path = cfg.output.dir.join("summary.txt");
    write_file(&summary_path, &ctx.summary)?;
    ctx.files.push(summary_path);
    Ok(RunOutcome {
        summary: ctx.summary,
        files: ctx.files,
    })
}

fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::Fig2 => "fig2",
        Scenario::Fig4a => "fig4a",
        Scenario::Fig4b => "fig4b",
        Scenario::Fig4c => "fig4c",
        Scenario::Fig7 => "fig7",
        Scenario::DoubleslitSweep => "doubleslit_sweep",
        Scenario::DoubleslitTransient => "doubleslit_transient",
        Scenario::Custom => "custom",
    }
}

struct Ctx<'a> {
    cfg: &'a Config,
    summary: String,
    files: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn emit(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.cfg.output.dir.join(name);
        write_file(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    fn baseline_window(&self) -> f64 {
        self.cfg.analysis.baseline_samples as f64 * self.cfg.sim.dt_s
    }
}

fn mzi_params(cfg: &Config) -> MziParams {
    let n = &cfg.network;
    MziParams {
        arm_length: n.arm_length_m,
        aom_position: n.aom_position_m,
        arm_b_extra_length: if n.balanced { 0.0 } else { n.arm_b_extra_m },
        arm_phase_b: n.arm_phase_b_rad,
        drift_amplitude: n.drift_amplitude_rad,
        drift_period: n.drift_period_s,
        aom_ramp_duration: cfg.schedule.ramp_duration_s,
        connector_length: 1e-6,
    }
}

fn build_net(cfg: &Config) -> Result<OpticalNetwork, CliError> {
    build_mzi_with(&mzi_params(cfg)).map_err(|e| CliError::Config(e.to_string()))
}

fn models(choice: ModelChoice) -> Vec<PropagationModel> {
    match choice {
        ModelChoice::Local => vec![PropagationModel::Local],
        ModelChoice::Nonlocal => vec![PropagationModel::NonLocal],
        ModelChoice::Both => vec![PropagationModel::Local, PropagationModel::NonLocal],
    }
}

fn schedule_from(cfg: &Config, default_events: Vec<ScheduleEvent>) -> Result<SwitchingSchedule, CliError> {
    let events = if cfg.schedule.events.is_empty() {
        default_events
    } else {
        cfg.schedule
            .events
            .iter()
            .map(|e| {
                let target_on = match e.target.as_str() {
                    "on" => true,
                    "off" => false,
                    other => {
                        return Err(CliError::Config(format!(
                            "event target must be \"on\" or \"off\", got \"{other}\""
                        )))
                    }
                };
                Ok(ScheduleEvent {
                    component_id: e.component.clone(),
                    target_on,
                    time: e.time_s,
                })
            })
            .collect::<Result<_, _>>()?
    };
    Ok(SwitchingSchedule {
        ramp_duration: cfg.schedule.ramp_duration_s,
        events,
    })
}

fn packet_from(p: &PacketConfig) -> Result<WavePacket, CliError> {
    WavePacket::new(p.t_emit_s, p.wavelength_m, p.coherence_length_m, p.peak_amp)
        .map_err(|e| CliError::Config(e.to_string()))
}

fn trace_columns(out: &SimOutput) -> Result<(&[f64], &[f64], &[f64]), CliError> {
    let d1 = out
        .trace(mzi_ids::DET1)
        .ok_or_else(|| CliError::Runtime("missing det1 trace".into()))?;
    let d2 = out
        .trace(mzi_ids::DET2)
        .ok_or_else(|| CliError::Runtime("missing det2 trace".into()))?;
    Ok((&out.times, &d1.powers, &d2.powers))
}

fn emit_trace(ctx: &mut Ctx, name: &str, out: &SimOutput) -> Result<(), CliError> {
    let (t, p1, p2) = trace_columns(out)?;
    let csv = trace_csv(t, p1, p2)?;
    ctx.emit(name, &csv)
}

/// Flight delay from AOM2 to detector 1, the expected local-model onset
/// lag.
fn aom2_to_det1_delay(net: &OpticalNetwork) -> Result<f64, CliError> {
    let paths = net
        .enumerate_paths(mzi_ids::DET1)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    paths
        .iter()
        .find_map(|p| {
            p.hops
                .iter()
                .find(|h| h.id == mzi_ids::AOM2)
                .map(|h| p.total_delay - h.delay_from_source)
        })
        .ok_or_else(|| CliError::Runtime("no path through aom2 to det1".into()))
}

fn interference_verdict(v: f64, cutoff: f64) -> &'static str {
    if v >= 1.0 - cutoff {
        "Interference appears"
    } else if v < cutoff {
        "Interference disappears"
    } else {
        "Partial interference"
    }
}

fn run_fig7(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let net = build_net(cfg)?;
    let sched = schedule_from(
        cfg,
        vec![ScheduleEvent {
            component_id: mzi_ids::AOM2.into(),
            target_on: false,
            time: 0.0,
        }],
    )?;
    sched
        .timelines(&net)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let params = SimParams {
        t_start: cfg.sim.t_start_s,
        t_end: cfg.sim.t_end_s,
        dt: cfg.sim.dt_s,
        source_mode: SourceMode::Continuous,
    };

    let mut outputs = Vec::new();
    for model in models(cfg.model) {
        let out = simulate(&net, &sched, model, &params)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        emit_trace(ctx, &format!("fig7_{}.csv", model.name()), &out)?;
        for det in [mzi_ids::DET1, mzi_ids::DET2] {
            let tr = out.trace(det).expect("detector exists");
            match detect_onset(tr, cfg.analysis.onset_threshold, ctx.baseline_window())
                .map_err(|e| CliError::Runtime(e.to_string()))?
            {
                Some(r) => {
                    let _ = writeln!(
                        ctx.summary,
                        "[{}] {det}: onset {:.4e} s, settle {:.4e} s",
                        model.name(),
                        r.onset_time,
                        r.settle_time
                    );
                }
                None => {
                    let _ = writeln!(ctx.summary, "[{}] {det}: no transient", model.name());
                }
            }
        }
        outputs.push((model, out));
    }

    if let (Some((_, local)), Some((_, nonlocal))) = (
        outputs.iter().find(|(m, _)| *m == PropagationModel::Local),
        outputs.iter().find(|(m, _)| *m == PropagationModel::NonLocal),
    ) {
        let expected = aom2_to_det1_delay(&net)?;
        let rep = discriminate_models(
            local.trace(mzi_ids::DET1).expect("det1"),
            nonlocal.trace(mzi_ids::DET1).expect("det1"),
            expected,
            cfg.analysis.onset_threshold,
            ctx.baseline_window(),
        )
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        let verdict = match rep.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        let _ = writeln!(
            ctx.summary,
            "discrimination det1: onset difference {} s (expected {:.4e} +/- {:.1e}): {verdict}",
            rep.onset_difference
                .map(|d| format!("{d:.4e}"))
                .unwrap_or_else(|| "n/a".into()),
            rep.expected_delay,
            rep.tolerance
        );
    }
    Ok(())
}

fn run_fig4a(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let net = build_net(cfg)?;
    let sched = SwitchingSchedule::empty(cfg.schedule.ramp_duration_s);
    let params = SimParams {
        t_start: cfg.sim.t_start_s,
        t_end: cfg.sim.t_end_s,
        dt: cfg.sim.dt_s,
        source_mode: SourceMode::Continuous,
    };
    for model in models(cfg.model) {
        let out = simulate(&net, &sched, model, &params)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        emit_trace(ctx, &format!("fig4a_{}.csv", model.name()), &out)?;
    }
    // Static network: visibility measured by sweeping the arm-B phase.
    let scan = phase_scan(&net, mzi_ids::LINE_B, 64)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let det1_scan: Vec<f64> = scan.iter().map(|(_, p)| p[0].1).collect();
    let rep = visibility(&det1_scan).map_err(|e| CliError::Runtime(e.to_string()))?;
    let _ = writeln!(
        ctx.summary,
        "phase-scan visibility V = {:.6} -- {}",
        rep.visibility,
        interference_verdict(rep.visibility, cfg.analysis.visibility_cutoff)
    );
    Ok(())
}

fn default_short_packet(cfg: &Config) -> WavePacket {
    WavePacket {
        t_emit: -20e-9,
        wavelength: cfg.network.wavelength_m,
        coherence_length: 0.9,
        peak_amp: 1.0,
    }
}

fn contrast_near(out: &SimOutput, t: f64) -> Result<f64, CliError> {
    let (times, p1, p2) = trace_columns(out)?;
    let idx = times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
        .map(|(i, _)| i)
        .ok_or_else(|| CliError::Runtime("empty trace".into()))?;
    let (a, b) = (p1[idx], p2[idx]);
    visibility_from_extremes(a.max(b), a.min(b))
        .map(|r| r.visibility)
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn run_fig4b(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let net = build_net(cfg)?;
    let packet = match cfg.sim.packets.first() {
        Some(p) => packet_from(p)?,
        None => default_short_packet(cfg),
    };
    let sched = schedule_from(
        cfg,
        vec![ScheduleEvent {
            component_id: mzi_ids::AOM2.into(),
            target_on: false,
            time: 0.0,
        }],
    )?;
    let params = SimParams {
        t_start: cfg.sim.t_start_s,
        t_end: cfg.sim.t_end_s,
        dt: cfg.sim.dt_s,
        source_mode: SourceMode::Pulsed(vec![packet]),
    };
    let arrival = packet.t_emit + cfg.network.arm_length_m / SPEED_OF_LIGHT;
    for model in models(cfg.model) {
        let out = simulate(&net, &sched, model, &params)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        emit_trace(ctx, &format!("fig4b_{}.csv", model.name()), &out)?;
        let v = contrast_near(&out, arrival)?;
        let _ = writeln!(
            ctx.summary,
            "[{}] packet visibility V = {:.6} -- {}",
            model.name(),
            v,
            interference_verdict(v, cfg.analysis.visibility_cutoff)
        );
    }
    Ok(())
}

fn run_fig2(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let packet = match cfg.sim.packets.first() {
        Some(p) => packet_from(p)?,
        None => default_short_packet(cfg),
    };
    let switch_time = cfg
        .schedule
        .events
        .first()
        .map(|e| e.time_s)
        .unwrap_or(0.0);
    let params = Fig2Params {
        mzi: mzi_params(cfg),
        packet,
        switch_time,
        ramp_duration: cfg.schedule.ramp_duration_s,
        t_start: cfg.sim.t_start_s,
        t_end: cfg.sim.t_end_s,
        dt: cfg.sim.dt_s,
    };
    let res = run_fig2_scenario(&params).map_err(|e| CliError::Runtime(e.to_string()))?;
    if let Some(w) = &res.warning {
        let _ = writeln!(ctx.summary, "warning: {w}");
    }
    let arrival = packet.t_emit + cfg.network.arm_length_m / SPEED_OF_LIGHT;
    for (model, out) in [
        (PropagationModel::Local, &res.local),
        (PropagationModel::NonLocal, &res.nonlocal),
    ] {
        emit_trace(ctx, &format!("fig2_{}.csv", model.name()), out)?;
        let v = contrast_near(out, arrival)?;
        let _ = writeln!(
            ctx.summary,
            "[{}] in-flight packet visibility V = {:.6} -- {}",
            model.name(),
            v,
            interference_verdict(v, cfg.analysis.visibility_cutoff)
        );
    }
    Ok(())
}

fn run_fig4c(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let (packet1, packet2) = match cfg.sim.packets.len() {
        0 => {
            let base = WavePacket {
                t_emit: 0.0,
                wavelength: cfg.network.wavelength_m,
                coherence_length: cfg.network.coherence_length_m,
                peak_amp: 1.0,
            };
            (base, Some(base))
        }
        1 => (packet_from(&cfg.sim.packets[0])?, None),
        _ => (
            packet_from(&cfg.sim.packets[0])?,
            Some(packet_from(&cfg.sim.packets[1])?),
        ),
    };
    let sched = schedule_from(cfg, Vec::new())?;
    let flight = cfg.network.arm_length_m / SPEED_OF_LIGHT;
    let sigma = packet1
        .sigma_t()
        .max(packet2.map(|p| p.sigma_t()).unwrap_or(0.0));
    let first = packet1
        .t_emit
        .min(packet2.map(|p| p.t_emit).unwrap_or(packet1.t_emit));
    let last = packet1
        .t_emit
        .max(packet2.map(|p| p.t_emit).unwrap_or(packet1.t_emit));
    let t_start = first + flight - 5.0 * sigma;
    let t_end = last + flight + 5.0 * sigma;

    let mut weight = None;
    for model in models(cfg.model) {
        let params = Fig4cParams {
            mzi: mzi_params(cfg),
            packet1,
            packet2,
            schedule: sched.clone(),
            model,
            t_start,
            t_end,
            dt: cfg.sim.dt_s,
        };
        let res = run_fig4c_scenario(&params).map_err(|e| CliError::Runtime(e.to_string()))?;
        if let Some(w) = &res.warning {
            let _ = writeln!(ctx.summary, "warning: {w}");
        }
        emit_trace(ctx, &format!("fig4c_{}.csv", model.name()), &res.output)?;
        let v1 = contrast_near(&res.output, packet1.t_emit + flight)?;
        let _ = writeln!(
            ctx.summary,
            "[{}] packet-1 visibility V = {:.6}",
            model.name(),
            v1
        );
        if let Some(p2) = packet2 {
            let v2 = contrast_near(&res.output, p2.t_emit + flight)?;
            let _ = writeln!(
                ctx.summary,
                "[{}] packet-2 visibility V = {:.6}",
                model.name(),
                v2
            );
        }
        weight = Some(res.coherence_weight);
    }
    if let Some(w) = weight {
        let _ = writeln!(ctx.summary, "packet-2/packet-1 interference-term weight = {w:.9}");
    }
    Ok(())
}

fn sweep_grid(cfg: &DiffractionConfig, geom: &SlitGeometry, z: f64) -> ScreenGrid {
    let half = if cfg.grid_half_width_m > 0.0 {
        cfg.grid_half_width_m
    } else {
        (4.0 * geom.separation).max(5.0 * geom.young_spacing(z))
    };
    ScreenGrid::new(half, cfg.grid_points)
}

fn slit_geometry(cfg: &DiffractionConfig, open_slits: (bool, bool)) -> Result<SlitGeometry, CliError> {
    SlitGeometry::new(
        cfg.slit_separation_m,
        cfg.slit_width_m,
        cfg.wavelength_m,
        open_slits,
    )
    .map_err(|e| CliError::Config(e.to_string()))
}

fn run_doubleslit_sweep(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let geom = slit_geometry(&cfg.diffraction, (true, true))?;
    let thresholds = ClassifierThresholds::default();
    for (i, &z) in cfg.diffraction.distances_m.iter().enumerate() {
        let grid = sweep_grid(&cfg.diffraction, &geom, z);
        let profile =
            slit_pattern(&geom, z, &grid).map_err(|e| CliError::Runtime(e.to_string()))?;
        let csv = profile_csv(&profile.xs, &profile.intensity)?;
        ctx.emit(&format!("profile_{}.csv", i + 1), &csv)?;
        let regime = classify_regime(&profile, &geom, &thresholds)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let mut line = format!(
            "z = {z:.4e} m -> {} (quadrature {} intervals/slit)",
            regime.name(),
            profile.quadrature_intervals
        );
        if regime == Regime::FarFringes {
            let spacing =
                fringe_spacing(&profile).map_err(|e| CliError::Runtime(e.to_string()))?;
            let _ = write!(
                line,
                ", fringe spacing {spacing:.4e} m (lambda*z/d = {:.4e} m)",
                geom.young_spacing(z)
            );
        }
        let _ = writeln!(ctx.summary, "{line}");
    }
    Ok(())
}

fn run_doubleslit_transient(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let before = slit_geometry(&cfg.diffraction, (true, true))?;
    let after = match cfg.diffraction.close_slit {
        1 => slit_geometry(&cfg.diffraction, (false, true))?,
        2 => slit_geometry(&cfg.diffraction, (true, false))?,
        other => {
            return Err(CliError::Config(format!(
                "close_slit must be 1 or 2, got {other}"
            )))
        }
    };
    let z = cfg.diffraction.transient_z_m;
    let grid = sweep_grid(&cfg.diffraction, &before, z);
    let old = slit_pattern(&before, z, &grid).map_err(|e| CliError::Runtime(e.to_string()))?;
    let new = slit_pattern(&after, z, &grid).map_err(|e| CliError::Runtime(e.to_string()))?;
    ctx.emit(
        "transient_before.csv",
        &profile_csv(&old.xs, &old.intensity)?,
    )?;
    ctx.emit("transient_after.csv", &profile_csv(&new.xs, &new.intensity)?)?;

    let t_switch = cfg.diffraction.switch_time_s;
    for model in models(ctx.cfg.model) {
        let change = pattern_change_time(z, t_switch, model);
        let _ = writeln!(
            ctx.summary,
            "[{}] screen pattern changes at t = {change:.4e} s (switch at {t_switch:.4e} s, z/c = {:.4e} s)",
            model.name(),
            z / SPEED_OF_LIGHT
        );
        for &t in &cfg.diffraction.sample_times_s {
            let shown = if t < change { "old" } else { "new" };
            let _ = writeln!(ctx.summary, "[{}]   t = {t:.4e} s: {shown} pattern", model.name());
        }
    }
    Ok(())
}

fn run_custom(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let net = build_net(cfg)?;
    let sched = schedule_from(cfg, Vec::new())?;
    sched
        .timelines(&net)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let source_mode = if cfg.sim.packets.is_empty() {
        SourceMode::Continuous
    } else {
        SourceMode::Pulsed(
            cfg.sim
                .packets
                .iter()
                .map(packet_from)
                .collect::<Result<_, _>>()?,
        )
    };
    let params = SimParams {
        t_start: cfg.sim.t_start_s,
        t_end: cfg.sim.t_end_s,
        dt: cfg.sim.dt_s,
        source_mode,
    };
    for model in models(cfg.model) {
        let out = simulate(&net, &sched, model, &params)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        emit_trace(ctx, &format!("custom_{}.csv", model.name()), &out)?;
        for det in [mzi_ids::DET1, mzi_ids::DET2] {
            let tr = out.trace(det).expect("detector exists");
            match detect_onset(tr, cfg.analysis.onset_threshold, ctx.baseline_window())
                .map_err(|e| CliError::Runtime(e.to_string()))?
            {
                Some(r) => {
                    let _ = writeln!(
                        ctx.summary,
                        "[{}] {det}: onset {:.4e} s, settle {:.4e} s",
                        model.name(),
                        r.onset_time,
                        r.settle_time
                    );
                }
                None => {
                    let _ = writeln!(ctx.summary, "[{}] {det}: no transient", model.name());
                }
            }
        }
    }
    // Static sanity line from the closed-form path sum.
    let static_powers = analytic_oracle(&net, &Default::default())
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let rendered: Vec<String> = static_powers
        .iter()
        .map(|(id, p)| format!("{id} = {p:.6}"))
        .collect();
    let _ = writeln!(ctx.summary, "static all-on powers: {}", rendered.join(", "));
    Ok(())
}
