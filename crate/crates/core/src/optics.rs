//! Elementary optical mathematics: complex field arithmetic, beam-splitter
//! scattering, AOM transmission ramps, wave-packet envelopes and mutual
//! coherence factors.
//!
//! All functions here are pure; they carry no shared state.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Scalar optical field value, dimensionless.
pub type ComplexAmplitude = Complex64;

/// Speed of light in vacuum, m/s. The single source of truth for all
/// delay computations.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Optical power carried by a field amplitude: |a|^2.
#[inline]
pub fn power(a: ComplexAmplitude) -> f64 {
    a.norm_sqr()
}

/// Symmetric lossless 50/50 beam splitter, matrix (1, i; i, 1)/sqrt(2).
///
/// `out_c = (in_a + i*in_b)/sqrt(2)`, `out_d = (i*in_a + in_b)/sqrt(2)`.
/// Power is conserved exactly up to floating rounding.
pub fn beam_splitter_scatter(
    in_a: ComplexAmplitude,
    in_b: ComplexAmplitude,
) -> Result<(ComplexAmplitude, ComplexAmplitude)> {
    if !in_a.re.is_finite() || !in_a.im.is_finite() {
        return Err(Error::NonFinite("beam splitter input a"));
    }
    if !in_b.re.is_finite() || !in_b.im.is_finite() {
        return Err(Error::NonFinite("beam splitter input b"));
    }
    let i = Complex64::new(0.0, 1.0);
    let out_c = (in_a + i * in_b) * FRAC_1_SQRT_2;
    let out_d = (i * in_a + in_b) * FRAC_1_SQRT_2;
    Ok((out_c, out_d))
}

/// Mirror reflection factor: unit magnitude, phase pi.
pub const MIRROR_FACTOR: ComplexAmplitude = Complex64::new(-1.0, 0.0);

/// A finite wave packet: Gaussian envelope whose temporal width is set by
/// the source coherence length, `sigma_t = L_c / c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacket {
    /// Envelope center at the source, s.
    pub t_emit: f64,
    /// Carrier wavelength, m.
    pub wavelength: f64,
    /// Coherence length, m.
    pub coherence_length: f64,
    /// Peak field amplitude, dimensionless.
    pub peak_amp: f64,
}

impl WavePacket {
    pub fn new(t_emit: f64, wavelength: f64, coherence_length: f64, peak_amp: f64) -> Result<Self> {
        if !(wavelength > 0.0) {
            return Err(Error::InvalidPacket(format!(
                "wavelength must be > 0, got {wavelength}"
            )));
        }
        if !(coherence_length > 0.0) {
            return Err(Error::InvalidPacket(format!(
                "coherence length must be > 0, got {coherence_length}"
            )));
        }
        if !(peak_amp >= 0.0) {
            return Err(Error::InvalidPacket(format!(
                "peak amplitude must be >= 0, got {peak_amp}"
            )));
        }
        if !t_emit.is_finite() {
            return Err(Error::InvalidPacket("emission time must be finite".into()));
        }
        Ok(Self {
            t_emit,
            wavelength,
            coherence_length,
            peak_amp,
        })
    }

    /// Envelope temporal width, `sigma_t = L_c / c`.
    pub fn sigma_t(&self) -> f64 {
        self.coherence_length / SPEED_OF_LIGHT
    }
}

/// Gaussian envelope amplitude of `packet` observed at time `t` after a
/// flight delay of `arrival_offset` from the source.
pub fn packet_envelope(t: f64, packet: &WavePacket, arrival_offset: f64) -> f64 {
    let sigma = packet.sigma_t();
    let u = t - packet.t_emit - arrival_offset;
    packet.peak_amp * (-(u * u) / (2.0 * sigma * sigma)).exp()
}

/// Degree of mutual coherence between two replicas of `packet` separated
/// by a relative delay `delta`: `gamma(delta) = exp(-(delta/sigma_t)^2)`.
///
/// Even in `delta`, equal to 1 at zero delay, strictly decreasing in
/// |delta|.
pub fn coherence_factor(delta: f64, packet: &WavePacket) -> f64 {
    let sigma = packet.sigma_t();
    let r = delta / sigma;
    (-(r * r)).exp()
}

/// One commanded AOM state change. The transmission ramps linearly over
/// `ramp_duration` starting at `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchEvent {
    pub time: f64,
    pub target_on: bool,
}

/// Time history of a single AOM's zero-order amplitude transmission.
///
/// "On" transmits the in-interferometer (zero-order) beam with factor 1;
/// "off" diverts everything into the first-order beam, which leaves the
/// network. Light is never absorbed.
#[derive(Debug, Clone, PartialEq)]
pub struct AomTimeline {
    initial_on: bool,
    ramp_duration: f64,
    events: Vec<SwitchEvent>,
}

impl AomTimeline {
    /// Always-on timeline (no events).
    pub fn always_on(ramp_duration: f64) -> Self {
        Self {
            initial_on: true,
            ramp_duration,
            events: Vec::new(),
        }
    }

    /// Build a timeline from time-ordered events. The state before the
    /// first event is the opposite of that event's target.
    pub fn from_events(ramp_duration: f64, events: Vec<SwitchEvent>) -> Result<Self> {
        if !(ramp_duration > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "ramp duration must be > 0, got {ramp_duration}"
            )));
        }
        for w in events.windows(2) {
            if w[1].time < w[0].time {
                return Err(Error::InvalidSchedule(format!(
                    "events out of order: {} s after {} s",
                    w[1].time, w[0].time
                )));
            }
            if w[1].time - w[0].time < ramp_duration {
                return Err(Error::InvalidSchedule(format!(
                    "events at {} s and {} s overlap within the {} s ramp",
                    w[0].time, w[1].time, ramp_duration
                )));
            }
        }
        let initial_on = events.first().map(|e| !e.target_on).unwrap_or(true);
        Ok(Self {
            initial_on,
            ramp_duration,
            events,
        })
    }

    pub fn ramp_duration(&self) -> f64 {
        self.ramp_duration
    }

    /// Zero-order amplitude transmission at time `t`, in [0, 1].
    /// Piecewise linear and continuous in `t`.
    pub fn transmission(&self, t: f64) -> f64 {
        let mut level = if self.initial_on { 1.0 } else { 0.0 };
        for ev in &self.events {
            if t < ev.time {
                return level;
            }
            let target = if ev.target_on { 1.0 } else { 0.0 };
            if t < ev.time + self.ramp_duration {
                let frac = (t - ev.time) / self.ramp_duration;
                return level + (target - level) * frac;
            }
            level = target;
        }
        level
    }
}

/// Convenience wrapper mirroring a static AOM state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AomState {
    pub on: bool,
    /// Switching ramp duration, s. Default 10 ns.
    pub ramp_duration: f64,
}

impl Default for AomState {
    fn default() -> Self {
        Self {
            on: true,
            ramp_duration: 10e-9,
        }
    }
}
