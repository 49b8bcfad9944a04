//! Post-processing of detector traces: transient-onset detection, fringe
//! visibility, and local-vs-nonlocal model discrimination.

use crate::engine::DetectorTrace;
use crate::error::{Error, Result};

/// When and how strongly a trace departed its pre-event baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct OnsetReport {
    pub detector_id: String,
    pub onset_time: f64,
    pub settle_time: f64,
    pub threshold_used: f64,
}

/// Fringe contrast `V = (I_max - I_min) / (I_max + I_min)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityReport {
    pub visibility: f64,
    pub i_max: f64,
    pub i_min: f64,
}

/// Detect when `trace` first departs its baseline by more than
/// `threshold` of the full-range change, and when it settles at its final
/// value. The baseline is the mean over the leading `baseline_window`
/// seconds, which must precede any scheduled event.
///
/// Returns `None` when the trace never departs the baseline.
pub fn detect_onset(
    trace: &DetectorTrace,
    threshold: f64,
    baseline_window: f64,
) -> Result<Option<OnsetReport>> {
    let n = trace.powers.len();
    if n < 3 {
        return Err(Error::Domain(format!(
            "trace needs at least 3 samples, got {n}"
        )));
    }
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!("threshold must be > 0, got {threshold}")));
    }
    let t0 = trace.times[0];
    let baseline_samples: Vec<f64> = trace
        .times
        .iter()
        .zip(&trace.powers)
        .take_while(|(t, _)| **t <= t0 + baseline_window)
        .map(|(_, p)| *p)
        .collect();
    if baseline_samples.is_empty() {
        return Err(Error::Domain("baseline window contains no samples".into()));
    }
    let baseline = baseline_samples.iter().sum::<f64>() / baseline_samples.len() as f64;
    let final_value = *trace.powers.last().expect("non-empty");
    let range = (final_value - baseline).abs();
    let abs_threshold = threshold * range.max(1e-12);

    let onset_idx = match trace
        .powers
        .iter()
        .position(|p| (p - baseline).abs() > abs_threshold)
    {
        Some(i) => i,
        None => return Ok(None),
    };

    // Last sample still outside the threshold band around the final value.
    let settle_idx = trace
        .powers
        .iter()
        .rposition(|p| (p - final_value).abs() > abs_threshold)
        .map(|i| (i + 1).min(n - 1))
        .unwrap_or(onset_idx)
        .max(onset_idx);

    Ok(Some(OnsetReport {
        detector_id: trace.detector_id.clone(),
        onset_time: trace.times[onset_idx],
        settle_time: trace.times[settle_idx],
        threshold_used: threshold,
    }))
}

/// Visibility of a sampled intensity scan (e.g. power versus swept arm
/// phase over at least one full fringe).
pub fn visibility(scan: &[f64]) -> Result<VisibilityReport> {
    if scan.is_empty() {
        return Err(Error::Domain("empty scan".into()));
    }
    let i_max = scan.iter().cloned().fold(f64::MIN, f64::max);
    let i_min = scan.iter().cloned().fold(f64::MAX, f64::min);
    visibility_from_extremes(i_max, i_min)
}

/// Visibility from max/min intensity estimates.
pub fn visibility_from_extremes(i_max: f64, i_min: f64) -> Result<VisibilityReport> {
    if i_max + i_min == 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok(VisibilityReport {
        visibility: (i_max - i_min) / (i_max + i_min),
        i_max,
        i_min,
    })
}

/// Two-port contrast of a detector pair at the sample where the summed
/// power peaks. For a balanced two-beam interferometer this equals the
/// fringe visibility a phase scan would measure.
pub fn port_contrast_at_peak(
    bright: &DetectorTrace,
    dark: &DetectorTrace,
) -> Result<VisibilityReport> {
    if bright.powers.len() != dark.powers.len() || bright.powers.is_empty() {
        return Err(Error::Domain("traces must be non-empty and equal length".into()));
    }
    let idx = bright
        .powers
        .iter()
        .zip(&dark.powers)
        .enumerate()
        .max_by(|a, b| (a.1 .0 + a.1 .1).total_cmp(&(b.1 .0 + b.1 .1)))
        .map(|(i, _)| i)
        .expect("non-empty");
    let (a, b) = (bright.powers[idx], dark.powers[idx]);
    visibility_from_extremes(a.max(b), a.min(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Comparison of the transient onsets of two traces that differ only in
/// the propagation model.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationReport {
    pub onset_local: Option<f64>,
    pub onset_nonlocal: Option<f64>,
    /// `onset_local - onset_nonlocal`, s.
    pub onset_difference: Option<f64>,
    pub expected_delay: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Compare the onset times of a local-model and a nonlocal-model trace
/// and PASS when their difference matches `expected_delay` within
/// `2 * dt`.
pub fn discriminate_models(
    trace_local: &DetectorTrace,
    trace_nonlocal: &DetectorTrace,
    expected_delay: f64,
    threshold: f64,
    baseline_window: f64,
) -> Result<DiscriminationReport> {
    let dt = trace_local.dt();
    let tolerance = 2.0 * dt;
    let local = detect_onset(trace_local, threshold, baseline_window)?;
    let nonlocal = detect_onset(trace_nonlocal, threshold, baseline_window)?;
    let (onset_local, onset_nonlocal) = (
        local.as_ref().map(|r| r.onset_time),
        nonlocal.as_ref().map(|r| r.onset_time),
    );
    let (difference, verdict) = match (onset_local, onset_nonlocal) {
        (Some(a), Some(b)) => {
            let d = a - b;
            let v = if (d - expected_delay).abs() <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            (Some(d), v)
        }
        _ => (None, Verdict::Inconclusive),
    };
    Ok(DiscriminationReport {
        onset_local,
        onset_nonlocal,
        onset_difference: difference,
        expected_delay,
        tolerance,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const NS: f64 = 1e-9;

    fn trace(times: Vec<f64>, powers: Vec<f64>) -> DetectorTrace {
        DetectorTrace {
            detector_id: "det1".into(),
            times,
            powers,
        }
    }

    fn step_trace(step_at: f64) -> DetectorTrace {
        let dt = 0.5 * NS;
        let times: Vec<f64> = (0..400).map(|i| -20.0 * NS + i as f64 * dt).collect();
        let powers = times
            .iter()
            .map(|t| if *t < step_at { 1.0 } else { 0.25 })
            .collect();
        trace(times, powers)
    }

    #[test]
    fn constant_trace_has_no_onset() {
        let tr = step_trace(f64::INFINITY);
        assert!(detect_onset(&tr, 0.01, 10.0 * NS).unwrap().is_none());
    }

    #[test]
    fn step_onset_detected_within_one_sample() {
        let tr = step_trace(50.0 * NS);
        let rep = detect_onset(&tr, 0.01, 10.0 * NS).unwrap().unwrap();
        assert!((rep.onset_time - 50.0 * NS).abs() <= 0.5 * NS);
        assert!(rep.settle_time >= rep.onset_time);
    }

    #[test]
    fn onset_is_translation_equivariant() {
        let tr = step_trace(50.0 * NS);
        let shift = 7.0 * NS;
        let shifted = trace(
            tr.times.iter().map(|t| t + shift).collect(),
            tr.powers.clone(),
        );
        let a = detect_onset(&tr, 0.01, 10.0 * NS).unwrap().unwrap();
        let b = detect_onset(&shifted, 0.01, 10.0 * NS).unwrap().unwrap();
        assert_relative_eq!(b.onset_time - a.onset_time, shift, max_relative = 1e-12);
        assert_relative_eq!(b.settle_time - a.settle_time, shift, max_relative = 1e-12);
    }

    #[test]
    fn visibility_of_full_fringe_scan() {
        let scan: Vec<f64> = (0..128)
            .map(|k| 1.0 + (std::f64::consts::TAU * k as f64 / 128.0).cos())
            .collect();
        let rep = visibility(&scan).unwrap();
        assert_relative_eq!(rep.visibility, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn two_beam_visibility_formula() {
        // Arms carrying powers 1 and 0.25: V = 2*sqrt(0.25)/1.25 = 0.8.
        let (a, b): (f64, f64) = (1.0, 0.25);
        let i_max = a + b + 2.0 * (a * b).sqrt();
        let i_min = a + b - 2.0 * (a * b).sqrt();
        let rep = visibility_from_extremes(i_max, i_min).unwrap();
        assert_relative_eq!(rep.visibility, 0.8, max_relative = 1e-12);
    }

    #[test]
    fn single_beam_has_zero_visibility() {
        let rep = visibility(&[0.25; 16]).unwrap();
        assert_eq!(rep.visibility, 0.0);
    }

    #[test]
    fn dark_scan_visibility_is_undefined() {
        assert!(matches!(
            visibility(&[0.0; 8]),
            Err(Error::UndefinedVisibility)
        ));
    }

    #[test]
    fn discrimination_passes_on_expected_delay() {
        let local = step_trace(50.0 * NS);
        let nonlocal = step_trace(0.0);
        let rep =
            discriminate_models(&local, &nonlocal, 50.0 * NS, 0.01, 10.0 * NS).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!((rep.onset_difference.unwrap() - 50.0 * NS).abs() <= rep.tolerance);
    }

    #[test]
    fn identical_traces_pass_zero_expectation() {
        let tr = step_trace(50.0 * NS);
        let rep = discriminate_models(&tr, &tr, 0.0, 0.01, 10.0 * NS).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.onset_difference, Some(0.0));
    }

    #[test]
    fn wrong_expectation_fails() {
        let tr = step_trace(50.0 * NS);
        let rep = discriminate_models(&tr, &tr, 50.0 * NS, 0.01, 10.0 * NS).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
    }

    #[test]
    fn missing_onset_is_inconclusive() {
        let flat = step_trace(f64::INFINITY);
        let stepped = step_trace(50.0 * NS);
        let rep =
            discriminate_models(&stepped, &flat, 50.0 * NS, 0.01, 10.0 * NS).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }
}
