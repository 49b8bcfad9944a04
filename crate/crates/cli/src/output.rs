//! Deterministic CSV and report emission. Floats are written with nine
//! significant digits so identical inputs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::CliError;

fn fmt_f64(v: f64) -> String {
    format!("{v:.8e}")
}

/// Trace CSV: `time_s,power_det1,power_det2`.
pub fn trace_csv(times: &[f64], det1: &[f64], det2: &[f64]) -> Result<String, CliError> {
    if times.is_empty() {
        return Err(CliError::Runtime("refusing to write empty trace".into()));
    }
    if times.len() != det1.len() || times.len() != det2.len() {
        return Err(CliError::Runtime("trace column length mismatch".into()));
    }
    let mut s = String::from("time_s,power_det1,power_det2\n");
    for i in 0..times.len() {
        let _ = writeln!(
            s,
            "{},{},{}",
            fmt_f64(times[i]),
            fmt_f64(det1[i]),
            fmt_f64(det2[i])
        );
    }
    Ok(s)
}

/// Profile CSV: `x_m,intensity_rel`.
pub fn profile_csv(xs: &[f64], intensity: &[f64]) -> Result<String, CliError> {
    if xs.is_empty() {
        return Err(CliError::Runtime("refusing to write empty profile".into()));
    }
    if xs.len() != intensity.len() {
        return Err(CliError::Runtime("profile column length mismatch".into()));
    }
    let mut s = String::from("x_m,intensity_rel\n");
    for i in 0..xs.len() {
        let _ = writeln!(s, "{},{}", fmt_f64(xs[i]), fmt_f64(intensity[i]));
    }
    Ok(s)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
