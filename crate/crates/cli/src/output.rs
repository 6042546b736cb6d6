//! CSV and summary rendering, and atomic file writes.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use qdistill_core::{ControlPath, ExperimentRecord, TimekeepingPoint};
use serde::Serialize;

pub const SERIES_HEADER: [&str; 8] = ["t", "S_B", "S_A", "S_AB", "I_AB", "P_B", "n_B", "gamma"];

const SIGNIFICANT: usize = 12;

/// `x` with 12 significant digits, in the style of C's `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT as i32).contains(&exp) {
        let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV: {e}"))
}

pub fn series_csv(record: &ExperimentRecord) -> Result<Vec<u8>> {
    csv_bytes(
        &SERIES_HEADER,
        record.series.iter().map(|r| {
            [r.t, r.s_b, r.s_a, r.s_ab, r.i_ab, r.p_b, r.n_b, r.gamma.unwrap_or(f64::NAN)]
                .into_iter()
                .map(fmt_sig)
                .collect()
        }),
    )
}

pub fn path_csv(path: &ControlPath) -> Result<Vec<u8>> {
    csv_bytes(
        &["step", "gamma", "dt"],
        path.steps
            .iter()
            .enumerate()
            .map(|(k, s)| vec![(k + 1).to_string(), fmt_sig(s.gamma), fmt_sig(s.dt)]),
    )
}

/// One grid point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub initial_entropy: f64,
    pub final_entropy: f64,
    pub bound: f64,
    pub initial_n_b: f64,
    pub final_n_b: f64,
}

impl SweepRow {
    pub fn difference(&self) -> f64 {
        self.final_entropy - self.bound
    }
}

pub fn sweep_csv(axis: &str, rows: &[SweepRow]) -> Result<Vec<u8>> {
    csv_bytes(
        &[axis, "S_B_initial", "S_B_final", "bound", "difference", "n_B_initial", "n_B_final"],
        rows.iter().map(|r| {
            [r.value, r.initial_entropy, r.final_entropy, r.bound, r.difference(), r.initial_n_b, r.final_n_b]
                .into_iter()
                .map(fmt_sig)
                .collect()
        }),
    )
}

pub fn timekeeping_csv(points: &[TimekeepingPoint]) -> Result<Vec<u8>> {
    csv_bytes(
        &["sigma", "relative_error"],
        points
            .iter()
            .map(|p| vec![fmt_sig(p.sigma), fmt_sig(p.relative_error)]),
    )
}

/// Key results of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub mode: String,
    pub final_entropy: f64,
    pub bound: f64,
    pub difference: f64,
    pub initial_entropy: f64,
    #[serde(rename = "final_n_B")]
    pub final_n_b: f64,
    #[serde(rename = "initial_n_B")]
    pub initial_n_b: f64,
    #[serde(rename = "optimal_n_B")]
    pub optimal_n_b: f64,
    pub total_time_steps: usize,
    pub delta_t: f64,
    pub total_time: f64,
    pub beta: f64,
    pub objective: String,
    pub log_base: String,
    pub seed: u64,
    /// First step at which `S_B − bound` drops to 0.05 or below.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_to_converge: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_difference: Option<f64>,
    pub wall_seconds: f64,
}

pub fn summary_toml(summary: &Summary) -> Result<Vec<u8>> {
    Ok(toml::to_string(summary)?.into_bytes())
}

/// Writes `bytes` to `path` via a temporary file in the same directory, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.1), "0.1");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(fmt_sig(123456.789), "123456.789");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-07");
        assert_eq!(fmt_sig(2.0e15), "2e+15");
        assert_eq!(fmt_sig(f64::NAN), "nan");
        assert_eq!(fmt_sig(29.999999999999996), "30");
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
