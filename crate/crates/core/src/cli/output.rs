//! CSV tables and the run manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{FloqError, Result};
use crate::observables::ObservableSeries;

/// Twelve significant digits, fixed notation for moderate exponents.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').unwrap();
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{e}")
    }
}

fn csv_err(e: csv::Error) -> FloqError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => FloqError::Io(io),
        other => FloqError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Write a table whose first column is `first` and whose remaining columns
/// follow `headers`.
pub fn write_table(path: &Path, first: &str, headers: &[String], rows: impl IntoIterator<Item = (f64, Vec<f64>)>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut head = vec![first.to_string()];
    head.extend(headers.iter().cloned());
    w.write_record(&head).map_err(csv_err)?;
    for (x, values) in rows {
        let mut rec = vec![fmt_sig(x)];
        rec.extend(values.iter().map(|&v| fmt_sig(v)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series(path: &Path, series: &ObservableSeries) -> Result<()> {
    write_table(
        path,
        "t_over_T",
        series.keys(),
        series.times().iter().copied().zip(series.rows().iter().cloned()),
    )
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConvergenceReport {
    pub evolution: String,
    pub steps_per_period: usize,
    /// Change of the one-period map when the step count was last doubled.
    pub step_doubling_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<usize>,
    pub max_norm_drift: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Manifest {
    pub command: String,
    pub model: String,
    pub dim: usize,
    pub sector_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<i8>,
    pub omega: f64,
    pub period: f64,
    pub period_eff: f64,
    pub delta_omega_rel: f64,
    pub convergence: ConvergenceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub magnus_h0_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub magnus_h1_norm: Option<f64>,
    pub files: Vec<String>,
    pub wall_clock_s: f64,
    pub config: String,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).map_err(|e| FloqError::Io(e.into()))?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
