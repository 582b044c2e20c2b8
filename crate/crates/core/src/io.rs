//! File formats: coefficient JSON, signal CSV with a JSON sidecar, and
//! generic JSON reports.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx::ApproximationTarget;
use crate::error::{invalid, Result};
use crate::signals::PeriodicSignal;
use crate::spectral::{SpectrumGap, TransferPoly};

/// `{"degree": d, "coeffs": [a0, ..., ad], "target": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFile {
    pub degree: usize,
    pub coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<ApproximationTarget>,
}

impl PolyFile {
    pub fn new(poly: &TransferPoly, target: Option<ApproximationTarget>) -> Self {
        Self {
            degree: poly.degree(),
            coeffs: poly.coeffs().to_vec(),
            target,
        }
    }

    pub fn poly(&self) -> Result<TransferPoly> {
        if self.coeffs.len() != self.degree + 1 {
            return Err(invalid(
                "coeffs",
                format!("degree {} needs {} coefficients, got {}", self.degree, self.degree + 1, self.coeffs.len()),
            ));
        }
        TransferPoly::new(self.coeffs.clone())
    }
}

/// Sidecar describing a signal file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalMeta {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<SpectrumGap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real: Option<bool>,
    /// Largest gap-bin magnitude relative to the spectrum norm.
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "gapLeakage")]
    pub gap_leakage: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_poly(path: &Path, poly: &TransferPoly, target: Option<ApproximationTarget>) -> Result<()> {
    write_json(path, &PolyFile::new(poly, target))
}

pub fn read_poly(path: &Path) -> Result<TransferPoly> {
    read_json::<PolyFile>(path)?.poly()
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    t: i64,
    re: f64,
    im: f64,
}

/// Writes `t,re,im` rows for one period.
pub fn write_signal_csv(path: &Path, x: &PeriodicSignal) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for (t, v) in x.samples().iter().enumerate() {
        writer.serialize(SampleRecord {
            t: t as i64,
            re: v.re,
            im: v.im,
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a `t,re,im` file; rows must cover `t = 0..N-1` in order.
pub fn read_signal_csv(path: &Path) -> Result<PeriodicSignal> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut samples = Vec::new();
    for (i, record) in reader.deserialize::<SampleRecord>().enumerate() {
        let record = record?;
        if record.t != i as i64 {
            return Err(invalid("t", format!("row {i} has t = {}, expected {i}", record.t)));
        }
        samples.push(Complex64::new(record.re, record.im));
    }
    PeriodicSignal::new(samples)
}

/// Writes the CSV and its sidecar; the sidecar's `gap` comes from the signal's tag.
pub fn write_signal(csv_path: &Path, meta_path: &Path, x: &PeriodicSignal, meta: &SignalMeta) -> Result<()> {
    write_signal_csv(csv_path, x)?;
    write_json(meta_path, meta)
}

/// Reads a signal, attaching the sidecar's gap when one is given.
pub fn read_signal(csv_path: &Path, meta_path: Option<&Path>) -> Result<PeriodicSignal> {
    let x = read_signal_csv(csv_path)?;
    let Some(meta_path) = meta_path else {
        return Ok(x);
    };
    let meta: SignalMeta = read_json(meta_path)?;
    if meta.n != x.len() {
        return Err(invalid("N", format!("sidecar says {} samples, file has {}", meta.n, x.len())));
    }
    Ok(match meta.gap {
        Some(gap) => x.with_gap(gap),
        None => x,
    })
}

/// Writes rows of a CSV from a header and records.
pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
