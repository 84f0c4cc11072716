//! Loaders and writers for spatio-temporal datasets stored as CSV.
//!
//! Two files describe a dataset: a signal matrix (one row per sensor, one
//! column per time instance, optional `t1,...,tm` header) and a coordinate
//! table with a required `id,x,y` (or `id,lon,lat`) header. Real archives
//! contain gaps; entries that are empty or non-numeric load as NaN and are
//! tracked in a validity mask so they can never be sampled as observations
//! nor scored in error metrics.
//!
//! The repository ships only tiny fixtures with this schema. Point the
//! loaders at locally downloaded archives (for instance daily PM2.5
//! concentrations from air-quality sensor networks, or gridded sea surface
//! temperatures) to reproduce the real-data experiments.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::solver::ObservationSet;
use crate::synth::{add_noise, NoiseSpec};

/// What to do with non-finite entries in a signal file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NanPolicy {
    /// Keep NaN entries and expose them through the validity mask.
    #[default]
    Mask,
    /// Fail the load on the first non-finite entry.
    Reject,
}

/// A ground-truth dataset: coordinates, signal, and per-entry validity.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub name: String,
    pub units: String,
    coords: DMatrix<f64>,
    signal: DMatrix<f64>,
    valid: DMatrix<f64>,
}

impl DatasetBundle {
    pub fn new(name: impl Into<String>, coords: DMatrix<f64>, signal: DMatrix<f64>) -> Result<Self> {
        if coords.nrows() != signal.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinate rows vs {} signal rows",
                coords.nrows(),
                signal.nrows()
            )));
        }
        let valid = signal.map(|v| f64::from(v.is_finite()));
        Ok(Self {
            name: name.into(),
            units: String::new(),
            coords,
            signal,
            valid,
        })
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    /// The raw signal; gaps are NaN.
    pub fn signal(&self) -> &DMatrix<f64> {
        &self.signal
    }

    /// 1.0 where the signal is finite.
    pub fn valid(&self) -> &DMatrix<f64> {
        &self.valid
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.signal.nrows(), self.signal.ncols())
    }

    pub fn has_gaps(&self) -> bool {
        self.valid.iter().any(|&v| v == 0.0)
    }
}

/// Loads a signal/coordinates pair into a validated bundle.
pub fn load_bundle(
    signal_path: impl AsRef<Path>,
    coords_path: impl AsRef<Path>,
    policy: NanPolicy,
) -> Result<DatasetBundle> {
    let signal_path = signal_path.as_ref();
    let signal = load_signal_csv(signal_path, policy)?;
    let coords = load_coords_csv(coords_path)?;
    let name = signal_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    DatasetBundle::new(name, coords, signal)
}

/// Reads an `n x m` numeric CSV, tolerating one optional header row.
pub fn load_signal_csv(path: impl AsRef<Path>, policy: NanPolicy) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| parse_err(path, e.to_string()))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        let mut parsed = Vec::with_capacity(record.len());
        let mut numeric = true;
        for field in record.iter() {
            let trimmed = field.trim();
            if trimmed.is_empty() {
                parsed.push(f64::NAN);
                continue;
            }
            match trimmed.parse::<f64>() {
                Ok(v) => parsed.push(v),
                Err(_) => {
                    numeric = false;
                    break;
                }
            }
        }
        if !numeric {
            if line == 0 {
                continue; // header row like t1,...,tm
            }
            return Err(parse_err(
                path,
                format!("row {} contains a non-numeric field", line + 1),
            ));
        }
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err(parse_err(path, "no data rows".into()));
    }
    let width = rows[0].len();
    if width == 0 {
        return Err(parse_err(path, "empty data rows".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(parse_err(
                path,
                format!("row {} has {} fields, expected {width}", i + 1, row.len()),
            ));
        }
    }
    if policy == NanPolicy::Reject {
        for (i, row) in rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(parse_err(
                    path,
                    format!("non-finite entry at row {}, column {}", i + 1, j + 1),
                ));
            }
        }
    }
    Ok(DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]))
}

/// Reads an `id,x,y` (or `id,lon,lat`) coordinate table.
pub fn load_coords_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| parse_err(path, e.to_string()))?;
    {
        let headers = reader
            .headers()
            .map_err(|e| parse_err(path, e.to_string()))?;
        let names: Vec<String> = headers
            .iter()
            .map(|h| h.trim().to_ascii_lowercase())
            .collect();
        let ok = names.len() >= 3
            && names[0] == "id"
            && ((names[1] == "x" && names[2] == "y")
                || (names[1] == "lon" && names[2] == "lat"));
        if !ok {
            return Err(parse_err(
                path,
                format!("expected header id,x,y or id,lon,lat; got {names:?}"),
            ));
        }
    }
    let mut coords: Vec<[f64; 2]> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        if record.len() < 3 {
            return Err(parse_err(path, format!("row {} too short", line + 2)));
        }
        let x: f64 = record[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, format!("bad x at row {}", line + 2)))?;
        let y: f64 = record[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, format!("bad y at row {}", line + 2)))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(
                path,
                format!("non-finite coordinate at row {}", line + 2),
            ));
        }
        coords.push([x, y]);
    }
    if coords.is_empty() {
        return Err(parse_err(path, "no coordinate rows".into()));
    }
    Ok(DMatrix::from_fn(coords.len(), 2, |i, j| coords[i][j]))
}

/// Writes a signal matrix with a `t1,...,tm` header. Values use the
/// shortest decimal form that round-trips, so save/load is lossless.
pub fn save_signal_csv(path: impl AsRef<Path>, signal: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    let header: Vec<String> = (1..=signal.ncols()).map(|j| format!("t{j}")).collect();
    writeln_str(&mut out, &header.join(","));
    for i in 0..signal.nrows() {
        let row: Vec<String> = (0..signal.ncols())
            .map(|j| format_value(signal[(i, j)]))
            .collect();
        writeln_str(&mut out, &row.join(","));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes an `id,x,y` coordinate table.
pub fn save_coords_csv(path: impl AsRef<Path>, coords: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    writeln_str(&mut out, "id,x,y");
    for i in 0..coords.nrows() {
        writeln_str(
            &mut out,
            &format!(
                "{},{},{}",
                i,
                format_value(coords[(i, 0)]),
                format_value(coords[(i, 1)])
            ),
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

fn writeln_str(buf: &mut String, line: &str) {
    let _ = writeln!(buf, "{line}");
}

fn parse_err(path: &Path, msg: String) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        msg,
    }
}

/// Builds an observation set from a bundle: noise is added to the signal,
/// then the sampling mask (intersected with the validity mask) selects the
/// observed entries. The bundle itself is untouched; its signal remains the
/// ground truth.
pub fn make_observation(
    bundle: &DatasetBundle,
    mask: &DMatrix<f64>,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<ObservationSet> {
    let (n, m) = bundle.dims();
    if mask.nrows() != n || mask.ncols() != m {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{m} mask"),
            got: format!("{}x{}", mask.nrows(), mask.ncols()),
        });
    }
    let effective = mask.component_mul(bundle.valid());
    let clean = bundle.signal().map(|v| if v.is_finite() { v } else { 0.0 });
    let noisy = add_noise(&clean, noise, seed);
    let y = effective.component_mul(&noisy);
    ObservationSet::new(y, effective, Some(bundle.signal().clone()))
}
