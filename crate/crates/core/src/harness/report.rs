use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentReport, ReportFormat};
use crate::arith::ArithFn;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRecord {
    pub function: ArithFn,
    pub t: u64,
    pub x: u64,
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "R_over_x")]
    pub r_over_x: f64,
    /// Previous grid point (or `x` itself for the first one).
    pub window_lo: u64,
    /// `max |R(y, t)|/y` over integers `y` in `[window_lo, x]`.
    pub window_max_abs_r_over_x: f64,
    pub fitted_form: f64,
    /// `x·log log x / log x`.
    pub literature_form: f64,
    /// `x / sqrt(log log x)`.
    pub sqrt_loglog_form: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRecord {
    pub label: String,
    pub log_c: f64,
    pub c: f64,
    pub max_residual: f64,
    pub points_used: usize,
    pub zeros_excluded: usize,
    /// Trend slope of `log(window max)` against `log x`, for decay fits.
    pub window_max_slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AverageRecord {
    pub function: ArithFn,
    pub x: u64,
    pub mode: &'static str,
    pub uniform_average: f64,
    pub uniform_average_with_zero: f64,
    pub harmonic_average: f64,
    pub uniform_over_x: f64,
    /// Circular only: uniform average minus `(M² − Q)/x`.
    pub identity_residual: Option<f64>,
    pub literature_form: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupRecord {
    pub function: ArithFn,
    pub x: u64,
    pub q_bound: u64,
    pub random_samples: usize,
    pub seed: u64,
    pub evaluated: usize,
    pub sup: f64,
    pub argmax_alpha: f64,
    /// Numerator and denominator of the maximizer, or `0, 0` when it was a
    /// random sample.
    pub argmax_num: u64,
    pub argmax_den: u64,
    pub ratio_c1: f64,
    pub ratio_c2: f64,
    /// `x / log x`.
    pub threshold: f64,
    pub sup_over_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KtupleRecord {
    pub function: ArithFn,
    pub offsets: String,
    pub q: u64,
    pub x: u64,
    pub value: i64,
    pub value_over_x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalRecord {
    pub function: ArithFn,
    pub x: u64,
    pub t: u64,
    pub energy: u64,
    pub expected: u64,
    pub exact_match: bool,
    pub quadrature: Option<f64>,
    pub quadrature_rel_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsRecord {
    pub offsets: String,
    pub q: u64,
    pub prime_bound: u64,
    pub value: f64,
    pub tail_bound: f64,
    pub obstruction: Option<u64>,
    pub x: u64,
    pub oracle_density: f64,
    pub relative_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Records {
    DecayFit(Vec<DecayRecord>),
    AverageSweep(Vec<AverageRecord>),
    SupTwisted(Vec<SupRecord>),
    KtupleSweep(Vec<KtupleRecord>),
    ParsevalSuite(Vec<ParsevalRecord>),
    ConstantsSuite(Vec<ConstantsRecord>),
}

impl Records {
    pub fn len(&self) -> usize {
        match self {
            Records::DecayFit(r) => r.len(),
            Records::AverageSweep(r) => r.len(),
            Records::SupTwisted(r) => r.len(),
            Records::KtupleSweep(r) => r.len(),
            Records::ParsevalSuite(r) => r.len(),
            Records::ConstantsSuite(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn write_csv(&self) -> Result<Vec<u8>> {
        match self {
            Records::DecayFit(r) => rows_to_csv(r),
            Records::AverageSweep(r) => rows_to_csv(r),
            Records::SupTwisted(r) => rows_to_csv(r),
            Records::KtupleSweep(r) => rows_to_csv(r),
            Records::ParsevalSuite(r) => rows_to_csv(r),
            Records::ConstantsSuite(r) => rows_to_csv(r),
        }
    }
}

/// Wall-clock time of one job. Kept out of the report body.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointTiming {
    pub label: String,
    pub seconds: f64,
}

fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner()
        .map_err(|e| crate::Error::Internal(e.to_string()))
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

impl ExperimentReport {
    /// The report body. JSON carries everything; CSV carries the records and
    /// leaves fits to [`ExperimentReport::fits_csv`].
    pub fn to_bytes(&self, format: ReportFormat) -> Result<Vec<u8>> {
        match format {
            ReportFormat::Json => {
                let mut out = serde_json::to_vec_pretty(self)?;
                out.push(b'\n');
                Ok(out)
            }
            ReportFormat::Csv => self.records.write_csv(),
        }
    }

    pub fn fits_csv(&self) -> Result<Vec<u8>> {
        rows_to_csv(&self.fits)
    }

    pub fn timings_csv(&self) -> Result<Vec<u8>> {
        rows_to_csv(&self.timings)
    }

    /// Writes the report to `path`, plus `<stem>.fits.csv` (CSV format with
    /// fits) and `<stem>.timings.csv`. Returns every path written.
    pub fn write_files(&self, path: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
        let mut written = vec![path.to_path_buf()];
        fs::write(path, self.to_bytes(format)?)?;
        if format == ReportFormat::Csv && !self.fits.is_empty() {
            let p = sidecar(path, "fits");
            fs::write(&p, self.fits_csv()?)?;
            written.push(p);
        }
        let p = sidecar(path, "timings");
        fs::write(&p, self.timings_csv()?)?;
        written.push(p);
        Ok(written)
    }
}
