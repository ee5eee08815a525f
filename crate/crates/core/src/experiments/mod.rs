//! Experiment drivers: timing, disk-averaging sensitivity, grid convergence
//! and coordinate subsampling.
//!
//! Replicates run in parallel but every result is gathered in replicate
//! order before aggregation, so output files are identical for identical
//! `(seed, config)`. Only wall times differ between runs.

mod disk;
mod grid;
mod subsample;
mod timing;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub use disk::{experiment_disk, half_range_radius, log_spaced, DiskConfig, DiskReport};
pub use grid::{experiment_grid, GridConfig, GridFit, GridReport, FIT_HEADER};
pub use subsample::{experiment_subsample, SubsampleConfig, SubsampleReport};
pub use timing::{
    experiment_timing, loglog_slope, machine_metadata, BenchRecord, TimingConfig, BENCH_HEADER, TIMED_STATISTICS,
};

use crate::baselines::mean_std;
use crate::error::Error;

/// Mean and spread of one statistic at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// Sweep coordinate: radius, sample size or subsample size.
    pub x: f64,
    pub statistic: String,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl SummaryRow {
    pub fn from_values(x: f64, statistic: &str, values: &[f64]) -> Self {
        let (mean, std) = if values.is_empty() { (f64::NAN, f64::NAN) } else { mean_std(values) };
        Self { x, statistic: statistic.to_string(), mean, std, count: values.len() }
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_num(self.x),
            self.statistic.clone(),
            fmt_num(self.mean),
            fmt_num(self.std),
            self.count.to_string(),
        ]
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<(), Error>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub(crate) fn write_summary(path: &Path, x_name: &str, rows: &[SummaryRow]) -> Result<(), Error> {
    write_table(path, &[x_name, "statistic", "mean", "std", "count"], rows.iter().map(SummaryRow::fields))
}

/// Checks that a CSV file has exactly `header`, the same number of fields
/// on every record, and numbers in every column except `text_columns`.
/// Returns the record count.
pub fn validate_csv(path: impl AsRef<Path>, header: &[&str], text_columns: &[&str]) -> Result<usize, Error> {
    let path = path.as_ref();
    let bad = |msg: String| Error::Experiment(format!("{}: {msg}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let found: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    if found != header {
        return Err(bad(format!("header {found:?}, expected {header:?}")));
    }
    let numeric: Vec<bool> = header.iter().map(|h| !text_columns.contains(h)).collect();
    let mut count = 0;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        for (col, field) in rec.iter().enumerate() {
            if numeric[col] && field.parse::<f64>().is_err() {
                return Err(bad(format!("row {}, column {}: not a number: {field:?}", row + 1, header[col])));
            }
        }
        count += 1;
    }
    Ok(count)
}

pub const SUMMARY_TEXT: &[&str] = &["statistic"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_round_trips_through_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let rows = vec![
            SummaryRow::from_values(0.5, "moran", &[1.0, 3.0]),
            SummaryRow::from_values(1.0, "geary", &[]),
        ];
        write_summary(&path, "radius", &rows).unwrap();
        let header = ["radius", "statistic", "mean", "std", "count"];
        assert_eq!(validate_csv(&path, &header, SUMMARY_TEXT).unwrap(), 2);
        assert!(validate_csv(&path, &["r", "statistic", "mean", "std", "count"], SUMMARY_TEXT).is_err());
        std::fs::write(&path, "radius,statistic,mean,std,count\nx,moran,1,1,1\n").unwrap();
        assert!(validate_csv(&path, &header, SUMMARY_TEXT).is_err());
    }

    #[test]
    fn summary_statistics() {
        let r = SummaryRow::from_values(2.0, "sa", &[1.0, 2.0, 3.0]);
        assert_eq!((r.mean, r.std, r.count), (2.0, 1.0, 3));
    }
}
