//! On-disk formats: dataset CSV and the `SAORDER v1` merge-order file.
//!
//! Dataset CSV: mandatory header, the first `dims` columns are coordinates,
//! every further column is a feature. Row and column numbers in error
//! messages are 1-based and count data rows only (the header is row 0).
//!
//! Merge-order file:
//!
//! ```text
//! SAORDER v1 n=<n> method=<tag>
//! <left> <right>
//! ...
//! ```
//!
//! with exactly `n - 1` event lines, ASCII decimal, LF endings.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::ModelError;
use crate::model::{Dataset, FeatureVector, MergeEvent, MergeOrder, Method, PointSet};

fn io_err(path: &Path, source: std::io::Error) -> ModelError {
    ModelError::Io { path: path.to_path_buf(), source }
}

pub fn read_dataset(path: impl AsRef<Path>, dims: usize) -> Result<Dataset, ModelError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    parse_dataset(file, dims).map_err(|e| match e {
        ModelError::Csv { msg, .. } => ModelError::Csv { path: path.to_path_buf(), msg },
        other => other,
    })
}

/// Parses dataset CSV from any reader.
pub fn parse_dataset(reader: impl Read, dims: usize) -> Result<Dataset, ModelError> {
    if dims != 2 && dims != 3 {
        return Err(ModelError::BadDims(dims));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| ModelError::Csv { path: Default::default(), msg: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.len() < dims {
        return Err(ModelError::MalformedRow {
            row: 0,
            msg: format!("header has {} columns, need at least {dims} coordinates", header.len()),
        });
    }
    for (i, name) in header.iter().enumerate() {
        if header[..i].contains(name) {
            return Err(ModelError::DuplicateColumn(name.clone()));
        }
    }

    let ncols = header.len();
    let mut coords = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); ncols - dims];
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| ModelError::MalformedRow { row, msg: e.to_string() })?;
        if rec.len() != ncols {
            return Err(ModelError::MalformedRow {
                row,
                msg: format!("expected {ncols} fields, found {}", rec.len()),
            });
        }
        for (c, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| ModelError::MalformedRow {
                row,
                msg: format!("column {} ('{}'): cannot parse '{cell}'", c + 1, header[c]),
            })?;
            if !v.is_finite() {
                return Err(ModelError::NonFiniteValue { row, col: c + 1 });
            }
            if c < dims {
                coords.push(v);
            } else {
                columns[c - dims].push(v);
            }
        }
    }

    let points = PointSet::new(dims, coords)?;
    let features = header[dims..]
        .iter()
        .zip(columns)
        .map(|(name, values)| FeatureVector::new(name.clone(), values))
        .collect::<Result<Vec<_>, _>>()?;
    Dataset::new(points, features)
}

/// Coordinate column names for the given dimension.
pub fn coordinate_names(dims: usize) -> &'static [&'static str] {
    if dims == 3 {
        &["x", "y", "z"]
    } else {
        &["x", "y"]
    }
}

pub fn write_dataset(data: &Dataset, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    format_dataset(data, &mut w).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

pub fn format_dataset(data: &Dataset, w: &mut impl Write) -> std::io::Result<()> {
    let dims = data.points().dims();
    let mut header: Vec<&str> = coordinate_names(dims).to_vec();
    header.extend(data.feature_names());
    writeln!(w, "{}", header.join(","))?;
    let features: Vec<&FeatureVector> = data.features().collect();
    for i in 0..data.len() {
        let mut first = true;
        for &c in data.points().point(i) {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            write!(w, "{c:?}")?;
        }
        for f in &features {
            write!(w, ",{:?}", f.values()[i])?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_merge_order(order: &MergeOrder, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    format_merge_order(order, &mut w).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

pub fn format_merge_order(order: &MergeOrder, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "SAORDER v1 n={} method={}", order.n(), order.method())?;
    for e in order.events() {
        writeln!(w, "{} {}", e.left, e.right)?;
    }
    Ok(())
}

/// Reads a merge order; when `expected_n` is given the header must match it.
pub fn read_merge_order(
    path: impl AsRef<Path>,
    expected_n: Option<usize>,
) -> Result<MergeOrder, ModelError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    parse_merge_order(BufReader::new(file), expected_n)
}

pub fn parse_merge_order(
    reader: impl BufRead,
    expected_n: Option<usize>,
) -> Result<MergeOrder, ModelError> {
    let mut lines = reader.split(b'\n');
    let header = match lines.next() {
        Some(line) => line.map_err(|e| ModelError::OrderHeader(e.to_string()))?,
        None => return Err(ModelError::OrderHeader("empty file".into())),
    };
    let header = String::from_utf8(header).map_err(|_| ModelError::OrderHeader("not ASCII".into()))?;
    let (n, method) = parse_header(&header)?;
    if let Some(expected) = expected_n {
        if expected != n {
            return Err(ModelError::NMismatch { expected, found: n });
        }
    }

    let mut events = Vec::with_capacity(n.saturating_sub(1));
    for (k, line) in lines.enumerate() {
        let line = line.map_err(|e| ModelError::OrderHeader(e.to_string()))?;
        let row = k + 1;
        let bad = |msg: &str| ModelError::MalformedRow { row, msg: msg.to_string() };
        let text = std::str::from_utf8(&line).map_err(|_| bad("not ASCII"))?;
        if text.is_empty() {
            // only a trailing newline may produce an empty final chunk
            continue;
        }
        let mut it = text.split(' ');
        let left = it.next().and_then(|s| s.parse::<usize>().ok()).ok_or_else(|| bad("bad left id"))?;
        let right = it.next().and_then(|s| s.parse::<usize>().ok()).ok_or_else(|| bad("bad right id"))?;
        if it.next().is_some() {
            return Err(bad("trailing fields"));
        }
        events.push(MergeEvent::new(left, right));
    }
    MergeOrder::new(n, events, method)
}

fn parse_header(header: &str) -> Result<(usize, Method), ModelError> {
    let bad = || ModelError::OrderHeader(header.to_string());
    let mut parts = header.split(' ');
    if parts.next() != Some("SAORDER") || parts.next() != Some("v1") {
        return Err(bad());
    }
    let n = parts
        .next()
        .and_then(|p| p.strip_prefix("n="))
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(bad)?;
    let method = parts
        .next()
        .and_then(|p| p.strip_prefix("method="))
        .ok_or_else(bad)?
        .parse::<Method>()?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((n, method))
}
