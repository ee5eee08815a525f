//! Streaming S_A over a fixed merge order.
//!
//! Replaying the order keeps, per live cluster, its size and mean. Each
//! merge raises the within-cluster sum of squares `SS(t)` by
//! `|C1|(m12 - m1)² + |C2|(m12 - m2)²`, so the whole trajectory costs O(1)
//! per merge. The statistic is
//!
//! ```text
//! S_A = 2 * (1 - sum_t SS(t) / ((n - 1) * SS(n - 1))) - 1
//! ```
//!
//! which lies in `[-1, 1 - 2/(n-1)]` and has expectation `-1/(n-1)` for
//! i.i.d. normal values, whatever the order.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, SaError};
use crate::model::{FeatureVector, MergeOrder, PointSet};

/// Running state of one cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterStat {
    pub size: usize,
    pub mean: f64,
    /// Size-weighted coordinate centroid; unused axes are zero.
    pub centroid: [f64; 3],
}

impl ClusterStat {
    pub fn singleton(z: f64, point: &[f64]) -> Self {
        let mut centroid = [0.0; 3];
        centroid[..point.len()].copy_from_slice(point);
        Self { size: 1, mean: z, centroid }
    }
}

/// Size and mean of the union, plus the rise in sum of squares.
///
/// `|C1|(m12 - m1)² + |C2|(m12 - m2)²` equals
/// `|C1||C2|/(|C1|+|C2|) * (m1 - m2)²`; the product form is used because it
/// never cancels.
#[inline]
fn merge_moments(na: f64, ma: f64, nb: f64, mb: f64) -> (f64, f64) {
    let n = na + nb;
    let diff = mb - ma;
    let mean = ma + diff * (nb / n);
    let delta = (na * nb / n) * diff * diff;
    (mean, delta)
}

/// Merges two cluster states; returns the union and `delta_ss >= 0`.
pub fn merge_update(a: &ClusterStat, b: &ClusterStat) -> (ClusterStat, f64) {
    let (na, nb) = (a.size as f64, b.size as f64);
    let (mean, delta) = merge_moments(na, a.mean, nb, b.mean);
    let size = a.size + b.size;
    let mut centroid = [0.0; 3];
    for k in 0..3 {
        centroid[k] = (na * a.centroid[k] + nb * b.centroid[k]) / size as f64;
    }
    (ClusterStat { size, mean, centroid }, delta)
}

/// The `SS(t)` trajectory, `ss[t - 1] = SS(t)` for `t = 1..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaTrace {
    pub ss: Vec<f64>,
}

impl SaTrace {
    /// `SS(n-1)`, the total sum of squared deviations.
    pub fn total(&self) -> f64 {
        *self.ss.last().expect("trace has n-1 >= 1 entries")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaResult {
    pub value: f64,
    pub n: usize,
    pub trace: Option<SaTrace>,
}

/// Upper end of the attainable range, `1 - 2/(n-1)`.
pub fn upper_bound(n: usize) -> f64 {
    1.0 - 2.0 / (n - 1) as f64
}

pub fn compute_sa(order: &MergeOrder, z: &[f64], want_trace: bool) -> Result<SaResult, SaError> {
    let n = order.n();
    if z.len() != n {
        return Err(SaError::LengthMismatch { expected: n, found: z.len() });
    }
    let mut mean = z.to_vec();
    let mut trace = if want_trace { Vec::with_capacity(n - 1) } else { Vec::new() };

    let mut ss = 0.0f64;
    // Neumaier-compensated running sum of SS(t)
    let mut area = 0.0f64;
    let mut carry = 0.0f64;
    for step in order.replay() {
        let (ma, mb) = (mean[step.left], mean[step.right]);
        let diff = mb - ma;
        mean[step.left] = ma + diff * step.frac;
        ss += step.weight * diff * diff;
        let s = area + ss;
        carry += if area.abs() >= ss { (area - s) + ss } else { (ss - s) + area };
        area = s;
        if want_trace {
            trace.push(ss);
        }
    }
    let area = area + carry;
    if ss <= 0.0 {
        return Err(SaError::ZeroVariance);
    }
    let ratio = area / ((n - 1) as f64 * ss);
    let value = (2.0 * (1.0 - ratio) - 1.0).clamp(-1.0, upper_bound(n));
    Ok(SaResult { value, n, trace: want_trace.then_some(SaTrace { ss: trace }) })
}

/// Runs [`compute_sa`] for many features over one order.
///
/// Element `i` is bit-identical to `compute_sa(order, features[i], false)`;
/// failures are reported per feature.
pub fn compute_sa_multi(order: &MergeOrder, features: &[FeatureVector]) -> Vec<Result<SaResult, SaError>> {
    features
        .par_iter()
        .map(|f| compute_sa(order, f.values(), false))
        .collect()
}

/// Expected S_A for i.i.d. values: `-1/(n-1)`.
pub fn null_expectation(n: usize) -> Result<f64, SaError> {
    if n < 2 {
        return Err(SaError::TooFewPoints(n));
    }
    Ok(-1.0 / (n - 1) as f64)
}

/// Replays the order tracking full cluster state (including centroids) for
/// every cluster id `0..2n-1`.
pub fn cluster_stats(order: &MergeOrder, points: &PointSet, z: &[f64]) -> Result<Vec<ClusterStat>, SaError> {
    let n = order.n();
    if z.len() != n || points.len() != n {
        return Err(SaError::LengthMismatch { expected: n, found: z.len().min(points.len()) });
    }
    let mut stats: Vec<ClusterStat> = (0..n).map(|i| ClusterStat::singleton(z[i], points.point(i))).collect();
    for e in order.events() {
        let (merged, _) = merge_update(&stats[e.left], &stats[e.right]);
        stats.push(merged);
    }
    Ok(stats)
}

/// Writes `t,ss,ss_normalized` rows for `t = 1..n-1`.
pub fn format_trace(trace: &SaTrace, w: &mut impl Write) -> std::io::Result<()> {
    let total = trace.total();
    writeln!(w, "t,ss,ss_normalized")?;
    for (k, &s) in trace.ss.iter().enumerate() {
        writeln!(w, "{},{:?},{:?}", k + 1, s, s / total)?;
    }
    Ok(())
}

pub fn trace_export(result: &SaResult, path: impl AsRef<Path>) -> Result<(), Error> {
    let path = path.as_ref();
    let trace = result.trace.as_ref().ok_or(SaError::MissingTrace)?;
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    format_trace(trace, &mut w).map_err(io)?;
    w.flush().map_err(io)
}
