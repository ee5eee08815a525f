use std::path::Path;

use rayon::prelude::*;

use super::{fmt_num, write_summary, write_table, SummaryRow};
use crate::baselines::{geary_c, moran_i, WeightScheme};
use crate::error::Error;
use crate::linkage::{build_order, LinkageOptions};
use crate::model::Method;
use crate::sa::compute_sa;
use crate::synth::{disk_average, gen_iid, replicate_seed, VALUE};

#[derive(Debug, Clone, PartialEq)]
pub struct DiskConfig {
    pub n: usize,
    pub radii: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub linkage: LinkageOptions,
}

/// Raw statistics, in column order of [`RAW`].
const RAW: [&str; 4] = ["sa_single", "sa_median", "moran", "geary"];

#[derive(Debug, Clone, PartialEq)]
pub struct DiskReport {
    /// Per radius: raw statistics, then Moran and Geary rescaled onto the
    /// range of the single-linkage S_A curve (Geary flipped).
    pub rows: Vec<SummaryRow>,
    /// Radius at which each statistic's mean curve first covers half of
    /// its range over the sweep.
    pub half_range: Vec<(String, Option<f64>)>,
    /// `(replicate, radius)` cells dropped for zero variance.
    pub dropped: usize,
}

impl DiskReport {
    pub fn half_range_of(&self, statistic: &str) -> Option<f64> {
        self.half_range.iter().find(|(s, _)| s == statistic).and_then(|(_, r)| *r)
    }

    pub fn curve(&self, statistic: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.statistic == statistic).map(|r| r.mean).collect()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        write_summary(path.as_ref(), "radius", &self.rows)
    }

    pub fn write_half_range_csv(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        let rows = self.half_range.iter().map(|(s, r)| vec![s.clone(), r.map_or("NaN".into(), fmt_num)]);
        write_table(path.as_ref(), &["statistic", "half_range_radius"], rows)
    }
}

/// `count` points spaced evenly in `log10` from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count).map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64)).collect()
}

/// First radius at which `curve`, min-max normalised over the sweep
/// (flipped when `decreasing`), reaches 0.5; linear in radius between
/// neighbouring grid points. `None` for a flat curve.
pub fn half_range_radius(radii: &[f64], curve: &[f64], decreasing: bool) -> Option<f64> {
    let finite = curve.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo > 0.0) {
        return None;
    }
    let norm = |v: f64| if decreasing { (hi - v) / (hi - lo) } else { (v - lo) / (hi - lo) };
    let mut prev: Option<(f64, f64)> = None;
    for (&r, &v) in radii.iter().zip(curve) {
        if !v.is_finite() {
            continue;
        }
        let y = norm(v);
        if y >= 0.5 {
            return Some(match prev {
                Some((r0, y0)) => r0 + (0.5 - y0) / (y - y0) * (r - r0),
                None => r,
            });
        }
        prev = Some((r, y));
    }
    None
}

/// Values at one radius for one replicate, `None` when zero variance.
type Cell = Option<[f64; 4]>;

fn replicate(cfg: &DiskConfig, rep: usize) -> Result<Vec<Cell>, Error> {
    let data = gen_iid(cfg.n, replicate_seed(cfg.seed, rep))?;
    let points = data.points();
    let z = data.require_feature(VALUE)?;
    // coordinates do not change with the radius, so the orders are shared
    let single = build_order(points, Method::Single, &cfg.linkage)?;
    let median = build_order(points, Method::Median, &cfg.linkage)?;
    let mut out = Vec::with_capacity(cfg.radii.len());
    for &r in &cfg.radii {
        let zr = disk_average(points, z, r)?;
        let v = zr.values();
        let sa_single = match compute_sa(&single, v, false) {
            Ok(s) => s.value,
            Err(crate::error::SaError::ZeroVariance) => {
                out.push(None);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let sa_median = compute_sa(&median, v, false)?.value;
        let moran = moran_i(points, v, WeightScheme::InverseDistance)?.value;
        let geary = geary_c(points, v, WeightScheme::InverseDistance)?.value;
        out.push(Some([sa_single, sa_median, moran, geary]));
    }
    Ok(out)
}

/// Disk-averaging sweep: for each replicate, i.i.d. data are smoothed at
/// every radius and scored by S_A (single and median orders), Moran's I and
/// Geary's C.
pub fn experiment_disk(cfg: &DiskConfig) -> Result<DiskReport, Error> {
    if cfg.reps == 0 || cfg.radii.is_empty() {
        return Err(Error::Experiment("disk sweep needs at least one replicate and one radius".into()));
    }
    let per_rep: Vec<Vec<Cell>> =
        (0..cfg.reps).into_par_iter().map(|rep| replicate(cfg, rep)).collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    let mut dropped = 0;
    let mut means: [Vec<f64>; 4] = Default::default();
    for (k, &r) in cfg.radii.iter().enumerate() {
        let cells: Vec<[f64; 4]> = per_rep.iter().filter_map(|rep| rep[k]).collect();
        dropped += cfg.reps - cells.len();
        for (s, name) in RAW.iter().enumerate() {
            let vals: Vec<f64> = cells.iter().map(|c| c[s]).collect();
            let row = SummaryRow::from_values(r, name, &vals);
            means[s].push(row.mean);
            rows.push(row);
        }
    }

    // rescale Moran and Geary onto the S_A range, Geary flipped
    let range = |c: &[f64]| {
        let f = c.iter().copied().filter(|v| v.is_finite());
        (f.clone().fold(f64::INFINITY, f64::min), f.fold(f64::NEG_INFINITY, f64::max))
    };
    let (sa_lo, sa_hi) = range(&means[0]);
    for (s, name, flip) in [(2, "moran_rescaled", false), (3, "geary_rescaled", true)] {
        let (lo, hi) = range(&means[s]);
        for (k, &r) in cfg.radii.iter().enumerate() {
            let t = (means[s][k] - lo) / (hi - lo);
            let t = if flip { 1.0 - t } else { t };
            rows.push(SummaryRow {
                x: r,
                statistic: name.to_string(),
                mean: sa_lo + t * (sa_hi - sa_lo),
                std: f64::NAN,
                count: rows[k * RAW.len() + s].count,
            });
        }
    }
    rows.sort_by(|a, b| a.x.total_cmp(&b.x).then_with(|| a.statistic.cmp(&b.statistic)));

    let half_range = RAW
        .iter()
        .enumerate()
        .map(|(s, name)| (name.to_string(), half_range_radius(&cfg.radii, &means[s], *name == "geary")))
        .collect();
    Ok(DiskReport { rows, half_range, dropped })
}
