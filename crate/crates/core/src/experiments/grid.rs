use std::path::Path;

use rayon::prelude::*;

use super::{fmt_num, write_table, SummaryRow};
use crate::baselines::{geary_c, moran_i, WeightScheme};
use crate::error::{Error, FitError, SaError};
use crate::fitting::{fit_log_sigmoid, SigmoidFit};
use crate::linkage::{build_order, LinkageOptions};
use crate::model::Method;
use crate::sa::compute_sa;
use crate::synth::{grid_sample, replicate_seed, VALUE};

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub ks: Vec<usize>,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    /// Moran and Geary are computed only for `n` up to this size.
    pub baseline_max_n: usize,
    /// When set, sizes use `clamp(point_budget / n, 1, reps)` replicates,
    /// so large `n` run fewer times.
    pub point_budget: Option<usize>,
    pub linkage: LinkageOptions,
}

impl GridConfig {
    pub fn reps_at(&self, n: usize) -> usize {
        match self.point_budget {
            Some(b) => (b / n).clamp(1, self.reps.max(1)),
            None => self.reps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFit {
    pub k: usize,
    pub fit: Result<SigmoidFit, FitError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    /// One row per `(k, n, statistic)`; `x` holds `n`.
    pub rows: Vec<(usize, SummaryRow)>,
    pub fits: Vec<GridFit>,
    pub dropped: usize,
}

impl GridReport {
    pub fn fit_for(&self, k: usize) -> Option<&Result<SigmoidFit, FitError>> {
        self.fits.iter().find(|f| f.k == k).map(|f| &f.fit)
    }

    pub fn mean(&self, k: usize, n: usize, statistic: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|(kk, r)| *kk == k && r.x == n as f64 && r.statistic == statistic)
            .map(|(_, r)| r.mean)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        let rows = self.rows.iter().map(|(k, r)| {
            vec![k.to_string(), fmt_num(r.x), r.statistic.clone(), fmt_num(r.mean), fmt_num(r.std), r.count.to_string()]
        });
        write_table(path.as_ref(), &["k", "n", "statistic", "mean", "std", "count"], rows)
    }

    /// One row per `k`: fitted parameters, or NaN and the error text.
    pub fn write_fits_csv(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        let rows = self.fits.iter().map(|f| match &f.fit {
            Ok(p) => vec![
                f.k.to_string(),
                fmt_num(p.s_max),
                fmt_num(p.a),
                fmt_num(p.b),
                fmt_num(p.rss),
                fmt_num(p.ci_s_max.0),
                fmt_num(p.ci_s_max.1),
                String::new(),
            ],
            Err(e) => {
                let mut v = vec![f.k.to_string()];
                v.extend(std::iter::repeat("NaN".to_string()).take(6));
                v.push(e.to_string().replace(',', ";"));
                v
            }
        });
        write_table(path.as_ref(), &FIT_HEADER, rows)
    }
}

pub const FIT_HEADER: [&str; 8] = ["k", "s_max", "a", "b", "rss", "ci_lo", "ci_hi", "error"];

struct Draw {
    sa: f64,
    baselines: Option<(f64, f64)>,
}

fn draw(cfg: &GridConfig, k: usize, n: usize, rep: usize) -> Result<Option<Draw>, Error> {
    let data = grid_sample(k, n, replicate_seed(cfg.seed, rep))?;
    let z = data.require_feature(VALUE)?.values();
    let order = build_order(data.points(), Method::Single, &cfg.linkage)?;
    let sa = match compute_sa(&order, z, false) {
        Ok(r) => r.value,
        Err(SaError::ZeroVariance) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let baselines = if n <= cfg.baseline_max_n {
        let m = moran_i(data.points(), z, WeightScheme::InverseDistance)?.value;
        let g = geary_c(data.points(), z, WeightScheme::InverseDistance)?.value;
        Some((m, g))
    } else {
        None
    };
    Ok(Some(Draw { sa, baselines }))
}

/// Grid-convergence sweep: single-linkage S_A (and, for small enough `n`,
/// Moran and Geary) on grid samples of increasing size, then a log-sigmoid
/// fit of mean S_A against `n` for every `k`.
pub fn experiment_grid(cfg: &GridConfig) -> Result<GridReport, Error> {
    if cfg.reps == 0 || cfg.ns.is_empty() || cfg.ks.is_empty() {
        return Err(Error::Experiment("grid sweep needs ks, ns and at least one replicate".into()));
    }
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut dropped = 0;
    for &k in &cfg.ks {
        let mut samples = Vec::new();
        for &n in &cfg.ns {
            let reps = cfg.reps_at(n);
            let draws: Vec<Option<Draw>> =
                (0..reps).into_par_iter().map(|rep| draw(cfg, k, n, rep)).collect::<Result<_, _>>()?;
            let draws: Vec<Draw> = draws.into_iter().flatten().collect();
            dropped += reps - draws.len();
            let sa: Vec<f64> = draws.iter().map(|d| d.sa).collect();
            let row = SummaryRow::from_values(n as f64, "sa_single", &sa);
            if row.count > 0 {
                samples.push((n as f64, row.mean));
            }
            rows.push((k, row));
            if n <= cfg.baseline_max_n {
                let m: Vec<f64> = draws.iter().filter_map(|d| d.baselines.map(|b| b.0)).collect();
                let g: Vec<f64> = draws.iter().filter_map(|d| d.baselines.map(|b| b.1)).collect();
                rows.push((k, SummaryRow::from_values(n as f64, "moran", &m)));
                rows.push((k, SummaryRow::from_values(n as f64, "geary", &g)));
            }
        }
        fits.push(GridFit { k, fit: fit_log_sigmoid(&samples) });
    }
    Ok(GridReport { rows, fits, dropped })
}
