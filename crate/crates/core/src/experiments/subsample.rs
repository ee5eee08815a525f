use std::path::Path;

use rayon::prelude::*;

use super::{write_summary, SummaryRow};
use crate::baselines::{geary_c, moran_i, WeightScheme};
use crate::error::{BaselineError, Error, SaError};
use crate::linkage::{build_order, LinkageOptions};
use crate::model::{Dataset, Method};
use crate::sa::compute_sa;
use crate::synth::{replicate_seed, subsample};

#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleConfig {
    pub ms: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub feature: String,
    pub linkage: LinkageOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleReport {
    /// One row per `(m, statistic)`; `x` holds `m`.
    pub rows: Vec<SummaryRow>,
    /// Replicates dropped for zero variance or coincident points.
    pub dropped: usize,
}

impl SubsampleReport {
    pub fn curve(&self, statistic: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.statistic == statistic).map(|r| r.mean).collect()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        write_summary(path.as_ref(), "m", &self.rows)
    }
}

const STATS: [&str; 4] = ["sa_single", "sa_median", "moran", "geary"];

/// Statistics for one subsample; median-order S_A is NaN above the matrix
/// cap. `None` when the subsample cannot be scored.
fn score(data: &Dataset, cfg: &SubsampleConfig, m: usize, rep: usize) -> Result<Option<[f64; 4]>, Error> {
    let sub = subsample(data, m, replicate_seed(cfg.seed, rep))?;
    let points = sub.points();
    let z = sub.require_feature(&cfg.feature)?.values();
    let single = build_order(points, Method::Single, &cfg.linkage)?;
    let sa_single = match compute_sa(&single, z, false) {
        Ok(r) => r.value,
        Err(SaError::ZeroVariance) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let sa_median = if m <= cfg.linkage.matrix_cap {
        compute_sa(&build_order(points, Method::Median, &cfg.linkage)?, z, false)?.value
    } else {
        f64::NAN
    };
    let moran = match moran_i(points, z, WeightScheme::InverseDistance) {
        Ok(s) => s.value,
        Err(BaselineError::CoincidentPoints(..)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let geary = geary_c(points, z, WeightScheme::InverseDistance)?.value;
    Ok(Some([sa_single, sa_median, moran, geary]))
}

/// Repeated random subsampling of a dataset's rows, rebuilding the orders
/// for every subsample.
pub fn experiment_subsample(data: &Dataset, cfg: &SubsampleConfig) -> Result<SubsampleReport, Error> {
    if cfg.reps == 0 || cfg.ms.is_empty() {
        return Err(Error::Experiment("subsample sweep needs sizes and at least one replicate".into()));
    }
    data.require_feature(&cfg.feature)?;
    let mut rows = Vec::new();
    let mut dropped = 0;
    for &m in &cfg.ms {
        let scored: Vec<Option<[f64; 4]>> =
            (0..cfg.reps).into_par_iter().map(|rep| score(data, cfg, m, rep)).collect::<Result<_, _>>()?;
        let scored: Vec<[f64; 4]> = scored.into_iter().flatten().collect();
        dropped += cfg.reps - scored.len();
        for (s, name) in STATS.iter().enumerate() {
            let vals: Vec<f64> = scored.iter().map(|v| v[s]).filter(|v| !v.is_nan()).collect();
            rows.push(SummaryRow::from_values(m as f64, name, &vals));
        }
    }
    Ok(SubsampleReport { rows, dropped })
}
