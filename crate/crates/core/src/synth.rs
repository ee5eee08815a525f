//! Seeded synthetic data: i.i.d. normal values on uniform coordinates,
//! disk averaging, grid sampling and row subsampling.
//!
//! All generators use ChaCha8 seeded from a `u64`, so output is identical
//! across platforms and runs. Replicate `r` of an experiment uses
//! `seed + r`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::SynthError;
use crate::model::{Dataset, FeatureVector, PointSet};

/// Name of the single feature written by the generators.
pub const VALUE: &str = "value";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for replicate `r` of a run seeded with `seed`.
pub fn replicate_seed(seed: u64, r: usize) -> u64 {
    seed.wrapping_add(r as u64)
}

/// What to generate.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    /// Uniform points on the unit square with standard-normal values.
    IidNormal { n: usize, seed: u64 },
    /// Uniform points on the unit cube side `[0,1]^dims`, no features.
    UniformCoords { n: usize, dims: usize, seed: u64 },
    /// `IidNormal` followed by disk averaging at radius `r`.
    DiskAverage { n: usize, r: f64, seed: u64 },
    /// Random cell values on a `k x k` grid sampled at `n` points.
    GridSample { k: usize, n: usize, seed: u64 },
}

impl GenSpec {
    pub fn generate(&self) -> Result<Dataset, SynthError> {
        match *self {
            GenSpec::IidNormal { n, seed } => gen_iid(n, seed),
            GenSpec::UniformCoords { n, dims, seed } => {
                Ok(Dataset::new(uniform_coords(n, dims, seed)?, Vec::new())?)
            }
            GenSpec::DiskAverage { n, r, seed } => {
                let base = gen_iid(n, seed)?;
                let z = base.require_feature(VALUE)?;
                let smoothed = disk_average(base.points(), z, r)?;
                Ok(Dataset::new(base.points().clone(), vec![smoothed])?)
            }
            GenSpec::GridSample { k, n, seed } => grid_sample(k, n, seed),
        }
    }
}

fn check_n(n: usize) -> Result<(), SynthError> {
    if n < 2 {
        return Err(SynthError::Invalid(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

pub fn uniform_coords(n: usize, dims: usize, seed: u64) -> Result<PointSet, SynthError> {
    check_n(n)?;
    let mut rng = rng(seed);
    let coords = (0..n * dims).map(|_| rng.gen::<f64>()).collect();
    Ok(PointSet::new(dims, coords)?)
}

/// `n` uniform points on `[0,1)²` carrying one standard-normal feature.
pub fn gen_iid(n: usize, seed: u64) -> Result<Dataset, SynthError> {
    check_n(n)?;
    let mut rng = rng(seed);
    let mut coords = Vec::with_capacity(2 * n);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        coords.push(rng.gen::<f64>());
        coords.push(rng.gen::<f64>());
        values.push(rng.sample::<f64, _>(StandardNormal));
    }
    let points = PointSet::new(2, coords)?;
    Ok(Dataset::new(points, vec![FeatureVector::new(VALUE, values)?])?)
}

/// Replaces every value by the mean of the input values strictly within
/// distance `r` (itself included). All outputs read the original values.
/// `r = 0` returns the input unchanged.
pub fn disk_average(points: &PointSet, z: &FeatureVector, r: f64) -> Result<FeatureVector, SynthError> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(SynthError::Invalid(format!("radius must be finite and >= 0, got {r}")));
    }
    let n = points.len();
    if z.len() != n {
        return Err(SynthError::Invalid(format!("feature has {} values for {n} points", z.len())));
    }
    if r == 0.0 {
        return Ok(z.clone());
    }
    let r2 = r * r;
    let values = z.values();

    // sweep over points sorted by x; only |dx| < r can qualify
    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by(|&a, &b| points.point(a)[0].total_cmp(&points.point(b)[0]).then(a.cmp(&b)));
    let xs: Vec<f64> = by_x.iter().map(|&i| points.point(i)[0]).collect();

    let mut out = vec![0.0; n];
    for (rank, &i) in by_x.iter().enumerate() {
        let xi = xs[rank];
        let lo = xs.partition_point(|&x| x <= xi - r);
        let hi = xs.partition_point(|&x| x < xi + r);
        // members accumulated in index order for a reproducible sum
        let mut members: Vec<usize> =
            by_x[lo..hi].iter().copied().filter(|&j| points.dist2(i, j) < r2).collect();
        members.sort_unstable();
        let sum: f64 = members.iter().map(|&j| values[j]).sum();
        out[i] = sum / members.len() as f64;
    }
    Ok(FeatureVector::new(z.name(), out)?)
}

/// Cell values uniform on `[0,1)` for a `k x k` grid, sampled at `n`
/// uniform coordinates in `[0,k)²`. A coordinate maps to cell
/// `ceil(c)` per axis (1-based), with 0 mapped to cell 1.
pub fn grid_sample(k: usize, n: usize, seed: u64) -> Result<Dataset, SynthError> {
    check_n(n)?;
    if k == 0 {
        return Err(SynthError::Invalid("grid size k must be at least 1".into()));
    }
    let mut rng = rng(seed);
    let cells: Vec<f64> = (0..k * k).map(|_| rng.gen::<f64>()).collect();
    let kf = k as f64;
    let mut coords = Vec::with_capacity(2 * n);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.gen::<f64>() * kf;
        let y = rng.gen::<f64>() * kf;
        let (cx, cy) = (grid_cell(x, k), grid_cell(y, k));
        coords.push(x);
        coords.push(y);
        values.push(cells[(cx - 1) * k + (cy - 1)]);
    }
    let points = PointSet::new(2, coords)?;
    Ok(Dataset::new(points, vec![FeatureVector::new(VALUE, values)?])?)
}

/// 1-based cell index of a coordinate in `[0, k]`.
pub fn grid_cell(c: f64, k: usize) -> usize {
    (c.ceil() as usize).clamp(1, k)
}

/// Uniform subsample of `m` rows without replacement, kept in row order.
pub fn subsample(data: &Dataset, m: usize, seed: u64) -> Result<Dataset, SynthError> {
    let n = data.len();
    if m < 2 || m > n {
        return Err(SynthError::Invalid(format!("subsample size {m} outside [2, {n}]")));
    }
    let mut rng = rng(seed);
    let mut rows = index::sample(&mut rng, n, m).into_vec();
    rows.sort_unstable();
    Ok(data.select(&rows)?)
}
