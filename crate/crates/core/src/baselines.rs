//! Moran's I and Geary's C with inverse-distance weights.
//!
//! Both are evaluated by streaming over point pairs, O(n²) time and O(n)
//! memory; the weight matrix is never stored. Rows are reduced in a fixed
//! order, so results do not depend on the thread count.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::BaselineError;
use crate::model::{MergeOrder, PointSet};
use crate::sa::compute_sa;

/// Spatial weights. Only inverse distance is supported: `w_ij = 1/d_ij`,
/// `w_ii = 0`, symmetric, no row standardisation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum WeightScheme {
    #[default]
    InverseDistance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalStat {
    pub value: f64,
    pub n: usize,
    /// `W`, the sum of all weights over ordered pairs.
    pub weight_total: f64,
}

/// Per-row partial sums over `j > i`.
#[derive(Default, Clone, Copy)]
struct RowSums {
    w: f64,
    cross: f64,
    min_d2: f64,
}

fn centered(z: &[f64]) -> Result<(Vec<f64>, f64), BaselineError> {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let dev: Vec<f64> = z.iter().map(|v| v - mean).collect();
    let ss: f64 = dev.iter().map(|d| d * d).sum();
    if ss <= 0.0 {
        return Err(BaselineError::ZeroVariance);
    }
    Ok((dev, ss))
}

/// Splits coordinates into per-axis columns; the third is zero in 2-D.
fn columns(points: &PointSet) -> [Vec<f64>; 3] {
    let n = points.len();
    let mut cols = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        for (a, &c) in points.point(i).iter().enumerate() {
            cols[a][i] = c;
        }
    }
    cols
}

/// Streams the upper triangle. For row `i`, `pair` receives the weights
/// `w_ij` for `j > i` and returns the row's share of the numerator.
fn stream_pairs<F>(points: &PointSet, pair: F) -> Result<(f64, f64), BaselineError>
where
    F: Fn(usize, &[f64]) -> f64 + Sync,
{
    let n = points.len();
    let [xs, ys, zs] = columns(points);
    let rows: Vec<RowSums> = (0..n)
        .into_par_iter()
        .with_min_len(64)
        .map_init(Vec::new, |w, i| {
            let (xi, yi, zi) = (xs[i], ys[i], zs[i]);
            let tail = i + 1..n;
            w.clear();
            let mut min_d2 = f64::INFINITY;
            for ((&x, &y), &z) in xs[tail.clone()].iter().zip(&ys[tail.clone()]).zip(&zs[tail]) {
                let (dx, dy, dz) = (x - xi, y - yi, z - zi);
                let d2 = dx * dx + dy * dy + dz * dz;
                min_d2 = min_d2.min(d2);
                w.push(1.0 / d2.sqrt());
            }
            let wsum = lane_sum(w);
            let cross = pair(i, w);
            RowSums { w: wsum, cross, min_d2 }
        })
        .collect();

    let mut w_total = 0.0;
    let mut acc = 0.0;
    for (i, r) in rows.iter().enumerate() {
        if r.min_d2 == 0.0 {
            let j = (i + 1..n).find(|&j| points.dist2(i, j) == 0.0).unwrap_or(i);
            return Err(BaselineError::CoincidentPoints(i, j));
        }
        w_total += r.w;
        acc += r.cross;
    }
    // ordered pairs count each unordered pair twice
    Ok((2.0 * w_total, 2.0 * acc))
}

/// Four-lane sum; fixed association order.
#[inline]
fn lane_sum(v: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = v.chunks_exact(4);
    let rem = chunks.remainder();
    for c in chunks {
        acc[0] += c[0];
        acc[1] += c[1];
        acc[2] += c[2];
        acc[3] += c[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for &x in rem {
        s += x;
    }
    s
}

#[inline]
fn lane_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

fn check_len(points: &PointSet, z: &[f64]) -> Result<(), BaselineError> {
    if z.len() != points.len() {
        return Err(BaselineError::LengthMismatch { expected: points.len(), found: z.len() });
    }
    Ok(())
}

/// `I = (N/W) Σ_ij w_ij (z_i - z̄)(z_j - z̄) / Σ_i (z_i - z̄)²`.
pub fn moran_i(points: &PointSet, z: &[f64], _w: WeightScheme) -> Result<GlobalStat, BaselineError> {
    check_len(points, z)?;
    let (dev, ss) = centered(z)?;
    let n = points.len();
    let (w_total, cross) = stream_pairs(points, |i, w| dev[i] * lane_dot(w, &dev[i + 1..]))?;
    let value = (n as f64 / w_total) * cross / ss;
    Ok(GlobalStat { value, n, weight_total: w_total })
}

/// `C = ((N-1)/2W) Σ_ij w_ij (z_i - z_j)² / Σ_i (z_i - z̄)²`.
pub fn geary_c(points: &PointSet, z: &[f64], _w: WeightScheme) -> Result<GlobalStat, BaselineError> {
    check_len(points, z)?;
    let (_, ss) = centered(z)?;
    let n = points.len();
    let (w_total, sq) = stream_pairs(points, |i, w| {
        let zi = z[i];
        let mut acc = [0.0; 4];
        let tail = &z[i + 1..];
        let cw = w.chunks_exact(4);
        let cz = tail.chunks_exact(4);
        let (rw, rz) = (cw.remainder(), cz.remainder());
        for (a, b) in cw.zip(cz) {
            for k in 0..4 {
                let d = zi - b[k];
                acc[k] += a[k] * d * d;
            }
        }
        let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
        for (a, b) in rw.iter().zip(rz) {
            let d = zi - b;
            s += a * d * d;
        }
        s
    })?;
    let value = ((n - 1) as f64 / (2.0 * w_total)) * sq / ss;
    Ok(GlobalStat { value, n, weight_total: w_total })
}

/// Statistic evaluated under random relabelling of the values.
#[derive(Debug, Clone, Copy)]
pub enum NullStatistic<'a> {
    Moran(&'a PointSet),
    Geary(&'a PointSet),
    Sa(&'a MergeOrder),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullSummary {
    pub mean: f64,
    /// Sample standard deviation (`reps - 1` denominator; 0 for one rep).
    pub std: f64,
    pub reps: usize,
}

impl NullSummary {
    pub fn std_error(&self) -> f64 {
        self.std / (self.reps as f64).sqrt()
    }
}

/// Shuffles `z` `reps` times with a generator seeded by `seed` and
/// summarises the statistic over the shuffles.
pub fn permutation_null(
    stat: NullStatistic<'_>,
    z: &[f64],
    reps: usize,
    seed: u64,
) -> Result<NullSummary, BaselineError> {
    if reps == 0 {
        return Err(BaselineError::NoReplicates);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = z.to_vec();
    let mut values = Vec::with_capacity(reps);
    for _ in 0..reps {
        buf.shuffle(&mut rng);
        let v = match stat {
            NullStatistic::Moran(p) => moran_i(p, &buf, WeightScheme::InverseDistance)?.value,
            NullStatistic::Geary(p) => geary_c(p, &buf, WeightScheme::InverseDistance)?.value,
            NullStatistic::Sa(o) => compute_sa(o, &buf, false)?.value,
        };
        values.push(v);
    }
    let (mean, std) = mean_std(&values);
    Ok(NullSummary { mean, std, reps })
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> PointSet {
        PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap()
    }

    #[test]
    fn three_point_hand_values() {
        let p = line3();
        let z = [1.0, 2.0, 3.0];
        let i = moran_i(&p, &z, WeightScheme::InverseDistance).unwrap();
        assert_eq!(i.weight_total, 5.0);
        assert!((i.value + 0.3).abs() < 1e-12);
        let c = geary_c(&p, &z, WeightScheme::InverseDistance).unwrap();
        assert!((c.value - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_and_coincident() {
        let p = line3();
        assert_eq!(moran_i(&p, &[2.0; 3], WeightScheme::InverseDistance), Err(BaselineError::ZeroVariance));
        assert_eq!(geary_c(&p, &[2.0; 3], WeightScheme::InverseDistance), Err(BaselineError::ZeroVariance));
        let dup = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert_eq!(
            moran_i(&dup, &[1.0, 2.0, 3.0], WeightScheme::InverseDistance),
            Err(BaselineError::CoincidentPoints(0, 2))
        );
    }

    #[test]
    fn similar_neighbours_give_small_geary() {
        // two tight clusters of equal values far apart
        let p = PointSet::from_rows(&[
            [0.0, 0.0],
            [0.1, 0.0],
            [0.0, 0.1],
            [50.0, 50.0],
            [50.1, 50.0],
            [50.0, 50.1],
        ])
        .unwrap();
        let z = [1.0, 1.0, 1.0, 9.0, 9.0, 9.0];
        let c = geary_c(&p, &z, WeightScheme::InverseDistance).unwrap();
        assert!(c.value < 0.1, "{}", c.value);
        let alt = [1.0, 9.0, 1.0, 9.0, 1.0, 9.0];
        let c_alt = geary_c(&p, &alt, WeightScheme::InverseDistance).unwrap();
        assert!(c_alt.value > 1.0, "{}", c_alt.value);
    }

    #[test]
    fn permutation_null_is_seeded() {
        let p = line3();
        let z = [1.0, 2.0, 4.0];
        let a = permutation_null(NullStatistic::Moran(&p), &z, 5, 7).unwrap();
        let b = permutation_null(NullStatistic::Moran(&p), &z, 5, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(permutation_null(NullStatistic::Geary(&p), &z, 0, 7), Err(BaselineError::NoReplicates));
    }
}
