//! Slow, direct reference implementations used as test oracles.
#![allow(dead_code)]

use fastsa::{MergeEvent, MergeOrder, Method, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, dims: usize) -> PointSet {
    PointSet::new(dims, (0..n * dims).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

/// Points on an integer lattice, so many distances tie.
pub fn lattice_points(rng: &mut ChaCha8Rng, n: usize, dims: usize) -> PointSet {
    PointSet::new(dims, (0..n * dims).map(|_| rng.gen_range(0..6) as f64).collect()).unwrap()
}

pub fn normal_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `SS(t)` for `t = 1..n-1`, recomputed from scratch after every merge by
/// two-pass sums over each cluster's members.
pub fn brute_ss(order: &MergeOrder, z: &[f64]) -> Vec<f64> {
    let n = order.n();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut live: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n - 1);
    for e in order.events() {
        let mut merged = members[e.left].clone();
        merged.extend_from_slice(&members[e.right]);
        members.push(merged);
        live.retain(|&c| c != e.left && c != e.right);
        live.push(members.len() - 1);
        let ss: f64 = live
            .iter()
            .map(|&c| {
                let m = &members[c];
                let mean = m.iter().map(|&i| z[i]).sum::<f64>() / m.len() as f64;
                m.iter().map(|&i| (z[i] - mean).powi(2)).sum::<f64>()
            })
            .sum();
        out.push(ss);
    }
    out
}

/// S_A evaluated directly from a sum-of-squares trajectory.
pub fn sa_from_trace(ss: &[f64]) -> f64 {
    let n = ss.len() + 1;
    let total = *ss.last().unwrap();
    2.0 * (1.0 - ss.iter().sum::<f64>() / ((n - 1) as f64 * total)) - 1.0
}

fn weight(p: &PointSet, i: usize, j: usize) -> f64 {
    1.0 / p.dist2(i, j).sqrt()
}

pub fn naive_moran(p: &PointSet, z: &[f64]) -> f64 {
    let n = z.len();
    let mean = z.iter().sum::<f64>() / n as f64;
    let (mut w, mut num, mut den) = (0.0, 0.0, 0.0);
    for i in 0..n {
        den += (z[i] - mean).powi(2);
        for j in 0..n {
            if i != j {
                let wij = weight(p, i, j);
                w += wij;
                num += wij * (z[i] - mean) * (z[j] - mean);
            }
        }
    }
    n as f64 / w * num / den
}

pub fn naive_geary(p: &PointSet, z: &[f64]) -> f64 {
    let n = z.len();
    let mean = z.iter().sum::<f64>() / n as f64;
    let (mut w, mut num, mut den) = (0.0, 0.0, 0.0);
    for i in 0..n {
        den += (z[i] - mean).powi(2);
        for j in 0..n {
            if i != j {
                let wij = weight(p, i, j);
                w += wij;
                num += wij * (z[i] - z[j]).powi(2);
            }
        }
    }
    (n - 1) as f64 / (2.0 * w) * num / den
}

/// Greedy agglomeration recomputing every cluster distance from member
/// lists at every step: O(n³) or worse. Median linkage tracks the
/// unweighted centroid recursion explicitly.
pub fn naive_linkage(p: &PointSet, method: Method) -> MergeOrder {
    let n = p.len();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut cent: Vec<Vec<f64>> = (0..n).map(|i| p.point(i).to_vec()).collect();
    let mut live: Vec<usize> = (0..n).collect();
    let mut events = Vec::new();
    let d = |i: usize, j: usize| p.dist2(i, j).sqrt();
    for _ in 0..n - 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for (x, &a) in live.iter().enumerate() {
            for &b in &live[x + 1..] {
                let (ma, mb) = (&members[a], &members[b]);
                let dist = match method {
                    Method::Single => ma.iter().flat_map(|&i| mb.iter().map(move |&j| d(i, j))).fold(f64::INFINITY, f64::min),
                    Method::Furthest => ma.iter().flat_map(|&i| mb.iter().map(move |&j| d(i, j))).fold(0.0, f64::max),
                    Method::Average => {
                        ma.iter().flat_map(|&i| mb.iter().map(move |&j| d(i, j))).sum::<f64>()
                            / (ma.len() * mb.len()) as f64
                    }
                    Method::Median => cent[a].iter().zip(&cent[b]).map(|(u, v)| (u - v).powi(2)).sum(),
                    _ => unreachable!(),
                };
                let key = (dist, a.min(b), a.max(b));
                if best.map_or(true, |bk| key.0 < bk.0 || (key.0 == bk.0 && (key.1, key.2) < (bk.1, bk.2))) {
                    best = Some(key);
                }
            }
        }
        let (_, a, b) = best.unwrap();
        events.push(MergeEvent::new(a, b));
        let mut m = members[a].clone();
        m.extend_from_slice(&members[b]);
        members.push(m);
        let c: Vec<f64> = cent[a].iter().zip(&cent[b]).map(|(u, v)| 0.5 * (u + v)).collect();
        cent.push(c);
        live.retain(|&c| c != a && c != b);
        live.push(members.len() - 1);
    }
    MergeOrder::new(n, events, method).unwrap()
}
