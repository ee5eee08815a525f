//! Greedy agglomeration over a condensed distance matrix with
//! Lance–Williams updates.
//!
//! Each live slot caches its nearest neighbour under the pair order
//! `(distance, min cluster id, max cluster id)`. After a merge only the
//! slots whose cached neighbour disappeared are rescanned; every other slot
//! just compares its cache with the new cluster. This is the exact greedy
//! algorithm (same output as rescanning everything each step) in roughly
//! quadratic time for these three rules.

use super::ordered;
use super::single::key_less;
use crate::error::LinkageError;
use crate::model::{MergeEvent, MergeOrder, Method, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rule {
    /// Mean of all pairwise Euclidean distances.
    Average,
    /// Squared distance between unweighted running centroids.
    Median,
    /// Maximum pairwise Euclidean distance.
    Complete,
}

impl Rule {
    fn method(self) -> Method {
        match self {
            Rule::Average => Method::Average,
            Rule::Median => Method::Median,
            Rule::Complete => Method::Furthest,
        }
    }

    #[inline]
    fn initial(self, d2: f64) -> f64 {
        match self {
            Rule::Median => d2,
            Rule::Average | Rule::Complete => d2.sqrt(),
        }
    }

    /// Distance from `k` to the union of `i` and `j`.
    #[inline]
    fn update(self, dki: f64, dkj: f64, dij: f64, ni: f64, nj: f64) -> f64 {
        match self {
            Rule::Average => (ni * dki + nj * dkj) / (ni + nj),
            Rule::Median => (0.5 * dki + 0.5 * dkj - 0.25 * dij).max(0.0),
            Rule::Complete => dki.max(dkj),
        }
    }
}

struct Condensed {
    n: usize,
    data: Vec<f64>,
}

impl Condensed {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = ordered(i, j);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }
}

pub(crate) fn lance_williams(points: &PointSet, rule: Rule, cap: usize) -> Result<MergeOrder, LinkageError> {
    let n = points.len();
    let method = rule.method();
    if n > cap {
        return Err(LinkageError::MatrixCap { method: method.as_str(), n, cap });
    }

    let mut dist = Condensed { n, data: Vec::with_capacity(n * (n - 1) / 2) };
    for i in 0..n {
        for j in i + 1..n {
            dist.data.push(rule.initial(points.dist2(i, j)));
        }
    }

    let mut active: Vec<usize> = (0..n).collect();
    let mut id: Vec<usize> = (0..n).collect();
    let mut size = vec![1.0f64; n];
    let mut nn = vec![usize::MAX; n];
    let mut nn_d = vec![f64::INFINITY; n];

    let rescan = |s: usize, active: &[usize], id: &[usize], dist: &Condensed| -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut best_pair = (usize::MAX, usize::MAX);
        for &k in active {
            if k == s {
                continue;
            }
            let d = dist.get(s, k);
            let pair = ordered(id[s], id[k]);
            if key_less(d, pair, best.1, best_pair) {
                best = (k, d);
                best_pair = pair;
            }
        }
        best
    };

    for &s in &active {
        let (k, d) = rescan(s, &active, &id, &dist);
        nn[s] = k;
        nn_d[s] = d;
    }

    let mut events = Vec::with_capacity(n - 1);
    for t in 0..n - 1 {
        let mut i = usize::MAX;
        for &s in &active {
            if i == usize::MAX
                || key_less(nn_d[s], ordered(id[s], id[nn[s]]), nn_d[i], ordered(id[i], id[nn[i]]))
            {
                i = s;
            }
        }
        let j = nn[i];
        let dij = nn_d[i];
        let (l, r) = ordered(id[i], id[j]);
        events.push(MergeEvent::new(l, r));

        // slot i becomes the merged cluster, slot j is retired
        active.retain(|&s| s != j);
        for &k in &active {
            if k == i {
                continue;
            }
            let v = rule.update(dist.get(k, i), dist.get(k, j), dij, size[i], size[j]);
            dist.set(k, i, v);
        }
        size[i] += size[j];
        id[i] = n + t;

        let (k, d) = rescan(i, &active, &id, &dist);
        nn[i] = k;
        nn_d[i] = d;
        for idx in 0..active.len() {
            let s = active[idx];
            if s == i {
                continue;
            }
            if nn[s] == i || nn[s] == j {
                let (k, d) = rescan(s, &active, &id, &dist);
                nn[s] = k;
                nn_d[s] = d;
            } else {
                let d = dist.get(s, i);
                if key_less(d, ordered(id[s], id[i]), nn_d[s], ordered(id[s], id[nn[s]])) {
                    nn[s] = i;
                    nn_d[s] = d;
                }
            }
        }
    }
    debug_assert_eq!(active.len(), 1);
    Ok(MergeOrder::new_unchecked(n, events, method))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[[f64; 2]]) -> PointSet {
        PointSet::from_rows(rows).unwrap()
    }

    #[test]
    fn separated_pairs_merge_internally_first() {
        let p = pts(&[[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]]);
        for rule in [Rule::Average, Rule::Median, Rule::Complete] {
            let o = lance_williams(&p, rule, 100).unwrap();
            assert_eq!(o.events(), &[MergeEvent::new(0, 1), MergeEvent::new(2, 3), MergeEvent::new(4, 5)]);
        }
    }

    #[test]
    fn lance_williams_hand_values() {
        // average: {0,1} to {2} = (5 + 4) / 2
        assert_eq!(Rule::Average.update(5.0, 4.0, 1.0, 1.0, 1.0), 4.5);
        // complete: {0,1} to {2} at 2.1
        assert_eq!(Rule::Complete.update(2.1, 1.1, 1.0, 1.0, 1.0), 2.1);
        // median: centroid of (0,0),(2,0) is (1,0); squared distance to (1.4,0) is 0.16
        let v = Rule::Median.update(1.4 * 1.4, 0.6 * 0.6, 4.0, 1.0, 1.0);
        assert!((v - 0.16).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let p = pts(&[[0.0, 0.0], [0.0, 1.0], [10.0, 0.0]]);
        assert!(matches!(lance_williams(&p, Rule::Average, 2), Err(LinkageError::MatrixCap { n: 3, cap: 2, .. })));
    }
}
