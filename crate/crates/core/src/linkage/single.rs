//! Single linkage as a Euclidean minimum spanning tree replayed in Kruskal
//! order.
//!
//! Edges are totally ordered by `(squared length, min index, max index)`.
//! Under a strict total order the MST is unique, so Prim's algorithm, the
//! k-d-tree Borůvka search and a brute-force Kruskal all return the same
//! tree.

use super::ordered;
use super::spatial::KdIndex;
use super::union_find::UnionFind;
use crate::model::{MergeEvent, MergeOrder, Method, PointSet};

/// Above this size `Auto` switches from Prim to the k-d-tree search.
const AUTO_KD_THRESHOLD: usize = 2048;

/// Neighbour-search strategy for the spanning tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingleLinkageSearch {
    /// Prim for small inputs, k-d-tree Borůvka for large ones.
    #[default]
    Auto,
    /// Dense Prim: O(n²) time, O(n) memory.
    Prim,
    /// Borůvka rounds driven by nearest-foreign-neighbour queries on a k-d tree.
    KdTree,
}

/// An MST edge between point indices `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstEdge {
    pub a: usize,
    pub b: usize,
    pub dist2: f64,
}

impl MstEdge {
    pub fn length(&self) -> f64 {
        self.dist2.sqrt()
    }
}

#[inline]
pub(crate) fn key_less(d1: f64, p1: (usize, usize), d2: f64, p2: (usize, usize)) -> bool {
    d1 < d2 || (d1 == d2 && p1 < p2)
}

pub fn single_linkage(points: &PointSet) -> MergeOrder {
    single_linkage_with(points, SingleLinkageSearch::Auto)
}

pub fn single_linkage_with(points: &PointSet, search: SingleLinkageSearch) -> MergeOrder {
    let edges = minimum_spanning_tree(points, search);
    order_from_edges(points.len(), &edges)
}

/// MST edges sorted by `(length, a, b)`.
pub fn minimum_spanning_tree(points: &PointSet, search: SingleLinkageSearch) -> Vec<MstEdge> {
    let use_kd = match search {
        SingleLinkageSearch::Prim => false,
        SingleLinkageSearch::KdTree => true,
        SingleLinkageSearch::Auto => points.len() > AUTO_KD_THRESHOLD,
    };
    let mut edges = if use_kd { boruvka(points) } else { prim(points) };
    edges.sort_unstable_by(|x, y| {
        x.dist2.total_cmp(&y.dist2).then((x.a, x.b).cmp(&(y.a, y.b)))
    });
    edges
}

fn order_from_edges(n: usize, edges: &[MstEdge]) -> MergeOrder {
    let mut uf = UnionFind::new(n);
    let mut cluster_of: Vec<usize> = (0..n).collect();
    let mut events = Vec::with_capacity(n - 1);
    for (k, e) in edges.iter().enumerate() {
        let ra = uf.find(e.a);
        let rb = uf.find(e.b);
        let (l, r) = ordered(cluster_of[ra], cluster_of[rb]);
        events.push(MergeEvent::new(l, r));
        let root = uf.union_roots(ra, rb);
        cluster_of[root] = n + k;
    }
    MergeOrder::new_unchecked(n, events, Method::Single)
}

fn prim(points: &PointSet) -> Vec<MstEdge> {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best_d = vec![f64::INFINITY; n];
    let mut best_pair = vec![(usize::MAX, usize::MAX); n];
    let mut edges = Vec::with_capacity(n - 1);

    let mut u = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let mut next = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let d = points.dist2(u, v);
            let pair = ordered(u, v);
            if key_less(d, pair, best_d[v], best_pair[v]) {
                best_d[v] = d;
                best_pair[v] = pair;
            }
            if next == usize::MAX || key_less(best_d[v], best_pair[v], best_d[next], best_pair[next]) {
                next = v;
            }
        }
        in_tree[next] = true;
        let (a, b) = best_pair[next];
        edges.push(MstEdge { a, b, dist2: best_d[next] });
        u = next;
    }
    edges
}

fn boruvka(points: &PointSet) -> Vec<MstEdge> {
    let n = points.len();
    let index = KdIndex::build(points);
    let mut uf = UnionFind::new(n);
    let mut edges = Vec::with_capacity(n - 1);
    let mut comp = vec![0usize; n];
    let mut best: Vec<(f64, (usize, usize))> = vec![(f64::INFINITY, (usize::MAX, usize::MAX)); n];

    while edges.len() < n - 1 {
        for (slot, c) in comp.iter_mut().enumerate() {
            *c = uf.find(index.original(slot));
        }
        let node_comp = index.uniform_labels(&comp);
        for b in best.iter_mut() {
            *b = (f64::INFINITY, (usize::MAX, usize::MAX));
        }
        for slot in 0..n {
            let c = comp[slot];
            let mut cand = best[c];
            index.nearest_foreign(slot, &comp, &node_comp, &mut cand);
            best[c] = cand;
        }
        for r in 0..n {
            if uf.find(r) != r {
                continue;
            }
            let (d, (a, b)) = best[r];
            if a == usize::MAX {
                continue;
            }
            let ra = uf.find(a);
            let rb = uf.find(b);
            if ra != rb {
                uf.union_roots(ra, rb);
                edges.push(MstEdge { a, b, dist2: d });
            }
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kruskal_oracle(points: &PointSet) -> Vec<MstEdge> {
        let n = points.len();
        let mut all = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                all.push(MstEdge { a: i, b: j, dist2: points.dist2(i, j) });
            }
        }
        all.sort_by(|x, y| x.dist2.total_cmp(&y.dist2).then((x.a, x.b).cmp(&(y.a, y.b))));
        let mut uf = UnionFind::new(n);
        all.into_iter()
            .filter(|e| {
                let (ra, rb) = (uf.find(e.a), uf.find(e.b));
                if ra == rb {
                    false
                } else {
                    uf.union_roots(ra, rb);
                    true
                }
            })
            .collect()
    }

    fn lcg_points(n: usize, dims: usize, seed: u64, grid: Option<f64>) -> PointSet {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut coords = Vec::with_capacity(n * dims);
        for _ in 0..n * dims {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (s >> 11) as f64 / (1u64 << 53) as f64;
            coords.push(match grid {
                Some(g) => (u * g).floor(),
                None => u,
            });
        }
        PointSet::new(dims, coords).unwrap()
    }

    #[test]
    fn collinear_nearest_pair_first() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [100.0, 0.0]]).unwrap();
        let o = single_linkage(&p);
        assert_eq!(o.events()[0], MergeEvent::new(0, 1));
        assert_eq!(o.events()[1], MergeEvent::new(2, 3));
    }

    #[test]
    fn unit_square_tie_rule() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        for search in [SingleLinkageSearch::Prim, SingleLinkageSearch::KdTree] {
            let mst = minimum_spanning_tree(&p, search);
            let pairs: Vec<_> = mst.iter().map(|e| (e.a, e.b)).collect();
            assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 3)]);
            let o = single_linkage_with(&p, search);
            assert_eq!(o.events(), &[MergeEvent::new(0, 1), MergeEvent::new(2, 4), MergeEvent::new(3, 5)]);
        }
    }

    #[test]
    fn matches_brute_force_kruskal() {
        for seed in 0..20 {
            let dims = 2 + (seed as usize % 2);
            let grid = if seed % 3 == 0 { Some(6.0) } else { None };
            let p = lcg_points(200, dims, seed, grid);
            let oracle = kruskal_oracle(&p);
            assert_eq!(minimum_spanning_tree(&p, SingleLinkageSearch::Prim), oracle, "prim seed {seed}");
            assert_eq!(minimum_spanning_tree(&p, SingleLinkageSearch::KdTree), oracle, "kd seed {seed}");
            let lengths: Vec<f64> = oracle.iter().map(MstEdge::length).collect();
            assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn kd_search_handles_all_duplicates() {
        let p = PointSet::new(2, vec![0.5; 2 * 100]).unwrap();
        let kd = single_linkage_with(&p, SingleLinkageSearch::KdTree);
        let prim = single_linkage_with(&p, SingleLinkageSearch::Prim);
        assert_eq!(kd, prim);
    }

    #[test]
    fn large_kd_equals_prim() {
        let p = lcg_points(3000, 2, 99, None);
        assert_eq!(
            single_linkage_with(&p, SingleLinkageSearch::KdTree),
            single_linkage_with(&p, SingleLinkageSearch::Prim)
        );
    }
}
