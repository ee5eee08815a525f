//! Bounding-box k-d tree used for nearest-foreign-neighbour queries during
//! Borůvka rounds.

use super::ordered;
use super::single::key_less;
use crate::model::PointSet;

const LEAF_SIZE: usize = 12;
const NONE: usize = usize::MAX;

struct Node {
    lo: [f64; 3],
    hi: [f64; 3],
    start: usize,
    end: usize,
    // child node indices; children always follow their parent
    left: usize,
    right: usize,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.left == NONE
    }
}

pub(crate) struct KdIndex {
    dims: usize,
    perm: Vec<usize>,
    pts: Vec<[f64; 3]>,
    nodes: Vec<Node>,
}

impl KdIndex {
    pub(crate) fn build(points: &PointSet) -> Self {
        let n = points.len();
        let dims = points.dims();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        build_node(points, &mut perm, 0, &mut nodes);
        let pts = perm
            .iter()
            .map(|&i| {
                let mut p = [0.0; 3];
                p[..dims].copy_from_slice(points.point(i));
                p
            })
            .collect();
        Self { dims, perm, pts, nodes }
    }

    #[inline]
    pub(crate) fn original(&self, slot: usize) -> usize {
        self.perm[slot]
    }

    /// Per node: the component shared by every point below it, or `NONE`.
    /// `comp` is indexed by slot.
    pub(crate) fn uniform_labels(&self, comp: &[usize]) -> Vec<usize> {
        let mut labels = vec![NONE; self.nodes.len()];
        for k in (0..self.nodes.len()).rev() {
            let node = &self.nodes[k];
            labels[k] = if node.is_leaf() {
                let c = comp[node.start];
                if comp[node.start..node.end].iter().all(|&x| x == c) {
                    c
                } else {
                    NONE
                }
            } else if labels[node.left] == labels[node.right] {
                labels[node.left]
            } else {
                NONE
            };
        }
        labels
    }

    /// Improves `best` with the closest point in a different component than
    /// `slot`, under the `(distance², min index, max index)` order.
    pub(crate) fn nearest_foreign(
        &self,
        slot: usize,
        comp: &[usize],
        labels: &[usize],
        best: &mut (f64, (usize, usize)),
    ) {
        let q = Query { p: self.pts[slot], orig: self.perm[slot], comp: comp[slot] };
        self.search(0, &q, comp, labels, best);
    }

    fn search(&self, k: usize, q: &Query, comp: &[usize], labels: &[usize], best: &mut (f64, (usize, usize))) {
        if labels[k] == q.comp {
            return;
        }
        let node = &self.nodes[k];
        if node.is_leaf() {
            for s in node.start..node.end {
                if comp[s] == q.comp {
                    continue;
                }
                let d = self.dist2(&q.p, &self.pts[s]);
                let pair = ordered(q.orig, self.perm[s]);
                if key_less(d, pair, best.0, best.1) {
                    *best = (d, pair);
                }
            }
            return;
        }
        let dl = self.box_dist2(node.left, &q.p);
        let dr = self.box_dist2(node.right, &q.p);
        let (first, dfirst, second, dsecond) =
            if dl <= dr { (node.left, dl, node.right, dr) } else { (node.right, dr, node.left, dl) };
        if dfirst <= best.0 {
            self.search(first, q, comp, labels, best);
        }
        if dsecond <= best.0 {
            self.search(second, q, comp, labels, best);
        }
    }

    #[inline]
    fn dist2(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for k in 0..self.dims {
            let d = a[k] - b[k];
            s += d * d;
        }
        s
    }

    /// Lower bound on the squared distance from `p` to any point in node `k`.
    #[inline]
    fn box_dist2(&self, k: usize, p: &[f64; 3]) -> f64 {
        let node = &self.nodes[k];
        let mut s = 0.0;
        for a in 0..self.dims {
            let d = if p[a] < node.lo[a] {
                node.lo[a] - p[a]
            } else if p[a] > node.hi[a] {
                p[a] - node.hi[a]
            } else {
                0.0
            };
            s += d * d;
        }
        s
    }
}

struct Query {
    p: [f64; 3],
    orig: usize,
    comp: usize,
}

fn build_node(points: &PointSet, perm: &mut [usize], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let dims = points.dims();
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    for a in 0..dims {
        lo[a] = f64::INFINITY;
        hi[a] = f64::NEG_INFINITY;
    }
    for &i in perm.iter() {
        let p = points.point(i);
        for a in 0..dims {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let k = nodes.len();
    nodes.push(Node { lo, hi, start: offset, end: offset + perm.len(), left: NONE, right: NONE });
    if perm.len() <= LEAF_SIZE {
        return k;
    }
    let axis = (0..dims)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    let mid = perm.len() / 2;
    perm.select_nth_unstable_by(mid, |&i, &j| {
        points.point(i)[axis].total_cmp(&points.point(j)[axis]).then(i.cmp(&j))
    });
    let (left, right) = perm.split_at_mut(mid);
    let l = build_node(points, left, offset, nodes);
    let r = build_node(points, right, offset + mid, nodes);
    nodes[k].left = l;
    nodes[k].right = r;
    k
}
