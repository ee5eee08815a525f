//! Merge order from a balanced k-d partition, read bottom-up.
//!
//! Each partition is split on axis `depth % dims` between its two median
//! planes: the lower `floor(m/2)` points (by coordinate, then index) go
//! left. Splitting stops at singletons. Replaying the splits backwards gives
//! the merges: deepest level first, left to right within a level.

use super::ordered;
use crate::model::{MergeEvent, MergeOrder, Method, PointSet};

struct Split {
    depth: usize,
    // children are either point indices or other splits
    left: Child,
    right: Child,
}

#[derive(Clone, Copy)]
enum Child {
    Point(usize),
    Split(usize),
}

pub fn kdtree_order(points: &PointSet) -> MergeOrder {
    let n = points.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut splits: Vec<Split> = Vec::with_capacity(n - 1);
    partition(points, &mut perm, 0, &mut splits);

    // stable sort keeps left-to-right order within each level
    let mut schedule: Vec<usize> = (0..splits.len()).collect();
    schedule.sort_by(|&a, &b| splits[b].depth.cmp(&splits[a].depth));

    let mut created = vec![usize::MAX; splits.len()];
    let mut events = Vec::with_capacity(n - 1);
    for (t, &s) in schedule.iter().enumerate() {
        let resolve = |c: Child| match c {
            Child::Point(i) => i,
            Child::Split(k) => created[k],
        };
        let (l, r) = ordered(resolve(splits[s].left), resolve(splits[s].right));
        events.push(MergeEvent::new(l, r));
        created[s] = n + t;
    }
    MergeOrder::new_unchecked(n, events, Method::KdTree)
}

fn partition(points: &PointSet, perm: &mut [usize], depth: usize, splits: &mut Vec<Split>) -> Child {
    if perm.len() == 1 {
        return Child::Point(perm[0]);
    }
    let axis = depth % points.dims();
    let mid = perm.len() / 2;
    perm.select_nth_unstable_by(mid, |&i, &j| {
        points.point(i)[axis].total_cmp(&points.point(j)[axis]).then(i.cmp(&j))
    });
    let (lo, hi) = perm.split_at_mut(mid);
    let k = splits.len();
    splits.push(Split { depth, left: Child::Point(usize::MAX), right: Child::Point(usize::MAX) });
    let left = partition(points, lo, depth + 1, splits);
    let right = partition(points, hi, depth + 1, splits);
    splits[k].left = left;
    splits[k].right = right;
    Child::Split(k)
}
