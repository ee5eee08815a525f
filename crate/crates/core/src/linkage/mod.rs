//! Agglomeration-order builders.
//!
//! Every builder returns a [`MergeOrder`] using the `n + t - 1` id
//! convention, with each event written as `(smaller id, larger id)`.
//! Whenever candidate pairs tie on distance the lexicographically smallest
//! `(min id, max id)` pair wins, so identical input always yields an
//! identical order.

mod kdsplit;
mod matrix;
mod single;
mod spatial;
mod union_find;

pub use kdsplit::kdtree_order;
pub use single::{minimum_spanning_tree, single_linkage, single_linkage_with, MstEdge, SingleLinkageSearch};

use crate::error::LinkageError;
use crate::model::{MergeOrder, Method, PointSet};

/// Default ceiling on `n` for the distance-matrix builders.
pub const DEFAULT_MATRIX_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkageOptions {
    /// Largest `n` accepted by average, median and furthest linkage.
    pub matrix_cap: usize,
    pub single_search: SingleLinkageSearch,
}

impl Default for LinkageOptions {
    fn default() -> Self {
        Self { matrix_cap: DEFAULT_MATRIX_CAP, single_search: SingleLinkageSearch::Auto }
    }
}

/// Builds an order with the given method.
pub fn build_order(
    points: &PointSet,
    method: Method,
    opts: &LinkageOptions,
) -> Result<MergeOrder, LinkageError> {
    match method {
        Method::Single => Ok(single_linkage_with(points, opts.single_search)),
        Method::Average => matrix::lance_williams(points, matrix::Rule::Average, opts.matrix_cap),
        Method::Median => matrix::lance_williams(points, matrix::Rule::Median, opts.matrix_cap),
        Method::Furthest => matrix::lance_williams(points, matrix::Rule::Complete, opts.matrix_cap),
        Method::KdTree => Ok(kdtree_order(points)),
        Method::External => Err(LinkageError::NotABuilder("external")),
    }
}

/// Mean pairwise inter-cluster distance (UPGMA).
pub fn average_linkage(points: &PointSet) -> Result<MergeOrder, LinkageError> {
    matrix::lance_williams(points, matrix::Rule::Average, DEFAULT_MATRIX_CAP)
}

/// Distance between running centroids, where a merged centroid is the
/// unweighted mean of the two merged centroids (WPGMC).
pub fn median_linkage(points: &PointSet) -> Result<MergeOrder, LinkageError> {
    matrix::lance_williams(points, matrix::Rule::Median, DEFAULT_MATRIX_CAP)
}

/// Largest inter-cluster point distance (complete linkage).
pub fn furthest_linkage(points: &PointSet) -> Result<MergeOrder, LinkageError> {
    matrix::lance_williams(points, matrix::Rule::Complete, DEFAULT_MATRIX_CAP)
}

#[inline]
pub(crate) fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
