//! Domain types shared by every stage: point sets, features, datasets and
//! agglomeration (merge) orders.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use indexmap::IndexMap;

use crate::error::ModelError;

/// `n` locations in 2-D or 3-D Euclidean space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dims: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from flat row-major coordinates.
    pub fn new(dims: usize, coords: Vec<f64>) -> Result<Self, ModelError> {
        if dims != 2 && dims != 3 {
            return Err(ModelError::BadDims(dims));
        }
        if coords.len() % dims != 0 {
            return Err(ModelError::RaggedCoords { len: coords.len(), dims });
        }
        let n = coords.len() / dims;
        if n < 2 {
            return Err(ModelError::TooFewPoints(n));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(ModelError::NonFiniteCoord { point: pos / dims, axis: pos % dims });
        }
        Ok(Self { dims, coords })
    }

    pub fn from_rows<const D: usize>(rows: &[[f64; D]]) -> Result<Self, ModelError> {
        Self::new(D, rows.iter().flatten().copied().collect())
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dims
    }

    /// Always false; a valid point set holds at least two points.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dims..(i + 1) * self.dims]
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Squared Euclidean distance between points `i` and `j`.
    #[inline]
    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        squared_distance(self.point(i), self.point(j))
    }

    /// Restricts the set to the given rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> Result<Self, ModelError> {
        let mut coords = Vec::with_capacity(rows.len() * self.dims);
        for &r in rows {
            coords.extend_from_slice(self.point(r));
        }
        Self::new(self.dims, coords)
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    // accumulation order is shared with the k-d tree search so that both
    // produce bit-identical distances
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

/// Named real values aligned index-for-index with a [`PointSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    name: String,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self, ModelError> {
        let name = name.into();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteFeature { name, index: i });
        }
        Ok(Self { name, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `f` elementwise, keeping the name.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, ModelError> {
        Self::new(self.name.clone(), self.values.iter().map(|&v| f(v)).collect())
    }
}

/// A point set together with any number of named features over it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: PointSet,
    features: IndexMap<String, FeatureVector>,
}

impl Dataset {
    pub fn new(points: PointSet, features: Vec<FeatureVector>) -> Result<Self, ModelError> {
        let mut map = IndexMap::with_capacity(features.len());
        for f in features {
            if f.len() != points.len() {
                return Err(ModelError::LengthMismatch {
                    what: format!("feature '{}'", f.name()),
                    expected: points.len(),
                    found: f.len(),
                });
            }
            if map.contains_key(f.name()) {
                return Err(ModelError::DuplicateColumn(f.name().to_string()));
            }
            map.insert(f.name().to_string(), f);
        }
        Ok(Self { points, features: map })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureVector> {
        self.features.get(name)
    }

    /// Looks up a feature, failing with a descriptive error when absent.
    pub fn require_feature(&self, name: &str) -> Result<&FeatureVector, ModelError> {
        self.feature(name).ok_or_else(|| ModelError::MissingFeature(name.to_string()))
    }

    /// Features in column order.
    pub fn features(&self) -> impl Iterator<Item = &FeatureVector> {
        self.features.values()
    }

    pub fn feature_names(&self) -> impl Iterator<Item = &str> {
        self.features.keys().map(String::as_str)
    }

    /// Row subset carrying every feature along.
    pub fn select(&self, rows: &[usize]) -> Result<Self, ModelError> {
        let points = self.points.select(rows)?;
        let features = self
            .features
            .values()
            .map(|f| FeatureVector::new(f.name(), rows.iter().map(|&r| f.values()[r]).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(points, features)
    }
}

/// Which builder produced a merge order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Single,
    Average,
    Median,
    Furthest,
    KdTree,
    External,
}

impl Method {
    pub const BUILDERS: [Method; 5] =
        [Method::Single, Method::Average, Method::Median, Method::Furthest, Method::KdTree];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Single => "single",
            Method::Average => "average",
            Method::Median => "median",
            Method::Furthest => "furthest",
            Method::KdTree => "kdtree",
            Method::External => "external",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "single" => Method::Single,
            "average" => Method::Average,
            "median" => Method::Median,
            "furthest" => Method::Furthest,
            "kdtree" => Method::KdTree,
            "external" => Method::External,
            other => return Err(ModelError::UnknownMethod(other.to_string())),
        })
    }
}

/// One merge of two live clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MergeEvent {
    pub left: usize,
    pub right: usize,
}

impl MergeEvent {
    pub fn new(left: usize, right: usize) -> Self {
        Self { left, right }
    }
}

/// A complete agglomeration order over `n` points.
///
/// Singletons carry ids `0..n`; the `t`-th merge (1-based) creates id
/// `n + t - 1`, so the root is `2n - 2`. Every id except the root is
/// consumed by exactly one later merge.
#[derive(Debug, Clone)]
pub struct MergeOrder {
    n: usize,
    events: Vec<MergeEvent>,
    method: Method,
    replay: OnceLock<Vec<ReplayStep>>,
}

impl PartialEq for MergeOrder {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.method == other.method && self.events == other.events
    }
}

impl Eq for MergeOrder {}

/// One merge rewritten for replay over `n` slots: the union is stored in
/// the left child's slot, so a pass over the order touches only `n` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ReplayStep {
    pub left: usize,
    pub right: usize,
    /// `|C2| / (|C1| + |C2|)`
    pub frac: f64,
    /// `|C1||C2| / (|C1| + |C2|)`
    pub weight: f64,
}

impl MergeOrder {
    pub fn new(n: usize, events: Vec<MergeEvent>, method: Method) -> Result<Self, ModelError> {
        validate_events(n, &events)?;
        Ok(Self { n, events, method, replay: OnceLock::new() })
    }

    /// Skips validation; builders in this crate construct orders that are
    /// valid by construction.
    pub(crate) fn new_unchecked(n: usize, events: Vec<MergeEvent>, method: Method) -> Self {
        debug_assert!(validate_events(n, &events).is_ok());
        Self { n, events, method, replay: OnceLock::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn events(&self) -> &[MergeEvent] {
        &self.events
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn root(&self) -> usize {
        2 * self.n - 2
    }

    /// Slot-reusing form of the events, built on first use and shared by
    /// every later replay of this order.
    pub(crate) fn replay(&self) -> &[ReplayStep] {
        self.replay.get_or_init(|| {
            let mut slot: Vec<usize> = (0..self.n).collect();
            let mut size = vec![1.0f64; self.n];
            slot.reserve(self.events.len());
            size.reserve(self.events.len());
            self.events
                .iter()
                .map(|e| {
                    let (a, b) = (size[e.left], size[e.right]);
                    let total = a + b;
                    let step = ReplayStep { left: slot[e.left], right: slot[e.right], frac: b / total, weight: a * b / total };
                    slot.push(step.left);
                    size.push(total);
                    step
                })
                .collect()
        })
    }

    /// Point indices belonging to every cluster id, `0..2n-1`.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members: Vec<Vec<usize>> = (0..self.n).map(|i| vec![i]).collect();
        for e in &self.events {
            let mut m = members[e.left].clone();
            m.extend_from_slice(&members[e.right]);
            members.push(m);
        }
        members
    }
}

fn validate_events(n: usize, events: &[MergeEvent]) -> Result<(), ModelError> {
    if n < 2 {
        return Err(ModelError::TooFewPoints(n));
    }
    if events.len() != n - 1 {
        return Err(ModelError::OrderLength { n, found: events.len() });
    }
    let mut consumed = vec![false; 2 * n - 1];
    for (k, e) in events.iter().enumerate() {
        let t = k + 1;
        let created = n + k;
        if e.left == e.right {
            return Err(ModelError::SelfMerge { t, id: e.left });
        }
        for id in [e.left, e.right] {
            if id >= created {
                return Err(ModelError::IdNotCreated { t, id });
            }
            if consumed[id] {
                return Err(ModelError::IdConsumedTwice(id));
            }
            consumed[id] = true;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_set_rejects_bad_input() {
        assert!(matches!(PointSet::new(4, vec![0.0; 8]), Err(ModelError::BadDims(4))));
        assert!(matches!(PointSet::new(2, vec![0.0; 2]), Err(ModelError::TooFewPoints(1))));
        assert!(matches!(PointSet::new(2, vec![0.0; 5]), Err(ModelError::RaggedCoords { .. })));
        let err = PointSet::new(2, vec![0.0, 1.0, f64::NAN, 2.0]).unwrap_err();
        assert!(matches!(err, ModelError::NonFiniteCoord { point: 1, axis: 0 }));
    }

    #[test]
    fn duplicate_coordinates_are_allowed() {
        let p = PointSet::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(p.dist2(0, 1), 0.0);
    }

    #[test]
    fn dataset_checks_lengths_and_names() {
        let p = PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        let a = FeatureVector::new("a", vec![1.0, 2.0, 3.0]).unwrap();
        let short = FeatureVector::new("b", vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            Dataset::new(p.clone(), vec![a.clone(), short]),
            Err(ModelError::LengthMismatch { .. })
        ));
        assert!(matches!(
            Dataset::new(p, vec![a.clone(), a]),
            Err(ModelError::DuplicateColumn(_))
        ));
    }

    #[test]
    fn order_validation() {
        let ok = MergeOrder::new(3, vec![MergeEvent::new(0, 1), MergeEvent::new(3, 2)], Method::External);
        assert!(ok.is_ok());
        let twice = MergeOrder::new(3, vec![MergeEvent::new(0, 1), MergeEvent::new(1, 2)], Method::External);
        assert_eq!(twice.unwrap_err().to_string(), "id 1 consumed twice");
        let future = MergeOrder::new(3, vec![MergeEvent::new(0, 3), MergeEvent::new(1, 2)], Method::External);
        assert!(matches!(future, Err(ModelError::IdNotCreated { t: 1, id: 3 })));
        let short = MergeOrder::new(3, vec![MergeEvent::new(0, 1)], Method::External);
        assert!(matches!(short, Err(ModelError::OrderLength { .. })));
        let selfm = MergeOrder::new(2, vec![MergeEvent::new(1, 1)], Method::External);
        assert!(matches!(selfm, Err(ModelError::SelfMerge { .. })));
    }

    #[test]
    fn members_of_root_cover_everything() {
        let o = MergeOrder::new(
            4,
            vec![MergeEvent::new(2, 3), MergeEvent::new(0, 4), MergeEvent::new(1, 5)],
            Method::External,
        )
        .unwrap();
        let mut root = o.members()[o.root()].clone();
        root.sort();
        assert_eq!(root, vec![0, 1, 2, 3]);
    }

    #[test]
    fn method_tags_round_trip() {
        for m in Method::BUILDERS.iter().chain([Method::External].iter()) {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), *m);
        }
        assert!("ward".parse::<Method>().is_err());
    }
}
