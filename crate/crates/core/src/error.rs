use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Csv { path: PathBuf, msg: String },
    #[error("malformed row {row}: {msg}")]
    MalformedRow { row: usize, msg: String },
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("non-finite coordinate at point {point}, axis {axis}")]
    NonFiniteCoord { point: usize, axis: usize },
    #[error("non-finite value in feature '{name}' at index {index}")]
    NonFiniteFeature { name: String, index: usize },
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("dimension must be 2 or 3, got {0}")]
    BadDims(usize),
    #[error("{len} coordinates is not a multiple of dimension {dims}")]
    RaggedCoords { len: usize, dims: usize },
    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),
    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch { what: String, expected: usize, found: usize },
    #[error("no feature named '{0}'")]
    MissingFeature(String),
    #[error("unknown method '{0}'")]
    UnknownMethod(String),
    #[error("merge order for n={n} needs {} events, found {found}", n - 1)]
    OrderLength { n: usize, found: usize },
    #[error("id {0} consumed twice")]
    IdConsumedTwice(usize),
    #[error("merge {t} uses id {id} before it is created")]
    IdNotCreated { t: usize, id: usize },
    #[error("merge {t} joins id {id} with itself")]
    SelfMerge { t: usize, id: usize },
    #[error("bad merge-order header: {0}")]
    OrderHeader(String),
    #[error("merge order has n={found}, expected n={expected}")]
    NMismatch { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum LinkageError {
    #[error("{method} linkage refuses n={n}: distance-matrix cap is {cap} points")]
    MatrixCap { method: &'static str, n: usize, cap: usize },
    #[error("method '{0}' cannot build an order")]
    NotABuilder(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SaError {
    #[error("S_A undefined: SS(n-1)=0")]
    ZeroVariance,
    #[error("feature length {found} does not match order n={expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("S_A needs n >= 2, got {0}")]
    TooFewPoints(usize),
    #[error("result has no trace")]
    MissingTrace,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("zero variance: statistic undefined")]
    ZeroVariance,
    #[error("points {0} and {1} coincide: inverse-distance weight is infinite")]
    CoincidentPoints(usize, usize),
    #[error("feature length {found} does not match n={expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("need at least one replicate")]
    NoReplicates,
    #[error(transparent)]
    Sa(#[from] SaError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("sigmoid unidentifiable: {0}")]
    Unidentifiable(String),
    #[error("fit did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("fitted parameters outside admissible region: s_max={s_max}, a={a}")]
    Inadmissible { s_max: f64, a: f64 },
    #[error("need at least 4 distinct n values, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite sample value")]
    NonFinite,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Umbrella error; the display text carries the originating module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("linkage: {0}")]
    Linkage(#[from] LinkageError),
    #[error("sa: {0}")]
    Sa(#[from] SaError),
    #[error("baselines: {0}")]
    Baseline(#[from] BaselineError),
    #[error("fitting: {0}")]
    Fit(#[from] FitError),
    #[error("synth: {0}")]
    Synth(#[from] SynthError),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("experiment: {0}")]
    Experiment(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
