//! Spatial autocorrelation through a fixed merge order.
//!
//! A [`MergeOrder`] is built once from the coordinates
//! ([`linkage::build_order`]) and can then score any number of value
//! vectors in linear time with [`compute_sa`]. Moran's I and Geary's C are
//! provided for comparison.

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod fitting;
pub mod io;
pub mod linkage;
pub mod model;
pub mod sa;
pub mod synth;

pub use error::{Error, Result};
pub use linkage::{build_order, LinkageOptions};
pub use model::{Dataset, FeatureVector, MergeEvent, MergeOrder, Method, PointSet};
pub use sa::{compute_sa, compute_sa_multi, SaResult, SaTrace};
