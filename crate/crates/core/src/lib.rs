//! # epimetrics
//!
//! A computational toolkit for metrics on spaces of coercive convex
//! functions on R^n.
//!
//! The crate provides:
//!
//! - representations of coercive convex functions (closed forms and grids)
//!   with evaluation, minima, sublevel sets and cone envelopes ([`func`]);
//! - convex-body geometry: volumes, Minkowski sums, the Hausdorff metric
//!   and its two extensions to the empty set ([`body`]);
//! - weight functions with moment-class certification ([`weight`]);
//! - Legendre-Fenchel conjugation, inf-convolution and coercivity
//!   classification ([`transform`]);
//! - the distance constructions themselves, each returning a value with an
//!   explicit error budget ([`metric`]);
//! - isometry specs for the weighted L^1 metric with numeric verification
//!   ([`isometry`]);
//! - parameterized function sequences for convergence experiments
//!   ([`family`]).
//!
//! Every computed distance carries a truncation bound plus a quadrature or
//! Monte-Carlo error, and all comparisons in the test suite are made
//! relative to those budgets. With the default `parallel` feature the
//! inner loops fan out over rayon; results are identical with the feature
//! disabled.

#![forbid(unsafe_code)]

pub mod body;
pub mod config;
pub mod error;
pub mod family;
pub mod func;
pub mod geom;
pub mod isometry;
pub mod linalg;
pub mod metric;
pub mod par;
pub mod quad;
pub mod sampler;
pub mod transform;
pub mod weight;

pub use body::ConvexBody;
pub use config::NumericConfig;
pub use error::{Error, Result};
pub use func::{ConvexFunction, GridFn, Shape};
pub use metric::{EpiMeasure, Method, MetricResult};
pub use weight::{Membership, WeightForm, WeightFunction};
