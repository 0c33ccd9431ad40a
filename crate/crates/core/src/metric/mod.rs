//! The five distance constructions, each returning a value together with
//! an explicit error budget (truncation bound + quadrature or Monte-Carlo
//! error). Comparisons in tests are always made against these budgets.
//!
//! - [`delta_zeta_p`]: the weighted L^p distance of composed layers,
//!   defined on functions with full-dimensional domain;
//! - [`delta_zeta_1_via_measure`]: the same value for p = 1 through the
//!   epigraph measure, used as an independent cross-check route;
//! - [`delta_zeta_h`]: the level-set integral of the bounded-penalty
//!   extension of the Hausdorff metric;
//! - [`tilde_integral`]: the level-set integral under the forced
//!   translation-invariant extension, which blows up on vertical shifts;
//! - [`delta_conjugate`]: the sup-norm fixed point on conjugates;
//! - [`epi_distance_rw`]: the Rockafellar-Wets integrated epigraph
//!   distance.

mod conjugate;
mod hausdorff;
mod rockafellar;
mod zeta_p;

pub use conjugate::delta_conjugate;
pub use hausdorff::{delta_zeta_h, tilde_integral};
pub use rockafellar::{epi_distance_rw, point_to_epigraph};
pub use zeta_p::{
    delta_zeta_1_via_measure, delta_zeta_p, epigraph_measure, scheffe_check, weighted_lp_norm,
    ScheffeReport, ScheffeRow,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    Grid,
    MonteCarlo,
}

/// A computed distance with its error budget. `analytic` results carry a
/// zero budget unless an operand itself was only enclosed (sampled
/// bodies), in which case the enclosure width lands in the quadrature
/// slot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    pub truncation_bound: f64,
    pub quadrature_error: f64,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl MetricResult {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            truncation_bound: 0.0,
            quadrature_error: 0.0,
            method: Method::Analytic,
            detail: None,
        }
    }

    pub fn budget(&self) -> f64 {
        self.truncation_bound + self.quadrature_error
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// The weighted measure of an epigraph, with the same budget layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpiMeasure {
    pub value: f64,
    pub truncation_bound: f64,
    pub quadrature_error: f64,
    pub method: Method,
}

impl EpiMeasure {
    pub fn budget(&self) -> f64 {
        self.truncation_bound + self.quadrature_error
    }
}
