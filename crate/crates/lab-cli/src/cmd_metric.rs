use crate::cli::{MetricArgs, MetricName};
use crate::output;
use epimetrics::error::{Error, Result};
use epimetrics::metric::{
    delta_conjugate, delta_zeta_1_via_measure, delta_zeta_h, delta_zeta_p, epi_distance_rw,
    tilde_integral, MetricResult,
};
use epimetrics::{ConvexFunction, NumericConfig, WeightFunction};
use serde::Serialize;
use std::path::Path;

pub fn load_function(path: &Path) -> Result<ConvexFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn evaluate(
    name: MetricName,
    u: &ConvexFunction,
    v: &ConvexFunction,
    zeta: &WeightFunction,
    p: f64,
    rho_max: f64,
    cfg: &NumericConfig,
) -> Result<MetricResult> {
    match name {
        MetricName::DeltaZetaP => delta_zeta_p(u, v, zeta, p, cfg),
        MetricName::DeltaZeta1Measure => delta_zeta_1_via_measure(u, v, zeta, cfg),
        MetricName::DeltaZetaH => delta_zeta_h(u, v, zeta, cfg),
        MetricName::DeltaConjugate => delta_conjugate(u, v, cfg),
        MetricName::RwEpi => epi_distance_rw(u, v, rho_max, cfg),
        MetricName::TildeIntegral => tilde_integral(u, v, cfg),
    }
}

#[derive(Serialize)]
struct MetricReport<'a> {
    metric: &'a str,
    p: f64,
    result: &'a MetricResult,
}

pub fn run(args: MetricArgs) -> Result<i32> {
    let (cfg, zeta) = crate::cli::load_config(&args.common)?;
    let u = load_function(&args.u)?;
    let v = load_function(&args.v)?;
    let result = evaluate(args.metric, &u, &v, &zeta, args.p, args.rho_max, &cfg)?;
    println!(
        "{} = {}  (truncation {}, quadrature {}, method {:?})",
        args.metric.as_str(),
        output::fmt_value(result.value),
        output::fmt_value(result.truncation_bound),
        output::fmt_value(result.quadrature_error),
        result.method,
    );
    if let Some(path) = &args.common.json {
        output::write_json(
            path,
            &MetricReport {
                metric: args.metric.as_str(),
                p: args.p,
                result: &result,
            },
        )?;
    }
    Ok(0)
}
