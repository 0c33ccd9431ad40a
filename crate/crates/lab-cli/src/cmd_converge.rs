use crate::cli::{parse_k_range, ConvergeArgs, MetricName};
use crate::cmd_metric::evaluate;
use crate::output;
use epimetrics::error::{Error, Result};
use epimetrics::family::FamilyRegistry;
use serde::Serialize;

#[derive(Serialize, Clone)]
struct Row {
    k: u64,
    metric: &'static str,
    /// Formatted value; "inf" for the infinite flag.
    value: String,
    budget: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct ConvergenceReport {
    family: String,
    declared_epi_convergent: bool,
    declared_super_coercive: bool,
    tol: f64,
    rows: Vec<Row>,
    /// metric -> converged-below-tolerance | not-converged | diverged-infinite
    verdicts: std::collections::BTreeMap<&'static str, &'static str>,
}

pub fn run(args: ConvergeArgs) -> Result<i32> {
    let (cfg, zeta) = crate::cli::load_config(&args.common)?;
    let mut registry = FamilyRegistry::builtin();
    if let Some(path) = &args.families {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        registry.merge_json(&text)?;
    }
    let family = registry.get(&args.family)?;
    let limit = family.limit()?.ok_or_else(|| {
        Error::InvalidConfig(format!(
            "family `{}` declares no epi-limit in the class; nothing to converge to",
            args.family
        ))
    })?;
    // Compatibility: the weighted L^p metrics demand full-dimensional
    // domains, so the limit must qualify.
    if args
        .metrics
        .iter()
        .any(|m| matches!(m, MetricName::DeltaZetaP | MetricName::DeltaZeta1Measure))
        && !limit.is_full_dimensional()?
    {
        return Err(Error::NotFullDimensional(format!(
            "dim dom < n: the weighted L^p metric requires the limit of `{}` to be full-dimensional",
            args.family
        )));
    }

    let (k_lo, k_hi) = parse_k_range(&args.k_range)?;
    let ks = schedule(k_lo, k_hi, args.points);
    let mut rows: Vec<Row> = Vec::new();
    let mut series: std::collections::BTreeMap<&'static str, Vec<(f64, f64)>> = Default::default();
    for &k in &ks {
        let uk = family.member(k)?;
        for metric in &args.metrics {
            let name = metric.as_str();
            match evaluate(*metric, &uk, &limit, &zeta, args.p, 0.0, &cfg) {
                Ok(r) => {
                    rows.push(Row {
                        k,
                        metric: name,
                        value: output::fmt_value(r.value),
                        budget: output::fmt_value(r.budget()),
                        note: None,
                    });
                    series.entry(name).or_default().push((r.value, r.budget()));
                }
                Err(
                    e @ (Error::NotFullDimensional(_)
                    | Error::MembershipUnverified(_)
                    | Error::NotCoercive(_)),
                ) => {
                    // Inadmissible member (e.g. a degenerate first index):
                    // record the refusal and keep going.
                    rows.push(Row {
                        k,
                        metric: name,
                        value: "refused".into(),
                        budget: "-".into(),
                        note: Some(e.to_string()),
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }

    let mut verdicts = std::collections::BTreeMap::new();
    for metric in &args.metrics {
        let name = metric.as_str();
        let vals = series.get(name).map(|v| v.as_slice()).unwrap_or(&[]);
        verdicts.insert(name, verdict(vals, args.tol));
    }

    let report = ConvergenceReport {
        family: args.family.clone(),
        declared_epi_convergent: family.epi_convergent(),
        declared_super_coercive: family.super_coercive(),
        tol: args.tol,
        rows,
        verdicts,
    };

    let table: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.metric.to_string(),
                r.value.clone(),
                r.budget.clone(),
                r.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    output::print_table(&["k", "metric", "value", "budget", "note"], &table);
    println!();
    println!(
        "family `{}`: declared epi-convergent = {}, super-coercive = {}",
        report.family, report.declared_epi_convergent, report.declared_super_coercive
    );
    for (m, v) in &report.verdicts {
        println!("verdict {m}: {v}");
    }
    if let Some(path) = &args.common.json {
        output::write_json(path, &report)?;
    }
    if let Some(path) = &args.common.csv {
        output::write_csv(path, &["k", "metric", "value", "budget", "note"], &table)?;
    }
    Ok(0)
}

/// "converged" needs the final three values below tolerance with a
/// nonincreasing trend within budgets; an infinite tail value diverges.
fn verdict(vals: &[(f64, f64)], tol: f64) -> &'static str {
    if vals.len() < 3 {
        return "not-converged";
    }
    let tail = &vals[vals.len() - 3..];
    if tail.iter().any(|(v, _)| v.is_infinite()) {
        return "diverged-infinite";
    }
    let below = tail.iter().all(|(v, _)| *v <= tol);
    let monotone = tail
        .windows(2)
        .all(|w| w[1].0 <= w[0].0 + w[0].1 + w[1].1 + 1e-12);
    if below && monotone {
        "converged-below-tolerance"
    } else {
        "not-converged"
    }
}

/// Log-spaced schedule on [k_lo, k_hi] always containing the last three
/// indices.
fn schedule(k_lo: u64, k_hi: u64, points: usize) -> Vec<u64> {
    let p = points.max(4);
    let mut ks: Vec<u64> = (0..p)
        .map(|i| {
            let t = i as f64 / (p - 1) as f64;
            let x = (k_lo as f64).powf(1.0 - t) * (k_hi as f64).powf(t);
            x.round().clamp(k_lo as f64, k_hi as f64) as u64
        })
        .collect();
    if k_hi >= k_lo + 2 {
        ks.extend_from_slice(&[k_hi - 2, k_hi - 1, k_hi]);
    }
    ks.sort_unstable();
    ks.dedup();
    ks
}
