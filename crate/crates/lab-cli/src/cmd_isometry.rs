use crate::cli::IsometryArgs;
use crate::cmd_metric::load_function;
use crate::output;
use epimetrics::error::{Error, Result};
use epimetrics::isometry::{
    measure_preservation_check, verify_isometry, IsometryReport, IsometrySpec, MeasureReport,
};
use epimetrics::ConvexFunction;
use serde::Serialize;

#[derive(Serialize)]
struct FullReport {
    spec_det: f64,
    membership: epimetrics::isometry::PhiVerdict,
    isometry: IsometryReport,
    measure_preservation: MeasureReport,
    pass: bool,
}

pub fn run(args: IsometryArgs) -> Result<i32> {
    let (cfg, zeta_override) = crate::cli::load_config(&args.common)?;
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", args.spec.display())))?;
    let mut spec: IsometrySpec = serde_json::from_str(&text)?;
    if args.common.zeta.is_some() {
        spec = IsometrySpec::new(spec.phi.clone(), spec.x0.clone(), zeta_override)?;
    }

    // Corpus: all .json files in name order, paired cyclically.
    let mut paths: Vec<std::path::PathBuf> = std::fs::read_dir(&args.corpus)
        .map_err(|e| Error::Parse(format!("cannot read corpus {}: {e}", args.corpus.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("json"))
        .collect();
    paths.sort();
    if paths.len() < 2 {
        return Err(Error::InvalidConfig(
            "corpus needs at least two function specs".into(),
        ));
    }
    let corpus: Vec<ConvexFunction> = paths
        .iter()
        .map(|p| load_function(p))
        .collect::<Result<_>>()?;

    // Admissibility gate: probe window from the corpus minima, per the
    // windowed certification policy.
    let mut min_lo = f64::INFINITY;
    let mut min_hi = f64::NEG_INFINITY;
    for u in &corpus {
        let (_, m) = u.global_min()?;
        let diam = u.sublevel_set(m + 10.0)?.max_norm().unwrap_or(1.0);
        min_lo = min_lo.min(m - 5.0);
        min_hi = min_hi.max(m + diam + 5.0);
    }
    let membership = spec.membership((min_lo, min_hi));
    if !membership.is_member() {
        return Err(Error::NotInPhi(format!(
            "|det phi| = {} with this weight: {membership:?}",
            spec.det_abs()
        )));
    }

    let pairs: Vec<(ConvexFunction, ConvexFunction)> = (0..corpus.len())
        .map(|i| (corpus[i].clone(), corpus[(i + 1) % corpus.len()].clone()))
        .collect();
    let isometry = verify_isometry(&spec, &pairs, &cfg)?;
    let measure = measure_preservation_check(&spec, &corpus, &cfg)?;

    let rows: Vec<Vec<String>> = isometry
        .rows
        .iter()
        .map(|r| {
            vec![
                r.pair.to_string(),
                output::fmt_value(r.before),
                output::fmt_value(r.after),
                output::fmt_value(r.deviation),
                output::fmt_value(r.budget),
            ]
        })
        .collect();
    output::print_table(
        &["pair", "delta(u,v)", "delta(Iu,Iv)", "deviation", "budget"],
        &rows,
    );
    println!();
    println!(
        "isometry: {} (max deviation {}, max budget {})",
        if isometry.pass { "PASS" } else { "FAIL" },
        output::fmt_value(isometry.max_deviation),
        output::fmt_value(isometry.max_budget),
    );
    println!(
        "measure preservation: {}",
        if measure.pass { "PASS" } else { "FAIL" }
    );

    let pass = isometry.pass && measure.pass;
    let report = FullReport {
        spec_det: spec.det_abs(),
        membership,
        isometry,
        measure_preservation: measure,
        pass,
    };
    if let Some(path) = &args.common.json {
        output::write_json(path, &report)?;
    }
    if let Some(path) = &args.common.csv {
        output::write_csv(
            path,
            &["pair", "before", "after", "deviation", "budget"],
            &rows,
        )?;
    }
    if pass {
        Ok(0)
    } else {
        Err(Error::Tolerance("isometry verification failed".into()))
    }
}
