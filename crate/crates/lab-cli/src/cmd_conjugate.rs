use crate::cli::ConjugateArgs;
use crate::cmd_metric::load_function;
use crate::output;
use epimetrics::error::{Error, Result};
use epimetrics::transform::{biconjugate, conjugate};

pub fn run(args: ConjugateArgs) -> Result<i32> {
    let (cfg, _) = crate::cli::load_config(&args.common)?;
    let u = load_function(&args.input)?;
    let c = conjugate(&u, &cfg)?;
    let spec = serde_json::to_string_pretty(&c.function)?;
    match &args.out {
        Some(path) => std::fs::write(path, spec + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{spec}"),
    }
    eprintln!(
        "conjugate resolved on box {:?}..{:?}, dual-feasibility accuracy {}",
        c.domain_box.0,
        c.domain_box.1,
        output::fmt_value(c.accuracy)
    );
    if args.check_roundtrip {
        let b = biconjugate(&u, &cfg)?;
        // Sup deviation over a probe grid on the resolved primal region.
        let n = u.dim();
        let (_, m) = u.global_min()?;
        let r = u.sublevel_set(m + 10.0)?.max_norm().unwrap_or(1.0);
        let mut worst = 0.0_f64;
        let samples = 400usize;
        for i in 0..=samples {
            let t = -r + 2.0 * r * i as f64 / samples as f64;
            let x: Vec<f64> = match n {
                1 => vec![t],
                _ => vec![t, 0.37 * t],
            };
            let a = u.evaluate(&x)?;
            let c2 = b.evaluate(&x)?;
            if a.is_finite() && c2.is_finite() {
                worst = worst.max((a - c2).abs());
            }
        }
        println!(
            "biconjugate sup deviation on probe: {}",
            output::fmt_value(worst)
        );
    }
    Ok(0)
}
