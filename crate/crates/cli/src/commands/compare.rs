use std::fs::File;
use std::io::{BufReader, Write};

use fracseries::compare::{compare as compare_grid, pointwise};
use fracseries::engine::{iterate, load_problem, FieldRef, ProblemSpec};
use fracseries::reference_oracle::{l1_solve, L1Config, OracleGrid};
use fracseries::spatial_expr::MultiIndex;

use super::check_terms;
use crate::args::CompareArgs;
use crate::error::CliError;
use crate::output::{csv_line, within, write_file};

/// κ in Dt^a v = κ v_xx, the only form the reference solver handles.
fn diffusivity(spec: &ProblemSpec) -> Result<f64, CliError> {
    let unsupported = || {
        CliError::Config("compare needs a single 1-D equation of the form Dt^a v = k*v_xx".into())
    };
    if spec.components().len() != 1 || spec.dim() != 1 {
        return Err(unsupported());
    }
    let eq = spec.equation(0);
    let vxx = FieldRef::new(0, MultiIndex::along(0, 2));
    if !eq.nonlinear.is_empty() || eq.constant != 0.0 || !spec.source(0).is_zero() {
        return Err(unsupported());
    }
    if eq.linear.is_empty() || eq.linear.iter().any(|l| l.field != vxx) {
        return Err(unsupported());
    }
    Ok(eq.linear.iter().map(|l| l.coeff).sum())
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let terms = check_terms(args.terms)?;
    let spec = load_problem(&args.problem, args.alpha)?;
    let kappa = diffusivity(&spec)?;
    let sol = iterate(&spec, terms)?;
    let series = &sol.series[0];

    let grid = match &args.grid {
        Some(path) => {
            let file = File::open(path).map_err(CliError::io(path))?;
            OracleGrid::read_csv(spec.alpha(), BufReader::new(file)).map_err(|source| {
                CliError::GridCsv {
                    path: path.clone(),
                    source,
                }
            })?
        }
        None => {
            let cfg = L1Config {
                alpha: spec.alpha(),
                diffusivity: kappa,
                domain: (args.x_min, args.x_max),
                n_x: args.n_x,
                n_t: args.n_t,
                t_end: args.t_end,
            };
            // boundary values are taken from the series itself
            let boundary = |x: f64, t: f64| series.eval(&[x], t, terms).unwrap_or(f64::NAN);
            let grid = l1_solve(&cfg, spec.initial(0), boundary)?;
            if let Some(path) = &args.write_grid {
                write_file(path, |w: &mut dyn Write| grid.write_csv(w))?;
            }
            grid
        }
    };

    let report = compare_grid(series, &grid, terms)?;
    println!("terms     {terms}");
    println!("alpha     {}", spec.alpha().value());
    println!(
        "grid      {} x-nodes, {} time levels",
        grid.xs().len(),
        grid.ts().len()
    );
    println!("nodes     {}", report.nodes);
    println!("max abs   {:e}", report.max_abs);
    println!("rms       {:e}", report.rms);
    let step = (report.per_level.len() / 10).max(1);
    for level in report.per_level.iter().step_by(step) {
        println!("  t = {:<9.5} max abs {:e}", level.t, level.max_abs);
    }

    if let Some(out) = &args.out {
        let rows = pointwise(series, &grid, terms)?;
        write_file(out, |w: &mut dyn Write| {
            csv_line(
                w,
                &["x", "t", "series", "oracle", "abs_err"].map(String::from),
            )?;
            rows.iter().try_for_each(|r| {
                csv_line(
                    w,
                    &[r.x, r.t, r.series, r.oracle, r.abs_err()].map(|v| v.to_string()),
                )
            })
        })?;
    }
    if let Some(tol) = args.tol {
        if !within(report.max_abs, tol) {
            return Err(CliError::Breach(format!(
                "max abs error {:e} > {tol:e}",
                report.max_abs
            )));
        }
    }
    Ok(())
}
