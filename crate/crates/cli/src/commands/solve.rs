use std::io::Write;

use fracseries::engine::{iterate, ProblemSpec, ResidualEvaluator, SolutionBundle};

use super::{check_terms, coord_header, load, EvalGrid};
use crate::args::{ResidualArgs, SolveArgs};
use crate::error::CliError;
use crate::output::{csv_line, short, within, write_file};

fn print_summary(spec: &ProblemSpec, sol: &SolutionBundle, label: &str) {
    println!("problem   {label}");
    println!("alpha     {}", spec.alpha().value());
    println!("terms     {}", sol.order());
    for c in 0..spec.components().len() {
        println!("equation  {}", spec.render_equation(c));
    }
    for (c, name) in spec.components().iter().enumerate() {
        println!();
        println!("component {name}");
        match &sol.diagnostics.closed_forms[c] {
            Some(cf) => println!(
                "  closed form: ({})*E_a({}*t^a), lambda = {}",
                cf.profile,
                short(cf.lambda),
                short(cf.lambda)
            ),
            None => println!("  closed form: none detected"),
        }
        println!("  k   coefficient of t^(k*a)");
        for (k, a) in sol.series[c].coeffs().iter().enumerate() {
            println!("  {k:<3} {a}");
        }
        let norms: Vec<String> = sol.diagnostics.step_norms[c]
            .iter()
            .map(|n| format!("{n:.3e}"))
            .collect();
        println!("  step norms: {}", norms.join(" "));
    }
}

pub fn solve(args: &SolveArgs) -> Result<(), CliError> {
    let terms = check_terms(args.problem.terms)?;
    let spec = load(&args.problem)?;
    let grid = EvalGrid::new(&args.grid, spec.dim())?;
    let sol = iterate(&spec, terms)?;
    print_summary(&spec, &sol, &args.problem.problem.display().to_string());

    let Some(out) = &args.out else { return Ok(()) };
    let ev = ResidualEvaluator::new(&spec, &sol, terms)?;
    let mut rows = Vec::new();
    for (c, name) in spec.components().iter().enumerate() {
        for p in &grid.points {
            for &t in &grid.ts {
                let value = sol.series[c]
                    .eval(p, t, terms)
                    .map_err(fracseries::engine::EngineError::from)?;
                let r = ev.eval(p, t)?[c];
                let mut fields = vec![name.clone()];
                fields.extend(p.iter().map(f64::to_string));
                fields.extend([t.to_string(), value.to_string(), r.to_string()]);
                rows.push(fields);
            }
        }
    }
    write_file(out, |w: &mut dyn Write| {
        let mut header = vec!["component".to_string()];
        header.extend(coord_header(spec.dim()));
        header.extend(["t", "value", "residual"].map(String::from));
        csv_line(w, &header)?;
        rows.iter().try_for_each(|r| csv_line(w, r))
    })?;
    eprintln!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

pub fn residual(args: &ResidualArgs) -> Result<(), CliError> {
    let terms = check_terms(args.problem.terms)?;
    let spec = load(&args.problem)?;
    let grid = EvalGrid::new(&args.grid, spec.dim())?;
    let sol = iterate(&spec, terms)?;
    let ev = ResidualEvaluator::new(&spec, &sol, terms)?;

    let nc = spec.components().len();
    let mut worst = vec![(0.0_f64, Vec::new(), 0.0); nc];
    let mut rows = Vec::new();
    for p in &grid.points {
        for &t in &grid.ts {
            for (c, r) in ev.eval(p, t)?.into_iter().enumerate() {
                // a NaN residual is kept as the worst so it trips the tolerance
                if !worst[c].0.is_nan() && !within(r, worst[c].0) {
                    worst[c] = (r, p.clone(), t);
                }
                let mut fields = vec![spec.components()[c].clone()];
                fields.extend(p.iter().map(f64::to_string));
                fields.extend([t.to_string(), r.to_string()]);
                rows.push(fields);
            }
        }
    }
    println!("terms     {terms}");
    for (name, (r, p, t)) in spec.components().iter().zip(&worst) {
        println!("{name}: max |residual| = {r:e} at x = {p:?}, t = {t}");
    }
    if let Some(out) = &args.out {
        write_file(out, |w: &mut dyn Write| {
            let mut header = vec!["component".to_string()];
            header.extend(coord_header(spec.dim()));
            header.extend(["t", "residual"].map(String::from));
            csv_line(w, &header)?;
            rows.iter().try_for_each(|r| csv_line(w, r))
        })?;
    }
    if let Some(tol) = args.tol {
        if let Some((name, (r, _, _))) = spec
            .components()
            .iter()
            .zip(&worst)
            .find(|(_, w)| !within(w.0, tol))
        {
            return Err(CliError::Breach(format!(
                "{name}: max residual {r:e} > {tol:e}"
            )));
        }
    }
    Ok(())
}
