mod compare;
mod ml;
mod solve;
mod transform;

pub use compare::compare;
pub use ml::ml_eval;
pub use solve::{residual, solve};
pub use transform::transform_check;

use fracseries::engine::{load_problem, ProblemSpec};

use crate::args::{GridArgs, ProblemArgs};
use crate::error::CliError;

fn linspace(name: &str, min: f64, max: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if count < 2 {
        return Err(CliError::Config(format!(
            "{name} count must be at least 2, got {count}"
        )));
    }
    if !(min.is_finite() && max.is_finite() && max > min) {
        return Err(CliError::Config(format!(
            "{name} range [{min}, {max}] is empty"
        )));
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect())
}

fn check_terms(terms: usize) -> Result<usize, CliError> {
    if terms == 0 {
        return Err(CliError::Config("--terms must be at least 1".into()));
    }
    Ok(terms)
}

fn load(args: &ProblemArgs) -> Result<ProblemSpec, CliError> {
    Ok(load_problem(&args.problem, args.alpha)?)
}

/// Spatial points (row-major over x, y, z) and time levels.
struct EvalGrid {
    points: Vec<Vec<f64>>,
    ts: Vec<f64>,
}

impl EvalGrid {
    fn new(args: &GridArgs, dim: usize) -> Result<Self, CliError> {
        let axis = linspace("x", args.x_min, args.x_max, args.x_count)?;
        if args.t_min < 0.0 {
            return Err(CliError::Config(format!(
                "t range must start at 0 or later, got {}",
                args.t_min
            )));
        }
        let ts = linspace("t", args.t_min, args.t_max, args.t_count)?;
        let mut points = vec![Vec::new()];
        for _ in 0..dim {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        Ok(EvalGrid { points, ts })
    }
}

fn coord_header(dim: usize) -> impl Iterator<Item = String> {
    ["x", "y", "z"].into_iter().take(dim).map(String::from)
}
