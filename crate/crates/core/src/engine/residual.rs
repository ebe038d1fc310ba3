//! Substituting a truncated series back into its equation.
//!
//! The Caputo derivative and spatial derivatives act on the series; the
//! resulting factors are then evaluated and multiplied as numbers, which
//! equals evaluating the full Cauchy product.

use std::collections::HashMap;

use super::problem::{FieldRef, ProblemSpec};
use super::solve::SolutionBundle;
use super::EngineError;
use crate::series_algebra::FracSeries;

/// Precomputed derivative series for repeated residual evaluation.
#[derive(Debug, Clone)]
pub struct ResidualEvaluator<'a> {
    spec: &'a ProblemSpec,
    caputo: Vec<FracSeries>,
    fields: HashMap<FieldRef, FracSeries>,
}

impl<'a> ResidualEvaluator<'a> {
    pub fn new(
        spec: &'a ProblemSpec,
        sol: &SolutionBundle,
        up_to: usize,
    ) -> Result<Self, EngineError> {
        if sol.series.len() != spec.components().len() {
            return Err(EngineError::Mismatch);
        }
        if up_to > sol.order() {
            return Err(EngineError::UpTo {
                up_to,
                order: sol.order(),
            });
        }
        let partial: Vec<FracSeries> = sol.series.iter().map(|s| s.truncate(up_to)).collect();
        let caputo = partial.iter().map(FracSeries::caputo_derivative).collect();
        let fields = spec
            .equations()
            .iter()
            .flat_map(|e| e.fields())
            .map(|f| (f, partial[f.component].partial(f.deriv)))
            .collect();
        Ok(ResidualEvaluator {
            spec,
            caputo,
            fields,
        })
    }

    /// Signed residual D_t^α u − RHS(u) for each component.
    pub fn signed(&self, point: &[f64], t: f64) -> Result<Vec<f64>, EngineError> {
        let value = |s: &FracSeries| s.eval(point, t, s.order());
        let mut out = Vec::with_capacity(self.caputo.len());
        for (c, eq) in self.spec.equations().iter().enumerate() {
            let src = self.spec.source(c);
            let mut rhs = value(src)?;
            for l in &eq.linear {
                rhs += l.coeff * value(&self.fields[&l.field])?;
            }
            for m in &eq.nonlinear {
                let mut prod = m.coeff;
                for f in &m.factors {
                    prod *= value(&self.fields[f])?;
                }
                rhs += prod;
            }
            out.push(value(&self.caputo[c])? - rhs);
        }
        Ok(out)
    }

    /// |D_t^α u − RHS(u)| for each component.
    pub fn eval(&self, point: &[f64], t: f64) -> Result<Vec<f64>, EngineError> {
        Ok(self.signed(point, t)?.into_iter().map(f64::abs).collect())
    }
}

/// Per-component residual of the order-`up_to` partial sum at (point, t).
pub fn residual(
    spec: &ProblemSpec,
    sol: &SolutionBundle,
    point: &[f64],
    t: f64,
    up_to: usize,
) -> Result<Vec<f64>, EngineError> {
    ResidualEvaluator::new(spec, sol, up_to)?.eval(point, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::parse::parse_equation;
    use crate::engine::solve::iterate;
    use crate::spatial_expr::SpatialExpr;

    fn heat(alpha: f64, ic: &str) -> ProblemSpec {
        let names = vec!["v".to_string()];
        let eq = parse_equation("Dt^a v = v_xx", &names).unwrap();
        let ic = SpatialExpr::parse(ic).unwrap();
        ProblemSpec::new(alpha, names, vec![eq], vec![(0, ic)]).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_residual() {
        let p = heat(0.5, "0");
        let sol = iterate(&p, 5).unwrap();
        assert_eq!(residual(&p, &sol, &[0.7], 0.4, 5).unwrap(), vec![0.0]);
    }

    #[test]
    fn heat_residual_is_small_and_shrinks() {
        let p = heat(0.5, "sin(x)");
        let sol = iterate(&p, 14).unwrap();
        let r12 = residual(&p, &sol, &[1.0], 0.3, 12).unwrap()[0];
        assert!(r12 <= 1e-6, "{r12}");
        let mut last = f64::INFINITY;
        for n in 4..=14 {
            let r = residual(&p, &sol, &[1.0], 0.3, n).unwrap()[0];
            assert!(r <= last, "n = {n}: {r} > {last}");
            last = r;
        }
    }

    #[test]
    fn up_to_beyond_order_rejected() {
        let p = heat(0.5, "sin(x)");
        let sol = iterate(&p, 3).unwrap();
        assert!(matches!(
            residual(&p, &sol, &[1.0], 0.3, 4),
            Err(EngineError::UpTo { .. })
        ));
    }
}
