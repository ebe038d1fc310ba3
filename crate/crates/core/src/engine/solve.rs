//! The iteration v₀ = f + I^α g, v_{n+1} = I^α(M v_n + Σ H_n).

use super::closed_form::{detect_closed_form, ClosedForm};
use super::he::{he_polynomial, DerivativeCache, HePolynomialTable};
use super::problem::ProblemSpec;
use super::EngineError;
use crate::series_algebra::FracSeries;
use crate::spatial_expr::sample_points;
use crate::special_functions::FracOrder;

pub const DEFAULT_TERMS: usize = 10;

const NORM_POINTS: usize = 8;
const NORM_SEED: u64 = 0x6e6f726d;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub order: usize,
    /// `step_norms[c][n]`: largest |coefficient| of v_{c,n} over a fixed
    /// set of sample points.
    pub step_norms: Vec<Vec<f64>>,
    pub closed_forms: Vec<Option<ClosedForm>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBundle {
    pub alpha: FracOrder,
    pub components: Vec<String>,
    /// Partial sums Σ_{n ≤ N} v_n, truncated at t^(Nα).
    pub series: Vec<FracSeries>,
    /// `iterates[c][n]` is v_{c,n}.
    pub iterates: Vec<Vec<FracSeries>>,
    pub he: HePolynomialTable,
    pub diagnostics: Diagnostics,
}

impl SolutionBundle {
    pub fn order(&self) -> usize {
        self.diagnostics.order
    }

    pub fn component(&self, name: &str) -> Option<&FracSeries> {
        let i = self.components.iter().position(|c| c == name)?;
        Some(&self.series[i])
    }
}

fn step_norm(v: &FracSeries, points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|p| v.coeff_values(p))
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Runs N steps of the recursion for all components in lockstep.
pub fn iterate(spec: &ProblemSpec, terms: usize) -> Result<SolutionBundle, EngineError> {
    if terms == 0 {
        return Err(EngineError::InvalidOrder(terms));
    }
    let alpha = spec.alpha();
    let dim = spec.dim();
    let nc = spec.components().len();

    let mut iterates: Vec<Vec<FracSeries>> = (0..nc)
        .map(|c| {
            let ic = FracSeries::constant_in_time(alpha, spec.initial(c).clone());
            let g = ic.add(&spec.source(c).frac_integral())?;
            Ok(vec![g.truncate(terms)])
        })
        .collect::<Result<_, EngineError>>()?;

    let mut he = HePolynomialTable::new(nc, spec.equations().iter().map(|e| e.nonlinear.len()));
    let mut cache = DerivativeCache::new();

    for n in 0..terms {
        let mut next = Vec::with_capacity(nc);
        for c in 0..nc {
            let eq = spec.equation(c);
            let mut rhs = FracSeries::zero(alpha, dim);
            let mut lookup = |field: super::FieldRef, i: usize| {
                cache.get_or_insert(field, i, || {
                    iterates[field.component]
                        .get(i)
                        .map(|v| v.partial(field.deriv))
                        .ok_or(EngineError::MissingIterate {
                            component: field.component,
                            index: i,
                        })
                })
            };
            for l in &eq.linear {
                rhs = rhs.add(&lookup(l.field, n)?.scale(l.coeff))?;
            }
            for (ti, term) in eq.nonlinear.iter().enumerate() {
                let h = he_polynomial(term, n, &mut lookup)?.truncate(terms);
                rhs = rhs.add(&h)?;
                he.push(c, ti, h);
            }
            next.push(rhs.frac_integral().truncate(terms));
        }
        for (c, v) in next.into_iter().enumerate() {
            iterates[c].push(v);
        }
    }

    let series = iterates
        .iter()
        .map(|its| {
            its.iter()
                .try_fold(FracSeries::zero(alpha, dim), |acc, v| acc.add(v))
                .map(|s| s.truncate(terms))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let points = sample_points(dim, NORM_POINTS, NORM_SEED);
    let step_norms = iterates
        .iter()
        .map(|its| its.iter().map(|v| step_norm(v, &points)).collect())
        .collect();
    let closed_forms = series.iter().map(detect_closed_form).collect();

    Ok(SolutionBundle {
        alpha,
        components: spec.components().to_vec(),
        series,
        iterates,
        he,
        diagnostics: Diagnostics {
            order: terms,
            step_norms,
            closed_forms,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::parse::parse_equation;
    use crate::spatial_expr::{sample_eq, SpatialExpr};
    use crate::special_functions::gamma;

    fn spec(alpha: f64, names: &[&str], eqs: &[&str], ics: &[&str]) -> ProblemSpec {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let eqs = eqs
            .iter()
            .map(|e| parse_equation(e, &names).unwrap())
            .collect();
        let ics = ics
            .iter()
            .enumerate()
            .map(|(i, e)| (i, SpatialExpr::parse(e).unwrap()))
            .collect();
        ProblemSpec::new(alpha, names, eqs, ics).unwrap()
    }

    #[test]
    fn first_coefficient_is_initial_condition() {
        let p = spec(0.5, &["v"], &["Dt^a v = v_xx + 2"], &["sin(x)"]);
        let sol = iterate(&p, 4).unwrap();
        assert_eq!(sol.series[0].coeff(0), *p.initial(0));
    }

    #[test]
    fn eigen_problem_gives_mittag_leffler_coefficients() {
        let a = 0.7;
        let p = spec(a, &["v"], &["Dt^a v = -2*v"], &["cos(x)"]);
        let sol = iterate(&p, 8).unwrap();
        let cos = SpatialExpr::parse("cos(x)").unwrap();
        for k in 0..=8 {
            let g = gamma(k as f64 * a + 1.0).unwrap();
            let want = cos.scale((-2.0f64).powi(k as i32) / g);
            assert!(sample_eq(&sol.series[0].coeff(k), &want, 1e-13), "k = {k}");
        }
        let cf = sol.diagnostics.closed_forms[0].as_ref().unwrap();
        assert!((cf.lambda + 2.0).abs() < 1e-12);
    }

    #[test]
    fn burgers_first_steps() {
        let p = spec(
            0.5,
            &["v", "w"],
            &[
                "Dt^a v = v_xx + 2*v*v_x - (v*w)_x",
                "Dt^a w = w_xx + 2*w*w_x - (v*w)_x",
            ],
            &["sin(x)", "sin(x)"],
        );
        let sol = iterate(&p, 3).unwrap();
        let s = SpatialExpr::parse("sin(x)").unwrap();
        let v1 = sol.iterates[0][1].coeff(1);
        assert_eq!(v1, s.scale(-1.0 / gamma(1.5).unwrap()));
        let v2 = sol.iterates[0][2].coeff(2);
        assert!(sample_eq(&v2, &s.scale(1.0 / gamma(2.0).unwrap()), 1e-14));
        assert_eq!(sol.iterates[0], sol.iterates[1]);
    }

    #[test]
    fn source_enters_first_iterate() {
        // Dt^a v = 1, v(0) = 0 → v = t^α/Γ(α+1)
        let p = spec(0.4, &["v"], &["Dt^a v = 1"], &["0"]);
        let sol = iterate(&p, 3).unwrap();
        let c = sol.series[0].coeff(1).constant_value().unwrap();
        assert!((c - 1.0 / gamma(1.4).unwrap()).abs() < 1e-15);
        assert!(sol.series[0].coeff(2).is_zero());
    }

    #[test]
    fn zero_terms_rejected() {
        let p = spec(0.5, &["v"], &["Dt^a v = v_xx"], &["sin(x)"]);
        assert!(matches!(iterate(&p, 0), Err(EngineError::InvalidOrder(0))));
    }
}
