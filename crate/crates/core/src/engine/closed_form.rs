//! Recognizing φ(x)·E_α(λt^α) in a computed series.

use std::fmt;

use crate::series_algebra::FracSeries;
use crate::spatial_expr::{sample_distance, sample_points, SpatialExpr, SAMPLE_POINTS};
use crate::special_functions::gamma;

/// Sampling tolerance for accepting the pattern.
pub const DETECT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub lambda: f64,
    pub profile: SpatialExpr,
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*E_a({}*t^a)", self.profile, self.lambda)
    }
}

/// Fits λ from a₁/a₀ at the sample point where |a₀| is largest, then checks
/// a_k = λ^k/Γ(kα+1)·a₀ for every k ≤ N.
pub fn detect_closed_form(s: &FracSeries) -> Option<ClosedForm> {
    let a0 = s.coeff(0);
    if a0.is_zero() {
        return None;
    }
    let alpha = s.alpha().value();
    let points = sample_points(s.dim(), SAMPLE_POINTS, 0xf17);
    let anchor = points
        .iter()
        .max_by(|p, q| a0.eval(p).abs().total_cmp(&a0.eval(q).abs()))?;
    let base = a0.eval(anchor);
    if base == 0.0 {
        return None;
    }
    let g1 = gamma(alpha + 1.0).ok()?;
    let lambda = if s.order() == 0 {
        0.0
    } else {
        s.coeff(1).eval(anchor) * g1 / base
    };
    for k in 1..=s.order() {
        let g = gamma(k as f64 * alpha + 1.0).ok()?;
        let want = a0.scale(lambda.powi(k as i32) / g);
        if sample_distance(&s.coeff(k), &want) > DETECT_TOL {
            return None;
        }
    }
    Some(ClosedForm {
        lambda,
        profile: a0,
    })
}
