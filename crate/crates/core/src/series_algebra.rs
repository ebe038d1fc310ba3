//! Fractional power series v(x, t) = Σ a_k(x)·t^(kα) with symbolic profiles.
//!
//! Coefficients are the raw multipliers of t^(kα); Gamma factors show up
//! only in the integral and derivative maps, so products are plain Cauchy
//! convolutions.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::natural_transform::{Atom, TransformImage};
use crate::spatial_expr::{CombineOp, MultiIndex, SpatialExpr};
use crate::special_functions::{gamma, gamma_ratio, FracOrder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("fractional orders differ: {left} vs {right}")]
    AlphaMismatch { left: f64, right: f64 },
    #[error("time exponent {exponent} is not a multiple of alpha = {alpha}")]
    OffLattice { exponent: f64, alpha: f64 },
    #[error("requested {up_to} terms but the series has order {order}")]
    UpToExceedsOrder { up_to: usize, order: usize },
    #[error("series can only be evaluated for t >= 0, got {0}")]
    NegativeTime(f64),
    #[error("coefficient {0} depends on space; only constant profiles have a transform image")]
    NonConstantProfile(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FracSeries {
    alpha: FracOrder,
    dim: usize,
    coeffs: Vec<SpatialExpr>,
    order: usize,
}

impl FracSeries {
    /// Series of nominal order `coeffs.len() - 1` (0 for an empty list).
    pub fn new(alpha: FracOrder, dim: usize, coeffs: Vec<SpatialExpr>) -> Self {
        let order = coeffs.len().saturating_sub(1);
        Self::with_order(alpha, dim, coeffs, order)
    }

    pub fn with_order(
        alpha: FracOrder,
        dim: usize,
        coeffs: Vec<SpatialExpr>,
        order: usize,
    ) -> Self {
        let dim = coeffs.iter().map(SpatialExpr::dim).fold(dim, usize::max);
        let mut coeffs: Vec<_> = coeffs
            .into_iter()
            .take(order + 1)
            .map(|c| c.embed(dim))
            .collect();
        while coeffs.last().is_some_and(SpatialExpr::is_zero) {
            coeffs.pop();
        }
        FracSeries {
            alpha,
            dim,
            coeffs,
            order,
        }
    }

    pub fn zero(alpha: FracOrder, dim: usize) -> Self {
        Self::with_order(alpha, dim, vec![], 0)
    }

    /// The time-independent series a₀.
    pub fn constant_in_time(alpha: FracOrder, a0: SpatialExpr) -> Self {
        let dim = a0.dim();
        Self::new(alpha, dim, vec![a0])
    }

    /// Builds Σ profile·t^exponent, rejecting exponents off the lattice kα.
    pub fn from_time_powers(
        alpha: FracOrder,
        dim: usize,
        terms: impl IntoIterator<Item = (f64, SpatialExpr)>,
    ) -> Result<Self, SeriesError> {
        let a = alpha.as_ratio();
        let mut coeffs: Vec<SpatialExpr> = Vec::new();
        for (exponent, profile) in terms {
            let e = Ratio::approximate_float(exponent).ok_or(SeriesError::OffLattice {
                exponent,
                alpha: alpha.value(),
            })?;
            let k = e / a;
            if !k.is_integer() || *k.numer() < 0 {
                return Err(SeriesError::OffLattice {
                    exponent,
                    alpha: alpha.value(),
                });
            }
            let k = k.to_integer() as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, SpatialExpr::zero(dim));
            }
            coeffs[k] = coeffs[k].add(&profile);
        }
        Ok(Self::new(alpha, dim, coeffs))
    }

    /// Order-N truncation of φ(x)·E_α(λt^α): a_k = λ^k/Γ(kα+1)·φ.
    pub fn mittag_leffler(
        alpha: FracOrder,
        lambda: f64,
        profile: &SpatialExpr,
        order: usize,
    ) -> Self {
        let coeffs = (0..=order)
            .map(|k| {
                let g = gamma(k as f64 * alpha.value() + 1.0).expect("positive argument");
                profile.scale(lambda.powi(k as i32) / g)
            })
            .collect();
        Self::with_order(alpha, profile.dim(), coeffs, order)
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nominal truncation order N.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Stored coefficients; trailing zeros are trimmed, so this may be
    /// shorter than N + 1.
    pub fn coeffs(&self) -> &[SpatialExpr] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> SpatialExpr {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| SpatialExpr::zero(self.dim))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_alpha(&self, other: &FracSeries) -> Result<(), SeriesError> {
        if self.alpha != other.alpha {
            return Err(SeriesError::AlphaMismatch {
                left: self.alpha.value(),
                right: other.alpha.value(),
            });
        }
        Ok(())
    }

    fn map_coeffs(
        &self,
        order: usize,
        f: impl Fn(usize, &SpatialExpr) -> Option<(usize, SpatialExpr)>,
    ) -> Self {
        let mut out = vec![SpatialExpr::zero(self.dim); order + 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            if let Some((j, c)) = f(k, a) {
                if j <= order {
                    out[j] = c;
                }
            }
        }
        Self::with_order(self.alpha, self.dim, out, order)
    }

    /// I^α: a_k t^(kα) ↦ a_k·Γ(kα+1)/Γ((k+1)α+1)·t^((k+1)α).
    pub fn frac_integral(&self) -> Self {
        let a = self.alpha;
        self.map_coeffs(self.order + 1, |k, c| {
            Some((k + 1, c.scale(gamma_ratio(k as f64 * a.value(), a))))
        })
    }

    /// Term-wise Caputo derivative; a₀ is annihilated.
    pub fn caputo_derivative(&self) -> Self {
        let a = self.alpha;
        self.map_coeffs(self.order.saturating_sub(1), |k, c| {
            (k > 0).then(|| {
                (
                    k - 1,
                    c.scale(1.0 / gamma_ratio((k - 1) as f64 * a.value(), a)),
                )
            })
        })
    }

    /// Full Cauchy product of order N_v + N_w.
    pub fn product(&self, other: &FracSeries) -> Result<Self, SeriesError> {
        self.check_alpha(other)?;
        let dim = self.dim.max(other.dim);
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1);
        let mut out = vec![SpatialExpr::zero(dim); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let p = SpatialExpr::combine(CombineOp::Mul, &[a, b]);
                out[i + j] = out[i + j].add(&p);
            }
        }
        Ok(Self::with_order(
            self.alpha,
            dim,
            out,
            self.order + other.order,
        ))
    }

    pub fn add(&self, other: &FracSeries) -> Result<Self, SeriesError> {
        self.check_alpha(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.coeff(k).add(&other.coeff(k)))
            .collect();
        Ok(Self::with_order(
            self.alpha,
            self.dim.max(other.dim),
            coeffs,
            self.order.max(other.order),
        ))
    }

    pub fn scale(&self, c: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.scale(c)).collect();
        Self::with_order(self.alpha, self.dim, coeffs, self.order)
    }

    pub fn sub(&self, other: &FracSeries) -> Result<Self, SeriesError> {
        self.add(&other.scale(-1.0))
    }

    pub fn spatial_derivative(&self, var: usize, order: u32) -> Self {
        assert!(
            var < self.dim,
            "variable {var} outside dimension {}",
            self.dim
        );
        let coeffs = self.coeffs.iter().map(|a| a.diff(var, order)).collect();
        Self::with_order(self.alpha, self.dim, coeffs, self.order)
    }

    pub fn partial(&self, index: MultiIndex) -> Self {
        if index.is_none() {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().map(|a| a.partial(index)).collect();
        Self::with_order(self.alpha, self.dim, coeffs, self.order)
    }

    /// Keeps terms up to t^(Nα).
    pub fn truncate(&self, order: usize) -> Self {
        Self::with_order(self.alpha, self.dim, self.coeffs.clone(), order)
    }

    /// Partial sum Σ_{k ≤ up_to} a_k(point)·t^(kα).
    pub fn eval(&self, point: &[f64], t: f64, up_to: usize) -> Result<f64, SeriesError> {
        if up_to > self.order {
            return Err(SeriesError::UpToExceedsOrder {
                up_to,
                order: self.order,
            });
        }
        if t < 0.0 || t.is_nan() {
            return Err(SeriesError::NegativeTime(t));
        }
        Ok(self
            .coeffs
            .iter()
            .take(up_to + 1)
            .enumerate()
            .map(|(k, a)| a.eval(point) * time_power(t, k, self.alpha))
            .sum())
    }

    /// Coefficient values a_k(point) for k ≤ N, zero-padded.
    pub fn coeff_values(&self, point: &[f64]) -> Vec<f64> {
        (0..=self.order)
            .map(|k| self.coeffs.get(k).map_or(0.0, |a| a.eval(point)))
            .collect()
    }

    /// Image of a spatially constant series: a_k t^(kα) ↦ a_k·Γ(kα+1)·u^(kα)/s^(kα+1).
    pub fn transform_image(&self) -> Result<TransformImage, SeriesError> {
        let a = self.alpha.as_ratio();
        let mut atoms = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let value = c
                .constant_value()
                .ok_or(SeriesError::NonConstantProfile(k))?;
            let beta = a * Ratio::from_integer(k as i64);
            let g = gamma(k as f64 * self.alpha.value() + 1.0).expect("positive argument");
            atoms.push(Atom::new(value * g, beta));
        }
        Ok(TransformImage::from_atoms(atoms))
    }
}

/// t^(kα) with 0^0 = 1.
pub fn time_power(t: f64, k: usize, alpha: FracOrder) -> f64 {
    if k == 0 {
        1.0
    } else if alpha.value() == 1.0 {
        t.powi(k as i32)
    } else {
        t.powf(k as f64 * alpha.value())
    }
}

impl fmt::Display for FracSeries {
    /// `(a0) + (a1)*t^a + (a2)*t^(2*a) + …`; zero coefficients are skipped.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})*t^a")?,
                _ => write!(f, "({a})*t^({k}*a)")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
