//! Gamma function, power-rule Gamma ratios and the one-parameter
//! Mittag-Leffler function.
//!
//! Everything here is a pure function of its arguments. The Gamma function
//! uses a Lanczos approximation (g = 10.900511, 11 coefficients, after
//! Pugh 2004) with the reflection formula below 1/2.

use std::f64::consts::{E, PI};

use num_rational::Ratio;
use thiserror::Error;

const LANCZOS_G: f64 = 10.900511;

const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];

const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_717_336_249_247_266_663_112_059_421_8;
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_222_345_518_445_781_647_212_251_852_7;
const LN_PI: f64 = 1.144_729_885_849_400_174_143_427_351_353_058_711_647_294_8;

/// Above this argument Γ overflows an f64.
const GAMMA_OVERFLOW: f64 = 171.624_376_956_302_7;

/// Default bound on |z| for the Mittag-Leffler series.
pub const ML_DEFAULT_Z_MAX: f64 = 20.0;
/// Hard cap on the number of Mittag-Leffler series terms.
pub const ML_MAX_TERMS: usize = 400;
/// Relative stopping tolerance for the Mittag-Leffler series.
pub const ML_STOP_TOL: f64 = 1e-16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialFnError {
    #[error("gamma has a pole at {0}")]
    Pole(f64),
    #[error("gamma({0}) overflows f64")]
    Overflow(f64),
    #[error("non-finite argument {0}")]
    NonFinite(f64),
    #[error("fractional order must satisfy {bound}, got {value}")]
    InvalidOrder { value: f64, bound: &'static str },
    #[error("|z| = {z_abs} exceeds the series domain bound {z_max}")]
    Domain { z_abs: f64, z_max: f64 },
}

/// A fractional order α.
///
/// [`FracOrder::new`] enforces the solver range 0 < α ≤ 1;
/// [`FracOrder::positive`] accepts any finite α > 0 for the transform layer
/// and the Mittag-Leffler function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub const ONE: FracOrder = FracOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self, SpecialFnError> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(FracOrder(alpha))
        } else {
            Err(SpecialFnError::InvalidOrder {
                value: alpha,
                bound: "0 < alpha <= 1",
            })
        }
    }

    pub fn positive(alpha: f64) -> Result<Self, SpecialFnError> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(FracOrder(alpha))
        } else {
            Err(SpecialFnError::InvalidOrder {
                value: alpha,
                bound: "alpha > 0",
            })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn in_solver_range(self) -> bool {
        self.0 <= 1.0
    }

    /// Smallest rational within f64 resolution of α (0.3 becomes 3/10).
    pub fn as_ratio(self) -> Ratio<i64> {
        Ratio::approximate_float(self.0)
            .unwrap_or_else(|| Ratio::new((self.0 * 1e12) as i64, 1_000_000_000_000))
    }

    /// Number of integer derivatives folded into a Caputo derivative of this
    /// order, i.e. ⌈α⌉.
    pub fn ceil(self) -> usize {
        self.0.ceil() as usize
    }
}

impl std::fmt::Display for FracOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn lanczos_sum(shift: impl Fn(f64) -> f64) -> f64 {
    LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |s, (i, &dk)| s + dk / shift(i as f64))
}

/// Γ(x) for finite x outside {0, −1, −2, …}.
pub fn gamma(x: f64) -> Result<f64, SpecialFnError> {
    if !x.is_finite() {
        return Err(SpecialFnError::NonFinite(x));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(SpecialFnError::Pole(x));
    }
    if x > GAMMA_OVERFLOW {
        return Err(SpecialFnError::Overflow(x));
    }
    if x == x.floor() && x <= 171.0 {
        // exact factorials for integer arguments
        return Ok((2..x as u32).fold(1.0, |acc, k| acc * k as f64));
    }
    if x < 0.5 {
        let s = lanczos_sum(|i| i - x);
        let value = PI
            / ((PI * x).sin() * s * TWO_SQRT_E_OVER_PI * ((0.5 - x + LANCZOS_G) / E).powf(0.5 - x));
        return if value.is_finite() {
            Ok(value)
        } else {
            Err(SpecialFnError::Overflow(x))
        };
    }
    if x > 140.0 {
        // the power term alone overflows before the product does
        return Ok(ln_gamma(x).exp());
    }
    let s = lanczos_sum(|i| x + i - 1.0);
    Ok(s * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_G) / E).powf(x - 0.5))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = lanczos_sum(|i| i - x);
        LN_PI
            - (PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + LANCZOS_G) / E).ln()
    } else {
        let s = lanczos_sum(|i| x + i - 1.0);
        s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_G) / E).ln()
    }
}

/// Power-rule coefficient Γ(β+1)/Γ(β+α+1), so that I^α t^β equals
/// `gamma_ratio(β, α)` · t^(β+α).
///
/// Evaluated as a quotient while both Gammas are comfortably representable
/// and in log space beyond that.
pub fn gamma_ratio(beta: f64, alpha: FracOrder) -> f64 {
    debug_assert!(beta >= 0.0, "gamma_ratio needs beta >= 0, got {beta}");
    let a = alpha.value();
    if beta + a + 1.0 < 100.0 {
        if let (Ok(num), Ok(den)) = (gamma(beta + 1.0), gamma(beta + a + 1.0)) {
            return num / den;
        }
    }
    (ln_gamma(beta + 1.0) - ln_gamma(beta + a + 1.0)).exp()
}

/// Result of a Mittag-Leffler evaluation with its summation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MittagLeffler {
    pub value: f64,
    pub terms: usize,
    /// The term cap was hit before the stopping rule fired.
    pub capped: bool,
    /// Largest |term| seen; `largest_term · ε` bounds the cancellation error.
    pub largest_term: f64,
}

impl MittagLeffler {
    /// Rough absolute error bound from cancellation among large terms.
    pub fn cancellation_bound(&self) -> f64 {
        self.largest_term * f64::EPSILON * self.terms.max(1) as f64
    }
}

/// E_α(z) = Σ z^k / Γ(αk + 1) for |z| ≤ [`ML_DEFAULT_Z_MAX`].
pub fn mittag_leffler(alpha: FracOrder, z: f64) -> Result<f64, SpecialFnError> {
    mittag_leffler_with(alpha, z, ML_DEFAULT_Z_MAX).map(|m| m.value)
}

/// Direct series for E_α(z) with Kahan-compensated summation.
///
/// Successive terms use t_{k+1} = t_k · z · Γ(αk+1)/Γ(α(k+1)+1). Summation
/// stops once |t_k| < 1e-16·|partial sum| or after [`ML_MAX_TERMS`] terms.
pub fn mittag_leffler_with(
    alpha: FracOrder,
    z: f64,
    z_max: f64,
) -> Result<MittagLeffler, SpecialFnError> {
    if !z.is_finite() {
        return Err(SpecialFnError::NonFinite(z));
    }
    if z.abs() > z_max {
        return Err(SpecialFnError::Domain {
            z_abs: z.abs(),
            z_max,
        });
    }
    if z == 0.0 {
        return Ok(MittagLeffler {
            value: 1.0,
            terms: 1,
            capped: false,
            largest_term: 1.0,
        });
    }
    let a = alpha.value();
    let mut sum = 1.0_f64;
    let mut comp = 0.0_f64;
    let mut term = 1.0_f64;
    let mut largest = 1.0_f64;
    for k in 0..ML_MAX_TERMS - 1 {
        term *= z * gamma_ratio(a * k as f64, alpha);
        if !term.is_finite() {
            return Ok(MittagLeffler {
                value: f64::NAN,
                terms: k + 1,
                capped: true,
                largest_term: f64::INFINITY,
            });
        }
        largest = largest.max(term.abs());
        if term.abs() < ML_STOP_TOL * sum.abs() {
            return Ok(MittagLeffler {
                value: sum,
                terms: k + 1,
                capped: false,
                largest_term: largest,
            });
        }
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(MittagLeffler {
        value: sum,
        terms: ML_MAX_TERMS,
        capped: true,
        largest_term: largest,
    })
}
