//! Composite Gauss-Legendre quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n starting from the Chebyshev-like guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_a^b f using this rule once.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

pub(crate) fn gl10() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(10))
}

pub(crate) fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Integral value with an error estimate from the 10- vs 20-point rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
}

/// Panel layout on [0, end]: `uniform` equal panels on [h, end] plus
/// `graded` geometric panels on [h·2^-graded, h] that resolve
/// integrable power singularities at the origin. The sliver below
/// h·2^-graded is dropped.
pub(crate) fn panels(end: f64, uniform: usize, graded: usize) -> Vec<(f64, f64)> {
    let h = end / uniform as f64;
    let mut out = Vec::with_capacity(uniform + graded);
    let mut hi = h;
    for _ in 0..graded {
        let lo = 0.5 * hi;
        out.push((lo, hi));
        hi = lo;
    }
    out.reverse();
    for i in 0..uniform {
        let a = h * i as f64;
        let b = if i + 1 == uniform {
            end
        } else {
            h * (i + 1) as f64
        };
        out.push((a.max(h), b));
    }
    out.retain(|(a, b)| b > a);
    out
}

/// Composite Gauss-Legendre over the given panels. The first error returned
/// by `f` at any node aborts the sum.
pub(crate) fn composite<E>(
    panels: &[(f64, f64)],
    mut f: impl FnMut(f64) -> Result<f64, E>,
) -> Result<Quadrature, E> {
    let fine = gl20();
    let coarse = gl10();
    let mut value = 0.0;
    let mut err = 0.0;
    let mut failure = None;
    for &(a, b) in panels {
        let mut eval = |t: f64| match f(t) {
            Ok(v) => v,
            Err(e) => {
                if failure.is_none() {
                    failure = Some(e);
                }
                0.0
            }
        };
        let q20 = fine.integrate(a, b, &mut eval);
        let q10 = coarse.integrate(a, b, &mut eval);
        value += q20;
        err += (q20 - q10).abs();
        if let Some(e) = failure.take() {
            return Err(e);
        }
    }
    Ok(Quadrature {
        value,
        error_estimate: err,
    })
}
