use super::grid::OracleGrid;
use super::{OracleError, MAX_NT, MAX_NX};
use crate::spatial_expr::SpatialExpr;
use crate::special_functions::{gamma, FracOrder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Config {
    pub alpha: FracOrder,
    pub diffusivity: f64,
    pub domain: (f64, f64),
    pub n_x: usize,
    pub n_t: usize,
    pub t_end: f64,
}

/// b_j = (j+1)^(1−α) − j^(1−α) for j < n.
pub fn l1_weights(alpha: FracOrder, n: usize) -> Vec<f64> {
    let e = 1.0 - alpha.value();
    (0..n)
        .map(|j| {
            let j = j as f64;
            (j + 1.0).powf(e) - j.powf(e)
        })
        .collect()
}

fn validate(cfg: &L1Config, ic: &SpatialExpr) -> Result<(), OracleError> {
    let a = cfg.alpha.value();
    if !(a > 0.0 && a < 1.0) {
        return Err(OracleError::Alpha(a));
    }
    if !(3..=MAX_NX).contains(&cfg.n_x) || !(1..=MAX_NT).contains(&cfg.n_t) {
        return Err(OracleError::GridSize {
            n_x: cfg.n_x,
            n_t: cfg.n_t,
        });
    }
    if !(cfg.t_end > 0.0 && cfg.t_end.is_finite()) {
        return Err(OracleError::FinalTime(cfg.t_end));
    }
    let (x0, x1) = cfg.domain;
    if x1.partial_cmp(&x0) != Some(std::cmp::Ordering::Greater) {
        return Err(OracleError::Domain(x0, x1));
    }
    if ic.dim() != 1 {
        return Err(OracleError::Dimension);
    }
    Ok(())
}

/// Thomas algorithm for a constant-coefficient tridiagonal system,
/// overwriting `rhs` with the solution.
fn solve_tridiagonal(
    lower: f64,
    diag: f64,
    upper: f64,
    rhs: &mut [f64],
    scratch: &mut [f64],
    level: usize,
) -> Result<(), OracleError> {
    let n = rhs.len();
    let tiny = f64::EPSILON * (diag.abs() + lower.abs() + upper.abs());
    let mut pivot = diag;
    if pivot.abs() <= tiny {
        return Err(OracleError::SingularSystem { level, row: 0 });
    }
    rhs[0] /= pivot;
    for i in 1..n {
        scratch[i] = upper / pivot;
        pivot = diag - lower * scratch[i];
        if pivot.abs() <= tiny {
            return Err(OracleError::SingularSystem { level, row: i });
        }
        rhs[i] = (rhs[i] - lower * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

/// Implicit L1 time march for D_t^α u = κ u_xx on a uniform grid.
///
/// At level n the scheme solves
/// (c₀ − κδ²) uⁿ = c₀ [Σ_{j=1}^{n−1} (b_{j−1} − b_j) u^{n−j} + b_{n−1} u⁰]
/// with c₀ = Δt^(−α)/Γ(2−α); boundary values come from `boundary(x, t)`.
pub fn l1_solve(
    cfg: &L1Config,
    ic: &SpatialExpr,
    boundary: impl Fn(f64, f64) -> f64,
) -> Result<OracleGrid, OracleError> {
    validate(cfg, ic)?;
    let (x0, x1) = cfg.domain;
    let nx = cfg.n_x;
    let nt = cfg.n_t;
    let h = (x1 - x0) / (nx - 1) as f64;
    let dt = cfg.t_end / nt as f64;
    let xs: Vec<f64> = (0..nx)
        .map(|i| if i == nx - 1 { x1 } else { x0 + h * i as f64 })
        .collect();
    let ts: Vec<f64> = (0..=nt)
        .map(|n| if n == nt { cfg.t_end } else { dt * n as f64 })
        .collect();

    let a = cfg.alpha.value();
    let c0 = dt.powf(-a) / gamma(2.0 - a).expect("2 - alpha in (1, 2)");
    let b = l1_weights(cfg.alpha, nt);
    // history weights: d_j = b_{j−1} − b_j
    let d: Vec<f64> = (1..nt).map(|j| b[j - 1] - b[j]).collect();

    let k = cfg.diffusivity / (h * h);
    let (lower, diag, upper) = (-k, c0 + 2.0 * k, -k);
    let m = nx - 2;

    let mut values: Vec<Vec<f64>> = Vec::with_capacity(nt + 1);
    values.push(xs.iter().map(|&x| ic.eval(&[x])).collect());
    let mut rhs = vec![0.0; m];
    let mut scratch = vec![0.0; m];

    for n in 1..=nt {
        for (i, r) in rhs.iter_mut().enumerate() {
            *r = b[n - 1] * values[0][i + 1];
        }
        for j in 1..n {
            let w = d[j - 1];
            let row = &values[n - j];
            for (i, r) in rhs.iter_mut().enumerate() {
                *r += w * row[i + 1];
            }
        }
        let t = ts[n];
        let (g0, g1) = (boundary(x0, t), boundary(x1, t));
        for r in rhs.iter_mut() {
            *r *= c0;
        }
        rhs[0] += k * g0;
        rhs[m - 1] += k * g1;
        solve_tridiagonal(lower, diag, upper, &mut rhs, &mut scratch, n)?;
        let mut row = Vec::with_capacity(nx);
        row.push(g0);
        row.extend_from_slice(&rhs);
        row.push(g1);
        values.push(row);
    }
    Ok(OracleGrid::new(cfg.alpha, xs, ts, values))
}
