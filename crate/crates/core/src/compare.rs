//! Pointwise comparison of a series solution against an oracle grid.

use thiserror::Error;

use crate::reference_oracle::OracleGrid;
use crate::series_algebra::{time_power, FracSeries, SeriesError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompareError {
    #[error("series alpha {series} differs from grid alpha {grid}")]
    Alpha { series: f64, grid: f64 },
    #[error("grid is 1-D but the series has {0} spatial variables")]
    Domain(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub x: f64,
    pub t: f64,
    pub series: f64,
    pub oracle: f64,
}

impl CompareRow {
    pub fn abs_err(&self) -> f64 {
        (self.series - self.oracle).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelError {
    pub t: f64,
    pub max_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub max_abs: f64,
    pub rms: f64,
    pub nodes: usize,
    pub per_level: Vec<LevelError>,
}

/// Series and oracle values at every grid node with t > 0.
pub fn pointwise(
    series: &FracSeries,
    grid: &OracleGrid,
    up_to: usize,
) -> Result<Vec<CompareRow>, CompareError> {
    if series.alpha() != grid.alpha() {
        return Err(CompareError::Alpha {
            series: series.alpha().value(),
            grid: grid.alpha().value(),
        });
    }
    if series.dim() != 1 {
        return Err(CompareError::Domain(series.dim()));
    }
    if up_to > series.order() {
        return Err(SeriesError::UpToExceedsOrder {
            up_to,
            order: series.order(),
        }
        .into());
    }
    let coeffs: Vec<Vec<f64>> = grid
        .xs()
        .iter()
        .map(|&x| series.coeff_values(&[x])[..=up_to].to_vec())
        .collect();
    let mut rows = Vec::with_capacity(grid.xs().len() * grid.ts().len());
    for (&t, values) in grid.ts().iter().zip(grid.values()) {
        if t <= 0.0 {
            continue;
        }
        let powers: Vec<f64> = (0..=up_to)
            .map(|k| time_power(t, k, series.alpha()))
            .collect();
        for ((&x, &oracle), a) in grid.xs().iter().zip(values).zip(&coeffs) {
            let s = a.iter().zip(&powers).map(|(c, p)| c * p).sum();
            rows.push(CompareRow {
                x,
                t,
                series: s,
                oracle,
            });
        }
    }
    Ok(rows)
}

/// Max-abs, RMS and per-level errors over all grid nodes with t > 0.
pub fn compare(
    series: &FracSeries,
    grid: &OracleGrid,
    up_to: usize,
) -> Result<ErrorReport, CompareError> {
    let rows = pointwise(series, grid, up_to)?;
    let mut per_level: Vec<LevelError> = Vec::new();
    let mut sum_sq = 0.0;
    for r in &rows {
        let e = r.abs_err();
        sum_sq += e * e;
        match per_level.last_mut() {
            Some(l) if l.t == r.t => l.max_abs = l.max_abs.max(e),
            _ => per_level.push(LevelError { t: r.t, max_abs: e }),
        }
    }
    let nodes = rows.len();
    Ok(ErrorReport {
        max_abs: per_level.iter().map(|l| l.max_abs).fold(0.0, f64::max),
        rms: if nodes == 0 {
            0.0
        } else {
            (sum_sq / nodes as f64).sqrt()
        },
        nodes,
        per_level,
    })
}
