//! He's polynomials for multilinear monomials.
//!
//! For F = Π_j D^{d_j} u_{c_j}, substituting u_c = Σ p^i v_{c,i} and
//! collecting p^n gives
//! H_n = Σ_{i₁+…+i_r = n} Π_j D^{d_j} v_{c_j, i_j}.

use std::collections::HashMap;

use super::problem::{FieldRef, NonlinearTerm};
use super::EngineError;
use crate::series_algebra::FracSeries;
use crate::spatial_expr::SpatialExpr;

/// The ring operations He polynomials need.
pub trait HeAlgebra: Clone {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
}

impl HeAlgebra for SpatialExpr {
    fn add(&self, other: &Self) -> Self {
        SpatialExpr::add(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        SpatialExpr::mul(self, other)
    }

    fn scale(&self, c: f64) -> Self {
        SpatialExpr::scale(self, c)
    }
}

impl HeAlgebra for FracSeries {
    fn add(&self, other: &Self) -> Self {
        FracSeries::add(self, other).expect("iterates share alpha")
    }

    fn mul(&self, other: &Self) -> Self {
        self.product(other).expect("iterates share alpha")
    }

    fn scale(&self, c: f64) -> Self {
        FracSeries::scale(self, c)
    }
}

/// All r-tuples of nonnegative integers summing to n, in lexicographic order.
pub fn compositions(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, r: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if r == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=n {
            prefix.push(i);
            rec(n - i, r - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if r > 0 {
        rec(n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// H_n of `term` (coefficient included), reading iterate `i` of a field
/// through `lookup`. Only iterates of index ≤ n are ever requested.
pub fn he_polynomial<T: HeAlgebra>(
    term: &NonlinearTerm,
    n: usize,
    mut lookup: impl FnMut(FieldRef, usize) -> Result<T, EngineError>,
) -> Result<T, EngineError> {
    let mut acc: Option<T> = None;
    for comp in compositions(n, term.degree()) {
        let mut prod: Option<T> = None;
        for (field, &i) in term.factors.iter().zip(&comp) {
            let v = lookup(*field, i)?;
            prod = Some(match prod {
                None => v,
                Some(p) => p.mul(&v),
            });
        }
        let Some(prod) = prod else { continue };
        acc = Some(match acc {
            None => prod,
            Some(a) => a.add(&prod),
        });
    }
    let acc = acc.ok_or(EngineError::EmptyMonomial)?;
    Ok(acc.scale(term.coeff))
}

/// Spatial derivatives of iterates, computed once per (field, index).
#[derive(Debug, Default)]
pub struct DerivativeCache<T> {
    cache: HashMap<(FieldRef, usize), T>,
}

impl<T: Clone> DerivativeCache<T> {
    pub fn new() -> Self {
        DerivativeCache {
            cache: HashMap::new(),
        }
    }

    pub fn get_or_insert(
        &mut self,
        field: FieldRef,
        index: usize,
        make: impl FnOnce() -> Result<T, EngineError>,
    ) -> Result<T, EngineError> {
        if let Some(v) = self.cache.get(&(field, index)) {
            return Ok(v.clone());
        }
        let v = make()?;
        self.cache.insert((field, index), v.clone());
        Ok(v)
    }
}

/// H_n for spatial iterates: `iterates[c][i]` is v_{c,i}.
pub fn he_polynomials(
    term: &NonlinearTerm,
    iterates: &[Vec<SpatialExpr>],
    n: usize,
) -> Result<SpatialExpr, EngineError> {
    he_polynomial(term, n, |field, i| {
        iterates
            .get(field.component)
            .and_then(|it| it.get(i))
            .map(|v| v.partial(field.deriv))
            .ok_or(EngineError::MissingIterate {
                component: field.component,
                index: i,
            })
    })
}

/// H₀..H_{N−1} for every nonlinear term of every equation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HePolynomialTable {
    /// `table[equation][term][n]`
    table: Vec<Vec<Vec<FracSeries>>>,
}

impl HePolynomialTable {
    pub fn new(equations: usize, terms_per_equation: impl Iterator<Item = usize>) -> Self {
        let table: Vec<Vec<Vec<FracSeries>>> =
            terms_per_equation.map(|t| vec![Vec::new(); t]).collect();
        debug_assert_eq!(table.len(), equations);
        HePolynomialTable { table }
    }

    pub fn push(&mut self, equation: usize, term: usize, h: FracSeries) {
        self.table[equation][term].push(h);
    }

    pub fn get(&self, equation: usize, term: usize, n: usize) -> Option<&FracSeries> {
        self.table.get(equation)?.get(term)?.get(n)
    }

    pub fn terms(&self, equation: usize) -> usize {
        self.table.get(equation).map_or(0, Vec::len)
    }

    pub fn len(&self, equation: usize, term: usize) -> usize {
        self.table
            .get(equation)
            .and_then(|e| e.get(term))
            .map_or(0, Vec::len)
    }
}
