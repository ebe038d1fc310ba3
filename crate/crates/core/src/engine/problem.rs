//! Problems in the normal form D_t^α u_c = Σ linear + Σ monomials + source.

use std::fmt;

use thiserror::Error;

use crate::series_algebra::FracSeries;
use crate::spatial_expr::{MultiIndex, SpatialExpr, MAX_DIM};
use crate::special_functions::FracOrder;

/// A component, possibly differentiated in space: `v`, `w_x`, `v_xx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldRef {
    pub component: usize,
    pub deriv: MultiIndex,
}

impl FieldRef {
    pub fn new(component: usize, deriv: MultiIndex) -> Self {
        FieldRef { component, deriv }
    }

    pub fn plain(component: usize) -> Self {
        FieldRef::new(component, MultiIndex::NONE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearTerm {
    pub coeff: f64,
    pub field: FieldRef,
}

/// `coeff · Π factors`, degree ≥ 2, factors sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearTerm {
    pub coeff: f64,
    pub factors: Vec<FieldRef>,
}

impl NonlinearTerm {
    pub fn degree(&self) -> usize {
        self.factors.len()
    }
}

/// Right-hand side of one equation. `constant` is the time-independent
/// part of the source; lattice sources are attached to the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub target: usize,
    pub linear: Vec<LinearTerm>,
    pub nonlinear: Vec<NonlinearTerm>,
    pub constant: f64,
}

impl Equation {
    pub fn fields(&self) -> impl Iterator<Item = FieldRef> + '_ {
        self.linear.iter().map(|l| l.field).chain(
            self.nonlinear
                .iter()
                .flat_map(|m| m.factors.iter().copied()),
        )
    }
}

pub const MAX_DEGREE: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("no components declared")]
    NoComponents,
    #[error("component '{0}' declared twice")]
    DuplicateComponent(String),
    #[error("component '{0}' has no equation")]
    MissingEquation(String),
    #[error("component '{0}' has more than one equation")]
    DuplicateEquation(String),
    #[error("component '{0}' has no initial condition")]
    MissingInitialCondition(String),
    #[error("alpha = {0} outside the solver range (0, 1]")]
    Alpha(f64),
    #[error("monomial of degree {0} exceeds the supported maximum of 3")]
    Degree(usize),
    #[error("source for '{component}' is not on the lattice of alpha = {alpha}")]
    Source { component: String, alpha: f64 },
    #[error("cannot change alpha: the source of '{0}' depends on time")]
    TimeDependentSource(String),
    #[error("problem uses {0} spatial variables; at most 3 are supported")]
    Dimension(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    alpha: FracOrder,
    dim: usize,
    components: Vec<String>,
    equations: Vec<Equation>,
    initial: Vec<SpatialExpr>,
    sources: Vec<FracSeries>,
}

impl ProblemSpec {
    /// Validates and assembles a problem. `equations` may come in any order;
    /// each component needs exactly one equation and one initial condition.
    pub fn new(
        alpha: f64,
        components: Vec<String>,
        equations: Vec<Equation>,
        initial: Vec<(usize, SpatialExpr)>,
    ) -> Result<Self, SpecError> {
        let alpha = FracOrder::new(alpha).map_err(|_| SpecError::Alpha(alpha))?;
        if components.is_empty() {
            return Err(SpecError::NoComponents);
        }
        for (i, name) in components.iter().enumerate() {
            if components[..i].contains(name) {
                return Err(SpecError::DuplicateComponent(name.clone()));
            }
        }
        let n = components.len();
        let mut slots: Vec<Option<Equation>> = vec![None; n];
        for eq in equations {
            let t = eq.target;
            if slots[t].is_some() {
                return Err(SpecError::DuplicateEquation(components[t].clone()));
            }
            if let Some(m) = eq.nonlinear.iter().find(|m| m.degree() > MAX_DEGREE) {
                return Err(SpecError::Degree(m.degree()));
            }
            slots[t] = Some(eq);
        }
        let equations = slots
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| SpecError::MissingEquation(components[i].clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut ics: Vec<Option<SpatialExpr>> = vec![None; n];
        for (c, e) in initial {
            ics[c] = Some(e);
        }
        let ics = ics
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                e.ok_or_else(|| SpecError::MissingInitialCondition(components[i].clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let deriv_dim = equations
            .iter()
            .flat_map(Equation::fields)
            .filter_map(|f| f.deriv.highest_var())
            .map(|v| v + 1)
            .max()
            .unwrap_or(1);
        let dim = ics.iter().map(SpatialExpr::dim).fold(deriv_dim, usize::max);
        if dim > MAX_DIM {
            return Err(SpecError::Dimension(dim));
        }
        let initial: Vec<_> = ics.into_iter().map(|e| e.embed(dim)).collect();
        let sources = equations
            .iter()
            .map(|e| FracSeries::constant_in_time(alpha, SpatialExpr::constant(dim, e.constant)))
            .collect();
        Ok(ProblemSpec {
            alpha,
            dim,
            components,
            equations,
            initial,
            sources,
        })
    }

    /// Adds a lattice source to a component's equation.
    pub fn with_source(mut self, component: usize, source: FracSeries) -> Result<Self, SpecError> {
        let joined = self.sources[component]
            .add(&source)
            .map_err(|_| SpecError::Source {
                component: self.components[component].clone(),
                alpha: self.alpha.value(),
            })?;
        self.dim = self.dim.max(joined.dim());
        self.sources[component] = joined;
        Ok(self)
    }

    /// Same problem at a different order. Only time-independent sources
    /// survive a change of lattice.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self, SpecError> {
        let order = FracOrder::new(alpha).map_err(|_| SpecError::Alpha(alpha))?;
        let sources = self
            .sources
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.coeffs().len() > 1 {
                    return Err(SpecError::TimeDependentSource(self.components[i].clone()));
                }
                Ok(FracSeries::constant_in_time(
                    order,
                    s.coeff(0).embed(self.dim),
                ))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProblemSpec {
            alpha: order,
            sources,
            ..self.clone()
        })
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c == name)
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn equation(&self, component: usize) -> &Equation {
        &self.equations[component]
    }

    pub fn initial(&self, component: usize) -> &SpatialExpr {
        &self.initial[component]
    }

    pub fn source(&self, component: usize) -> &FracSeries {
        &self.sources[component]
    }

    /// The equation rendered in the input grammar.
    pub fn render_equation(&self, component: usize) -> String {
        EquationDisplay {
            eq: &self.equations[component],
            names: &self.components,
        }
        .to_string()
    }
}

/// Renders an equation against a component name table.
pub struct EquationDisplay<'a> {
    pub eq: &'a Equation,
    pub names: &'a [String],
}

impl fmt::Display for EquationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = |r: &FieldRef| format!("{}{}", self.names[r.component], r.deriv);
        write!(f, "Dt^a {} = ", self.names[self.eq.target])?;
        let mut pieces: Vec<(f64, String)> = Vec::new();
        for l in &self.eq.linear {
            pieces.push((l.coeff, field(&l.field)));
        }
        for m in &self.eq.nonlinear {
            let body: Vec<String> = m.factors.iter().map(field).collect();
            pieces.push((m.coeff, body.join("*")));
        }
        if self.eq.constant != 0.0 || pieces.is_empty() {
            pieces.push((self.eq.constant, String::new()));
        }
        for (i, (c, body)) in pieces.iter().enumerate() {
            match (i, *c < 0.0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            match (body.is_empty(), a == 1.0) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{body}")?,
                (false, false) => write!(f, "{a}*{body}")?,
            }
        }
        Ok(())
    }
}
