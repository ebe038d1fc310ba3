//! Homotopy-perturbation recursion on fractional power series.

pub mod closed_form;
pub mod he;
pub mod parse;
pub mod problem;
pub mod problem_file;
pub mod residual;
pub mod solve;

use thiserror::Error;

pub use closed_form::{detect_closed_form, ClosedForm};
pub use he::{compositions, he_polynomial, he_polynomials, HeAlgebra, HePolynomialTable};
pub use parse::{parse_equation, EquationError};
pub use problem::{
    Equation, EquationDisplay, FieldRef, LinearTerm, NonlinearTerm, ProblemSpec, SpecError,
};
pub use problem_file::{load_problem, parse_problem, ProblemFileError};
pub use residual::{residual, ResidualEvaluator};
pub use solve::{iterate, Diagnostics, SolutionBundle, DEFAULT_TERMS};

use crate::series_algebra::SeriesError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("iterate {index} of component {component} is not available")]
    MissingIterate { component: usize, index: usize },
    #[error("monomial has no factors")]
    EmptyMonomial,
    #[error("truncation order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("requested {up_to} terms but the solution has order {order}")]
    UpTo { up_to: usize, order: usize },
    #[error("solution does not belong to this problem")]
    Mismatch,
}
