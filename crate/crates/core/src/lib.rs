//! Series solutions of time-fractional PDE systems by the natural
//! transform homotopy perturbation method, with an L1 finite-difference
//! reference solver for cross-checking.

pub mod compare;
pub mod engine;
pub mod natural_transform;
pub mod quadrature;
pub mod reference_oracle;
pub mod series_algebra;
pub mod spatial_expr;
pub mod special_functions;

pub use natural_transform::{Atom, PowerSum, TimeSignal, TransformError, TransformImage};
pub use series_algebra::{FracSeries, SeriesError};
pub use spatial_expr::{MultiIndex, SpatialExpr};
pub use special_functions::{FracOrder, SpecialFnError};
