//! Datasets (the empirical measure μ), base measures λ over hidden
//! parameters, coefficient functions γ ∈ L²(λ) and finite network parameters.

mod coefficient;
mod dataset;
mod measure;
mod network;

pub use coefficient::{l2_inner, Coefficient, Scalar};
pub use dataset::{empirical_inner, Dataset};
pub use measure::{axis_points, GridSpec, MeasureKind, ParamMeasure};
pub use network::{dirac_measure_from_params, NetworkParams, Unit};

pub(crate) use measure::dot;
