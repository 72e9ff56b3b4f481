pub mod analytic_index;
pub mod cli_reports;
pub mod error;
pub mod exact_arith;
pub mod fiber_measure;
pub mod heat_galerkin;
pub mod orbifold_model;
pub mod scalar;
pub mod topological_index;

pub use error::{Error, Result};
pub use scalar::{Rational, Real, Scalar};

pub type Cyclotomic = exact_arith::CyclotomicElement<Rational>;

pub type FiberMeasureF64 = fiber_measure::FiberMeasure<f64>;
pub type ProjectorF64 = fiber_measure::Projector<f64>;
pub type SpectrumF64 = heat_galerkin::Spectrum<f64>;
