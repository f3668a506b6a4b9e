#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod document;
pub mod error;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod quantum;
pub mod scalar;
pub mod svetlichny;

pub use scalar::{Rational, Scalar};

pub type Behavior64 = model::Behavior<f64>;
pub type Behavior32 = model::Behavior<f32>;
pub type ExactBehavior = model::Behavior<Rational>;
pub type Distribution64 = model::OutcomeDistribution<f64>;
pub type ExactDistribution = model::OutcomeDistribution<Rational>;
pub type Assignment64 = svetlichny::AssignmentMatrix<f64>;
pub type Assignment32 = svetlichny::AssignmentMatrix<f32>;
pub type ExactAssignment = svetlichny::AssignmentMatrix<Rational>;
