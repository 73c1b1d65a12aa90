//! Gradient flow, gradient descent, multiplicative-noise SGD and heavy-ball
//! dynamics, all recorded as [`Trajectory`] values.

mod dynamics;
pub mod objective;
pub mod ode;
mod trajectory;

pub use dynamics::*;
pub use objective::{Monomial, Objective, Quadratic, Scaled};
pub use trajectory::{Dynamics, Sample, Trajectory, TrajectoryMeta};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Ode(#[from] ode::OdeError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("divergence detected at step {step}: f = {value:e}")]
    Divergence { step: usize, value: f64 },
    #[error("initial point has dimension {got}, objective expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}
