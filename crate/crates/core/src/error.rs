use thiserror::Error;

use crate::geometry::Vec2;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-positive radius {radius} at angle {angle}")]
    NonPositiveRadius { angle: f64, radius: f64 },

    #[error("node count {0} must be even and at least 16")]
    BadNodeCount(usize),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point ({x}, {y}) lies outside the domain or within the minimum boundary offset")]
    PointOutside { x: f64, y: f64 },

    #[error("origin is not inside the domain")]
    OriginOutside,

    #[error("boundary integral system is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("negative boundary gradient {value} at node {node}: boundary is under-resolved")]
    NegativeBoundaryGradient { node: usize, value: f64 },

    #[error("optimizer did not converge after {evaluations} evaluations (best value {best_value}, best point ({}, {}))", best_point.x, best_point.y)]
    NoConvergence {
        evaluations: usize,
        best_value: f64,
        best_point: Vec2,
    },

    #[error("interior quadrature offset {offset} is below the minimum {required} needed for Hessian integrals; use fewer radial nodes or more boundary nodes")]
    InsufficientOffset { offset: f64, required: f64 },

    #[error("velocity law rejected: {0}")]
    VelocityLaw(String),

    #[error("radius became non-positive at node {node} (t = {t})")]
    LostStarShape { node: usize, t: f64 },

    #[error("too few points ({found}) inside the fitting window, need at least {required}")]
    TooFewPoints { found: usize, required: usize },

    #[error("time step {dt:e} fell below the minimum {dt_min:e} at t = {t}")]
    StepUnderflow { dt: f64, dt_min: f64, t: f64 },

    #[error("config error: {0}")]
    Config(String),
}
