//! Grid functions, character transforms, the surface measure and the
//! Bochner-Riesz kernel.

mod grid;
mod sigma;
mod transform;

use thiserror::Error;

pub use grid::{format_float, grid_len, GridFunction, GridShape, Side, DEFAULT_GRID_BUDGET};
pub use sigma::{
    average, bochner_riesz_kernel, convolve_khat, convolve_khat_naive, sigma_inverse_ft_closed,
    sigma_inverse_ft_direct, sigma_inverse_ft_fast, AveragePath, SurfaceData,
};
pub use transform::{
    convolve, forward_of, forward_transform, inverse_transform, naive, synthesize, Sign,
};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid budget exceeded: {q}^{d} > {budget}")]
    BudgetExceeded { q: u32, d: usize, budget: u64 },
    #[error("expected {expected} grid values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("grid on the {actual:?} side where {expected:?} is required")]
    WrongSide { expected: Side, actual: Side },
    #[error("grids live on different fields or dimensions")]
    ShapeMismatch,
    #[error("surface is not symmetric under x -> -x")]
    NotSymmetric,
    #[error("closed form requires even dimension, got d = {0}")]
    OddDimension(usize),
    #[error("grid csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("grid csv io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed grid row: {0}")]
    Parse(String),
}
