//! Exact rational matrices and polynomials.

mod factor;
mod matrix;
mod poly;

pub use factor::{factor_over_q, factor_over_q_with_cap, squarefree_decomposition, DEFAULT_DEGREE_CAP};
pub use matrix::QMatrix;
pub use poly::{MonicPoly, Poly};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("rows have different lengths")]
    Ragged,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("degree {degree} exceeds the factorization cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
}
