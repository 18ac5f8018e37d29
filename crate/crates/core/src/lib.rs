//! Recurrence coefficients of generalized Jacobi weights with one interior
//! algebraic singularity, computed from Freud's equations, together with
//! the machinery to check their O(1/n) oscillatory asymptotics.

pub mod error;
pub mod calibration;
pub mod cli;
pub mod freud;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod summation;
pub mod szego;
pub mod tail_fit;
pub mod weights;

pub use error::{Error, Result};
