//! Iterated integrals of log ζ, their prime-sum approximations, and a
//! constructive search for values of the horizontal integrals.

pub mod dirichlet;
pub mod error;
pub mod eta;
pub mod hunt;
pub mod polygon;
pub mod polylog;
pub mod primes;
pub mod quad;
pub mod torus;
pub mod zeros;
pub mod zeta;

pub use error::{Error, Result};
pub use zeros::{load_zero_table, zeros_in_box, ZeroRecord, ZeroTable};
pub use zeta::{log_zeta_horizontal, zeta, ComplexPoint, EvalParams};
