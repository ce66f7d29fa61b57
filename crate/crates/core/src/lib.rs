pub mod canon;
pub mod error;
pub mod export;
pub mod frontends;
pub mod matrix;
pub mod multiway;
pub mod phase;
pub mod rulial;
pub mod scalar;
pub mod term;
pub mod zx;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use phase::{Phase, PhaseExpr};
pub use scalar::{Cyclotomic8, Scalar};

pub type Complex64 = num_complex::Complex64;
pub type Complex32 = num_complex::Complex32;
pub type FloatMatrix = ComplexMatrix<Complex64>;
pub type Float32Matrix = ComplexMatrix<Complex32>;
pub type ExactMatrix = ComplexMatrix<Cyclotomic8>;
