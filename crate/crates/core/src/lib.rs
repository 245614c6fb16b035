//! Computational toolkit for univalent functions: truncated power series,
//! the classes S and Σ, coefficient functionals, Legendre polynomials,
//! Loewner chains and the nonnegative coefficient decomposition behind the
//! Milin inequality.

pub mod error;
pub mod functionals;
pub mod legendre;
pub mod loewner;
pub mod schlicht;
pub mod series;
pub mod verify;
pub mod weinstein;

pub use error::{Error, Result};
pub use functionals::{BoundReport, Case, LogCoefficients};
pub use schlicht::{ClassSFunction, SigmaFunction, Transform};
pub use series::{Complex, PowerSeries};
