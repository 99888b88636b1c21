//! Numerical building blocks shared by every other module.

mod chi2;
mod eigen;
mod linalg;
mod rng;

pub use chi2::{chi2_even_cdf, chi2_even_quantile, chi2_even_sf, QUANTILE_TOLERANCE};
pub use eigen::{hermitian_eigen, HermitianEigen};
pub use linalg::{hermitian_inner, ComplexMatrix, ComplexVector};
pub use num_complex::Complex64;
pub use rng::{sample_cscg, RngStream};
