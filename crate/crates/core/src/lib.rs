//! Factorization and direct solvers for almost-tridiagonal matrices: a
//! tridiagonal band plus the two corner entries `(n, 1)` and `(1, n)`.
//!
//! ```
//! use tricorner::{factorize, solve, determinant, StructuredMatrix};
//!
//! let m = StructuredMatrix::tridiagonal(vec![4.0; 3], vec![1.0; 2], vec![1.0; 2]).unwrap();
//! let f = factorize(&m).unwrap();
//! assert_eq!(determinant(&f).value, 56.0);
//! assert_eq!(solve(&f, &[5.0, 6.0, 5.0]).unwrap().x, vec![1.0, 1.0, 1.0]);
//! ```

pub mod dense;
pub mod det;
pub mod error;
pub mod factor;
pub mod flops;
pub mod linalg;
pub mod lowertri;
pub mod matrix;
pub mod nnet;
pub mod oracle;
pub mod scalar;

pub use dense::{vec_norm_inf, DenseMatrix};
pub use det::DetResult;
pub use error::{Error, Result};
pub use factor::{
    compute_lambda, compute_mu, compute_zeta, eliminate_stepwise, factorize, factorize_extended,
    factorize_with, FactorKind, Factorization,
};
pub use flops::{counted, loglog_slope, FlopCounter, FlopSink};
pub use linalg::{
    determinant, determinant_via_factors, inverse, inverse_with, pseudo_solve, psi_inverse,
    r_inverse, r_inverse_closed_form, solve, solve_with, theta_inverse, SolveResult, TallSystem,
};
pub use matrix::{format_vector, parse_vector, Corners, DominanceReport, StructuredMatrix};
pub use scalar::{ExtF64, Scalar};
