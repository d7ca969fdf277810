//! Shared fixtures for the criterion benches.

use tricorner::{Corners, StructuredMatrix};

/// Dominant matrix with both corners at the benchmark margin.
pub fn fixture(n: usize) -> StructuredMatrix {
    StructuredMatrix::random_dominant(n, 0.1, Corners::Both, n as u64).expect("valid order")
}

/// Right-hand side `A · 1`.
pub fn ones_rhs(m: &StructuredMatrix) -> Vec<f64> {
    m.matvec(&vec![1.0; m.n()]).expect("matching length")
}
