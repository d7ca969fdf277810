//! Three-factor decomposition `A = Θ Ψ ℜᵀ` of an almost-tridiagonal matrix.
//!
//! * `Θ` is lower bidiagonal with `Θ[j][j] = 1/λ_j` and `Θ[j+1][j] = -1/λ_{j+1}`.
//!   Its inverse is the lower triangle filled column-wise with `λ_j`.
//! * `Ψ` is the identity with `-ζ_j` along the last row.
//! * `ℜ` is lower triangular with pivots `p_j = a_j λ_j + c_{j-1} λ_{j-1}` on the
//!   diagonal, `c_j λ_j` below it, `d2` along the last row and `μ_n` in the
//!   corner.
//!
//! The λ recurrence
//!
//! ```text
//! λ_0 = 0, λ_1 = 1, λ_{j+1} = -(a_j λ_j + c_{j-1} λ_{j-1}) / b_j
//! ```
//!
//! makes the prefix combination `Σ_{k<=i} λ_k row_k(A)` vanish left of the
//! diagonal, which is why `Θ⁻¹ A` is upper triangular up to the `d1` corner,
//! and `Ψ⁻¹` removes that corner. Everything is O(n).
//!
//! Indexing in code is 0-based: `lambda[0] = λ_1 = 1`.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::flops::FlopSink;
use crate::matrix::StructuredMatrix;
use crate::scalar::{ExtF64, Scalar};

/// Computed factorization data. Factors are materialized on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<T: Scalar = f64> {
    source: StructuredMatrix,
    lambda: Vec<T>,
    zeta: Vec<T>,
    mu: T,
    pivot: Vec<T>,
    c_lambda: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Theta,
    Psi,
    R,
}

fn check_finite<T: Scalar>(v: T, index: usize) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { index })
    }
}

/// λ, pivots `p_j` and products `c_j λ_j` (the latter two of length n-1).
fn lambda_recurrence<T: Scalar>(
    m: &StructuredMatrix,
    flops: &mut impl FlopSink,
) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let n = m.n();
    if let Some(j) = m.b().iter().position(|&b| b == 0.0) {
        return Err(Error::Structure(format!(
            "sub-diagonal entry b_{} is zero; factorization needs every b nonzero",
            j + 1
        )));
    }
    let (a, b, c) = (m.a(), m.b(), m.c());
    let mut lambda = Vec::with_capacity(n);
    let mut pivot = Vec::with_capacity(n - 1);
    let mut c_lambda = Vec::with_capacity(n - 1);
    lambda.push(T::one());
    for j in 0..n - 1 {
        let p = if j == 0 {
            T::from_f64(a[0])
        } else {
            flops.mul(1);
            flops.add(1);
            T::from_f64(a[j]) * lambda[j] + c_lambda[j - 1]
        };
        if p.is_zero() {
            return Err(Error::Breakdown { index: j + 1 });
        }
        let p = check_finite(p, j + 1)?;
        flops.div(1);
        let next = check_finite(-(p / T::from_f64(b[j])), j + 1)?;
        let cl = if j == 0 {
            T::from_f64(c[0])
        } else {
            flops.mul(1);
            T::from_f64(c[j]) * lambda[j]
        };
        pivot.push(p);
        c_lambda.push(cl);
        lambda.push(next);
    }
    Ok((lambda, pivot, c_lambda))
}

/// ζ sequence (length n-1). Needs the complete λ sequence because
/// `ζ_1 = -d1 λ_n / a_1`.
fn zeta_recurrence<T: Scalar>(
    m: &StructuredMatrix,
    lambda: &[T],
    pivot: &[T],
    c_lambda: &[T],
    flops: &mut impl FlopSink,
) -> Result<Vec<T>> {
    let n = m.n();
    if n == 1 {
        return Ok(Vec::new());
    }
    if m.d1() == 0.0 {
        return Ok(vec![T::zero(); n - 1]);
    }
    if m.a()[0] == 0.0 {
        return Err(Error::Singular { index: 1 });
    }
    let mut zeta = Vec::with_capacity(n - 1);
    flops.mul(1);
    flops.div(1);
    zeta.push(check_finite(
        -(T::from_f64(m.d1()) * lambda[n - 1] / T::from_f64(m.a()[0])),
        1,
    )?);
    for j in 1..n - 1 {
        if pivot[j].is_zero() {
            return Err(Error::Breakdown { index: j + 1 });
        }
        flops.mul(1);
        flops.div(1);
        let z = -(c_lambda[j - 1] * zeta[j - 1] / pivot[j]);
        zeta.push(check_finite(z, j + 1)?);
    }
    Ok(zeta)
}

/// `μ_n = a_n λ_n + (1 + ζ_{n-1}) c_{n-1} λ_{n-1} + d2 (1 + Σ ζ_i)`.
fn mu_formula<T: Scalar>(
    m: &StructuredMatrix,
    lambda: &[T],
    zeta: &[T],
    c_lambda: &[T],
    flops: &mut impl FlopSink,
) -> T {
    let n = m.n();
    if n == 1 {
        return T::from_f64(m.a()[0]);
    }
    let one = T::one();
    let mut zeta_sum = zeta[0];
    for &z in &zeta[1..] {
        zeta_sum = zeta_sum + z;
    }
    flops.add(n as u64 - 2);
    let diag = T::from_f64(m.a()[n - 1]) * lambda[n - 1];
    let band = (one + zeta[n - 2]) * c_lambda[n - 2];
    let corner = T::from_f64(m.d2()) * (one + zeta_sum);
    flops.mul(3);
    flops.add(4);
    diag + band + corner
}

/// λ_1..λ_n of the recurrence above.
pub fn compute_lambda(m: &StructuredMatrix) -> Result<Vec<f64>> {
    lambda_recurrence::<f64>(m, &mut ()).map(|(l, _, _)| l)
}

/// Pivots and `c_j λ_j` rebuilt from a given λ sequence.
fn pivots_from_lambda(m: &StructuredMatrix, lambda: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.n();
    if lambda.len() != n {
        return Err(Error::Shape(format!(
            "{} λ values for order {n}",
            lambda.len()
        )));
    }
    let (a, c) = (m.a(), m.c());
    let c_lambda: Vec<f64> = (0..n - 1)
        .map(|j| if j == 0 { c[0] } else { c[j] * lambda[j] })
        .collect();
    let pivot = (0..n - 1)
        .map(|j| {
            if j == 0 {
                a[0]
            } else {
                a[j] * lambda[j] + c_lambda[j - 1]
            }
        })
        .collect();
    Ok((pivot, c_lambda))
}

/// ζ_1..ζ_{n-1}; all zero when `d1 = 0`.
pub fn compute_zeta(m: &StructuredMatrix, lambda: &[f64]) -> Result<Vec<f64>> {
    let (pivot, c_lambda) = pivots_from_lambda(m, lambda)?;
    zeta_recurrence(m, lambda, &pivot, &c_lambda, &mut ())
}

/// The corner entry `μ_n`; zero means `A` is singular.
pub fn compute_mu(m: &StructuredMatrix, lambda: &[f64], zeta: &[f64]) -> Result<f64> {
    let (_, c_lambda) = pivots_from_lambda(m, lambda)?;
    if zeta.len() != m.n() - 1 {
        return Err(Error::Shape(format!(
            "{} ζ values for order {}",
            zeta.len(),
            m.n()
        )));
    }
    Ok(mu_formula(m, lambda, zeta, &c_lambda, &mut ()))
}

/// Factorizes in `f64`. Raises [`Error::Overflow`] once λ leaves the `f64`
/// range; see [`factorize_extended`] for large orders.
pub fn factorize(m: &StructuredMatrix) -> Result<Factorization<f64>> {
    factorize_with(m, &mut ())
}

/// Factorizes with an extended exponent range, so λ cannot overflow.
pub fn factorize_extended(m: &StructuredMatrix) -> Result<Factorization<ExtF64>> {
    factorize_with(m, &mut ())
}

/// Factorizes with scalar type `T`, reporting operation counts to `flops`.
pub fn factorize_with<T: Scalar>(
    m: &StructuredMatrix,
    flops: &mut impl FlopSink,
) -> Result<Factorization<T>> {
    let (lambda, pivot, c_lambda) = lambda_recurrence::<T>(m, flops)?;
    let zeta = zeta_recurrence(m, &lambda, &pivot, &c_lambda, flops)?;
    let mu = check_finite(mu_formula(m, &lambda, &zeta, &c_lambda, flops), m.n())?;
    Ok(Factorization {
        source: m.clone(),
        lambda,
        zeta,
        mu,
        pivot,
        c_lambda,
    })
}

impl<T: Scalar> Factorization<T> {
    pub fn source(&self) -> &StructuredMatrix {
        &self.source
    }

    pub fn n(&self) -> usize {
        self.source.n()
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    pub fn zeta(&self) -> &[T] {
        &self.zeta
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// `p_j = a_j λ_j + c_{j-1} λ_{j-1}` for `j < n`.
    pub fn pivots(&self) -> &[T] {
        &self.pivot
    }

    /// `c_j λ_j` for `j < n`.
    pub fn c_lambda(&self) -> &[T] {
        &self.c_lambda
    }

    /// True when `μ_n = 0`, i.e. `A` is singular.
    pub fn is_singular(&self) -> bool {
        self.mu.is_zero()
    }
}

impl Factorization<f64> {
    pub fn materialize(&self, which: FactorKind) -> DenseMatrix {
        match which {
            FactorKind::Theta => self.theta(),
            FactorKind::Psi => self.psi(),
            FactorKind::R => self.r_factor(),
        }
    }

    /// Lower bidiagonal `Θ`.
    pub fn theta(&self) -> DenseMatrix {
        let n = self.n();
        let mut t = DenseMatrix::zeros(n, n);
        for j in 0..n {
            t[(j, j)] = 1.0 / self.lambda[j];
            if j + 1 < n {
                t[(j + 1, j)] = -1.0 / self.lambda[j + 1];
            }
        }
        t
    }

    /// Identity with `-ζ_j` along the last row.
    pub fn psi(&self) -> DenseMatrix {
        let n = self.n();
        let mut p = DenseMatrix::identity(n);
        for (j, &z) in self.zeta.iter().enumerate() {
            p[(n - 1, j)] = -z;
        }
        p
    }

    /// Lower-triangular `ℜ`.
    pub fn r_factor(&self) -> DenseMatrix {
        let n = self.n();
        let mut r = DenseMatrix::zeros(n, n);
        if n == 1 {
            r[(0, 0)] = self.mu;
            return r;
        }
        let d2 = self.source.d2();
        for j in 0..n - 1 {
            r[(j, j)] = self.pivot[j];
        }
        for j in 0..n.saturating_sub(2) {
            r[(j + 1, j)] = self.c_lambda[j];
            r[(n - 1, j)] = d2;
        }
        r[(n - 1, n - 2)] = d2 + self.c_lambda[n - 2];
        r[(n - 1, n - 1)] = self.mu;
        r
    }

    /// `Θ Ψ ℜᵀ` as a dense product.
    pub fn reconstruct(&self) -> DenseMatrix {
        let left = self.theta().matmul(&self.psi()).expect("square factors");
        left.matmul(&self.r_factor().transpose())
            .expect("square factors")
    }
}

/// Upper-triangular `Ψ⁻¹ Θ⁻¹ A` built by explicit row operations: first the
/// transformations `Θ_1 .. Θ_{n-1}` (row `z+1 ← row z + λ_{z+1} row z+1`)
/// clear the sub-diagonal, then the `Ψ⁻¹` row update clears the `d1`
/// corner. Equals `ℜᵀ` up to rounding.
pub fn eliminate_stepwise(m: &StructuredMatrix) -> Result<DenseMatrix> {
    let f = factorize(m)?;
    let n = m.n();
    let mut w = m.to_dense();
    for z in 0..n - 1 {
        let scale = f.lambda[z + 1];
        let prev = w.row(z).to_vec();
        for (dst, p) in w.row_mut(z + 1).iter_mut().zip(prev) {
            *dst = p + scale * *dst;
        }
    }
    if n >= 2 && f.zeta.iter().any(|&z| z != 0.0) {
        let mut acc = w.row(n - 1).to_vec();
        for (j, &z) in f.zeta.iter().enumerate() {
            for (a, &v) in acc.iter_mut().zip(w.row(j)) {
                *a += z * v;
            }
        }
        w.row_mut(n - 1).copy_from_slice(&acc);
    }
    Ok(w)
}
