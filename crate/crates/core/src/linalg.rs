//! Determinant, factor inverses, full inverse and direct solves built on a
//! [`Factorization`].
//!
//! `A⁻¹ = (ℜ⁻¹)ᵀ Ψ⁻¹ Θ⁻¹`, and `det A = (-1)^{n-1} μ_n ∏ b_i`.
//! The solve path applies `Θ⁻¹` and `Ψ⁻¹` as O(n) sweeps and never forms them.

use crate::dense::{vec_norm_inf, DenseMatrix};
use crate::det::DetResult;
use crate::error::{Error, Result};
use crate::factor::Factorization;
use crate::flops::FlopSink;
use crate::matrix::StructuredMatrix;
use crate::scalar::{ExtF64, Scalar};

/// Output of a direct solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub x: Vec<f64>,
    /// `‖A x - b‖∞`, recomputed from the source matrix.
    pub residual_inf: f64,
    /// `Ψ⁻¹ Θ⁻¹ b`, the right-hand side of the final triangular system.
    pub transformed_rhs: Vec<f64>,
}

impl SolveResult {
    /// `‖A x - b‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞)`; zero for a zero system.
    pub fn scaled_residual(&self, m: &StructuredMatrix, rhs: &[f64]) -> f64 {
        let denom = m.norm_inf() * vec_norm_inf(&self.x) + vec_norm_inf(rhs);
        if denom == 0.0 {
            0.0
        } else {
            self.residual_inf / denom
        }
    }
}

/// Lower triangle with `λ_j` in every entry of column `j`.
pub fn theta_inverse<T: Scalar>(f: &Factorization<T>) -> DenseMatrix {
    let n = f.n();
    let lambda: Vec<f64> = f.lambda().iter().map(|l| l.to_f64()).collect();
    DenseMatrix::from_fn(n, n, |i, j| if i >= j { lambda[j] } else { 0.0 })
}

/// Identity with `+ζ_j` along the last row.
pub fn psi_inverse<T: Scalar>(f: &Factorization<T>) -> DenseMatrix {
    let n = f.n();
    let mut p = DenseMatrix::identity(n);
    for (j, z) in f.zeta().iter().enumerate() {
        p[(n - 1, j)] = z.to_f64();
    }
    p
}

fn require_nonsingular<T: Scalar>(f: &Factorization<T>) -> Result<()> {
    if f.is_singular() {
        Err(Error::SingularMu)
    } else {
        Ok(())
    }
}

/// Entry `(i, j)` of `ℜ⁻¹` for `j <= i < n-1` as the literal signed ratio
/// `(-1)^{i+j} ∏_{t=j}^{i-1} c_t λ_t / ∏_{t=j}^{i} p_t`.
pub fn r_inverse_closed_form(f: &Factorization<f64>, i: usize, j: usize) -> f64 {
    assert!(j <= i && i + 1 < f.n(), "closed form covers j <= i < n-1");
    // numerator and denominator grow like λ; pair the factors to stay in range
    let ratio: f64 = (j..i).map(|t| f.c_lambda()[t] / f.pivots()[t]).product();
    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
    sign * ratio / f.pivots()[i]
}

/// Lower-triangular `ℜ⁻¹`.
///
/// Rows below `n-1` follow the bidiagonal pattern of `ℜ`:
/// `γ_jj = 1/p_j`, `γ_ij = -γ_{i-1,j} c_{i-1} λ_{i-1} / p_i`. The last row
/// `g` solves `gᵀ ℜ = e_nᵀ` in one backward sweep.
pub fn r_inverse(f: &Factorization<f64>) -> Result<DenseMatrix> {
    require_nonsingular(f)?;
    let n = f.n();
    let mut g = DenseMatrix::zeros(n, n);
    let (p, cl) = (f.pivots(), f.c_lambda());
    for j in 0..n - 1 {
        g[(j, j)] = 1.0 / p[j];
        for i in j + 1..n - 1 {
            g[(i, j)] = -g[(i - 1, j)] * cl[i - 1] / p[i];
        }
    }
    let last = r_inverse_last_row(f);
    g.row_mut(n - 1).copy_from_slice(&last);
    Ok(g)
}

fn r_inverse_last_row(f: &Factorization<f64>) -> Vec<f64> {
    let n = f.n();
    let mut g = vec![0.0; n];
    g[n - 1] = 1.0 / f.mu();
    if n == 1 {
        return g;
    }
    let (p, cl, d2) = (f.pivots(), f.c_lambda(), f.source().d2());
    g[n - 2] = -(d2 + cl[n - 2]) * g[n - 1] / p[n - 2];
    for j in (0..n.saturating_sub(2)).rev() {
        g[j] = -(g[j + 1] * cl[j] + d2 * g[n - 1]) / p[j];
    }
    g
}

/// `det A = (-1)^{n-1} μ_n ∏ b_i`, with the sign and `ln |det A|` kept
/// separately so the result stays meaningful past the `f64` range.
pub fn determinant<T: Scalar>(f: &Factorization<T>) -> DetResult {
    let mu = f.mu();
    if mu.is_zero() {
        return DetResult::singular();
    }
    let n = f.n();
    let b = f.source().b();
    let mut sign = if n % 2 == 1 { 1.0 } else { -1.0 } * mu.signum();
    let mut log_abs = mu.ln_abs();
    let mut prod = mu.to_ext();
    for &bi in b {
        sign *= bi.signum();
        log_abs += bi.abs().ln();
        prod = prod * ExtF64::from_f64(bi);
    }
    let value = if n % 2 == 1 { prod } else { -prod };
    DetResult::from_parts(value.to_f64(), sign, log_abs)
}

/// The same determinant as a product of factor determinants:
/// `det Θ = ∏ 1/λ_j`, `det Ψ = 1`, `det ℜ = ∏ p_j · μ_n`.
pub fn determinant_via_factors<T: Scalar>(f: &Factorization<T>) -> DetResult {
    let mu = f.mu().to_ext();
    if mu.is_zero() {
        return DetResult::singular();
    }
    let mut prod = mu;
    let mut log_abs = mu.ln_abs();
    for l in f.lambda() {
        let l = l.to_ext();
        prod = prod / l;
        log_abs -= l.ln_abs();
    }
    for p in f.pivots() {
        let p = p.to_ext();
        prod = prod * p;
        log_abs += p.ln_abs();
    }
    DetResult::from_parts(prod.to_f64(), prod.signum(), log_abs)
}

/// Dense `A⁻¹ = (ℜ⁻¹)ᵀ (Ψ⁻¹ Θ⁻¹)`.
pub fn inverse(f: &Factorization<f64>) -> Result<DenseMatrix> {
    inverse_with(f, &mut ())
}

/// [`inverse`] with operation counting. `Ψ⁻¹ Θ⁻¹` is fused: rows above the
/// last are `λ_j` below the diagonal, and the last row is
/// `λ_j (1 + Σ_{k>=j} ζ_k)`. The remaining product is an ordinary cubic
/// multiplication restricted to the nonzero triangles.
pub fn inverse_with(f: &Factorization<f64>, flops: &mut impl FlopSink) -> Result<DenseMatrix> {
    let rinv = r_inverse(f)?;
    let n = f.n();
    let lambda = f.lambda();
    let mut last = vec![0.0; n];
    last[n - 1] = lambda[n - 1];
    let mut tail = 0.0;
    for j in (0..n - 1).rev() {
        tail += f.zeta()[j];
        last[j] = lambda[j] * (1.0 + tail);
    }
    flops.add(2 * (n as u64 - 1));
    flops.mul(n as u64 - 1);
    let fused = |k: usize, j: usize| if k == n - 1 { last[j] } else { lambda[j] };

    let mut out = DenseMatrix::zeros(n, n);
    let mut terms = 0u64;
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in i.max(j)..n {
                s += rinv[(k, i)] * fused(k, j);
            }
            terms += (n - i.max(j)) as u64;
            out[(i, j)] = s;
        }
    }
    flops.mul(terms);
    flops.add(terms);
    Ok(out)
}

/// Solves `A x = rhs` in O(n).
pub fn solve<T: Scalar>(f: &Factorization<T>, rhs: &[f64]) -> Result<SolveResult> {
    solve_with(f, rhs, &mut ())
}

/// [`solve`] with operation counting.
pub fn solve_with<T: Scalar>(
    f: &Factorization<T>,
    rhs: &[f64],
    flops: &mut impl FlopSink,
) -> Result<SolveResult> {
    let n = f.n();
    if rhs.len() != n {
        return Err(Error::Shape(format!(
            "right-hand side has {} entries, order is {n}",
            rhs.len()
        )));
    }
    require_nonsingular(f)?;
    let lambda = f.lambda();

    // Θ⁻¹ b: prefix sums of λ_j b_j
    let mut bbar: Vec<T> = Vec::with_capacity(n);
    let mut acc = T::from_f64(rhs[0]);
    bbar.push(acc);
    for i in 1..n {
        acc = acc + lambda[i] * T::from_f64(rhs[i]);
        bbar.push(acc);
    }
    flops.mul(n as u64 - 1);
    flops.add(n as u64 - 1);

    // Ψ⁻¹ only touches the last entry
    if n > 1 && f.source().d1() != 0.0 {
        let mut extra = T::zero();
        for (z, s) in f.zeta().iter().zip(&bbar) {
            extra = extra + *z * *s;
        }
        bbar[n - 1] = bbar[n - 1] + extra;
        flops.mul(n as u64 - 1);
        flops.add(n as u64 - 1);
    }

    // ℜᵀ x = b̄: diagonal, one super-diagonal entry and the dense last column
    let mut x = vec![T::zero(); n];
    x[n - 1] = bbar[n - 1] / f.mu();
    flops.div(1);
    if n > 1 {
        let (p, cl) = (f.pivots(), f.c_lambda());
        let d2 = f.source().d2();
        let d2x = T::from_f64(d2) * x[n - 1];
        x[n - 2] = (bbar[n - 2] - (T::from_f64(d2) + cl[n - 2]) * x[n - 1]) / p[n - 2];
        flops.add(2);
        flops.mul(1);
        flops.div(1);
        let tail = n.saturating_sub(2) as u64;
        for i in (0..n.saturating_sub(2)).rev() {
            let mut r = bbar[i] - cl[i] * x[i + 1];
            if d2 != 0.0 {
                r = r - d2x;
            }
            x[i] = r / p[i];
        }
        flops.mul(tail);
        flops.add(tail);
        flops.div(tail);
        if d2 != 0.0 {
            flops.mul(1);
            flops.add(tail);
        }
    }

    let x: Vec<f64> = x.iter().map(|v| v.to_f64()).collect();
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Overflow { index: i + 1 });
    }
    let ax = f.source().matvec(&x)?;
    let residual_inf = ax
        .iter()
        .zip(rhs)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(SolveResult {
        x,
        residual_inf,
        transformed_rhs: bbar.iter().map(|v| v.to_f64()).collect(),
    })
}

/// A tall `rows x n` system whose leading `n x n` block is an
/// almost-tridiagonal matrix and whose remaining rows are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TallSystem {
    square: StructuredMatrix,
    rows: usize,
}

impl TallSystem {
    pub fn new(square: StructuredMatrix, rows: usize) -> Result<Self> {
        if rows < square.n() {
            return Err(Error::Shape(format!(
                "tall system needs at least {} rows, got {rows}",
                square.n()
            )));
        }
        Ok(Self { square, rows })
    }

    pub fn square(&self) -> &StructuredMatrix {
        &self.square
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.square.n()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.square.n();
        let sq = self.square.to_dense();
        DenseMatrix::from_fn(self.rows, n, |i, j| if i < n { sq[(i, j)] } else { 0.0 })
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.square.matvec(x)?;
        y.resize(self.rows, 0.0);
        Ok(y)
    }
}

/// Solves the tall system through the rectangular factor chain
/// `Θ_{m×m} = diag(Θ, I)` and `Ψ⁻¹ = [Ψ⁻¹ | 0]`.
///
/// For a consistent right-hand side this is the exact solution. Otherwise
/// the rows beyond `n` are discarded, so the result is not in general the
/// least-squares minimiser; the true residual over all rows is reported.
pub fn pseudo_solve<T: Scalar>(
    f: &Factorization<T>,
    system: &TallSystem,
    rhs: &[f64],
) -> Result<SolveResult> {
    if f.source() != system.square() {
        return Err(Error::Shape(
            "factorization does not belong to this system".into(),
        ));
    }
    if rhs.len() != system.rows() {
        return Err(Error::Shape(format!(
            "right-hand side has {} entries, system has {} rows",
            rhs.len(),
            system.rows()
        )));
    }
    let n = f.n();
    let mut out = solve(f, &rhs[..n])?;
    out.residual_inf = rhs[n..]
        .iter()
        .fold(out.residual_inf, |m, v| m.max(v.abs()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{factorize, factorize_extended};
    use crate::flops::{counted, loglog_slope};
    use crate::matrix::Corners;
    use crate::oracle;
    use proptest::prelude::*;

    fn e1(d1: f64, d2: f64) -> StructuredMatrix {
        StructuredMatrix::new(vec![4.0; 3], vec![1.0; 2], vec![1.0; 2], d1, d2).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn theta_inverse_examples() {
        let f = factorize(&e1(0.0, 0.0)).unwrap();
        let t = theta_inverse(&f);
        assert_eq!(
            t,
            DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [1.0, -4.0, 0.0], [1.0, -4.0, 15.0]])
        );
        assert_eq!(f.theta().matmul(&t).unwrap(), DenseMatrix::identity(3));

        let two = StructuredMatrix::tridiagonal(vec![-1.0, 5.0], vec![1.0], vec![2.0]).unwrap();
        let f = factorize(&two).unwrap();
        assert_eq!(
            theta_inverse(&f),
            DenseMatrix::from_rows(&[[1.0, 0.0], [1.0, 1.0]])
        );

        let one = StructuredMatrix::tridiagonal(vec![9.0], vec![], vec![]).unwrap();
        assert_eq!(
            theta_inverse(&factorize(&one).unwrap()),
            DenseMatrix::identity(1)
        );
    }

    #[test]
    fn psi_inverse_examples() {
        let f = factorize(&e1(1.0, 0.0)).unwrap();
        let p = psi_inverse(&f);
        assert_eq!(
            p,
            DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-3.75, -0.25, 1.0]])
        );
        assert_eq!(f.psi().matmul(&p).unwrap(), DenseMatrix::identity(3));
        assert_eq!(
            psi_inverse(&factorize(&e1(0.0, 2.0)).unwrap()),
            DenseMatrix::identity(3)
        );
    }

    #[test]
    fn r_inverse_examples() {
        let f = factorize(&e1(0.0, 0.0)).unwrap();
        let g = r_inverse(&f).unwrap();
        assert!(close(g[(1, 0)], 1.0 / 60.0, 1e-15));
        assert!(close(g[(2, 2)], 1.0 / 56.0, 1e-15));
        assert!(close(r_inverse_closed_form(&f, 1, 0), 1.0 / 60.0, 1e-15));

        // diagonal: c = 0, d2 = 0
        let m = StructuredMatrix::tridiagonal(vec![2.0, 3.0, 5.0], vec![1.0, 1.0], vec![0.0, 0.0])
            .unwrap();
        let f = factorize(&m).unwrap();
        let g = r_inverse(&f).unwrap();
        let p = f.pivots();
        let expect = DenseMatrix::from_diag(&[1.0 / p[0], 1.0 / p[1], 1.0 / f.mu()]);
        assert_eq!(g, expect);
    }

    #[test]
    fn r_inverse_against_lower_triangular_oracle() {
        for corners in Corners::ALL {
            let m = StructuredMatrix::random_dominant(60, 0.2, corners, 8).unwrap();
            let f = factorize(&m).unwrap();
            let g = r_inverse(&f).unwrap();
            let prod = f.r_factor().matmul(&g).unwrap();
            let err = prod.sub(&DenseMatrix::identity(60)).unwrap().norm_inf();
            assert!(err <= 1e-10, "{corners:?} {err}");
            let oracle = crate::lowertri::lower_inverse(&f.r_factor()).unwrap();
            assert!(oracle::relative_error_inf(&g, &oracle).unwrap() <= 1e-12);
            for i in 0..59 {
                for j in 0..=i {
                    let cf = r_inverse_closed_form(&f, i, j);
                    assert!(close(g[(i, j)], cf, 1e-12), "{i} {j} {} {cf}", g[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn determinant_examples() {
        for (m, det) in [
            (e1(0.0, 0.0), 56.0),
            (e1(1.0, 0.0), 57.0),
            (e1(0.0, 1.0), 57.0),
        ] {
            let f = factorize(&m).unwrap();
            let d = determinant(&f);
            assert_eq!((d.value, d.sign), (det, 1));
            assert!(close(d.log_abs, f64::ln(det), 1e-15));
            let lu = oracle::lu_det(&oracle::lu_decompose(&m.to_dense()).unwrap());
            assert!(close(lu.value, det, 1e-14));
            assert!(close(determinant_via_factors(&f).value, det, 1e-14));
        }
        let two = StructuredMatrix::tridiagonal(vec![3.0, 3.0], vec![1.0], vec![1.0]).unwrap();
        let d = determinant(&factorize(&two).unwrap());
        assert_eq!((d.value, d.sign), (8.0, 1));
    }

    #[test]
    fn determinant_singular() {
        let m =
            StructuredMatrix::tridiagonal(vec![1.0, 2.0, 1.0], vec![1.0; 2], vec![1.0; 2]).unwrap();
        let f = factorize(&m).unwrap();
        assert!(determinant(&f).is_singular());
        assert!(determinant_via_factors(&f).is_singular());
        assert_eq!(inverse(&f), Err(Error::SingularMu));
        assert_eq!(solve(&f, &[1.0, 1.0, 1.0]), Err(Error::SingularMu));
    }

    #[test]
    fn determinant_beyond_f64_range() {
        let m = StructuredMatrix::random_dominant(1500, 0.1, Corners::Both, 5).unwrap();
        let f = factorize_extended(&m).unwrap();
        let d = determinant(&f);
        let g = determinant_via_factors(&f);
        assert_eq!(d.sign, g.sign);
        assert!((d.log_abs - g.log_abs).abs() <= 1e-8 * d.log_abs.abs());
        let lu = oracle::lu_det(&oracle::lu_decompose(&m.to_dense()).unwrap());
        assert_eq!(d.sign, lu.sign);
        assert!((d.log_abs - lu.log_abs).abs() <= 1e-8 * d.log_abs.abs().max(1.0));
    }

    #[test]
    fn inverse_examples() {
        let f = factorize(&e1(0.0, 0.0)).unwrap();
        let inv = inverse(&f).unwrap();
        assert!(close(inv[(0, 0)], 15.0 / 56.0, 1e-15));

        let one = StructuredMatrix::tridiagonal(vec![7.0], vec![], vec![]).unwrap();
        assert_eq!(
            inverse(&factorize(&one).unwrap()).unwrap(),
            DenseMatrix::from_rows(&[[1.0 / 7.0]])
        );

        let eps = 1e-9;
        let m = StructuredMatrix::tridiagonal(vec![1.0; 6], vec![eps; 5], vec![eps; 5]).unwrap();
        let inv = inverse(&factorize(&m).unwrap()).unwrap();
        assert!(inv.sub(&DenseMatrix::identity(6)).unwrap().norm_inf() <= 10.0 * eps);
    }

    #[test]
    fn inverse_matches_oracle() {
        for n in [3usize, 8, 33, 128] {
            for corners in Corners::ALL {
                let m = StructuredMatrix::random_dominant(n, 0.5, corners, n as u64).unwrap();
                let inv = inverse(&factorize(&m).unwrap()).unwrap();
                let lu = oracle::lu_invert(&oracle::lu_decompose(&m.to_dense()).unwrap());
                let err = oracle::relative_error_inf(&inv, &lu).unwrap();
                assert!(err <= 1e-10, "n={n} {corners:?} {err}");
                let id = m.to_dense().matmul(&inv).unwrap();
                assert!(id.sub(&DenseMatrix::identity(n)).unwrap().norm_inf() <= 1e-8);
            }
        }
    }

    #[test]
    fn solve_examples() {
        let f = factorize(&e1(0.0, 0.0)).unwrap();
        let s = solve(&f, &[5.0, 6.0, 5.0]).unwrap();
        assert_eq!(s.x, vec![1.0, 1.0, 1.0]);
        assert_eq!(s.residual_inf, 0.0);
        let z = solve(&f, &[0.0; 3]).unwrap();
        assert_eq!((z.x, z.residual_inf), (vec![0.0; 3], 0.0));

        let f = factorize(&e1(1.0, 0.0)).unwrap();
        let s = solve(&f, &[5.0, 6.0, 6.0]).unwrap();
        for v in s.x {
            assert!(close(v, 1.0, 1e-14));
        }
        assert_eq!(
            solve(&f, &[1.0]),
            Err(Error::Shape(
                "right-hand side has 1 entries, order is 3".into()
            ))
        );
    }

    #[test]
    fn extended_solve_at_large_order() {
        let n = 3000;
        let m = StructuredMatrix::random_dominant(n, 0.1, Corners::Both, 12).unwrap();
        let rhs = m.matvec(&vec![1.0; n]).unwrap();
        let f = factorize_extended(&m).unwrap();
        let s = solve(&f, &rhs).unwrap();
        assert!(s.scaled_residual(&m, &rhs) <= 1e-12);
        assert!(s.x.iter().all(|v| (v - 1.0).abs() <= 1e-9));
    }

    #[test]
    fn solve_flops_are_linear() {
        let mut pts = Vec::new();
        for n in [256usize, 512, 1024, 2048, 4096, 8192] {
            let m = StructuredMatrix::random_dominant(n, 0.1, Corners::Both, 2).unwrap();
            let rhs = vec![1.0; n];
            let (_, c) = counted(|c| {
                let f = crate::factor::factorize_with::<ExtF64>(&m, c).unwrap();
                solve_with(&f, &rhs, c).unwrap()
            });
            pts.push((n as f64, c.total() as f64));
        }
        assert!((loglog_slope(&pts) - 1.0).abs() <= 0.05);
    }

    #[test]
    fn pseudo_solve_cases() {
        let m = StructuredMatrix::random_dominant(20, 0.3, Corners::Both, 6).unwrap();
        let f = factorize(&m).unwrap();
        let rhs: Vec<f64> = (0..20).map(|i| i as f64 - 3.5).collect();

        let square = TallSystem::new(m.clone(), 20).unwrap();
        assert_eq!(
            pseudo_solve(&f, &square, &rhs).unwrap(),
            solve(&f, &rhs).unwrap()
        );

        let tall = TallSystem::new(m.clone(), 35).unwrap();
        let b = tall.matvec(&[1.0; 20]).unwrap();
        let s = pseudo_solve(&f, &tall, &b).unwrap();
        assert!(s.x.iter().all(|v| (v - 1.0).abs() <= 1e-8));
        assert!(s.residual_inf <= 1e-8);

        let mut bad = b.clone();
        bad[30] = 2.0;
        let s = pseudo_solve(&f, &tall, &bad).unwrap();
        assert_eq!(s.residual_inf, 2.0);
        let lsq = oracle::normal_eq_lsq(&tall.to_dense(), &bad).unwrap();
        assert_eq!(lsq.len(), 20);

        assert!(matches!(TallSystem::new(m, 19), Err(Error::Shape(_))));
    }

    proptest! {
        #[test]
        fn solve_recovers_known_vector(
            n in 1usize..200,
            seed in any::<u64>(),
            margin in 0.1f64..2.0,
            corner_idx in 0usize..4,
        ) {
            let corners = if n < 3 { Corners::None } else { Corners::ALL[corner_idx] };
            let m = StructuredMatrix::random_dominant(n, margin, corners, seed).unwrap();
            let x_true: Vec<f64> = (0..n).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
            let rhs = m.matvec(&x_true).unwrap();
            let s = solve(&factorize(&m).unwrap(), &rhs).unwrap();
            prop_assert!(s.scaled_residual(&m, &rhs) <= 1e-12);
        }

        #[test]
        fn determinant_paths_agree(n in 1usize..120, seed in any::<u64>(), corner_idx in 0usize..4) {
            let corners = if n < 3 { Corners::None } else { Corners::ALL[corner_idx] };
            let m = StructuredMatrix::random_dominant(n, 0.2, corners, seed).unwrap();
            let f = factorize(&m).unwrap();
            let (d, g) = (determinant(&f), determinant_via_factors(&f));
            prop_assert_eq!(d.sign, g.sign);
            prop_assert!((d.value - g.value).abs() <= 1e-10 * d.value.abs());
            prop_assert!((d.value - d.sign as f64 * d.log_abs.exp()).abs() <= 1e-12 * d.value.abs());
        }
    }
}
