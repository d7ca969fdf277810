//! Dense reference computations used as ground truth.
//!
//! Nothing here depends on the structured factorization: these are the
//! textbook algorithms (LU with partial pivoting, Gauss-Jordan, normal
//! equations) the structured results are checked against.

use crate::dense::DenseMatrix;
use crate::det::DetResult;
use crate::error::{Error, Result};
use crate::flops::FlopSink;

pub use crate::flops::{counted, FlopCounter};

/// Packed LU factors of a row-permuted matrix: `P A = L U`, `L` unit lower.
#[derive(Clone, Debug)]
pub struct LuResult {
    pub lu: DenseMatrix,
    /// `perm[i]` is the source row of row `i` of `P A`.
    pub perm: Vec<usize>,
    /// Permutation parity, ±1.
    pub sign: i8,
    pub num_swaps: usize,
}

fn pivot_threshold(a: &DenseMatrix) -> f64 {
    1e-300 * a.norm_inf()
}

pub fn lu_decompose(a: &DenseMatrix) -> Result<LuResult> {
    lu_decompose_with(a, &mut ())
}

/// Doolittle elimination with partial (row) pivoting.
pub fn lu_decompose_with(a: &DenseMatrix, flops: &mut impl FlopSink) -> Result<LuResult> {
    let n = a.check_square()?;
    let tiny = pivot_threshold(a);
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut num_swaps = 0;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pmax <= tiny || !pmax.is_finite() {
            return Err(Error::Singular { index: k + 1 });
        }
        if p != k {
            lu.swap_rows(p, k);
            perm.swap(p, k);
            num_swaps += 1;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            if l == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= l * v;
            }
        }
        let m = (n - k - 1) as u64;
        flops.div(m);
        flops.mul(m * m);
        flops.add(m * m);
    }
    Ok(LuResult {
        lu,
        perm,
        sign: if num_swaps % 2 == 0 { 1 } else { -1 },
        num_swaps,
    })
}

impl LuResult {
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Unit lower factor.
    pub fn l(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n(), self.n(), |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn u(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n(), self.n(), |i, j| {
            if i <= j {
                self.lu[(i, j)]
            } else {
                0.0
            }
        })
    }

    /// `P A` for the original `A`.
    pub fn permute_rows(&self, a: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(self.n(), a.cols(), |i, j| a[(self.perm[i], j)])
    }
}

pub fn lu_solve(lu: &LuResult, rhs: &[f64]) -> Result<Vec<f64>> {
    lu_solve_with(lu, rhs, &mut ())
}

pub fn lu_solve_with(lu: &LuResult, rhs: &[f64], flops: &mut impl FlopSink) -> Result<Vec<f64>> {
    let n = lu.n();
    if rhs.len() != n {
        return Err(Error::Shape(format!(
            "order {n} system with {} right-hand values",
            rhs.len()
        )));
    }
    let f = &lu.lu;
    let mut x: Vec<f64> = lu.perm.iter().map(|&p| rhs[p]).collect();
    for i in 0..n {
        let mut s = x[i];
        for j in 0..i {
            s -= f[(i, j)] * x[j];
        }
        x[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= f[(i, j)] * x[j];
        }
        x[i] = s / f[(i, i)];
    }
    let tri = (n * n.saturating_sub(1) / 2) as u64;
    flops.mul(2 * tri);
    flops.add(2 * tri);
    flops.div(n as u64);
    Ok(x)
}

/// Inverse by solving against the `n` unit vectors.
pub fn lu_invert(lu: &LuResult) -> DenseMatrix {
    lu_invert_with(lu, &mut ())
}

pub fn lu_invert_with(lu: &LuResult, flops: &mut impl FlopSink) -> DenseMatrix {
    let n = lu.n();
    let mut inv = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = lu_solve_with(lu, &e, flops).expect("length matches by construction");
        e[j] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            inv[(i, j)] = v;
        }
    }
    inv
}

pub fn lu_det(lu: &LuResult) -> DetResult {
    let mut value = lu.sign as f64;
    let mut sign = lu.sign as f64;
    let mut log_abs = 0.0;
    for i in 0..lu.n() {
        let u = lu.lu[(i, i)];
        value *= u;
        sign *= u.signum();
        log_abs += u.abs().ln();
    }
    DetResult::from_parts(value, sign, log_abs)
}

/// Convenience: dense inverse through pivoted LU.
pub fn dense_inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(lu_invert(&lu_decompose(a)?))
}

/// Gauss-Jordan inversion with partial pivoting on `[A | I]`.
pub fn gauss_jordan_invert(a: &DenseMatrix) -> Result<DenseMatrix> {
    gauss_jordan_invert_with(a, &mut ())
}

pub fn gauss_jordan_invert_with(a: &DenseMatrix, flops: &mut impl FlopSink) -> Result<DenseMatrix> {
    let n = a.check_square()?;
    let tiny = pivot_threshold(a);
    let mut w = a.clone();
    let mut inv = DenseMatrix::identity(n);
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, w[(i, k)].abs()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pmax <= tiny || !pmax.is_finite() {
            return Err(Error::Singular { index: k + 1 });
        }
        w.swap_rows(p, k);
        inv.swap_rows(p, k);
        let pivot = w[(k, k)];
        for j in 0..n {
            w[(k, j)] /= pivot;
            inv[(k, j)] /= pivot;
        }
        flops.div(2 * n as u64);
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = w[(i, k)];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                let (wk, ik) = (w[(k, j)], inv[(k, j)]);
                w[(i, j)] -= f * wk;
                inv[(i, j)] -= f * ik;
            }
            flops.mul(2 * n as u64);
            flops.add(2 * n as u64);
        }
    }
    Ok(inv)
}

/// Unpivoted Gaussian elimination of `Aᵀ`: returns unit lower `L` and upper
/// `U` with `L Aᵀ = U`.
pub fn gauss_eliminate_transpose(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = a.check_square()?;
    let tiny = pivot_threshold(a);
    let mut u = a.transpose();
    let mut l = DenseMatrix::identity(n);
    for k in 0..n {
        let pivot = u[(k, k)];
        if pivot.abs() <= tiny || !pivot.is_finite() {
            return Err(Error::Breakdown { index: k + 1 });
        }
        for i in (k + 1)..n {
            let m = u[(i, k)] / pivot;
            if m == 0.0 {
                continue;
            }
            for j in 0..n {
                let (uk, lk) = (u[(k, j)], l[(k, j)]);
                u[(i, j)] -= m * uk;
                l[(i, j)] -= m * lk;
            }
        }
    }
    Ok((l, u))
}

/// `‖P - Q‖∞ / ‖Q‖∞`.
pub fn relative_error_inf(p: &DenseMatrix, q: &DenseMatrix) -> Result<f64> {
    Ok(p.sub(q)?.norm_inf() / q.norm_inf())
}

/// Least squares through `AᵀA x = Aᵀ rhs`.
pub fn normal_eq_lsq(a: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if a.rows() != rhs.len() {
        return Err(Error::Shape(format!(
            "{} rows with {} right-hand values",
            a.rows(),
            rhs.len()
        )));
    }
    let at = a.transpose();
    let normal = at.matmul(a)?;
    let lu = lu_decompose(&normal)?;
    lu_solve(&lu, &at.matvec(rhs)?)
}

/// Moore-Penrose inverse of a full-column-rank matrix, `(AᵀA)⁻¹Aᵀ`.
pub fn pinv_normal_eq(a: &DenseMatrix) -> Result<DenseMatrix> {
    pinv_normal_eq_with(a, &mut ())
}

pub fn pinv_normal_eq_with(a: &DenseMatrix, flops: &mut impl FlopSink) -> Result<DenseMatrix> {
    let (m, n) = (a.rows() as u64, a.cols() as u64);
    let at = a.transpose();
    let normal = at.matmul(a)?;
    flops.mul(n * n * m);
    flops.add(n * n * m);
    let inv = lu_invert_with(&lu_decompose_with(&normal, flops)?, flops);
    flops.mul(n * n * m);
    flops.add(n * n * m);
    inv.matmul(&at)
}

/// Determinant by cofactor expansion; exponential cost, for tiny fixtures.
pub fn cofactor_det(a: &DenseMatrix) -> Result<f64> {
    let n = a.check_square()?;
    if n > 9 {
        return Err(Error::Shape(format!(
            "cofactor expansion limited to order 9, got {n}"
        )));
    }
    fn rec(a: &DenseMatrix, rows: &[usize], cols: &[usize]) -> f64 {
        if rows.len() == 1 {
            return a[(rows[0], cols[0])];
        }
        let mut s = 0.0;
        for (k, &c) in cols.iter().enumerate() {
            let v = a[(rows[0], c)];
            if v == 0.0 {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * v * rec(a, &rows[1..], &rest);
        }
        s
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(rec(a, &idx, &idx))
}
