//! Decomposition of a square matrix into `n` elementary factors
//! `A = A_1 A_2 ... A_n`.
//!
//! Factor `A_m` is the identity except in row `m`, which holds the original
//! entries `a_{m,1..m}`, and column `m` above the diagonal, which holds the
//! coefficients `τ_{1..m-1, m}`. For lower-triangular input every τ is zero,
//! the factors are plain copies of the rows, and their inverses are
//! available entry by entry. That is what makes the closed-form inverses
//! of the bidiagonal and triangular factors in [`crate::factor`] possible.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Strictly upper-triangular table of τ coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TauTable {
    n: usize,
    // row-major n x n, only i < j used
    tau: Vec<f64>,
}

impl TauTable {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            tau: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `τ_{i,j}` for 0-based `i < j`; zero elsewhere.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < j {
            self.tau[i * self.n + j]
        } else {
            0.0
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.tau[i * self.n + j] = v;
    }

    /// τ column `m` above the diagonal.
    pub fn column(&self, m: usize) -> Vec<f64> {
        (0..m).map(|i| self.get(i, m)).collect()
    }

    pub fn all_zero(&self) -> bool {
        self.tau.iter().all(|&t| t == 0.0)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// One elementary factor `A_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryFactor {
    n: usize,
    /// 0-based position of the active row and column.
    m: usize,
    /// Row `m`, columns `0..=m`.
    row: Vec<f64>,
    /// Column `m`, rows `0..m`.
    col: Vec<f64>,
}

impl ElementaryFactor {
    pub fn index(&self) -> usize {
        self.m
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    pub fn col(&self) -> &[f64] {
        &self.col
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::identity(self.n);
        for (j, &v) in self.row.iter().enumerate() {
            d[(self.m, j)] = v;
        }
        for (i, &v) in self.col.iter().enumerate() {
            d[(i, self.m)] = v;
        }
        d
    }

    /// Inverse of a lower-pattern factor (no τ column): identity except row
    /// `m = [-r_1/r_m, ..., -r_{m-1}/r_m, 1/r_m]`.
    pub fn inverse_lower(&self) -> Result<ElementaryFactor> {
        if self.col.iter().any(|&t| t != 0.0) {
            return Err(Error::Shape(
                "factor carries a τ column; not lower-triangular".into(),
            ));
        }
        let diag = self.row[self.m];
        if diag == 0.0 {
            return Err(Error::Singular { index: self.m + 1 });
        }
        let mut row: Vec<f64> = self.row[..self.m].iter().map(|&v| -v / diag).collect();
        row.push(1.0 / diag);
        Ok(ElementaryFactor {
            n: self.n,
            m: self.m,
            row,
            col: vec![0.0; self.m],
        })
    }

    /// `self * x` where `x` is updated in place (row `m` only changes).
    fn apply_left(&self, x: &mut DenseMatrix) {
        debug_assert!(self.col.iter().all(|&t| t == 0.0));
        let cols = x.cols();
        let mut acc = vec![0.0; cols];
        for (j, &r) in self.row.iter().enumerate() {
            if r == 0.0 {
                continue;
            }
            for (a, &v) in acc.iter_mut().zip(x.row(j)) {
                *a += r * v;
            }
        }
        x.row_mut(self.m).copy_from_slice(&acc);
    }

    /// `p * self` in place.
    fn apply_right(&self, p: &mut DenseMatrix) {
        let (m, rows) = (self.m, p.rows());
        for i in 0..rows {
            let pm = p[(i, m)];
            let mut new_m = pm * self.row[m];
            for (k, &t) in self.col.iter().enumerate() {
                new_m += p[(i, k)] * t;
            }
            for (j, &r) in self.row[..m].iter().enumerate() {
                p[(i, j)] += pm * r;
            }
            p[(i, m)] = new_m;
        }
    }
}

/// The ordered factors `A_1 ... A_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSequence {
    n: usize,
    factors: Vec<ElementaryFactor>,
}

impl FactorSequence {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[ElementaryFactor] {
        &self.factors
    }

    pub fn dense_factors(&self) -> Vec<DenseMatrix> {
        self.factors
            .iter()
            .map(ElementaryFactor::to_dense)
            .collect()
    }

    /// `A_1 A_2 ... A_n`.
    pub fn product(&self) -> DenseMatrix {
        let mut p = DenseMatrix::identity(self.n);
        for f in &self.factors {
            f.apply_right(&mut p);
        }
        p
    }

    /// `A_n⁻¹ ... A_1⁻¹` for a lower-pattern sequence, built by applying the
    /// factor inverses to the identity from the left in order `1..n`.
    pub fn inverse_lower(&self) -> Result<DenseMatrix> {
        let mut x = DenseMatrix::identity(self.n);
        for f in &self.factors {
            f.inverse_lower()?.apply_left(&mut x);
        }
        Ok(x)
    }
}

/// Decomposes a square `A` into its τ table and elementary factors.
///
/// Column `m` of the τ table solves the leading `(m-1)`-block system
/// `A[..m, ..m] τ = A[..m, m]`; it is built row by row with the bordering
/// recursion
///
/// ```text
/// τ_{i,k} = (a_{i,k} - Σ_{s<i} a_{i,s} τ_{s,k}) / (a_{i,i} - Σ_{s<i} a_{i,s} τ_{s,i})
/// τ_{s,k} -= τ_{s,i} τ_{i,k}          for s < i
/// ```
///
/// The result equals the negated strict upper part of `Lᵀ` where `L Aᵀ = U`
/// is unpivoted Gaussian elimination of `Aᵀ`.
pub fn tau_decompose(a: &DenseMatrix) -> Result<(TauTable, FactorSequence)> {
    let n = a.check_square()?;
    let tiny = 1e-300 * a.norm_inf();
    let mut tau = TauTable::zeros(n);
    for i in 0..n.saturating_sub(1) {
        let mut denom = a[(i, i)];
        for s in 0..i {
            denom -= a[(i, s)] * tau.get(s, i);
        }
        if denom.abs() <= tiny || !denom.is_finite() {
            return Err(Error::Breakdown { index: i + 1 });
        }
        for k in (i + 1)..n {
            let mut num = a[(i, k)];
            for s in 0..i {
                num -= a[(i, s)] * tau.get(s, k);
            }
            let t = num / denom;
            tau.set(i, k, t);
            for s in 0..i {
                let v = tau.get(s, k) - tau.get(s, i) * t;
                tau.set(s, k, v);
            }
        }
    }
    let factors = (0..n)
        .map(|m| ElementaryFactor {
            n,
            m,
            row: a.row(m)[..=m].to_vec(),
            col: tau.column(m),
        })
        .collect();
    Ok((tau, FactorSequence { n, factors }))
}

fn check_lower(l: &DenseMatrix) -> Result<usize> {
    let n = l.check_square()?;
    if !l.is_lower_triangular() {
        return Err(Error::Shape("matrix is not lower triangular".into()));
    }
    if let Some(m) = (0..n).find(|&m| l[(m, m)] == 0.0) {
        return Err(Error::Singular { index: m + 1 });
    }
    Ok(n)
}

/// Factor sequence of a lower-triangular matrix: factor `m` is the identity
/// with row `m` replaced by `L[m, ..=m]`. Copies only, no arithmetic.
pub fn lower_factor_sequence(l: &DenseMatrix) -> Result<FactorSequence> {
    let n = check_lower(l)?;
    let factors = (0..n)
        .map(|m| ElementaryFactor {
            n,
            m,
            row: l.row(m)[..=m].to_vec(),
            col: vec![0.0; m],
        })
        .collect();
    Ok(FactorSequence { n, factors })
}

/// Inverse of a lower-triangular matrix as the reversed product of its
/// elementary factor inverses.
pub fn lower_inverse(l: &DenseMatrix) -> Result<DenseMatrix> {
    lower_factor_sequence(l)?.inverse_lower()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn identity_has_trivial_factors() {
        let (tau, seq) = tau_decompose(&DenseMatrix::identity(4)).unwrap();
        assert!(tau.all_zero());
        for f in seq.dense_factors() {
            assert_eq!(f, DenseMatrix::identity(4));
        }
    }

    #[test]
    fn lower_triangular_has_zero_tau() {
        let l = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [2.0, 3.0, 0.0], [4.0, 5.0, 6.0]]);
        let (tau, seq) = tau_decompose(&l).unwrap();
        assert!(tau.all_zero());
        assert_eq!(seq, lower_factor_sequence(&l).unwrap());
    }

    #[test]
    fn two_by_two_matches_transpose_elimination() {
        let a = DenseMatrix::from_rows(&[[4.0, 1.0], [1.0, 4.0]]);
        let (tau, seq) = tau_decompose(&a).unwrap();
        assert!(max_diff(&seq.product(), &a) < 1e-14);
        let (l, _) = oracle::gauss_eliminate_transpose(&a).unwrap();
        assert!((tau.get(0, 1) + l.transpose()[(0, 1)]).abs() < 1e-15);
        assert_eq!(tau.get(0, 1), 0.25);
    }

    #[test]
    fn breakdown_on_zero_pivot() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(matches!(
            tau_decompose(&a),
            Err(Error::Breakdown { index: 1 })
        ));
    }

    #[test]
    fn lower_sequence_examples() {
        let l = DenseMatrix::from_rows(&[[2.0, 0.0], [1.0, 4.0]]);
        let f = lower_factor_sequence(&l).unwrap().dense_factors();
        assert_eq!(f[0], DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]]));
        assert_eq!(f[1], DenseMatrix::from_rows(&[[1.0, 0.0], [1.0, 4.0]]));

        for f in lower_factor_sequence(&DenseMatrix::identity(3))
            .unwrap()
            .dense_factors()
        {
            assert_eq!(f, DenseMatrix::identity(3));
        }

        let l3 = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [2.0, 3.0, 0.0], [4.0, 5.0, 6.0]]);
        let seq = lower_factor_sequence(&l3).unwrap();
        assert_eq!(seq.factors().len(), 3);
        // dense product of the materialized factors
        let mut p = DenseMatrix::identity(3);
        for f in seq.dense_factors() {
            p = p.matmul(&f).unwrap();
        }
        assert_eq!(p, l3);
        assert_eq!(seq.product(), l3);
    }

    #[test]
    fn lower_inverse_examples() {
        let l = DenseMatrix::from_rows(&[[2.0, 0.0], [1.0, 4.0]]);
        let inv = lower_inverse(&l).unwrap();
        assert_eq!(inv, DenseMatrix::from_rows(&[[0.5, 0.0], [-0.125, 0.25]]));
        let gj = oracle::gauss_jordan_invert(&l).unwrap();
        assert!(max_diff(&inv, &gj) < 1e-15);

        assert_eq!(
            lower_inverse(&DenseMatrix::identity(3)).unwrap(),
            DenseMatrix::identity(3)
        );
        assert_eq!(
            lower_inverse(&DenseMatrix::from_diag(&[2.0, 4.0, 5.0])).unwrap(),
            DenseMatrix::from_diag(&[0.5, 0.25, 0.2])
        );
    }

    #[test]
    fn lower_inverse_rejects_bad_input() {
        let sing = DenseMatrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]);
        assert!(matches!(
            lower_inverse(&sing),
            Err(Error::Singular { index: 2 })
        ));
        let upper = DenseMatrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(lower_inverse(&upper), Err(Error::Shape(_))));
    }

    #[test]
    fn per_factor_route_equals_lower_inverse() {
        let l = DenseMatrix::from_rows(&[[3.0, 0.0, 0.0], [-1.0, 0.5, 0.0], [2.0, 0.25, -4.0]]);
        let seq = lower_factor_sequence(&l).unwrap();
        let mut p = DenseMatrix::identity(3);
        for f in seq.factors().iter().rev() {
            p = p.matmul(&f.inverse_lower().unwrap().to_dense()).unwrap();
        }
        let direct = lower_inverse(&l).unwrap();
        assert!(max_diff(&p, &direct) < 1e-15);
    }

    fn random_lower(n: usize, entries: &[f64]) -> DenseMatrix {
        let mut k = 0;
        DenseMatrix::from_fn(n, n, |i, j| {
            let v = entries[k % entries.len()];
            k += 1;
            match i.cmp(&j) {
                std::cmp::Ordering::Greater => v,
                std::cmp::Ordering::Equal => 0.5 + v.abs(),
                std::cmp::Ordering::Less => 0.0,
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lower_inverse_is_inverse(n in 1usize..24, entries in prop::collection::vec(-1.0f64..1.0, 1..64)) {
            let l = random_lower(n, &entries);
            let inv = lower_inverse(&l).unwrap();
            let err = inv.matmul(&l).unwrap().sub(&DenseMatrix::identity(n)).unwrap().norm_inf();
            let cond = l.norm_inf() * inv.norm_inf();
            prop_assert!(err <= 1e-14 * n as f64 * cond.max(1.0), "err {} cond {}", err, cond);
            prop_assert!(max_diff(&lower_factor_sequence(&l).unwrap().product(), &l) == 0.0);
        }

        #[test]
        fn tau_matches_transpose_elimination(n in 1usize..16, entries in prop::collection::vec(-1.0f64..1.0, 1..64)) {
            let mut k = 0;
            let a = DenseMatrix::from_fn(n, n, |i, j| {
                let v = entries[k % entries.len()];
                k += 1;
                if i == j { n as f64 + 1.0 } else { v }
            });
            let (tau, seq) = tau_decompose(&a).unwrap();
            let rel = seq.product().sub(&a).unwrap().norm_inf() / a.norm_inf();
            prop_assert!(rel <= 1e-12);
            let (l, _) = oracle::gauss_eliminate_transpose(&a).unwrap();
            let lt = l.transpose();
            for i in 0..n {
                for j in (i + 1)..n {
                    prop_assert!((tau.get(i, j) + lt[(i, j)]).abs() <= 1e-12);
                }
            }
        }
    }
}
