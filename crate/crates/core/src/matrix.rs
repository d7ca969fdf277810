//! The almost-tridiagonal matrix: a tridiagonal band plus the two corner
//! entries `(n, 1)` and `(1, n)`.
//!
//! ```text
//! | a1  c1                d2 |
//! | b1  a2  c2               |
//! |     b2  ..  ..           |
//! |         ..  ..  c(n-1)   |
//! | d1      b(n-1)  an       |
//! ```

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredMatrix {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d1: f64,
    d2: f64,
}

/// Which corner entries a generated matrix carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Corners {
    None,
    D1,
    D2,
    Both,
}

impl Corners {
    pub const ALL: [Corners; 4] = [Corners::None, Corners::D1, Corners::D2, Corners::Both];

    pub fn has_d1(self) -> bool {
        matches!(self, Corners::D1 | Corners::Both)
    }

    pub fn has_d2(self) -> bool {
        matches!(self, Corners::D2 | Corners::Both)
    }
}

impl std::str::FromStr for Corners {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Corners::None),
            "d1" => Ok(Corners::D1),
            "d2" => Ok(Corners::D2),
            "both" => Ok(Corners::Both),
            other => Err(Error::Structure(format!(
                "unknown corner selection {other:?} (expected none, d1, d2 or both)"
            ))),
        }
    }
}

/// Row-wise diagonal dominance summary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominanceReport {
    pub is_dominant: bool,
    /// 1-based row attaining the minimum margin.
    pub worst_row: usize,
    /// `min_i |a_i| - (off-diagonal row sum)`.
    pub margin: f64,
}

impl StructuredMatrix {
    /// Builds a matrix, checking lengths and the corner rule (`n >= 3`
    /// whenever a corner is nonzero).
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d1: f64, d2: f64) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::Structure("order must be positive".into()));
        }
        if b.len() != n - 1 || c.len() != n - 1 {
            return Err(Error::Structure(format!(
                "order {n} needs {} sub- and super-diagonal entries, got {} and {}",
                n - 1,
                b.len(),
                c.len()
            )));
        }
        if n < 3 && (d1 != 0.0 || d2 != 0.0) {
            return Err(Error::Structure(format!(
                "corner entries need order >= 3 (got order {n})"
            )));
        }
        Ok(Self { a, b, c, d1, d2 })
    }

    /// Tridiagonal matrix without corners.
    pub fn tridiagonal(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        Self::new(a, b, c, 0.0, 0.0)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Main diagonal.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Subdiagonal; `b[i]` sits at row `i + 1`, column `i` (0-based).
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Superdiagonal; `c[i]` sits at row `i`, column `i + 1` (0-based).
    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Bottom-left corner.
    pub fn d1(&self) -> f64 {
        self.d1
    }

    /// Top-right corner.
    pub fn d2(&self) -> f64 {
        self.d2
    }

    /// Sum of off-diagonal magnitudes in 0-based row `i`, corners included.
    fn row_offdiag_sum(&self, i: usize) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        if i > 0 {
            s += self.b[i - 1].abs();
        }
        if i + 1 < n {
            s += self.c[i].abs();
        }
        if n >= 3 {
            if i == 0 {
                s += self.d2.abs();
            }
            if i == n - 1 {
                s += self.d1.abs();
            }
        }
        s
    }

    /// Row-wise dominance report. Advisory only: factorization may succeed
    /// on non-dominant matrices.
    pub fn validate(&self) -> DominanceReport {
        let mut worst_row = 0;
        let mut margin = f64::INFINITY;
        for i in 0..self.n() {
            let m = self.a[i].abs() - self.row_offdiag_sum(i);
            if m < margin || (m.is_nan() && !margin.is_nan()) {
                margin = m;
                worst_row = i;
            }
        }
        DominanceReport {
            is_dominant: margin > 0.0,
            worst_row: worst_row + 1,
            margin,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.a[i];
        }
        for i in 0..n - 1 {
            m[(i + 1, i)] = self.b[i];
            m[(i, i + 1)] = self.c[i];
        }
        if n >= 3 {
            m[(n - 1, 0)] = self.d1;
            m[(0, n - 1)] = self.d2;
        }
        m
    }

    /// `A x` in O(n).
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::Shape(format!(
                "order {n} matrix times vector of length {}",
                x.len()
            )));
        }
        let mut y: Vec<f64> = self.a.iter().zip(x).map(|(a, x)| a * x).collect();
        for i in 0..n - 1 {
            y[i + 1] += self.b[i] * x[i];
            y[i] += self.c[i] * x[i + 1];
        }
        if n >= 3 {
            y[n - 1] += self.d1 * x[0];
            y[0] += self.d2 * x[n - 1];
        }
        Ok(y)
    }

    /// Maximum absolute row sum, computed from the band.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n())
            .map(|i| self.a[i].abs() + self.row_offdiag_sum(i))
            .fold(0.0, f64::max)
    }

    /// Random row-dominant matrix, deterministic in `seed`.
    ///
    /// Off-diagonal entries are uniform on `[-1, 1]`, with sub-diagonal
    /// magnitudes floored at 0.1. Each diagonal entry gets a random sign and
    /// magnitude `row sum + margin`, so [`validate`](Self::validate) reports a
    /// margin of at least `margin`.
    pub fn random_dominant(n: usize, margin: f64, corners: Corners, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Structure("order must be positive".into()));
        }
        if n < 3 && corners != Corners::None {
            return Err(Error::Structure(format!(
                "corner entries need order >= 3 (got order {n})"
            )));
        }
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(Error::Structure(format!(
                "margin must be positive, got {margin}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<f64> = (0..n - 1)
            .map(|_| {
                let mag = rng.random_range(0.1..=1.0);
                if rng.random_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let c: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let d1 = if corners.has_d1() {
            rng.random_range(-1.0..=1.0)
        } else {
            0.0
        };
        let d2 = if corners.has_d2() {
            rng.random_range(-1.0..=1.0)
        } else {
            0.0
        };
        let mut m = Self {
            a: vec![0.0; n],
            b,
            c,
            d1,
            d2,
        };
        for i in 0..n {
            let off = m.row_offdiag_sum(i);
            let mut mag = off + margin;
            while mag - off < margin {
                mag = f64::from_bits(mag.to_bits() + 1);
            }
            m.a[i] = if rng.random_bool(0.5) { mag } else { -mag };
        }
        Ok(m)
    }

    /// Text form: order, diagonal, sub-diagonal, super-diagonal, `d1 d2`,
    /// one per line. Values use the shortest representation that reads
    /// back to the same bits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "{}", self.n());
        let _ = writeln!(out, "{}", join(&self.a));
        let _ = writeln!(out, "{}", join(&self.b));
        let _ = writeln!(out, "{}", join(&self.c));
        let _ = writeln!(out, "{} {}", self.d1, self.d2);
        out
    }

    /// Parses the format written by [`to_text`](Self::to_text).
    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.split('\n').map(|l| l.trim_end_matches('\r')).collect();
        let line = |i: usize| lines.get(i).copied().unwrap_or("");
        if lines.len() < 5 {
            return Err(Error::Parse {
                line: lines.len(),
                field: 0,
                message: "expected 5 lines: n, a, b, c, d1 d2".into(),
            });
        }
        if let Some((extra, _)) = lines
            .iter()
            .enumerate()
            .skip(5)
            .find(|(_, l)| !l.trim().is_empty())
        {
            return Err(Error::Parse {
                line: extra + 1,
                field: 1,
                message: "unexpected content after the corner line".into(),
            });
        }

        let n_tokens: Vec<&str> = line(0).split_whitespace().collect();
        if n_tokens.len() != 1 {
            return Err(Error::Parse {
                line: 1,
                field: n_tokens.len().min(2),
                message: "expected a single order value".into(),
            });
        }
        let n: usize = n_tokens[0].parse().map_err(|_| Error::Parse {
            line: 1,
            field: 1,
            message: format!("invalid order {:?}", n_tokens[0]),
        })?;
        if n == 0 {
            return Err(Error::Parse {
                line: 1,
                field: 1,
                message: "order must be positive".into(),
            });
        }

        let a = parse_reals(line(1), 2, n, "a")?;
        let b = parse_reals(line(2), 3, n - 1, "b")?;
        let c = parse_reals(line(3), 4, n - 1, "c")?;
        let d = parse_reals(line(4), 5, 2, "d1 d2")?;
        Self::new(a, b, c, d[0], d[1])
    }
}

/// Parses exactly `expected` finite reals from one line.
pub(crate) fn parse_reals(
    text: &str,
    line: usize,
    expected: usize,
    what: &str,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(expected.min(1 << 16));
    for (k, tok) in text.split_whitespace().enumerate() {
        if k >= expected {
            return Err(Error::Parse {
                line,
                field: k + 1,
                message: format!("{what} has more than {expected} entries"),
            });
        }
        out.push(parse_real(tok, line, k + 1)?);
    }
    if out.len() != expected {
        return Err(Error::Parse {
            line,
            field: out.len() + 1,
            message: format!("{what} has {} of {expected} entries", out.len()),
        });
    }
    Ok(out)
}

pub(crate) fn parse_real(tok: &str, line: usize, field: usize) -> Result<f64> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            field,
            message: format!("invalid finite number {tok:?}"),
        }),
    }
}

/// Reads a whitespace-separated vector of finite reals.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (ln, l) in text.lines().enumerate() {
        for (k, tok) in l.split_whitespace().enumerate() {
            out.push(parse_real(tok, ln + 1, k + 1)?);
        }
    }
    Ok(out)
}

/// Writes one value per line.
pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::new();
    for x in v {
        let _ = writeln!(out, "{x}");
    }
    out
}
