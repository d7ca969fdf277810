//! Scalar types for the structured recurrences.
//!
//! The λ sequence of a diagonally dominant matrix grows geometrically and
//! leaves the `f64` range after a few hundred steps. [`ExtF64`] keeps a
//! 53-bit significand with a separate 64-bit binary exponent so the same
//! recurrences can run at any practical order.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic required by the factorization, determinant and solve kernels.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Nearest `f64`; saturates to ±inf or flushes to zero outside its range.
    fn to_f64(self) -> f64;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn is_zero(self) -> bool;
    fn is_finite(self) -> bool;
    /// `-1`, `0` or `1`.
    fn signum(self) -> f64;
    /// Natural log of the magnitude; `-inf` for zero.
    fn ln_abs(self) -> f64;
    fn to_ext(self) -> ExtF64;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn is_zero(self) -> bool {
        self == 0.0
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn signum(self) -> f64 {
        if self == 0.0 {
            0.0
        } else {
            f64::signum(self)
        }
    }
    fn ln_abs(self) -> f64 {
        self.abs().ln()
    }
    fn to_ext(self) -> ExtF64 {
        ExtF64::from_f64(self)
    }
}

const EXP_MASK: u64 = 0x7ff << 52;

/// Splits a finite nonzero `x` into `m * 2^e` with `0.5 <= |m| < 1`.
fn frexp(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let biased = ((bits & EXP_MASK) >> 52) as i64;
    if biased == 0 {
        // subnormal: lift into the normal range first
        let (m, e) = frexp(x * f64::from_bits((1023 + 64) << 52));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !EXP_MASK) | (1022 << 52));
    (m, biased - 1022)
}

/// `2^k` for `-1022 <= k <= 1023`.
#[inline]
fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// Extended-exponent float: `mant * 2^exp`, with `0.5 <= |mant| < 1`
/// or `mant == 0 && exp == 0`.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtF64 {
    mant: f64,
    exp: i64,
}

impl ExtF64 {
    pub const ZERO: Self = Self { mant: 0.0, exp: 0 };

    fn normalized(mant: f64, exp: i64) -> Self {
        if mant == 0.0 {
            return Self::ZERO;
        }
        if !mant.is_finite() {
            return Self { mant, exp: 0 };
        }
        let (m, e) = frexp(mant);
        Self {
            mant: m,
            exp: exp.saturating_add(e),
        }
    }

    pub fn mantissa(self) -> f64 {
        self.mant
    }

    pub fn exponent(self) -> i64 {
        self.exp
    }

    pub fn abs(self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }
}

impl Default for ExtF64 {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for ExtF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for ExtF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mant == 0.0 || !self.mant.is_finite() {
            return write!(f, "{}", self.mant);
        }
        let log10 = self.ln_abs() / std::f64::consts::LN_10;
        let e10 = log10.floor();
        let m10 = 10f64.powf(log10 - e10) * self.mant.signum();
        write!(f, "{m10}e{e10}")
    }
}

impl Neg for ExtF64 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Mul for ExtF64 {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::normalized(self.mant * rhs.mant, self.exp.saturating_add(rhs.exp))
    }
}

impl Div for ExtF64 {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        Self::normalized(self.mant / rhs.mant, self.exp.saturating_sub(rhs.exp))
    }
}

impl Add for ExtF64 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if rhs.mant == 0.0 {
            return self;
        }
        if self.mant == 0.0 {
            return rhs;
        }
        if !self.mant.is_finite() || !rhs.mant.is_finite() {
            return Self {
                mant: self.mant + rhs.mant,
                exp: 0,
            };
        }
        let shift = self.exp.saturating_sub(rhs.exp);
        // beyond 64 bits of offset the smaller term is below half an ulp
        if shift > 64 {
            self
        } else if shift < -64 {
            rhs
        } else if shift >= 0 {
            Self::normalized(self.mant + rhs.mant * pow2(-shift), self.exp)
        } else {
            Self::normalized(self.mant * pow2(shift) + rhs.mant, rhs.exp)
        }
    }
}

impl Sub for ExtF64 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Scalar for ExtF64 {
    fn from_f64(v: f64) -> Self {
        Self::normalized(v, 0)
    }

    fn to_f64(self) -> f64 {
        if self.mant == 0.0 || !self.mant.is_finite() {
            return self.mant;
        }
        if self.exp > 1024 {
            return f64::INFINITY.copysign(self.mant);
        }
        if self.exp < -1080 {
            return 0.0f64.copysign(self.mant);
        }
        let half = self.exp / 2;
        self.mant * pow2(half) * pow2(self.exp - half)
    }

    fn is_zero(self) -> bool {
        self.mant == 0.0
    }

    fn is_finite(self) -> bool {
        self.mant.is_finite()
    }

    fn signum(self) -> f64 {
        Scalar::signum(self.mant)
    }

    fn ln_abs(self) -> f64 {
        self.mant.abs().ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    fn to_ext(self) -> ExtF64 {
        self
    }
}
