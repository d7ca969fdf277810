//! Arithmetic-operation counting.
//!
//! Convention: one count per floating add, subtract, multiply or divide.
//! Negation and copies are free. Counters are passed explicitly into the
//! counted routines; there is no global state.

use std::ops::AddAssign;

/// Receives operation counts from instrumented kernels.
pub trait FlopSink {
    fn add(&mut self, n: u64);
    fn mul(&mut self, n: u64);
    fn div(&mut self, n: u64);
}

/// Discards all counts. Used by the uninstrumented entry points.
impl FlopSink for () {
    #[inline(always)]
    fn add(&mut self, _: u64) {}
    #[inline(always)]
    fn mul(&mut self, _: u64) {}
    #[inline(always)]
    fn div(&mut self, _: u64) {}
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlopCounter {
    /// Additions and subtractions.
    pub adds: u64,
    pub muls: u64,
    pub divs: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.divs
    }
}

impl FlopSink for FlopCounter {
    #[inline]
    fn add(&mut self, n: u64) {
        self.adds += n;
    }
    #[inline]
    fn mul(&mut self, n: u64) {
        self.muls += n;
    }
    #[inline]
    fn div(&mut self, n: u64) {
        self.divs += n;
    }
}

impl AddAssign for FlopCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.adds += rhs.adds;
        self.muls += rhs.muls;
        self.divs += rhs.divs;
    }
}

/// Runs `region` with a fresh counter and returns its result with the counts.
pub fn counted<R>(region: impl FnOnce(&mut FlopCounter) -> R) -> (R, FlopCounter) {
    let mut counter = FlopCounter::new();
    let out = region(&mut counter);
    (out, counter)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x.ln() - mx;
        num += dx * (y.ln() - my);
        den += dx * dx;
    }
    num / den
}
