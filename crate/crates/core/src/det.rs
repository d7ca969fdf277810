/// A determinant with its sign and log-magnitude kept separately, so that
/// orders whose determinant overflows `f64` still compare meaningfully.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetResult {
    /// May be ±inf when the magnitude exceeds `f64`.
    pub value: f64,
    /// -1, 0 or +1; 0 exactly when the matrix is singular.
    pub sign: i8,
    /// `ln |det|`; `-inf` when singular.
    pub log_abs: f64,
}

impl DetResult {
    pub fn singular() -> Self {
        Self {
            value: 0.0,
            sign: 0,
            log_abs: f64::NEG_INFINITY,
        }
    }

    pub(crate) fn from_parts(value: f64, sign: f64, log_abs: f64) -> Self {
        if sign == 0.0 {
            return Self::singular();
        }
        Self {
            value,
            sign: if sign > 0.0 { 1 } else { -1 },
            log_abs,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.sign == 0
    }
}
