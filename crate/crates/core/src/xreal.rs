//! Extended reals: finite floats plus `±∞`, never NaN.

use core::cmp::Ordering;
use core::fmt;
use core::ops::Neg;

use crate::error::{Error, Result};

/// A value of `[-∞, +∞]`.
///
/// The ordering is total. Arithmetic other than negation is deliberately
/// absent: envelopes only ever take minima and maxima, so `∞ - ∞` can
/// never arise.
#[derive(Clone, Copy, PartialEq)]
pub struct XReal(f64);

impl XReal {
    pub const INFINITY: XReal = XReal(f64::INFINITY);
    pub const NEG_INFINITY: XReal = XReal(f64::NEG_INFINITY);
    pub const ZERO: XReal = XReal(0.0);

    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::NotANumber)
        } else {
            // -0.0 and 0.0 compare equal; store one of them
            Ok(XReal(if v == 0.0 { 0.0 } else { v }))
        }
    }

    /// Panics on NaN. For literals and values already known to be valid.
    pub fn from_finite(v: f64) -> Self {
        Self::new(v).expect("NaN passed to XReal::from_finite")
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn min(self, other: Self) -> Self {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

impl Eq for XReal {}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // never NaN by construction
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl Neg for XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        XReal::new(-self.0).unwrap_or(XReal::ZERO)
    }
}

impl TryFrom<f64> for XReal {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        XReal::new(v)
    }
}

impl From<XReal> for f64 {
    fn from(x: XReal) -> f64 {
        x.0
    }
}

impl fmt::Debug for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}
