//! Order-independent accumulation of real-valued per-entry quantities.

use core::iter::Sum;
use core::ops::{Add, AddAssign};

const FRACTION_BITS: i32 = 80;
const SCALE: f64 = (1u128 << FRACTION_BITS) as f64;

/// A fixed-point sum with 80 fractional bits.
///
/// Each value is truncated onto the 2^-80 grid once when it enters the sum;
/// after that addition is exact integer arithmetic, so any grouping or order
/// of the same values yields the same bits. Headroom is about 2^46 in
/// magnitude, far above any corpus total of percentages or lengths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactSum(i128);

impl ExactSum {
    pub const ZERO: ExactSum = ExactSum(0);

    pub fn from_f64(value: f64) -> Self {
        debug_assert!(value.is_finite());
        ExactSum((value * SCALE) as i128)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE
    }

    pub fn raw(self) -> i128 {
        self.0
    }
}

impl Add for ExactSum {
    type Output = ExactSum;

    fn add(self, rhs: ExactSum) -> ExactSum {
        ExactSum(self.0 + rhs.0)
    }
}

impl AddAssign for ExactSum {
    fn add_assign(&mut self, rhs: ExactSum) {
        self.0 += rhs.0;
    }
}

impl AddAssign<f64> for ExactSum {
    fn add_assign(&mut self, rhs: f64) {
        self.0 += ExactSum::from_f64(rhs).0;
    }
}

impl Sum for ExactSum {
    fn sum<I: Iterator<Item = ExactSum>>(iter: I) -> Self {
        iter.fold(ExactSum::ZERO, Add::add)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ExactSum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}
