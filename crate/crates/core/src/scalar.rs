//! Numeric types that accuracy values can be computed in.
//!
//! Floating point is used for reports. Exact rationals let tests compare
//! probabilities and accuracies without tolerances.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    fn ratio(numerator: u64, denominator: u64) -> Self {
        Self::from_u64(numerator).expect("representable count") / Self::from_u64(denominator).expect("representable count")
    }
}

impl<T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug> Scalar for T {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn ratio_in_both_representations() {
        assert_eq!(<f64 as Scalar>::ratio(3, 4), 0.75);
        assert_eq!(<Ratio<i64> as Scalar>::ratio(6, 8), Ratio::new(3, 4));
    }
}
