//! Laws of capital positions: finite atoms, piecewise quantile functions and
//! positions on equi-probable spaces.

mod finite;
mod piecewise;
mod position;
mod transform;

pub use finite::FiniteDistribution;
pub use piecewise::{coupled_distance, PiecewiseQuantile, Segment, Shape};
pub use position::{kyfan_distance, Position};
pub use transform::{
    negative_part_quantile, transform_decreasing, transform_increasing, truncate, verify_transform_identity,
    MonotoneMap, NegativePartQuantile, Transform,
};

use crate::error::Result;
use crate::num::{Extended, Rational, Scalar};

/// A bounded law given by its CDF and quantile functions.
///
/// `quantile_left(t) = sup{x : F(x) < t}` and
/// `quantile_right(t) = inf{x : F(x) > t}`, so `quantile_left(0) = -inf` and
/// `quantile_right(1) = +inf`.
pub trait Law: Send + Sync {
    type Value: Scalar;

    /// `P(X <= x)`.
    fn cdf(&self, x: &Rational) -> Rational;
    /// `P(X < x)`.
    fn cdf_left(&self, x: &Rational) -> Rational;
    fn quantile_left(&self, t: &Rational) -> Extended<Self::Value>;
    fn quantile_right(&self, t: &Rational) -> Extended<Self::Value>;
    /// `∫_lo^hi q(z) dz` for `0 <= lo <= hi <= 1`.
    fn integrate_quantile(&self, lo: &Rational, hi: &Rational) -> Result<Rational>;
    /// Some `s` in `(0, t)` with `quantile_left(s) >= 0`, if one exists.
    fn nonnegative_level_below(&self, t: &Rational) -> Option<Rational>;
    fn essinf(&self) -> Self::Value;
    fn esssup(&self) -> Self::Value;

    fn as_finite(&self) -> Option<&FiniteDistribution> {
        None
    }

    /// `P(X < 0)`.
    fn default_probability(&self) -> Rational {
        self.cdf_left(&Rational::from_integer(0.into()))
    }
}
