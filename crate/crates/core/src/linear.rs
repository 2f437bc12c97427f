//! Exact piecewise-linear functions used for distortions, loss functions and
//! test functions.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::num::{parse_rational, Rational};

/// Linear interpolation through knots with strictly increasing abscissae.
/// Outside the knot range the nearest piece is extended.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiecewiseLinear {
    knots: Vec<(Rational, Rational)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(Rational, Rational)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidArgument("piecewise-linear function needs a knot".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument("knot abscissae must be strictly increasing".into()));
        }
        Ok(PiecewiseLinear { knots })
    }

    /// `x -> intercept + slope x` through the two knots at 0 and 1.
    pub fn affine(intercept: Rational, slope: Rational) -> Self {
        let at_one = &intercept + &slope;
        PiecewiseLinear { knots: vec![(Rational::zero(), intercept), (Rational::one(), at_one)] }
    }

    /// Parse `"x1:y1,x2:y2,..."`.
    pub fn parse(text: &str) -> Result<Self> {
        let knots = text
            .split(',')
            .map(|pair| {
                let (x, y) =
                    pair.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("knot {pair:?} is not x:y")))?;
                Ok((parse_rational(x)?, parse_rational(y)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(knots)
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    /// Index `i` of the piece `[x_i, x_{i+1}]` used at `x`.
    fn piece(&self, x: &Rational) -> usize {
        let k = self.knots.partition_point(|(kx, _)| kx <= x);
        k.saturating_sub(1).min(self.knots.len().saturating_sub(2))
    }

    pub fn slope_of_piece(&self, i: usize) -> Rational {
        if self.knots.len() < 2 {
            return Rational::zero();
        }
        let (x0, y0) = &self.knots[i];
        let (x1, y1) = &self.knots[i + 1];
        (y1 - y0) / (x1 - x0)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        if self.knots.len() == 1 {
            return self.knots[0].1.clone();
        }
        let i = self.piece(x);
        let (x0, y0) = &self.knots[i];
        y0 + self.slope_of_piece(i) * (x - x0)
    }

    /// `∫_a^b f(x) dx`, exact.
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Rational {
        if a > b {
            return -self.integrate(b, a);
        }
        let mut cuts = vec![a.clone()];
        cuts.extend(self.knots.iter().map(|(x, _)| x.clone()).filter(|x| x > a && x < b));
        cuts.push(b.clone());
        let two = Rational::from_integer(2.into());
        cuts.windows(2).map(|w| (&w[1] - &w[0]) * (self.eval(&w[0]) + self.eval(&w[1])) / &two).sum()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.knots.windows(2).all(|w| w[0].1 <= w[1].1)
    }

    pub fn is_constant(&self) -> bool {
        self.knots.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

impl fmt::Display for PiecewiseLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, y)) in self.knots.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}:{y}")?;
        }
        Ok(())
    }
}
