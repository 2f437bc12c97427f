use std::fmt;

use num_traits::{One, Signed, Zero};

use super::FiniteDistribution;
use crate::error::{Error, Result};
use crate::num::Rational;

/// Values of a random variable on `n` states of probability `1/n` each.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    values: Vec<Rational>,
}

impl Position {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Position { values })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn to_distribution(&self) -> FiniteDistribution {
        FiniteDistribution::equiprobable(self.values.iter().cloned()).expect("positions are nonempty")
    }

    /// `P(X < 0)`.
    pub fn default_probability(&self) -> Rational {
        let k = self.values.iter().filter(|v| v.is_negative()).count();
        Rational::new(k.into(), self.n().into())
    }

    /// `X^- = max(-X, 0)` per state.
    pub fn negative_part(&self) -> Vec<Rational> {
        self.values.iter().map(|v| if v.is_negative() { -v } else { Rational::zero() }).collect()
    }

    /// `Y^- <= X^-` in every state.
    pub fn negative_part_below(&self, other: &Position) -> bool {
        self.n() == other.n()
            && self.negative_part().iter().zip(other.negative_part()).all(|(mine, theirs)| mine <= &theirs)
    }

    pub fn scale(&self, factor: &Rational) -> Position {
        Position { values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub fn pointwise_mul(&self, other: &Position) -> Result<Position> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(self.n(), other.n()));
        }
        Ok(Position { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() })
    }

    /// State `i` of the result takes the value of state `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Position> {
        if perm.len() != self.n() {
            return Err(Error::DimensionMismatch(self.n(), perm.len()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Position { values: perm.iter().map(|&p| self.values[p].clone()).collect() })
    }

    /// `min(max(-cap, X), cap)` per state.
    pub fn truncate(&self, cap: &Rational) -> Position {
        let lo = -cap.clone();
        Position { values: self.values.iter().map(|v| v.clone().clamp(lo.clone(), cap.clone())).collect() }
    }

    pub fn sorted(&self) -> Position {
        let mut values = self.values.clone();
        values.sort();
        Position { values }
    }

    pub fn max_abs(&self) -> Rational {
        self.values.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
    }
}

/// Ky Fan distance `E[min(|X - Y|, 1)]`.
pub fn kyfan_distance(x: &Position, y: &Position) -> Result<Rational> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch(x.n(), y.n()));
    }
    let one = Rational::one();
    let total: Rational = x.values.iter().zip(&y.values).map(|(a, b)| (a - b).abs().min(one.clone())).sum();
    Ok(total / Rational::from_integer(x.n().into()))
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}
