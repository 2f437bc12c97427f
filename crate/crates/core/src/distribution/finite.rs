use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::Law;
use crate::error::{Error, Result};
use crate::num::{Extended, Rational};

/// A law with finitely many atoms, stored with strictly increasing values
/// and exact probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteDistribution {
    values: Vec<Rational>,
    probs: Vec<Rational>,
    /// `cumulative[k]` is `P(X <= values[k])`.
    cumulative: Vec<Rational>,
}

impl FiniteDistribution {
    /// Build from `(value, probability)` pairs in any order. Equal values are
    /// merged.
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (value, prob) in atoms {
            if !prob.is_positive() {
                return Err(Error::NonPositiveProbability(prob));
            }
            *merged.entry(value).or_insert_with(Rational::zero) += prob;
        }
        if merged.is_empty() {
            return Err(Error::Empty);
        }
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::ProbabilitySum(total));
        }
        Ok(Self::from_sorted(merged.into_iter().unzip()))
    }

    fn from_sorted((values, probs): (Vec<Rational>, Vec<Rational>)) -> Self {
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut running = Rational::zero();
        for p in &probs {
            running += p;
            cumulative.push(running.clone());
        }
        FiniteDistribution { values, probs, cumulative }
    }

    pub fn point_mass(value: Rational) -> Self {
        Self::from_sorted((vec![value], vec![Rational::one()]))
    }

    /// Each value gets probability `1/n`.
    pub fn equiprobable<I: IntoIterator<Item = Rational>>(values: I) -> Result<Self> {
        let values: Vec<Rational> = values.into_iter().collect();
        if values.is_empty() {
            return Err(Error::Empty);
        }
        let weight = Rational::new(1.into(), values.len().into());
        Self::new(values.into_iter().map(|v| (v, weight.clone())))
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Rational, &Rational)> + '_ {
        self.values.iter().zip(&self.probs)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> &Rational {
        &self.values[0]
    }

    pub fn max_value(&self) -> &Rational {
        &self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> Rational {
        self.atoms().map(|(v, p)| v * p).sum()
    }

    /// `E[f(X)]` for an exact `f`.
    pub fn expectation(&self, f: impl Fn(&Rational) -> Rational) -> Rational {
        self.atoms().map(|(v, p)| f(v) * p).sum()
    }

    /// Map every value and re-merge.
    pub fn map_values(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self::new(self.atoms().map(|(v, p)| (f(v), p.clone()))).expect("mapping values preserves a valid law")
    }

    /// Index `k` of the atom whose cumulative interval `(c_{k-1}, c_k]`
    /// contains `t`, for `0 < t <= 1`.
    fn atom_covering(&self, t: &Rational) -> usize {
        self.cumulative.partition_point(|c| c < t)
    }

    fn cumulative_before(&self, k: usize) -> Rational {
        if k == 0 {
            Rational::zero()
        } else {
            self.cumulative[k - 1].clone()
        }
    }
}

impl Law for FiniteDistribution {
    type Value = Rational;

    fn cdf(&self, x: &Rational) -> Rational {
        let k = self.values.partition_point(|v| v <= x);
        self.cumulative_before(k)
    }

    fn cdf_left(&self, x: &Rational) -> Rational {
        let k = self.values.partition_point(|v| v < x);
        self.cumulative_before(k)
    }

    fn quantile_left(&self, t: &Rational) -> Extended<Rational> {
        if !t.is_positive() {
            return Extended::NegInf;
        }
        match self.values.get(self.atom_covering(t)) {
            Some(v) => Extended::Finite(v.clone()),
            None => Extended::PosInf,
        }
    }

    fn quantile_right(&self, t: &Rational) -> Extended<Rational> {
        if t.is_negative() {
            return Extended::NegInf;
        }
        let k = self.cumulative.partition_point(|c| c <= t);
        match self.values.get(k) {
            Some(v) => Extended::Finite(v.clone()),
            None => Extended::PosInf,
        }
    }

    fn integrate_quantile(&self, lo: &Rational, hi: &Rational) -> Result<Rational> {
        let mut total = Rational::zero();
        let mut left = Rational::zero();
        for (value, right) in self.values.iter().zip(&self.cumulative) {
            let a = if &left > lo { &left } else { lo };
            let b = if right < hi { right } else { hi };
            if a < b {
                total += value * (b - a);
            }
            left = right.clone();
        }
        Ok(total)
    }

    fn nonnegative_level_below(&self, t: &Rational) -> Option<Rational> {
        if !t.is_positive() || t > &Rational::one() {
            return None;
        }
        let k = self.atom_covering(t);
        if self.values[k].is_negative() {
            return None;
        }
        let below = self.cumulative_before(k);
        Some((below + t) / Rational::from_integer(2.into()))
    }

    fn essinf(&self) -> Rational {
        self.min_value().clone()
    }

    fn esssup(&self) -> Rational {
        self.max_value().clone()
    }

    fn as_finite(&self) -> Option<&FiniteDistribution> {
        Some(self)
    }
}

impl fmt::Display for FiniteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, p)) in self.atoms().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({v},{p})")?;
        }
        f.write_str("}")
    }
}
