//! Lower and upper VaR, expected shortfall and distortion risk measures.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::distribution::{truncate, FiniteDistribution, Law, MonotoneMap, Transform};
use crate::error::{Error, Result};
use crate::linear::PiecewiseLinear;
use crate::num::{check_level, Extended, Rational, Scalar};

/// Nondecreasing piecewise-linear `h` on `[0, 1]` with `h(0) = 0` and
/// `h(1) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistortionFunction {
    curve: PiecewiseLinear,
}

impl DistortionFunction {
    pub fn new(knots: Vec<(Rational, Rational)>) -> Result<Self> {
        let curve = PiecewiseLinear::new(knots)?;
        let knots = curve.knots();
        let (first, last) = (&knots[0], &knots[knots.len() - 1]);
        if !first.0.is_zero() || !first.1.is_zero() {
            return Err(Error::InvalidArgument("distortion must start at (0,0)".into()));
        }
        if !last.0.is_one() || !last.1.is_one() {
            return Err(Error::InvalidArgument("distortion must end at (1,1)".into()));
        }
        if !curve.is_nondecreasing() {
            return Err(Error::NotMonotone("distortion must be nondecreasing".into()));
        }
        Ok(DistortionFunction { curve })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(PiecewiseLinear::parse(text)?.knots().to_vec())
    }

    pub fn identity() -> Self {
        DistortionFunction { curve: PiecewiseLinear::affine(Rational::zero(), Rational::one()) }
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        self.curve.eval(u)
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        self.curve.knots()
    }

    /// `(u_j, u_{j+1}, slope_j)` for every linear piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, Rational)> + '_ {
        let knots = self.curve.knots();
        (0..knots.len() - 1).map(move |i| (&knots[i].0, &knots[i + 1].0, self.curve.slope_of_piece(i)))
    }
}

impl fmt::Display for DistortionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.curve.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RiskMeasureSpec {
    VaRLower(Rational),
    VaRUpper(Rational),
    ES(Rational),
    Distortion(DistortionFunction),
}

impl RiskMeasureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            RiskMeasureSpec::VaRLower(a) | RiskMeasureSpec::VaRUpper(a) | RiskMeasureSpec::ES(a) => check_level(a),
            RiskMeasureSpec::Distortion(_) => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RiskMeasureSpec::VaRLower(_) => "var_lower",
            RiskMeasureSpec::VaRUpper(_) => "var_upper",
            RiskMeasureSpec::ES(_) => "es",
            RiskMeasureSpec::Distortion(_) => "distortion",
        }
    }

    pub fn evaluate(&self, d: &FiniteDistribution) -> Result<Extended<Rational>> {
        self.validate()?;
        Ok(match self {
            RiskMeasureSpec::VaRLower(a) => var_lower(d, a),
            RiskMeasureSpec::VaRUpper(a) => var_upper(d, a),
            RiskMeasureSpec::ES(b) => Extended::Finite(expected_shortfall(d, b)?),
            RiskMeasureSpec::Distortion(h) => Extended::Finite(distortion_measure(d, h)?),
        })
    }
}

fn complement(level: &Rational) -> Rational {
    Rational::one() - level
}

/// `VaR^l_α(X) = -q_X((1-α)+)`.
pub fn var_lower<L: Law>(d: &L, alpha: &Rational) -> Extended<L::Value> {
    -d.quantile_right(&complement(alpha))
}

/// `VaR^u_α(X) = -q_X(1-α)`.
pub fn var_upper<L: Law>(d: &L, alpha: &Rational) -> Extended<L::Value> {
    -d.quantile_left(&complement(alpha))
}

/// Lower VaR read off the law of `-X` as its left quantile at `α`.
pub fn var_lower_via_negation<L: Transform>(d: &L, alpha: &Rational) -> Result<Extended<L::Value>> {
    Ok(d.apply_map(&MonotoneMap::negation())?.quantile_left(alpha))
}

/// Upper VaR read off the law of `-X` as its right quantile at `α`.
pub fn var_upper_via_negation<L: Transform>(d: &L, alpha: &Rational) -> Result<Extended<L::Value>> {
    Ok(d.apply_map(&MonotoneMap::negation())?.quantile_right(alpha))
}

/// `ES_β(X) = -(1/(1-β)) ∫_0^{1-β} q_X(z) dz`, and `-essinf X` at `β = 1`.
pub fn expected_shortfall<L: Law>(d: &L, beta: &Rational) -> Result<Rational> {
    check_level(beta)?;
    if beta.is_one() {
        let inf = d.essinf();
        return inf
            .to_rational()
            .map(|v| -v)
            .ok_or_else(|| Error::Unrepresentable(format!("essential infimum {inf} is irrational")));
    }
    let width = complement(beta);
    Ok(-d.integrate_quantile(&Rational::zero(), &width)? / width)
}

/// `∫_0^∞ h(P(X>x)) dx + ∫_{-∞}^0 (h(P(X>x)) - 1) dx`.
///
/// Finite laws use the survival step function directly; other laws use
/// `Σ_j slope_j ∫_{1-u_{j+1}}^{1-u_j} q(z) dz`.
pub fn distortion_measure<L: Law>(d: &L, h: &DistortionFunction) -> Result<Rational> {
    match d.as_finite() {
        Some(f) => Ok(distortion_survival(f, h)),
        None => distortion_via_quantile(d, h),
    }
}

fn distortion_survival(d: &FiniteDistribution, h: &DistortionFunction) -> Rational {
    let mut points: Vec<Rational> = d.values().to_vec();
    points.push(Rational::zero());
    points.sort();
    points.dedup();
    let one = Rational::one();
    points
        .windows(2)
        .map(|w| {
            let survival = &one - d.cdf(&w[0]);
            let mut height = h.eval(&survival);
            if w[0].is_negative() {
                height -= &one;
            }
            (&w[1] - &w[0]) * height
        })
        .sum()
}

pub fn distortion_via_quantile<L: Law>(d: &L, h: &DistortionFunction) -> Result<Rational> {
    let one = Rational::one();
    let mut total = Rational::zero();
    for (u0, u1, slope) in h.pieces() {
        if !slope.is_zero() {
            total += slope * d.integrate_quantile(&(&one - u1), &(&one - u0))?;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationLimitReport {
    pub caps: Vec<Rational>,
    pub values: Vec<Rational>,
    pub target: Rational,
    /// Largest absolute support value.
    pub support_bound: Rational,
    /// Whether the values are monotone in the cap (informational).
    pub monotone: bool,
    /// Some cap reaches the support bound and every such cap reproduces the
    /// untruncated value exactly.
    pub converged: bool,
}

/// Evaluate `ρ_h(min(max(-c, X), c))` along increasing caps and compare
/// with `ρ_h(X)`.
pub fn distortion_truncation_limit_check(
    d: &FiniteDistribution,
    h: &DistortionFunction,
    caps: &[Rational],
) -> Result<TruncationLimitReport> {
    if caps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("caps must be strictly increasing".into()));
    }
    let target = distortion_measure(d, h)?;
    let values = caps.iter().map(|c| distortion_measure(&truncate(d, c)?, h)).collect::<Result<Vec<Rational>>>()?;
    let support_bound = d.min_value().abs().max(d.max_value().abs());
    let nondecreasing = values.windows(2).all(|w| w[0] <= w[1]);
    let nonincreasing = values.windows(2).all(|w| w[0] >= w[1]);
    let mut beyond = caps.iter().zip(&values).filter(|(c, _)| **c >= support_bound).peekable();
    let converged = beyond.peek().is_some() && beyond.all(|(_, v)| *v == target);
    Ok(TruncationLimitReport {
        caps: caps.to_vec(),
        values,
        target,
        support_bound,
        monotone: nondecreasing || nonincreasing,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::PiecewiseQuantile;
    use crate::num::{int, rat};

    fn four_atoms() -> FiniteDistribution {
        FiniteDistribution::new([-2, -1, 0, 3].map(|v| (int(v), rat(1, 4)))).unwrap()
    }

    fn tail() -> FiniteDistribution {
        FiniteDistribution::new([(int(-1), rat(1, 100)), (int(1), rat(99, 100))]).unwrap()
    }

    #[test]
    fn var_examples() {
        let d = four_atoms();
        assert_eq!(var_lower(&d, &int(1)), Extended::Finite(int(2)));
        assert_eq!(var_upper(&d, &int(1)), Extended::PosInf);
        assert_eq!(var_lower(&tail(), &rat(99, 100)), Extended::Finite(int(-1)));
        assert_eq!(var_upper(&tail(), &rat(99, 100)), Extended::Finite(int(1)));
        assert_eq!(var_upper(&d, &rat(3, 4)), Extended::Finite(int(2)));
        let c = FiniteDistribution::point_mass(int(7));
        for k in 1..10 {
            assert_eq!(var_lower(&c, &rat(k, 10)), Extended::Finite(int(-7)));
        }
        for a in [int(0), rat(1, 4), rat(99, 100), int(1)] {
            assert_eq!(var_lower_via_negation(&d, &a).unwrap(), var_lower(&d, &a));
            assert_eq!(var_upper_via_negation(&d, &a).unwrap(), var_upper(&d, &a));
        }
    }

    #[test]
    fn es_examples() {
        let d = four_atoms();
        assert_eq!(expected_shortfall(&d, &rat(3, 4)).unwrap(), int(2));
        assert_eq!(expected_shortfall(&d, &int(1)).unwrap(), int(2));
        let sym = FiniteDistribution::new([(int(-1), rat(1, 2)), (int(1), rat(1, 2))]).unwrap();
        assert_eq!(expected_shortfall(&sym, &int(0)).unwrap(), int(0));
        let c = FiniteDistribution::point_mass(rat(5, 2));
        for b in [int(0), rat(1, 3), int(1)] {
            assert_eq!(expected_shortfall(&c, &b).unwrap(), rat(-5, 2));
        }
        assert!(expected_shortfall(&d, &rat(3, 2)).is_err());
    }

    #[test]
    fn distortion_examples() {
        let id = DistortionFunction::identity();
        assert_eq!(distortion_measure(&four_atoms(), &id).unwrap(), int(0));
        assert_eq!(distortion_measure(&FiniteDistribution::point_mass(int(-3)), &id).unwrap(), int(-3));
        let h = DistortionFunction::parse("0:0,1/2:0,1:1").unwrap();
        let sym = FiniteDistribution::new([(int(-1), rat(1, 2)), (int(1), rat(1, 2))]).unwrap();
        let exact = distortion_measure(&sym, &h).unwrap();
        assert_eq!(exact, int(-1));
        assert_eq!(distortion_via_quantile(&sym, &h).unwrap(), exact);
        let u = PiecewiseQuantile::uniform(int(0), int(2)).unwrap();
        assert_eq!(distortion_measure(&u, &id).unwrap(), int(1));
        assert!(DistortionFunction::parse("0:0,1:1/2").is_err());
        assert!(DistortionFunction::parse("0:0,1/2:1,3/4:1/2,1:1").is_err());
    }

    /// Midpoint Riemann sum of the survival-function integral in floating
    /// point.
    fn riemann(d: &FiniteDistribution, h: &DistortionFunction, points: usize) -> f64 {
        let lo = d.min_value().to_f64().min(0.0);
        let hi = d.max_value().to_f64().max(0.0);
        let step = (hi - lo) / points as f64;
        let atoms: Vec<(f64, f64)> = d.atoms().map(|(v, p)| (v.to_f64(), p.to_f64())).collect();
        let knots: Vec<(f64, f64)> = h.knots().iter().map(|(u, y)| (u.to_f64(), y.to_f64())).collect();
        let h_f = |u: f64| {
            let i = knots.partition_point(|k| k.0 <= u).clamp(1, knots.len() - 1);
            let (a, b) = (knots[i - 1], knots[i]);
            a.1 + (b.1 - a.1) * (u - a.0) / (b.0 - a.0)
        };
        (0..points)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * step;
                let s: f64 = atoms.iter().filter(|a| a.0 > x).map(|a| a.1).sum();
                step * if x < 0.0 { h_f(s) - 1.0 } else { h_f(s) }
            })
            .sum()
    }

    #[test]
    fn distortion_matches_riemann_oracle() {
        let h = DistortionFunction::parse("0:0,1/2:0,1:1").unwrap();
        let sym = FiniteDistribution::new([(int(-1), rat(1, 2)), (int(1), rat(1, 2))]).unwrap();
        let approx = riemann(&sym, &h, 1_000_000);
        assert!((approx - distortion_measure(&sym, &h).unwrap().to_f64()).abs() < 1e-9);
        let concave = DistortionFunction::parse("0:0,1/4:1/2,1:1").unwrap();
        let d = four_atoms();
        let approx = riemann(&d, &concave, 1_000_000);
        assert!((approx - distortion_measure(&d, &concave).unwrap().to_f64()).abs() < 1e-6);
    }

    #[test]
    fn truncation_limit_examples() {
        let id = DistortionFunction::identity();
        let sym = FiniteDistribution::new([(int(-5), rat(1, 2)), (int(5), rat(1, 2))]).unwrap();
        let caps = [1, 2, 3, 10].map(int);
        let r = distortion_truncation_limit_check(&sym, &id, &caps).unwrap();
        assert_eq!(r.values, vec![int(0); 4]);
        assert!(r.converged);

        let skew = FiniteDistribution::new([(int(-5), rat(1, 2)), (int(3), rat(1, 2))]).unwrap();
        let r = distortion_truncation_limit_check(&skew, &id, &[1, 4, 10].map(int)).unwrap();
        assert_eq!(r.values, vec![int(0), rat(-1, 2), int(-1)]);
        assert_eq!(r.target, int(-1));
        assert!(r.converged);

        let r = distortion_truncation_limit_check(&skew, &id, &[1, 2].map(int)).unwrap();
        assert!(!r.converged);
    }
}
