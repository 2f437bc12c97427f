//! Acceptance sets and exact membership tests.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::distribution::{FiniteDistribution, Law, Position};
use crate::error::{Error, Result};
use crate::linear::PiecewiseLinear;
use crate::num::{check_level, pow2, Extended, Rational, Scalar};
use crate::risk_measures::{distortion_measure, expected_shortfall, var_lower, var_upper, DistortionFunction};

/// Nondecreasing, nonconstant loss applied to `X^-`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LossFunction {
    Linear(PiecewiseLinear),
    /// `x -> x^k` on `[0, ∞)`, `k >= 1`.
    Power(u32),
}

impl LossFunction {
    pub fn identity() -> Self {
        LossFunction::Power(1)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LossFunction::Linear(f) if !f.is_nondecreasing() => {
                Err(Error::NotMonotone(format!("loss {f} is not nondecreasing")))
            }
            LossFunction::Linear(f) if f.is_constant() => Err(Error::InvalidArgument(format!("loss {f} is constant"))),
            LossFunction::Power(0) => Err(Error::InvalidArgument("loss x^0 is constant".into())),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        match self {
            LossFunction::Linear(f) => f.eval(x),
            LossFunction::Power(k) => num_traits::pow(x.clone(), *k as usize),
        }
    }
}

impl fmt::Display for LossFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossFunction::Linear(l) => write!(f, "linear({l})"),
            LossFunction::Power(1) => f.write_str("identity"),
            LossFunction::Power(k) => write!(f, "power({k})"),
        }
    }
}

pub type Predicate = Arc<dyn Fn(&Position) -> bool + Send + Sync>;

/// Membership given either by a predicate on all positions or by a table
/// over a declared finite universe.
#[derive(Clone)]
pub enum OracleMembership {
    Predicate(Predicate),
    Table { universe: BTreeSet<Position>, accepted: BTreeSet<Position> },
}

#[derive(Clone)]
pub struct CustomOracle {
    pub name: String,
    pub membership: OracleMembership,
}

impl CustomOracle {
    pub fn predicate(name: impl Into<String>, f: impl Fn(&Position) -> bool + Send + Sync + 'static) -> Self {
        CustomOracle { name: name.into(), membership: OracleMembership::Predicate(Arc::new(f)) }
    }

    pub fn table(
        name: impl Into<String>,
        universe: impl IntoIterator<Item = Position>,
        accepted: impl IntoIterator<Item = Position>,
    ) -> Result<Self> {
        let universe: BTreeSet<Position> = universe.into_iter().collect();
        let accepted: BTreeSet<Position> = accepted.into_iter().collect();
        if let Some(outside) = accepted.iter().find(|x| !universe.contains(x)) {
            return Err(Error::InvalidArgument(format!("accepted position {outside} is outside the universe")));
        }
        Ok(CustomOracle { name: name.into(), membership: OracleMembership::Table { universe, accepted } })
    }

    pub fn is_predicate(&self) -> bool {
        matches!(self.membership, OracleMembership::Predicate(_))
    }

    pub fn contains(&self, x: &Position) -> Result<bool> {
        match &self.membership {
            OracleMembership::Predicate(f) => Ok(f(x)),
            OracleMembership::Table { universe, accepted } => {
                if universe.contains(x) {
                    Ok(accepted.contains(x))
                } else {
                    Err(Error::Undecidable(format!("{x} is outside the universe of {}", self.name)))
                }
            }
        }
    }
}

impl fmt::Debug for CustomOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.is_predicate() { "predicate" } else { "table" };
        write!(f, "CustomOracle({}, {kind})", self.name)
    }
}

#[derive(Debug, Clone)]
pub enum AcceptanceSetSpec {
    /// `P(X < 0) < 1 - α`.
    AMinus(Rational),
    /// `P(X <= -ε) < 1 - α` for every `ε > 0`.
    AZero(Rational),
    /// `P(X < 0) <= 1 - α`.
    APlus(Rational),
    /// `E[l(X^-)] <= c`.
    Shortfall {
        loss: LossFunction,
        c: Rational,
    },
    /// `ES_β(X) <= 0`.
    ESInduced(Rational),
    /// `ρ_h(X) <= 0`.
    DistortionInduced(DistortionFunction),
    CustomOracle(CustomOracle),
}

impl AcceptanceSetSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            AcceptanceSetSpec::AMinus(a)
            | AcceptanceSetSpec::AZero(a)
            | AcceptanceSetSpec::APlus(a)
            | AcceptanceSetSpec::ESInduced(a) => check_level(a),
            AcceptanceSetSpec::Shortfall { loss, .. } => loss.validate(),
            AcceptanceSetSpec::DistortionInduced(_) | AcceptanceSetSpec::CustomOracle(_) => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AcceptanceSetSpec::AMinus(_) => "AMinus",
            AcceptanceSetSpec::AZero(_) => "AZero",
            AcceptanceSetSpec::APlus(_) => "APlus",
            AcceptanceSetSpec::Shortfall { .. } => "Shortfall",
            AcceptanceSetSpec::ESInduced(_) => "ESInduced",
            AcceptanceSetSpec::DistortionInduced(_) => "DistortionInduced",
            AcceptanceSetSpec::CustomOracle(_) => "CustomOracle",
        }
    }

    /// The VaR level for the three default-probability families.
    pub fn var_level(&self) -> Option<&Rational> {
        match self {
            AcceptanceSetSpec::AMinus(a) | AcceptanceSetSpec::AZero(a) | AcceptanceSetSpec::APlus(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for AcceptanceSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcceptanceSetSpec::AMinus(a) => write!(f, "AMinus({a})"),
            AcceptanceSetSpec::AZero(a) => write!(f, "AZero({a})"),
            AcceptanceSetSpec::APlus(a) => write!(f, "APlus({a})"),
            AcceptanceSetSpec::Shortfall { loss, c } => write!(f, "Shortfall({loss},{c})"),
            AcceptanceSetSpec::ESInduced(b) => write!(f, "ESInduced({b})"),
            AcceptanceSetSpec::DistortionInduced(h) => write!(f, "DistortionInduced({h})"),
            AcceptanceSetSpec::CustomOracle(o) => write!(f, "CustomOracle({})", o.name),
        }
    }
}

/// The condition that decided a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Default-probability form, cross-checked by the VaR form.
    DefaultProbability,
    /// VaR form, cross-checked by the default-probability form.
    ValueAtRisk,
    /// A single statistic compared with its threshold.
    Statistic,
    Oracle,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::DefaultProbability => "default_probability",
            Route::ValueAtRisk => "var",
            Route::Statistic => "statistic",
            Route::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics<V> {
    /// `P(X < 0)`.
    pub default_probability: Rational,
    /// `1 - α` for the VaR families.
    pub threshold: Option<Rational>,
    pub var_lower: Option<Extended<V>>,
    pub var_upper: Option<Extended<V>>,
    pub probability_route: Option<bool>,
    pub var_route: Option<bool>,
    /// For a rejected A⁰ verdict, some `ε > 0` with `P(X <= -ε) >= 1 - α`.
    pub epsilon: Option<Rational>,
    /// For an accepted A⁻ verdict, a `δ` with `VaR^u_{α+δ}(X) <= 0`.
    pub delta: Option<Rational>,
    /// ES, distortion value or expected loss.
    pub statistic: Option<Rational>,
}

impl<V> Diagnostics<V> {
    fn new(default_probability: Rational) -> Self {
        Diagnostics {
            default_probability,
            threshold: None,
            var_lower: None,
            var_upper: None,
            probability_route: None,
            var_route: None,
            epsilon: None,
            delta: None,
            statistic: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipVerdict<V> {
    pub accepted: bool,
    pub route: Route,
    pub diagnostics: Diagnostics<V>,
}

/// Decide membership of a law, evaluating both routes for the VaR families.
pub fn member<L: Law>(set: &AcceptanceSetSpec, d: &L) -> Result<MembershipVerdict<L::Value>> {
    set.validate()?;
    let mut diag = Diagnostics::new(d.default_probability());
    let (accepted, route) = match set {
        AcceptanceSetSpec::AMinus(a) => (a_minus(d, a, &mut diag)?, Route::DefaultProbability),
        AcceptanceSetSpec::AZero(a) => (a_zero(d, a, &mut diag)?, Route::ValueAtRisk),
        AcceptanceSetSpec::APlus(a) => (a_plus(d, a, &mut diag)?, Route::DefaultProbability),
        AcceptanceSetSpec::Shortfall { loss, c } => {
            let f = d.as_finite().ok_or_else(|| Error::Unrepresentable("shortfall needs a finite law".into()))?;
            let value = expected_loss(loss, f);
            let accepted = &value <= c;
            diag.statistic = Some(value);
            (accepted, Route::Statistic)
        }
        AcceptanceSetSpec::ESInduced(b) => {
            let value = expected_shortfall(d, b)?;
            let accepted = !value.is_positive();
            diag.statistic = Some(value);
            (accepted, Route::Statistic)
        }
        AcceptanceSetSpec::DistortionInduced(h) => {
            let value = distortion_measure(d, h)?;
            let accepted = !value.is_positive();
            diag.statistic = Some(value);
            (accepted, Route::Statistic)
        }
        AcceptanceSetSpec::CustomOracle(o) => {
            return Err(Error::Undecidable(format!("{} is defined on positions, not laws", o.name)));
        }
    };
    Ok(MembershipVerdict { accepted, route, diagnostics: diag })
}

fn agree<V>(set: &str, diag: &Diagnostics<V>) -> Result<bool> {
    match (diag.probability_route, diag.var_route) {
        (Some(p), Some(v)) if p == v => Ok(p),
        (p, v) => Err(Error::RouteDisagreement(format!("{set}: probability route {p:?}, VaR route {v:?}"))),
    }
}

fn fill_var<L: Law>(d: &L, alpha: &Rational, diag: &mut Diagnostics<L::Value>) -> Rational {
    let threshold = Rational::one() - alpha;
    diag.threshold = Some(threshold.clone());
    diag.var_lower = Some(var_lower(d, alpha));
    diag.var_upper = Some(var_upper(d, alpha));
    threshold
}

fn a_minus<L: Law>(d: &L, alpha: &Rational, diag: &mut Diagnostics<L::Value>) -> Result<bool> {
    let t = fill_var(d, alpha, diag);
    diag.probability_route = Some(diag.default_probability < t);
    // VaR^u_{α+δ}(X) = -q(1-α-δ): look for a level below 1-α where q >= 0.
    let witness = d
        .nonnegative_level_below(&t)
        .filter(|s| s.is_positive() && s < &t && var_upper(d, &(Rational::one() - s)).is_nonpositive());
    diag.delta = witness.as_ref().map(|s| &t - s);
    diag.var_route = Some(witness.is_some());
    agree("AMinus", diag)
}

fn a_zero<L: Law>(d: &L, alpha: &Rational, diag: &mut Diagnostics<L::Value>) -> Result<bool> {
    let t = fill_var(d, alpha, diag);
    let var_route = diag.var_upper.as_ref().expect("filled").is_nonpositive();
    diag.var_route = Some(var_route);

    // sup_{ε>0} P(X <= -ε) = P(X < 0); it is attained iff the quantile at
    // P(X < 0) is negative, in which case ε up to its magnitude attains it.
    let p0 = diag.default_probability.clone();
    let probability_route = if p0.is_zero() {
        t.is_positive()
    } else {
        match d.quantile_left(&p0) {
            Extended::Finite(m) if m.lt_zero() => {
                let eps = m.magnitude_lower_bound().expect("negative value has positive magnitude");
                let attained = d.cdf(&-eps);
                if attained != p0 {
                    return Err(Error::RouteDisagreement(format!("sup of P(X <= -e) is {attained}, expected {p0}")));
                }
                attained < t
            }
            _ => p0 <= t,
        }
    };
    diag.probability_route = Some(probability_route);

    if !probability_route {
        let eps = if t.is_positive() {
            match d.quantile_left(&t) {
                Extended::Finite(m) if m.lt_zero() => m.magnitude_lower_bound().expect("nonzero"),
                other => return Err(Error::RouteDisagreement(format!("AZero rejected but q({t}) = {other}"))),
            }
        } else {
            Rational::one()
        };
        if d.cdf(&-eps.clone()) < t {
            return Err(Error::RouteDisagreement(format!("AZero rejected but P(X <= -{eps}) < {t}")));
        }
        diag.epsilon = Some(eps);
    }
    // P(X <= -ε) grows as ε shrinks, so the smallest grid point covers
    // ε = 2^-1, ..., 2^-20.
    if probability_route {
        let eps = pow2(-20);
        if d.cdf(&-eps.clone()) >= t {
            return Err(Error::RouteDisagreement(format!("AZero accepted but P(X <= -{eps}) >= {t}")));
        }
    }
    agree("AZero", diag)
}

fn a_plus<L: Law>(d: &L, alpha: &Rational, diag: &mut Diagnostics<L::Value>) -> Result<bool> {
    let t = fill_var(d, alpha, diag);
    diag.probability_route = Some(diag.default_probability <= t);
    diag.var_route = Some(diag.var_lower.as_ref().expect("filled").is_nonpositive());
    agree("APlus", diag)
}

/// `E[l(X^-)]`.
pub fn expected_loss(loss: &LossFunction, d: &FiniteDistribution) -> Rational {
    d.expectation(|v| loss.eval(&if v.is_negative() { -v } else { Rational::zero() }))
}

pub fn shortfall_member(loss: &LossFunction, c: &Rational, d: &FiniteDistribution) -> Result<bool> {
    loss.validate()?;
    Ok(&expected_loss(loss, d) <= c)
}

/// Membership of a position on an equi-probable space.
pub fn member_position(set: &AcceptanceSetSpec, x: &Position) -> Result<bool> {
    let one = Rational::one();
    match set {
        AcceptanceSetSpec::AMinus(a) | AcceptanceSetSpec::AZero(a) => {
            check_level(a)?;
            // On equi-probable spaces the largest negative value has mass, so
            // A⁰ coincides with A⁻.
            Ok(x.default_probability() < &one - a)
        }
        AcceptanceSetSpec::APlus(a) => {
            check_level(a)?;
            Ok(x.default_probability() <= &one - a)
        }
        AcceptanceSetSpec::Shortfall { loss, c } => {
            loss.validate()?;
            let n = Rational::from_integer(x.n().into());
            let total: Rational = x.negative_part().iter().map(|v| loss.eval(v)).sum();
            Ok(total / n <= *c)
        }
        AcceptanceSetSpec::ESInduced(b) => {
            check_level(b)?;
            Ok(!position_expected_shortfall(x, b).is_positive())
        }
        AcceptanceSetSpec::DistortionInduced(h) => Ok(!distortion_measure(&x.to_distribution(), h)?.is_positive()),
        AcceptanceSetSpec::CustomOracle(o) => o.contains(x),
    }
}

/// ES of a position from its sorted values, without building a law.
pub fn position_expected_shortfall(x: &Position, beta: &Rational) -> Rational {
    let sorted = x.sorted();
    if beta.is_one() {
        return -sorted.values()[0].clone();
    }
    let n = Rational::from_integer(x.n().into());
    let width = Rational::one() - beta;
    let mut total = Rational::zero();
    for (i, v) in sorted.values().iter().enumerate() {
        let lo = Rational::from_integer(i.into()) / &n;
        if lo >= width {
            break;
        }
        let hi = (Rational::from_integer((i + 1).into()) / &n).min(width.clone());
        total += v * (hi - lo);
    }
    -total / width
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InclusionViolation {
    /// `A⁻_α ⊆ A⁰_α ⊆ A⁺_α` fails.
    Chain { index: usize, alpha: Rational, minus: bool, zero: bool, plus: bool },
    /// `A⁺_{α₂} ⊆ A⁻_{α₁}` fails for `α₁ < α₂`.
    Cross { index: usize, alpha1: Rational, alpha2: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionReport {
    pub universe_size: usize,
    pub levels: usize,
    pub checks: usize,
    pub violation: Option<InclusionViolation>,
}

fn family_memberships<L: Law>(d: &L, alphas: &[Rational]) -> Result<Vec<[bool; 3]>> {
    alphas
        .iter()
        .map(|a| {
            Ok([
                member(&AcceptanceSetSpec::AMinus(a.clone()), d)?.accepted,
                member(&AcceptanceSetSpec::AZero(a.clone()), d)?.accepted,
                member(&AcceptanceSetSpec::APlus(a.clone()), d)?.accepted,
            ])
        })
        .collect()
}

/// Check both inclusion chains on every law and level pair. The first
/// violation in universe order is reported.
pub fn inclusion_check<L: Law>(alphas: &[Rational], universe: &[L]) -> Result<InclusionReport> {
    if universe.is_empty() {
        return Err(Error::Empty);
    }
    let mut alphas = alphas.to_vec();
    alphas.sort();
    alphas.dedup();
    let per_law: Vec<Option<InclusionViolation>> = universe
        .par_iter()
        .enumerate()
        .map(|(index, d)| {
            let m = family_memberships(d, &alphas)?;
            for (a, [minus, zero, plus]) in alphas.iter().zip(&m) {
                if (*minus && !zero) || (*zero && !plus) {
                    return Ok(Some(InclusionViolation::Chain {
                        index,
                        alpha: a.clone(),
                        minus: *minus,
                        zero: *zero,
                        plus: *plus,
                    }));
                }
            }
            for i in 0..alphas.len() {
                for j in i + 1..alphas.len() {
                    if m[j][2] && !m[i][0] {
                        return Ok(Some(InclusionViolation::Cross {
                            index,
                            alpha1: alphas[i].clone(),
                            alpha2: alphas[j].clone(),
                        }));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let k = alphas.len();
    Ok(InclusionReport {
        universe_size: universe.len(),
        levels: k,
        checks: universe.len() * (2 * k + k * k.saturating_sub(1) / 2),
        violation: per_law.into_iter().flatten().next(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapseReport {
    pub checks: usize,
    /// First `(universe index, α, A⁻ verdict, A⁰ verdict)` that differs.
    pub difference: Option<(usize, Rational, bool, bool)>,
}

/// Compare A⁰ and A⁻ membership on every law and level.
pub fn finite_support_collapse_check<L: Law>(alphas: &[Rational], universe: &[L]) -> Result<CollapseReport> {
    let per_law: Vec<Option<(usize, Rational, bool, bool)>> = universe
        .par_iter()
        .enumerate()
        .map(|(index, d)| {
            for a in alphas {
                let minus = member(&AcceptanceSetSpec::AMinus(a.clone()), d)?.accepted;
                let zero = member(&AcceptanceSetSpec::AZero(a.clone()), d)?.accepted;
                if minus != zero {
                    return Ok(Some((index, a.clone(), minus, zero)));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    Ok(CollapseReport { checks: universe.len() * alphas.len(), difference: per_law.into_iter().flatten().next() })
}

/// Names accepted by [`builtin_oracle`].
pub const BUILTIN_ORACLES: [&str; 5] = ["empty", "nonnegative", "half_negative", "first_state", "floor_minus_one"];

/// Predicate-defined oracles with known structure:
/// `empty`; `nonnegative` (`X >= 0`); `half_negative` (at most half the
/// states negative); `first_state` (`X(ω_1) >= 0`, not law-invariant);
/// `floor_minus_one` (`X >= -1`, not conic).
pub fn builtin_oracle(name: &str) -> Option<CustomOracle> {
    let oracle = match name {
        "empty" => CustomOracle::predicate(name, |_| false),
        "nonnegative" => CustomOracle::predicate(name, |x| x.values().iter().all(|v| !v.is_negative())),
        "half_negative" => {
            CustomOracle::predicate(name, |x| 2 * x.values().iter().filter(|v| v.is_negative()).count() <= x.n())
        }
        "first_state" => CustomOracle::predicate(name, |x| !x.values()[0].is_negative()),
        "floor_minus_one" => CustomOracle::predicate(name, |x| x.values().iter().all(|v| v >= &-Rational::one())),
        _ => return None,
    };
    Some(oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::PiecewiseQuantile;
    use crate::num::{int, rat};

    fn tail() -> FiniteDistribution {
        FiniteDistribution::new([(int(-1), rat(1, 100)), (int(1), rat(99, 100))]).unwrap()
    }

    #[test]
    fn level_one_sets() {
        let nonneg = FiniteDistribution::new([(int(0), rat(1, 2)), (int(3), rat(1, 2))]).unwrap();
        assert!(member(&AcceptanceSetSpec::APlus(int(1)), &nonneg).unwrap().accepted);
        for d in [nonneg, tail(), FiniteDistribution::point_mass(int(5))] {
            assert!(!member(&AcceptanceSetSpec::AMinus(int(1)), &d).unwrap().accepted);
            assert!(!member(&AcceptanceSetSpec::AZero(int(1)), &d).unwrap().accepted);
        }
    }

    #[test]
    fn one_percent_tail() {
        let d = tail();
        let a = rat(99, 100);
        let plus = member(&AcceptanceSetSpec::APlus(a.clone()), &d).unwrap();
        assert!(plus.accepted);
        assert_eq!(plus.diagnostics.default_probability, rat(1, 100));
        let zero = member(&AcceptanceSetSpec::AZero(a.clone()), &d).unwrap();
        assert!(!zero.accepted);
        assert_eq!(zero.diagnostics.epsilon, Some(int(1)));
        assert!(!member(&AcceptanceSetSpec::AMinus(a), &d).unwrap().accepted);
    }

    #[test]
    fn a_minus_delta_witness() {
        let d = tail();
        let v = member(&AcceptanceSetSpec::AMinus(rat(1, 2)), &d).unwrap();
        assert!(v.accepted);
        let delta = v.diagnostics.delta.unwrap();
        assert!(delta.is_positive() && delta < rat(1, 2));
        assert!(var_upper(&d, &(rat(1, 2) + delta)).is_nonpositive());
    }

    #[test]
    fn uniform_separates_a_zero_from_a_minus() {
        let u = PiecewiseQuantile::uniform(rat(-2, 5), rat(3, 5)).unwrap();
        let a = rat(3, 5);
        assert!(member(&AcceptanceSetSpec::AZero(a.clone()), &u).unwrap().accepted);
        assert!(!member(&AcceptanceSetSpec::AMinus(a.clone()), &u).unwrap().accepted);
        let r = finite_support_collapse_check(std::slice::from_ref(&a), &[u]).unwrap();
        assert_eq!(r.difference, Some((0, a, false, true)));
    }

    #[test]
    fn point_mass_at_minus_one() {
        let d = FiniteDistribution::point_mass(int(-1));
        assert!(!member(&AcceptanceSetSpec::AMinus(int(0)), &d).unwrap().accepted);
        assert!(!member(&AcceptanceSetSpec::AZero(int(0)), &d).unwrap().accepted);
        let zero = FiniteDistribution::point_mass(int(0));
        for k in 0..10 {
            let a = rat(k, 10);
            for set in
                [AcceptanceSetSpec::AMinus(a.clone()), AcceptanceSetSpec::AZero(a.clone()), AcceptanceSetSpec::APlus(a)]
            {
                assert!(member(&set, &zero).unwrap().accepted);
            }
        }
    }

    #[test]
    fn shortfall_examples() {
        let id = LossFunction::identity();
        let nonneg = FiniteDistribution::point_mass(int(2));
        assert!(shortfall_member(&id, &int(0), &nonneg).unwrap());
        let d = FiniteDistribution::new([(int(-1), rat(1, 2)), (int(9), rat(1, 2))]).unwrap();
        assert!(!shortfall_member(&id, &rat(2, 5), &d).unwrap());
        let d = FiniteDistribution::new([(int(-2), rat(1, 4)), (int(1), rat(3, 4))]).unwrap();
        assert!(shortfall_member(&LossFunction::Power(2), &int(1), &d).unwrap());
        let flat = LossFunction::Linear(PiecewiseLinear::parse("0:1,1:1").unwrap());
        assert!(shortfall_member(&flat, &int(1), &d).is_err());
    }

    #[test]
    fn position_es_matches_law_es() {
        let x = Position::from_integers(&[-1, 9, 9, 9]).unwrap();
        for b in [int(0), rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 3), int(1)] {
            assert_eq!(position_expected_shortfall(&x, &b), expected_shortfall(&x.to_distribution(), &b).unwrap());
        }
    }

    #[test]
    fn oracle_tables_are_partial() {
        let a = Position::from_integers(&[-1, 1]).unwrap();
        let b = Position::from_integers(&[1, -1]).unwrap();
        let o = CustomOracle::table("only", [a.clone(), b.clone()], [a.clone()]).unwrap();
        assert!(o.contains(&a).unwrap());
        assert!(!o.contains(&b).unwrap());
        assert!(o.contains(&Position::from_integers(&[0, 0]).unwrap()).is_err());
    }

    #[test]
    fn inclusion_on_small_universe() {
        let universe = vec![tail(), FiniteDistribution::point_mass(int(0)), FiniteDistribution::point_mass(int(-1))];
        let alphas: Vec<Rational> = (0..=20).map(|k| rat(k, 20)).collect();
        let r = inclusion_check(&alphas, &universe).unwrap();
        assert_eq!(r.violation, None);
        assert!(inclusion_check::<FiniteDistribution>(&alphas, &[]).is_err());
    }
}
