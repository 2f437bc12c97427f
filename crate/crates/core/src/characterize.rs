//! Classification of acceptance sets on equi-probable spaces and replays of
//! the constructive steps behind the characterization.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::acceptance::{member_position, AcceptanceSetSpec};
use crate::distribution::{FiniteDistribution, Law, PiecewiseQuantile, Position, Segment, Shape};
use crate::error::{Error, Result};
use crate::num::{ceil_to_integer, Extended, Rational, Scalar};
use crate::properties::{
    check_conicity, check_law_invariance, check_surplus_invariance, default_lambdas, CheckConfig, GridSpace,
    LawSequence, PropertyReport,
};

/// `1 - max P(X < 0)` over accepted positions, or `1` when none is
/// accepted.
pub fn extract_alpha(set: &AcceptanceSetSpec, universe: &[Position]) -> Result<Rational> {
    if universe.is_empty() {
        return Err(Error::Empty);
    }
    let flags = memberships(set, universe)?;
    Ok(alpha_from(universe, &flags))
}

fn memberships(set: &AcceptanceSetSpec, universe: &[Position]) -> Result<Vec<bool>> {
    universe.par_iter().map(|x| member_position(set, x)).collect()
}

fn alpha_from(universe: &[Position], flags: &[bool]) -> Rational {
    let worst = universe
        .iter()
        .zip(flags)
        .filter(|(_, &a)| a)
        .map(|(x, _)| x.default_probability())
        .max()
        .unwrap_or_else(Rational::zero);
    Rational::one() - worst
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactForm {
    Empty,
    APlusForm(Rational),
    AMinusForm(Rational),
    /// `A⁻ ⊆ A ⊆ A⁺` with both inclusions strict on the universe.
    StrictlyBetween,
}

impl fmt::Display for ExactForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactForm::Empty => f.write_str("Empty"),
            ExactForm::APlusForm(a) => write!(f, "APlusForm {a}"),
            ExactForm::AMinusForm(a) => write!(f, "AMinusForm {a}"),
            ExactForm::StrictlyBetween => f.write_str("StrictlyBetween"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub set: String,
    pub n: usize,
    pub universe_size: usize,
    pub accepted: usize,
    pub alpha_hat: Rational,
    /// `A⁻_α̂ ∩ U ⊆ A`.
    pub lower_sandwich_ok: bool,
    /// `A ⊆ A⁺_α̂ ∩ U`.
    pub upper_sandwich_ok: bool,
    pub exact_form: Option<ExactForm>,
    /// First position of `A⁻_α̂ ∩ U` outside the set.
    pub lower_witness: Option<Position>,
    /// First accepted position outside `A⁺_α̂`.
    pub upper_witness: Option<Position>,
    /// Surplus, law and conicity checks, when run.
    pub properties: Vec<PropertyReport>,
    /// When every property check passed: whether the form is `Empty` or
    /// `APlusForm`.
    pub theorem_consistent: Option<bool>,
}

impl ClassificationReport {
    pub fn properties_pass(&self) -> bool {
        !self.properties.is_empty() && self.properties.iter().all(|p| !p.violated())
    }
}

/// Number of distinct orderings of a multiset with the given multiplicities.
fn multinomial(counts: &[usize]) -> u128 {
    let mut result: u128 = 1;
    let mut placed: u128 = 0;
    for &c in counts {
        for i in 1..=c as u128 {
            placed += 1;
            result = result * placed / i;
        }
    }
    result
}

/// Error unless every relabeling of every element is in the universe.
pub fn check_permutation_closed(universe: &[Position]) -> Result<()> {
    let mut groups: BTreeMap<Position, std::collections::BTreeSet<&Position>> = BTreeMap::new();
    for x in universe {
        groups.entry(x.sorted()).or_default().insert(x);
    }
    for (sorted, members) in &groups {
        let mut counts: BTreeMap<&Rational, usize> = BTreeMap::new();
        for v in sorted.values() {
            *counts.entry(v).or_default() += 1;
        }
        let needed = multinomial(&counts.values().copied().collect::<Vec<_>>());
        if members.len() as u128 != needed {
            return Err(Error::InvalidArgument(format!(
                "universe not permutation-closed: {} of {needed} relabelings of {sorted}",
                members.len()
            )));
        }
    }
    Ok(())
}

/// Classify the set's trace on a finite universe.
pub fn classify_universe(set: &AcceptanceSetSpec, universe: &[Position]) -> Result<ClassificationReport> {
    if universe.is_empty() {
        return Err(Error::Empty);
    }
    check_permutation_closed(universe)?;
    let n = universe[0].n();
    if let Some(x) = universe.iter().find(|x| x.n() != n) {
        return Err(Error::DimensionMismatch(n, x.n()));
    }
    let flags = memberships(set, universe)?;
    let alpha_hat = alpha_from(universe, &flags);
    let bound = Rational::one() - &alpha_hat;

    let mut lower_witness = None;
    let mut upper_witness = None;
    let mut equals_plus = true;
    let mut equals_minus = true;
    for (x, &accepted) in universe.iter().zip(&flags) {
        let p = x.default_probability();
        let in_minus = p < bound;
        let in_plus = p <= bound;
        if in_minus && !accepted && lower_witness.is_none() {
            lower_witness = Some(x.clone());
        }
        if accepted && !in_plus && upper_witness.is_none() {
            upper_witness = Some(x.clone());
        }
        equals_plus &= accepted == in_plus;
        equals_minus &= accepted == in_minus;
    }
    let accepted = flags.iter().filter(|&&a| a).count();
    let lower_sandwich_ok = lower_witness.is_none();
    let upper_sandwich_ok = upper_witness.is_none();
    let exact_form = if accepted == 0 {
        Some(ExactForm::Empty)
    } else if equals_plus {
        Some(ExactForm::APlusForm(alpha_hat.clone()))
    } else if equals_minus {
        Some(ExactForm::AMinusForm(alpha_hat.clone()))
    } else if lower_sandwich_ok && upper_sandwich_ok {
        Some(ExactForm::StrictlyBetween)
    } else {
        None
    };
    Ok(ClassificationReport {
        set: set.to_string(),
        n,
        universe_size: universe.len(),
        accepted,
        alpha_hat,
        lower_sandwich_ok,
        upper_sandwich_ok,
        exact_form,
        lower_witness,
        upper_witness,
        properties: Vec::new(),
        theorem_consistent: None,
    })
}

/// Classify on a full grid space and run exhaustive surplus-invariance,
/// law-invariance and conicity checks. When all three pass, the form must
/// be `Empty` or `APlusForm`.
pub fn classify(set: &AcceptanceSetSpec, space: &GridSpace, config: &CheckConfig) -> Result<ClassificationReport> {
    if let AcceptanceSetSpec::CustomOracle(o) = set {
        if !o.is_predicate() {
            return Err(Error::InvalidArgument(format!(
                "{} is table-defined; conicity needs a predicate-defined oracle",
                o.name
            )));
        }
    }
    let universe: Vec<Position> = space.positions().collect();
    let mut report = classify_universe(set, &universe)?;
    report.properties = vec![
        check_surplus_invariance(set, space, config)?,
        check_law_invariance(set, space, config)?,
        check_conicity(set, space, &default_lambdas(), config)?,
    ];
    if report.properties_pass() {
        report.theorem_consistent =
            Some(matches!(report.exact_form, Some(ExactForm::Empty) | Some(ExactForm::APlusForm(_))));
    }
    Ok(report)
}

/// `α' = 1 - (⌈n(1-α)⌉ - 1)/n`, the level with `A⁻_α = A⁺_{α'}` on an
/// `n`-state equi-probable space.
pub fn alpha_prime(n: u64, alpha: &Rational) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if alpha.is_negative() || alpha >= &Rational::one() {
        return Err(Error::LevelOutOfRange(alpha.clone()));
    }
    let n_r = Rational::from_integer(n.into());
    let k = ceil_to_integer(&(&n_r * (Rational::one() - alpha))) - 1;
    Ok(Rational::one() - Rational::from_integer(k) / n_r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rearrangement {
    /// `sorted[i] = x[perm[i]]`.
    pub perm: Vec<usize>,
    pub sorted: Position,
    /// `U(ω_i) = (i-1)/n`.
    pub u: Vec<Rational>,
    /// `Ũ(ω_i) = i/n`.
    pub u_tilde: Vec<Rational>,
}

/// Relabel states so `x` is nondecreasing and check
/// `q(Ũ) = x = q(U+)` statewise.
pub fn comonotone_rearrangement(x: &Position) -> Result<Rearrangement> {
    let n = x.n();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| x.values()[a].cmp(&x.values()[b]).then(a.cmp(&b)));
    let sorted = x.permute(&perm)?;
    let d = x.to_distribution();
    let denom = Rational::from_integer(n.into());
    let u: Vec<Rational> = (0..n).map(|i| Rational::from_integer(i.into()) / &denom).collect();
    let u_tilde: Vec<Rational> = (1..=n).map(|i| Rational::from_integer(i.into()) / &denom).collect();
    for (i, v) in sorted.values().iter().enumerate() {
        let expected = Extended::Finite(v.clone());
        if d.quantile_left(&u_tilde[i]) != expected || d.quantile_right(&u[i]) != expected {
            return Err(Error::Precondition(format!("quantile grid does not reproduce state {i}")));
        }
    }
    Ok(Rearrangement { perm, sorted, u, u_tilde })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurplusScale {
    pub epsilon: Rational,
    /// Levels where `min(ε q_Y(z), 0) >= min(q_X(z), 0)` was checked.
    pub checked_levels: usize,
}

fn lcm_grid(a: usize, b: usize) -> Vec<Rational> {
    let l = a.lcm(&b);
    let denom = Rational::from_integer(l.into());
    (1..=l).map(|k| Rational::from_integer(k.into()) / &denom).collect()
}

fn neg_part_quantile(d: &FiniteDistribution, z: &Rational, right: bool) -> Rational {
    let q = if right { d.quantile_right(z) } else { d.quantile_left(z) };
    q.into_finite().expect("levels inside (0,1)").min(Rational::zero())
}

/// `ε = q_X(1-α) / q_Y(0+)`, or `1` when `y >= 0`, such that
/// `(ε Ỹ)^- <= X^-` in the comonotone coupling.
pub fn surplus_dominance_scale(x: &Position, y: &Position, alpha: &Rational) -> Result<SurplusScale> {
    crate::num::check_level(alpha)?;
    let t = Rational::one() - alpha;
    let (dx, dy) = (x.to_distribution(), y.to_distribution());
    let critical = match dx.quantile_left(&t) {
        Extended::Finite(v) if v.is_negative() => v,
        other => return Err(Error::Precondition(format!("q_X(1-alpha) = {other} is not negative"))),
    };
    if dy.quantile_right(&t).is_negative() {
        return Err(Error::Precondition("q_Y((1-alpha)+) is negative".into()));
    }
    let y_min = dy.essinf();
    let epsilon = if y_min.is_negative() { critical / y_min } else { Rational::one() };
    let grid = lcm_grid(x.n(), y.n());
    for z in &grid {
        let scaled = (neg_part_quantile(&dy, z, false) * &epsilon).min(Rational::zero());
        if scaled < neg_part_quantile(&dx, z, false) {
            return Err(Error::Precondition(format!("dominance fails at z={z}")));
        }
    }
    Ok(SurplusScale { epsilon, checked_levels: grid.len() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerInclusionStep {
    /// Half the slack `(1 - α - P(Y < 0)) / 2`.
    pub delta: Rational,
    pub epsilon: Rational,
    pub checked_levels: usize,
}

/// The lower-inclusion step: for `Y ∈ A⁻_α` and an accepted `X` with
/// `P(X < 0) > 1 - α - δ`, find `ε` with
/// `min(ε q_Y(z+), 0) >= min(q_X(z+), 0)` for all `z`.
pub fn lower_inclusion_scale(x: &Position, y: &Position, alpha: &Rational) -> Result<LowerInclusionStep> {
    crate::num::check_level(alpha)?;
    let t = Rational::one() - alpha;
    let py = y.default_probability();
    if py >= t {
        return Err(Error::Precondition(format!("P(Y<0) = {py} is not below {t}")));
    }
    let delta = (&t - &py) / Rational::from_integer(2.into());
    let level = &t - &delta;
    if x.default_probability() <= level {
        return Err(Error::Precondition(format!("P(X<0) = {} is not above {level}", x.default_probability())));
    }
    let (dx, dy) = (x.to_distribution(), y.to_distribution());
    let critical = dx.quantile_right(&level).into_finite().expect("level in (0,1)");
    debug_assert!(critical.is_negative());
    let y_min = dy.essinf();
    let epsilon = if y_min.is_negative() { critical / y_min } else { Rational::one() };
    // Right quantiles are constant on [k/L, (k+1)/L).
    let l = x.n().lcm(&y.n());
    let denom = Rational::from_integer(l.into());
    for k in 0..l {
        let z = Rational::from_integer(k.into()) / &denom;
        let scaled = (neg_part_quantile(&dy, &z, true) * &epsilon).min(Rational::zero());
        if scaled < neg_part_quantile(&dx, &z, true) {
            return Err(Error::Precondition(format!("dominance fails at z={z}+")));
        }
    }
    Ok(LowerInclusionStep { delta, epsilon, checked_levels: l })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub k: u64,
    pub law: PiecewiseQuantile,
    /// Probability moved to zero.
    pub moved: Rational,
    /// `E[min(|Z - Y|, 1)]` in the pointwise coupling.
    pub distance: Rational,
    /// Whether `Y` has an atom at its essential infimum.
    pub atom_case: bool,
}

/// Shift `y`'s quantile function left by `t1` on `(t1, t0]`, put zero on
/// `(t0 - t1, t0]` and keep `y` above `t0`.
fn move_low_mass_to_zero(y: &PiecewiseQuantile, t1: &Rational, t0: &Rational) -> Result<PiecewiseQuantile> {
    let mut out = Vec::new();
    for s in y.segments() {
        let lo = (&s.lo).max(t1);
        let hi = (&s.hi).min(t0);
        if lo < hi {
            let shape = match &s.shape {
                Shape::Constant(c) => Shape::Constant(c.clone()),
                Shape::Affine { intercept, slope } => {
                    Shape::Affine { intercept: intercept + slope * t1, slope: slope.clone() }
                }
                Shape::NegSqrt { scale, c } => Shape::NegSqrt { scale: scale.clone(), c: c - t1 },
            };
            out.push(Segment::new(lo - t1, hi - t1, shape));
        }
    }
    out.push(Segment::new(t0 - t1, t0.clone(), Shape::Constant(Rational::zero())));
    for s in y.segments() {
        let lo = (&s.lo).max(t0);
        if lo < &s.hi {
            out.push(Segment::new(lo.clone(), s.hi.clone(), s.shape.clone()));
        }
    }
    PiecewiseQuantile::new(out)
}

/// The `k`-th approximation of `y` from inside `A⁻_α`, where
/// `P(Y < 0) = 1 - α` and `a = essinf Y < 0`: values below `a + 1/k` are
/// set to zero, or, when `Y` has an atom at `a`, the first `P(Y=a)/(k+1)`
/// of that atom is.
pub fn approximate_from_below(y: &PiecewiseQuantile, alpha: &Rational, k: u64) -> Result<Approximation> {
    crate::num::check_level(alpha)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let t0 = y.default_probability();
    if t0 != Rational::one() - alpha {
        return Err(Error::Precondition(format!("P(Y<0) = {t0} but 1 - alpha = {}", Rational::one() - alpha)));
    }
    let inf = y.essinf();
    let a =
        inf.to_rational().ok_or_else(|| Error::Unrepresentable(format!("essential infimum {inf} is irrational")))?;
    if a.is_zero() {
        return Err(Error::Precondition("essential infimum is 0".into()));
    }
    if a.is_positive() {
        return Err(Error::Precondition("Y >= 0, nothing to approximate".into()));
    }
    let atom = y.cdf(&a);
    let atom_case = atom.is_positive();
    let k_r = Rational::from_integer(k.into());
    let moved =
        if atom_case { atom / (&k_r + Rational::one()) } else { y.cdf_left(&(&a + k_r.recip())).min(t0.clone()) };
    let law = move_low_mass_to_zero(y, &moved, &t0)?;
    let distance = y.integrate_clamped_abs(&Rational::zero(), &moved)?;
    Ok(Approximation { k, law, moved, distance, atom_case })
}

/// Smallest `k` with `a + 1/k < 0`, past which the continuous-case
/// approximation keeps part of the negative mass.
pub fn approximation_threshold(y: &PiecewiseQuantile) -> Result<u64> {
    let a = y.essinf().to_rational().ok_or_else(|| Error::Unrepresentable("irrational infimum".into()))?;
    if !a.is_negative() {
        return Err(Error::Precondition("essential infimum is not negative".into()));
    }
    let bound = (-a).recip();
    let k: u64 =
        bound.floor().to_integer().try_into().map_err(|_| Error::InvalidArgument("threshold too large".into()))?;
    Ok(k + 1)
}

/// The approximations at `ks` as a sequence converging to `y`.
pub fn approximating_sequence(y: &PiecewiseQuantile, alpha: &Rational, ks: &[u64]) -> Result<LawSequence> {
    let terms = ks.iter().map(|&k| Ok(approximate_from_below(y, alpha, k)?.law)).collect::<Result<Vec<_>>>()?;
    Ok(LawSequence { label: format!("approximate_from_below(alpha={alpha})"), terms, limit: y.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::{member, CustomOracle, LossFunction};
    use crate::num::{int, rat};

    fn sign_patterns(n: usize) -> Vec<Position> {
        GridSpace::integers(n, &[-1, 1]).unwrap().positions().collect()
    }

    #[test]
    fn alpha_extraction() {
        assert_eq!(extract_alpha(&AcceptanceSetSpec::APlus(rat(1, 2)), &sign_patterns(4)).unwrap(), rat(1, 2));
        let empty = AcceptanceSetSpec::CustomOracle(CustomOracle::predicate("empty", |_| false));
        assert_eq!(extract_alpha(&empty, &sign_patterns(3)).unwrap(), int(1));
        let nonneg = AcceptanceSetSpec::CustomOracle(CustomOracle::predicate("nonneg", |x: &Position| {
            x.values().iter().all(|v| !v.is_negative())
        }));
        assert_eq!(extract_alpha(&nonneg, &sign_patterns(3)).unwrap(), int(1));
        let partial = AcceptanceSetSpec::CustomOracle(CustomOracle::table("t", [], []).unwrap());
        assert!(extract_alpha(&partial, &sign_patterns(2)).is_err());
    }

    #[test]
    fn classify_examples() {
        let space = GridSpace::integers(4, &[-1, 0, 1]).unwrap();
        let config = CheckConfig::default();
        let r = classify(&AcceptanceSetSpec::APlus(rat(3, 4)), &space, &config).unwrap();
        assert_eq!(r.exact_form, Some(ExactForm::APlusForm(rat(3, 4))));
        assert_eq!(r.theorem_consistent, Some(true));

        let empty = AcceptanceSetSpec::CustomOracle(CustomOracle::predicate("empty", |_| false));
        let r = classify(&empty, &space, &config).unwrap();
        assert_eq!((r.exact_form, r.alpha_hat), (Some(ExactForm::Empty), int(1)));

        let shortfall = AcceptanceSetSpec::Shortfall { loss: LossFunction::identity(), c: int(1) };
        let r = classify(&shortfall, &space, &config).unwrap();
        assert!(r.properties.iter().any(|p| p.violated()));
        assert_eq!(r.theorem_consistent, None);
    }

    #[test]
    fn a_minus_oracle_recovers_alpha_prime() {
        let space = GridSpace::integers(3, &[-1, 0, 1]).unwrap();
        let a = rat(1, 2);
        let r = classify(&AcceptanceSetSpec::AMinus(a.clone()), &space, &CheckConfig::default()).unwrap();
        let expected = alpha_prime(3, &a).unwrap();
        assert_eq!(r.exact_form, Some(ExactForm::APlusForm(expected.clone())));
        assert_eq!(r.alpha_hat, expected);
    }

    #[test]
    fn permutation_closure_is_enforced() {
        let lonely = vec![Position::from_integers(&[-1, 1]).unwrap()];
        assert!(classify_universe(&AcceptanceSetSpec::APlus(int(0)), &lonely).is_err());
        let both = vec![Position::from_integers(&[-1, 1]).unwrap(), Position::from_integers(&[1, -1]).unwrap()];
        assert!(classify_universe(&AcceptanceSetSpec::APlus(int(0)), &both).is_ok());
        let table = AcceptanceSetSpec::CustomOracle(CustomOracle::table("t", both.clone(), []).unwrap());
        assert!(classify(&table, &GridSpace::integers(2, &[-1, 1]).unwrap(), &CheckConfig::default()).is_err());
    }

    #[test]
    fn alpha_prime_examples() {
        assert_eq!(alpha_prime(10, &rat(17, 20)).unwrap(), rat(9, 10));
        assert_eq!(alpha_prime(4, &rat(3, 4)).unwrap(), int(1));
        assert_eq!(alpha_prime(2, &int(0)).unwrap(), rat(1, 2));
        assert!(alpha_prime(2, &int(1)).is_err());
    }

    #[test]
    fn rearrangement_examples() {
        let r = comonotone_rearrangement(&Position::from_integers(&[3, -1, -1]).unwrap()).unwrap();
        assert_eq!(r.sorted, Position::from_integers(&[-1, -1, 3]).unwrap());
        assert_eq!(r.u_tilde, vec![rat(1, 3), rat(2, 3), int(1)]);
        let distinct = comonotone_rearrangement(&Position::from_integers(&[5, 2, 9, 1]).unwrap()).unwrap();
        assert_eq!(distinct.perm, vec![3, 1, 0, 2]);
        let flat = comonotone_rearrangement(&Position::from_integers(&[4, 4]).unwrap()).unwrap();
        assert_eq!(flat.perm, vec![0, 1]);
    }

    #[test]
    fn surplus_scale_examples() {
        let x = Position::from_integers(&[-4, -4, 1, 1]).unwrap();
        let y = Position::from_integers(&[-1, 1, 1, 1]).unwrap();
        assert_eq!(surplus_dominance_scale(&x, &y, &rat(1, 2)).unwrap().epsilon, int(4));
        let x = Position::from_integers(&[-2, 1]).unwrap();
        let y = Position::from_integers(&[-1, 1]).unwrap();
        assert_eq!(surplus_dominance_scale(&x, &y, &rat(1, 2)).unwrap().epsilon, int(2));
        let y = Position::from_integers(&[0, 3]).unwrap();
        assert_eq!(surplus_dominance_scale(&x, &y, &rat(1, 2)).unwrap().epsilon, int(1));
        let positive = Position::from_integers(&[1, 1]).unwrap();
        assert!(matches!(surplus_dominance_scale(&positive, &y, &rat(1, 2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn lower_inclusion_step() {
        let x = Position::from_integers(&[-3, -1, -1, 2]).unwrap();
        let y = Position::from_integers(&[-2, 5, 5, 5]).unwrap();
        let step = lower_inclusion_scale(&x, &y, &rat(1, 4)).unwrap();
        assert_eq!(step.delta, rat(1, 4));
        assert_eq!(step.epsilon, rat(1, 2));
    }

    #[test]
    fn approximation_examples() {
        let u = PiecewiseQuantile::uniform(rat(-1, 2), rat(1, 2)).unwrap();
        let a = rat(1, 2);
        let z = approximate_from_below(&u, &a, 4).unwrap();
        assert!(!z.atom_case);
        assert_eq!(z.moved, rat(1, 4));
        assert_eq!(z.law.default_probability(), rat(1, 4));
        assert!(member(&AcceptanceSetSpec::AMinus(a.clone()), &z.law).unwrap().accepted);
        // ∫_0^{1/4} |z - 1/2| dz
        assert_eq!(z.distance, rat(3, 32));

        let two = PiecewiseQuantile::from_finite(
            &FiniteDistribution::new([(int(-1), rat(1, 2)), (int(1), rat(1, 2))]).unwrap(),
        );
        let z = approximate_from_below(&two, &a, 1).unwrap();
        assert!(z.atom_case);
        assert_eq!(z.moved, rat(1, 4));
        assert_eq!(z.law.default_probability(), rat(1, 4));
        assert_eq!(z.distance, rat(1, 4));

        let distances: Vec<Rational> = (1..=64).map(|k| approximate_from_below(&u, &a, k).unwrap().distance).collect();
        assert!(distances.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(approximation_threshold(&u).unwrap(), 3);
        assert!(approximate_from_below(&PiecewiseQuantile::constant(int(1)), &int(1), 1).is_err());
    }

    #[test]
    fn approximating_sequence_converges() {
        let u = PiecewiseQuantile::uniform(rat(-1, 2), rat(1, 2)).unwrap();
        let ks: Vec<u64> = (3..=40).collect();
        let seq = approximating_sequence(&u, &rat(1, 2), &ks).unwrap();
        let d = seq.check_convergence(&rat(1, 50)).unwrap();
        assert_eq!(d.last(), Some(&rat(39, 3200)));
    }
}
