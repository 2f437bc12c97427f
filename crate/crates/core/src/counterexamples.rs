//! Explicit counterexamples with machine-checked claims.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::acceptance::{member, position_expected_shortfall, AcceptanceSetSpec};
use crate::distribution::{FiniteDistribution, Law, PiecewiseQuantile, Position, Segment, Shape};
use crate::error::{Error, Result};
use crate::linear::PiecewiseLinear;
use crate::num::{pow2, Rational, Scalar};
use crate::properties::Witness;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub description: String,
    pub verified: bool,
    pub evidence: String,
}

impl Claim {
    fn new(description: impl Into<String>, verified: bool, evidence: impl Into<String>) -> Self {
        Claim { description: description.into(), verified, evidence: evidence.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub name: String,
    pub claims: Vec<Claim>,
    pub parameters: Vec<(String, String)>,
}

impl CounterexampleReport {
    pub fn all_verified(&self) -> bool {
        !self.claims.is_empty() && self.claims.iter().all(|c| c.verified)
    }
}

fn open_unit(alpha: &Rational) -> Result<()> {
    if alpha.is_positive() && alpha < &Rational::one() {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(alpha.clone()))
    }
}

fn accepted<L: Law>(set: &AcceptanceSetSpec, law: &L) -> Result<bool> {
    Ok(member(set, law)?.accepted)
}

/// Levels `2^-1, ..., 2^-20`.
fn epsilon_grid() -> Vec<Rational> {
    (1..=20).map(|j| pow2(-j)).collect()
}

/// `Y` uniform on `(α - 1, α)`.
pub fn uniform_shifted(alpha: &Rational) -> Result<PiecewiseQuantile> {
    PiecewiseQuantile::uniform(alpha - Rational::one(), alpha.clone())
}

/// The law of `ZY` for `Z = -(1/Y) 1{Y<0} + 1{Y>=0}`: an atom at `-1` of
/// mass `1 - α` and `Y` restricted to `[0, α)`.
pub fn numeraire_product_law(alpha: &Rational) -> Result<PiecewiseQuantile> {
    let t = Rational::one() - alpha;
    PiecewiseQuantile::new(vec![
        Segment::new(Rational::zero(), t.clone(), Shape::Constant(-Rational::one())),
        Segment::new(t.clone(), Rational::one(), Shape::Affine { intercept: -t, slope: Rational::one() }),
    ])
}

/// `A⁰_α` is not closed under multiplication by a strictly positive `Z`.
pub fn example_d1(alpha: &Rational) -> Result<CounterexampleReport> {
    open_unit(alpha)?;
    let t = Rational::one() - alpha;
    let y = uniform_shifted(alpha)?;
    let zy = numeraire_product_law(alpha)?;
    let zero = AcceptanceSetSpec::AZero(alpha.clone());
    let minus = AcceptanceSetSpec::AMinus(alpha.clone());
    let eps = epsilon_grid();

    let y_zero = member(&zero, &y)?;
    let y_tail_ok = eps.iter().all(|e| y.cdf(&-e.clone()) == (&t - e).max(Rational::zero()));
    let y_minus = accepted(&minus, &y)?;
    let zy_tail_ok = eps.iter().all(|e| zy.cdf(&-e.clone()) == t);
    let zy_zero = accepted(&zero, &zy)?;
    let half = Rational::new(1.into(), 2.into());

    Ok(CounterexampleReport {
        name: "d1".into(),
        claims: vec![
            Claim::new(
                "Y in AZero",
                y_zero.accepted && y_tail_ok,
                format!("P(Y<=-eps)=max(P(Y<0)-eps,0) on eps=2^-1..2^-20; P(Y<0)={}", y.default_probability()),
            ),
            Claim::new("Y not in AMinus", !y_minus, format!("P(Y<0)={} = 1-alpha", y.default_probability())),
            Claim::new(
                "ZY not in AZero",
                !zy_zero && zy_tail_ok,
                format!("P(ZY<=-1/2)={}; P(ZY<=-eps)=1-alpha on eps grid", zy.cdf(&-half)),
            ),
        ],
        parameters: vec![("alpha".into(), alpha.to_string())],
    })
}

/// The negative-part dominance defining `X₁`:
/// `δ min(q_X(z), 0) >= min(q_Y(z), 0)`. Returns the first grid point where
/// it fails.
pub fn dominance_violation(
    x: &PiecewiseQuantile,
    y: &PiecewiseQuantile,
    delta: &Rational,
    z_grid: &[Rational],
) -> Option<Rational> {
    z_grid
        .iter()
        .find(|z| {
            let lhs = x.quantile_left(z).into_finite().expect("z in (0,1)").min_zero().scale(delta);
            let rhs = y.quantile_left(z).into_finite().expect("z in (0,1)").min_zero();
            lhs < rhs
        })
        .cloned()
}

/// `Ỹ`: `-sqrt(1 - α - z)` below `1 - α`, `z - (1 - α)` above.
pub fn sqrt_target(alpha: &Rational) -> Result<PiecewiseQuantile> {
    let t = Rational::one() - alpha;
    PiecewiseQuantile::new(vec![
        Segment::new(Rational::zero(), t.clone(), Shape::neg_sqrt(t.clone())),
        Segment::new(t.clone(), Rational::one(), Shape::Affine { intercept: -t, slope: Rational::one() }),
    ])
}

/// `δ ∈ {2^-e, ..., 2^e}`.
pub fn default_delta_grid(e: i32) -> Vec<Rational> {
    (-e..=e).map(pow2).collect()
}

/// `(1-α)(1 - 2^-j)` for `j = 1..=depth` and `k/width` for `k = 1..width`.
pub fn default_z_grid(alpha: &Rational, depth: i32, width: u32) -> Vec<Rational> {
    let t = Rational::one() - alpha;
    let mut grid: Vec<Rational> = (1..=depth).map(|j| &t * (Rational::one() - pow2(-j))).collect();
    grid.extend((1..width).map(|k| Rational::new(k.into(), width.into())));
    grid.sort();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct D2Verdicts {
    y_in_x1: bool,
    target_violations: Vec<Option<Rational>>,
}

fn d2_verdicts(
    y: &PiecewiseQuantile,
    target: &PiecewiseQuantile,
    delta_grid: &[Rational],
    z_grid: &[Rational],
) -> D2Verdicts {
    D2Verdicts {
        y_in_x1: dominance_violation(y, y, &Rational::one(), z_grid).is_none(),
        target_violations: delta_grid.iter().map(|d| dominance_violation(target, y, d, z_grid)).collect(),
    }
}

/// A surplus-invariant, law-invariant, conic set strictly between `A⁻_α`
/// and `A⁰_α`. Non-membership of `Ỹ` in `X₁` is certified on the grids.
pub fn example_d2(alpha: &Rational, delta_grid: &[Rational], z_grid: &[Rational]) -> Result<CounterexampleReport> {
    open_unit(alpha)?;
    if delta_grid.is_empty() || z_grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if let Some(z) = z_grid.iter().find(|z| !z.is_positive() || *z >= &Rational::one()) {
        return Err(Error::InvalidArgument(format!("z={z} outside (0,1)")));
    }
    let y = uniform_shifted(alpha)?;
    let target = sqrt_target(alpha)?;
    let zero = AcceptanceSetSpec::AZero(alpha.clone());
    let minus = AcceptanceSetSpec::AMinus(alpha.clone());
    let t = Rational::one() - alpha;

    let verdicts = d2_verdicts(&y, &target, delta_grid, z_grid);
    let mut refined: Vec<Rational> = z_grid.to_vec();
    refined.extend(z_grid.iter().map(|z| z / Rational::from_integer(2.into())));
    refined.extend(z_grid.iter().map(|z| (z + Rational::one()) / Rational::from_integer(2.into())));
    refined.extend(z_grid.iter().map(|z| &t - (&t - z).abs() / Rational::from_integer(2.into())));
    refined.retain(|z| z.is_positive() && z < &Rational::one());
    refined.sort();
    refined.dedup();
    let refined_verdicts = d2_verdicts(&y, &target, delta_grid, &refined);
    let stable = verdicts.y_in_x1 == refined_verdicts.y_in_x1
        && verdicts
            .target_violations
            .iter()
            .map(Option::is_some)
            .eq(refined_verdicts.target_violations.iter().map(Option::is_some));

    let y_zero = accepted(&zero, &y)?;
    let y_minus = accepted(&minus, &y)?;
    let target_zero = accepted(&zero, &target)?;
    let target_minus = accepted(&minus, &target)?;
    let eps = epsilon_grid();
    let target_tail_ok = eps.iter().all(|e| target.cdf(&-e.clone()) == (&t - e * e).max(Rational::zero()));
    let all_delta_fail = verdicts.target_violations.iter().all(Option::is_some);
    let worst = delta_grid
        .iter()
        .zip(&verdicts.target_violations)
        .min_by(|a, b| a.0.cmp(b.0))
        .map(|(d, z)| format!("delta={d} fails at z={}", z.as_ref().map_or("none".into(), |z| z.to_string())))
        .unwrap_or_default();
    let at_kink = target.quantile_left(&t).into_finite().expect("1-alpha in (0,1]");

    Ok(CounterexampleReport {
        name: "d2".into(),
        claims: vec![
            Claim::new("Y in X1 with delta=1", verdicts.y_in_x1, "reflexive dominance on z grid"),
            Claim::new(
                "Y in AZero and not in AMinus, so AMinus is a strict subset of A",
                y_zero && !y_minus,
                format!("P(Y<0)={}", y.default_probability()),
            ),
            Claim::new(
                "Ytilde in AZero",
                target_zero && target_tail_ok,
                "P(Ytilde<=-eps)=max(1-alpha-eps^2,0) on eps=2^-1..2^-20",
            ),
            Claim::new("Ytilde not in AMinus", !target_minus, format!("P(Ytilde<0)={}", target.default_probability())),
            Claim::new(
                "Ytilde not in X1 (grid-certified), so A is a strict subset of AZero",
                all_delta_fail,
                format!("{} deltas falsified; smallest: {worst}", verdicts.target_violations.len()),
            ),
            Claim::new(
                "verdicts stable under z grid refinement",
                stable,
                format!("{} -> {} grid points", z_grid.len(), refined.len()),
            ),
        ],
        parameters: vec![
            ("alpha".into(), alpha.to_string()),
            (
                "delta_grid".into(),
                format!("{}..{} ({} points)", delta_grid[0], delta_grid[delta_grid.len() - 1], delta_grid.len()),
            ),
            ("z_grid_points".into(), z_grid.len().to_string()),
            ("standard".into(), "grid-certified".into()),
            ("convention_at_1-alpha".into(), format!("left limit, q(1-alpha)={at_kink}")),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EsWitness {
    pub beta: Rational,
    pub x: Position,
    pub y: Position,
    pub es_x: Rational,
    pub es_y: Rational,
    pub examined: usize,
}

/// Values used by the ES witness search.
pub const ES_SEARCH_VALUES: [i64; 5] = [-1, 0, 1, 3, 9];

/// Search nondecreasing positions on `n = 2..=8` states, lexicographically,
/// for `X` with `ES_β(X) <= 0 < ES_β(min(X, 0))`.
pub fn find_es_witness(beta: &Rational, limit: usize) -> Result<Option<EsWitness>> {
    crate::num::check_level(beta)?;
    if beta >= &Rational::one() {
        return Err(Error::LevelOutOfRange(beta.clone()));
    }
    let mut examined = 0;
    for n in 2..=8 {
        for combo in ES_SEARCH_VALUES.iter().copied().combinations_with_replacement(n) {
            if combo.iter().all(|&v| v >= 0) {
                continue;
            }
            if examined == limit {
                return Ok(None);
            }
            examined += 1;
            let x = Position::from_integers(&combo)?;
            let es_x = position_expected_shortfall(&x, beta);
            if es_x.is_positive() {
                continue;
            }
            let y = Position::new(x.values().iter().map(|v| v.clone().min(Rational::zero())).collect())?;
            let es_y = position_expected_shortfall(&y, beta);
            if es_y.is_positive() {
                return Ok(Some(EsWitness { beta: beta.clone(), x, y, es_x, es_y, examined }));
            }
        }
    }
    Ok(None)
}

pub const ES_SEARCH_LIMIT: usize = 100_000;

/// `{ES_β <= 0}` is not surplus-invariant for any `β` in the grid.
pub fn es_surplus_violation(beta_grid: &[Rational]) -> Result<CounterexampleReport> {
    let mut claims = Vec::new();
    for beta in beta_grid {
        let claim = match find_es_witness(beta, ES_SEARCH_LIMIT)? {
            Some(w) => {
                let replayed = Witness::SurplusPair { x: w.x.clone(), y: w.y.clone() }
                    .replay(&AcceptanceSetSpec::ESInduced(beta.clone()))?;
                Claim::new(
                    format!("ESInduced({beta}) not surplus-invariant"),
                    replayed,
                    format!("X={} ES={}; Y={} ES={}; examined={}", w.x, w.es_x, w.y, w.es_y, w.examined),
                )
            }
            None => Claim::new(
                format!("ESInduced({beta}) not surplus-invariant"),
                false,
                format!("no witness in {ES_SEARCH_LIMIT} candidates"),
            ),
        };
        claims.push(claim);
    }
    Ok(CounterexampleReport {
        name: "es".into(),
        claims,
        parameters: vec![
            ("betas".into(), beta_grid.iter().join(",")),
            ("values".into(), ES_SEARCH_VALUES.iter().join(",")),
            ("limit".into(), ES_SEARCH_LIMIT.to_string()),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakStarTerm {
    pub m: u64,
    /// Lebesgue measure of `{X_m = -1}`.
    pub default_probability: Rational,
    pub e_zx_m: Rational,
    pub e_zx_star: Rational,
    pub difference: Rational,
}

/// `X_m = -1` on `[(k-1)/m, (k-1)/m + (1-α)/m)` and `0` elsewhere;
/// `X* ≡ -(1-α)`.
pub fn weakstar_term(alpha: &Rational, m: u64, z: &PiecewiseLinear) -> Result<WeakStarTerm> {
    open_unit(alpha)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let t = Rational::one() - alpha;
    let m_r = Rational::from_integer(m.into());
    let mut default_probability = Rational::zero();
    let mut e_zx_m = Rational::zero();
    for k in 0..m {
        let lo = Rational::from_integer(k.into()) / &m_r;
        let hi = &lo + &t / &m_r;
        default_probability += &hi - &lo;
        e_zx_m -= z.integrate(&lo, &hi);
    }
    let e_zx_star = -(&t * z.integrate(&Rational::zero(), &Rational::one()));
    let difference = (&e_zx_m - &e_zx_star).abs();
    Ok(WeakStarTerm { m, default_probability, e_zx_m, e_zx_star, difference })
}

/// The step functions `X_m ∈ A⁺_α` converge weak-star to `X* ∉ A⁺_α`.
pub fn weakstar_stepfunction(alpha: &Rational, m: u64, z_family: &[PiecewiseLinear]) -> Result<CounterexampleReport> {
    open_unit(alpha)?;
    let t = Rational::one() - alpha;
    let law = FiniteDistribution::new([(-Rational::one(), t.clone()), (Rational::zero(), alpha.clone())])?;
    let star = FiniteDistribution::point_mass(-t.clone());
    let plus = AcceptanceSetSpec::APlus(alpha.clone());
    let mut claims = vec![
        Claim::new("X_m in APlus", accepted(&plus, &law)?, format!("law {law}")),
        Claim::new("X* not in APlus", !accepted(&plus, &star)?, format!("X*={}", -t.clone())),
    ];
    for z in z_family {
        let term = weakstar_term(alpha, m, z)?;
        let doubled = weakstar_term(alpha, 2 * m, z)?;
        claims.push(Claim::new(
            format!("P(X_m<0)=1-alpha for Z={z}"),
            term.default_probability == t,
            format!("P(X_m<0)={}", term.default_probability),
        ));
        let affine = z.knots().len() <= 2;
        let (verified, expected) = if affine {
            let slope = if z.knots().len() == 2 { z.slope_of_piece(0) } else { Rational::zero() };
            let bound =
                (alpha * &t * slope / (Rational::from_integer(2.into()) * Rational::from_integer(m.into()))).abs();
            (
                term.difference == bound && &doubled.difference * Rational::from_integer(2.into()) == term.difference,
                bound.to_string(),
            )
        } else {
            (doubled.difference <= term.difference, "nonincreasing under doubling".into())
        };
        claims.push(Claim::new(
            format!("|E[Z X_m]-E[Z X*]| for Z={z}"),
            verified,
            format!(
                "E[Z X_m]={} E[Z X*]={} diff={} expected={expected} diff(2m)={}",
                term.e_zx_m, term.e_zx_star, term.difference, doubled.difference
            ),
        ));
    }
    Ok(CounterexampleReport {
        name: "weakstar".into(),
        claims,
        parameters: vec![("alpha".into(), alpha.to_string()), ("m".into(), m.to_string())],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    #[test]
    fn d1_examples() {
        for k in 1..=9 {
            let r = example_d1(&rat(k, 10)).unwrap();
            assert!(r.all_verified(), "{r:?}");
        }
        let law = numeraire_product_law(&rat(3, 5)).unwrap();
        assert_eq!(law.cdf(&rat(-1, 2)), rat(2, 5));
        assert!(example_d1(&int(1)).is_err());
        assert!(example_d1(&int(0)).is_err());
    }

    #[test]
    fn d2_examples() {
        let a = rat(1, 2);
        let r = example_d2(&a, &default_delta_grid(40), &default_z_grid(&a, 100, 1024)).unwrap();
        assert!(r.all_verified(), "{r:?}");
        let y = uniform_shifted(&a).unwrap();
        let target = sqrt_target(&a).unwrap();
        // at z = 1/2 - 10^-6 the sqrt side is about -10^-3 against -10^-6
        let z = a.clone() - rat(1, 1_000_000);
        assert_eq!(dominance_violation(&target, &y, &int(1), std::slice::from_ref(&z)), Some(z));
        // too coarse a grid cannot falsify tiny deltas
        let coarse = default_z_grid(&a, 4, 4);
        assert!(dominance_violation(&target, &y, &pow2(-40), &coarse).is_none());
    }

    #[test]
    fn es_examples() {
        let w = find_es_witness(&int(0), ES_SEARCH_LIMIT).unwrap().unwrap();
        assert_eq!(w.x, Position::from_integers(&[-1, 1]).unwrap());
        assert_eq!((w.es_x, w.es_y), (int(0), rat(1, 2)));
        let r = es_surplus_violation(&[int(0), rat(1, 4), rat(1, 2), rat(3, 4)]).unwrap();
        assert!(r.all_verified(), "{r:?}");
    }

    #[test]
    fn weakstar_examples() {
        let identity = PiecewiseLinear::affine(int(0), int(1));
        let t = weakstar_term(&rat(1, 2), 4, &identity).unwrap();
        assert_eq!((t.e_zx_m, t.e_zx_star, t.difference), (rat(-7, 32), rat(-1, 4), rat(1, 32)));
        let one = PiecewiseLinear::affine(int(1), int(0));
        assert_eq!(weakstar_term(&rat(1, 3), 7, &one).unwrap().difference, int(0));
        for m in [1, 2, 4, 8, 16] {
            let t = weakstar_term(&rat(1, 2), m, &identity).unwrap();
            assert_eq!(t.difference, rat(1, 8 * m as i64));
            assert_eq!(t.default_probability, rat(1, 2));
        }
        let tent = PiecewiseLinear::parse("0:0,0.5:1,1:0").unwrap();
        let r = weakstar_stepfunction(&rat(1, 2), 4, &[identity, one, tent]).unwrap();
        assert!(r.all_verified(), "{r:?}");
    }
}
