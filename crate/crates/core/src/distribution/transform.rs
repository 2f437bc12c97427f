use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{FiniteDistribution, Law, PiecewiseQuantile, Segment, Shape};
use crate::error::{Error, Result};
use crate::num::{Extended, Rational, Scalar};

/// Continuous monotone maps from a closed family: affine maps, symmetric
/// clamps `min(max(-cap, x), cap)`, and compositions applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MonotoneMap {
    Affine { shift: Rational, scale: Rational },
    Clamp { cap: Rational },
    Compose(Vec<MonotoneMap>),
}

impl MonotoneMap {
    pub fn identity() -> Self {
        MonotoneMap::Affine { shift: Rational::zero(), scale: Rational::one() }
    }

    pub fn negation() -> Self {
        MonotoneMap::Affine { shift: Rational::zero(), scale: -Rational::one() }
    }

    pub fn scaling(factor: Rational) -> Self {
        MonotoneMap::Affine { shift: Rational::zero(), scale: factor }
    }

    pub fn clamp(cap: Rational) -> Self {
        MonotoneMap::Clamp { cap }
    }

    /// Reject constant affine maps and nonpositive caps.
    pub fn validate(&self) -> Result<()> {
        match self {
            MonotoneMap::Affine { scale, .. } if scale.is_zero() => {
                Err(Error::NotMonotone("affine map with zero scale is constant".into()))
            }
            MonotoneMap::Clamp { cap } if !cap.is_positive() => {
                Err(Error::InvalidArgument(format!("clamp cap {cap} must be positive")))
            }
            MonotoneMap::Compose(maps) => maps.iter().try_for_each(MonotoneMap::validate),
            _ => Ok(()),
        }
    }

    pub fn is_decreasing(&self) -> bool {
        match self {
            MonotoneMap::Affine { scale, .. } => scale.is_negative(),
            MonotoneMap::Clamp { .. } => false,
            MonotoneMap::Compose(maps) => maps.iter().filter(|m| m.is_decreasing()).count() % 2 == 1,
        }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        match self {
            MonotoneMap::Affine { shift, scale } => shift + scale * x,
            MonotoneMap::Clamp { cap } => x.clone().clamp(-cap.clone(), cap.clone()),
            MonotoneMap::Compose(maps) => maps.iter().fold(x.clone(), |acc, m| m.apply(&acc)),
        }
    }

    /// Apply to an exact scalar; `None` when a shift of an irrational value
    /// would leave the scalar type.
    pub fn apply_scalar<V: Scalar>(&self, x: &V) -> Option<V> {
        match self {
            MonotoneMap::Affine { shift, scale } => {
                let scaled = x.scale(scale);
                if shift.is_zero() {
                    Some(scaled)
                } else {
                    Some(V::from_rational(&(scaled.to_rational()? + shift)))
                }
            }
            MonotoneMap::Clamp { cap } => {
                let hi = V::from_rational(cap);
                let lo = V::from_rational(&-cap.clone());
                Some(x.clone().clamp(lo, hi))
            }
            MonotoneMap::Compose(maps) => maps.iter().try_fold(x.clone(), |acc, m| m.apply_scalar(&acc)),
        }
    }
}

impl fmt::Display for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonotoneMap::Affine { shift, scale } => write!(f, "{shift}+{scale}x"),
            MonotoneMap::Clamp { cap } => write!(f, "clamp({cap})"),
            MonotoneMap::Compose(maps) => {
                for (i, m) in maps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" then ")?;
                    }
                    write!(f, "{m}")?;
                }
                Ok(())
            }
        }
    }
}

/// Laws whose image under a [`MonotoneMap`] is again representable.
pub trait Transform: Law + Sized {
    fn apply_map(&self, map: &MonotoneMap) -> Result<Self>;
    /// Levels where the quantile function may jump or change form.
    fn breakpoints(&self) -> Vec<Rational>;
}

impl Transform for FiniteDistribution {
    fn apply_map(&self, map: &MonotoneMap) -> Result<Self> {
        map.validate()?;
        Ok(self.map_values(|v| map.apply(v)))
    }

    fn breakpoints(&self) -> Vec<Rational> {
        let mut running = Rational::zero();
        self.probabilities()
            .iter()
            .map(|p| {
                running += p;
                running.clone()
            })
            .collect()
    }
}

impl Transform for PiecewiseQuantile {
    fn apply_map(&self, map: &MonotoneMap) -> Result<Self> {
        map.validate()?;
        match map {
            MonotoneMap::Compose(maps) => maps.iter().try_fold(self.clone(), |acc, m| acc.apply_map(m)),
            MonotoneMap::Affine { shift, scale } if scale.is_negative() => {
                let segments = self
                    .segments()
                    .iter()
                    .rev()
                    .map(|s| reflect_segment(s, shift, scale))
                    .collect::<Result<Vec<_>>>()?;
                PiecewiseQuantile::new(segments)
            }
            MonotoneMap::Affine { shift, scale } => {
                let segments = self
                    .segments()
                    .iter()
                    .map(|s| {
                        let shape = match &s.shape {
                            Shape::Constant(c) => Shape::Constant(shift + scale * c),
                            Shape::Affine { intercept, slope } => {
                                Shape::Affine { intercept: shift + scale * intercept, slope: scale * slope }
                            }
                            Shape::NegSqrt { scale: s0, c } if shift.is_zero() => {
                                Shape::NegSqrt { scale: s0 * scale, c: c.clone() }
                            }
                            Shape::NegSqrt { .. } => {
                                return Err(Error::Unrepresentable("shifted square-root piece".into()));
                            }
                        };
                        Ok(Segment::new(s.lo.clone(), s.hi.clone(), shape))
                    })
                    .collect::<Result<Vec<_>>>()?;
                PiecewiseQuantile::new(segments)
            }
            MonotoneMap::Clamp { cap } => {
                let mut segments = Vec::new();
                for s in self.segments() {
                    clamp_segment(s, cap, &mut segments);
                }
                PiecewiseQuantile::new(segments)
            }
        }
    }

    fn breakpoints(&self) -> Vec<Rational> {
        self.segments().iter().map(|s| s.hi.clone()).collect()
    }
}

/// Image of `(lo, hi]` under `z -> 1 - z` with `x -> shift + scale x`,
/// `scale < 0`.
fn reflect_segment(s: &Segment, shift: &Rational, scale: &Rational) -> Result<Segment> {
    let one = Rational::one();
    let shape = match &s.shape {
        Shape::Constant(c) => Shape::Constant(shift + scale * c),
        Shape::Affine { intercept, slope } => {
            Shape::Affine { intercept: shift + scale * (intercept + slope), slope: -(scale * slope) }
        }
        Shape::NegSqrt { .. } => {
            return Err(Error::Unrepresentable("reflected square-root piece".into()));
        }
    };
    Ok(Segment::new(&one - &s.hi, &one - &s.lo, shape))
}

fn clamp_segment(s: &Segment, cap: &Rational, out: &mut Vec<Segment>) {
    let lo_cap = -cap.clone();
    let mut push = |lo: &Rational, hi: &Rational, shape: Shape| {
        if lo < hi {
            out.push(Segment::new(lo.clone(), hi.clone(), shape));
        }
    };
    match &s.shape {
        Shape::Constant(c) => push(&s.lo, &s.hi, Shape::Constant(c.clone().clamp(lo_cap, cap.clone()))),
        Shape::Affine { intercept, slope } if slope.is_zero() => {
            push(&s.lo, &s.hi, Shape::Constant(intercept.clone().clamp(lo_cap, cap.clone())))
        }
        Shape::Affine { intercept, slope } => {
            let z1 = ((&lo_cap - intercept) / slope).clamp(s.lo.clone(), s.hi.clone());
            let z2 = ((cap - intercept) / slope).clamp(s.lo.clone(), s.hi.clone());
            push(&s.lo, &z1, Shape::Constant(lo_cap.clone()));
            push(&z1, &z2, s.shape.clone());
            push(&z2, &s.hi, Shape::Constant(cap.clone()));
        }
        Shape::NegSqrt { scale, c } => {
            let z1 = (c - (cap * cap) / (scale * scale)).clamp(s.lo.clone(), s.hi.clone());
            push(&s.lo, &z1, Shape::Constant(lo_cap));
            push(&z1, &s.hi, s.shape.clone());
        }
    }
}

pub fn transform_increasing<L: Transform>(d: &L, phi: &MonotoneMap) -> Result<L> {
    phi.validate()?;
    if phi.is_decreasing() {
        return Err(Error::NotMonotone(format!("{phi} is decreasing")));
    }
    d.apply_map(phi)
}

pub fn transform_decreasing<L: Transform>(d: &L, psi: &MonotoneMap) -> Result<L> {
    psi.validate()?;
    if !psi.is_decreasing() {
        return Err(Error::NotMonotone(format!("{psi} is increasing")));
    }
    d.apply_map(psi)
}

/// Law of `min(max(-cap, X), cap)`.
pub fn truncate<L: Transform>(d: &L, cap: &Rational) -> Result<L> {
    if !cap.is_positive() {
        return Err(Error::InvalidArgument(format!("truncation cap {cap} must be positive")));
    }
    d.apply_map(&MonotoneMap::clamp(cap.clone()))
}

/// Check `q_{φ(X)}(z) = φ(q_X(z))` for increasing maps and
/// `q_{ψ(X)}(z) = ψ(q_X((1-z)+))` for decreasing ones at every `z` in
/// `grid` strictly inside `(0, 1)` and at every breakpoint. Returns the
/// first failing level.
pub fn verify_transform_identity<L: Transform>(
    d: &L,
    map: &MonotoneMap,
    grid: &[Rational],
) -> Result<Option<Rational>> {
    let image = d.apply_map(map)?;
    let one = Rational::one();
    let mut levels: Vec<Rational> = grid.iter().chain(d.breakpoints().iter()).cloned().collect();
    levels.extend(d.breakpoints().iter().map(|b| &one - b));
    levels.sort();
    levels.dedup();
    for z in levels.iter().filter(|z| z.is_positive() && *z < &one) {
        let source = if map.is_decreasing() { d.quantile_right(&(&one - z)) } else { d.quantile_left(z) };
        let expected = match source {
            Extended::Finite(v) => {
                Extended::Finite(map.apply_scalar(&v).ok_or_else(|| Error::Unrepresentable(format!("{map} at {v}")))?)
            }
            other => other,
        };
        if image.quantile_left(z) != expected {
            return Ok(Some(z.clone()));
        }
    }
    Ok(None)
}

/// `z -> min(q(z), 0)`, the quantile function of `-X^-`.
pub struct NegativePartQuantile<'a, L: Law> {
    law: &'a L,
}

impl<L: Law> NegativePartQuantile<'_, L> {
    pub fn eval(&self, z: &Rational) -> Extended<L::Value> {
        let zero = Extended::Finite(L::Value::from_rational(&Rational::zero()));
        self.law.quantile_left(z).min(zero)
    }
}

pub fn negative_part_quantile<L: Law>(d: &L) -> NegativePartQuantile<'_, L> {
    NegativePartQuantile { law: d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat, Surd};

    fn atoms(pairs: &[(i64, (i64, i64))]) -> FiniteDistribution {
        FiniteDistribution::new(pairs.iter().map(|&(v, (p, q))| (int(v), rat(p, q)))).unwrap()
    }

    #[test]
    fn finite_examples() {
        let d = atoms(&[(-1, (1, 2)), (1, (1, 2))]);
        let doubled = transform_increasing(&d, &MonotoneMap::scaling(int(2))).unwrap();
        assert_eq!(doubled, atoms(&[(-2, (1, 2)), (2, (1, 2))]));
        assert_eq!(transform_increasing(&d, &MonotoneMap::identity()).unwrap(), d);

        let e = atoms(&[(-2, (1, 4)), (3, (3, 4))]);
        let negated = transform_decreasing(&e, &MonotoneMap::negation()).unwrap();
        assert_eq!(negated, atoms(&[(-3, (3, 4)), (2, (1, 4))]));

        assert!(transform_increasing(&e, &MonotoneMap::negation()).is_err());
        assert!(transform_decreasing(&e, &MonotoneMap::identity()).is_err());
        assert!(transform_increasing(&e, &MonotoneMap::scaling(int(0))).is_err());
    }

    #[test]
    fn truncation_examples() {
        let d = atoms(&[(-5, (1, 2)), (5, (1, 2))]);
        assert_eq!(truncate(&d, &int(1)).unwrap(), atoms(&[(-1, (1, 2)), (1, (1, 2))]));
        assert_eq!(truncate(&d, &int(5)).unwrap(), d);
        let four = atoms(&[(-2, (1, 4)), (-1, (1, 4)), (0, (1, 4)), (3, (1, 4))]);
        let clamped = truncate(&four, &rat(3, 2)).unwrap();
        // -1 lies inside the cap, so only -2 and 3 move.
        let expected = FiniteDistribution::new([
            (rat(-3, 2), rat(1, 4)),
            (int(-1), rat(1, 4)),
            (int(0), rat(1, 4)),
            (rat(3, 2), rat(1, 4)),
        ])
        .unwrap();
        assert_eq!(clamped, expected);
        assert!(truncate(&four, &int(0)).is_err());
    }

    #[test]
    fn negative_part_examples() {
        let d = atoms(&[(-1, (1, 2)), (1, (1, 2))]);
        let q = negative_part_quantile(&d);
        assert_eq!(q.eval(&rat(1, 4)), Extended::Finite(int(-1)));
        assert_eq!(q.eval(&rat(3, 4)), Extended::Finite(int(0)));
        let nonneg = atoms(&[(0, (1, 2)), (4, (1, 2))]);
        let q = negative_part_quantile(&nonneg);
        for k in 1..=8 {
            assert_eq!(q.eval(&rat(k, 8)), Extended::Finite(int(0)));
        }
    }

    #[test]
    fn piecewise_transforms_satisfy_identities() {
        let u = PiecewiseQuantile::uniform(int(-1), int(3)).unwrap();
        let grid: Vec<Rational> = (1..64).map(|k| rat(k, 64)).collect();
        for map in [
            MonotoneMap::negation(),
            MonotoneMap::clamp(int(2)),
            MonotoneMap::Affine { shift: int(1), scale: rat(-1, 2) },
            MonotoneMap::Compose(vec![MonotoneMap::clamp(rat(1, 2)), MonotoneMap::scaling(int(3))]),
        ] {
            assert_eq!(verify_transform_identity(&u, &map, &grid).unwrap(), None, "{map}");
        }
        let neg = u.apply_map(&MonotoneMap::negation()).unwrap();
        assert_eq!(neg, PiecewiseQuantile::uniform(int(-3), int(1)).unwrap());
    }

    #[test]
    fn sqrt_piece_under_scaling_and_clamp() {
        let q = PiecewiseQuantile::new(vec![
            Segment::new(int(0), rat(1, 2), Shape::neg_sqrt(rat(1, 2))),
            Segment::new(rat(1, 2), int(1), Shape::Affine { intercept: rat(-1, 2), slope: int(1) }),
        ])
        .unwrap();
        let scaled = q.apply_map(&MonotoneMap::scaling(int(3))).unwrap();
        assert_eq!(scaled.essinf(), Surd::neg_sqrt(rat(9, 2)));
        let clamped = truncate(&q, &rat(1, 2)).unwrap();
        assert_eq!(clamped.essinf(), Surd::from_rational(&rat(-1, 2)));
        assert_eq!(clamped.default_probability(), q.default_probability());
        let grid: Vec<Rational> = (1..128).map(|k| rat(k, 128)).collect();
        assert_eq!(verify_transform_identity(&q, &MonotoneMap::clamp(rat(1, 2)), &grid).unwrap(), None);
        assert!(q.apply_map(&MonotoneMap::negation()).is_err());
    }
}
