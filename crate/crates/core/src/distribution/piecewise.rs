use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{FiniteDistribution, Law};
use crate::error::{Error, Result};
use crate::num::{Extended, Rational, Scalar, Surd};

/// Closed-form piece of a quantile function on one segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Constant(Rational),
    /// `a + b z` with `b >= 0`.
    Affine {
        intercept: Rational,
        slope: Rational,
    },
    /// `-scale * sqrt(c - z)` with `scale > 0` and `c` at or beyond the
    /// segment's right end.
    NegSqrt {
        scale: Rational,
        c: Rational,
    },
}

impl Shape {
    pub fn neg_sqrt(c: Rational) -> Self {
        Shape::NegSqrt { scale: Rational::one(), c }
    }

    pub fn eval(&self, z: &Rational) -> Surd {
        match self {
            Shape::Constant(c) => Surd::from_rational(c),
            Shape::Affine { intercept, slope } => Surd::from_rational(&(intercept + slope * z)),
            Shape::NegSqrt { scale, c } => Surd::neg_sqrt((c - z) * scale * scale),
        }
    }

    /// Supremum of `{z in (lo, hi] : shape(z) <= x}` (or `< x` when
    /// `strict`), `None` if the set is empty.
    fn sup_below(&self, lo: &Rational, hi: &Rational, x: &Rational, strict: bool) -> Option<Rational> {
        let holds = |v: &Rational| if strict { v < x } else { v <= x };
        let bound = match self {
            Shape::Constant(c) => return holds(c).then(|| hi.clone()),
            Shape::Affine { intercept, slope } => {
                if slope.is_zero() {
                    return holds(intercept).then(|| hi.clone());
                }
                (x - intercept) / slope
            }
            Shape::NegSqrt { scale, c } => {
                if x.is_positive() || (!strict && x.is_zero()) {
                    return Some(hi.clone());
                }
                c - (x * x) / (scale * scale)
            }
        };
        let bound = if &bound > hi { hi.clone() } else { bound };
        // For strict inequalities the set is open at `bound`, but the
        // supremum is the same.
        (&bound > lo).then_some(bound)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Constant(c) => write!(f, "{c}"),
            Shape::Affine { intercept, slope } => write!(f, "{intercept}+{slope}z"),
            Shape::NegSqrt { scale, c } if scale.is_one() => write!(f, "-sqrt({c}-z)"),
            Shape::NegSqrt { scale, c } => write!(f, "-{scale}sqrt({c}-z)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub lo: Rational,
    pub hi: Rational,
    pub shape: Shape,
}

impl Segment {
    pub fn new(lo: Rational, hi: Rational, shape: Shape) -> Self {
        Segment { lo, hi, shape }
    }

    /// Right limit at the left end, `q(lo+)`.
    pub fn start(&self) -> Surd {
        self.shape.eval(&self.lo)
    }

    pub fn end(&self) -> Surd {
        self.shape.eval(&self.hi)
    }
}

/// Left-continuous, nondecreasing quantile function on `(0, 1]` given by
/// closed-form pieces on consecutive segments `(lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiecewiseQuantile {
    segments: Vec<Segment>,
}

impl PiecewiseQuantile {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSegments("no segments".into()));
        }
        let mut expected_lo = Rational::zero();
        for (i, s) in segments.iter().enumerate() {
            if s.lo != expected_lo {
                return Err(Error::InvalidSegments(format!("segment {i} starts at {} not {expected_lo}", s.lo)));
            }
            if s.lo >= s.hi {
                return Err(Error::InvalidSegments(format!("segment {i} is empty")));
            }
            match &s.shape {
                Shape::Constant(_) => {}
                Shape::Affine { slope, .. } if slope.is_negative() => {
                    return Err(Error::NotMonotone(format!("segment {i} has negative slope {slope}")));
                }
                Shape::Affine { .. } => {}
                Shape::NegSqrt { scale, c } => {
                    if !scale.is_positive() {
                        return Err(Error::InvalidSegments(format!("segment {i} has scale {scale}")));
                    }
                    if c < &s.hi {
                        return Err(Error::InvalidSegments(format!(
                            "segment {i}: sqrt argument negative before {}",
                            s.hi
                        )));
                    }
                }
            }
            if i > 0 {
                let prev = &segments[i - 1];
                if prev.end() > s.start() {
                    return Err(Error::NotMonotone(format!("jump down at z={}", s.lo)));
                }
            }
            expected_lo = s.hi.clone();
        }
        if !expected_lo.is_one() {
            return Err(Error::InvalidSegments(format!("segments end at {expected_lo} not 1")));
        }
        Ok(PiecewiseQuantile { segments })
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![Segment::new(Rational::zero(), Rational::one(), Shape::Constant(c))])
            .expect("constant quantile is valid")
    }

    /// Uniform law on `(a, b)`.
    pub fn uniform(a: Rational, b: Rational) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidArgument(format!("uniform({a}, {b}) is empty")));
        }
        Self::new(vec![Segment::new(Rational::zero(), Rational::one(), Shape::Affine { slope: &b - &a, intercept: a })])
    }

    /// The step quantile function of a finite law.
    pub fn from_finite(d: &FiniteDistribution) -> Self {
        let mut lo = Rational::zero();
        let segments = d
            .atoms()
            .map(|(v, p)| {
                let hi = &lo + p;

                Segment::new(std::mem::replace(&mut lo, hi.clone()), hi, Shape::Constant(v.clone()))
            })
            .collect();
        PiecewiseQuantile { segments }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Segment containing `z` in `(lo, hi]`, for `0 < z <= 1`.
    fn segment_left(&self, z: &Rational) -> &Segment {
        let i = self.segments.partition_point(|s| &s.hi < z);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    /// Segment containing `z` in `[lo, hi)`, for `0 <= z < 1`.
    fn segment_right(&self, z: &Rational) -> &Segment {
        let i = self.segments.partition_point(|s| &s.hi <= z);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    /// All segment endpoints followed by `per_segment` equispaced interior
    /// points of every segment.
    pub fn verification_grid(&self, per_segment: usize) -> Vec<Rational> {
        let mut grid = Vec::new();
        for s in &self.segments {
            grid.push(s.lo.clone());
            let width = &s.hi - &s.lo;
            let steps = Rational::from_integer((per_segment + 1).into());
            for j in 1..=per_segment {
                grid.push(&s.lo + &width * Rational::from_integer(j.into()) / &steps);
            }
        }
        grid.push(Rational::one());
        grid
    }

    /// Check monotonicity on the verification grid with exact comparisons,
    /// plus the left limit matching the value at every segment end.
    pub fn verify_on_grid(&self, per_segment: usize) -> Result<()> {
        let grid = self.verification_grid(per_segment);
        let mut prev: Option<Extended<Surd>> = None;
        for z in grid.iter().filter(|z| z.is_positive()) {
            let left = self.quantile_left(z);
            let right = self.quantile_right(z);
            if left > right {
                return Err(Error::NotMonotone(format!("q({z}) > q({z}+)")));
            }
            if let Some(p) = &prev {
                if p > &left {
                    return Err(Error::NotMonotone(format!("decrease before z={z}")));
                }
            }
            prev = Some(right);
        }
        Ok(())
    }

    /// `E[min(|X|, 1)]` in the quantile coupling; exact for constant and
    /// affine pieces.
    pub fn integrate_clamped_abs(&self, lo: &Rational, hi: &Rational) -> Result<Rational> {
        let mut total = Rational::zero();
        for s in &self.segments {
            let a = if &s.lo > lo { &s.lo } else { lo };
            let b = if &s.hi < hi { &s.hi } else { hi };
            if a >= b {
                continue;
            }
            total += match &s.shape {
                Shape::Constant(c) => c.abs().min(Rational::one()) * (b - a),
                Shape::Affine { intercept, slope } => clamped_abs_affine(intercept, slope, a, b),
                Shape::NegSqrt { .. } => {
                    return Err(Error::Unrepresentable("integral of a square-root piece".into()));
                }
            };
        }
        Ok(total)
    }
}

/// `E[min(|X - Y|, 1)]` with `X = q_a(U)` and `Y = q_b(U)` for one uniform
/// `U`, the comonotone coupling of the two laws.
pub fn coupled_distance(a: &PiecewiseQuantile, b: &PiecewiseQuantile) -> Result<Rational> {
    let mut cuts: Vec<Rational> = a.segments.iter().chain(&b.segments).map(|s| s.hi.clone()).collect();
    cuts.push(Rational::zero());
    cuts.sort();
    cuts.dedup();
    let mut total = Rational::zero();
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let (pa, sa) = affine_parts(&a.segment_left(hi).shape)?;
        let (pb, sb) = affine_parts(&b.segment_left(hi).shape)?;
        total += clamped_abs_affine(&(pa - pb), &(sa - sb), lo, hi);
    }
    Ok(total)
}

fn affine_parts(shape: &Shape) -> Result<(Rational, Rational)> {
    match shape {
        Shape::Constant(c) => Ok((c.clone(), Rational::zero())),
        Shape::Affine { intercept, slope } => Ok((intercept.clone(), slope.clone())),
        Shape::NegSqrt { .. } => Err(Error::Unrepresentable("distance to a square-root piece".into())),
    }
}

/// `∫_a^b min(|p + s z|, 1) dz`, splitting at the points where the
/// integrand changes form.
fn clamped_abs_affine(p: &Rational, s: &Rational, a: &Rational, b: &Rational) -> Rational {
    let one = Rational::one();
    let mut cuts = vec![a.clone(), b.clone()];
    if !s.is_zero() {
        for level in [-one.clone(), Rational::zero(), one.clone()] {
            let z = (level - p) / s;
            if &z > a && &z < b {
                cuts.push(z);
            }
        }
    }
    cuts.sort();
    let two = Rational::from_integer(2.into());
    let mut total = Rational::zero();
    for w in cuts.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        let mid = (l + r) / &two;
        let at_mid = p + s * &mid;
        let width = r - l;
        total += if at_mid.abs() >= one {
            width
        } else {
            // integrand is affine here, so the midpoint rule is exact
            at_mid.abs() * width
        };
    }
    total
}

impl Law for PiecewiseQuantile {
    type Value = Surd;

    fn cdf(&self, x: &Rational) -> Rational {
        self.segments
            .iter()
            .rev()
            .find_map(|s| s.shape.sup_below(&s.lo, &s.hi, x, false))
            .unwrap_or_else(Rational::zero)
    }

    fn cdf_left(&self, x: &Rational) -> Rational {
        self.segments.iter().rev().find_map(|s| s.shape.sup_below(&s.lo, &s.hi, x, true)).unwrap_or_else(Rational::zero)
    }

    fn quantile_left(&self, t: &Rational) -> Extended<Surd> {
        if !t.is_positive() {
            return Extended::NegInf;
        }
        if t > &Rational::one() {
            return Extended::PosInf;
        }
        Extended::Finite(self.segment_left(t).shape.eval(t))
    }

    fn quantile_right(&self, t: &Rational) -> Extended<Surd> {
        if t.is_negative() {
            return Extended::NegInf;
        }
        if t >= &Rational::one() {
            return Extended::PosInf;
        }
        Extended::Finite(self.segment_right(t).shape.eval(t))
    }

    fn integrate_quantile(&self, lo: &Rational, hi: &Rational) -> Result<Rational> {
        let two = Rational::from_integer(2.into());
        let mut total = Rational::zero();
        for s in &self.segments {
            let a = if &s.lo > lo { &s.lo } else { lo };
            let b = if &s.hi < hi { &s.hi } else { hi };
            if a >= b {
                continue;
            }
            total += match &s.shape {
                Shape::Constant(c) => c * (b - a),
                Shape::Affine { intercept, slope } => intercept * (b - a) + slope * (b * b - a * a) / &two,
                Shape::NegSqrt { .. } => {
                    return Err(Error::Unrepresentable("integral of a square-root piece".into()));
                }
            };
        }
        Ok(total)
    }

    fn nonnegative_level_below(&self, t: &Rational) -> Option<Rational> {
        if !t.is_positive() || t > &Rational::one() {
            return None;
        }
        let s = self.segment_left(t);
        let two = Rational::from_integer(2.into());
        let from = match &s.shape {
            Shape::Constant(c) => (!c.is_negative()).then(|| s.lo.clone())?,
            Shape::Affine { intercept, slope } => {
                if !intercept.is_negative() && slope.is_zero() {
                    s.lo.clone()
                } else if slope.is_zero() {
                    return None;
                } else {
                    let root = -intercept / slope;
                    if root >= *t {
                        return None;
                    }
                    root.max(s.lo.clone())
                }
            }
            Shape::NegSqrt { .. } => return None,
        };
        Some((from + t) / two)
    }

    fn essinf(&self) -> Surd {
        self.segments[0].start()
    }

    fn esssup(&self) -> Surd {
        self.segments[self.segments.len() - 1].end()
    }
}

impl fmt::Display for PiecewiseQuantile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "({},{}]:{}", s.lo, s.hi, s.shape)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn sqrt_example(alpha: Rational) -> PiecewiseQuantile {
        let t = Rational::one() - &alpha;
        PiecewiseQuantile::new(vec![
            Segment::new(int(0), t.clone(), Shape::neg_sqrt(t.clone())),
            Segment::new(t.clone(), int(1), Shape::Affine { intercept: -t, slope: int(1) }),
        ])
        .unwrap()
    }

    #[test]
    fn uniform_cdf_and_quantiles() {
        let u = PiecewiseQuantile::uniform(rat(-2, 5), rat(3, 5)).unwrap();
        assert_eq!(u.cdf(&int(0)), rat(2, 5));
        assert_eq!(u.cdf_left(&int(0)), rat(2, 5));
        assert_eq!(u.cdf(&int(-1)), int(0));
        assert_eq!(u.cdf(&int(1)), int(1));
        assert_eq!(u.quantile_left(&rat(1, 2)), Extended::Finite(Surd::from_rational(&rat(1, 10))));
        assert_eq!(u.quantile_right(&int(0)), Extended::Finite(Surd::from_rational(&rat(-2, 5))));
        assert_eq!(u.integrate_quantile(&int(0), &int(1)).unwrap(), rat(1, 10));
    }

    #[test]
    fn sqrt_piece_cdf_inverts_quantile() {
        let q = sqrt_example(rat(1, 2));
        // P(Y <= -eps) = 1/2 - eps^2
        assert_eq!(q.cdf(&rat(-1, 10)), rat(1, 2) - rat(1, 100));
        assert_eq!(q.cdf_left(&int(0)), rat(1, 2));
        assert_eq!(q.cdf(&int(0)), rat(1, 2));
        assert_eq!(q.quantile_left(&rat(1, 2)), Extended::Finite(Surd::zero()));
        assert_eq!(q.essinf(), Surd::neg_sqrt(rat(1, 2)));
        q.verify_on_grid(1024).unwrap();
        assert!(q.integrate_quantile(&int(0), &int(1)).is_err());
        assert!(q.nonnegative_level_below(&rat(1, 2)).is_none());
        assert_eq!(q.nonnegative_level_below(&rat(3, 4)), Some(rat(5, 8)));
    }

    #[test]
    fn rejects_bad_segments() {
        let gap = PiecewiseQuantile::new(vec![Segment::new(int(0), rat(1, 2), Shape::Constant(int(0)))]);
        assert!(matches!(gap, Err(Error::InvalidSegments(_))));
        let down = PiecewiseQuantile::new(vec![
            Segment::new(int(0), rat(1, 2), Shape::Constant(int(1))),
            Segment::new(rat(1, 2), int(1), Shape::Constant(int(0))),
        ]);
        assert!(matches!(down, Err(Error::NotMonotone(_))));
        let slope = PiecewiseQuantile::new(vec![Segment::new(
            int(0),
            int(1),
            Shape::Affine { intercept: int(0), slope: int(-1) },
        )]);
        assert!(matches!(slope, Err(Error::NotMonotone(_))));
        let sqrt = PiecewiseQuantile::new(vec![Segment::new(int(0), int(1), Shape::neg_sqrt(rat(1, 2)))]);
        assert!(matches!(sqrt, Err(Error::InvalidSegments(_))));
    }

    #[test]
    fn step_quantile_and_coupled_distance() {
        let d = FiniteDistribution::new([(int(-1), rat(1, 4)), (int(1), rat(3, 4))]).unwrap();
        let q = PiecewiseQuantile::from_finite(&d);
        for k in 0..=8 {
            let t = rat(k, 8);
            assert_eq!(q.quantile_left(&t), d.quantile_left(&t).map(|v| Surd::from_rational(&v)));
            assert_eq!(q.quantile_right(&t), d.quantile_right(&t).map(|v| Surd::from_rational(&v)));
        }
        let u = PiecewiseQuantile::uniform(int(0), int(1)).unwrap();
        let zero = PiecewiseQuantile::constant(int(0));
        assert_eq!(coupled_distance(&u, &zero).unwrap(), rat(1, 2));
        assert_eq!(coupled_distance(&q, &zero).unwrap(), int(1));
        assert_eq!(coupled_distance(&q, &q).unwrap(), int(0));
    }

    #[test]
    fn clamped_abs_integral() {
        let u = PiecewiseQuantile::uniform(int(-2), int(2)).unwrap();
        // |x| on (-2,2) clamped at 1: mean is 3/4
        assert_eq!(u.integrate_clamped_abs(&int(0), &int(1)).unwrap(), rat(3, 4));
    }
}
