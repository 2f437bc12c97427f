//! Falsifiers for acceptance-set properties on equi-probable spaces.
//!
//! Every check searches for a counterexample. Small candidate spaces are
//! enumerated in lexicographic order; larger ones are sampled with one
//! seeded stream per trial, and the lexicographically smallest violation
//! found is reported so results do not depend on scheduling.

use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::acceptance::{member, member_position, AcceptanceSetSpec};
use crate::distribution::{coupled_distance, FiniteDistribution, PiecewiseQuantile, Position};
use crate::error::{Error, Result};
use crate::num::{int, rat, Rational};

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;
/// Largest space whose memberships are precomputed.
const CACHE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    SurplusInvariance,
    LawInvariance,
    Conicity,
    NumeraireInvariance,
    TruncationClosedness,
    CipClosedness,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::SurplusInvariance => "surplus_invariance",
            Property::LawInvariance => "law_invariance",
            Property::Conicity => "conicity",
            Property::NumeraireInvariance => "numeraire_invariance",
            Property::TruncationClosedness => "truncation_closedness",
            Property::CipClosedness => "cip_closedness",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "surplus_invariance" | "surplus" => Property::SurplusInvariance,
            "law_invariance" | "law" => Property::LawInvariance,
            "conicity" => Property::Conicity,
            "numeraire_invariance" | "numeraire" => Property::NumeraireInvariance,
            "truncation_closedness" | "truncation" => Property::TruncationClosedness,
            "cip_closedness" | "cip" => Property::CipClosedness,
            other => return Err(Error::InvalidArgument(format!("unknown property {other:?}"))),
        })
    }

    pub const ALL: [Property; 6] = [
        Property::SurplusInvariance,
        Property::LawInvariance,
        Property::Conicity,
        Property::NumeraireInvariance,
        Property::TruncationClosedness,
        Property::CipClosedness,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sequence of laws converging to `limit` in the comonotone coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawSequence {
    pub label: String,
    pub terms: Vec<PiecewiseQuantile>,
    pub limit: PiecewiseQuantile,
}

impl LawSequence {
    /// Distances `E[min(|X_k - X|, 1)]` of every term to the limit.
    pub fn distances(&self) -> Result<Vec<Rational>> {
        self.terms.iter().map(|t| coupled_distance(t, &self.limit)).collect()
    }

    /// Distances must be nonincreasing and end at or below `tolerance`.
    pub fn check_convergence(&self, tolerance: &Rational) -> Result<Vec<Rational>> {
        let d = self.distances()?;
        let shrinking = d.windows(2).all(|w| w[0] >= w[1]);
        match d.last() {
            Some(last) if shrinking && last <= tolerance => Ok(d),
            _ => Err(Error::NonConvergent(format!("{}: distances {}", self.label, d.iter().join(",")))),
        }
    }
}

/// The offending object found by a check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `x` accepted, `y^- <= x^-`, `y` rejected.
    SurplusPair { x: Position, y: Position },
    /// `x` accepted, `x ∘ perm` rejected.
    Permutation { x: Position, perm: Vec<usize> },
    /// `x` accepted, `lambda x` rejected.
    Scaling { x: Position, lambda: Rational },
    /// `x` accepted, `z x` rejected.
    Numeraire { x: Position, z: Position },
    /// Every truncation of `x` at `caps` accepted, `x` rejected.
    Truncation { x: Position, caps: Vec<Rational> },
    /// Every term accepted, the limit rejected.
    Sequence(LawSequence),
}

impl Witness {
    /// Re-run the memberships and relations; `true` when the violation
    /// reproduces.
    pub fn replay(&self, set: &AcceptanceSetSpec) -> Result<bool> {
        let inside = |x: &Position| member_position(set, x);
        Ok(match self {
            Witness::SurplusPair { x, y } => y.negative_part_below(x) && inside(x)? && !inside(y)?,
            Witness::Permutation { x, perm } => inside(x)? && !inside(&x.permute(perm)?)?,
            Witness::Scaling { x, lambda } => lambda.is_positive() && inside(x)? && !inside(&x.scale(lambda))?,
            Witness::Numeraire { x, z } => {
                z.values().iter().all(|v| v.is_positive()) && inside(x)? && !inside(&z.pointwise_mul(x)?)?
            }
            Witness::Truncation { x, caps } => {
                let mut all = true;
                for c in caps {
                    all &= inside(&x.truncate(c))?;
                }
                all && !inside(x)?
            }
            Witness::Sequence(seq) => {
                let mut all = true;
                for t in &seq.terms {
                    all &= member(set, t)?.accepted;
                }
                all && !member(set, &seq.limit)?.accepted
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Randomized,
    Sequences,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Randomized => "randomized",
            Mode::Sequences => "sequences",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NoViolation { trials: u64 },
    Violated { witness: Witness },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub set: String,
    pub verdict: Verdict,
    pub seed: u64,
    pub mode: Mode,
    /// Candidates examined (exhaustive) or trials drawn (randomized).
    pub examined: u64,
    pub annotation: Option<String>,
}

impl PropertyReport {
    pub fn violated(&self) -> bool {
        matches!(self.verdict, Verdict::Violated { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Violated { witness } => Some(witness),
            Verdict::NoViolation { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    pub seed: u64,
    pub trials: u64,
    pub exhaustive_limit: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { seed: 0, trials: DEFAULT_TRIALS, exhaustive_limit: EXHAUSTIVE_LIMIT }
    }
}

impl CheckConfig {
    pub fn with_seed(seed: u64) -> Self {
        CheckConfig { seed, ..Self::default() }
    }

    fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

/// All positions on `n` states with values drawn from a finite grid,
/// indexed in lexicographic order of the sorted grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpace {
    n: usize,
    grid: Vec<Rational>,
}

impl GridSpace {
    pub fn new(n: usize, grid: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let mut grid = grid;
        grid.sort();
        grid.dedup();
        if grid.is_empty() {
            return Err(Error::InvalidArgument("value grid is empty".into()));
        }
        Ok(GridSpace { n, grid })
    }

    pub fn integers(n: usize, values: &[i64]) -> Result<Self> {
        Self::new(n, values.iter().map(|&v| int(v)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &[Rational] {
        &self.grid
    }

    /// Number of positions, if it fits in `u64`.
    pub fn size(&self) -> Option<u64> {
        (self.grid.len() as u64).checked_pow(self.n as u32)
    }

    pub fn digits(&self, mut index: u64) -> Vec<usize> {
        let g = self.grid.len() as u64;
        let mut digits = vec![0; self.n];
        for d in digits.iter_mut().rev() {
            *d = (index % g) as usize;
            index /= g;
        }
        digits
    }

    pub fn index(&self, digits: &[usize]) -> u64 {
        digits.iter().fold(0u64, |acc, &d| acc * self.grid.len() as u64 + d as u64)
    }

    pub fn position(&self, digits: &[usize]) -> Position {
        Position::new(digits.iter().map(|&d| self.grid[d].clone()).collect()).expect("n >= 1")
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        (0..self.size().expect("enumerable space")).map(|i| self.position(&self.digits(i)))
    }

    /// First grid index whose value is at least `v`.
    fn first_at_least(&self, v: &Rational) -> usize {
        self.grid.partition_point(|g| g < v)
    }

    fn max_abs(&self) -> Rational {
        self.grid[0].abs().max(self.grid[self.grid.len() - 1].abs())
    }
}

impl fmt::Display for GridSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} grid={{{}}}", self.n, self.grid.iter().join(","))
    }
}

/// Membership on a grid space, precomputed when the space is small.
pub struct MembershipTable<'a> {
    set: &'a AcceptanceSetSpec,
    space: &'a GridSpace,
    cache: Option<Vec<bool>>,
}

impl<'a> MembershipTable<'a> {
    pub fn new(set: &'a AcceptanceSetSpec, space: &'a GridSpace) -> Result<Self> {
        set.validate()?;
        let cache = match space.size() {
            Some(size) if size <= CACHE_LIMIT => Some(
                (0..size)
                    .into_par_iter()
                    .map(|i| member_position(set, &space.position(&space.digits(i))))
                    .collect::<Result<Vec<bool>>>()?,
            ),
            _ => None,
        };
        Ok(MembershipTable { set, space, cache })
    }

    pub fn at(&self, digits: &[usize]) -> Result<bool> {
        match &self.cache {
            Some(c) => Ok(c[self.space.index(digits) as usize]),
            None => member_position(self.set, &self.space.position(digits)),
        }
    }

    pub fn at_index(&self, index: u64) -> Result<bool> {
        match &self.cache {
            Some(c) => Ok(c[index as usize]),
            None => member_position(self.set, &self.space.position(&self.space.digits(index))),
        }
    }

    /// Indices of accepted positions in order; needs an enumerable space.
    pub fn accepted_indices(&self) -> Result<Vec<u64>> {
        let size = self.space.size().ok_or_else(|| Error::InvalidArgument("space too large".into()))?;
        let flags: Vec<bool> = match &self.cache {
            Some(c) => c.clone(),
            None => (0..size).into_par_iter().map(|i| self.at_index(i)).collect::<Result<_>>()?,
        };
        Ok(flags.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i as u64).collect())
    }
}

/// Outcome of a search: the canonical violation, with its ordering key.
type Found<K> = Option<(K, Witness)>;

fn finish(
    property: Property,
    set: &AcceptanceSetSpec,
    config: &CheckConfig,
    mode: Mode,
    examined: u64,
    found: Option<Witness>,
    annotation: Option<String>,
) -> PropertyReport {
    let verdict = match found {
        Some(witness) => Verdict::Violated { witness },
        None => Verdict::NoViolation { trials: examined },
    };
    PropertyReport { property, set: set.to_string(), verdict, seed: config.seed, mode, examined, annotation }
}

/// Run `per_x` for every position index in order and keep the first hit.
fn exhaustive_first<F>(space: &GridSpace, per_x: F) -> Result<Option<Witness>>
where
    F: Fn(u64, &[usize]) -> Result<Option<Witness>> + Sync,
{
    let size = space.size().expect("checked by caller");
    let hit = (0..size).into_par_iter().map(|i| per_x(i, &space.digits(i))).find_map_first(|r| match r {
        Ok(None) => None,
        other => Some(other),
    });
    match hit {
        Some(r) => r,
        None => Ok(None),
    }
}

/// Run `trial` for every trial index and keep the smallest key.
fn randomized_min<K, F>(config: &CheckConfig, trial: F) -> Result<Option<Witness>>
where
    K: Ord + Send,
    F: Fn(&mut ChaCha8Rng) -> Result<Found<K>> + Sync,
{
    let hits: Vec<(K, Witness)> = (0..config.trials)
        .into_par_iter()
        .map(|t| trial(&mut config.rng(t)))
        .collect::<Result<Vec<Found<K>>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(hits.into_iter().min_by(|a, b| a.0.cmp(&b.0)).map(|(_, w)| w))
}

fn random_digits(rng: &mut ChaCha8Rng, n: usize, g: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..g)).collect()
}

/// Search for `X` accepted and `Y` rejected with `Y^- <= X^-` statewise.
pub fn check_surplus_invariance(
    set: &AcceptanceSetSpec,
    space: &GridSpace,
    config: &CheckConfig,
) -> Result<PropertyReport> {
    let table = MembershipTable::new(set, space)?;
    let g = space.grid.len();
    let zero = Rational::zero();
    // Y_i may take any grid value at or above min(X_i, 0).
    let floor = |d: usize| space.first_at_least(&space.grid[d].clone().min(zero.clone()));
    let per_value: u128 = (0..g).map(|d| (g - floor(d)) as u128).sum();
    let candidates = per_value.checked_pow(space.n as u32).filter(|&c| c <= config.exhaustive_limit as u128);

    let (mode, examined, found) = match candidates {
        Some(count) => {
            let found = exhaustive_first(space, |_, xd| {
                if !table.at(xd)? {
                    return Ok(None);
                }
                let lows: Vec<usize> = xd.iter().map(|&d| floor(d)).collect();
                if lows.iter().any(|&l| l >= g) {
                    return Ok(None);
                }
                let mut yd = lows.clone();
                loop {
                    if !table.at(&yd)? {
                        return Ok(Some(Witness::SurplusPair { x: space.position(xd), y: space.position(&yd) }));
                    }
                    // odometer over the product of [lows_i, g)
                    let mut i = space.n;
                    loop {
                        if i == 0 {
                            return Ok(None);
                        }
                        i -= 1;
                        yd[i] += 1;
                        if yd[i] < g {
                            break;
                        }
                        yd[i] = lows[i];
                    }
                }
            })?;
            (Mode::Exhaustive, count as u64, found)
        }
        None => {
            let found = randomized_min(config, |rng| {
                let xd = random_digits(rng, space.n, g);
                if !table.at(&xd)? {
                    return Ok(None);
                }
                let mut yd = Vec::with_capacity(space.n);
                for &d in &xd {
                    let lo = floor(d);
                    if lo >= g {
                        return Ok(None);
                    }
                    yd.push(rng.gen_range(lo..g));
                }
                if table.at(&yd)? {
                    return Ok(None);
                }
                let w = Witness::SurplusPair { x: space.position(&xd), y: space.position(&yd) };
                Ok(Some(((xd, yd), w)))
            })?;
            (Mode::Randomized, config.trials, found)
        }
    };
    Ok(finish(Property::SurplusInvariance, set, config, mode, examined, found, None))
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Search for `X` accepted and a relabeling `X ∘ σ` rejected.
pub fn check_law_invariance(
    set: &AcceptanceSetSpec,
    space: &GridSpace,
    config: &CheckConfig,
) -> Result<PropertyReport> {
    let table = MembershipTable::new(set, space)?;
    let n = space.n;
    let count = space.size().and_then(|s| s.checked_mul(factorial(n)));
    let (mode, examined, found) = match count.filter(|&c| c <= config.exhaustive_limit) {
        Some(count) => {
            let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
            let found = exhaustive_first(space, |_, xd| {
                if !table.at(xd)? {
                    return Ok(None);
                }
                for p in &perms {
                    let yd: Vec<usize> = p.iter().map(|&i| xd[i]).collect();
                    if !table.at(&yd)? {
                        return Ok(Some(Witness::Permutation { x: space.position(xd), perm: p.clone() }));
                    }
                }
                Ok(None)
            })?;
            (Mode::Exhaustive, count, found)
        }
        None => {
            let g = space.grid.len();
            let found = randomized_min(config, |rng| {
                let xd = random_digits(rng, n, g);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(rng);
                if !table.at(&xd)? {
                    return Ok(None);
                }
                let yd: Vec<usize> = perm.iter().map(|&i| xd[i]).collect();
                if table.at(&yd)? {
                    return Ok(None);
                }
                let w = Witness::Permutation { x: space.position(&xd), perm: perm.clone() };
                Ok(Some(((xd, perm), w)))
            })?;
            (Mode::Randomized, config.trials, found)
        }
    };
    Ok(finish(Property::LawInvariance, set, config, mode, examined, found, None))
}

pub fn default_lambdas() -> Vec<Rational> {
    vec![rat(1, 4), rat(1, 2), int(2), int(3), int(10)]
}

/// Search for `X` accepted and `λX` rejected. Scaled positions leave the
/// grid, so membership is evaluated directly.
pub fn check_conicity(
    set: &AcceptanceSetSpec,
    space: &GridSpace,
    lambdas: &[Rational],
    config: &CheckConfig,
) -> Result<PropertyReport> {
    if let Some(bad) = lambdas.iter().find(|l| !l.is_positive()) {
        return Err(Error::InvalidArgument(format!("scaling factor {bad} is not positive")));
    }
    let table = MembershipTable::new(set, space)?;
    let count = space.size().and_then(|s| s.checked_mul(lambdas.len() as u64));
    let scaled_rejects = |xd: &[usize]| -> Result<Option<Witness>> {
        let x = space.position(xd);
        for l in lambdas {
            if !member_position(set, &x.scale(l))? {
                return Ok(Some(Witness::Scaling { x, lambda: l.clone() }));
            }
        }
        Ok(None)
    };
    let (mode, examined, found) = match count.filter(|&c| c <= config.exhaustive_limit) {
        Some(count) => {
            let found = exhaustive_first(space, |_, xd| if table.at(xd)? { scaled_rejects(xd) } else { Ok(None) })?;
            (Mode::Exhaustive, count, found)
        }
        None => {
            let g = space.grid.len();
            let found = randomized_min(config, |rng| {
                let xd = random_digits(rng, space.n, g);
                let l = rng.gen_range(0..lambdas.len().max(1));
                if lambdas.is_empty() || !table.at(&xd)? {
                    return Ok(None);
                }
                let x = space.position(&xd);
                if member_position(set, &x.scale(&lambdas[l]))? {
                    return Ok(None);
                }
                Ok(Some(((xd, l), Witness::Scaling { x, lambda: lambdas[l].clone() })))
            })?;
            (Mode::Randomized, config.trials, found)
        }
    };
    Ok(finish(Property::Conicity, set, config, mode, examined, found, None))
}

pub fn default_numeraire_values() -> Vec<Rational> {
    vec![rat(1, 2), int(1), int(2), int(3)]
}

/// Search for `X` accepted and `ZX` rejected with `Z` strictly positive,
/// each coordinate of `Z` drawn from `z_values`.
pub fn check_numeraire_invariance(
    set: &AcceptanceSetSpec,
    space: &GridSpace,
    z_values: &[Rational],
    config: &CheckConfig,
) -> Result<PropertyReport> {
    if let Some(bad) = z_values.iter().find(|z| !z.is_positive()) {
        return Err(Error::NonPositiveNumeraire(bad.clone()));
    }
    if z_values.is_empty() {
        return Err(Error::InvalidArgument("no numeraire values".into()));
    }
    let z_space = GridSpace::new(space.n, z_values.to_vec())?;
    let table = MembershipTable::new(set, space)?;
    let annotation = match set {
        AcceptanceSetSpec::AZero(_) => Some(
            "AZero coincides with AMinus on equi-probable spaces; its failure needs an atomless law (counterexample d1)"
                .to_string(),
        ),
        _ => None,
    };
    let count = space.size().zip(z_space.size()).and_then(|(a, b)| a.checked_mul(b));
    let (mode, examined, found) = match count.filter(|&c| c <= config.exhaustive_limit) {
        Some(count) => {
            let zs: Vec<Position> = z_space.positions().collect();
            let found = exhaustive_first(space, |_, xd| {
                if !table.at(xd)? {
                    return Ok(None);
                }
                let x = space.position(xd);
                for z in &zs {
                    if !member_position(set, &z.pointwise_mul(&x)?)? {
                        return Ok(Some(Witness::Numeraire { x, z: z.clone() }));
                    }
                }
                Ok(None)
            })?;
            (Mode::Exhaustive, count, found)
        }
        None => {
            let (g, gz) = (space.grid.len(), z_space.grid.len());
            let found = randomized_min(config, |rng| {
                let xd = random_digits(rng, space.n, g);
                let zd = random_digits(rng, space.n, gz);
                if !table.at(&xd)? {
                    return Ok(None);
                }
                let (x, z) = (space.position(&xd), z_space.position(&zd));
                if member_position(set, &z.pointwise_mul(&x)?)? {
                    return Ok(None);
                }
                Ok(Some(((xd, zd), Witness::Numeraire { x, z })))
            })?;
            (Mode::Randomized, config.trials, found)
        }
    };
    Ok(finish(Property::NumeraireInvariance, set, config, mode, examined, found, annotation))
}

pub fn default_caps() -> Vec<Rational> {
    vec![rat(1, 2), int(1), int(2), int(4), int(8)]
}

/// Search for `X` rejected while every truncation at `caps` is accepted.
pub fn check_truncation_closedness(
    set: &AcceptanceSetSpec,
    space: &GridSpace,
    caps: &[Rational],
    config: &CheckConfig,
) -> Result<PropertyReport> {
    if caps.is_empty() || caps.iter().any(|c| !c.is_positive()) || caps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("caps must be positive and strictly increasing".into()));
    }
    let table = MembershipTable::new(set, space)?;
    let bound = space.max_abs();
    let annotation = if caps.last().expect("nonempty") >= &bound {
        format!("vacuous: cap {} reaches max |value| = {bound}, where truncation is the identity", caps.last().unwrap())
    } else {
        format!("caps stay below max |value| = {bound}; every position on a finite space is bounded")
    };
    let truncations_accepted = |x: &Position| -> Result<bool> {
        for c in caps {
            if !member_position(set, &x.truncate(c))? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let (mode, examined, found) = match space.size().filter(|&s| s <= config.exhaustive_limit) {
        Some(count) => {
            let found = exhaustive_first(space, |_, xd| {
                let x = space.position(xd);
                if table.at(xd)? || !truncations_accepted(&x)? {
                    return Ok(None);
                }
                Ok(Some(Witness::Truncation { x, caps: caps.to_vec() }))
            })?;
            (Mode::Exhaustive, count, found)
        }
        None => {
            let g = space.grid.len();
            let found = randomized_min(config, |rng| {
                let xd = random_digits(rng, space.n, g);
                let x = space.position(&xd);
                if table.at(&xd)? || !truncations_accepted(&x)? {
                    return Ok(None);
                }
                Ok(Some((xd, Witness::Truncation { x, caps: caps.to_vec() })))
            })?;
            (Mode::Randomized, config.trials, found)
        }
    };
    Ok(finish(Property::TruncationClosedness, set, config, mode, examined, found, Some(annotation)))
}

pub const DEFAULT_CIP_TOLERANCE: (i64, i64) = (1, 100);

/// Search the given sequences for one inside the set whose limit is
/// rejected. Every sequence must converge.
pub fn check_cip_closedness(
    set: &AcceptanceSetSpec,
    sequences: &[LawSequence],
    tolerance: &Rational,
    seed: u64,
) -> Result<PropertyReport> {
    set.validate()?;
    let config = CheckConfig::with_seed(seed);
    let mut found = None;
    for seq in sequences {
        seq.check_convergence(tolerance)?;
        let w = Witness::Sequence(seq.clone());
        if w.replay(set)? {
            found = Some(w);
            break;
        }
    }
    let examined = sequences.len() as u64;
    Ok(finish(Property::CipClosedness, set, &config, Mode::Sequences, examined, found, None))
}

/// `X_k = -1` on mass `(1-α) - 1/k` and `+1` elsewhere, converging to the
/// law with `P(X = -1) = 1 - α`. Terms start once `1/k < 1-α`.
pub fn mass_shift_sequence(alpha: &Rational, k_max: u64) -> Result<LawSequence> {
    let mass = Rational::one() - alpha;
    if !mass.is_positive() || alpha.is_negative() {
        return Err(Error::InvalidArgument(format!("mass shift needs alpha in [0,1), got {alpha}")));
    }
    let law = |p: Rational| -> Result<PiecewiseQuantile> {
        let q = Rational::one() - &p;
        let atoms = [(int(-1), p), (int(1), q)].into_iter().filter(|(_, w)| w.is_positive());
        Ok(PiecewiseQuantile::from_finite(&FiniteDistribution::new(atoms)?))
    };
    let mut terms = Vec::new();
    for k in 1..=k_max {
        let shift = Rational::new(1.into(), k.into());
        if shift < mass {
            terms.push(law(&mass - shift)?);
        }
    }
    Ok(LawSequence { label: format!("mass_shift(alpha={alpha})"), terms, limit: law(mass)? })
}

/// `k` copies of one law.
pub fn constant_sequence(limit: PiecewiseQuantile, k: usize) -> LawSequence {
    LawSequence { label: "constant".into(), terms: vec![limit.clone(); k], limit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::{CustomOracle, LossFunction};

    fn grid5(n: usize) -> GridSpace {
        GridSpace::integers(n, &[-2, -1, 0, 1, 2]).unwrap()
    }

    #[test]
    fn space_indexing_round_trips() {
        let s = grid5(3);
        assert_eq!(s.size(), Some(125));
        for i in [0, 1, 7, 124] {
            assert_eq!(s.index(&s.digits(i)), i);
        }
        assert_eq!(s.position(&s.digits(0)), Position::from_integers(&[-2, -2, -2]).unwrap());
    }

    #[test]
    fn var_families_pass_everything_on_small_spaces() {
        let config = CheckConfig::default();
        for n in 1..=3 {
            let space = grid5(n);
            for k in 0..=4 {
                let a = rat(k, 4);
                for set in [
                    AcceptanceSetSpec::AMinus(a.clone()),
                    AcceptanceSetSpec::AZero(a.clone()),
                    AcceptanceSetSpec::APlus(a),
                ] {
                    assert!(!check_surplus_invariance(&set, &space, &config).unwrap().violated(), "{set}");
                    assert!(!check_law_invariance(&set, &space, &config).unwrap().violated(), "{set}");
                    assert!(!check_conicity(&set, &space, &default_lambdas(), &config).unwrap().violated());
                    let r = check_numeraire_invariance(&set, &space, &default_numeraire_values(), &config).unwrap();
                    assert!(!r.violated());
                    let caps = default_caps();
                    assert!(!check_truncation_closedness(&set, &space, &caps, &config).unwrap().violated());
                }
            }
        }
    }

    #[test]
    fn es_zero_fails_surplus_invariance() {
        let r = check_surplus_invariance(&AcceptanceSetSpec::ESInduced(int(0)), &grid5(2), &CheckConfig::default())
            .unwrap();
        let w = r.witness().unwrap();
        assert!(w.replay(&AcceptanceSetSpec::ESInduced(int(0))).unwrap());
        assert_eq!(r.mode, Mode::Exhaustive);
    }

    #[test]
    fn shortfall_identity_is_surplus_invariant_but_not_conic() {
        let set = AcceptanceSetSpec::Shortfall { loss: LossFunction::identity(), c: int(1) };
        let space = grid5(2);
        let config = CheckConfig::default();
        assert!(!check_surplus_invariance(&set, &space, &config).unwrap().violated());
        let r = check_conicity(&set, &space, &[int(2)], &config).unwrap();
        let Witness::Scaling { x, lambda } = r.witness().unwrap() else { panic!() };
        assert_eq!(lambda, &int(2));
        assert!(r.witness().unwrap().replay(&set).unwrap());
        assert!(x.values().iter().any(|v| v.is_negative()));
        let direct = Witness::Scaling { x: Position::from_integers(&[-1, -1]).unwrap(), lambda: int(2) };
        assert!(direct.replay(&set).unwrap());
    }

    #[test]
    fn swap_sensitive_oracle_fails_law_invariance() {
        let target = Position::from_integers(&[-1, 1]).unwrap();
        let set = AcceptanceSetSpec::CustomOracle(CustomOracle::predicate("only(-1,1)", move |x| x == &target));
        let r = check_law_invariance(&set, &grid5(2), &CheckConfig::default()).unwrap();
        assert_eq!(
            r.witness(),
            Some(&Witness::Permutation { x: Position::from_integers(&[-1, 1]).unwrap(), perm: vec![1, 0] })
        );
        let one = check_law_invariance(&set, &grid5(1), &CheckConfig::default()).unwrap();
        assert!(!one.violated());
    }

    #[test]
    fn conicity_with_unit_scale_never_violates() {
        let set = AcceptanceSetSpec::Shortfall { loss: LossFunction::identity(), c: int(1) };
        assert!(!check_conicity(&set, &grid5(2), &[int(1)], &CheckConfig::default()).unwrap().violated());
        assert!(check_conicity(&set, &grid5(2), &[int(0)], &CheckConfig::default()).is_err());
    }

    #[test]
    fn numeraire_rejects_nonpositive_values_and_annotates_a_zero() {
        let set = AcceptanceSetSpec::AZero(rat(1, 2));
        assert!(matches!(
            check_numeraire_invariance(&set, &grid5(2), &[int(1), int(0)], &CheckConfig::default()),
            Err(Error::NonPositiveNumeraire(_))
        ));
        let r = check_numeraire_invariance(&set, &grid5(2), &[int(2)], &CheckConfig::default()).unwrap();
        assert!(!r.violated());
        assert!(r.annotation.unwrap().contains("AMinus"));
    }

    #[test]
    fn truncation_annotation_marks_vacuous_runs() {
        let r = check_truncation_closedness(
            &AcceptanceSetSpec::AMinus(rat(1, 2)),
            &grid5(2),
            &[int(1), int(2)],
            &CheckConfig::default(),
        )
        .unwrap();
        assert!(!r.violated());
        assert!(r.annotation.unwrap().starts_with("vacuous"));
    }

    #[test]
    fn randomized_mode_is_deterministic() {
        let set = AcceptanceSetSpec::ESInduced(rat(3, 4));
        let space = grid5(8);
        let config = CheckConfig { seed: 7, trials: 20_000, exhaustive_limit: EXHAUSTIVE_LIMIT };
        let a = check_surplus_invariance(&set, &space, &config).unwrap();
        let b = check_surplus_invariance(&set, &space, &config).unwrap();
        assert_eq!(a.mode, Mode::Randomized);
        assert_eq!(a, b);
        assert!(a.violated());
        assert!(a.witness().unwrap().replay(&set).unwrap());
    }

    #[test]
    fn cip_sequences() {
        let a = rat(1, 2);
        let seq = mass_shift_sequence(&a, 100).unwrap();
        let d = seq.check_convergence(&rat(1, 100)).unwrap();
        assert_eq!(d.last().unwrap(), &rat(1, 100));
        let tol = rat(1, 100);
        let minus =
            check_cip_closedness(&AcceptanceSetSpec::AMinus(a.clone()), std::slice::from_ref(&seq), &tol, 0).unwrap();
        assert!(minus.violated());
        assert!(minus.witness().unwrap().replay(&AcceptanceSetSpec::AMinus(a.clone())).unwrap());
        let plus =
            check_cip_closedness(&AcceptanceSetSpec::APlus(a.clone()), std::slice::from_ref(&seq), &tol, 0).unwrap();
        assert!(!plus.violated());
        let c = constant_sequence(PiecewiseQuantile::constant(int(-1)), 3);
        assert!(!check_cip_closedness(&AcceptanceSetSpec::AMinus(a.clone()), &[c], &tol, 0).unwrap().violated());
        let far = LawSequence {
            label: "far".into(),
            terms: vec![PiecewiseQuantile::constant(int(3))],
            limit: PiecewiseQuantile::constant(int(0)),
        };
        assert!(matches!(
            check_cip_closedness(&AcceptanceSetSpec::APlus(a), &[far], &tol, 0),
            Err(Error::NonConvergent(_))
        ));
    }
}
