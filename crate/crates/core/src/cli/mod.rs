//! Command-line interface: `acceptset <command> [options]`.
//!
//! Exit status is 0 on success, 1 when a position is rejected or a check
//! does not come out as expected, and 2 on any input or runtime error.

pub mod config;
pub mod report;
pub mod scenarios;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::acceptance::{member, AcceptanceSetSpec};
use crate::characterize::{classify, ExactForm};
use crate::counterexamples::{
    default_delta_grid, default_z_grid, es_surplus_violation, example_d1, example_d2, weakstar_stepfunction,
    CounterexampleReport,
};
use crate::distribution::{FiniteDistribution, Law};
use crate::error::{Error, Result};
use crate::linear::PiecewiseLinear;
use crate::num::{parse_rational, rat, Rational};
use crate::properties::{
    check_cip_closedness, check_conicity, check_law_invariance, check_numeraire_invariance, check_surplus_invariance,
    check_truncation_closedness, default_caps, default_lambdas, default_numeraire_values, mass_shift_sequence,
    CheckConfig, GridSpace, Property, PropertyReport, Witness, DEFAULT_CIP_TOLERANCE,
};
use crate::risk_measures::RiskMeasureSpec;

use config::{parse_list, parse_measure, parse_set, Config};
use report::{Record, Report};
use scenarios::{load_scenarios, position_from_balance_sheet, BalanceSheet};

pub const SEED_ENV: &str = "ACCEPTSET_SEED";

#[derive(Debug, Parser)]
#[command(name = "acceptset", version, about = "Exact capital adequacy tests for VaR-induced acceptance sets")]
pub struct Cli {
    /// Seed for randomized searches; ACCEPTSET_SEED takes precedence.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trials for randomized searches.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide acceptability of a scenario table.
    Assess(AssessArgs),
    /// Evaluate risk measures on a scenario table.
    Measure(MeasureArgs),
    /// Falsify acceptance-set properties on a finite grid space.
    CheckProperties(PropertyArgs),
    /// Classify acceptance sets on an equi-probable grid space.
    Classify(SpaceArgs),
    /// Replay an explicit counterexample.
    Counterexample(CounterexampleArgs),
    /// Build the capital position from a balance sheet and asset returns.
    BalanceSheet(BalanceSheetArgs),
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    /// CSV with columns `scenario_id,probability,value` or `scenario_id,value`.
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Acceptance set, e.g. `APlus:0.99` (repeatable).
    #[arg(long = "set")]
    pub sets: Vec<String>,
    /// Add AMinus, AZero and APlus at this level.
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Option<Rational>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// CSV with columns `scenario_id,probability,value` or `scenario_id,value`.
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Risk measure, e.g. `ES:0.75` (repeatable).
    #[arg(long = "measure")]
    pub measures: Vec<String>,
    /// Add lower and upper VaR at this level.
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Option<Rational>,
    /// Add ES at this level.
    #[arg(long, value_parser = rational_arg)]
    pub beta: Option<Rational>,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Acceptance set or `Oracle:<name>` (repeatable).
    #[arg(long = "set")]
    pub sets: Vec<String>,
    /// Number of equally likely states.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated value grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    None,
    Violated,
}

#[derive(Debug, Args)]
pub struct PropertyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Property to check (repeatable); defaults to the five grid properties.
    #[arg(long = "property")]
    pub properties: Vec<String>,
    /// Required outcome; exit 1 when any property disagrees.
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CounterexampleName {
    D1,
    D2,
    Es,
    Weakstar,
    All,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(value_enum)]
    pub name: CounterexampleName,
    /// Confidence level.
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Option<Rational>,
    /// Comma-separated ES levels.
    #[arg(long)]
    pub beta: Option<String>,
    /// Number of blocks in the step-function example.
    #[arg(long)]
    pub m: Option<u64>,
    /// Piecewise-linear test function `x:y,...` (repeatable).
    #[arg(long = "z", allow_hyphen_values = true)]
    pub z: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BalanceSheetArgs {
    /// Net asset returns per scenario.
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Equity at time 0.
    #[arg(long, value_parser = rational_arg)]
    pub capital: Option<Rational>,
    /// Debt at time 0.
    #[arg(long, value_parser = rational_arg)]
    pub debt: Option<Rational>,
    /// Interest rate on debt.
    #[arg(long, value_parser = rational_arg)]
    pub rate: Option<Rational>,
    /// Acceptance set applied to the capital position (repeatable).
    #[arg(long = "set")]
    pub sets: Vec<String>,
}

/// Options shared by all commands after merging flags, environment and
/// configuration file.
struct Context {
    config: Config,
    seed: u64,
    trials: Option<u64>,
}

impl Context {
    fn new(cli: &Cli, env_seed: Option<String>) -> Result<Self> {
        let config = match &cli.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let env_seed = env_seed
            .map(|s| s.trim().parse::<u64>().map_err(|_| Error::Input(format!("{SEED_ENV}={s:?} is not a u64"))))
            .transpose()?;
        let seed = env_seed.or(cli.seed).or(config.seed).unwrap_or(0);
        let trials = cli.trials.or(config.trials);
        Ok(Context { config, seed, trials })
    }

    fn check_config(&self) -> CheckConfig {
        let mut c = CheckConfig::with_seed(self.seed);
        if let Some(t) = self.trials {
            c.trials = t;
        }
        c
    }

    fn sets(&self, inline: &[String]) -> Result<Vec<AcceptanceSetSpec>> {
        let mut sets = self.config.sets()?;
        for s in inline {
            sets.push(parse_set(s)?);
        }
        Ok(sets)
    }

    fn space(&self, args: &SpaceArgs) -> Result<GridSpace> {
        let n = args.n.or(self.config.n).unwrap_or(3);
        let grid = match (&args.grid, &self.config.grid) {
            (Some(g), _) => parse_list(g)?,
            (None, Some(g)) => g.to_rationals()?,
            (None, None) => vec![rat(-1, 1), rat(0, 1), rat(1, 1)],
        };
        let space = GridSpace::new(n, grid)?;
        if space.size().is_none() {
            return Err(Error::InvalidArgument(format!("{space} is too large to enumerate")));
        }
        Ok(space)
    }
}

/// Parse arguments and run; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let to_out = !e.use_stderr();
            let text = e.render().to_string();
            let _ = if to_out { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if to_out { 0 } else { 2 };
        }
    };
    let outcome = Context::new(&cli, std::env::var(SEED_ENV).ok()).and_then(|ctx| execute(&cli.command, &ctx));
    match outcome {
        Ok((report, status)) => {
            if write!(out, "{report}").is_err() {
                return 2;
            }
            status
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(command: &Command, ctx: &Context) -> Result<(Report, i32)> {
    match command {
        Command::Assess(a) => cmd_assess(a, ctx),
        Command::Measure(a) => cmd_measure(a, ctx),
        Command::CheckProperties(a) => cmd_check_properties(a, ctx),
        Command::Classify(a) => cmd_classify(a, ctx),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::BalanceSheet(a) => cmd_balance_sheet(a, ctx),
    }
}

fn var_families(alpha: &Rational) -> [AcceptanceSetSpec; 3] {
    [
        AcceptanceSetSpec::AMinus(alpha.clone()),
        AcceptanceSetSpec::AZero(alpha.clone()),
        AcceptanceSetSpec::APlus(alpha.clone()),
    ]
}

fn assess_distribution(d: &FiniteDistribution, sets: &[AcceptanceSetSpec]) -> Result<(Report, i32)> {
    if sets.is_empty() {
        return Err(Error::Input("no acceptance sets given".into()));
    }
    let mut report = Report::default();
    let mut accepted = 0;
    for set in sets {
        let v = member(set, d)?;
        let g = &v.diagnostics;
        accepted += usize::from(v.accepted);
        report.record(
            Record::new()
                .field("set", set)
                .field("accepted", v.accepted)
                .field("route", v.route.name())
                .rational("default_probability", &g.default_probability)
                .opt_rational("threshold", g.threshold.as_ref())
                .opt("var_lower", g.var_lower.as_ref())
                .opt("var_upper", g.var_upper.as_ref())
                .opt("probability_route", g.probability_route)
                .opt("var_route", g.var_route)
                .opt_rational("epsilon", g.epsilon.as_ref())
                .opt_rational("delta", g.delta.as_ref())
                .opt_rational("statistic", g.statistic.as_ref()),
        );
    }
    report.summary(format!("accepted by {accepted} of {} sets", sets.len()));
    Ok((report, if accepted == sets.len() { 0 } else { 1 }))
}

fn describe_distribution(report: &mut Report, d: &FiniteDistribution, scenarios: usize) {
    report.record(
        Record::new()
            .field("scenarios", scenarios)
            .field("atoms", d.len())
            .rational("mean", &d.mean())
            .rational("min", d.min_value())
            .rational("max", d.max_value()),
    );
}

fn cmd_assess(args: &AssessArgs, ctx: &Context) -> Result<(Report, i32)> {
    let mut sets = ctx.sets(&args.sets)?;
    if let Some(a) = &args.alpha {
        sets.extend(var_families(a));
    }
    let table = load_scenarios(&args.scenarios)?;
    let d = table.to_distribution()?;
    let mut report = Report::default();
    describe_distribution(&mut report, &d, table.rows.len());
    let (body, status) = assess_distribution(&d, &sets)?;
    report.extend(body);
    Ok((report, status))
}

fn measure_record(m: &RiskMeasureSpec, d: &FiniteDistribution) -> Result<Record> {
    let r = Record::new().field("measure", m.name());
    let r = match m {
        RiskMeasureSpec::VaRLower(a) | RiskMeasureSpec::VaRUpper(a) | RiskMeasureSpec::ES(a) => r.field("level", a),
        RiskMeasureSpec::Distortion(h) => r.field("distortion", h),
    };
    Ok(r.extended("value", &m.evaluate(d)?))
}

fn cmd_measure(args: &MeasureArgs, ctx: &Context) -> Result<(Report, i32)> {
    let mut measures = ctx.config.measures()?;
    for m in &args.measures {
        measures.push(parse_measure(m)?);
    }
    if let Some(a) = &args.alpha {
        measures.push(RiskMeasureSpec::VaRLower(a.clone()));
        measures.push(RiskMeasureSpec::VaRUpper(a.clone()));
    }
    if let Some(b) = &args.beta {
        measures.push(RiskMeasureSpec::ES(b.clone()));
    }
    for m in &measures {
        m.validate()?;
    }
    if measures.is_empty() {
        return Err(Error::Input("no risk measures given".into()));
    }
    let table = load_scenarios(&args.scenarios)?;
    let d = table.to_distribution()?;
    let mut report = Report::default();
    describe_distribution(&mut report, &d, table.rows.len());
    for m in &measures {
        report.record(measure_record(m, &d)?);
    }
    report.summary(format!("{} measures evaluated", measures.len()));
    Ok((report, 0))
}

fn witness_record(r: Record, w: &Witness) -> Record {
    match w {
        Witness::SurplusPair { x, y } => r.field("witness", "surplus_pair").field("x", x).field("y", y),
        Witness::Permutation { x, perm } => r
            .field("witness", "permutation")
            .field("x", x)
            .field("perm", perm.iter().map(usize::to_string).collect::<Vec<_>>().join(",")),
        Witness::Scaling { x, lambda } => r.field("witness", "scaling").field("x", x).field("lambda", lambda),
        Witness::Numeraire { x, z } => r.field("witness", "numeraire").field("x", x).field("z", z),
        Witness::Truncation { x, caps } => r
            .field("witness", "truncation")
            .field("x", x)
            .field("caps", caps.iter().map(Rational::to_string).collect::<Vec<_>>().join(",")),
        Witness::Sequence(seq) => {
            r.field("witness", "sequence").field("sequence", &seq.label).field("terms", seq.terms.len())
        }
    }
}

fn property_record(p: &PropertyReport, set: &AcceptanceSetSpec) -> Result<Record> {
    let mut r = Record::new()
        .field("set", &p.set)
        .field("property", p.property.name())
        .field("verdict", if p.violated() { "violated" } else { "no_violation" })
        .field("mode", p.mode.name())
        .field("examined", p.examined)
        .field("seed", p.seed);
    if let Some(w) = p.witness() {
        r = witness_record(r, w).field("replay", w.replay(set)?);
    }
    Ok(r.opt("annotation", p.annotation.as_ref()))
}

const GRID_PROPERTIES: [Property; 5] = [
    Property::SurplusInvariance,
    Property::LawInvariance,
    Property::Conicity,
    Property::NumeraireInvariance,
    Property::TruncationClosedness,
];

fn run_property(
    property: Property,
    set: &AcceptanceSetSpec,
    space: &GridSpace,
    config: &CheckConfig,
) -> Result<PropertyReport> {
    match property {
        Property::SurplusInvariance => check_surplus_invariance(set, space, config),
        Property::LawInvariance => check_law_invariance(set, space, config),
        Property::Conicity => check_conicity(set, space, &default_lambdas(), config),
        Property::NumeraireInvariance => check_numeraire_invariance(set, space, &default_numeraire_values(), config),
        Property::TruncationClosedness => check_truncation_closedness(set, space, &default_caps(), config),
        Property::CipClosedness => {
            let alpha = set.var_level().cloned().unwrap_or_else(|| rat(1, 2));
            let sequence = mass_shift_sequence(&alpha, 128)?;
            let (num, den) = DEFAULT_CIP_TOLERANCE;
            check_cip_closedness(set, &[sequence], &rat(num, den), config.seed)
        }
    }
}

fn cmd_check_properties(args: &PropertyArgs, ctx: &Context) -> Result<(Report, i32)> {
    let sets = ctx.sets(&args.space.sets)?;
    if sets.is_empty() {
        return Err(Error::Input("no acceptance sets given".into()));
    }
    let names = if args.properties.is_empty() {
        ctx.config.properties.clone().unwrap_or_default()
    } else {
        args.properties.clone()
    };
    let properties = if names.is_empty() {
        GRID_PROPERTIES.to_vec()
    } else {
        names.iter().map(|n| Property::parse(n)).collect::<Result<Vec<_>>>()?
    };
    let expect = match (args.expect, ctx.config.expect.as_deref()) {
        (Some(e), _) => e,
        (None, Some(text)) => Expect::from_str(text, true).map_err(|e| Error::Input(format!("expect: {e}")))?,
        (None, None) => Expect::None,
    };
    let space = ctx.space(&args.space)?;
    let config = ctx.check_config();
    let mut report = Report::default();
    let grid = space.grid().iter().map(Rational::to_string).collect::<Vec<_>>().join(",");
    report.record(
        Record::new()
            .field("n", space.n())
            .field("grid", grid)
            .field("seed", config.seed)
            .field("trials", config.trials),
    );
    let mut as_expected = true;
    for set in &sets {
        for &property in &properties {
            let p = run_property(property, set, &space, &config)?;
            as_expected &= p.violated() == (expect == Expect::Violated);
            report.record(property_record(&p, set)?);
            report.summary(format!(
                "{set} {}: {}",
                property.name(),
                if p.violated() { "violation found" } else { "no violation" }
            ));
        }
    }
    Ok((report, if as_expected { 0 } else { 1 }))
}

fn form_fields(r: Record, form: Option<&ExactForm>) -> Record {
    match form {
        None => r.field("exact_form", "none"),
        Some(ExactForm::Empty) => r.field("exact_form", "Empty"),
        Some(ExactForm::StrictlyBetween) => r.field("exact_form", "StrictlyBetween"),
        Some(ExactForm::APlusForm(a)) => r.field("exact_form", "APlusForm").field("form_alpha", a),
        Some(ExactForm::AMinusForm(a)) => r.field("exact_form", "AMinusForm").field("form_alpha", a),
    }
}

fn cmd_classify(args: &SpaceArgs, ctx: &Context) -> Result<(Report, i32)> {
    let sets = ctx.sets(&args.sets)?;
    if sets.is_empty() {
        return Err(Error::Input("no acceptance sets given".into()));
    }
    let space = ctx.space(args)?;
    let config = ctx.check_config();
    let mut report = Report::default();
    let mut status = 0;
    for set in &sets {
        let c = classify(set, &space, &config)?;
        let r = Record::new()
            .field("set", &c.set)
            .field("n", c.n)
            .field("universe", c.universe_size)
            .field("accepted", c.accepted)
            .rational("alpha_hat", &c.alpha_hat)
            .field("lower_sandwich", c.lower_sandwich_ok)
            .field("upper_sandwich", c.upper_sandwich_ok);
        let r = form_fields(r, c.exact_form.as_ref())
            .opt("lower_witness", c.lower_witness.as_ref())
            .opt("upper_witness", c.upper_witness.as_ref())
            .field("properties_pass", c.properties_pass())
            .opt("theorem_consistent", c.theorem_consistent);
        report.record(r);
        for p in &c.properties {
            report.record(property_record(p, set)?);
        }
        if c.theorem_consistent == Some(false) {
            status = 1;
        }
        report.summary(format!(
            "{}: {}",
            c.set,
            c.exact_form.as_ref().map_or("no exact form".to_string(), ExactForm::to_string)
        ));
    }
    Ok((report, status))
}

fn render_counterexample(report: &mut Report, c: &CounterexampleReport) {
    let mut header = Record::new().field("counterexample", &c.name);
    for (k, v) in &c.parameters {
        header = header.field(k, v);
    }
    report.record(header);
    for (i, claim) in c.claims.iter().enumerate() {
        report.record(
            Record::new()
                .field("counterexample", &c.name)
                .field("claim", i + 1)
                .field("verified", claim.verified)
                .field("description", &claim.description)
                .field("evidence", &claim.evidence),
        );
    }
    let verified = c.claims.iter().filter(|c| c.verified).count();
    report.summary(format!("{}: {verified} of {} claims verified", c.name, c.claims.len()));
}

fn counterexample_reports(args: &CounterexampleArgs, name: CounterexampleName) -> Result<Vec<CounterexampleReport>> {
    Ok(match name {
        CounterexampleName::D1 => vec![example_d1(args.alpha.as_ref().unwrap_or(&rat(3, 5)))?],
        CounterexampleName::D2 => {
            let alpha = args.alpha.clone().unwrap_or_else(|| rat(1, 2));
            vec![example_d2(&alpha, &default_delta_grid(40), &default_z_grid(&alpha, 100, 1024))?]
        }
        CounterexampleName::Es => {
            let betas = match &args.beta {
                Some(b) => parse_list(b)?,
                None => vec![rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4)],
            };
            vec![es_surplus_violation(&betas)?]
        }
        CounterexampleName::Weakstar => {
            let alpha = args.alpha.clone().unwrap_or_else(|| rat(1, 2));
            let z = if args.z.is_empty() {
                vec![PiecewiseLinear::affine(rat(0, 1), rat(1, 1)), PiecewiseLinear::affine(rat(1, 1), rat(0, 1))]
            } else {
                args.z.iter().map(|s| PiecewiseLinear::parse(s)).collect::<Result<Vec<_>>>()?
            };
            vec![weakstar_stepfunction(&alpha, args.m.unwrap_or(4), &z)?]
        }
        CounterexampleName::All => {
            let mut all = Vec::new();
            for n in
                [CounterexampleName::D1, CounterexampleName::D2, CounterexampleName::Es, CounterexampleName::Weakstar]
            {
                all.extend(counterexample_reports(args, n)?);
            }
            all
        }
    })
}

fn cmd_counterexample(args: &CounterexampleArgs) -> Result<(Report, i32)> {
    let reports = counterexample_reports(args, args.name)?;
    let mut report = Report::default();
    for c in &reports {
        render_counterexample(&mut report, c);
    }
    let ok = reports.iter().all(CounterexampleReport::all_verified);
    Ok((report, if ok { 0 } else { 1 }))
}

fn cmd_balance_sheet(args: &BalanceSheetArgs, ctx: &Context) -> Result<(Report, i32)> {
    let from_config = ctx.config.balance_sheet.as_ref();
    let pick = |flag: &Option<Rational>, name: &str, f: fn(&config::BalanceSheetEntry) -> &config::Number| match (
        flag,
        from_config,
    ) {
        (Some(v), _) => Ok(v.clone()),
        (None, Some(b)) => f(b).to_rational(),
        (None, None) => Err(Error::Input(format!("balance sheet needs --{name}"))),
    };
    let sheet = BalanceSheet {
        c: pick(&args.capital, "capital", |b| &b.c)?,
        d: pick(&args.debt, "debt", |b| &b.d)?,
        r: pick(&args.rate, "rate", |b| &b.r)?,
        returns: load_scenarios(&args.scenarios)?,
    };
    let d = position_from_balance_sheet(&sheet)?;
    let mut report = Report::default();
    report.record(Record::new().rational("c", &sheet.c).rational("d", &sheet.d).rational("r", &sheet.r));
    for (row, p) in sheet.returns.rows.iter().zip(sheet.returns.probabilities()) {
        report.record(
            Record::new()
                .field("scenario", &row.id)
                .field("probability", &p)
                .field("return", &row.value)
                .rational("capital", &sheet.capital(&row.value)),
        );
    }
    describe_distribution(&mut report, &d, sheet.returns.rows.len());
    report.summary(format!("P(X<0) = {}", d.default_probability()));
    let sets = ctx.sets(&args.sets)?;
    if sets.is_empty() {
        return Ok((report, 0));
    }
    let (body, status) = assess_distribution(&d, &sets)?;
    report.extend(body);
    Ok((report, status))
}
