//! Run configuration: a TOML file with `[[set]]`, `[[measure]]` and
//! `[balance_sheet]` tables, plus the inline `kind:params` syntax used on the
//! command line.

use std::path::Path;

use serde::Deserialize;

use crate::acceptance::{builtin_oracle, AcceptanceSetSpec, LossFunction, BUILTIN_ORACLES};
use crate::error::{Error, Result};
use crate::linear::PiecewiseLinear;
use crate::num::{parse_rational, Rational};
use crate::risk_measures::{DistortionFunction, RiskMeasureSpec};

/// A number written as a TOML string, integer or float. Floats are read
/// through their shortest decimal form; quote values that need more digits.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Number::Int(v) => Ok(Rational::from_integer((*v).into())),
            Number::Float(v) if v.is_finite() => parse_rational(&v.to_string()),
            Number::Float(v) => Err(Error::Parse(v.to_string())),
            Number::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    List(Vec<Number>),
    Text(String),
}

impl GridValue {
    pub fn to_rationals(&self) -> Result<Vec<Rational>> {
        match self {
            GridValue::List(items) => items.iter().map(Number::to_rational).collect(),
            GridValue::Text(s) => parse_list(s),
        }
    }
}

pub fn parse_list(text: &str) -> Result<Vec<Rational>> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(parse_rational).collect()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetEntry {
    pub kind: String,
    pub alpha: Option<Number>,
    pub beta: Option<Number>,
    pub c: Option<Number>,
    /// `power:k` or a knot list `x:y,...`.
    pub loss: Option<String>,
    pub knots: Option<String>,
    pub name: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureEntry {
    pub kind: String,
    pub alpha: Option<Number>,
    pub beta: Option<Number>,
    pub knots: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalanceSheetEntry {
    pub c: Number,
    pub d: Number,
    pub r: Number,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub n: Option<usize>,
    pub grid: Option<GridValue>,
    pub expect: Option<String>,
    pub properties: Option<Vec<String>>,
    #[serde(default)]
    pub set: Vec<SetEntry>,
    #[serde(default)]
    pub measure: Vec<MeasureEntry>,
    pub balance_sheet: Option<BalanceSheetEntry>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Input(format!("config: {}", e.message())))
    }

    pub fn sets(&self) -> Result<Vec<AcceptanceSetSpec>> {
        self.set.iter().map(SetEntry::build).collect()
    }

    pub fn measures(&self) -> Result<Vec<RiskMeasureSpec>> {
        self.measure.iter().map(MeasureEntry::build).collect()
    }
}

fn required(field: &Option<Number>, name: &str, kind: &str) -> Result<Rational> {
    field.as_ref().ok_or_else(|| Error::Input(format!("{kind} needs {name}")))?.to_rational()
}

fn parse_loss(text: &str) -> Result<LossFunction> {
    let loss = match text.trim().strip_prefix("power:") {
        Some(k) => LossFunction::Power(k.trim().parse().map_err(|_| Error::Input(format!("bad power {k:?}")))?),
        None if text.trim() == "identity" => LossFunction::identity(),
        None => LossFunction::Linear(PiecewiseLinear::parse(text)?),
    };
    loss.validate()?;
    Ok(loss)
}

fn oracle(name: &str) -> Result<AcceptanceSetSpec> {
    builtin_oracle(name)
        .map(AcceptanceSetSpec::CustomOracle)
        .ok_or_else(|| Error::Input(format!("unknown oracle {name:?}; known: {}", BUILTIN_ORACLES.join(", "))))
}

fn set_kind(kind: &str) -> Result<&'static str> {
    Ok(match kind.to_ascii_lowercase().as_str() {
        "aminus" => "AMinus",
        "azero" => "AZero",
        "aplus" => "APlus",
        "shortfall" => "Shortfall",
        "esinduced" | "es" => "ESInduced",
        "distortioninduced" | "distortion" => "DistortionInduced",
        "oracle" | "customoracle" => "Oracle",
        _ => return Err(Error::Input(format!("unknown acceptance set kind {kind:?}"))),
    })
}

impl SetEntry {
    pub fn build(&self) -> Result<AcceptanceSetSpec> {
        let kind = set_kind(&self.kind)?;
        let set = match kind {
            "AMinus" => AcceptanceSetSpec::AMinus(required(&self.alpha, "alpha", kind)?),
            "AZero" => AcceptanceSetSpec::AZero(required(&self.alpha, "alpha", kind)?),
            "APlus" => AcceptanceSetSpec::APlus(required(&self.alpha, "alpha", kind)?),
            "ESInduced" => AcceptanceSetSpec::ESInduced(required(&self.beta, "beta", kind)?),
            "Shortfall" => AcceptanceSetSpec::Shortfall {
                loss: self.loss.as_deref().map_or_else(|| Ok(LossFunction::identity()), parse_loss)?,
                c: required(&self.c, "c", kind)?,
            },
            "DistortionInduced" => AcceptanceSetSpec::DistortionInduced(DistortionFunction::parse(
                self.knots.as_deref().ok_or_else(|| Error::Input("DistortionInduced needs knots".into()))?,
            )?),
            _ => oracle(self.name.as_deref().ok_or_else(|| Error::Input("Oracle needs name".into()))?)?,
        };
        set.validate()?;
        Ok(set)
    }
}

/// `AMinus:0.95`, `APlus:3/4`, `ESInduced:0.25`, `Shortfall:1` or
/// `Shortfall:1;power:2`, `DistortionInduced:0:0,0.5:0.8,1:1`,
/// `Oracle:half_negative`.
pub fn parse_set(text: &str) -> Result<AcceptanceSetSpec> {
    let (kind, params) = text.split_once(':').unwrap_or((text, ""));
    let kind = set_kind(kind.trim())?;
    let number = || Some(Number::Text(params.to_string()));
    let entry = match kind {
        "AMinus" | "AZero" | "APlus" => SetEntry { kind: kind.into(), alpha: number(), ..Default::default() },
        "ESInduced" => SetEntry { kind: kind.into(), beta: number(), ..Default::default() },
        "Shortfall" => {
            let (c, loss) = params.split_once(';').map_or((params, None), |(c, l)| (c, Some(l.to_string())));
            SetEntry { kind: kind.into(), c: Some(Number::Text(c.to_string())), loss, ..Default::default() }
        }
        "DistortionInduced" => SetEntry { kind: kind.into(), knots: Some(params.to_string()), ..Default::default() },
        _ => SetEntry { kind: kind.into(), name: Some(params.to_string()), ..Default::default() },
    };
    entry.build().map_err(|e| Error::Input(format!("set {text:?}: {e}")))
}

fn measure_kind(kind: &str) -> Result<&'static str> {
    Ok(match kind.to_ascii_lowercase().as_str() {
        "varlower" | "var" => "VaRLower",
        "varupper" => "VaRUpper",
        "es" => "ES",
        "distortion" => "Distortion",
        "mean" => "Mean",
        _ => return Err(Error::Input(format!("unknown measure kind {kind:?}"))),
    })
}

impl MeasureEntry {
    pub fn build(&self) -> Result<RiskMeasureSpec> {
        let kind = measure_kind(&self.kind)?;
        let measure = match kind {
            "VaRLower" => RiskMeasureSpec::VaRLower(required(&self.alpha, "alpha", kind)?),
            "VaRUpper" => RiskMeasureSpec::VaRUpper(required(&self.alpha, "alpha", kind)?),
            "ES" => RiskMeasureSpec::ES(required(&self.beta, "beta", kind)?),
            "Mean" => RiskMeasureSpec::Distortion(DistortionFunction::identity()),
            _ => RiskMeasureSpec::Distortion(DistortionFunction::parse(
                self.knots.as_deref().ok_or_else(|| Error::Input("Distortion needs knots".into()))?,
            )?),
        };
        measure.validate()?;
        Ok(measure)
    }
}

/// `VaRLower:0.99`, `VaRUpper:0.99`, `ES:0.75`, `Distortion:0:0,1:1`, `Mean`.
pub fn parse_measure(text: &str) -> Result<RiskMeasureSpec> {
    let (kind, params) = text.split_once(':').unwrap_or((text, ""));
    let kind = measure_kind(kind.trim())?;
    let number = || Some(Number::Text(params.to_string()));
    let entry = match kind {
        "VaRLower" | "VaRUpper" => MeasureEntry { kind: kind.into(), alpha: number(), ..Default::default() },
        "ES" => MeasureEntry { kind: kind.into(), beta: number(), ..Default::default() },
        _ => MeasureEntry { kind: kind.into(), knots: Some(params.to_string()), ..Default::default() },
    };
    entry.build().map_err(|e| Error::Input(format!("measure {text:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    #[test]
    fn parses_inline_specs() {
        assert_eq!(parse_set("APlus:0.99").unwrap().to_string(), "APlus(99/100)");
        assert_eq!(parse_set("aminus:1/2").unwrap().to_string(), "AMinus(1/2)");
        assert_eq!(parse_set("Shortfall:1").unwrap().to_string(), "Shortfall(identity,1)");
        assert_eq!(parse_set("Shortfall:2;power:2").unwrap().to_string(), "Shortfall(power(2),2)");
        assert!(parse_set("Oracle:half_negative").is_ok());
        assert!(parse_set("Oracle:nope").is_err());
        assert!(parse_set("APlus:1.5").is_err());
        assert!(parse_set("Bogus:1").is_err());
        assert_eq!(parse_measure("ES:0.75").unwrap(), RiskMeasureSpec::ES(rat(3, 4)));
        assert_eq!(parse_measure("Mean").unwrap(), RiskMeasureSpec::Distortion(DistortionFunction::identity()));
    }

    #[test]
    fn parses_config_file() {
        let c = Config::parse(
            r#"
seed = 7
n = 3
grid = "-1,0,1"

[[set]]
kind = "APlus"
alpha = 0.99

[[set]]
kind = "Shortfall"
c = "1/2"
loss = "power:2"

[[measure]]
kind = "ES"
beta = "0.75"

[balance_sheet]
c = 10
d = 90
r = "0.01"
"#,
        )
        .unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.grid.as_ref().unwrap().to_rationals().unwrap(), vec![int(-1), int(0), int(1)]);
        let sets = c.sets().unwrap();
        assert_eq!(sets[0].to_string(), "APlus(99/100)");
        assert_eq!(sets[1].to_string(), "Shortfall(power(2),1/2)");
        assert_eq!(c.measures().unwrap(), vec![RiskMeasureSpec::ES(rat(3, 4))]);
        assert_eq!(c.balance_sheet.unwrap().r.to_rational().unwrap(), rat(1, 100));
        assert!(Config::parse("unknown = 1").is_err());
        assert!(Config::parse("[[set]]\nkind = \"APlus\"\n").unwrap().sets().is_err());
    }
}
