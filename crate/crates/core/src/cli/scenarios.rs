//! Scenario tables and balance-sheet positions.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use num_traits::{One, Signed, Zero};

use crate::distribution::FiniteDistribution;
use crate::error::{Error, Result};
use crate::num::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioRow {
    pub id: String,
    pub probability: Option<Rational>,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTable {
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioTable {
    /// Row probabilities, `1/n` each when the file had no probability column.
    pub fn probabilities(&self) -> Vec<Rational> {
        let n = Rational::from_integer(self.rows.len().into());
        self.rows.iter().map(|r| r.probability.clone().unwrap_or_else(|| n.recip())).collect()
    }

    pub fn to_distribution(&self) -> Result<FiniteDistribution> {
        self.map_values(|v| v.clone())
    }

    pub fn map_values(&self, f: impl Fn(&Rational) -> Rational) -> Result<FiniteDistribution> {
        FiniteDistribution::new(self.rows.iter().zip(self.probabilities()).map(|(r, p)| (f(&r.value), p)))
    }
}

pub fn load_scenarios(path: &Path) -> Result<ScenarioTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_scenarios(file).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Read `scenario_id,probability,value` or `scenario_id,value` rows; lines
/// starting with `#` are skipped.
pub fn parse_scenarios<R: Read>(input: R) -> Result<ScenarioTable> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| Error::Input(format!("bad header: {e}")))?.clone();
    let columns: Vec<&str> = headers.iter().collect();
    let with_probability = match columns.as_slice() {
        ["scenario_id", "probability", "value"] => true,
        ["scenario_id", "value"] => false,
        _ => {
            return Err(Error::Input(format!(
                "header must be scenario_id,probability,value or scenario_id,value, got {}",
                columns.join(",")
            )))
        }
    };
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Input(format!("malformed row: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<Rational> {
            parse_rational(&record[i]).map_err(|_| Error::Input(format!("line {line}: cannot parse {:?}", &record[i])))
        };
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::Input(format!("line {line}: empty scenario_id")));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::Input(format!("line {line}: duplicate scenario_id {id:?}")));
        }
        let (probability, value) = if with_probability { (Some(field(1)?), field(2)?) } else { (None, field(1)?) };
        if let Some(p) = &probability {
            if !p.is_positive() {
                return Err(Error::Input(format!("line {line}: probability {p} is not positive")));
            }
        }
        rows.push(ScenarioRow { id, probability, value });
    }
    if rows.is_empty() {
        return Err(Error::Input("no scenarios".into()));
    }
    if with_probability {
        let sum: Rational = rows.iter().filter_map(|r| r.probability.clone()).sum();
        if !sum.is_one() {
            return Err(Error::ProbabilitySum(sum));
        }
    }
    Ok(ScenarioTable { rows })
}

/// Initial capital `c`, debt `d` at rate `r`, and net asset returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceSheet {
    pub c: Rational,
    pub d: Rational,
    pub r: Rational,
    pub returns: ScenarioTable,
}

impl BalanceSheet {
    pub fn validate(&self) -> Result<()> {
        if self.c.is_negative() || self.d.is_negative() {
            return Err(Error::InvalidArgument("capital and debt must be nonnegative".into()));
        }
        if (&self.c + &self.d).is_zero() {
            return Err(Error::InvalidArgument("c + d must be positive".into()));
        }
        Ok(())
    }

    /// `(c + d)(R + 1) - (1 + r) d`.
    pub fn capital(&self, ret: &Rational) -> Rational {
        (&self.c + &self.d) * (ret + Rational::one()) - (Rational::one() + &self.r) * &self.d
    }
}

pub fn position_from_balance_sheet(b: &BalanceSheet) -> Result<FiniteDistribution> {
    b.validate()?;
    b.returns.map_values(|ret| b.capital(ret))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn table(text: &str) -> Result<ScenarioTable> {
        parse_scenarios(text.as_bytes())
    }

    #[test]
    fn loads_equiprobable_and_weighted() {
        let t = table("scenario_id,value\na,1\nb,-2\n").unwrap();
        assert_eq!(t.probabilities(), vec![rat(1, 2), rat(1, 2)]);
        let t = table("# comment\nscenario_id,probability,value\na,0.25,1\nb,0.25,2\n# mid\nc,0.5,3\n").unwrap();
        assert_eq!(t.probabilities(), vec![rat(1, 4), rat(1, 4), rat(1, 2)]);
        let precise = table("scenario_id,value\na,0.123456789012345678\n").unwrap();
        assert_eq!(precise.rows[0].value, rat(123456789012345678, 1_000_000_000_000_000_000));
    }

    #[test]
    fn rejects_bad_tables() {
        let e = table("scenario_id,probability,value\na,0.3,1\nb,0.3,1\nc,0.3,1\n").unwrap_err();
        assert_eq!(e.to_string(), "probabilities sum to 9/10");
        let e = table("scenario_id,value\na,1\na,2\n").unwrap_err();
        assert!(e.to_string().contains("duplicate"), "{e}");
        let e = table("scenario_id,value\na,1\nb,x\n").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert!(table("scenario_id,value\n").is_err());
        assert!(table("id,value\na,1\n").is_err());
    }

    #[test]
    fn balance_sheet_examples() {
        let returns = table("scenario_id,value\nup,-0.2\ndown,0.1\n").unwrap();
        let b = BalanceSheet { c: int(10), d: int(90), r: int(0), returns };
        let x = position_from_balance_sheet(&b).unwrap();
        assert_eq!(x, FiniteDistribution::equiprobable([int(-10), int(20)]).unwrap());

        let returns = table("scenario_id,value\ns,0.05\n").unwrap();
        let b = BalanceSheet { c: int(0), d: int(100), r: rat(5, 100), returns };
        assert_eq!(position_from_balance_sheet(&b).unwrap(), FiniteDistribution::point_mass(int(0)));

        let returns = table("scenario_id,value\ns,0.05\n").unwrap();
        let b = BalanceSheet { c: int(0), d: int(0), r: int(0), returns };
        assert!(position_from_balance_sheet(&b).is_err());
    }
}
