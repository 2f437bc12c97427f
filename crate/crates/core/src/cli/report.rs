//! Line-oriented `key=value` records with `# ` summary lines.

use std::fmt::{self, Display};

use crate::num::{format_decimal, Extended, Rational};

pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, key: &str, value: impl Display) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn opt(self, key: &str, value: Option<impl Display>) -> Self {
        match value {
            Some(v) => self.field(key, v),
            None => self,
        }
    }

    /// `key=<fraction> key_decimal=<12 significant digits>`.
    pub fn rational(self, key: &str, value: &Rational) -> Self {
        self.field(key, value).field(&format!("{key}_decimal"), format_decimal(value, DECIMAL_DIGITS))
    }

    pub fn opt_rational(self, key: &str, value: Option<&Rational>) -> Self {
        match value {
            Some(v) => self.rational(key, v),
            None => self,
        }
    }

    pub fn extended(self, key: &str, value: &Extended<Rational>) -> Self {
        match value {
            Extended::Finite(v) => self.rational(key, v),
            other => self.field(key, other).field(&format!("{key}_decimal"), other),
        }
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }
}

fn needs_quotes(value: &str) -> bool {
    value.is_empty() || value.chars().any(|c| c.is_whitespace() || c == '"' || c == '=' || c == '\\')
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if needs_quotes(v) {
                write!(f, "{k}={v:?}")?;
            } else {
                write!(f, "{k}={v}")?;
            }
        }
        Ok(())
    }
}

/// Collected output of one command.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn record(&mut self, r: Record) {
        self.lines.push(r.to_string());
    }

    pub fn summary(&mut self, text: impl Display) {
        self.lines.push(format!("# {text}"));
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn renders_records() {
        let r = Record::new().field("set", "APlus(3/4)").rational("p", &rat(1, 3)).field("note", "two words");
        assert_eq!(r.to_string(), r#"set=APlus(3/4) p=1/3 p_decimal=0.333333333333 note="two words""#);
        let inf = Record::new().extended("v", &Extended::PosInf);
        assert_eq!(inf.to_string(), "v=inf v_decimal=inf");
        assert_eq!(Record::new().field("e", "").to_string(), r#"e="""#);
    }
}
