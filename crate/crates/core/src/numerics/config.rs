use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{NumericsError, Rational};

/// A finite multiset of rationals, stored sorted in non-increasing order.
///
/// Index `i` (1-based) refers to the `i`-th largest value, so `value(1)` is
/// the maximum and `value(n)` the minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Configuration {
    values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl Configuration {
    /// Builds a configuration from values in any order.
    pub fn new(mut values: Vec<Rational>) -> Result<Self, NumericsError> {
        if values.is_empty() {
            return Err(NumericsError::EmptyConfiguration);
        }
        values.sort_by(|a, b| b.cmp(a));
        Ok(Configuration { values })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self, NumericsError> {
        Self::new(values.iter().map(|&v| super::rat(v)).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Sorted values, largest first.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// The `index`-th largest value (1-based).
    pub fn value(&self, index: usize) -> Result<&Rational, NumericsError> {
        if index == 0 || index > self.n() {
            return Err(NumericsError::IndexOutOfRange { index, n: self.n() });
        }
        Ok(&self.values[index - 1])
    }

    pub fn total_sum(&self) -> Rational {
        self.values.iter().fold(Rational::zero(), |acc, v| acc + v)
    }

    pub fn negative_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_negative()).count()
    }

    /// Keeps the listed 1-based indices (in increasing order) as a new
    /// configuration. The result's index `t` corresponds to `indices[t-1]`.
    pub fn restrict(&self, indices: &[usize]) -> Result<Configuration, NumericsError> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            out.push(self.value(i)?.clone());
        }
        Configuration::new(out)
    }

    /// Parses the line-oriented text format: one `p/q` or `p` per line,
    /// blank lines and `#` comments ignored. A line may also hold several
    /// values separated by `;`.
    pub fn parse(text: &str) -> Result<Configuration, ParseError> {
        let mut values = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            for field in line.split(';').map(str::trim).filter(|f| !f.is_empty()) {
                let v = parse_rational(field).map_err(|message| ParseError {
                    line: lineno + 1,
                    message,
                })?;
                values.push(v);
            }
        }
        Configuration::new(values).map_err(|e| ParseError {
            line: 0,
            message: e.to_string(),
        })
    }

    /// Serializes to the text format, one value per line, largest first.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.values {
            s.push_str(&format_rational(v));
            s.push('\n');
        }
        s
    }
}

impl FromStr for Configuration {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Configuration::parse(s)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(v))?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<String>> for Configuration {
    type Error = String;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        let values = v
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()?;
        Configuration::new(values).map_err(|e| e.to_string())
    }
}

impl From<Configuration> for Vec<String> {
    fn from(c: Configuration) -> Self {
        c.values.iter().map(format_rational).collect()
    }
}

/// Parses `p`, `-p`, `p/q` (q non-zero). Whitespace around tokens is allowed.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), Some(q.trim())),
        None => (s, None),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| format!("invalid integer {num:?}"))?;
    let q: BigInt = match den {
        Some(d) => d.parse().map_err(|_| format!("invalid denominator {d:?}"))?,
        None => BigInt::from(1),
    };
    if q.is_zero() {
        return Err("zero denominator".to_string());
    }
    Ok(Rational::new(p, q))
}

/// `p` for integers, `p/q` otherwise (lowest terms, positive denominator).
pub fn format_rational(v: &Rational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}
