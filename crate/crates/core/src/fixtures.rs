//! Published reference values, embedded from `data/appendix.json`.
//!
//! Every record carries a `source` string naming where the value comes from.
//! The loader is strict: unknown fields, duplicate keys and malformed
//! rationals are rejected.

use std::collections::BTreeSet;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::parse_rational;

const EMBEDDED: &str = include_str!("../data/appendix.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdTable {
    pub level: u32,
    pub d: i64,
    /// Highest exponent covered; unlisted exponents up to here are zero.
    pub through: i64,
    pub source: String,
    pub coeffs: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HurwitzValue {
    pub d: i64,
    pub value: String,
    pub source: String,
}

impl HurwitzValue {
    pub fn rational(&self) -> Rational {
        parse_rational(&self.value).expect("validated at load time")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HauptmodulTable {
    pub level: u32,
    pub source: String,
    pub coeffs: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmValue {
    pub level: u32,
    pub a: i64,
    pub b: i64,
    pub d: i64,
    pub value: i64,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkedExample {
    pub level: u32,
    pub d: i64,
    pub source: String,
    /// `c(1), c(2), ...` of the normalized product series.
    pub c: Vec<i64>,
    /// `A*(1, d), A*(4, d), A*(9, d), ...`.
    pub a_star: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSet {
    pub fd_tables: Vec<FdTable>,
    pub hurwitz: Vec<HurwitzValue>,
    pub hauptmoduls: Vec<HauptmodulTable>,
    pub cm_values: Vec<CmValue>,
    pub worked_examples: Vec<WorkedExample>,
}

impl FixtureSet {
    pub fn embedded() -> FixtureSet {
        FixtureSet::from_json(EMBEDDED).expect("embedded fixtures are valid")
    }

    pub fn from_json(text: &str) -> Result<FixtureSet> {
        let set: FixtureSet =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("fixture JSON: {e}")))?;
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parse(format!("fixture JSON: {msg}")));
        let mut keys = BTreeSet::new();
        for t in &self.fd_tables {
            if !keys.insert((t.level, t.d)) {
                return bad(format!("duplicate table for level {} index {}", t.level, t.d));
            }
            if t.d < 0 || t.level == 0 {
                return bad(format!("bad table key ({}, {})", t.level, t.d));
            }
            let mut exps = BTreeSet::new();
            for &(e, _) in &t.coeffs {
                if !exps.insert(e) {
                    return bad(format!("duplicate exponent {e} in table ({}, {})", t.level, t.d));
                }
                if e > t.through {
                    return bad(format!("exponent {e} beyond `through` {}", t.through));
                }
            }
        }
        for h in &self.hurwitz {
            parse_rational(&h.value)?;
        }
        Ok(())
    }

    pub fn fd_table(&self, level: u32, d: i64) -> Option<&FdTable> {
        self.fd_tables.iter().find(|t| t.level == level && t.d == d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_set_loads() {
        let f = FixtureSet::embedded();
        assert_eq!(f.fd_tables.len(), 15);
        assert_eq!(f.hurwitz.len(), 7);
        assert_eq!(f.fd_table(2, 4).unwrap().coeffs[1], (1, -52));
        assert!(f.fd_tables.iter().all(|t| !t.source.is_empty()));
    }

    #[test]
    fn rejects_malformed_sets() {
        assert!(FixtureSet::from_json("{}").is_err());
        let mut f = FixtureSet::embedded();
        f.fd_tables.push(f.fd_tables[0].clone());
        assert!(FixtureSet::from_json(&serde_json::to_string(&f).unwrap()).is_err());
        let mut f = FixtureSet::embedded();
        f.hurwitz[0].value = "1/0".into();
        assert!(FixtureSet::from_json(&serde_json::to_string(&f).unwrap()).is_err());
    }
}
