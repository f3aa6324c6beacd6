//! Bundled registry of expected results, checked against every run.

use std::collections::BTreeMap;

use asymptospec::nets::NetSpec;
use serde::{Deserialize, Serialize};

use crate::config::{Analysis, RunConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

const BUNDLED: &str = include_str!("../expectations.toml");

/// One expected property of a result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub id: String,
    pub description: String,
    /// Analysis kind, or `experiment:<name>`.
    pub analysis: String,
    /// Only runs on this net (compact form, compared after parsing).
    #[serde(default)]
    pub net: Option<String>,
    pub table: String,
    /// Row filter: column → displayed cell value.
    #[serde(default, rename = "where")]
    pub filter: BTreeMap<String, String>,
    pub column: String,
    #[serde(default)]
    pub equals: Option<String>,
    #[serde(default)]
    pub value: Option<f64>,
    /// Column holding a per-row reference value.
    #[serde(default)]
    pub reference: Option<String>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Registry {
    expectation: Vec<Expectation>,
}

/// Result of one applicable expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: String,
    pub description: String,
    pub rows_checked: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

pub fn bundled() -> Result<Vec<Expectation>, CliError> {
    parse(BUNDLED)
}

pub fn parse(text: &str) -> Result<Vec<Expectation>, CliError> {
    let r: Registry = toml::from_str(text).map_err(|e| CliError::Config(format!("expectations: {e}")))?;
    for e in &r.expectation {
        e.validate()?;
    }
    Ok(r.expectation)
}

/// `kind` or `experiment:<name>` for a run.
pub fn analysis_key(a: &Analysis) -> String {
    match a {
        Analysis::Experiment(e) => format!("experiment:{}", e.name()),
        a => a.kind().to_string(),
    }
}

impl Expectation {
    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(format!("expectation {}: {m}", self.id)));
        let kinds = [self.equals.is_some(), self.value.is_some(), self.reference.is_some(), self.max.is_some() || self.min.is_some()];
        if kinds.iter().filter(|&&k| k).count() != 1 {
            return bad("needs exactly one of equals, value, reference or max/min");
        }
        if (self.value.is_some() || self.reference.is_some()) && self.tol.is_none() == self.rel_tol.is_none() {
            return bad("value and reference need exactly one of tol or rel_tol");
        }
        if let Some(n) = &self.net {
            if let Err(e) = n.parse::<NetSpec>() {
                return bad(&e.to_string());
            }
        }
        Ok(())
    }

    pub fn applies(&self, cfg: &RunConfig) -> bool {
        if self.analysis != analysis_key(&cfg.analysis) {
            return false;
        }
        match (&self.net, &cfg.net) {
            (None, _) => true,
            (Some(want), Some(have)) => match (want.parse::<NetSpec>(), have.spec()) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            },
            (Some(_), None) => false,
        }
    }

    fn check_cell(&self, cell: &Cell, row: &[Cell], t: &Table) -> Result<(), String> {
        let shown = cell.to_string();
        if let Some(want) = &self.equals {
            return if &shown == want { Ok(()) } else { Err(format!("{} = {shown:?}, want {want:?}", self.column)) };
        }
        let v = cell.as_f64().ok_or_else(|| format!("{} = {shown:?} is not numeric", self.column))?;
        let target = match (&self.value, &self.reference) {
            (Some(x), _) => Some(*x),
            (_, Some(col)) => {
                let i = t.column(col).ok_or_else(|| format!("no reference column {col}"))?;
                Some(row[i].as_f64().ok_or_else(|| format!("reference {col} = {:?} is not numeric", row[i].to_string()))?)
            }
            _ => None,
        };
        if let Some(x) = target {
            let tol = self.tol.unwrap_or_else(|| self.rel_tol.unwrap_or(0.0) * x.abs());
            if !((v - x).abs() <= tol) {
                return Err(format!("{} = {v}, want {x} ± {tol}", self.column));
            }
        }
        if let Some(m) = self.max {
            if !(v <= m) {
                return Err(format!("{} = {v} exceeds {m}", self.column));
            }
        }
        if let Some(m) = self.min {
            if !(v >= m) {
                return Err(format!("{} = {v} is below {m}", self.column));
            }
        }
        Ok(())
    }

    /// Checks the selected rows; `None` when the table or the filtered rows are absent.
    pub fn evaluate(&self, tables: &[Table]) -> Option<Outcome> {
        let t = tables.iter().find(|t| t.name == self.table)?;
        let col = t.column(&self.column)?;
        let filter: Vec<(usize, &String)> = self
            .filter
            .iter()
            .map(|(k, v)| t.column(k).map(|i| (i, v)))
            .collect::<Option<_>>()?;
        let rows: Vec<&Vec<Cell>> = t
            .rows
            .iter()
            .filter(|r| filter.iter().all(|(i, v)| r[*i].to_string() == **v))
            .collect();
        if rows.is_empty() {
            return None;
        }
        let failures: Vec<String> = rows
            .iter()
            .filter_map(|r| {
                self.check_cell(&r[col], r, t).err().map(|e| {
                    let key: Vec<String> = t.columns.iter().zip(r.iter()).take(3).map(|(c, v)| format!("{c}={v}")).collect();
                    format!("[{}] {e}", key.join(" "))
                })
            })
            .collect();
        Some(Outcome {
            id: self.id.clone(),
            description: self.description.clone(),
            rows_checked: rows.len(),
            passed: failures.is_empty(),
            failures,
        })
    }
}

/// Outcomes of every applicable registry entry.
pub fn evaluate_all(registry: &[Expectation], cfg: &RunConfig, tables: &[Table]) -> Vec<Outcome> {
    registry
        .iter()
        .filter(|e| e.applies(cfg))
        .filter_map(|e| e.evaluate(tables))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new("rows", &["m", "radius", "expected"]);
        t.push(vec![1u32.into(), 1.05.into(), 1.0.into()]);
        t.push(vec![2u32.into(), "empty".into(), Cell::Missing]);
        t
    }

    fn entry(extra: &str) -> Expectation {
        let text = format!(
            "[[expectation]]\nid = \"e\"\ndescription = \"d\"\nanalysis = \"spectrum\"\ntable = \"rows\"\ncolumn = \"radius\"\n{extra}"
        );
        parse(&text).unwrap().remove(0)
    }

    #[test]
    fn bundled_registry_parses() {
        assert!(!bundled().unwrap().is_empty());
    }

    #[test]
    fn checks_select_and_compare() {
        let tables = [table()];
        let ok = entry("where = { m = \"1\" }\nvalue = 1.0\ntol = 0.1").evaluate(&tables).unwrap();
        assert!(ok.passed && ok.rows_checked == 1);
        let rel = entry("where = { m = \"1\" }\nreference = \"expected\"\nrel_tol = 0.01").evaluate(&tables).unwrap();
        assert!(!rel.passed);
        let empty = entry("where = { m = \"2\" }\nequals = \"empty\"").evaluate(&tables).unwrap();
        assert!(empty.passed);
        assert!(entry("where = { m = \"3\" }\nmax = 1.0").evaluate(&tables).is_none());
        assert!(!entry("max = 1.0").evaluate(&tables).unwrap().passed);
    }

    #[test]
    fn malformed_entries_are_rejected() {
        let text = "[[expectation]]\nid = \"e\"\ndescription = \"d\"\nanalysis = \"spectrum\"\ntable = \"t\"\ncolumn = \"c\"\nvalue = 1.0\n";
        assert!(parse(text).is_err());
        assert!(parse(&text.replace("value = 1.0", "colour = 1")).is_err());
    }
}
