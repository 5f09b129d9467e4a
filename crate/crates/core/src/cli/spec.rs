//! Field specification files.
//!
//! ```json
//! {"n": 2, "m": 2, "entries": [[[{"c": 1, "e": [1, 0]}], []], [[], [{"c": -1, "e": [1, 0]}]]]}
//! {"n": 2, "potential": [{"c": 0.5, "e": [2, 0]}]}
//! ```

use serde::Deserialize;

use crate::error::Error;
use crate::polyfield::{Monomial, PolyMatrixField, Polynomial};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub c: f64,
    pub e: Vec<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpecFile {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub entries: Option<Vec<Vec<Vec<TermSpec>>>>,
    #[serde(default)]
    pub potential: Option<Vec<TermSpec>>,
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] Error),
}

fn polynomial(n: usize, terms: &[TermSpec]) -> Result<Polynomial, SpecError> {
    let monomials = terms
        .iter()
        .map(|t| Monomial::new(t.c, t.e.clone()))
        .collect();
    Ok(Polynomial::new(n, monomials)?)
}

impl FieldSpecFile {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let message = match full.rsplit_once(" at line ") {
                Some((head, _)) => head.to_string(),
                None => full,
            };
            SpecError::Parse {
                line: e.line(),
                column: e.column(),
                message,
            }
        })
    }

    pub fn build(&self) -> Result<PolyMatrixField, SpecError> {
        if self.n == 0 {
            return Err(SpecError::Invalid("\"n\" must be at least 1".into()));
        }
        match (&self.entries, &self.potential) {
            (Some(_), Some(_)) => Err(SpecError::Invalid(
                "give either \"entries\" or \"potential\", not both".into(),
            )),
            (None, None) => Err(SpecError::Invalid(
                "missing \"entries\" or \"potential\"".into(),
            )),
            (None, Some(terms)) => {
                let field = PolyMatrixField::from_potential(&polynomial(self.n, terms)?)?;
                if let Some(m) = self.m.filter(|&m| m != field.m()) {
                    return Err(SpecError::Invalid(format!(
                        "\"m\" is {m} but a potential in {} variables gives m = {}",
                        self.n,
                        field.m()
                    )));
                }
                Ok(field)
            }
            (Some(rows), None) => {
                let m = rows.len();
                if m == 0 {
                    return Err(SpecError::Invalid("\"entries\" is empty".into()));
                }
                if let Some(declared) = self.m.filter(|&d| d != m) {
                    return Err(SpecError::Invalid(format!(
                        "\"m\" is {declared} but \"entries\" has {m} rows"
                    )));
                }
                let grid = rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        if row.len() != m {
                            return Err(SpecError::Invalid(format!(
                                "row {} of \"entries\" has {} entries, expected {m}",
                                i + 1,
                                row.len()
                            )));
                        }
                        row.iter().map(|t| polynomial(self.n, t)).collect()
                    })
                    .collect::<Result<Vec<Vec<Polynomial>>, SpecError>>()?;
                Ok(PolyMatrixField::new(self.n, grid)?)
            }
        }
    }
}

pub fn parse_field_spec(text: &str) -> Result<PolyMatrixField, SpecError> {
    FieldSpecFile::parse(text)?.build()
}
