//! The JSON model file format.
//!
//! ```json
//! {
//!   "scenario": [[2, 2], [2, 2]],
//!   "kind": "probability",
//!   "tables": { "0,0": ["1/2", 0, 0, "1/2"], "0,1": [0.5, 0, 0, 0.5], ... }
//! }
//! ```
//!
//! `scenario` lists the outcome count of every measurement, per site.
//! Context keys are comma-joined measurement indices and each table is
//! flattened with site 0 most significant. Probabilities are numbers or
//! exact `"p/q"` strings; possibilities are `0`/`1` or booleans.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_string, Scalar};
use crate::tables::{Context, PossibilityModel, ProbabilityModel, Scenario};
use crate::{ExactModel, FloatModel, Rational};

/// A parsed model file.
///
/// Probability files become [`AnyModel::Exact`] unless they contain a JSON
/// decimal literal or an exact row that only sums to 1 within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyModel {
    Exact(ExactModel),
    Float(FloatModel),
    Possibility(PossibilityModel),
}

impl AnyModel {
    pub fn scenario(&self) -> &Scenario {
        match self {
            AnyModel::Exact(m) => m.scenario(),
            AnyModel::Float(m) => m.scenario(),
            AnyModel::Possibility(m) => m.scenario(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AnyModel::Possibility(_) => "possibility",
            _ => "probability",
        }
    }

    /// Support at `epsilon`; a possibility model is returned unchanged.
    pub fn support(&self, epsilon: f64) -> PossibilityModel {
        match self {
            AnyModel::Exact(m) => m.collapse(epsilon),
            AnyModel::Float(m) => m.collapse(epsilon),
            AnyModel::Possibility(m) => m.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyModel::Exact(m) => write_probability(m, |p| Value::String(rational_string(p))),
            AnyModel::Float(m) => write_probability(m, |p| json!(p)),
            AnyModel::Possibility(m) => write_possibility(m),
        }
    }

    /// Pretty-printed file text with a trailing newline.
    pub fn to_string_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serialisable");
        s.push('\n');
        s
    }
}

impl From<ExactModel> for AnyModel {
    fn from(m: ExactModel) -> Self {
        AnyModel::Exact(m)
    }
}

impl From<FloatModel> for AnyModel {
    fn from(m: FloatModel) -> Self {
        AnyModel::Float(m)
    }
}

impl From<PossibilityModel> for AnyModel {
    fn from(m: PossibilityModel) -> Self {
        AnyModel::Possibility(m)
    }
}

fn tables_json<T>(scenario: &Scenario, row: impl Fn(usize) -> Vec<T>, cell: impl Fn(&T) -> Value) -> Value {
    let mut tables = Map::new();
    for (ci, c) in scenario.contexts().enumerate() {
        tables.insert(c.to_string(), Value::Array(row(ci).iter().map(&cell).collect()));
    }
    Value::Object(tables)
}

fn write_probability<S: Scalar>(m: &ProbabilityModel<S>, cell: impl Fn(&S) -> Value) -> Value {
    json!({
        "scenario": m.scenario().outcome_counts(),
        "kind": "probability",
        "tables": tables_json(m.scenario(), |ci| m.row(ci).to_vec(), cell),
    })
}

fn write_possibility(m: &PossibilityModel) -> Value {
    json!({
        "scenario": m.scenario().outcome_counts(),
        "kind": "possibility",
        "tables": tables_json(m.scenario(), |ci| m.row(ci).to_vec(), |&b| json!(b as u8)),
    })
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::validation(field, message)
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<AnyModel> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    model_from_json(&value)
}

enum Cell {
    Exact(Rational),
    Float(f64),
}

fn probability_cell(v: &Value, field: &str) -> Result<Cell> {
    let cell = match v {
        Value::Number(n) if n.is_f64() => Cell::Float(n.as_f64().unwrap()),
        Value::Number(n) => {
            let text = n.to_string();
            Cell::Exact(parse_rational(&text).ok_or_else(|| field_err(field, format!("bad number {text}")))?)
        }
        Value::String(s) => Cell::Exact(
            parse_rational(s).ok_or_else(|| field_err(field, format!("`{s}` is not a rational number")))?,
        ),
        other => return Err(field_err(field, format!("expected a probability, found {other}"))),
    };
    let negative = match &cell {
        Cell::Exact(q) => q.is_negative(),
        Cell::Float(x) => !x.is_finite() || *x < 0.0,
    };
    if negative {
        return Err(field_err(field, "probability must be finite and non-negative"));
    }
    Ok(cell)
}

fn possibility_cell(v: &Value, field: &str) -> Result<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
        Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
        other => Err(field_err(field, format!("expected 0 or 1, found {other}"))),
    }
}

/// Validates an already-parsed JSON value.
pub fn model_from_json(value: &Value) -> Result<AnyModel> {
    let obj = value
        .as_object()
        .ok_or_else(|| field_err("$", "expected an object with scenario, kind and tables"))?;
    if let Some(extra) = obj.keys().find(|k| !matches!(k.as_str(), "scenario" | "kind" | "tables")) {
        return Err(field_err(extra.clone(), "unknown field"));
    }
    let scenario_value = obj.get("scenario").ok_or_else(|| field_err("scenario", "missing"))?;
    let outcomes: Vec<Vec<usize>> = serde_json::from_value(scenario_value.clone())
        .map_err(|e| field_err("scenario", format!("expected a list of lists of counts: {e}")))?;
    let scenario = Scenario::new(outcomes).map_err(|e| field_err("scenario", e.to_string()))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| field_err("kind", "missing or not a string"))?;
    let tables = obj
        .get("tables")
        .and_then(Value::as_object)
        .ok_or_else(|| field_err("tables", "missing or not an object"))?;

    let mut rows: BTreeMap<usize, &Vec<Value>> = BTreeMap::new();
    for (key, row) in tables {
        let field = format!("tables[\"{key}\"]");
        let context: Context = key.parse().map_err(|_| field_err(&field, "bad context key"))?;
        scenario
            .check_context(&context)
            .map_err(|e| field_err(&field, e.to_string()))?;
        let row = row.as_array().ok_or_else(|| field_err(&field, "expected a list"))?;
        let want = scenario.joint_outcome_count(&context);
        if row.len() != want {
            return Err(field_err(&field, format!("expected {want} entries, found {}", row.len())));
        }
        if rows.insert(scenario.context_index(&context), row).is_some() {
            return Err(field_err(&field, "duplicate context"));
        }
    }
    if let Some(missing) = (0..scenario.context_count()).find(|ci| !rows.contains_key(ci)) {
        return Err(field_err(
            format!("tables[\"{}\"]", scenario.context(missing)),
            "missing context",
        ));
    }
    let cell_field = |ci: usize, oi: usize| format!("tables[\"{}\"][{oi}]", scenario.context(ci));

    match kind {
        "possibility" => {
            let rows = rows
                .iter()
                .map(|(&ci, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(oi, v)| possibility_cell(v, &cell_field(ci, oi)))
                        .collect::<Result<Vec<bool>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(ci) = rows.iter().position(|r| !r.contains(&true)) {
                return Err(field_err(
                    format!("tables[\"{}\"]", scenario.context(ci)),
                    "no possible outcome",
                ));
            }
            Ok(AnyModel::Possibility(PossibilityModel::new(scenario, rows)?))
        }
        "probability" => {
            let cells = rows
                .iter()
                .map(|(&ci, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(oi, v)| probability_cell(v, &cell_field(ci, oi)))
                        .collect::<Result<Vec<Cell>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let as_f64 = |c: &Cell| match c {
                Cell::Exact(q) => q.to_f64_lossy(),
                Cell::Float(x) => *x,
            };
            for (ci, row) in cells.iter().enumerate() {
                let total: f64 = row.iter().map(as_f64).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(field_err(
                        format!("tables[\"{}\"]", scenario.context(ci)),
                        format!("probabilities sum to {total}, not 1"),
                    ));
                }
            }
            let exact_rows: Option<Vec<Vec<Rational>>> = cells
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| match c {
                            Cell::Exact(q) => Some(q.clone()),
                            Cell::Float(_) => None,
                        })
                        .collect()
                })
                .collect();
            let exactly_normalised = exact_rows.as_ref().is_some_and(|rows| {
                rows.iter()
                    .all(|r| r.iter().fold(Rational::from_ratio(0, 1), |a, b| a + b) == Rational::from_ratio(1, 1))
            });
            match exact_rows {
                Some(rows) if exactly_normalised => Ok(AnyModel::Exact(ProbabilityModel::new(scenario, rows)?)),
                _ => {
                    let rows = cells.iter().map(|row| row.iter().map(as_f64).collect()).collect();
                    Ok(AnyModel::Float(ProbabilityModel::new(scenario, rows)?))
                }
            }
        }
        other => Err(field_err(
            "kind",
            format!("expected \"probability\" or \"possibility\", found \"{other}\""),
        )),
    }
}
