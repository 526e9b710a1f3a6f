//! Loading potentials from the JSON document formats:
//! `{ "dimension": N, "wells": [[...], ...], "expression": "<text>" }` or
//! `{ "builtin": "six_well" | "alikakos_fusco" | "double_well" | "oscillatory",
//!    "params": { ... } }`.

use serde::Deserialize;
use serde_json::Value;

use crate::error::Error;
use crate::potential::Potential;
use crate::Result;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PotentialConfig {
    Builtin {
        builtin: String,
        #[serde(default)]
        params: serde_json::Map<String, Value>,
    },
    Expression {
        dimension: usize,
        wells: Vec<Vec<f64>>,
        expression: String,
    },
}

pub fn potential_from_json(text: &str) -> Result<Potential> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    potential_from_value(&value)
}

pub fn potential_from_value(value: &Value) -> Result<Potential> {
    let config: PotentialConfig = serde_json::from_value(value.clone())
        .map_err(|e| Error::Config(format!("unrecognized potential document: {e}")))?;
    match config {
        PotentialConfig::Builtin { builtin, params } => builtin_potential(&builtin, &params),
        PotentialConfig::Expression {
            dimension,
            wells,
            expression,
        } => Potential::from_expression(&expression, dimension, wells),
    }
}

/// Builds a built-in potential by name. Parameters:
/// `double_well`: `lambda` (default 1), `dimension` (default 2);
/// `alikakos_fusco`: `eps` (required);
/// `oscillatory`: `p1`, `p2` (required vectors); `six_well`: none.
pub fn builtin_potential(
    name: &str,
    params: &serde_json::Map<String, Value>,
) -> Result<Potential> {
    match name {
        "six_well" => Ok(Potential::six_well()),
        "double_well" => {
            let lambda = f64_param(params, "lambda")?.unwrap_or(1.0);
            let dimension = usize_param(params, "dimension")?.unwrap_or(2);
            Potential::double_well(lambda, dimension)
        }
        "alikakos_fusco" => {
            let eps = f64_param(params, "eps")?
                .ok_or_else(|| Error::Config("alikakos_fusco requires eps".into()))?;
            Ok(Potential::alikakos_fusco(eps))
        }
        "oscillatory" => {
            let p1 = vec_param(params, "p1")?
                .ok_or_else(|| Error::Config("oscillatory requires p1".into()))?;
            let p2 = vec_param(params, "p2")?
                .ok_or_else(|| Error::Config("oscillatory requires p2".into()))?;
            Potential::oscillatory(p1, p2)
        }
        other => Err(Error::Config(format!("unknown builtin potential {other:?}"))),
    }
}

/// Parses repeated `key=value` pairs into the builtin-params map. Scalar
/// values must parse as numbers; comma-separated values become vectors.
pub fn params_from_kv(pairs: &[String]) -> Result<serde_json::Map<String, Value>> {
    let mut map = serde_json::Map::new();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got {pair:?}")))?;
        let parsed = if value.contains(',') {
            let items: Result<Vec<f64>> = value
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number {s:?} in {pair:?}")))
                })
                .collect();
            Value::from(items?)
        } else {
            let num: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number {value:?} in {pair:?}")))?;
            Value::from(num)
        };
        map.insert(key.trim().to_string(), parsed);
    }
    Ok(map)
}

fn f64_param(params: &serde_json::Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| Error::Config(format!("parameter {key} must be a number"))),
    }
}

fn usize_param(params: &serde_json::Map<String, Value>, key: &str) -> Result<Option<usize>> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|u| Some(u as usize))
            .ok_or_else(|| Error::Config(format!("parameter {key} must be a nonnegative integer"))),
    }
}

fn vec_param(params: &serde_json::Map<String, Value>, key: &str) -> Result<Option<Vec<f64>>> {
    match params.get(key) {
        None => Ok(None),
        Some(Value::Array(items)) => {
            let parsed: Option<Vec<f64>> = items.iter().map(|v| v.as_f64()).collect();
            parsed
                .map(Some)
                .ok_or_else(|| Error::Config(format!("parameter {key} must be a number array")))
        }
        Some(_) => Err(Error::Config(format!("parameter {key} must be an array"))),
    }
}
