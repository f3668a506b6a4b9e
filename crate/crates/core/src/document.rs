//! JSON document format for behaviors.
//!
//! ```json
//! { "lambdas": [ { "weight": 1.0,
//!                  "tables": { "1": [p+++, p++-, p+-+, p-++, p+--, p-+-, p--+, p---],
//!                              ...,
//!                              "8": [...] } } ] }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{validate_behavior_with, Behavior, HiddenState, OutcomeDistribution, SettingLabel};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BehaviorDoc {
    lambdas: Vec<LambdaDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LambdaDoc {
    weight: f64,
    tables: BTreeMap<String, Vec<f64>>,
}

/// Parses and validates a behavior document with the given tolerance.
pub fn parse_behavior(text: &str, tolerance: f64) -> Result<Behavior<f64>, ModelError> {
    let doc: BehaviorDoc = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    let mut states = Vec::with_capacity(doc.lambdas.len());
    for (lambda, entry) in doc.lambdas.into_iter().enumerate() {
        if let Some(key) = entry
            .tables
            .keys()
            .find(|k| k.parse::<u8>().ok().and_then(SettingLabel::new).is_none())
        {
            return Err(ModelError::Parse(format!("lambda {lambda}: unknown setting key {key:?}")));
        }
        let mut tables = Vec::with_capacity(8);
        for label in SettingLabel::ALL {
            let key = label.index().to_string();
            let row = entry
                .tables
                .get(&key)
                .ok_or(ModelError::MissingSetting { lambda, setting: key.clone() })?;
            let p: [f64; 8] = row.as_slice().try_into().map_err(|_| {
                ModelError::Parse(format!(
                    "lambda {lambda}, setting {key}: expected 8 probabilities, got {}",
                    row.len()
                ))
            })?;
            tables.push(OutcomeDistribution::new(p));
        }
        let tables: [OutcomeDistribution<f64>; 8] = tables.try_into().expect("8 settings");
        states.push(HiddenState::new(entry.weight, tables));
    }
    let behavior = Behavior::new(states);
    validate_behavior_with(&behavior, &tolerance)?;
    Ok(behavior)
}

pub fn behavior_to_string(b: &Behavior<f64>) -> String {
    let doc = BehaviorDoc {
        lambdas: b
            .states
            .iter()
            .map(|s| LambdaDoc {
                weight: s.weight,
                tables: SettingLabel::ALL
                    .iter()
                    .map(|l| (l.index().to_string(), s.table(*l).probabilities().to_vec()))
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn read_behavior(path: &Path, tolerance: f64) -> Result<Behavior<f64>, ModelError> {
    let text = fs::read_to_string(path).map_err(|e| ModelError::Parse(format!("{}: {e}", path.display())))?;
    parse_behavior(&text, tolerance)
}

pub fn write_behavior(path: &Path, b: &Behavior<f64>) -> std::io::Result<()> {
    fs::write(path, behavior_to_string(b) + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_doc(skip: Option<&str>) -> String {
        let row = "[0.125,0.125,0.125,0.125,0.125,0.125,0.125,0.125]";
        let tables: Vec<String> = (1..=8)
            .map(|i| i.to_string())
            .filter(|k| Some(k.as_str()) != skip)
            .map(|k| format!("\"{k}\": {row}"))
            .collect();
        format!("{{\"lambdas\": [{{\"weight\": 1, \"tables\": {{{}}}}}]}}", tables.join(","))
    }

    #[test]
    fn roundtrip_uniform() {
        let b = parse_behavior(&uniform_doc(None), 1e-12).unwrap();
        assert_eq!(b, Behavior::uniform());
        let again = parse_behavior(&behavior_to_string(&b), 1e-12).unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn missing_setting_is_reported() {
        let err = parse_behavior(&uniform_doc(Some("5")), 1e-12).unwrap_err();
        assert_eq!(err, ModelError::MissingSetting { lambda: 0, setting: "5".into() });
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_behavior("{lambdas: 3", 1e-12), Err(ModelError::Parse(_))));
        let short = uniform_doc(None).replacen("0.125,0.125]", "0.125]", 1);
        assert!(matches!(parse_behavior(&short, 1e-12), Err(ModelError::Parse(_))));
        let extra = uniform_doc(None).replace("\"1\":", "\"9\": [], \"1\":");
        assert!(matches!(parse_behavior(&extra, 1e-12), Err(ModelError::Parse(_))));
    }

    #[test]
    fn ten_digit_values_need_a_looser_tolerance() {
        let third = "0.3333333333";
        let row = format!("[{third},{third},{third},0,0,0,0,0]");
        let tables: Vec<String> = (1..=8).map(|k| format!("\"{k}\": {row}")).collect();
        let doc = format!("{{\"lambdas\": [{{\"weight\": 1.0, \"tables\": {{{}}}}}]}}", tables.join(","));
        assert!(matches!(parse_behavior(&doc, 1e-12), Err(ModelError::NotNormalized { .. })));
        parse_behavior(&doc, 1e-9).unwrap();
    }
}
