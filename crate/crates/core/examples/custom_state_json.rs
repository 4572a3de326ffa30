//! Build a state from a JSON document, run it through a channel chain and
//! dump the equivalent term-by-term document.
//!
//! cargo run --example custom_state_json

use qcs_core::document::StateDocument;
use qcs_core::engine;

const DOC: &str = r#"{
  "schema": 1,
  "type": "custom",
  "n_modes": 1,
  "terms": [
    {"coeff": 0.5, "mean": [1.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]]},
    {"coeff": 0.5, "mean": [-1.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]]}
  ],
  "channels": [
    {"type": "squeezing", "r": 0.3},
    {"type": "rotation", "theta": 0.5},
    {"type": "loss", "eta": 0.8}
  ]
}"#;

fn main() -> qcs_core::Result<()> {
    let doc = StateDocument::parse(DOC)?;
    let state = doc.build()?;
    let report = engine::qcs(&state)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    println!("{}", StateDocument::from_state(&state).to_json());
    Ok(())
}
