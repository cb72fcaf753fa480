//! Check the peak-valley condition for the built-in models and for a model
//! read from JSON.
//!
//! cargo run --example pv_condition

use pvfrag::models::{build, load_model_json, pv_check_model, ModelName, ModelParams};

fn main() -> pvfrag::Result<()> {
    for name in ModelName::ALL {
        let model = build(name, &ModelParams::default())?;
        let report = pv_check_model(&model);
        println!(
            "{:<9} {:<9} {:>2} transitions  {}",
            name.as_str(),
            model.alphabet.to_string(),
            model.transition_count(),
            if report.passed { "pass".to_string() } else { format!("FAIL ({} violations)", report.violations.len()) }
        );
        for v in report.violations.iter().take(3) {
            println!(
                "          {:?} <-> {:?}  max/min {:?} -> {:?}",
                v.transition.input, v.transition.output, v.input_extrema, v.output_extrema
            );
        }
    }

    // A custom model is a JSON list of transitions; reversals are implied.
    let custom = load_model_json(
        r#"{"name": "pair-hop", "F": 1, "q": 3,
            "transitions": [{"in": [1, 0, 0], "out": [0, 0, 1]}, {"in": [0, 1, -1], "out": [1, -1, 0], "coeff": 0.5}]}"#,
    )?;
    let report = pv_check_model(&custom);
    println!("\ncustom {}: passed={} violations={}", custom.name, report.passed, report.violations.len());
    Ok(())
}
