//! Restrict spin-1 and spin-2 models to the core subspace and list the moves
//! they induce on the dual charge chain. Also compares the projected
//! embedded-Fredkin dynamics with the spin-1/2 Fredkin chain.
//!
//! cargo run --example projected_models

use pvfrag::krylov::{compare_core_partitions, project_to_core};
use pvfrag::models::{build_model, ModelParams};

fn main() -> pvfrag::Result<()> {
    let params = ModelParams::default();
    for (name, len) in [("h3_1", 8), ("tjz1", 8), ("h_em", 8), ("h3_prime", 8), ("tjz2", 6), ("motzkin", 6)] {
        let model = build_model(name, &params)?;
        let p = project_to_core(&model, len)?;
        println!("{name} (L={len}, charges {}):", p.charge_alphabet);
        if p.protects_core() {
            for rule in p.rule_strings() {
                println!("    {rule}");
            }
        } else {
            println!("    leaves the core in {} moves, e.g. {} -> {}", p.violations.len(), p.violations[0].state, p.violations[0].image);
        }
    }

    // The projected h_em rules are the same for every nonzero alpha.
    for alpha in [1.0, -1.0, 0.5] {
        let m = build_model("h_em", &ModelParams { alpha })?;
        println!("h_em alpha={alpha}: {:?}", project_to_core(&m, 8)?.rule_strings());
    }

    println!("\ncore partition under h_em vs Fredkin chain on the charge strings:");
    let h_em = build_model("h_em", &params)?;
    let fredkin = build_model("fredkin", &params)?;
    for len in 3..=12 {
        let c = compare_core_partitions(&h_em, &fredkin, len)?;
        println!(
            "  L={len:>2}  core={:>5}  h_em classes={:>5}  fredkin classes={:>5}  identical={}  h_em finer={}",
            c.core_dimension, c.projected_classes, c.charge_model_classes, c.identical, c.projected_refines
        );
    }
    Ok(())
}
