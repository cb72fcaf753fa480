//! Fragmentation metrics: the finite-size table for H3 and the embedded
//! Fredkin model, and the dipole sweep comparing them with H3'.
//!
//! cargo run --release --example krylov_table

use std::time::Instant;

use pvfrag::krylov::finite_size_table;
use pvfrag::models::{build_model, ModelParams};

fn main() -> pvfrag::Result<()> {
    let params = ModelParams::default();
    let models = vec![build_model("h3_1", &params)?, build_model("h_em", &params)?];

    let start = Instant::now();
    println!("spin 0, dipole 4");
    println!("{:<9} {:>3} {:>6} {:>8} {:>9} {:>7}", "model", "N", "r", "S_f", "Dmax/Dt", "D_t");
    for row in finite_size_table(&models, 10..=14, 0, Some(4))? {
        let m = row.metrics;
        println!("{:<9} {:>3} {:>6} {:>8.4} {:>9.4} {:>7}", row.model, row.n, m.r, m.sf, m.dmax_over_dt, m.dt);
    }
    println!("({:.2?})\n", start.elapsed());

    let sweep = vec![
        build_model("h3_1", &params)?,
        build_model("h3_prime", &params)?,
        build_model("h_em", &params)?,
    ];
    println!("N=13, spin 0");
    println!("{:<9} {:>3} {:>6} {:>8} {:>9} {:>7}", "model", "P", "r", "S_f", "Dmax/Dt", "D_t");
    for p in [0, 2, 4, 6, 8] {
        for row in finite_size_table(&sweep, 13..=13, 0, Some(p))? {
            let m = row.metrics;
            println!("{:<9} {:>3} {:>6} {:>8.4} {:>9.4} {:>7}", row.model, p, m.r, m.sf, m.dmax_over_dt, m.dt);
        }
    }
    Ok(())
}
