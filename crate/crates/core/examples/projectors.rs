//! Exact evaluation of the phase-factor projectors: the two-site spin-S
//! projectors, the spin-2 three-site filter and the modular projector.
//!
//! cargo run --example projectors

use pvfrag::models::{appendix_c_projector, modular_projector, projector_prime};

fn main() -> pvfrag::Result<()> {
    println!("P[|m| = 2S] evaluated from the phase formulas (m = F_n + F_n+1):");
    for two_s in 1..=5u32 {
        let span = 2 * two_s as i64;
        let row: Vec<String> = (-span..=span)
            .map(|m| appendix_c_projector(two_s, m).map_or("?".into(), |v| v.to_string()))
            .collect();
        println!("  2S={two_s}  m={}..{}: {}", -span, span, row.join(" "));
    }

    println!("\nspin-2 filter P'(a, m, c), zero middle only:");
    for a in -2..=2i8 {
        let row: Vec<String> = (-2..=2i8).map(|c| projector_prime(&[a, 0, c]).to_string()).collect();
        println!("  a={a:>2}: {}", row.join(" "));
    }

    println!("\nmodular projector, F=1, lambda=1:");
    let row: Vec<String> = (-4..=4).map(|q| modular_projector(q, 1, 1).to_string()).collect();
    println!("  q=-4..4: {}", row.join(" "));
    Ok(())
}
