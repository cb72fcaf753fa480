//! Positive and negative regions of spin-2 states, and their conservation
//! under the spin-2 t-Jz model.
//!
//! cargo run --example spin2_regions

use std::collections::BTreeMap;

use pvfrag::duality::region_decomposition;
use pvfrag::krylov::decompose;
use pvfrag::models::{build_model, ModelParams};
use pvfrag::spinchain::{Alphabet, SectorKey, SpinConfig};

fn main() -> pvfrag::Result<()> {
    let c = SpinConfig::spin(2, &[2, -2, -1, 0, 1, 0, 1, 2, 0, -2])?;
    let d = region_decomposition(&c);
    println!("{c}");
    for r in &d.regions {
        println!("  {:?} total {:+} on sites {:?}", r.sign, r.total_spin, r.sites);
    }
    println!("  separators {:?}", d.separators);

    let model = build_model("tjz2", &ModelParams::default())?;
    for len in 2..=6 {
        let mut broken = 0;
        let mut classes = 0;
        for spin in -2 * len as i64..=2 * len as i64 {
            let p = decompose(&model, &SectorKey::new(len, Alphabet::Integer(2), spin, None)?)?;
            for members in p.classes() {
                classes += 1;
                let mut seen: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
                for &i in &members {
                    *seen.entry(region_decomposition(&p.config(i)).total_multiset()).or_default() += 1;
                }
                broken += usize::from(seen.len() > 1);
            }
        }
        println!("L={len}: {classes} classes, {broken} with a non-constant region multiset");
    }
    Ok(())
}
