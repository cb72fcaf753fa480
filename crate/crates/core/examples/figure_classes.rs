//! Krylov classes of individual product states under H3 and their charge
//! paths.
//!
//! cargo run --example figure_classes

use pvfrag::duality::{label_signature, regional_extrema, to_path};
use pvfrag::krylov::class_of;
use pvfrag::models::{build_model, ModelParams};
use pvfrag::spinchain::SpinConfig;

fn main() -> pvfrag::Result<()> {
    let h3 = build_model("h3_1", &ModelParams::default())?;
    let states: [&[i8]; 5] = [
        &[-1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, -1],
        &[-1, 0, 0, 0, 1, 1, -1, -1, 1, 0, 0, 0],
        &[-1, -1, 0, 0, 1, 0, 1, 0, 1, 0, 0, -1],
        &[-1, 0, -1, -1, 0, 1, 0, 1, 0, 1, 0, 0],
        &[-1, 0, 0, 1, -1, -1, -1, 1, 0, 0, 1, 1],
    ];
    for values in states {
        let init = SpinConfig::spin(1, values)?;
        let class = class_of(&h3, &init)?;
        let path = to_path(&init);
        let sig = label_signature(&regional_extrema(&path, 3));
        println!(
            "{:<28} P={:>3}  D={:>4}  max={} min={}  labels {:?}",
            init.to_string(),
            init.dipole(),
            class.len(),
            path.max(),
            path.min(),
            sig
        );
    }

    // A few members of the D=17 class: the labels stay put while the path moves.
    let init = SpinConfig::spin(1, states[2])?;
    for c in class_of(&h3, &init)?.iter().take(5) {
        println!("  {}  {:?}", c.pretty(), to_path(c).heights());
    }
    Ok(())
}
