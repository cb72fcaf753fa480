//! Map spin product states to charge paths, find regional peaks and valleys,
//! and translate core-subspace states into charge strings.
//!
//! cargo run --example charge_paths

use pvfrag::duality::{
    core_basis, core_orientation, from_path, regional_extrema, to_charge_string, to_path, ChargePath, Extremum,
};
use pvfrag::spinchain::{Alphabet, SpinConfig};

fn show(values: &[i8], q: usize) -> pvfrag::Result<()> {
    let config = SpinConfig::spin(1, values)?;
    let path = to_path(&config);
    let labels: Vec<String> = regional_extrema(&path, q)
        .iter()
        .map(|l| {
            let kind = if l.kind == Extremum::Peak { "P" } else { "V" };
            format!("{kind}{}@{}", l.height, l.doubled_position() as f64 / 2.0)
        })
        .collect();
    println!("{:<32} heights {:?}", config.to_string(), path.heights());
    println!("{:<32} q={q} labels [{}]  core: {:?}", "", labels.join(" "), core_orientation(&config));
    Ok(())
}

fn main() -> pvfrag::Result<()> {
    show(&[1, 0, -1, 1], 3)?;
    show(&[1, 1, -1, -1, -1, -1, 1, 1, 1, 1], 3)?;
    show(&[1, 1, 1], 3)?;
    show(&[1, 1, 1], 4)?;
    show(&[-1, -1, 0, 0, 1, 0, 1, 0, 1, 0, 0, -1], 3)?;
    // core only after a global spin flip
    show(&[-1, 0, 1, 0, 0, 0, 0, -1, 1, 0, 0, 0], 3)?;

    // paths are validated on the way back
    let bad = ChargePath::new(Alphabet::Integer(1), vec![0, 2])?;
    println!("\nfrom_path([0,2]) with F=1: {}", from_path(&bad).unwrap_err());

    println!("\ncore subspace sizes:");
    for f in 1..=2u8 {
        for len in 1..=6 {
            print!(" F={f} L={len}: {:>4}", core_basis(len, f)?.len());
        }
        println!();
    }
    println!("\nF=1, L=3 core states and their spin-1/2 charge strings:");
    for c in core_basis(3, 1)? {
        println!("  {:<10} -> {}", c.to_string(), to_charge_string(&c)?.pretty());
    }
    println!("F=2: 1,1,-2 -> {}", to_charge_string(&SpinConfig::spin(2, &[1, 1, -2])?)?);
    Ok(())
}
