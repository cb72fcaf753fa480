//! Quench dynamics inside a Krylov class: entanglement entropy against cut
//! and time, the charge profile, and plateau sites.
//!
//! cargo run --release --example entanglement_dynamics

use pvfrag::dynamics::{assemble, evolve, plateau_predicate, simulate, time_grid};
use pvfrag::krylov::class_of;
use pvfrag::models::{build_model, ModelParams};
use pvfrag::spinchain::SpinConfig;

fn main() -> pvfrag::Result<()> {
    let h3 = build_model("h3_1", &ModelParams::default())?;
    let times = time_grid(50.0, 0.25)?;

    for values in [
        &[-1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, -1][..],
        &[-1, -1, 0, 0, 1, 0, 1, 0, 1, 0, 0, -1][..],
    ] {
        let init = SpinConfig::spin(1, values)?;
        let run = simulate(&h3, &init, &times)?;
        let len = init.len();
        let mean: Vec<f64> = (0..len - 1)
            .map(|c| run.entropies.iter().map(|row| row[c]).sum::<f64>() / times.len() as f64)
            .collect();
        let plateaus: Vec<usize> = (0..len).filter(|&s| plateau_predicate(&run.basis, s)).collect();
        println!("{}  D={}", init, run.dimension());
        println!("  time-averaged S_E by cut: {}", fmt(&mean));
        println!("  <n> at t=50:              {}", fmt(run.charges.last().unwrap()));
        println!("  plateau sites: {plateaus:?}");
    }

    // Norm and energy stay fixed to rounding.
    let init = SpinConfig::spin(1, &[-1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, -1])?;
    let h = assemble(&h3, &class_of(&h3, &init)?)?;
    let mut psi0 = vec![num_complex::Complex64::new(0.0, 0.0); h.dimension()];
    psi0[h.index_of(&init).unwrap()] = 1.0.into();
    let states = evolve(&h, &psi0, &time_grid(100.0, 1.0)?)?;
    let e0 = h.energy(&psi0);
    let drift = states
        .iter()
        .map(|s| {
            let n: f64 = s.iter().map(|x| x.norm_sqr()).sum();
            ((n.sqrt() - 1.0).abs(), (h.energy(s) - e0).abs())
        })
        .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    println!("max norm drift {:.1e}, max energy drift {:.1e} over t in [0, 100]", drift.0, drift.1);
    Ok(())
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:5.2}")).collect::<Vec<_>>().join(" ")
}
