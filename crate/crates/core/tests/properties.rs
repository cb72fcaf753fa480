use num_complex::Complex64;
use proptest::prelude::*;
use pvfrag::duality::{from_charge_string, from_path, to_charge_string, to_path};
use pvfrag::dynamics::{assemble, entanglement_entropy, evolve, evolve_with, plateau_predicate, Method};
use pvfrag::krylov::{class_of, decompose, FragmentationMetrics};
use pvfrag::models::{build_model, ModelParams, ModelSpec};
use pvfrag::spinchain::{enumerate_sector_ranks, Alphabet, Enumeration, SectorKey, SpinConfig};

fn alphabet() -> impl Strategy<Value = Alphabet> {
    prop_oneof![
        Just(Alphabet::spin_half()),
        Just(Alphabet::Integer(1)),
        Just(Alphabet::Integer(2)),
    ]
}

fn config(max_len: usize) -> impl Strategy<Value = SpinConfig> {
    (alphabet(), 1..=max_len).prop_flat_map(|(a, len)| {
        let values: Vec<i8> = a.values().collect();
        proptest::collection::vec(proptest::sample::select(values), len)
            .prop_map(move |v| SpinConfig::new(a, v).unwrap())
    })
}

fn spin1(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = SpinConfig> {
    proptest::collection::vec(-1i8..=1, len).prop_map(|v| SpinConfig::spin(1, &v).unwrap())
}

fn model(name: &str) -> ModelSpec {
    build_model(name, &ModelParams::default()).unwrap()
}

fn random_state(d: usize, seed: &[f64]) -> Vec<Complex64> {
    let mut psi: Vec<Complex64> = (0..d)
        .map(|i| Complex64::new(seed[(2 * i) % seed.len()] + 0.1, seed[(2 * i + 1) % seed.len()]))
        .collect();
    let n = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|x| *x /= n);
    psi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_round_trip(c in config(14)) {
        prop_assert_eq!(SpinConfig::unrank(c.alphabet(), c.len(), c.rank()).unwrap(), c);
    }

    #[test]
    fn path_round_trip(c in config(14)) {
        let path = to_path(&c);
        prop_assert_eq!(path.heights().len(), c.len() + 1);
        prop_assert_eq!(path.heights()[0], 0);
        prop_assert_eq!(from_path(&path).unwrap(), c);
    }

    #[test]
    fn charge_string_round_trip(f in 1u8..=3, levels in proptest::collection::vec(0i64..=3, 1..12)) {
        let mut prev = 0i64;
        let values: Vec<i8> = levels
            .iter()
            .map(|&l| {
                let l = l.min(f as i64);
                let v = (l - prev) as i8;
                prev = l;
                v
            })
            .collect();
        let c = SpinConfig::spin(f, &values).unwrap();
        let q = to_charge_string(&c).unwrap();
        prop_assert_eq!(q.len(), c.len());
        prop_assert_eq!(from_charge_string(&q, f).unwrap(), c);
    }

    #[test]
    fn reversal_maps_dipole(c in config(14)) {
        // w(k) = k+1, so reversing the chain sends P to (L+1) S - P
        let l = c.len() as i64;
        prop_assert_eq!(c.reversed().dipole(), (l + 1) * c.total_spin() - c.dipole());
        prop_assert_eq!(c.flipped().dipole(), -c.dipole());
    }

    #[test]
    fn enumeration_matches_counting(
        a in alphabet(),
        len in 1usize..=9,
        s in -6i64..=6,
        p in proptest::option::of(-20i64..=40),
    ) {
        let s = if a == Alphabet::spin_half() { 2 * s + (len as i64 % 2) } else { s };
        let p = p.map(|p| if a == Alphabet::spin_half() { 2 * p } else { p });
        if let Ok(key) = SectorKey::new(len, a, s, p) {
            let scan = enumerate_sector_ranks(&key, Enumeration::Scan);
            let mitm = enumerate_sector_ranks(&key, Enumeration::MeetInTheMiddle);
            prop_assert_eq!(&scan, &mitm);
            prop_assert_eq!(scan.len() as u128, key.dimension());
            prop_assert!(scan.windows(2).all(|w| w[0] < w[1]));
            for r in scan {
                prop_assert!(key.contains(&SpinConfig::unrank(a, len, r).unwrap()));
            }
        }
    }

    #[test]
    fn fragmentation_entropy_is_normalized(sizes in proptest::collection::vec(1usize..50, 1..40)) {
        let m = FragmentationMetrics::from_sizes(&sizes).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&m.sf));
        prop_assert_eq!(m.r, sizes.len());
        prop_assert_eq!(m.dt, sizes.iter().sum::<usize>());
        if sizes.len() == 1 {
            prop_assert_eq!(m.sf, 0.0);
        }
    }

    #[test]
    fn partition_ignores_positive_couplings(
        len in 4usize..=9,
        s in -2i64..=2,
        alpha in prop_oneof![Just(-1.0), Just(0.5), Just(2.0)],
        coeffs in proptest::collection::vec(0.1f64..5.0, 9),
    ) {
        let key = SectorKey::new(len, Alphabet::Integer(1), s, None).unwrap();
        let base = decompose(&model("h_em"), &key).unwrap();
        let other = build_model("h_em", &ModelParams { alpha }).unwrap().with_site_coefficients(coeffs).unwrap();
        prop_assert_eq!(decompose(&other, &key).unwrap(), base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_is_unitary_and_reversible(
        init in spin1(5..=9),
        seed in proptest::collection::vec(-1.0f64..1.0, 8),
        t in 0.0f64..20.0,
    ) {
        let h3 = model("h3_1");
        let basis = class_of(&h3, &init).unwrap();
        let h = assemble(&h3, &basis).unwrap();
        let psi0 = random_state(h.dimension(), &seed);
        let forward = evolve(&h, &psi0, &[t]).unwrap().pop().unwrap();
        let norm: f64 = forward.iter().map(|x| x.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
        prop_assert!((h.energy(&forward) - h.energy(&psi0)).abs() < 1e-9);
        let back = evolve(&h, &forward, &[-t]).unwrap().pop().unwrap();
        let err = back.iter().zip(&psi0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9, "round trip error {}", err);
    }

    #[test]
    fn lanczos_agrees_with_dense(
        init in spin1(8..=10),
        seed in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let h3 = model("h_em");
        let basis = class_of(&h3, &init).unwrap();
        let h = assemble(&h3, &basis).unwrap();
        let psi0 = random_state(h.dimension(), &seed);
        let times = [0.0, 0.5, 3.0, 10.0];
        let a = evolve_with(&h, &psi0, &times, Method::Dense).unwrap();
        let b = evolve_with(&h, &psi0, &times, Method::Lanczos).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let err = x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-6, "dense vs Lanczos {}", err);
        }
    }

    #[test]
    fn plateau_sites_have_flat_entropy(
        init in spin1(6..=11),
        seed in proptest::collection::vec(-1.0f64..1.0, 12),
    ) {
        let basis = class_of(&model("h3_1"), &init).unwrap();
        let psi = random_state(basis.len(), &seed);
        for site in 0..init.len() {
            if plateau_predicate(&basis, site) {
                let a = entanglement_entropy(&psi, &basis, site);
                let b = entanglement_entropy(&psi, &basis, site + 1);
                prop_assert!((a - b).abs() < 1e-12, "site {}: {} vs {}", site, a, b);
            }
        }
    }
}
