//! Frozen reference values and cross-checks between independent routines.

use std::collections::{BTreeSet, HashSet};

use pvfrag::duality::{core_basis, core_orientation, regional_extrema, to_path, CoreOrientation};
use pvfrag::krylov::{class_of, compare_core_partitions, decompose, project_to_core};
use pvfrag::models::{
    appendix_c_projector, build_model, modular_projector, pv_check_model, ModelName, ModelParams, ModelSpec,
};
use pvfrag::spinchain::{Alphabet, SectorKey, SpinConfig};

fn model(name: &str) -> ModelSpec {
    build_model(name, &ModelParams::default()).unwrap()
}

fn sectors(m: &ModelSpec, len: usize) -> Vec<SectorKey> {
    let f = m.alphabet.max_value() as i64;
    (-(len as i64) * f..=(len as i64) * f)
        .map(|s| SectorKey::new(len, m.alphabet, s, None).unwrap())
        .collect()
}

#[test]
fn union_find_matches_breadth_first_search() {
    for name in ["h3_1", "h_em", "tjz1", "h4_1", "motzkin"] {
        let m = model(name);
        for len in 2..=8 {
            for key in sectors(&m, len) {
                let p = decompose(&m, &key).unwrap();
                let mut seen = HashSet::new();
                for members in p.classes() {
                    let first = p.config(members[0]);
                    let bfs: BTreeSet<u64> = class_of(&m, &first).unwrap().iter().map(|c| c.rank()).collect();
                    let uf: BTreeSet<u64> = members.iter().map(|&i| p.ranks[i]).collect();
                    assert_eq!(bfs, uf, "{name} L={len} S={}", key.total_spin);
                    assert!(seen.insert(*uf.first().unwrap()));
                }
            }
        }
    }
    // one larger sector
    let m = model("h3_1");
    let key = SectorKey::new(10, Alphabet::Integer(1), 0, Some(5)).unwrap();
    let p = decompose(&m, &key).unwrap();
    for members in p.classes() {
        let bfs = class_of(&m, &p.config(members[0])).unwrap();
        assert_eq!(bfs.len(), members.len());
    }
}

#[test]
fn class_ids_are_minimal_ranks() {
    let m = model("h_em");
    let key = SectorKey::new(9, Alphabet::Integer(1), 1, Some(3)).unwrap();
    let p = decompose(&m, &key).unwrap();
    for (i, &c) in p.class_of.iter().enumerate() {
        assert!(c <= p.ranks[i]);
        assert!(p.ranks.binary_search(&c).is_ok());
    }
    assert_eq!(p.class_sizes.iter().sum::<usize>(), p.dimension());
}

#[test]
fn dipole_conserving_models_keep_their_charges() {
    for name in ["h3_1", "h4_1", "h_em", "h3_prime", "h3_2", "h3_2_raw"] {
        assert!(model(name).conserves_dipole(), "{name}");
    }
    for name in ["tjz1", "tjz2", "motzkin", "fredkin"] {
        assert!(!model(name).conserves_dipole(), "{name}");
    }
    let err = decompose(&model("motzkin"), &SectorKey::new(4, Alphabet::Integer(1), 0, Some(0)).unwrap());
    assert!(err.is_err());
}

#[test]
fn h3_2_raw_violations() {
    let raw = model("h3_2_raw");
    let filtered = model("h3_2");
    assert_eq!(raw.transition_count(), 48);
    assert_eq!(filtered.transition_count(), 26);
    assert_eq!(pv_check_model(&raw).violations.len(), 22);
    assert!(pv_check_model(&filtered).passed);
}

#[test]
fn all_models_are_hermitian() {
    for which in ModelName::ALL {
        let m = pvfrag::models::build(which, &ModelParams::default()).unwrap();
        assert!(m.operators.iter().all(|o| o.is_hermitian()), "{which}");
    }
}

#[test]
fn small_sector_dimensions() {
    let dims: Vec<u128> = (0..=6)
        .map(|l| SectorKey::new(l.max(1), Alphabet::Integer(1), 0, Some(0)).unwrap().dimension())
        .collect();
    assert_eq!(dims, [1, 1, 1, 1, 3, 7, 15]);
    let half = SectorKey::new(4, Alphabet::spin_half(), 0, None).unwrap();
    assert_eq!(half.dimension(), 6);
}

#[test]
fn figure_state_class_dipoles() {
    let h3 = model("h3_1");
    let states: [&[i8]; 5] = [
        &[-1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, -1],
        &[-1, 0, 0, 0, 1, 1, -1, -1, 1, 0, 0, 0],
        &[-1, -1, 0, 0, 1, 0, 1, 0, 1, 0, 0, -1],
        &[-1, 0, -1, -1, 0, 1, 0, 1, 0, 1, 0, 0],
        &[-1, 0, 0, 1, -1, -1, -1, 1, 0, 0, 1, 1],
    ];
    let got: Vec<(usize, i64)> = states
        .iter()
        .map(|v| {
            let c = SpinConfig::spin(1, v).unwrap();
            let class = class_of(&h3, &c).unwrap();
            assert!(class.iter().all(|x| x.dipole() == c.dipole() && x.total_spin() == 0));
            (class.len(), c.dipole())
        })
        .collect();
    assert_eq!(got, [(210, 0), (84, 4), (17, 6), (13, 16), (34, 16)]);
}

#[test]
fn projector_identities() {
    // |m| = 2S is the only passing value on the physical range
    for two_s in 1..=5u32 {
        for m in -(two_s as i64)..=two_s as i64 {
            let want = (m.abs() == two_s as i64) as u8;
            assert_eq!(appendix_c_projector(two_s, m).unwrap(), want, "2S={two_s} m={m}");
        }
    }
    assert!(appendix_c_projector(6, 0).is_err());
    for f in 1..=3u8 {
        let period = 2 * f as i64 + 1;
        assert_eq!(modular_projector(period + 2, 2, f), 1);
        assert_eq!(modular_projector(3, 2, f), 0);
    }
}

#[test]
fn appendix_c_outside_physical_range() {
    // not asserted: the closed forms only promise the physical range
    for two_s in 1..=5u32 {
        let row: Vec<String> = (-2 * two_s as i64..=2 * two_s as i64)
            .map(|m| match appendix_c_projector(two_s, m) {
                Ok(v) => v.to_string(),
                Err(_) => "x".into(),
            })
            .collect();
        println!("2S={two_s}: {}", row.join(" "));
    }
}

#[test]
fn core_orientation_of_flipped_states() {
    let c = SpinConfig::spin(1, &[1, -1, 1]).unwrap();
    assert_eq!(core_orientation(&c), Some(CoreOrientation::Direct));
    assert_eq!(core_orientation(&c.flipped()), Some(CoreOrientation::Flipped));
    assert_eq!(core_orientation(&SpinConfig::spin(1, &[1, 1]).unwrap()), None);
    assert_eq!(core_basis(5, 2).unwrap().len(), 243);
}

#[test]
fn motzkin_moves_leave_the_core() {
    let p = project_to_core(&model("motzkin"), 6).unwrap();
    assert!(!p.protects_core());
    assert_eq!(p.violations.len(), 32);
    let h3 = project_to_core(&model("h3_1"), 8).unwrap();
    assert!(h3.protects_core());
    assert_eq!(h3.context, (0, 0));
    let tjz2 = project_to_core(&model("tjz2"), 6).unwrap();
    assert!(tjz2.protects_core());
    assert_eq!(tjz2.context, (1, 1));
}

#[test]
fn projected_rules_do_not_depend_on_alpha() {
    let reference = project_to_core(&model("h_em"), 8).unwrap().rule_strings();
    for alpha in [-1.0, 0.5, 3.0] {
        let m = build_model("h_em", &ModelParams { alpha }).unwrap();
        assert_eq!(project_to_core(&m, 8).unwrap().rule_strings(), reference);
    }
}

#[test]
fn embedded_fredkin_is_finer_than_fredkin_on_the_core() {
    let em = model("h_em");
    let fredkin = model("fredkin");
    // Fredkin gives (L/2 + 1)^2 classes on the core
    let frozen = [(6, 64, 33, 16), (8, 256, 88, 25), (10, 1024, 232, 36), (12, 4096, 609, 49)];
    for (len, dim, em_classes, fredkin_classes) in frozen {
        let cmp = compare_core_partitions(&em, &fredkin, len).unwrap();
        assert_eq!(cmp.core_dimension, dim);
        assert!(!cmp.identical);
        assert!(cmp.projected_refines, "L={len}");
        assert_eq!((cmp.projected_classes, cmp.charge_model_classes), (em_classes, fredkin_classes), "L={len}");
    }
}

#[test]
fn extrema_labels_need_depth() {
    // heights 0 1 2 2 1 0 1
    let path = to_path(&SpinConfig::spin(1, &[1, 1, 0, -1, -1, 1]).unwrap());
    let kinds = |q| regional_extrema(&path, q).iter().map(|l| (l.index, l.height)).collect::<Vec<_>>();
    assert_eq!(kinds(1), [(0, 0), (2, 2), (5, 0), (6, 1)]);
    assert_eq!(kinds(2), [(0, 0), (2, 2), (5, 0)]);
    assert!(kinds(3).is_empty());
}
