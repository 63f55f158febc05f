use mpqc_core::compiler::compile_multi_version;
use mpqc_core::harness::{benchmark, device_27};
use mpqc_core::partition::generate_compute_units;
use mpqc_core::sim::{fidelity, simulate_noisy, tvd, Distribution, NoiseSpec};
use proptest::prelude::*;

fn distribution(width: usize) -> impl Strategy<Value = Distribution> {
    proptest::collection::vec(0.0f64..1.0, 1usize << width).prop_filter_map("all zero", move |w| {
        let total: f64 = w.iter().sum();
        (total > 0.0).then(|| {
            Distribution::from_probabilities(width, w.iter().enumerate().map(|(i, p)| (i as u64, p / total))).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn fidelity_is_a_symmetric_bounded_similarity(p in distribution(3), q in distribution(3)) {
        let f = fidelity(&p, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert_eq!(f, fidelity(&q, &p).unwrap());
        prop_assert_eq!(fidelity(&p, &p).unwrap(), 1.0);
        prop_assert!((f + tvd(&p, &q).unwrap() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn width_mismatch_is_an_error() {
    let a = Distribution::point_mass(2, 0).unwrap();
    let b = Distribution::point_mass(3, 0).unwrap();
    assert!(fidelity(&a, &b).is_err());
}

#[test]
fn noisy_runs_normalize_and_report_shots() {
    let g = device_27();
    let ug = generate_compute_units(&g, 4).unwrap();
    for name in ["qft_n4", "qaoa_n6", "ising_n10"] {
        let p = compile_multi_version(benchmark(name).unwrap(), &ug, &g).unwrap();
        let d = simulate_noisy(&p.executables[0], &NoiseSpec::new(1 << 12, 3), &g).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-9, "{name}");
        assert_eq!(d.shots(), Some(1 << 12));
        let json: serde_json::Value = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(json["width"], p.executables[0].num_clbits);
        assert!(json["outcomes"].as_object().unwrap().keys().all(|k| k.len() == d.width()));
    }
}
