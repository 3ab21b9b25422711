mod common;

use common::{oracle_s, Instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rectdim::{
    compute_s, compute_s_hat, compute_s_with, ExponentProfile, ProductSpaceSpec, TiePolicy,
};

fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=6).prop_flat_map(|d| {
        (
            prop::collection::vec(1e-3f64..=3.0, d),
            0.0f64..=0.9,
            prop::collection::vec(1e-3f64..=5.0, d),
            prop::collection::vec(0.0f64..=5.0, d),
        )
            .prop_map(|(delta, kappa, a, t)| Instance { delta, kappa, a, t })
    })
}

/// Profiles with repeated entries, so that `aᵢ = aⱼ + tⱼ` ties actually occur.
fn tied_instance() -> impl Strategy<Value = Instance> {
    (1usize..=5).prop_flat_map(|d| {
        let grid = || prop::collection::vec((1u32..=6).prop_map(|k| f64::from(k) * 0.5), d);
        let t = prop::collection::vec((0u32..=4).prop_map(|k| f64::from(k) * 0.5), d);
        (
            prop::collection::vec(0.1f64..=3.0, d),
            0.0f64..=0.9,
            grid(),
            t,
        )
            .prop_map(|(delta, kappa, a, t)| Instance { delta, kappa, a, t })
    })
}

#[test]
fn equality_on_ten_thousand_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let inst = Instance::random(&mut rng);
        let s = compute_s(&inst.space(), &inst.profile()).unwrap().value;
        let hat = compute_s_hat(&inst.space(), &inst.profile()).unwrap().value;
        assert!((s - hat).abs() <= 1e-12, "{s} vs {hat}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn matches_independent_enumeration(inst in instance()) {
        let s = compute_s(&inst.space(), &inst.profile()).unwrap().value;
        let expect = oracle_s(&inst.delta, inst.kappa, &inst.a, &inst.t);
        prop_assert!((s - expect).abs() <= 1e-12 * expect.max(1.0));
    }

    #[test]
    fn equality_with_hat_alphabet(inst in instance()) {
        let s = compute_s(&inst.space(), &inst.profile()).unwrap().value;
        let hat = compute_s_hat(&inst.space(), &inst.profile()).unwrap().value;
        prop_assert!((s - hat).abs() <= 1e-12);
    }

    #[test]
    fn range(inst in instance()) {
        let total: f64 = inst.delta.iter().sum();
        let r = compute_s(&inst.space(), &inst.profile()).unwrap();
        prop_assert!(r.value >= 0.0 && r.value <= total + 1e-12);
        let flat = ExponentProfile::new(inst.a.clone(), vec![0.0; inst.a.len()]).unwrap();
        let r0 = compute_s(&inst.space(), &flat).unwrap();
        prop_assert!((r0.value - total).abs() <= 1e-12 && r0.full_measure);
    }

    #[test]
    fn monotone_in_t(inst in instance(), bump in prop::collection::vec(0.0f64..=2.0, 6)) {
        let bigger: Vec<f64> = inst.t.iter().zip(&bump).map(|(t, b)| t + b).collect();
        let s = compute_s(&inst.space(), &inst.profile()).unwrap().value;
        let s2 = compute_s(&inst.space(), &inst.profile().with_t(bigger).unwrap()).unwrap().value;
        prop_assert!(s2 <= s + 1e-12);
    }

    #[test]
    fn tie_policies_agree(inst in tied_instance()) {
        let (space, p) = (inst.space(), inst.profile());
        let base = compute_s_with(&space, &p, TiePolicy::Default).unwrap().value;
        for tie in [TiePolicy::StrictK1, TiePolicy::MergeEqualIntoK2] {
            let v = compute_s_with(&space, &p, tie).unwrap().value;
            prop_assert!((v - base).abs() <= 1e-12, "{:?}: {} vs {}", tie, v, base);
        }
    }

    #[test]
    fn one_dimensional_closed_form(delta in 0.01f64..=3.0, kappa in 0.0f64..=0.9, a in 0.01f64..=5.0, t in 0.0f64..=5.0) {
        let space = ProductSpaceSpec::new(vec![delta], kappa).unwrap();
        let s = compute_s(&space, &ExponentProfile::new(vec![a], vec![t]).unwrap()).unwrap().value;
        let expect = delta * (kappa + (1.0 - kappa) * a / (a + t));
        prop_assert!((s - expect).abs() <= 1e-12);
    }

    #[test]
    fn scale_invariant(inst in instance(), c in 0.05f64..=20.0) {
        let s = compute_s(&inst.space(), &inst.profile()).unwrap().value;
        let scaled = compute_s(&inst.space(), &inst.profile().scaled(c).unwrap()).unwrap().value;
        prop_assert!((s - scaled).abs() <= 1e-11);
    }
}
