mod common;

use common::oracle_s;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rectdim::applications::{
    linear_forms_dim, linear_forms_exponent_choice, mult_dim, mult_pair_dim, simultaneous_dim,
    simultaneous_exponent_choice, LinearFormsInstance, MultiplicativeInstance, Regime,
    SimultaneousInstance,
};
use rectdim::CantorAxisSpec;

#[test]
fn simultaneous_cross_check_on_a_thousand_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1_000 {
        let m = rng.gen_range(1..=6);
        let tau: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * 3.0).collect();
        let inst = SimultaneousInstance::new(&tau).unwrap();
        let r = simultaneous_dim(&inst).unwrap();
        if r.full_measure {
            assert_eq!(r.value, m as f64);
            continue;
        }
        let p = simultaneous_exponent_choice(&inst).unwrap();
        let expect = oracle_s(&vec![1.0; m], 0.0, p.a(), p.t());
        assert!(
            (r.value - expect).abs() <= 1e-10,
            "{tau:?}: {} vs {expect}",
            r.value
        );
    }
}

#[test]
fn linear_cross_check_on_a_thousand_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..1_000 {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=4);
        let lambda: Vec<f64> = (0..m).map(|_| 1.0 + rng.gen::<f64>() * 6.0).collect();
        let inst = LinearFormsInstance::new(n, &lambda).unwrap();
        let r = linear_forms_dim(&inst).unwrap();
        if r.full_measure {
            assert_eq!(r.value, (m * n) as f64);
            continue;
        }
        let p = linear_forms_exponent_choice(&inst).unwrap();
        let nf = n as f64;
        let expect = oracle_s(&vec![nf; m], 1.0 - 1.0 / nf, p.a(), p.t());
        assert!(
            (r.value - expect).abs() <= 1e-10,
            "n={n} {lambda:?}: {} vs {expect}",
            r.value
        );
    }
}

fn random_axis(rng: &mut impl Rng) -> CantorAxisSpec {
    let base = rng.gen_range(2..=16u32);
    let mut digits: Vec<u32> = (0..base).filter(|_| rng.gen_bool(0.6)).collect();
    if digits.len() < 2 {
        digits = vec![0, base - 1];
    }
    CantorAxisSpec::new(base, digits).unwrap()
}

#[test]
fn regime_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (mut holds, mut fails) = (0, 0);
    for _ in 0..300 {
        let inst = MultiplicativeInstance::new(
            random_axis(&mut rng),
            random_axis(&mut rng),
            rng.gen::<f64>() * 4.0,
        )
        .unwrap();
        let r = mult_dim(&inst).unwrap();
        match r.regime {
            Regime::FormulaHolds => {
                holds += 1;
                assert!(
                    (r.numeric_sup - r.formula).abs() <= 1e-8,
                    "{inst:?}: {} vs {}",
                    r.numeric_sup,
                    r.formula
                );
            }
            Regime::FormulaFails => {
                fails += 1;
                assert!(r.formula + 1e-6 < r.dim && r.dim + 1e-6 < r.covering_upper);
            }
        }
    }
    assert!(holds > 0 && fails > 0, "{holds} / {fails}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn one_by_one_duality(lambda in 1.0f64..=8.0) {
        let lin = linear_forms_dim(&LinearFormsInstance::new(1, &[lambda]).unwrap()).unwrap();
        let sim = simultaneous_dim(&SimultaneousInstance::new(&[lambda - 1.0]).unwrap()).unwrap();
        prop_assert_eq!(lin.value, sim.value);
        prop_assert_eq!(lin.full_measure, sim.full_measure);
    }

    #[test]
    fn pair_is_continuous_across_case_boundary(t1 in 0.0f64..=4.0) {
        let a = CantorAxisSpec::full(9).unwrap();
        let b = CantorAxisSpec::new(3, [0, 2]).unwrap();
        let edge = a.log_base() - b.log_base();
        let lo = mult_pair_dim(&a, &b, t1, edge - 1e-6).unwrap().dimension.value;
        let hi = mult_pair_dim(&a, &b, t1, edge + 1e-6).unwrap().dimension.value;
        prop_assert!((lo - hi).abs() <= 1e-4);
    }

    #[test]
    fn sub_dirichlet_is_full(tau in prop::collection::vec(0.0f64..=0.3, 1..=3)) {
        prop_assume!(tau.iter().sum::<f64>() <= 1.0);
        let r = simultaneous_dim(&SimultaneousInstance::new(&tau).unwrap()).unwrap();
        prop_assert!(r.full_measure && r.value == tau.len() as f64);
    }
}
