use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rectdim::applications::shrinking_target_dim;
use rectdim::verify::{
    build_mass_tree, check_conservation, check_containment, check_separation, holder_test,
    min_covering_level, ubiquity_coverage, Ball, CoverageMethod, NodeKind, TreeConfig,
    UbiquitySystemSpec,
};
use rectdim::{Anchor, CantorAxisSpec};

fn axis(base: u32, mask: u32) -> CantorAxisSpec {
    let digits: Vec<u32> = (0..base).filter(|d| mask >> d & 1 == 1).collect();
    CantorAxisSpec::new(base, digits).unwrap_or_else(|_| CantorAxisSpec::full(base).unwrap())
}

fn axis_strategy() -> impl Strategy<Value = CantorAxisSpec> {
    (2u32..=5, any::<u32>()).prop_map(|(b, mask)| axis(b, mask))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shrinking_coverage_is_exactly_one(
        axes in prop::collection::vec(axis_strategy(), 1..=3),
        n in 1u32..=7,
        seed in any::<u64>(),
    ) {
        let d = axes.len();
        let spec = UbiquitySystemSpec::shrinking(axes, vec![Anchor::tail_only(); d]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ball = Ball::new((0..d).map(|_| rng.gen()).collect(), rng.gen_range(0.01..0.5)).unwrap();
        let rep = ubiquity_coverage(&spec, &ball, n, CoverageMethod::Exact1d).unwrap();
        prop_assert!(rep.degenerate || rep.fraction == 1.0);
    }

    #[test]
    fn trees_conserve_mass_and_separate(
        axes in prop::collection::vec(axis_strategy(), 1..=2),
        t in prop::collection::vec(0.0f64..=1.5, 2),
    ) {
        let d = axes.len();
        let cfg = TreeConfig { node_budget: 200_000, ..TreeConfig::new(2) };
        let tree = build_mass_tree(&axes, &vec![Anchor::tail_only(); d], &t[..d], &cfg);
        prop_assume!(tree.is_ok());
        let tree = tree.unwrap();
        prop_assert!(check_conservation(&tree) <= 1e-12);
        prop_assert!(check_containment(&tree).is_ok());
        prop_assert!(check_separation(&tree).is_ok());
        let leaves: f64 = tree.leaves().map(|n| n.mu).sum();
        prop_assert!((leaves - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn simultaneous_coverage_at_least_045() {
    let spec = UbiquitySystemSpec::simultaneous(vec![2.0], 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..8 {
        let r = rng.gen_range(0.03..0.3);
        let c = rng.gen_range(r..=1.0 - r);
        let k = min_covering_level(32, r).unwrap();
        let rep = ubiquity_coverage(
            &spec,
            &Ball::new(vec![c], r).unwrap(),
            k,
            CoverageMethod::Exact1d,
        )
        .unwrap();
        assert!(
            rep.fraction >= 0.45,
            "ball ({c}, {r}) at k={k}: {}",
            rep.fraction
        );
    }
}

#[test]
fn monte_carlo_coverage_in_the_plane() {
    let spec = UbiquitySystemSpec::simultaneous(vec![1.5, 1.5], 256).unwrap();
    let ball = Ball::new(vec![0.5, 0.5], 0.25).unwrap();
    let rep = ubiquity_coverage(
        &spec,
        &ball,
        1,
        CoverageMethod::MonteCarlo {
            samples: 2_000,
            seed: 5,
        },
    )
    .unwrap();
    let again = ubiquity_coverage(
        &spec,
        &ball,
        1,
        CoverageMethod::MonteCarlo {
            samples: 2_000,
            seed: 5,
        },
    )
    .unwrap();
    assert_eq!(rep, again);
    assert!(
        rep.fraction >= 0.45 && rep.stderr <= 0.5 / 2_000f64.sqrt(),
        "{rep:?}"
    );
}

#[test]
fn linear_forms_monte_carlo() {
    let spec = UbiquitySystemSpec::linear_forms(2, vec![3.0], 16).unwrap();
    let ball = Ball::new(vec![0.4, 0.6], 0.2).unwrap();
    let rep = ubiquity_coverage(
        &spec,
        &ball,
        1,
        CoverageMethod::MonteCarlo {
            samples: 2_000,
            seed: 3,
        },
    )
    .unwrap();
    assert!(rep.fraction >= 0.45, "{rep:?}");
    assert!(ubiquity_coverage(&spec, &ball, 1, CoverageMethod::Exact1d).is_err());
}

#[test]
fn division_count_near_formula() {
    let axes = vec![
        CantorAxisSpec::full(2).unwrap(),
        CantorAxisSpec::new(3, [0, 2]).unwrap(),
    ];
    let t = [2f64.ln(), 0.0];
    let tree = build_mass_tree(
        &axes,
        &[Anchor::tail_only(), Anchor::tail_only()],
        &t,
        &TreeConfig::new(2),
    )
    .unwrap();
    let n = f64::from(tree.stages[1].n);
    let hat: Vec<f64> = axes.iter().zip(&t).map(|(a, t)| a.log_base() + t).collect();
    let top = hat.iter().copied().fold(0.0, f64::max);
    let formula: f64 = axes
        .iter()
        .zip(&hat)
        .map(|(a, h)| (n * (top - h)).exp().powf(a.delta()))
        .product();
    for shrunk in tree
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Shrunk && n.level == 2)
    {
        let count = shrunk.children.len() as f64;
        assert!(
            count <= 4.0 * formula && count * 4.0 >= formula,
            "{count} vs {formula}"
        );
    }
}

#[test]
fn holder_sharpness() {
    let axes = vec![CantorAxisSpec::new(3, [0, 2]).unwrap()];
    let t = [0.5];
    let tree = build_mass_tree(&axes, &[Anchor::tail_only()], &t, &TreeConfig::new(3)).unwrap();
    let s = shrinking_target_dim(&axes, &t).unwrap().dimension.value;
    let low = holder_test(&tree, s / 2.0, 0.05, 4_000, 1).unwrap();
    let full = holder_test(&tree, axes[0].delta(), 0.05, 4_000, 1).unwrap();
    assert!(low.pass, "{low:?}");
    assert!(!full.pass && full.slope < low.slope);
    assert_eq!(
        holder_test(&tree, s, 0.05, 4_000, 1).unwrap(),
        holder_test(&tree, s, 0.05, 4_000, 1).unwrap()
    );
}
