use super::*;
use crate::scalar::q;

#[test]
fn free_brackets_are_graded_symmetric() {
    let alg = FreeSL::new(&[("x", 0), ("y", 1)], 3, 4).unwrap();
    let (x, y) = (alg.gen(0), alg.gen(1));
    assert!(ell(&alg, &[&y, &y]).is_zero());
    assert_eq!(ell(&alg, &[&x, &y]), ell(&alg, &[&y, &x]));
    let xyy = ell(&alg, &[&x, &y, &y]);
    assert!(xyy.is_zero());
    let a = ell(&alg, &[&x, &y]);
    assert_eq!(ell(&alg, &[&a, &y]), ell(&alg, &[&y, &a]));
    let b = ell(&alg, &[&x, &x]);
    assert_eq!(ell(&alg, &[&b, &y]), -ell(&alg, &[&y, &b]));
    assert_eq!(alg.show(&(&a.scale(&q(2)) - &x)), "-x + 2 l2(x,y)");
}

#[test]
fn mc0_and_mc1_presentations() {
    let mc0 = build_mc0(4).unwrap();
    let a = mc0.alg.gen(0);
    let expected = mc0.alg.bracket(&a, &a).scale(&Q::new((-1).into(), 2.into()));
    assert_eq!(mc0.d.images[0], expected);
    let mc1 = build_mc1(4).unwrap();
    assert!(mc1.d.squares_to_zero(&mc1.alg));
}

#[test]
fn mcinf0_generator_is_maurer_cartan() {
    for cap in 1..=4 {
        let alg = build_mcinf0(cap).unwrap();
        assert!(mc_residual(&alg, &alg.gen(0)).unwrap().is_zero());
        assert!(alg.d_squared_zero());
    }
}

#[test]
fn mcinf1_weight_one_part() {
    let alg = mcinf1_generators(3, 3).unwrap();
    let x = mcinf1_fixed_point(&alg).unwrap();
    assert_eq!(x.weight_part(1), &alg.gen(1) - &alg.gen(0));
}

#[test]
fn mcinf1_fixed_point_equals_tree_sum() {
    for cap in 1..=4 {
        let alg = mcinf1_generators(cap.max(2) as usize, cap).unwrap();
        let a = mcinf1_fixed_point(&alg).unwrap();
        let b = mcinf1_tree_sum(&alg).unwrap();
        assert_eq!(a, b, "cap {cap}");
    }
}

#[test]
fn mcinf1_weight_two_part() {
    let alg = mcinf1_generators(2, 2).unwrap();
    let x = mcinf1_fixed_point(&alg).unwrap();
    let (a0, a1, l) = (alg.gen(0), alg.gen(1), alg.gen(2));
    // τ = single arity-1 vertex over α0, and the same vertex over dλ = α1 - α0
    let expected = &(&a1 - &a0) - &ell(&alg, &[&a0, &l]);
    let expected = &expected - &ell(&alg, &[&(&a1 - &a0), &l]).scale(&Q::new(1.into(), 2.into()));
    assert_eq!(x, expected);
}

#[test]
fn strict_part_reduces_to_lawrence_sullivan() {
    for cap in 1..=4 {
        assert!(strict_mcinf1_matches_ls(cap, LS_GAUGE_SIGN).unwrap(), "cap {cap}");
    }
    assert!(!strict_mcinf1_matches_ls(3, -LS_GAUGE_SIGN).unwrap());
}

#[test]
fn mcinf1_has_square_zero_differential() {
    let m = build_mcinf1(4).unwrap();
    assert!(m.ok());
    assert!(build_mcinf1(6).is_err());
}

#[test]
fn constant_paths_are_gamma_members_and_thin() {
    let fx = level1_fixture(3).unwrap();
    for n in 0..=1 {
        let level = Level::new(&fx.g, n).unwrap();
        let x = level.constant(&fx.x0);
        assert!(level.membership(&x).unwrap().is_zero());
        assert!(level.gamma_membership(&x).unwrap());
        if n >= 1 {
            assert!(level.thin_check(&x).unwrap());
        }
    }
    assert!(matches!(Level::new(&fx.g, 3), Err(Error::Unsupported(_))));
}

#[test]
fn gauge_homotopies_are_maurer_cartan() {
    for seed in 0..3 {
        let fx = level1_fixture(seed).unwrap();
        let level = Level::new(&fx.g, 1).unwrap();
        assert!(level.membership(&fx.path).unwrap().is_zero(), "seed {seed}");
        let (_, dt) = split_level1(&fx.path).unwrap();
        assert_eq!(dt[0], -fx.lambda.clone());
        let bad_lambda = &fx.lambda + &fx.g.basis.iter().find(|s| s.deg == 1).map(|s| Lin::basis(*s)).unwrap();
        let mut corrupted = fx.path.clone();
        corrupted.form -= &(&bad_lambda - &fx.lambda).map_keys(|s| (*s, Mono { exps: vec![0], dts: 1 }));
        let r = level.membership(&corrupted).unwrap();
        assert!(r.keys().any(|(_, m)| m.dts == 1), "seed {seed}");
    }
}

#[test]
fn non_mc_input_is_a_precondition_violation() {
    let fx = level1_fixture(1).unwrap();
    let level = Level::new(&fx.g, 1).unwrap();
    let gauge = fx.g.basis.iter().find(|s| s.deg == 0).unwrap();
    let mut x = fx.path.clone();
    x.form.add_term((*gauge, Mono { exps: vec![1], dts: 0 }), q(1));
    assert!(matches!(level.gamma_membership(&x), Err(Error::Precondition(_))));
    assert!(matches!(level.thin_check(&x), Err(Error::Precondition(_))));
    assert!(matches!(level.p_map(&x), Err(Error::Precondition(_))));
}

#[test]
fn rectification_on_gauge_homotopies() {
    for seed in 0..3 {
        let fx = level1_fixture(seed).unwrap();
        let level = Level::new(&fx.g, 1).unwrap();
        let r = rect_report(&level, &fx.path).unwrap();
        assert!(r.ok(), "seed {seed}: {r:?}");
    }
}

#[test]
fn image_of_i_with_top_cell_is_not_thin() {
    let fx = level1_fixture(2).unwrap();
    let level = Level::new(&fx.g, 1).unwrap();
    let beta = level.p_map(&fx.path).unwrap();
    let x = level.i_map(&beta).unwrap();
    assert!(level.gamma_membership(&x).unwrap());
    let top: Vector = beta.elt.iter().filter(|((_, c), _)| c.0.len() == 2).map(|((s, _), c)| (*s, c.clone())).collect();
    assert!(!top.is_zero());
    assert_eq!(level.thin_check(&x).unwrap(), false);
    assert_eq!(level.integral(&x), top);
}

#[test]
fn transferred_cell_structures_satisfy_relations() {
    let fx = level1_fixture(0).unwrap();
    let level = Level::new(&fx.g, 1).unwrap();
    assert!(level.check_cell_relations(3).unwrap().ok());
    let small = crate::linfty::free_nilpotent_lie(&[("a", -1), ("b", 0)], 2).unwrap();
    let (_, sg) = suspend_lie(&small).unwrap();
    let level2 = Level::new(&sg, 2).unwrap();
    assert!(level2.check_cell_relations(2).unwrap().ok());
}

fn unshifted_fixture() -> LieAlgebra {
    let alg = FreeAlg::new(&[("a", -1), ("b", 0), ("c", 0)], 3).unwrap();
    let deriv = LieDerivation { images: vec![Lin::zero(), alg.gen(0), Lin::zero()] };
    lie_from_free(&alg, Some(&deriv)).unwrap()
}

/// `x0` from a random flow, `x1` its image under the gauge `λ`; the shifted
/// flow runs along `-sλ`.
fn gauge_triple(g: &LieAlgebra, seed: u64) -> HomData {
    let (s, sg) = suspend_lie(g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = random_vector(&mut rng, &sg, 1, 1);
    let sx0 = gauge_flow(&sg, &start, &Lin::zero()).unwrap();
    let slambda = random_vector(&mut rng, &sg, 1, 2);
    let sx1 = gauge_flow(&sg, &-slambda.clone(), &sx0).unwrap();
    let _ = s;
    HomData::Gauge { x0: g.space.reindex(&sx0), x1: g.space.reindex(&sx1), lambda: g.space.reindex(&slambda) }
}

#[test]
fn hom_correspondence_round_trips() {
    let g = unshifted_fixture();
    let (_, sg) = suspend_lie(&g).unwrap();
    let level1 = Level::new(&sg, 1).unwrap();
    for seed in 0..5 {
        let data = gauge_triple(&g, seed);
        let cell = hom_to_cell(&g, &data).unwrap();
        assert!(level1.cell_is_mc(&cell).unwrap(), "seed {seed}");
        assert_eq!(cell_to_hom(&g, &cell).unwrap(), data);
        if let HomData::Gauge { x0, x1, lambda } = &data {
            if !lambda.is_zero() {
                let flipped = HomData::Gauge { x0: x0.clone(), x1: x1.clone(), lambda: -lambda.clone() };
                assert!(hom_to_cell(&g, &flipped).is_err() || x0 == x1);
            }
        }
    }
    let level0 = Level::new(&sg, 0).unwrap();
    if let HomData::Gauge { x1, .. } = gauge_triple(&g, 7) {
        let data = HomData::Point { alpha: x1 };
        let cell = hom_to_cell(&g, &data).unwrap();
        assert!(level0.cell_is_mc(&cell).unwrap());
        assert_eq!(cell_to_hom(&g, &cell).unwrap(), data);
    }
}

#[test]
fn hom_correspondence_rejects_non_gauges() {
    let g = unshifted_fixture();
    if let HomData::Gauge { x0, x1, lambda } = gauge_triple(&g, 2) {
        let b = g.space.sym(g.space.index_of("b").unwrap());
        let bad = HomData::Gauge { x0, x1, lambda: &lambda + &Lin::basis(b) };
        assert!(matches!(hom_to_cell(&g, &bad), Err(Error::InvalidInput(_))));
    }
}

#[test]
fn cell_brackets_agree_between_routes() {
    for gens in [[("a", 0), ("b", -1)], [("a", 0), ("b", 0)], [("a", -1), ("b", -1)]] {
        let r = compare_cell_pipelines(&gens, 3, 3).unwrap();
        assert!(r.ok(), "{gens:?}: {r:?}");
        assert!(r.nonzero > 0);
    }
}

#[test]
fn paths_round_trip_through_json() {
    let fx = level1_fixture(4).unwrap();
    let v = path_to_json(&fx.space, &fx.path);
    assert_eq!(path_from_json(&fx.space, &v).unwrap(), fx.path);
}
