use super::*;
use crate::freelie::{FreeAlg, LieDerivation};
use crate::htt::{check_ainf, check_ainf_morphism};
use crate::linfty::{check_relations, gauge_flow, lie_from_free, suspend_lie, LieAlgebra, SLInfty, TensorSL};
use crate::scalar::q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn xy(x: u32, y: bool) -> XY {
    XY { x, y }
}

#[test]
fn an_contraction_rules() {
    let (alg, c) = build_an(2, 3).unwrap();
    assert_eq!((c.h)(&xy(2, false)), Lin::basis(xy(0, true)));
    assert!((c.h)(&xy(1, false)).is_zero());
    for z in &c.small_basis {
        assert_eq!(c.proj(&(c.i)(z)), Lin::basis(*z));
    }
    for a in 0..4 {
        assert_eq!(alg.d_key(&xy(a, true)), Lin::basis(xy(a + 2, false)));
    }
}

#[test]
fn an_transfer_is_truncated_polynomial_algebra() {
    for n in 2..=3 {
        let (big, c) = build_an(n, 4).unwrap();
        let t = transfer_ainfty(&big, &c, 4).unwrap();
        for a in 1..n {
            for b in 1..n {
                let want = if a + b < n { Lin::basis(Z(a + b)) } else { Lin::zero() };
                assert_eq!(t.small.op(&[Z(a), Z(b)]), want);
                let i2 = if a + b >= n { Lin::basis(xy(a + b - n, true)) } else { Lin::zero() };
                assert_eq!(t.i_inf.component(&[Z(a), Z(b)]), i2);
            }
        }
        assert!(t.small.ops.keys().all(|k| k.len() == 2));
        assert!(t.i_inf.higher[1..].iter().all(BTreeMap::is_empty));
        assert!(check_ainf(&t.small, &c.small_basis, 4).ok());
        assert!(check_ainf(&big, &big.exact_keys()[..4], 3).ok());
        let r = check_ainf_morphism(&t.small, &big, &t.i_inf, &c.small_basis, 4);
        assert!(r.ok(), "{r:?}");
    }
}

#[test]
fn coalgebra_v_matches_displayed_terms() {
    let four = coalgebra_v(4);
    assert_eq!(four.len(), 3);
    assert!(four.contains(&(q(-1), NsOp::Co(2), vec![1, 2])));
    assert!(four.contains(&(q(1), NsOp::Co(2), vec![2, 1])));
    let five = coalgebra_v(5);
    assert!(five.contains(&(q(1), NsOp::Co(3), vec![1, 1, 1])));
    assert_eq!(phi_v(4, true).len(), 8);
}

#[test]
fn counterexample_composites() {
    let (first, second) = counterexample_run().unwrap();
    assert_eq!(first, Lin::term(xy(3, false), q(-1)));
    assert!(second.is_zero());
    assert_eq!(show_poly(&first), "-x^3");
    assert_eq!(show_poly(&second), "0");
}

#[test]
fn composites_agree_for_strict_data() {
    let (big, c) = build_an(2, 3).unwrap();
    let t = transfer_ainfty(&big, &c, 3).unwrap();
    for at in 3..=6 {
        let (a, b) = composites(&t, &big, false, false, at);
        assert_eq!(a, b, "v_{at}");
    }
}

fn heisenberg() -> (GradedSpace, SLInfty) {
    let alg = FreeAlg::new(&[("x", 0), ("y", 0)], 2).unwrap();
    let g = lie_from_free(&alg, None).unwrap();
    suspend_lie(&g).unwrap()
}

fn toy_target() -> (GradedSpace, SLInfty) {
    let space = GradedSpace::new([("u".into(), 0, 1), ("v".into(), 0, 1), ("w".into(), -1, 3)]).unwrap();
    let (u, v, w) = (space.sym(0), space.sym(1), space.sym(2));
    let mut brackets = BTreeMap::new();
    brackets.insert(vec![u, v], Lin::basis(w));
    brackets.insert(vec![u, u, u], Lin::basis(w));
    let alg = SLInfty::new(space.syms().collect(), BTreeMap::new(), brackets, 3).unwrap();
    assert!(alg.check(4).ok());
    (space, alg)
}

#[test]
fn conv_bracket_is_pointwise_lie_bracket() {
    let coalg = CocomCoalg::truncated_poly_dual(2).unwrap();
    let fa = FreeAlg::new(&[("x", -1), ("y", 0)], 3).unwrap();
    let g = lie_from_free(&fa, None).unwrap();
    let (sp, sg) = suspend_lie(&g).unwrap();
    let conv = Conv::new(&coalg, &sg, &sp);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let mut rand_map = |deg: i64| -> GMap {
            let images = coalg
                .space
                .syms()
                .map(|c| sp.syms().filter(|a| a.deg == c.deg + deg).map(|a| (a, q(rng.gen_range(-2..=2)))).collect())
                .collect();
            GMap::new(coalg.space.clone(), sp.clone(), deg, images).unwrap()
        };
        let (f, h) = (rand_map(0), rand_map(1));
        let got = conv_bracket(&conv, &[&f, &h]).unwrap();
        // oracle: [f, h](c_2) = ℓ_2(f(c_1), h(c_1)), zero on c_1
        assert!(got.image(0).is_zero());
        let want = ell(&sg, &[f.image(0), h.image(0)]);
        assert_eq!(got.image(1), &want);
    }
    assert!(conv_bracket(&conv, &[&GMap::zero(coalg.space.clone(), sp.clone(), 0); 3]).is_err());
}

#[test]
fn conv_into_abelian_is_abelian() {
    let coalg = CocomCoalg::truncated_poly_dual(3).unwrap();
    let space = GradedSpace::new([("a".into(), 0, 0), ("b".into(), -1, 0)]).unwrap();
    let (sp, ab) = suspend_lie(&LieAlgebra::abelian(space)).unwrap();
    let conv = Conv::new(&coalg, &ab, &sp);
    let f = GMap::new(coalg.space.clone(), sp.clone(), 1, vec![sp.elt(0), sp.elt(0), Lin::zero()]).unwrap();
    assert!(conv_bracket(&conv, &[&f, &f]).unwrap().is_zero());
}

#[test]
fn conv_structures_satisfy_relations() {
    let coalg = CocomCoalg::truncated_poly_dual(3).unwrap();
    let (sp, sg) = heisenberg();
    let conv = Conv::new(&coalg, &sg, &sp);
    assert!(check_relations(&conv, &conv.basis(), 4).ok());
    let (tp, toy) = toy_target();
    let conv = Conv::new(&coalg, &toy, &tp);
    let r = check_relations(&conv, &conv.basis(), 4);
    assert!(r.ok(), "{r:?}");
}

#[test]
fn mc_and_twisting_residuals_agree_on_random_maps() {
    let coalg = CocomCoalg::truncated_poly_dual(3).unwrap();
    let (tp, toy) = toy_target();
    let conv = Conv::new(&coalg, &toy, &tp);
    let zero = GMap::zero(coalg.space.clone(), tp.clone(), 0);
    let r = mc_equals_tw(&conv, &zero).unwrap();
    assert!(r.equal && r.residual_mc.is_zero());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let images = coalg
            .space
            .syms()
            .map(|_| tp.syms().filter(|a| a.deg == 0).map(|a| (a, q(rng.gen_range(-3..=3)))).collect())
            .collect();
        let phi = GMap::new(coalg.space.clone(), tp.clone(), 0, images).unwrap();
        let r = mc_equals_tw(&conv, &phi).unwrap();
        assert!(r.equal, "{r:?}");
    }
}

#[test]
fn gauge_orbit_gives_twisting_morphism() {
    let fa = FreeAlg::new(&[("a", -1), ("b", 0)], 3).unwrap();
    let deriv = LieDerivation { images: vec![Lin::zero(), fa.gen(0)] };
    let g = lie_from_free(&fa, Some(&deriv)).unwrap();
    let (sp, sg) = suspend_lie(&g).unwrap();
    let m = 4;
    let ring = TruncPoly { m };
    let big = TensorSL { g: &sg, a: &ring };
    let sb = sp.sym(sp.index_of("b").unwrap());
    let lambda: Lin<(Sym, TPow)> = [((sb, TPow(1)), q(1)), ((sb, TPow(2)), q(2))].into_iter().collect();
    let x = gauge_flow(&big, &lambda, &Lin::zero()).unwrap();
    assert!(!x.is_zero());
    let coalg = CocomCoalg::truncated_poly_dual(m).unwrap();
    let phi = series_to_hom(&coalg, &sp, &x).unwrap();
    let conv = Conv::new(&coalg, &sg, &sp);
    let r = mc_equals_tw(&conv, &phi).unwrap();
    assert!(r.equal && r.residual_tw.is_zero(), "{r:?}");
}

#[test]
fn coalgebra_validation() {
    let space = GradedSpace::new([("c1".into(), 0, 1), ("c2".into(), 0, 2)]).unwrap();
    let diff = GMap::zero(space.clone(), space.clone(), -1);
    let bad = vec![Lin::zero(), Lin::basis((space.sym(0), space.sym(1)))];
    assert!(CocomCoalg::new(space, diff, bad).is_err());
    let c = CocomCoalg::truncated_poly_dual(4).unwrap();
    assert_eq!(c.depth(), 4);
    assert_eq!(c.coop(4, 3).unwrap(), &Lin::basis(vec![c.space.sym(0); 4]));
}
