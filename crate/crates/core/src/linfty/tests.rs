use super::*;
use crate::freelie::lawrence_sullivan;
use crate::scalar::{frac, q};
use proptest::prelude::{prop_assert, proptest};

/// `u, a` of degree -1 and `c` of degree -2 with `[a,a] = c = du`.
fn toy_dgla() -> LieAlgebra {
    let space = GradedSpace::new([("a".into(), -1, 1), ("u".into(), -1, 2), ("c".into(), -2, 2)]).unwrap();
    let c = space.elt(2);
    let mut table = BTreeMap::new();
    table.insert((0, 0), c.clone());
    let diff = vec![Lin::zero(), c, Lin::zero()];
    LieAlgebra { space, diff, table }
}

fn abelian() -> SLInfty {
    let space = GradedSpace::new([("e".into(), 0, 1), ("f".into(), 1, 1)]).unwrap();
    SLInfty::new(space.syms().collect(), BTreeMap::new(), BTreeMap::new(), 3).unwrap()
}

fn suspended_free(cap: usize) -> (GradedSpace, SLInfty) {
    let g = free_nilpotent_lie(&[("x", -1), ("y", 0)], cap).unwrap();
    suspend_lie(&g).unwrap()
}

#[test]
fn abelian_passes() {
    let a = abelian();
    assert!(a.check(3).ok());
    let x = a.basis.iter().filter(|k| k.deg == 0).map(|k| (*k, q(3))).collect();
    assert!(mc_residual(&a, &x).unwrap().is_zero());
}

#[test]
fn suspended_free_lie_passes_and_corruption_fails() {
    let (_, sg) = suspended_free(3);
    let report = sg.check(3);
    assert!(report.ok(), "{:?}", report.violation);
    assert!(report.checked > 0);
    let mut bad = sg.clone();
    let key = bad.brackets.keys().next().unwrap().clone();
    let img = bad.brackets[&key].clone();
    bad.brackets.insert(key, -img);
    let report = bad.check(3);
    assert!(report.violation.unwrap().starts_with("arity 3"));
}

#[test]
fn mc_sets_correspond_under_suspension() {
    let g = toy_dgla();
    assert!(g.check());
    let (_, sg) = suspend_lie(&g).unwrap();
    assert!(sg.check(3).ok());
    // x = a - u/2 solves dx + [x,x]/2 = 0 in g
    let x: Vector = [(sg.basis[0], q(1)), (sg.basis[1], frac(-1, 2))].into_iter().collect();
    assert!(mc_residual(&sg, &x).unwrap().is_zero());
    let y: Vector = [(sg.basis[0], q(1))].into_iter().collect();
    assert!(!mc_residual(&sg, &y).unwrap().is_zero());
    let odd = Lin::basis(Sym { idx: 0, deg: 1, wt: 1 });
    assert!(mc_residual(&sg, &odd).is_err());
}

#[test]
fn twisting() {
    let (_, sg) = suspend_lie(&toy_dgla()).unwrap();
    let zero = twist(&sg, &Lin::zero()).unwrap();
    assert_eq!(SLInfty::tabulate(&zero, &sg.basis, 3), SLInfty::tabulate(&sg, &sg.basis, 3));
    let x: Vector = [(sg.basis[0], q(1)), (sg.basis[1], frac(-1, 2))].into_iter().collect();
    let tw = twist(&sg, &x).unwrap();
    for k in &sg.basis {
        assert!(d(&tw, &tw.differential(k)).is_zero());
    }
    assert!(check_relations(&tw, &sg.basis, 3).ok());
    assert!(tw.differential(&sg.basis[0]) != sg.differential(&sg.basis[0]));
    let y: Vector = [(sg.basis[0], q(1))].into_iter().collect();
    assert!(matches!(twist(&sg, &y), Err(Error::Precondition(_))));
    let ab = abelian();
    let e = Lin::basis(ab.basis[0]);
    assert_eq!(SLInfty::tabulate(&twist(&ab, &e).unwrap(), &ab.basis, 3), ab);
}

#[test]
fn gauge_flow_matches_closed_form() {
    let cap = 4;
    let (alg, deriv) = lawrence_sullivan(cap).unwrap();
    let g = lie_from_free(&alg, Some(&deriv)).unwrap();
    let (s, sg) = suspend_lie(&g).unwrap();
    assert!(sg.check(3).ok());
    let coords = |v: &TensorElt| s.reindex(&lie_coords(&g, &alg, v).unwrap());
    let x0 = coords(&alg.gen(0));
    let lambda = coords(&alg.gen(2));
    assert!(mc_residual(&sg, &x0).unwrap().is_zero());
    assert_eq!(gauge_flow(&sg, &Lin::zero(), &x0).unwrap(), x0);
    // the shifted flow along sλ is the unshifted flow along -λ
    let flowed = gauge_flow(&sg, &-lambda.clone(), &x0).unwrap();
    assert_eq!(flowed, coords(&alg.gen(1)));
    let mu = coords(&alg.bracket(&alg.gen(2), &alg.bracket(&alg.gen(2), &alg.gen(0))));
    let mu = (&lambda + &mu).filter(|k| k.deg == 1);
    let closed = alg.gauge_closed_form(&alg.gen(2), &alg.gen(0), &deriv, &q(1)).unwrap();
    assert_eq!(gauge_flow(&sg, &-lambda, &x0).unwrap(), coords(&closed));
    let moved = gauge_flow(&sg, &mu, &x0).unwrap();
    assert!(mc_residual(&sg, &moved).unwrap().is_zero());
}

#[test]
fn gauge_flow_rejects_bad_input() {
    let (_, sg) = suspend_lie(&toy_dgla()).unwrap();
    let y: Vector = [(sg.basis[0], q(1))].into_iter().collect();
    assert!(matches!(gauge_flow(&sg, &Lin::zero(), &y), Err(Error::Precondition(_))));
    assert!(gauge_flow(&sg, &y, &Lin::zero()).is_err());
}

#[test]
fn json_round_trip() {
    let (space, sg) = suspended_free(3);
    let v = sg.to_json(&space);
    let (space2, back) = SLInfty::from_json(&v).unwrap();
    assert_eq!(space2, space);
    assert_eq!(back, sg);
}

fn sample_morphisms(seed: u64) -> (SLInfty, InfMorphism<Sym, Sym>, InfMorphism<Sym, Sym>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let space = GradedSpace::new((0..4).map(|i| (format!("e{i}"), 0, 1 + i as u32 / 2))).unwrap();
    let basis: Vec<Sym> = space.syms().collect();
    let alg = SLInfty::new(basis.clone(), BTreeMap::new(), BTreeMap::new(), 3).unwrap();
    let random_table = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut tables = Vec::new();
        for n in 1..=3 {
            let mut t = BTreeMap::new();
            for tuple in sorted_tuples(&basis, n, 2) {
                let w = weight_of(&tuple);
                let img: Vector = basis
                    .iter()
                    .filter(|k| k.wt >= w && (n > 1 || k.wt == w))
                    .map(|k| (*k, q(rng.gen_range(-2..3))))
                    .collect();
                t.insert(tuple, img);
            }
            tables.push(t);
        }
        InfMorphism::from_tables(tables)
    };
    let phi = random_table(&mut rng);
    let psi = random_table(&mut rng);
    (alg, phi, psi)
}

#[test]
fn strict_and_identity_pushforward() {
    let (alg, _, _) = sample_morphisms(1);
    let id: InfMorphism<Sym, Sym> = InfMorphism::strict(|k| Lin::basis(*k));
    let x: Vector = alg.basis.iter().map(|k| (*k, q(k.idx as i64 + 1))).collect();
    assert_eq!(id.mc_pushforward(&x, 2), x);
    let double = InfMorphism::strict(|k: &Sym| Lin::term(*k, q(2)));
    assert_eq!(double.mc_pushforward(&x, 2), x.scale(&q(2)));
    assert!(check_inf_morphism(&alg, &alg, &id, &alg.basis, 3).ok());
}

proptest! {
    #[test]
    fn pushforward_is_functorial(seed in 0u64..20) {
        let (alg, phi, psi) = sample_morphisms(seed);
        let x: Vector = alg.basis.iter().map(|k| (*k, q(seed as i64 % 3 + k.idx as i64))).collect();
        let composite = compose_inf(&psi, &phi, 2);
        let lhs = psi.mc_pushforward(&phi.mc_pushforward(&x, 2), 2);
        prop_assert!(lhs == composite.mc_pushforward(&x, 2));
        let id: InfMorphism<Sym, Sym> = InfMorphism::strict(|k| Lin::basis(*k));
        prop_assert!(compose_inf(&id, &phi, 3).mc_pushforward(&x, 2) == phi.mc_pushforward(&x, 2));
    }

    #[test]
    fn twisted_morphism_shifts_basepoint(seed in 0u64..20) {
        let (alg, phi, _) = sample_morphisms(seed);
        let alpha: Vector = [(alg.basis[0], q(1))].into_iter().collect();
        let beta: Vector = [(alg.basis[1], q(-1)), (alg.basis[2], q(2))].into_iter().collect();
        let lhs = &phi.twist(&alpha).mc_pushforward(&beta, 2) + &phi.mc_pushforward(&alpha, 2);
        let rhs = phi.mc_pushforward(&(&alpha + &beta), 2);
        prop_assert!(lhs == rhs);
        prop_assert!(phi.twist(&Lin::zero()).mc_pushforward(&beta, 2) == phi.mc_pushforward(&beta, 2));
    }
}

#[test]
fn weighted_free_lie_quotient() {
    let alg = FreeAlg::new(&[("c", -1), ("w", -1), ("v", -1)], 3).unwrap();
    let cc = alg.bracket(&alg.gen(0), &alg.gen(0));
    let wc = alg.bracket(&alg.gen(1), &alg.gen(0));
    let deriv = LieDerivation { images: vec![Lin::zero(), cc, wc] };
    let g = lie_from_free_weighted(&alg, Some(&deriv), &[1, 2, 3], 3).unwrap();
    // c, w, v, [c,c], [c,w]; [c,[c,c]] vanishes and [c,v] has weight 4
    assert_eq!(g.space.dim(), 5);
    assert_eq!(g.space.max_weight(), 3);
    assert!(g.check());
    assert!(suspend_lie(&g).is_ok());
    let skewed = LieDerivation { images: vec![Lin::zero(), Lin::zero(), alg.gen(0)] };
    assert!(lie_from_free_weighted(&alg, Some(&skewed), &[1, 2, 3], 3).is_err());
    assert!(lie_from_free_weighted(&alg, None, &[1, 0, 3], 3).is_err());
}
