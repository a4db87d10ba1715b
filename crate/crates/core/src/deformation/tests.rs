use super::*;
use proptest::prelude::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Q> {
    (0..dim).map(|_| small_coeff(rng)).collect()
}

fn refs(v: &[Vec<Q>]) -> Vec<&[Q]> {
    v.iter().map(Vec::as_slice).collect()
}

/// `f(x_1, …, g(x_i, …), …)` evaluated on vectors.
fn eval_insert(f: &Cochain, i: usize, g: &Cochain, xs: &[Vec<Q>]) -> Vec<Q> {
    let m = g.arity();
    let inner = g.apply(&refs(&xs[i..i + m]));
    let mut args: Vec<&[Q]> = refs(&xs[..i]);
    args.push(&inner);
    args.extend(refs(&xs[i + m..]));
    f.apply(&args)
}

fn vsum(terms: impl IntoIterator<Item = (Q, Vec<Q>)>, dim: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); dim];
    for (c, v) in terms {
        add_scaled(&mut out, &v, &c);
    }
    out
}

/// Gerstenhaber bracket by direct evaluation.
fn bracket_oracle(f: &Cochain, g: &Cochain, xs: &[Vec<Q>]) -> Vec<Q> {
    let (n, m) = (f.arity() as i64, g.arity() as i64);
    let dim = f.dim();
    let fg = (0..f.arity()).map(|i| (parity_sign((i as i64 * (m - 1)).rem_euclid(2) == 1), eval_insert(f, i, g, xs)));
    let sign = -parity_sign(((n - 1) * (m - 1)).rem_euclid(2) == 1);
    let gf = (0..g.arity()).map(|j| (&sign * parity_sign((j as i64 * (n - 1)).rem_euclid(2) == 1), eval_insert(g, j, f, xs)));
    vsum(fg.chain(gf).collect::<Vec<_>>(), dim)
}

#[test]
fn bracket_of_a_product_with_itself_is_twice_the_associator() {
    let mut r = rng(1);
    for _ in 0..10 {
        let m = random_cochain(&mut r, 3, 2, 0.5);
        assert_eq!(gerstenhaber(&m, &m).unwrap(), associator(&m).unwrap().scale(&q(2)));
    }
}

#[test]
fn bracket_matches_direct_evaluation_and_is_graded_antisymmetric() {
    let mut r = rng(2);
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (0, 2), (2, 0), (3, 1)] {
        let dim = 2;
        let f = random_cochain(&mut r, dim, n, 0.5);
        let g = random_cochain(&mut r, dim, m, 0.5);
        let fg = gerstenhaber(&f, &g).unwrap();
        let gf = gerstenhaber(&g, &f).unwrap();
        let odd = (f.degree() * g.degree()).rem_euclid(2) == 1;
        assert_eq!(fg, -&gf.scale(&parity_sign(odd)), "arities {n}, {m}");
        for _ in 0..3 {
            let xs: Vec<Vec<Q>> = (0..fg.arity()).map(|_| random_vec(&mut r, dim)).collect();
            assert_eq!(fg.apply(&refs(&xs)), bracket_oracle(&f, &g, &xs), "arities {n}, {m}");
        }
    }
}

#[test]
fn arity_one_bracket_is_pre_and_post_composition() {
    let mut r = rng(3);
    let f = random_cochain(&mut r, 3, 2, 0.6);
    let g = random_cochain(&mut r, 3, 1, 0.6);
    let expected = &(&insert(&f, 0, &g) + &insert(&f, 1, &g)) - &insert(&g, 0, &f);
    assert_eq!(gerstenhaber(&f, &g).unwrap(), expected);
}

#[test]
fn gerstenhaber_jacobi_on_samples() {
    let mut r = rng(4);
    for (a, b, c) in [(1, 2, 2), (2, 2, 2), (1, 1, 2), (2, 3, 1)] {
        let f = random_cochain(&mut r, 2, a, 0.5);
        let g = random_cochain(&mut r, 2, b, 0.5);
        let h = random_cochain(&mut r, 2, c, 0.5);
        let br = |x: &Cochain, y: &Cochain| gerstenhaber(x, y).unwrap();
        let sign = |x: &Cochain, y: &Cochain| parity_sign((x.degree() * y.degree()).rem_euclid(2) == 1);
        // [f,[g,h]] = [[f,g],h] + (-1)^{|f||g|} [g,[f,h]]
        let lhs = br(&f, &br(&g, &h));
        let rhs = &br(&br(&f, &g), &h) + &br(&g, &br(&f, &h)).scale(&sign(&f, &g));
        assert_eq!(lhs, rhs, "arities {a}, {b}, {c}");
    }
}

/// Hochschild differential by direct evaluation of the displayed sum.
fn hoch_oracle(m: &Cochain, f: &Cochain, xs: &[Vec<Q>]) -> Vec<Q> {
    let n = f.arity();
    let dim = m.dim();
    let mut terms = vec![(Q::one(), eval_insert(m, 1, f, xs))];
    for k in 1..=n {
        terms.push((parity_sign(k % 2 == 1), eval_insert(f, k - 1, m, xs)));
    }
    terms.push((parity_sign((n + 1) % 2 == 1), eval_insert(m, 0, f, xs)));
    vsum(terms, dim)
}

#[test]
fn hochschild_differential_matches_direct_evaluation() {
    let mut r = rng(5);
    let m = random_associative(&mut r);
    for n in 0..=3 {
        let f = random_cochain(&mut r, m.dim(), n, 0.5);
        let d = hoch_differential(&m, &f).unwrap();
        for _ in 0..3 {
            let xs: Vec<Vec<Q>> = (0..=n).map(|_| random_vec(&mut r, m.dim())).collect();
            assert_eq!(d.apply(&refs(&xs)), hoch_oracle(&m, &f, &xs), "arity {n}");
        }
    }
}

#[test]
fn hochschild_differential_is_the_adjoint_of_m_up_to_sign() {
    let mut r = rng(6);
    for _ in 0..5 {
        let m = random_associative(&mut r);
        for n in 0..=3 {
            let f = random_cochain(&mut r, m.dim(), n, 0.5);
            let ad = gerstenhaber(&m, &f).unwrap().scale(&parity_sign(n % 2 == 0));
            assert_eq!(hoch_differential(&m, &f).unwrap(), ad, "arity {n}");
        }
    }
}

#[test]
fn hochschild_differential_squares_to_zero() {
    let mut r = rng(7);
    for _ in 0..6 {
        let m = random_associative(&mut r);
        for n in 0..=2 {
            let f = random_cochain(&mut r, m.dim(), n, 0.6);
            let dd = hoch_differential(&m, &hoch_differential(&m, &f).unwrap()).unwrap();
            assert!(dd.is_zero(), "arity {n}");
        }
    }
    // fails for a non-associative product
    let bad = random_cochain(&mut r, 2, 2, 0.8);
    assert!(!is_mc_associative(&bad).unwrap().direct);
    let f = Cochain::unit(2, 1, 1);
    let any_nonzero = (0..4).any(|k| {
        let f = &f + &Cochain::unit(2, 1, k);
        !hoch_differential(&bad, &hoch_differential(&bad, &f).unwrap()).unwrap().is_zero()
    });
    assert!(any_nonzero);
}

#[test]
fn matrix_algebras_are_maurer_cartan() {
    let (_, upper) = associative_catalog().into_iter().find(|(n, _)| n.starts_with("upper")).unwrap();
    let check = is_mc_associative(&upper).unwrap();
    assert!(check.holds());
    // 2×2 matrices
    let mat = Cochain::from_fn(4, 2, |t| {
        let ((i, j), (k, l)) = ((t[0] / 2, t[0] % 2), (t[1] / 2, t[1] % 2));
        let mut v = vec![Q::zero(); 4];
        if j == k {
            v[2 * i + l] = Q::one();
        }
        v
    });
    assert!(is_mc_associative(&mat).unwrap().holds());
}

#[test]
fn non_associative_products_fail_both_checks_with_proportional_residuals() {
    let mut r = rng(8);
    let mut seen = 0;
    for _ in 0..20 {
        let m = random_cochain(&mut r, 3, 2, 0.5);
        let check = is_mc_associative(&m).unwrap();
        assert!(check.agree());
        if !check.direct {
            seen += 1;
            let half = Q::new(1.into(), 2.into());
            assert_eq!(gerstenhaber(&m, &m).unwrap().scale(&half), associator(&m).unwrap());
        }
    }
    assert!(seen > 10);
}

#[test]
fn fuzzed_products_mc_iff_associative() {
    let maps = fuzzed_bilinear(12, 50);
    assert!(maps.iter().all(|m| m.dim() <= 3));
    let checks: Vec<McCheck> = maps.iter().map(|m| is_mc_associative(m).unwrap()).collect();
    assert!(checks.iter().all(McCheck::agree));
    let associative = checks.iter().filter(|c| c.holds()).count();
    assert!(associative >= 20 && associative < 50, "{associative}");
}

#[test]
fn infinitesimal_deformations() {
    let mut r = rng(9);
    for _ in 0..5 {
        let m = random_associative(&mut r);
        let g = random_cochain(&mut r, m.dim(), 1, 0.6);
        let f = trivial_deformation(&m, &g).unwrap();
        assert!(infinitesimal_deformation_check(&m, &f).unwrap());
        assert_eq!(f, -&hoch_differential(&m, &g).unwrap());
        assert!(infinitesimal_deformation_check(&m, &Cochain::zero(m.dim(), 2)).unwrap());
        // first-order associativity of m + εf: the ε-coefficient of the associator
        let eps = &(&(&insert(&f, 0, &m) - &insert(&f, 1, &m)) + &insert(&m, 0, &f)) - &insert(&m, 1, &f);
        assert!(eps.is_zero());
    }
    let bad = structure(2, |a, b| vec![((a + b) % 2, 1 + a as i64)]);
    assert!(matches!(infinitesimal_deformation_check(&bad, &Cochain::zero(2, 2)), Err(Error::Precondition(_))));
}

/// Cocycles by solving the first-order associativity equations, coboundaries
/// spanned by the trivial deformations of the basis endomorphisms.
fn deformation_space_oracle(m: &Cochain) -> usize {
    let dim = m.dim();
    let n_vars = dim.pow(3);
    let first_order = |f: &Cochain| {
        &(&(&insert(f, 0, m) - &insert(f, 1, m)) + &insert(m, 0, f)) - &insert(m, 1, f)
    };
    let cols: Vec<Vec<Q>> = (0..n_vars).map(|k| first_order(&Cochain::unit(dim, 2, k)).coeffs().to_vec()).collect();
    let eqs = Matrix::from_cols(dim.pow(4), &cols);
    let cocycles = eqs.kernel().len();
    let trivial: Vec<Vec<Q>> = (0..dim * dim).map(|k| trivial_deformation(m, &Cochain::unit(dim, 1, k)).unwrap().coeffs().to_vec()).collect();
    cocycles - Matrix::from_cols(n_vars, &trivial).rank()
}

#[test]
fn dual_numbers_have_one_dimensional_second_cohomology() {
    let (_, dual) = associative_catalog().into_iter().find(|(n, _)| *n == "k[x]/(x^2)").unwrap();
    assert_eq!(deformation_space_oracle(&dual), 1);
    assert_eq!(hochschild_cohomology_dim(&dual, 2).unwrap(), 1);
    assert_eq!(hochschild_cohomology_dim(&dual, 1).unwrap(), 1);
    assert_eq!(hochschild_cohomology_dim(&dual, 0).unwrap(), 2);
    let mut r = rng(10);
    for _ in 0..4 {
        let m = random_associative(&mut r);
        assert_eq!(hochschild_cohomology_dim(&m, 2).unwrap(), deformation_space_oracle(&m));
    }
}

#[test]
fn leibniz_rule_for_the_hochschild_differential() {
    let mut r = rng(11);
    let m = random_associative(&mut r);
    let d = |f: &Cochain| hoch_differential(&m, f).unwrap().scale(&parity_sign(f.arity() % 2 == 0));
    for (a, b) in [(1, 1), (1, 2), (2, 2), (2, 1)] {
        let f = random_cochain(&mut r, m.dim(), a, 0.5);
        let g = random_cochain(&mut r, m.dim(), b, 0.5);
        let lhs = d(&gerstenhaber(&f, &g).unwrap());
        let rhs = &gerstenhaber(&d(&f), &g).unwrap() + &gerstenhaber(&f, &d(&g)).unwrap().scale(&parity_sign(f.degree().rem_euclid(2) == 1));
        assert_eq!(lhs, rhs, "arities {a}, {b}");
    }
}

// ---------------------------------------------------------------------------
// Chevalley–Eilenberg

/// Displayed CE differential on vectors, with `x_0, …, x_n` 0-based.
fn ce_oracle(b: &Cochain, f: &Cochain, xs: &[Vec<Q>]) -> Vec<Q> {
    let n = f.arity();
    let mut terms = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let bij = b.apply(&[&xs[i], &xs[j]]);
            let mut args: Vec<&[Q]> = vec![&bij];
            args.extend((0..=n).filter(|&k| k != i && k != j).map(|k| xs[k].as_slice()));
            terms.push((parity_sign((i + j) % 2 == 1), f.apply(&args)));
        }
    }
    for k in 0..=n {
        let rest: Vec<&[Q]> = (0..=n).filter(|&l| l != k).map(|l| xs[l].as_slice()).collect();
        let fx = f.apply(&rest);
        terms.push((parity_sign(k % 2 == 1), b.apply(&[&xs[k], &fx])));
    }
    vsum(terms, b.dim())
}

#[test]
fn catalog_lie_algebras_satisfy_jacobi() {
    for (name, b) in lie_catalog() {
        assert!(is_alternating(&b), "{name}");
        assert!(is_mc_lie(&b).unwrap().holds(), "{name}");
    }
}

#[test]
fn ce_differential_matches_direct_evaluation_and_squares_to_zero() {
    let mut r = rng(12);
    for _ in 0..6 {
        let b = random_lie(&mut r);
        for n in 0..=2 {
            let f = random_alternating(&mut r, b.dim(), n);
            let d = chevalley_eilenberg(&b, &f).unwrap();
            assert!(is_alternating(&d), "arity {n}");
            let xs: Vec<Vec<Q>> = (0..=n).map(|_| random_vec(&mut r, b.dim())).collect();
            assert_eq!(d.apply(&refs(&xs)), ce_oracle(&b, &f, &xs), "arity {n}");
            if n <= 1 {
                assert!(chevalley_eilenberg(&b, &d).unwrap().is_zero(), "arity {n}");
            }
        }
    }
}

#[test]
fn ce_differential_vanishes_for_abelian_algebras() {
    let mut r = rng(13);
    let b = Cochain::zero(3, 2);
    for n in 0..=2 {
        let f = random_alternating(&mut r, 3, n);
        assert!(chevalley_eilenberg(&b, &f).unwrap().is_zero());
    }
}

#[test]
fn ce_differential_is_the_adjoint_of_the_bracket_up_to_sign() {
    let mut r = rng(14);
    for _ in 0..4 {
        let b = random_lie(&mut r);
        for n in 0..=2 {
            let f = random_alternating(&mut r, b.dim(), n);
            let ad = ce_bracket(&b, &f).unwrap();
            let d = chevalley_eilenberg(&b, &f).unwrap();
            assert_eq!(d, ad.scale(&parity_sign(n % 2 == 0)), "arity {n}");
        }
    }
}

#[test]
fn ce_bracket_of_an_antisymmetric_map_is_twice_the_jacobiator() {
    let mut r = rng(15);
    let mut violations = 0;
    for _ in 0..10 {
        let b = random_alternating(&mut r, 3, 2);
        assert_eq!(ce_bracket(&b, &b).unwrap(), jacobiator(&b).unwrap().scale(&q(2)));
        let check = is_mc_lie(&b).unwrap();
        assert!(check.agree());
        violations += usize::from(!check.direct);
    }
    assert!(violations > 0);
    let not_lie = random_alternating(&mut r, 3, 2);
    if !jacobiator(&not_lie).unwrap().is_zero() {
        assert!(matches!(chevalley_eilenberg(&not_lie, &Cochain::zero(3, 1)), Err(Error::Precondition(_))));
    }
}

#[test]
fn ce_cohomology_of_small_lie_algebras() {
    let catalog: std::collections::BTreeMap<_, _> = lie_catalog().into_iter().collect();
    // semisimple: H^1 = H^2 = 0, and the center H^0 vanishes
    for n in 0..=2 {
        assert_eq!(ce_cohomology_dim(&catalog["sl2"], n).unwrap(), 0, "sl2 arity {n}");
    }
    assert_eq!(ce_cohomology_dim(&catalog["heisenberg"], 0).unwrap(), 1);
    assert_eq!(ce_cohomology_dim(&catalog["abelian-2"], 1).unwrap(), 4);
}

#[test]
fn json_round_trip() {
    let mut r = rng(16);
    let m = random_cochain(&mut r, 3, 2, 0.5);
    let f = random_cochain(&mut r, 3, 2, 0.5);
    let v = json!({"dim": 3, "m": cochain_to_json(&m), "f": cochain_to_json(&f)});
    let (m2, f2) = algebra_from_json(&v).unwrap();
    assert_eq!((m2, f2), (m, Some(f)));
    assert!(algebra_from_json(&json!({"dim": 2, "m": [[0, 0, 5, "1"]]})).is_err());
    assert!(algebra_from_json(&json!({"m": []})).is_err());
}

fn arb_product() -> impl Strategy<Value = Cochain> {
    (1usize..=3, any::<u64>()).prop_map(|(dim, seed)| {
        let mut r = rng(seed);
        if seed % 2 == 0 {
            random_associative(&mut r)
        } else {
            random_cochain(&mut r, dim, 2, 0.4)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn mc_equation_iff_associative(m in arb_product()) {
        let check = is_mc_associative(&m).unwrap();
        prop_assert!(check.agree());
    }

    #[test]
    fn coboundaries_are_cocycles(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_associative(&mut r);
        let arity = (seed % 3) as usize;
        let f = random_cochain(&mut r, m.dim(), arity, 0.5);
        let df = hoch_differential(&m, &f).unwrap();
        prop_assert!(hoch_differential(&m, &df).unwrap().is_zero());
    }
}
