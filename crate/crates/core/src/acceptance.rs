//! End-to-end acceptance checks. Every check is exact; the only tolerances
//! are the wall-clock budgets below.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::convolution::{build_an, counterexample_run, show_poly, Z};
use crate::deformation::{
    chevalley_eilenberg, fuzzed_bilinear, hoch_differential, infinitesimal_deformation_check, is_mc_associative, random_alternating,
    random_associative, random_cochain, random_lie, trivial_deformation,
};
use crate::dupont::{verify_contraction, Simplex};
use crate::error::{Error, Result};
use crate::freelie::{lawrence_sullivan, FreeAlg, LieDerivation, TensorElt, Word};
use crate::graded::{GMap, GradedSpace, Sym, Vector};
use crate::htt::{
    check_ainf, check_ainf_morphism, check_multicomplex, AInf, homology_contraction, homology_contraction_weights,
    random_bicomplex, transfer_ainfty, transfer_multicomplex, transfer_slinfty, Bicomplex, TransferredMulticomplex,
};
use crate::lin::Lin;
use crate::linalg::Matrix;
use crate::linfty::{
    check_inf_morphism, compose_inf, free_nilpotent_lie, gauge_flow, is_mc, lie_from_free, lie_from_free_weighted, sorted_tuples, suspend_lie, InfMorphism,
    SLInf, SLInfty,
};
use crate::mcspace::{build_mcinf1, compare_cell_pipelines, level1_fixture, random_vector, rect_report, Level};
use crate::scalar::{frac, q, Q};
use crate::solvers::fixtures::OdeFixture;
use crate::solvers::{eval_poly, ode_residual, solve_ode_recursive, solve_ode_trees, OdeOp, FODE};

/// Wall-clock budget of the Dupont check.
pub const DUPONT_BUDGET: Duration = Duration::from_secs(60);
/// Wall-clock budget of the deformation check.
pub const DEFORMATION_BUDGET: Duration = Duration::from_secs(60);

pub const TITLES: [&str; 14] = [
    "Dupont contraction identities, n ≤ 3, degree ≤ 6",
    "Whitney forms: d formula and unit integrals, n ≤ 3",
    "BCH: low weights, adjoint exponential identity, primitivity",
    "Lawrence–Sullivan: closed-form gauge and d² = 0, weight ≤ 6",
    "Non-bifunctor composites: -x^3 and 0",
    "Transfer on A^2, A^3: truncated polynomial algebra",
    "Relation checker on every transferred structure, arity ≤ 4",
    "Solvers: tree sums equal recursion, Lie gauge closed form",
    "mc∞_1: fixed point equals tree sum, strict part is Lawrence–Sullivan",
    "Cell brackets: tree transfer equals convolution pipeline",
    "Rectification on level-1 fixtures",
    "Deformation complexes",
    "MC functoriality on composable ∞-morphism pairs",
    "Multicomplex: transferred Δ_1 equals the induced map on homology",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("[{tag}] {:>2}. {} ({}; {:.1}s)", self.id, self.title, self.detail, self.elapsed.as_secs_f64())
    }
}

type Check = Result<(bool, String)>;

pub fn run(id: usize) -> Result<Outcome> {
    let check: fn() -> Check = match id {
        1 => dupont,
        2 => whitney,
        3 => bch,
        4 => lawrence_sullivan_gauge,
        5 => counterexample,
        6 => an_transfer,
        7 => relations,
        8 => solvers,
        9 => mcinf1,
        10 => cell_pipelines,
        11 => rectification,
        12 => deformation,
        13 => functoriality,
        14 => multicomplex,
        _ => return Err(Error::InvalidInput(format!("no acceptance criterion {id} (1..=14)"))),
    };
    let start = Instant::now();
    let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(Outcome { id, title: TITLES[id - 1], pass, detail, elapsed: start.elapsed() })
}

pub fn run_all() -> Vec<Outcome> {
    (1..=14).filter_map(|id| run(id).ok()).collect()
}

fn first_failure(failures: &[String]) -> String {
    failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
}

fn dupont() -> Check {
    let start = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 0..=3 {
        let r = verify_contraction(n, 6);
        checked += r.checked;
        failures.extend(r.failures.into_iter().map(|f| format!("n = {n}: {f}")));
    }
    let in_budget = start.elapsed() < DUPONT_BUDGET;
    Ok((failures.is_empty() && in_budget, format!("{checked} identities{}", first_failure(&failures))))
}

fn whitney() -> Check {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 0..=3 {
        let s = Simplex::new(n);
        for cell in s.cells() {
            checked += 1;
            let lhs = s.d(&s.whitney(&cell.0)?);
            let rhs = s.i(&s.d_whitney(&Lin::basis(cell.clone())));
            if lhs != rhs {
                failures.push(format!("d ω_{} on Δ^{n}", cell.name()));
            }
        }
        let top: Vec<usize> = (0..=n).collect();
        checked += 1;
        if s.integrate(&s.whitney(&top)?) != q(1) {
            failures.push(format!("∫ω over Δ^{n}"));
        }
    }
    Ok((failures.is_empty(), format!("{checked} checks{}", first_failure(&failures))))
}

fn printed_bch(alg: &FreeAlg, l: &TensorElt, m: &TensorElt) -> TensorElt {
    let lm = alg.bracket(l, m);
    let mut out = l + m;
    out.add_scaled(&lm, &frac(1, 2));
    out.add_scaled(&alg.bracket(l, &lm), &frac(1, 12));
    out.add_scaled(&alg.bracket(m, &alg.bracket(m, l)), &frac(1, 12));
    out
}

fn bch() -> Check {
    use rand::Rng;
    let low = FreeAlg::new(&[("λ", 0), ("μ", 0)], 3)?;
    let low_ok = low.bch(&low.gen(0), &low.gen(1))? == printed_bch(&low, &low.gen(0), &low.gen(1));
    let alg = FreeAlg::new(&[("λ", 0), ("μ", 0), ("w", 0)], 6)?;
    let (l, m) = (alg.gen(0), alg.gen(1));
    let z = alg.bch(&l, &m)?;
    let primitive = alg.is_primitive(&z);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut agree = 0;
    for _ in 0..10 {
        let weight = rng.gen_range(1..=3);
        let w = alg.random_lie(&mut rng, &[0, 1, 2], weight, 2);
        if alg.exp_ad_left(&z, &w) == alg.exp_ad_left(&l, &alg.exp_ad_left(&m, &w)) {
            agree += 1;
        }
    }
    Ok((low_ok && primitive && agree == 10, format!("weight-3 formula {low_ok}, adjoint identity {agree}/10, primitive {primitive}")))
}

fn lawrence_sullivan_gauge() -> Check {
    let (alg, d) = lawrence_sullivan(6)?;
    let (x0, x1, l) = (alg.gen(0), alg.gen(1), alg.gen(2));
    let gauge = alg.gauge_closed_form(&l, &x0, &d, &q(1))? == x1;
    let square = d.squares_to_zero(&alg);
    Ok((gauge && square, format!("gauge(λ, x0, d, 1) = x1: {gauge}, d² = 0: {square}")))
}

fn counterexample() -> Check {
    let (first, second) = counterexample_run()?;
    let (a, b) = (show_poly(&first), show_poly(&second));
    Ok((a == "-x^3" && b == "0", format!("first {a}, second {b}")))
}

fn an_transfer() -> Check {
    use crate::convolution::XY;
    let mut failures = Vec::new();
    for n in 2..=3 {
        let (big, c) = build_an(n, 4)?;
        let t = transfer_ainfty(&big, &c, 4)?;
        for a in 1..n {
            for b in 1..n {
                let product = if a + b < n { Lin::basis(Z(a + b)) } else { Lin::zero() };
                if t.small.op(&[Z(a), Z(b)]) != product {
                    failures.push(format!("n = {n}: m_2(x^{a}, x^{b})"));
                }
                let i2 = if a + b >= n { Lin::basis(XY { x: a + b - n, y: true }) } else { Lin::zero() };
                if t.i_inf.component(&[Z(a), Z(b)]) != i2 {
                    failures.push(format!("n = {n}: i_2(x^{a}, x^{b})"));
                }
            }
        }
        if !t.small.ops.keys().all(|k| k.len() == 2) {
            failures.push(format!("n = {n}: nonzero operation of arity 3 or 4"));
        }
        if !t.i_inf.higher[1..].iter().all(|m| m.is_empty()) {
            failures.push(format!("n = {n}: nonzero i_k for k ≥ 3"));
        }
    }
    Ok((failures.is_empty(), format!("n = 2, 3{}", first_failure(&failures))))
}

fn sl_differential(space: &GradedSpace, alg: &SLInfty) -> Result<GMap> {
    GMap::new(space.clone(), space.clone(), -1, space.syms().map(|s| alg.differential(&s)).collect())
}

fn probe_dgla() -> Result<(GradedSpace, SLInfty)> {
    let alg = FreeAlg::new(&[("a", -1), ("b", 0), ("c", 0)], 3)?;
    let deriv = LieDerivation { images: vec![Lin::zero(), alg.gen(0), Lin::zero()] };
    suspend_lie(&lie_from_free(&alg, Some(&deriv))?)
}

fn relations() -> Check {
    let mut results: Vec<(String, bool)> = Vec::new();
    let (space, sg) = probe_dgla()?;
    let d = sl_differential(&space, &sg)?;
    let (_, c) = homology_contraction(&space, &d)?;
    let t = transfer_slinfty(&sg, &c, 4)?;
    let small = t.tabulate();
    results.push(("sL∞ on homology".into(), small.check(4).ok()));
    results.push(("i_∞ to homology".into(), check_inf_morphism(&small, &sg, &t.i_infinity(), &small.basis, 4).ok()));
    for n in 2..=3 {
        let (big, c) = build_an(n, 4)?;
        let t = transfer_ainfty(&big, &c, 4)?;
        results.push((format!("A∞ on H(A^{n})"), check_ainf(&t.small, &c.small_basis, 4).ok()));
        results.push((format!("i_∞ on A^{n}"), check_ainf_morphism(&t.small, &big, &t.i_inf, &c.small_basis, 4).ok()));
    }
    let fx = level1_fixture(0)?;
    results.push(("g ⊗ C_1".into(), Level::new(&fx.g, 1)?.check_cell_relations(4)?.ok()));
    let (_, small_g) = suspend_lie(&free_nilpotent_lie(&[("a", -1), ("b", 0)], 2)?)?;
    results.push(("g ⊗ C_2".into(), Level::new(&small_g, 2)?.check_cell_relations(4)?.ok()));
    for seed in 0..3 {
        let b = random_bicomplex(seed, 3, 3, 2)?;
        let t = transfer_multicomplex(&b, 4)?;
        let d0 = GMap::zero(t.small.clone(), t.small.clone(), -1);
        results.push((format!("multicomplex seed {seed}"), check_multicomplex(&d0, &t.deltas).ok()));
    }
    for seed in 0..3 {
        let ch = morphism_chain(seed, 4)?;
        results.push((format!("two-stage M, fixture {seed}"), ch.mid.check(4).ok()));
        results.push((format!("two-stage H, fixture {seed}"), ch.small.check(4).ok()));
        results.push((format!("Φ, fixture {seed}"), check_inf_morphism(&ch.small, &ch.mid, &ch.phi, &ch.small.basis, 4).ok()));
    }
    let failed: Vec<String> = results.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.clone()).collect();
    Ok((failed.is_empty(), format!("{} structures{}", results.len(), first_failure(&failed))))
}

fn solvers() -> Check {
    let mut agree = 0;
    for seed in 0..5 {
        let fx = OdeFixture::random(seed);
        let ode = fx.ode(6);
        let rec = solve_ode_recursive(&ode);
        if solve_ode_trees(&ode) == rec && ode_residual(&ode, &rec).iter().all(Lin::is_zero) {
            agree += 1;
        }
    }
    let alg = FreeAlg::new(&[("x", -1), ("λ", 0), ("y", -1)], 5)?;
    let (x, l, y) = (alg.gen(0), alg.gen(1), alg.gen(2));
    let d = LieDerivation { images: vec![Lin::zero(), &y + &alg.bracket(&x, &y), Lin::zero()] };
    let dl = d.apply(&alg, &l);
    let ode = FODE::<Word> {
        ops: vec![
            OdeOp { arity: 0, power: 0, f: Box::new(|_: &[&TensorElt]| dl.clone()) },
            OdeOp { arity: 1, power: 0, f: Box::new(|a: &[&TensorElt]| alg.ad(&l, a[0])) },
        ],
        v0: x.clone(),
        degree_cap: 6,
    };
    let rec = solve_ode_recursive(&ode);
    let mut closed = solve_ode_trees(&ode) == rec;
    for t in [q(1), frac(1, 3), q(-2)] {
        closed &= eval_poly(&rec, &t) == alg.gauge_closed_form(&l, &x, &d, &t)?;
    }
    Ok((agree == 5 && closed, format!("fixtures {agree}/5, gauge closed form {closed}")))
}

fn mcinf1() -> Check {
    let m = build_mcinf1(4)?;
    Ok((
        m.ok(),
        format!("tree sum {}, strict part {}, d² = 0 {}", m.tree_sum_agrees, m.strict_matches_ls, m.d_squared_zero),
    ))
}

fn cell_pipelines() -> Check {
    let mut compared = 0;
    let mut failed = Vec::new();
    for gens in [[("a", 0), ("b", -1)], [("a", 0), ("b", 0)], [("a", -1), ("b", -1)]] {
        let r = compare_cell_pipelines(&gens, 3, 3)?;
        compared += r.compared;
        if !r.ok() || r.nonzero == 0 {
            failed.push(format!("{gens:?}"));
        }
    }
    Ok((failed.is_empty(), format!("{compared} brackets compared{}", first_failure(&failed))))
}

fn rectification() -> Check {
    let mut passed = 0;
    let mut betas = Vec::new();
    let mut paths = Vec::new();
    let mut level = None;
    for seed in 0..5 {
        let fx = level1_fixture(seed)?;
        let lv = level.get_or_insert(Level::new(&fx.g, 1)?);
        if rect_report(lv, &fx.path)?.ok() {
            passed += 1;
        }
        betas.push(lv.p_map(&fx.path)?);
        paths.push(fx.path);
    }
    let lv = level.ok_or_else(|| Error::Validation("no fixtures".into()))?;
    let gate = lv.pushforward_report(&betas, &paths)?;
    Ok((gate.ok() && passed == 5, format!("fixtures {passed}/5, V1–V4 {}", gate.ok())))
}

fn deformation() -> Check {
    let start = Instant::now();
    let checks: Vec<_> = fuzzed_bilinear(2024, 50).iter().map(is_mc_associative).collect::<Result<_>>()?;
    let agree = checks.iter().filter(|c| c.agree()).count();
    let associative = checks.iter().filter(|c| c.holds()).count();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut hoch = true;
    let mut cobound = true;
    for _ in 0..4 {
        let m = random_associative(&mut rng);
        for n in 0..=3 {
            let f = random_cochain(&mut rng, m.dim(), n, 0.5);
            hoch &= hoch_differential(&m, &hoch_differential(&m, &f)?)?.is_zero();
        }
        let g = random_cochain(&mut rng, m.dim(), 1, 0.6);
        cobound &= infinitesimal_deformation_check(&m, &trivial_deformation(&m, &g)?)?;
    }
    let mut ce = true;
    for _ in 0..4 {
        let b = random_lie(&mut rng);
        for n in 0..=3 {
            let f = random_alternating(&mut rng, b.dim(), n);
            ce &= chevalley_eilenberg(&b, &chevalley_eilenberg(&b, &f)?)?.is_zero();
        }
    }
    let in_budget = start.elapsed() < DEFORMATION_BUDGET;
    Ok((
        agree == 50 && hoch && ce && cobound && in_budget,
        format!("MC ⟺ associative {agree}/50 ({associative} associative), Hochschild d² = 0 {hoch}, CE d² = 0 {ce}, coboundaries are cocycles {cobound}"),
    ))
}

/// Two-stage reduction `H → M → g` of a suspended dg Lie algebra: weight 3
/// is contracted first, then weights 1 and 2. `Φ = i_∞ : H → M` and
/// `Ψ = i_∞ : M → g`.
pub struct MorphismChain {
    pub g: SLInfty,
    pub mid: SLInfty,
    pub small: SLInfty,
    pub phi: InfMorphism<Sym, Sym>,
    pub psi: InfMorphism<Sym, Sym>,
}

struct ChainFixture {
    gens: &'static [(&'static str, i64)],
    weights: &'static [u32],
    differential: fn(&FreeAlg) -> Vec<TensorElt>,
}

fn commutator(alg: &FreeAlg, l: &str, r: &str) -> TensorElt {
    alg.bracket(&alg.gen_named(l), &alg.gen_named(r))
}

/// In each fixture `[c, c]` is a boundary `dw` and the triple product
/// `[w, c]` is a boundary `dv`, so `γc` is Maurer–Cartan on homology and
/// both stages are non-strict.
const CHAIN_FIXTURES: [ChainFixture; 3] = [
    ChainFixture {
        gens: &[("a", -1), ("b", 0), ("c", -1), ("w", -1), ("v", -1)],
        weights: &[1, 1, 1, 2, 3],
        differential: |alg| {
            vec![Lin::zero(), alg.gen_named("a"), Lin::zero(), commutator(alg, "c", "c"), commutator(alg, "w", "c")]
        },
    },
    ChainFixture {
        gens: &[("a", -1), ("b", 0), ("c", -1), ("w", -1), ("v", -1)],
        weights: &[1, 1, 1, 2, 3],
        differential: |alg| {
            let bcc = alg.bracket(&commutator(alg, "b", "c"), &alg.gen_named("c"));
            vec![
                Lin::zero(),
                alg.gen_named("a"),
                Lin::zero(),
                &commutator(alg, "c", "c") + &commutator(alg, "a", "c"),
                &commutator(alg, "w", "c") - &bcc,
            ]
        },
    },
    ChainFixture {
        gens: &[("c", -1), ("e", 0), ("w", -1), ("v", -1)],
        weights: &[1, 1, 2, 3],
        differential: |alg| vec![Lin::zero(), Lin::zero(), commutator(alg, "c", "c"), commutator(alg, "w", "c")],
    },
];

pub fn morphism_chain(seed: u64, arity: usize) -> Result<MorphismChain> {
    let fx = &CHAIN_FIXTURES[seed as usize % CHAIN_FIXTURES.len()];
    let alg = FreeAlg::new(fx.gens, 3)?;
    let images = (fx.differential)(&alg);
    let lie = lie_from_free_weighted(&alg, Some(&LieDerivation { images }), fx.weights, 3)?;
    let (space, g) = suspend_lie(&lie)?;
    let (mid_space, to_mid) = homology_contraction_weights(&space, &sl_differential(&space, &g)?, |w| w == 3)?;
    let (mid, psi) = {
        let t = transfer_slinfty(&g, &to_mid, arity)?;
        (t.tabulate(), t.i_infinity())
    };
    let (_, to_small) = homology_contraction_weights(&mid_space, &sl_differential(&mid_space, &mid)?, |w| w <= 2)?;
    let (small, phi) = {
        let t = transfer_slinfty(&mid, &to_small, arity)?;
        (t.tabulate(), t.i_infinity())
    };
    Ok(MorphismChain { g, mid, small, phi, psi })
}

fn is_strict(f: &InfMorphism<Sym, Sym>, basis: &[Sym], max_weight: u32) -> bool {
    (2..=f.arity()).all(|n| sorted_tuples(basis, n, max_weight).iter().all(|t| f.components[n - 1](t).is_zero()))
}

fn functoriality() -> Check {
    let mut pairs = 0;
    let mut samples = 0;
    let mut nonzero = 0;
    let mut curved = 0;
    let mut failures = Vec::new();
    for seed in 0..10u64 {
        let ch = morphism_chain(seed, 3)?;
        let w = ch.g.max_weight();
        let composite = compose_inf(&ch.psi, &ch.phi, 3);
        let genuine = check_inf_morphism(&ch.small, &ch.mid, &ch.phi, &ch.small.basis, 3).ok()
            && check_inf_morphism(&ch.mid, &ch.g, &ch.psi, &ch.mid.basis, 3).ok()
            && check_inf_morphism(&ch.small, &ch.g, &composite, &ch.small.basis, 3).ok();
        let nonstrict = !is_strict(&ch.phi, &ch.small.basis, w) && !is_strict(&ch.psi, &ch.mid.basis, w);
        if !genuine || !nonstrict {
            failures.push(format!("seed {seed}: genuine {genuine}, non-strict {nonstrict}"));
            continue;
        }
        pairs += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(&class) = ch.small.basis.iter().find(|s| s.deg == 0 && s.wt == 1) else {
            failures.push(format!("seed {seed}: no weight-one class in degree 0"));
            continue;
        };
        for k in 1..=3 {
            let start = Lin::term(class, q(k) * frac(1 + seed as i64, 2));
            let gauge = random_vector(&mut rng, &ch.small, 1, w);
            let y = gauge_flow(&ch.small, &gauge, &start)?;
            if !is_mc(&ch.small, &y) {
                failures.push(format!("seed {seed}: sample is not Maurer–Cartan"));
                continue;
            }
            samples += 1;
            nonzero += usize::from(!y.is_zero());
            let middle = ch.phi.mc_pushforward(&y, w);
            curved += usize::from(middle != y.apply(|k| (ch.phi.components[0])(&[*k])));
            let stepwise = ch.psi.mc_pushforward(&middle, w);
            if stepwise != composite.mc_pushforward(&y, w) || !is_mc(&ch.g, &stepwise) {
                failures.push(format!("seed {seed}: MC(Ψ)MC(Φ) != MC(ΨΦ)"));
            }
        }
    }
    Ok((
        pairs == 10 && curved > 0 && failures.is_empty(),
        format!("{pairs}/10 pairs, {samples} samples ({nonzero} nonzero, {curved} with higher terms){}", first_failure(&failures)),
    ))
}

fn coords(space: &GradedSpace, v: &Vector) -> Vec<Q> {
    space.syms().map(|s| v.coeff(&s)).collect()
}

/// Class of the cycle `Δ i(z)` in vertical homology, by solving
/// `Δ i(z) = Σ c_k i(z_k) + d(w)` directly.
pub fn induced_on_homology(b: &Bicomplex, t: &TransferredMulticomplex) -> Result<Vec<Vector>> {
    let space = &b.space;
    let reps: Vec<Vec<Q>> = t.small.syms().map(|z| coords(space, &(t.contraction.i)(&z))).collect();
    let boundaries: Vec<Vec<Q>> = space.syms().map(|s| coords(space, b.d.image(s.idx))).collect();
    let frame = Matrix::from_cols(space.dim(), &[reps.clone(), boundaries].concat());
    t.small
        .syms()
        .map(|z| {
            let target = coords(space, &b.delta.apply(&(t.contraction.i)(&z)));
            let sol = frame.solve(&target).ok_or_else(|| Error::Validation(format!("Δ i(z{}) is not a cycle", z.idx)))?;
            Ok(t.small.syms().zip(&sol).map(|(s, c)| (s, c.clone())).collect())
        })
        .collect()
}

fn multicomplex() -> Check {
    let b = random_bicomplex(14, 3, 3, 2)?;
    if !b.check() {
        return Ok((false, "fixture is not a bicomplex".into()));
    }
    let t = transfer_multicomplex(&b, 1)?;
    let oracle = induced_on_homology(&b, &t)?;
    let transferred: Vec<Vector> = t.small.syms().map(|z| t.deltas[0].image(z.idx).clone()).collect();
    let nonzero = transferred.iter().filter(|v| !v.is_zero()).count();
    let agree = transferred == oracle;
    Ok((agree && nonzero > 0, format!("homology dim {}, Δ_1 nonzero on {nonzero} classes, agrees {agree}", t.small.dim())))
}
