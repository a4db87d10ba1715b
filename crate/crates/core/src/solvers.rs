//! Formal fixed-point equations and formal ODEs in filtered spaces.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{invalid, Result};
use crate::lin::{multilinear, Lin};
use crate::scalar::Q;
use crate::trees::{coeff_f, enumerate_wptrees, WPTree};

pub type Op<'a, K> = Box<dyn Fn(&Lin<K>) -> Lin<K> + 'a>;
pub type WeightFn<'a, K> = Box<dyn Fn(&K) -> u32 + 'a>;

/// `x = P_0 + Σ_n P_n(x)` where `P_n` raises the filtration by `n ≥ 1`.
pub struct FPEq<'a, K: Ord> {
    pub p0: Lin<K>,
    pub ops: Vec<(u32, Op<'a, K>)>,
    pub cap: u32,
    pub weight: WeightFn<'a, K>,
}

impl<'a, K: Ord + Clone> FPEq<'a, K> {
    fn truncate(&self, v: &Lin<K>) -> Lin<K> {
        v.filter(|k| (self.weight)(k) <= self.cap)
    }

    fn min_weight(&self, v: &Lin<K>) -> Option<u32> {
        v.keys().map(|k| (self.weight)(k)).min()
    }

    /// Right-hand side, truncated.
    pub fn rhs(&self, x: &Lin<K>) -> Lin<K> {
        let mut out = self.p0.clone();
        for (_, op) in &self.ops {
            out += &op(x);
        }
        self.truncate(&out)
    }

    pub fn residual(&self, x: &Lin<K>) -> Lin<K> {
        &self.rhs(x) - &self.truncate(x)
    }
}

/// Refines `v_{i+1} = v_i + (P_0 + Σ P_n(v_i) - v_i)`, checking that each
/// increment lies one filtration step deeper.
pub fn solve_fixed_point<K: Ord + Clone>(eq: &FPEq<'_, K>) -> Result<Lin<K>> {
    if eq.ops.iter().any(|(n, _)| *n == 0) {
        return invalid("operators must raise the filtration");
    }
    let mut v = eq.truncate(&eq.p0);
    let start = eq.min_weight(&v).unwrap_or(eq.cap + 1);
    for i in start..=eq.cap + 1 {
        let inc = eq.residual(&v);
        if inc.is_zero() {
            return Ok(v);
        }
        if eq.min_weight(&inc).is_some_and(|w| w <= i) {
            return invalid(format!("increment at step {i} does not deepen the filtration"));
        }
        v += &inc;
    }
    if eq.residual(&v).is_zero() {
        Ok(v)
    } else {
        invalid("fixed-point iteration did not stabilise within the cap")
    }
}

/// Weight-by-weight schedule: the weight-`k` part of the solution is read off
/// from the right-hand side evaluated on the parts of lower weight.
pub fn solve_fixed_point_by_weight<K: Ord + Clone>(eq: &FPEq<'_, K>) -> Lin<K> {
    let mut x = Lin::zero();
    for k in 0..=eq.cap {
        let y = eq.rhs(&x);
        x = x.filter(|key| (eq.weight)(key) != k);
        x += &y.filter(|key| (eq.weight)(key) == k);
    }
    x
}

pub type MultiOp<'a, K> = Box<dyn Fn(&[&Lin<K>]) -> Lin<K> + 'a>;

/// Summand `t^power f(x, …, x)` of the right-hand side of a formal ODE.
pub struct OdeOp<'a, K: Ord> {
    pub arity: usize,
    pub power: u32,
    pub f: MultiOp<'a, K>,
}

/// `ẋ(t) = Σ t^k f_{n,k}(x(t), …, x(t))`, `x(0) = v_0`.
pub struct FODE<'a, K: Ord> {
    pub ops: Vec<OdeOp<'a, K>>,
    pub v0: Lin<K>,
    pub degree_cap: usize,
}

/// Coefficients `c_0..c_D` of the solution, by `(m+1) c_{m+1} = [t^m] rhs`.
pub fn solve_ode_recursive<K: Ord + Clone>(ode: &FODE<'_, K>) -> Vec<Lin<K>> {
    let mut coeffs = vec![ode.v0.clone()];
    for m in 0..ode.degree_cap {
        let rhs = rhs_coefficient(ode, &coeffs, m);
        coeffs.push(rhs.scale(&Q::new(BigInt::one(), BigInt::from(m + 1))));
    }
    coeffs
}

/// `[t^m]` of the right-hand side given the known coefficients `c_0..c_m`.
fn rhs_coefficient<K: Ord + Clone>(ode: &FODE<'_, K>, coeffs: &[Lin<K>], m: usize) -> Lin<K> {
    let mut out = Lin::zero();
    for op in &ode.ops {
        let k = op.power as usize;
        if k > m {
            continue;
        }
        for split in splits(m - k, op.arity) {
            let args: Vec<&Lin<K>> = split.iter().map(|&j| &coeffs[j]).collect();
            if args.iter().any(|a| a.is_zero()) {
                continue;
            }
            out += &(op.f)(&args);
        }
    }
    out
}

fn splits(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=total)
        .flat_map(|first| {
            splits(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// `Σ_τ τ(v_0)/F(τ)` over weighted planar trees, where a vertex of arity
/// `n` and weight `w` is `f_{n,w-1}` and the tree contributes to `t^{W(τ)}`.
pub fn solve_ode_trees<K: Ord + Clone>(ode: &FODE<'_, K>) -> Vec<Lin<K>> {
    let mut by_key: BTreeMap<(usize, u32), Vec<&OdeOp<'_, K>>> = BTreeMap::new();
    for op in &ode.ops {
        by_key.entry((op.arity, op.power + 1)).or_default().push(op);
    }
    let allowed: Vec<(usize, u32)> = by_key.keys().copied().collect();
    let mut coeffs = vec![Lin::zero(); ode.degree_cap + 1];
    for tree in enumerate_wptrees(ode.degree_cap as u32, &allowed) {
        let value = eval_tree(&tree, &by_key, &ode.v0);
        if value.is_zero() {
            continue;
        }
        let c = Q::new(BigInt::one(), coeff_f(&tree));
        coeffs[tree.total_weight() as usize].add_scaled(&value, &c);
    }
    coeffs
}

fn eval_tree<K: Ord + Clone>(
    tree: &WPTree,
    ops: &BTreeMap<(usize, u32), Vec<&OdeOp<'_, K>>>,
    v0: &Lin<K>,
) -> Lin<K> {
    match tree {
        WPTree::Empty => v0.clone(),
        WPTree::Node { weight, children } => {
            let args: Vec<Lin<K>> = children.iter().map(|c| eval_tree(c, ops, v0)).collect();
            if args.iter().any(Lin::is_zero) {
                return Lin::zero();
            }
            let refs: Vec<&Lin<K>> = args.iter().collect();
            let mut out = Lin::zero();
            for op in &ops[&(children.len(), *weight)] {
                out += &(op.f)(&refs);
            }
            out
        }
    }
}

/// `Σ c_k t^k`.
pub fn eval_poly<K: Ord + Clone>(coeffs: &[Lin<K>], t: &Q) -> Lin<K> {
    let mut out = Lin::zero();
    let mut tk = Q::one();
    for c in coeffs {
        out.add_scaled(c, &tk);
        tk *= t;
    }
    out
}

/// `[t^m](ẋ - rhs)` for `m < D`; all zero for a solution.
pub fn ode_residual<K: Ord + Clone>(ode: &FODE<'_, K>, coeffs: &[Lin<K>]) -> Vec<Lin<K>> {
    (0..ode.degree_cap.min(coeffs.len().saturating_sub(1)))
        .map(|m| {
            let deriv = coeffs[m + 1].scale(&Q::from_integer(BigInt::from(m + 1)));
            &deriv - &rhs_coefficient(ode, coeffs, m)
        })
        .collect()
}

/// Multilinear operator given on basis tuples.
pub fn op_from_table<'a, K: Ord + Clone + 'a>(table: impl Fn(&[K]) -> Lin<K> + 'a) -> MultiOp<'a, K> {
    Box::new(move |args: &[&Lin<K>]| multilinear(args, |ks| table(ks)))
}

pub fn is_zero_poly<K: Ord + Clone>(coeffs: &[Lin<K>]) -> bool {
    coeffs.iter().all(Lin::is_zero)
}

/// Seeded nilpotent fixture: a finite weighted basis with random multilinear
/// operators that strictly raise weight.
pub mod fixtures {
    use super::*;
    use crate::graded::Sym;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub struct OdeFixture {
        pub basis: Vec<Sym>,
        pub tables: Vec<(usize, u32, BTreeMap<Vec<usize>, Lin<Sym>>)>,
        pub v0: Lin<Sym>,
    }

    impl OdeFixture {
        pub fn random(seed: u64) -> Self {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let weights = [1u32, 1, 2, 2, 3, 4];
            let basis: Vec<Sym> = weights.iter().enumerate().map(|(idx, &wt)| Sym { idx, deg: 0, wt }).collect();
            let shapes = [(0usize, 1u32), (1, 0), (1, 1), (2, 0), (2, 1), (3, 2)];
            let mut tables = Vec::new();
            for &(arity, power) in &shapes {
                if !rng.gen_bool(0.8) {
                    continue;
                }
                let mut table = BTreeMap::new();
                for tuple in tuples(basis.len(), arity) {
                    let w_in: u32 = tuple.iter().map(|&i| basis[i].wt).sum();
                    let mut img = Lin::zero();
                    for b in &basis {
                        if b.wt > w_in && rng.gen_bool(0.4) {
                            img.add_term(*b, Q::from_integer(BigInt::from(rng.gen_range(-2i64..=2))));
                        }
                    }
                    if !img.is_zero() {
                        table.insert(tuple, img);
                    }
                }
                tables.push((arity, power, table));
            }
            let mut v0 = Lin::zero();
            for b in &basis {
                v0.add_term(*b, Q::from_integer(BigInt::from(rng.gen_range(-2i64..=2))));
            }
            OdeFixture { basis, tables, v0 }
        }

        pub fn ode(&self, degree_cap: usize) -> FODE<'_, Sym> {
            let ops = self
                .tables
                .iter()
                .map(|(arity, power, table)| OdeOp {
                    arity: *arity,
                    power: *power,
                    f: op_from_table(move |ks: &[Sym]| {
                        let idx: Vec<usize> = ks.iter().map(|k| k.idx).collect();
                        table.get(&idx).cloned().unwrap_or_default()
                    }),
                })
                .collect();
            FODE { ops, v0: self.v0.clone(), degree_cap }
        }
    }

    fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|t: Vec<usize>| {
                    (0..n).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::{FreeAlg, LieDerivation, TensorElt, Word};
    use crate::graded::Sym;
    use crate::scalar::{frac, q};

    const ONE: Sym = Sym { idx: 0, deg: 0, wt: 0 };

    fn scalar(c: i64) -> Lin<Sym> {
        Lin::term(ONE, q(c))
    }

    fn square_ode(v0: i64, cap: usize) -> FODE<'static, Sym> {
        FODE {
            ops: vec![OdeOp { arity: 2, power: 0, f: op_from_table(|_| Lin::basis(ONE)) }],
            v0: scalar(v0),
            degree_cap: cap,
        }
    }

    #[test]
    fn trivial_odes() {
        let ode = FODE::<Sym> { ops: Vec::new(), v0: scalar(3), degree_cap: 4 };
        let sol = solve_ode_recursive(&ode);
        assert_eq!(sol[0], scalar(3));
        assert!(sol[1..].iter().all(Lin::is_zero));
        assert_eq!(solve_ode_trees(&ode), sol);
        let constant = FODE { ops: vec![OdeOp { arity: 0, power: 0, f: Box::new(|_: &[&Lin<Sym>]| scalar(5)) }], v0: scalar(1), degree_cap: 3 };
        let sol = solve_ode_recursive(&constant);
        assert_eq!(eval_poly(&sol, &frac(1, 2)), scalar(1) + Lin::term(ONE, frac(5, 2)));
        assert_eq!(solve_ode_trees(&constant), sol);
    }

    #[test]
    fn square_ode_is_geometric() {
        // ẋ = x², x(0) = v: x = v/(1 - tv) so [t^k] = v^{k+1}
        let ode = square_ode(3, 5);
        let sol = solve_ode_recursive(&ode);
        for (k, c) in sol.iter().enumerate() {
            assert_eq!(c, &scalar(3i64.pow(k as u32 + 1)));
        }
        assert_eq!(solve_ode_trees(&ode), sol);
        assert!(ode_residual(&ode, &sol).iter().all(Lin::is_zero));
    }

    #[test]
    fn random_fixtures_agree() {
        for seed in 0..3 {
            let fx = fixtures::OdeFixture::random(seed);
            let ode = fx.ode(5);
            let rec = solve_ode_recursive(&ode);
            assert_eq!(solve_ode_trees(&ode), rec, "seed {seed}");
            assert!(ode_residual(&ode, &rec).iter().all(Lin::is_zero));
        }
    }

    #[test]
    fn lie_gauge_ode_matches_closed_form() {
        let alg = FreeAlg::new(&[("x", -1), ("λ", 0), ("y", -1)], 5).unwrap();
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
        assert_eq!(solve_ode_trees(&ode), rec);
        for t in [q(1), frac(1, 3), q(-2)] {
            assert_eq!(eval_poly(&rec, &t), alg.gauge_closed_form(&l, &x, &d, &t).unwrap());
        }
    }

    fn word_weight(w: &Word) -> u32 {
        w.0.len() as u32
    }

    #[test]
    fn fixed_point_examples() {
        let alg = FreeAlg::new(&[("a", -1), ("b", -1)], 3).unwrap();
        let a = alg.gen(0);
        let plain = FPEq { p0: a.clone(), ops: Vec::new(), cap: 3, weight: Box::new(word_weight) };
        assert_eq!(solve_fixed_point(&plain).unwrap(), a);

        // x = a + ½[x,x]: weight 2 gives a², weight 3 gives ½([a,a²] + [a²,a]) = 0
        let half = frac(1, 2);
        let eq = FPEq {
            p0: a.clone(),
            ops: vec![(1, Box::new(|x: &TensorElt| alg.bracket(x, x).scale(&half)) as Op<'_, Word>)],
            cap: 3,
            weight: Box::new(word_weight),
        };
        let sol = solve_fixed_point(&eq).unwrap();
        assert_eq!(sol, &a + &alg.mul(&a, &a));
        assert_eq!(solve_fixed_point_by_weight(&eq), sol);
        assert!(eq.residual(&sol).is_zero());

        // x = a + [c, x] with c even: a + [c,a] + [c,[c,a]]
        let alg = FreeAlg::new(&[("a", -1), ("c", 0)], 3).unwrap();
        let (a, c) = (alg.gen(0), alg.gen(1));
        let eq = FPEq {
            p0: a.clone(),
            ops: vec![(1, Box::new(|x: &TensorElt| alg.bracket(&c, x)) as Op<'_, Word>)],
            cap: 3,
            weight: Box::new(word_weight),
        };
        let ca = alg.bracket(&c, &a);
        let expected = &(&a + &ca) + &alg.bracket(&c, &ca);
        assert_eq!(solve_fixed_point(&eq).unwrap(), expected);
        assert_eq!(solve_fixed_point_by_weight(&eq), expected);

        let bad = FPEq { p0: a.clone(), ops: vec![(1, Box::new(|x: &TensorElt| x.clone()) as Op<'_, Word>)], cap: 3, weight: Box::new(word_weight) };
        assert!(solve_fixed_point(&bad).is_err());
    }
}
