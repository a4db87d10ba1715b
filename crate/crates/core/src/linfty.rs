//! Shifted homotopy Lie algebras: brackets of degree -1, Maurer–Cartan
//! elements in degree 0, gauges in degree 1, and ∞-morphisms.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::freelie::{FreeAlg, LieDerivation, TensorElt, Word};
use crate::graded::{koszul_parity, repeats_odd, sort_graded, GradedSpace, Sym, Vector};
use crate::lin::{multilinear, Graded, Lin};
use crate::linalg::Matrix;
use crate::scalar::{factorial, fmt_q, inv_factorial, parity_sign, Q};
use crate::solvers::{eval_poly, solve_ode_recursive, OdeOp, FODE};
use crate::trees::index_partitions;

/// A shifted L∞ structure on basis keys `K`. `bracket` receives `n ≥ 2` keys
/// in any order and must be graded symmetric of degree -1.
pub trait SLInf {
    type K: Graded;
    fn differential(&self, k: &Self::K) -> Lin<Self::K>;
    fn bracket(&self, keys: &[Self::K]) -> Lin<Self::K>;
    fn arity_cap(&self) -> usize;
    /// Every element of larger weight is zero.
    fn max_weight(&self) -> u32;
}

pub fn d<A: SLInf + ?Sized>(alg: &A, x: &Lin<A::K>) -> Lin<A::K> {
    x.apply(|k| alg.differential(k))
}

/// `ℓ_n` on vectors; `ℓ_1` is the differential.
pub fn ell<A: SLInf + ?Sized>(alg: &A, args: &[&Lin<A::K>]) -> Lin<A::K> {
    match args.len() {
        0 => Lin::zero(),
        1 => d(alg, args[0]),
        n if n > alg.arity_cap() => Lin::zero(),
        _ => multilinear(args, |ks| alg.bracket(ks)),
    }
}

/// `ℓ_n(x, …, x)`; for a degree-0 vector the sum runs over multisets.
pub fn ell_power<A: SLInf + ?Sized>(alg: &A, x: &Lin<A::K>, n: usize) -> Lin<A::K> {
    if n == 1 {
        return d(alg, x);
    }
    if n > alg.arity_cap() || x.is_zero() {
        return Lin::zero();
    }
    if x.keys().any(|k| k.deg() != 0) {
        let args = vec![x; n];
        return ell(alg, &args);
    }
    symmetric_power(x, n, alg.max_weight(), |keys| alg.bracket(keys))
}

/// `f(x, …, x)` (`n` copies) for a graded-symmetric `f` and degree-0 `x`,
/// summed over multisets of basis keys of total weight at most `max_weight`.
pub fn symmetric_power<K: Graded, J: Ord + Clone>(
    x: &Lin<K>,
    n: usize,
    max_weight: u32,
    mut f: impl FnMut(&[K]) -> Lin<J>,
) -> Lin<J> {
    let terms: Vec<(&K, &Q)> = x.iter().collect();
    let weights: Vec<u32> = terms.iter().map(|(k, _)| k.weight()).collect();
    let mut out = Lin::zero();
    let mut counts = vec![0usize; terms.len()];
    multisets(&weights, n, 0, max_weight, &mut counts, &mut |counts| {
        let mut keys = Vec::with_capacity(n);
        let mut coeff = Q::from_integer(factorial(n));
        for (i, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                keys.push(terms[i].0.clone());
                coeff *= terms[i].1;
            }
            coeff /= Q::from_integer(factorial(c));
        }
        out.add_scaled(&f(&keys), &coeff);
    });
    out
}

/// Multisets of size `n` with total weight at most `budget`.
fn multisets(weights: &[u32], n: usize, start: usize, budget: u32, counts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if n == 0 {
        f(counts);
        return;
    }
    for i in start..weights.len() {
        if weights[i] > budget {
            continue;
        }
        counts[i] += 1;
        multisets(weights, n - 1, i, budget - weights[i], counts, f);
        counts[i] -= 1;
    }
}

fn weight_of<K: Graded>(keys: &[K]) -> u32 {
    keys.iter().map(Graded::weight).sum()
}

/// `dx + Σ_{n≥2} ℓ_n(x, …, x)/n!`.
pub fn mc_residual<A: SLInf + ?Sized>(alg: &A, x: &Lin<A::K>) -> Result<Lin<A::K>> {
    if x.keys().any(|k| k.deg() != 0) {
        return invalid("Maurer–Cartan candidates have degree 0");
    }
    Ok(curvature(alg, x))
}

fn curvature<A: SLInf + ?Sized>(alg: &A, x: &Lin<A::K>) -> Lin<A::K> {
    let mut out = d(alg, x);
    for n in 2..=alg.arity_cap() {
        out.add_scaled(&ell_power(alg, x, n), &inv_factorial(n));
    }
    out
}

/// `Σ_{n≥2} ℓ_n(x, …, x)/n!`.
pub fn nonlinear_part<A: SLInf + ?Sized>(alg: &A, x: &Lin<A::K>) -> Lin<A::K> {
    let mut out = Lin::zero();
    for n in 2..=alg.arity_cap() {
        out.add_scaled(&ell_power(alg, x, n), &inv_factorial(n));
    }
    out
}

pub fn is_mc<A: SLInf + ?Sized>(alg: &A, x: &Lin<A::K>) -> bool {
    mc_residual(alg, x).map(|r| r.is_zero()).unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub checked: usize,
    pub violation: Option<String>,
}

impl RelationReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Sorted tuples with repetition of `basis` of length `n`, pruned by weight.
pub fn sorted_tuples<K: Graded>(basis: &[K], n: usize, max_weight: u32) -> Vec<Vec<K>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go<K: Graded>(basis: &[K], n: usize, start: usize, max_w: u32, cur: &mut Vec<K>, out: &mut Vec<Vec<K>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..basis.len() {
            cur.push(basis[i].clone());
            if weight_of(cur) <= max_w {
                go(basis, n, i, max_w, cur, out);
            }
            cur.pop();
        }
    }
    let mut sorted = basis.to_vec();
    sorted.sort();
    go(&sorted, n, 0, max_weight, &mut cur, &mut out);
    out
}

/// `Σ_{n_1+n_2=n+1} Σ_{σ∈Sh(n_1,n-n_1)} ε ℓ_{n_2}(ℓ_{n_1}(v_σ…), v_σ…)`.
pub fn relation_value<A: SLInf + ?Sized>(alg: &A, inputs: &[Lin<A::K>], degrees: &[i64]) -> Lin<A::K> {
    let n = inputs.len();
    let mut out = Lin::zero();
    for mask in 1u32..(1 << n) {
        let front: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let back: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let mut perm = front.clone();
        perm.extend_from_slice(&back);
        let sign = parity_sign(koszul_parity(&perm, degrees));
        let inner_args: Vec<&Lin<A::K>> = front.iter().map(|&i| &inputs[i]).collect();
        let inner = ell(alg, &inner_args);
        if inner.is_zero() {
            continue;
        }
        let mut outer_args: Vec<&Lin<A::K>> = vec![&inner];
        outer_args.extend(back.iter().map(|&i| &inputs[i]));
        out.add_scaled(&ell(alg, &outer_args), &sign);
    }
    out
}

/// Checks the sL∞ relations on all sorted basis tuples up to `n_max`.
pub fn check_relations<A: SLInf + ?Sized>(alg: &A, basis: &[A::K], n_max: usize) -> RelationReport {
    let mut checked = 0;
    for n in 1..=n_max {
        for tuple in sorted_tuples(basis, n, alg.max_weight()) {
            if repeats_odd(&tuple) {
                continue;
            }
            let inputs: Vec<Lin<A::K>> = tuple.iter().map(|k| Lin::basis(k.clone())).collect();
            let degrees: Vec<i64> = tuple.iter().map(Graded::deg).collect();
            let value = relation_value(alg, &inputs, &degrees);
            checked += 1;
            if !value.is_zero() {
                return RelationReport {
                    checked,
                    violation: Some(format!("arity {n} relation fails on {tuple:?}: {value:?}")),
                };
            }
        }
    }
    RelationReport { checked, violation: None }
}

/// Finite sL∞ algebra given by tables on sorted basis tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SLInfty<K: Ord = Sym> {
    pub basis: Vec<K>,
    pub diff: BTreeMap<K, Lin<K>>,
    pub brackets: BTreeMap<Vec<K>, Lin<K>>,
    pub arity_cap: usize,
    pub max_weight: u32,
}

impl<K: Graded> SLInfty<K> {
    /// Validates degrees, weights and storage on sorted tuples.
    pub fn new(
        basis: Vec<K>,
        diff: BTreeMap<K, Lin<K>>,
        brackets: BTreeMap<Vec<K>, Lin<K>>,
        arity_cap: usize,
    ) -> Result<Self> {
        let max_weight = basis.iter().map(Graded::weight).max().unwrap_or(0);
        for (k, img) in &diff {
            if img.keys().any(|o| o.deg() != k.deg() - 1) {
                return invalid(format!("differential of {k:?} is not of degree -1"));
            }
            if img.keys().any(|o| o.weight() < k.weight()) {
                return invalid(format!("differential lowers the weight of {k:?}"));
            }
        }
        let mut stored = BTreeMap::new();
        for (keys, img) in brackets {
            if keys.len() < 2 || keys.len() > arity_cap {
                return invalid(format!("bracket of arity {} outside 2..={arity_cap}", keys.len()));
            }
            let (sorted, odd) = sort_graded(&keys);
            let total: i64 = keys.iter().map(Graded::deg).sum();
            if img.keys().any(|o| o.deg() != total - 1) {
                return invalid(format!("bracket on {keys:?} is not of degree -1"));
            }
            if img.keys().any(|o| o.weight() < weight_of(&keys)) {
                return invalid(format!("bracket on {keys:?} lowers the weight"));
            }
            if repeats_odd(&sorted) || img.is_zero() {
                continue;
            }
            stored.insert(sorted, img.scale(&parity_sign(odd)));
        }
        Ok(SLInfty { basis, diff, brackets: stored, arity_cap, max_weight })
    }

    pub fn check(&self, n_max: usize) -> RelationReport {
        check_relations(self, &self.basis, n_max)
    }

    /// Materializes any structure on a finite basis.
    pub fn tabulate<A: SLInf<K = K> + ?Sized>(alg: &A, basis: &[K], arity_cap: usize) -> Self {
        let mut diff = BTreeMap::new();
        for k in basis {
            let img = alg.differential(k);
            if !img.is_zero() {
                diff.insert(k.clone(), img);
            }
        }
        let mut brackets = BTreeMap::new();
        for n in 2..=arity_cap.min(alg.arity_cap()) {
            for tuple in sorted_tuples(basis, n, alg.max_weight()) {
                if repeats_odd(&tuple) {
                    continue;
                }
                let img = alg.bracket(&tuple);
                if !img.is_zero() {
                    brackets.insert(tuple, img);
                }
            }
        }
        SLInfty {
            basis: basis.to_vec(),
            diff,
            brackets,
            arity_cap,
            max_weight: alg.max_weight(),
        }
    }
}

impl<K: Graded> SLInf for SLInfty<K> {
    type K = K;
    fn differential(&self, k: &K) -> Lin<K> {
        self.diff.get(k).cloned().unwrap_or_default()
    }
    fn bracket(&self, keys: &[K]) -> Lin<K> {
        if keys.len() > self.arity_cap || weight_of(keys) > self.max_weight {
            return Lin::zero();
        }
        let (sorted, odd) = sort_graded(keys);
        match self.brackets.get(&sorted) {
            Some(img) => img.scale(&parity_sign(odd)),
            None => Lin::zero(),
        }
    }
    fn arity_cap(&self) -> usize {
        self.arity_cap
    }
    fn max_weight(&self) -> u32 {
        self.max_weight
    }
}

impl SLInfty<Sym> {
    pub fn to_json(&self, space: &GradedSpace) -> Value {
        let vec_json = |v: &Vector| -> Value {
            Value::Array(v.iter().map(|(k, c)| json!([space.id(k.idx), fmt_q(c)])).collect())
        };
        let mut entries = Vec::new();
        for (k, img) in &self.diff {
            entries.push(json!({"n": 1, "inputs": [space.id(k.idx)], "output": vec_json(img)}));
        }
        for (keys, img) in &self.brackets {
            let ids: Vec<&str> = keys.iter().map(|k| space.id(k.idx)).collect();
            entries.push(json!({"n": keys.len(), "inputs": ids, "output": vec_json(img)}));
        }
        json!({"carrier": space, "arity_cap": self.arity_cap, "brackets": entries})
    }

    /// Parses `{"carrier": space, "arity_cap": k, "brackets": [{n, inputs, output}]}`.
    pub fn from_json(v: &Value) -> Result<(GradedSpace, Self)> {
        let space: GradedSpace = serde_json::from_value(v["carrier"].clone())
            .map_err(|e| Error::InvalidInput(format!("carrier: {e}")))?;
        space.validate()?;
        let arity_cap = v["arity_cap"].as_u64().unwrap_or(2) as usize;
        let lookup = |id: &Value| -> Result<Sym> {
            let id = id.as_str().ok_or_else(|| Error::InvalidInput("basis ids are strings".into()))?;
            space.index_of(id).map(|i| space.sym(i)).ok_or_else(|| Error::InvalidInput(format!("unknown id {id}")))
        };
        let mut diff = BTreeMap::new();
        let mut brackets = BTreeMap::new();
        for entry in v["brackets"].as_array().cloned().unwrap_or_default() {
            let inputs: Vec<Sym> = entry["inputs"].as_array().cloned().unwrap_or_default().iter().map(lookup).collect::<Result<_>>()?;
            let mut output = Lin::zero();
            for term in entry["output"].as_array().cloned().unwrap_or_default() {
                let k = lookup(&term[0])?;
                let c = crate::scalar::parse_q(term[1].as_str().unwrap_or("0"))?;
                output.add_term(k, c);
            }
            if inputs.len() == 1 {
                diff.insert(inputs[0], output);
            } else {
                brackets.insert(inputs, output);
            }
        }
        let alg = SLInfty::new(space.syms().collect(), diff, brackets, arity_cap)?;
        Ok((space, alg))
    }
}

/// Strict graded Lie algebra with a differential, unshifted degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    pub space: GradedSpace,
    pub diff: Vec<Vector>,
    /// `[e_i, e_j]` for all ordered pairs with nonzero bracket.
    pub table: BTreeMap<(usize, usize), Vector>,
}

impl LieAlgebra {
    pub fn bracket(&self, a: &Vector, b: &Vector) -> Vector {
        multilinear(&[a, b], |ks| self.table.get(&(ks[0].idx, ks[1].idx)).cloned().unwrap_or_default())
    }

    pub fn d(&self, a: &Vector) -> Vector {
        a.apply(|k| self.diff[k.idx].clone())
    }

    /// Antisymmetry, Jacobi, `d² = 0` and Leibniz on basis elements.
    pub fn check(&self) -> bool {
        let n = self.space.dim();
        let e = |i: usize| self.space.elt(i);
        let deg = |i: usize| self.space.sym(i).deg;
        let s = |x: i64| parity_sign(x.rem_euclid(2) == 1);
        for i in 0..n {
            if !self.d(&self.d(&e(i))).is_zero() {
                return false;
            }
            for j in 0..n {
                let anti = self.bracket(&e(i), &e(j)) + self.bracket(&e(j), &e(i)).scale(&s(deg(i) * deg(j)));
                if !anti.is_zero() {
                    return false;
                }
                let leib = self.d(&self.bracket(&e(i), &e(j)))
                    - self.bracket(&self.d(&e(i)), &e(j))
                    - self.bracket(&e(i), &self.d(&e(j))).scale(&s(deg(i)));
                if !leib.is_zero() {
                    return false;
                }
                for k in 0..n {
                    let jac = self.bracket(&e(i), &self.bracket(&e(j), &e(k))).scale(&s(deg(i) * deg(k)))
                        + self.bracket(&e(j), &self.bracket(&e(k), &e(i))).scale(&s(deg(j) * deg(i)))
                        + self.bracket(&e(k), &self.bracket(&e(i), &e(j))).scale(&s(deg(k) * deg(j)));
                    if !jac.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn abelian(space: GradedSpace) -> Self {
        let diff = vec![Lin::zero(); space.dim()];
        LieAlgebra { space, diff, table: BTreeMap::new() }
    }
}

/// `ℓ_1(sx) = -s dx`, `ℓ_2(sx, sy) = (-1)^{|x|} s[x, y]`.
pub fn suspend_lie(g: &LieAlgebra) -> Result<(GradedSpace, SLInfty<Sym>)> {
    if !g.check() {
        return invalid("not a differential graded Lie algebra");
    }
    let s = g.space.suspend(1);
    let lift = |v: &Vector| s.reindex(v);
    let mut diff = BTreeMap::new();
    for (i, img) in g.diff.iter().enumerate() {
        if !img.is_zero() {
            diff.insert(s.sym(i), -lift(img));
        }
    }
    let mut brackets = BTreeMap::new();
    for (&(i, j), img) in &g.table {
        if i <= j {
            let sign = parity_sign(g.space.sym(i).deg.rem_euclid(2) == 1);
            brackets.insert(vec![s.sym(i), s.sym(j)], lift(img).scale(&sign));
        }
    }
    let alg = SLInfty::new(s.syms().collect(), diff, brackets, 2)?;
    Ok((s, alg))
}

/// Free nilpotent graded Lie algebra on the given generators modulo weight
/// above `cap`, as structure constants in a basis of left-normed commutators.
pub fn free_nilpotent_lie(gens: &[(&str, i64)], cap: usize) -> Result<LieAlgebra> {
    let alg = FreeAlg::new(gens, cap)?;
    lie_from_free(&alg, None)
}

/// The Lie subalgebra of a truncated free algebra, with an optional
/// derivation as differential.
pub fn lie_from_free(alg: &FreeAlg, deriv: Option<&LieDerivation>) -> Result<LieAlgebra> {
    let mut basis: Vec<(String, TensorElt, usize)> = Vec::new();
    let mut words_index: BTreeMap<Word, usize> = BTreeMap::new();
    let mut rows: Vec<TensorElt> = Vec::new();
    for k in 1..=alg.cap {
        let candidates: Vec<(String, TensorElt)> = if k == 1 {
            (0..alg.gens.len()).map(|i| (alg.gens[i].name.clone(), alg.gen(i))).collect()
        } else {
            let prev: Vec<&(String, TensorElt, usize)> = basis.iter().filter(|b| b.2 == k - 1).collect();
            (0..alg.gens.len())
                .flat_map(|i| prev.iter().map(move |b| (i, *b)))
                .map(|(i, (name, elt, _))| (format!("[{},{}]", alg.gens[i].name, name), alg.bracket(&alg.gen(i), elt)))
                .collect()
        };
        for (name, elt) in candidates {
            if elt.is_zero() {
                continue;
            }
            rows.push(elt.clone());
            if span_rank(&rows, &mut words_index) == rows.len() {
                basis.push((name, elt, k));
            } else {
                rows.pop();
            }
        }
    }
    let space = GradedSpace::new(
        basis.iter().map(|(name, elt, w)| (name.clone(), alg.degree(elt).expect("homogeneous"), *w as u32)),
    )?;
    let elts: Vec<TensorElt> = basis.iter().map(|b| b.1.clone()).collect();
    let coords = |v: &TensorElt| -> Result<Vector> {
        let c = express(v, &elts).ok_or_else(|| Error::Validation("element outside the commutator span".into()))?;
        Ok(c.into_iter().enumerate().map(|(i, c)| (space.sym(i), c)).collect())
    };
    let mut table = BTreeMap::new();
    for i in 0..elts.len() {
        for j in 0..elts.len() {
            let br = alg.bracket(&elts[i], &elts[j]);
            if !br.is_zero() {
                table.insert((i, j), coords(&br)?);
            }
        }
    }
    let diff = match deriv {
        Some(dv) => elts.iter().map(|e| coords(&alg.truncate(&dv.apply(alg, e)))).collect::<Result<_>>()?,
        None => vec![Lin::zero(); elts.len()],
    };
    Ok(LieAlgebra { space, diff, table })
}

/// [`lie_from_free`] with generator `i` of weight `weights[i]`, modulo all
/// commutators of total weight above `cap`. The derivation must preserve
/// the weight.
pub fn lie_from_free_weighted(alg: &FreeAlg, deriv: Option<&LieDerivation>, weights: &[u32], cap: u32) -> Result<LieAlgebra> {
    if weights.len() != alg.gens.len() || weights.contains(&0) {
        return invalid("one positive weight per generator");
    }
    let g = lie_from_free(alg, deriv)?;
    let weight_of = |i: usize| -> u32 {
        let elt = lie_elt(&g, alg, i);
        let word = elt.keys().next().expect("nonzero commutator");
        word.0.iter().map(|&l| weights[l as usize]).sum()
    };
    let old_weights: Vec<u32> = (0..g.space.dim()).map(weight_of).collect();
    let kept: Vec<usize> = (0..g.space.dim()).filter(|&i| old_weights[i] <= cap).collect();
    let mut new_index = vec![None; g.space.dim()];
    for (n, &i) in kept.iter().enumerate() {
        new_index[i] = Some(n);
    }
    let space = GradedSpace::new(kept.iter().map(|&i| (g.space.id(i).to_string(), g.space.basis[i].deg, old_weights[i])))?;
    let project = |v: &Vector| -> Vector {
        v.iter().filter_map(|(k, c)| new_index[k.idx].map(|n| (space.sym(n), c.clone()))).collect()
    };
    let mut diff = Vec::with_capacity(kept.len());
    for &i in &kept {
        if g.diff[i].keys().any(|k| old_weights[k.idx] != old_weights[i]) {
            return invalid(format!("differential of {} is not weight homogeneous", g.space.id(i)));
        }
        diff.push(project(&g.diff[i]));
    }
    let table = g
        .table
        .iter()
        .filter_map(|(&(i, j), v)| Some(((new_index[i]?, new_index[j]?), project(v))))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    Ok(LieAlgebra { space, diff, table })
}

/// Coordinates of a Lie element of a truncated free algebra in the basis of
/// [`lie_from_free`].
pub fn lie_coords(g: &LieAlgebra, alg: &FreeAlg, v: &TensorElt) -> Option<Vector> {
    let elts: Vec<TensorElt> = (0..g.space.dim()).map(|i| lie_elt(g, alg, i)).collect();
    let c = express(v, &elts)?;
    Some(c.into_iter().enumerate().map(|(i, c)| (g.space.sym(i), c)).collect())
}

/// Tensor expression of the `i`-th basis commutator.
pub fn lie_elt(g: &LieAlgebra, alg: &FreeAlg, i: usize) -> TensorElt {
    parse_commutator(alg, g.space.id(i))
}

fn parse_commutator(alg: &FreeAlg, name: &str) -> TensorElt {
    match name.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        Some(inner) => {
            let (head, tail) = inner.split_once(',').expect("left-normed commutator");
            alg.bracket(&alg.gen_named(head), &parse_commutator(alg, tail))
        }
        None => alg.gen_named(name),
    }
}

fn span_rank(elts: &[TensorElt], index: &mut BTreeMap<Word, usize>) -> usize {
    for e in elts {
        for w in e.keys() {
            let next = index.len();
            index.entry(w.clone()).or_insert(next);
        }
    }
    let cols: Vec<Vec<Q>> = elts
        .iter()
        .map(|e| {
            let mut col = vec![Q::zero(); index.len()];
            for (w, c) in e.iter() {
                col[index[w]] = c.clone();
            }
            col
        })
        .collect();
    Matrix::from_cols(index.len(), &cols).rank()
}

fn express(target: &TensorElt, basis: &[TensorElt]) -> Option<Vec<Q>> {
    let mut index = BTreeMap::new();
    for e in basis.iter().chain(std::iter::once(target)) {
        for w in e.keys() {
            let next = index.len();
            index.entry(w.clone()).or_insert(next);
        }
    }
    let to_col = |e: &TensorElt| {
        let mut col = vec![Q::zero(); index.len()];
        for (w, c) in e.iter() {
            col[index[w]] = c.clone();
        }
        col
    };
    let cols: Vec<Vec<Q>> = basis.iter().map(to_col).collect();
    Matrix::from_cols(index.len(), &cols).solve(&to_col(target))
}

/// `A^α`: `ℓ^α_m(x…) = Σ_j ℓ_{m+j}(α^j, x…)/j!`.
pub struct Twisted<'a, A: SLInf> {
    pub base: &'a A,
    pub alpha: Lin<A::K>,
}

pub fn twist<'a, A: SLInf>(alg: &'a A, alpha: &Lin<A::K>) -> Result<Twisted<'a, A>> {
    let r = mc_residual(alg, alpha)?;
    if !r.is_zero() {
        return Err(Error::Precondition("twisting element is not Maurer–Cartan".into()));
    }
    Ok(Twisted { base: alg, alpha: alpha.clone() })
}

impl<'a, A: SLInf> Twisted<'a, A> {
    fn twisted_op(&self, keys: &[A::K]) -> Lin<A::K> {
        let mut out = Lin::zero();
        let inputs: Vec<Lin<A::K>> = keys.iter().map(|k| Lin::basis(k.clone())).collect();
        for j in 0..=self.base.arity_cap().saturating_sub(keys.len()) {
            let mut args: Vec<&Lin<A::K>> = vec![&self.alpha; j];
            args.extend(inputs.iter());
            out.add_scaled(&ell(self.base, &args), &inv_factorial(j));
        }
        out
    }
}

impl<'a, A: SLInf> SLInf for Twisted<'a, A> {
    type K = A::K;
    fn differential(&self, k: &A::K) -> Lin<A::K> {
        self.twisted_op(std::slice::from_ref(k))
    }
    fn bracket(&self, keys: &[A::K]) -> Lin<A::K> {
        self.twisted_op(keys)
    }
    fn arity_cap(&self) -> usize {
        self.base.arity_cap()
    }
    fn max_weight(&self) -> u32 {
        self.base.max_weight()
    }
}

/// Time-1 value of `ẋ = dλ + Σ_{n≥2} ℓ_n(x, …, x, λ)/(n-1)!` from `x_0`.
pub fn gauge_flow<A: SLInf>(alg: &A, lambda: &Lin<A::K>, x0: &Lin<A::K>) -> Result<Lin<A::K>> {
    gauge_path(alg, lambda, x0).map(|coeffs| eval_poly(&coeffs, &Q::one()))
}

/// Polynomial coefficients of the gauge flow in `t`.
pub fn gauge_path<A: SLInf>(alg: &A, lambda: &Lin<A::K>, x0: &Lin<A::K>) -> Result<Vec<Lin<A::K>>> {
    if lambda.keys().any(|k| k.deg() != 1) {
        return invalid("gauges have degree 1");
    }
    if lambda.keys().any(|k| k.weight() == 0) {
        return invalid("gauges need positive weight for the flow to terminate");
    }
    if !mc_residual(alg, x0)?.is_zero() {
        return Err(Error::Precondition("initial point is not Maurer–Cartan".into()));
    }
    let dl = d(alg, lambda);
    let mut ops: Vec<OdeOp<'_, A::K>> = vec![OdeOp { arity: 0, power: 0, f: Box::new(move |_| dl.clone()) }];
    for n in 2..=alg.arity_cap() {
        let lambda = lambda.clone();
        ops.push(OdeOp {
            arity: n - 1,
            power: 0,
            f: Box::new(move |xs: &[&Lin<A::K>]| {
                let mut args: Vec<&Lin<A::K>> = xs.to_vec();
                args.push(&lambda);
                ell(alg, &args).scale(&inv_factorial(n - 1))
            }),
        });
    }
    let ode = FODE { ops, v0: x0.clone(), degree_cap: alg.max_weight() as usize + 1 };
    Ok(solve_ode_recursive(&ode))
}

/// Graded commutative dg algebra on basis keys; `d` has degree -1.
pub trait CommAlg {
    type K: Graded;
    fn mul(&self, a: &Self::K, b: &Self::K) -> Lin<Self::K>;
    fn d(&self, a: &Self::K) -> Lin<Self::K>;
    fn unit(&self) -> Self::K;
}

pub fn alg_mul<C: CommAlg + ?Sized>(c: &C, a: &Lin<C::K>, b: &Lin<C::K>) -> Lin<C::K> {
    multilinear(&[a, b], |ks| c.mul(&ks[0], &ks[1]))
}

/// `g ⊗ A` with `ℓ_n(x_i ⊗ a_i) = ± ℓ_n(x_1, …, x_n) ⊗ a_1⋯a_n`, the sign
/// being the Koszul sign of moving every `a_i` past the later `x_j`.
pub struct TensorSL<'a, G: SLInf, C: CommAlg> {
    pub g: &'a G,
    pub a: &'a C,
}

impl<'a, G: SLInf, C: CommAlg> SLInf for TensorSL<'a, G, C> {
    type K = (G::K, C::K);
    fn differential(&self, k: &Self::K) -> Lin<Self::K> {
        let (x, a) = k;
        let mut out = Lin::zero();
        for (dx, c) in self.g.differential(x).iter() {
            out.add_term((dx.clone(), a.clone()), c.clone());
        }
        let sign = parity_sign(x.deg().rem_euclid(2) == 1);
        for (da, c) in self.a.d(a).iter() {
            out.add_term((x.clone(), da.clone()), c * &sign);
        }
        out
    }
    fn bracket(&self, keys: &[Self::K]) -> Lin<Self::K> {
        if weight_of(keys) > self.max_weight() {
            return Lin::zero();
        }
        let mut odd = false;
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                odd ^= keys[i].1.deg() * keys[j].0.deg() % 2 != 0;
            }
        }
        let xs: Vec<G::K> = keys.iter().map(|k| k.0.clone()).collect();
        let top = self.g.bracket(&xs);
        if top.is_zero() {
            return Lin::zero();
        }
        let mut prod = Lin::basis(keys[0].1.clone());
        for k in &keys[1..] {
            prod = alg_mul(self.a, &prod, &Lin::basis(k.1.clone()));
        }
        let sign = parity_sign(odd);
        let mut out = Lin::zero();
        for (x, cx) in top.iter() {
            for (a, ca) in prod.iter() {
                out.add_term((x.clone(), a.clone()), cx * ca * &sign);
            }
        }
        out
    }
    fn arity_cap(&self) -> usize {
        self.g.arity_cap()
    }
    fn max_weight(&self) -> u32 {
        self.g.max_weight()
    }
}

pub type Component<K, J> = Rc<dyn Fn(&[K]) -> Lin<J>>;

/// ∞-morphism given by its components `φ_1, φ_2, …` on basis keys.
#[derive(Clone)]
pub struct InfMorphism<K: Ord, J: Ord> {
    pub components: Vec<Component<K, J>>,
}

impl<K: Graded + 'static, J: Graded + 'static> InfMorphism<K, J> {
    pub fn strict(f: impl Fn(&K) -> Lin<J> + 'static) -> Self {
        InfMorphism { components: vec![Rc::new(move |ks: &[K]| f(&ks[0]))] }
    }

    pub fn from_tables(tables: Vec<BTreeMap<Vec<K>, Lin<J>>>) -> Self {
        let components = tables
            .into_iter()
            .map(|t| {
                Rc::new(move |ks: &[K]| {
                    let (sorted, odd) = sort_graded(ks);
                    t.get(&sorted).map(|v| v.scale(&parity_sign(odd))).unwrap_or_default()
                }) as Component<K, J>
            })
            .collect();
        InfMorphism { components }
    }

    pub fn arity(&self) -> usize {
        self.components.len()
    }

    pub fn apply(&self, args: &[&Lin<K>]) -> Lin<J> {
        match self.components.get(args.len().wrapping_sub(1)) {
            Some(f) => multilinear(args, |ks| f(ks)),
            None => Lin::zero(),
        }
    }

    /// `MC(Φ)(x) = Σ φ_n(x, …, x)/n!` for degree-0 `x`; input tuples of
    /// weight above `max_weight` are skipped.
    pub fn mc_pushforward(&self, x: &Lin<K>, max_weight: u32) -> Lin<J> {
        let mut out = Lin::zero();
        for (n, f) in self.components.iter().enumerate() {
            out.add_scaled(&symmetric_power(x, n + 1, max_weight, |ks| f(ks)), &inv_factorial(n + 1));
        }
        out
    }

    /// Components `φ^α_k = Σ_j φ_{k+j}(α^j, …)/j!`.
    pub fn twist(&self, alpha: &Lin<K>) -> InfMorphism<K, J> {
        let n = self.arity();
        let components = (1..=n)
            .map(|k| {
                let base = self.clone();
                let alpha = alpha.clone();
                Rc::new(move |ks: &[K]| {
                    let inputs: Vec<Lin<K>> = ks.iter().map(|x| Lin::basis(x.clone())).collect();
                    let mut out = Lin::zero();
                    for j in 0..=n - k {
                        let mut args: Vec<&Lin<K>> = vec![&alpha; j];
                        args.extend(inputs.iter());
                        out.add_scaled(&base.apply(&args), &inv_factorial(j));
                    }
                    out
                }) as Component<K, J>
            })
            .collect();
        InfMorphism { components }
    }
}

/// `(ΨΦ)_n = Σ_k Σ_{partitions into k blocks} ± ψ_k(φ_{B_1}, …, φ_{B_k})`
/// for `n ≤ arity_cap`.
pub fn compose_inf<K, J, L>(psi: &InfMorphism<J, L>, phi: &InfMorphism<K, J>, arity_cap: usize) -> InfMorphism<K, L>
where
    K: Graded + 'static,
    J: Graded + 'static,
    L: Graded + 'static,
{
    let n_max = arity_cap.min(psi.arity() * phi.arity());
    let components = (1..=n_max)
        .map(|n| {
            let psi = psi.clone();
            let phi = phi.clone();
            Rc::new(move |ks: &[K]| {
                let degrees: Vec<i64> = ks.iter().map(Graded::deg).collect();
                let mut out = Lin::zero();
                for blocks in index_partitions(n) {
                    if blocks.len() > psi.arity() || blocks.iter().any(|b| b.len() > phi.arity()) {
                        continue;
                    }
                    let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
                    let sign = parity_sign(koszul_parity(&perm, &degrees));
                    let values: Vec<Lin<J>> = blocks
                        .iter()
                        .map(|b| {
                            let keys: Vec<K> = b.iter().map(|&i| ks[i].clone()).collect();
                            phi.components[b.len() - 1](&keys)
                        })
                        .collect();
                    if values.iter().any(Lin::is_zero) {
                        continue;
                    }
                    let refs: Vec<&Lin<J>> = values.iter().collect();
                    out.add_scaled(&psi.apply(&refs), &sign);
                }
                out
            }) as Component<K, L>
        })
        .collect();
    InfMorphism { components }
}

/// Residual of the ∞-morphism relation on given inputs:
/// `Σ φ(ℓ(v_S), v_rest) - Σ_{partitions} ℓ'(φ_{B_1}, …, φ_{B_k})`.
pub fn inf_morphism_residual<A, B>(src: &A, tgt: &B, phi: &InfMorphism<A::K, B::K>, keys: &[A::K]) -> Lin<B::K>
where
    A: SLInf,
    B: SLInf,
    A::K: 'static,
    B::K: 'static,
{
    let n = keys.len();
    let degrees: Vec<i64> = keys.iter().map(Graded::deg).collect();
    let inputs: Vec<Lin<A::K>> = keys.iter().map(|k| Lin::basis(k.clone())).collect();
    let mut out = Lin::zero();
    for mask in 1u32..(1 << n) {
        let front: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let back: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let mut perm = front.clone();
        perm.extend_from_slice(&back);
        let sign = parity_sign(koszul_parity(&perm, &degrees));
        let inner_args: Vec<&Lin<A::K>> = front.iter().map(|&i| &inputs[i]).collect();
        let inner = ell(src, &inner_args);
        if inner.is_zero() {
            continue;
        }
        let mut args = vec![&inner];
        args.extend(back.iter().map(|&i| &inputs[i]));
        out.add_scaled(&phi.apply(&args), &sign);
    }
    for blocks in index_partitions(n) {
        let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
        let sign = parity_sign(koszul_parity(&perm, &degrees));
        let values: Vec<Lin<B::K>> = blocks
            .iter()
            .map(|b| {
                let args: Vec<&Lin<A::K>> = b.iter().map(|&i| &inputs[i]).collect();
                phi.apply(&args)
            })
            .collect();
        if values.iter().any(Lin::is_zero) {
            continue;
        }
        let refs: Vec<&Lin<B::K>> = values.iter().collect();
        out.add_scaled(&ell(tgt, &refs), &-sign);
    }
    out
}

/// Checks the ∞-morphism relations on all sorted tuples of `basis`.
pub fn check_inf_morphism<A, B>(src: &A, tgt: &B, phi: &InfMorphism<A::K, B::K>, basis: &[A::K], n_max: usize) -> RelationReport
where
    A: SLInf,
    B: SLInf,
    A::K: 'static,
    B::K: 'static,
{
    let mut checked = 0;
    for n in 1..=n_max {
        for tuple in sorted_tuples(basis, n, src.max_weight()) {
            if repeats_odd(&tuple) {
                continue;
            }
            checked += 1;
            let r = inf_morphism_residual(src, tgt, phi, &tuple);
            if !r.is_zero() {
                return RelationReport { checked, violation: Some(format!("arity {n} on {tuple:?}: {r:?}")) };
            }
        }
    }
    RelationReport { checked, violation: None }
}

#[cfg(test)]
mod tests;
