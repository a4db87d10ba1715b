//! Homotopy transfer along a contraction `(i, p, h)` with `1 - ip = dh + hd`:
//! shifted L∞ structures over reduced rooted trees, A∞ structures over
//! reduced planar trees, the ∞-morphism `i_∞`, multicomplexes, and the
//! Maurer–Cartan pushforward along `p_∞`.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dupont::{Cell, Mono, Simplex};
use crate::error::{invalid, Error, Result};
use crate::graded::{koszul_parity, repeats_odd, sort_graded, GMap, GradedSpace, Sym, Vector};
use crate::lin::{multilinear, Graded, Lin};
use crate::linalg::Matrix;
use crate::linfty::{ell, sorted_tuples, symmetric_power, InfMorphism, RelationReport, SLInf, SLInfty};
use crate::scalar::{factorial, inv_factorial, parity_sign, q, Q};
use crate::trees::{enumerate_planar, enumerate_rooted, PSlot, PTree, RTree};

pub type LinMap<A, B> = Rc<dyn Fn(&A) -> Lin<B>>;

/// Contraction of a big complex onto a small one. `small_diff` is the
/// differential of the small side.
#[derive(Clone)]
pub struct Contraction<K: Ord, J: Ord> {
    pub small_basis: Vec<J>,
    pub small_diff: LinMap<J, J>,
    pub i: LinMap<J, K>,
    pub p: LinMap<K, J>,
    pub h: LinMap<K, K>,
}

impl<K: Graded + 'static, J: Graded + 'static> Contraction<K, J> {
    pub fn inc(&self, v: &Lin<J>) -> Lin<K> {
        v.apply(|k| (self.i)(k))
    }

    pub fn proj(&self, v: &Lin<K>) -> Lin<J> {
        v.apply(|k| (self.p)(k))
    }

    pub fn htpy(&self, v: &Lin<K>) -> Lin<K> {
        v.apply(|k| (self.h)(k))
    }

    pub fn small_d(&self, v: &Lin<J>) -> Lin<J> {
        v.apply(|k| (self.small_diff)(k))
    }

    /// Checks `pi = 1`, `hi = 0`, `di = id` on the small basis and
    /// `1 - ip = dh + hd`, `hh = 0`, `ph = 0` on `big_keys`.
    pub fn verify(&self, big_d: impl Fn(&K) -> Lin<K>, big_keys: &[K]) -> RelationReport {
        let d = |v: &Lin<K>| v.apply(&big_d);
        let mut checked = 0;
        let fail = |checked, what: String| RelationReport { checked, violation: Some(what) };
        for b in &self.small_basis {
            checked += 1;
            let ib = (self.i)(b);
            if self.proj(&ib) != Lin::basis(b.clone()) {
                return fail(checked, format!("pi != 1 on {b:?}"));
            }
            if !self.htpy(&ib).is_zero() {
                return fail(checked, format!("hi != 0 on {b:?}"));
            }
            if d(&ib) != self.inc(&self.small_d(&Lin::basis(b.clone()))) {
                return fail(checked, format!("i is not a chain map on {b:?}"));
            }
        }
        for k in big_keys {
            checked += 1;
            let v = Lin::basis(k.clone());
            let lhs = &v - &self.inc(&self.proj(&v));
            let hv = self.htpy(&v);
            let rhs = &d(&hv) + &self.htpy(&d(&v));
            if lhs != rhs {
                return fail(checked, format!("1 - ip != dh + hd on {k:?}"));
            }
            if !self.htpy(&hv).is_zero() {
                return fail(checked, format!("hh != 0 on {k:?}"));
            }
            if !self.proj(&hv).is_zero() {
                return fail(checked, format!("ph != 0 on {k:?}"));
            }
        }
        RelationReport { checked, violation: None }
    }
}

/// `i = p = 1`, `h = 0`.
pub fn identity_contraction<K: Graded + 'static>(basis: Vec<K>, d: LinMap<K, K>) -> Contraction<K, K> {
    Contraction {
        small_basis: basis,
        small_diff: d,
        i: Rc::new(|k: &K| Lin::basis(k.clone())),
        p: Rc::new(|k: &K| Lin::basis(k.clone())),
        h: Rc::new(|_: &K| Lin::zero()),
    }
}

/// `1 ⊗ (i, p, h)` on `X ⊗ big`, with `(1 ⊗ h)(x ⊗ a) = (-1)^{|x|} x ⊗ h(a)`.
pub fn tensor_contraction<G, K, J>(
    left_basis: &[G],
    left_diff: LinMap<G, G>,
    c: &Contraction<K, J>,
) -> Contraction<(G, K), (G, J)>
where
    G: Graded + 'static,
    K: Graded + 'static,
    J: Graded + 'static,
{
    fn pair<G: Graded, K: Graded>(x: &G, v: Lin<K>, sign: &Q) -> Lin<(G, K)> {
        v.iter().map(|(k, c)| ((x.clone(), k.clone()), c * sign)).collect()
    }
    let small_basis =
        left_basis.iter().flat_map(|x| c.small_basis.iter().map(move |b| (x.clone(), b.clone()))).collect();
    let (ci, cp, ch, cd) = (c.i.clone(), c.p.clone(), c.h.clone(), c.small_diff.clone());
    let small_diff = Rc::new(move |(x, b): &(G, J)| {
        let mut out: Lin<(G, J)> = left_diff(x).iter().map(|(y, c)| ((y.clone(), b.clone()), c.clone())).collect();
        out += &pair(x, cd(b), &parity_sign(x.deg() % 2 != 0));
        out
    });
    Contraction {
        small_basis,
        small_diff,
        i: Rc::new(move |(x, b): &(G, J)| pair(x, ci(b), &Q::one())),
        p: Rc::new(move |(x, a): &(G, K)| pair(x, cp(a), &Q::one())),
        h: Rc::new(move |(x, a): &(G, K)| pair(x, ch(a), &parity_sign(x.deg() % 2 != 0))),
    }
}

/// Dupont's contraction of polynomial forms on `Δ^n` onto Whitney forms.
pub fn dupont_contraction(n: usize) -> Contraction<Mono, Cell> {
    let s = Rc::new(Simplex::new(n));
    let (si, sp, sh) = (s.clone(), s.clone(), s.clone());
    let cells = s.cells();
    let ds = s.clone();
    Contraction {
        small_basis: cells,
        small_diff: Rc::new(move |c: &Cell| ds.d_whitney(&Lin::basis(c.clone()))),
        i: Rc::new(move |c: &Cell| si.i(&Lin::basis(c.clone()))),
        p: Rc::new(move |m: &Mono| sp.p(&Lin::basis(m.clone()))),
        h: Rc::new(move |m: &Mono| sh.h(&Lin::basis(m.clone()))),
    }
}

/// Contraction of a finite complex onto its homology. The differential must
/// preserve weights; each (degree, weight) block is split as
/// boundaries ⊕ homology representatives ⊕ a complement of the cycles.
pub fn homology_contraction(space: &GradedSpace, d: &GMap) -> Result<(GradedSpace, Contraction<Sym, Sym>)> {
    homology_contraction_weights(space, d, |_| true)
}

/// As [`homology_contraction`], but only the weights selected by `reduce`
/// are contracted; the other blocks are kept with `i = p = 1`, `h = 0`, and
/// the small differential is `p d i`.
pub fn homology_contraction_weights(
    space: &GradedSpace,
    d: &GMap,
    reduce: impl Fn(u32) -> bool,
) -> Result<(GradedSpace, Contraction<Sym, Sym>)> {
    if d.degree != -1 {
        return invalid("differential must have degree -1");
    }
    let syms: Vec<Sym> = space.syms().collect();
    for s in &syms {
        if d.image(s.idx).keys().any(|t| t.wt != s.wt) {
            return Err(Error::Unsupported("differential does not preserve weights".into()));
        }
    }
    let mut blocks: BTreeMap<(i64, u32), Vec<usize>> = BTreeMap::new();
    for s in &syms {
        blocks.entry((s.deg, s.wt)).or_default().push(s.idx);
    }
    let matrix = |from: &[usize], to: &[usize]| -> Matrix {
        let cols: Vec<Vec<Q>> =
            from.iter().map(|&j| to.iter().map(|&r| d.image(j).coeff(&space.sym(r))).collect()).collect();
        Matrix::from_cols(to.len(), &cols)
    };
    let empty = Vec::new();
    let n = space.dim();
    let mut p_img: Vec<Vector> = vec![Lin::zero(); n];
    let mut h_img: Vec<Vector> = vec![Lin::zero(); n];
    let mut reps: Vec<(i64, u32, Vec<Q>, Vec<usize>)> = Vec::new();
    for (&(deg, wt), idx) in &blocks {
        if !reduce(wt) {
            for &g in idx {
                let mut z = vec![Q::zero(); idx.len()];
                z[idx.iter().position(|&j| j == g).unwrap_or_default()] = Q::one();
                p_img[g] = Lin::term(Sym { idx: reps.len(), deg, wt }, Q::one());
                reps.push((deg, wt, z, idx.clone()));
            }
            continue;
        }
        let below = blocks.get(&(deg - 1, wt)).unwrap_or(&empty);
        let above = blocks.get(&(deg + 1, wt)).unwrap_or(&empty);
        let d_out = matrix(idx, below);
        let d_in = matrix(above, idx);
        let (_, out_pivots) = d_out.rref();
        let (_, in_pivots) = d_in.rref();
        // boundaries d(e_j) for pivot columns j of the incoming map
        let mut frame: Vec<Vec<Q>> = in_pivots.iter().map(|&j| d_in.col(j)).collect();
        let n_bound = frame.len();
        let mut homology = Vec::new();
        for z in d_out.kernel() {
            let trial = Matrix::from_cols(idx.len(), &frame);
            if !trial.in_column_span(&z) {
                frame.push(z.clone());
                homology.push(z);
            }
        }
        for &j in &out_pivots {
            let mut e = vec![Q::zero(); idx.len()];
            e[j] = Q::one();
            frame.push(e);
        }
        let m = Matrix::from_cols(idx.len(), &frame);
        let first_small = reps.len();
        for z in &homology {
            reps.push((deg, wt, z.clone(), idx.clone()));
        }
        for (col, &g) in idx.iter().enumerate() {
            let mut e = vec![Q::zero(); idx.len()];
            e[col] = Q::one();
            let coords = m.solve(&e).ok_or_else(|| Error::Validation("singular splitting".into()))?;
            let mut hv = Lin::zero();
            for (b, &j) in in_pivots.iter().enumerate() {
                hv.add_term(space.sym(above[j]), coords[b].clone());
            }
            h_img[g] = hv;
            let mut pv = Lin::zero();
            for a in 0..homology.len() {
                pv.add_term(Sym { idx: first_small + a, deg, wt }, coords[n_bound + a].clone());
            }
            p_img[g] = pv;
        }
    }
    let small = GradedSpace::new(reps.iter().enumerate().map(|(k, (deg, wt, _, _))| (format!("z{k}"), *deg, *wt)))?;
    let i_img: Vec<Vector> = reps
        .iter()
        .map(|(_, _, z, idx)| idx.iter().zip(z).map(|(&g, c)| (space.sym(g), c.clone())).collect())
        .collect();
    let small_basis: Vec<Sym> = small.syms().collect();
    let small_d: Vec<Vector> = i_img.iter().map(|v| d.apply(v).apply(|k| p_img[k.idx].clone())).collect();
    let c = Contraction {
        small_basis,
        small_diff: Rc::new(move |s: &Sym| small_d[s.idx].clone()),
        i: Rc::new(move |s: &Sym| i_img[s.idx].clone()),
        p: Rc::new(move |s: &Sym| p_img[s.idx].clone()),
        h: Rc::new(move |s: &Sym| h_img[s.idx].clone()),
    };
    Ok((small, c))
}

// ---------------------------------------------------------------------------
// shifted L∞ transfer

/// Leaf labels of a rooted tree in evaluation order: the vertex's own
/// leaves, then each child subtree.
fn dfs_labels(t: &RTree, out: &mut Vec<usize>) {
    out.extend_from_slice(&t.leaves);
    for c in &t.children {
        dfs_labels(c, out);
    }
}

/// `τ^h`: at each vertex apply `ℓ` to its leaf inputs followed by
/// `homotopy(child value)` for each child. Inputs enter in evaluation order.
pub fn tau_h_eval<A: SLInf + ?Sized>(
    alg: &A,
    homotopy: &dyn Fn(&Lin<A::K>) -> Lin<A::K>,
    tree: &RTree,
    inputs: &[Lin<A::K>],
) -> Lin<A::K> {
    let mut args: Vec<Lin<A::K>> = tree.leaves.iter().map(|&l| inputs[l].clone()).collect();
    for c in &tree.children {
        let v = tau_h_eval(alg, homotopy, c, inputs);
        if v.is_zero() {
            return Lin::zero();
        }
        args.push(homotopy(&v));
    }
    let refs: Vec<&Lin<A::K>> = args.iter().collect();
    ell(alg, &refs)
}

/// `Σ_τ ± τ^h(ℓ)` over reduced labeled rooted trees, with the Koszul sign of
/// reordering the inputs into evaluation order.
pub fn tree_sum<A: SLInf + ?Sized>(
    alg: &A,
    homotopy: &dyn Fn(&Lin<A::K>) -> Lin<A::K>,
    trees: &[RTree],
    inputs: &[Lin<A::K>],
    degrees: &[i64],
) -> Lin<A::K> {
    let mut out = Lin::zero();
    for t in trees {
        let mut order = Vec::with_capacity(inputs.len());
        dfs_labels(t, &mut order);
        let sign = parity_sign(koszul_parity(&order, degrees));
        out.add_scaled(&tau_h_eval(alg, homotopy, t, inputs), &sign);
    }
    out
}

/// Transferred shifted L∞ structure `ℓ'_n = Σ_τ ± p τ^h i^{⊗n}`, where the
/// internal edges carry `-h` (the perturbation sign for `1 - ip = dh + hd`).
pub struct TransferredSL<'a, A: SLInf, J: Ord> {
    pub big: &'a A,
    pub contraction: &'a Contraction<A::K, J>,
    trees: Vec<Vec<RTree>>,
    arity_cap: usize,
}

pub fn transfer_slinfty<'a, A, J>(
    big: &'a A,
    contraction: &'a Contraction<A::K, J>,
    arity_cap: usize,
) -> Result<TransferredSL<'a, A, J>>
where
    A: SLInf,
    A::K: 'static,
    J: Graded + 'static,
{
    let mut trees = vec![Vec::new(), Vec::new()];
    for n in 2..=arity_cap {
        trees.push(enumerate_rooted(n, true)?);
    }
    Ok(TransferredSL { big, contraction, trees, arity_cap })
}

impl<'a, A, J> TransferredSL<'a, A, J>
where
    A: SLInf,
    A::K: 'static,
    J: Graded + 'static,
{
    fn minus_h(&self) -> impl Fn(&Lin<A::K>) -> Lin<A::K> + '_ {
        move |v| -self.contraction.htpy(v)
    }

    fn raw_sum(&self, keys: &[J]) -> Lin<A::K> {
        let n = keys.len();
        if n < 2 || n > self.arity_cap {
            return Lin::zero();
        }
        let inputs: Vec<Lin<A::K>> = keys.iter().map(|k| (self.contraction.i)(k)).collect();
        let degrees: Vec<i64> = keys.iter().map(Graded::deg).collect();
        tree_sum(self.big, &self.minus_h(), &self.trees[n], &inputs, &degrees)
    }

    /// The transferred structure tabulated on the small basis.
    pub fn tabulate(&self) -> SLInfty<J> {
        SLInfty::tabulate(self, &self.contraction.small_basis, self.arity_cap)
    }

    /// `i_∞` with `i_1 = i` and `i_n = Σ_τ ± (-h) τ^h i^{⊗n}`.
    pub fn i_infinity(&self) -> InfMorphism<J, A::K> {
        let basis = &self.contraction.small_basis;
        let mut tables = vec![basis.iter().map(|b| (vec![b.clone()], (self.contraction.i)(b))).collect()];
        for n in 2..=self.arity_cap {
            let mut t = BTreeMap::new();
            for tuple in sorted_tuples(basis, n, self.big.max_weight()) {
                if repeats_odd(&tuple) {
                    continue;
                }
                let v = -self.contraction.htpy(&self.raw_sum(&tuple));
                if !v.is_zero() {
                    t.insert(tuple, v);
                }
            }
            tables.push(t);
        }
        InfMorphism::from_tables(tables)
    }
}

impl<'a, A, J> SLInf for TransferredSL<'a, A, J>
where
    A: SLInf,
    A::K: 'static,
    J: Graded + 'static,
{
    type K = J;
    fn differential(&self, k: &J) -> Lin<J> {
        (self.contraction.small_diff)(k)
    }
    fn bracket(&self, keys: &[J]) -> Lin<J> {
        self.contraction.proj(&self.raw_sum(keys))
    }
    fn arity_cap(&self) -> usize {
        self.arity_cap
    }
    fn max_weight(&self) -> u32 {
        self.big.max_weight()
    }
}

// ---------------------------------------------------------------------------
// non-symmetric A∞ transfer

/// Non-symmetric A∞ structure, unshifted: `m_n` (`n ≥ 2`) of degree `n - 2`.
pub trait AInf {
    type K: Graded;
    fn differential(&self, k: &Self::K) -> Lin<Self::K>;
    fn op(&self, keys: &[Self::K]) -> Lin<Self::K>;
    fn arity_cap(&self) -> usize;
}

/// A∞ structure given by tables on all basis tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfTable<K: Ord> {
    pub basis: Vec<K>,
    pub diff: BTreeMap<K, Lin<K>>,
    pub ops: BTreeMap<Vec<K>, Lin<K>>,
    pub arity_cap: usize,
}

impl<K: Graded> AInfTable<K> {
    /// Nonzero values of `m_n`.
    pub fn arity(&self, n: usize) -> impl Iterator<Item = (&Vec<K>, &Lin<K>)> {
        self.ops.iter().filter(move |(k, _)| k.len() == n)
    }
}

impl<K: Graded> AInf for AInfTable<K> {
    type K = K;
    fn differential(&self, k: &K) -> Lin<K> {
        self.diff.get(k).cloned().unwrap_or_default()
    }
    fn op(&self, keys: &[K]) -> Lin<K> {
        self.ops.get(keys).cloned().unwrap_or_default()
    }
    fn arity_cap(&self) -> usize {
        self.arity_cap
    }
}

/// Parity of `Σ_i |a_i|(n - i)`: the Koszul sign of `s^{⊗n}` on `a`.
fn suspension_parity<K: Graded>(keys: &[K]) -> bool {
    let n = keys.len();
    keys.iter().enumerate().map(|(i, k)| k.deg() * (n - 1 - i) as i64).sum::<i64>() % 2 != 0
}


/// Bar operation on desuspended keys: `b_1 = -d`,
/// `b_n(a) = (-1)^{Σ|a_i|(n-i)} m_n(a)`. With this normalization the bar
/// relations agree up to sign with `∂(m_n) = Σ (-1)^{n_2(n_1-j)+j+1} m_{n_1} ∘_j m_{n_2}`.
pub fn bar_op<A: AInf + ?Sized>(alg: &A, keys: &[A::K]) -> Lin<A::K> {
    match keys.len() {
        0 => Lin::zero(),
        1 => -alg.differential(&keys[0]),
        n if n > alg.arity_cap() => Lin::zero(),
        _ => alg.op(keys).scale(&parity_sign(suspension_parity(keys))),
    }
}

fn bar_apply<A: AInf + ?Sized>(alg: &A, args: &[&Lin<A::K>]) -> Lin<A::K> {
    multilinear(args, |ks| bar_op(alg, ks))
}

/// Planar `τ^h` in bar form: each vertex applies `b_k`, internal edges `h`.
fn ptree_eval<A: AInf + ?Sized>(
    alg: &A,
    homotopy: &dyn Fn(&Lin<A::K>) -> Lin<A::K>,
    tree: &PTree,
    inputs: &[Lin<A::K>],
) -> Lin<A::K> {
    let mut args = Vec::with_capacity(tree.slots.len());
    let mut pos = 0;
    for slot in &tree.slots {
        match slot {
            PSlot::Leaf => {
                args.push(inputs[pos].clone());
                pos += 1;
            }
            PSlot::Node(t) => {
                let a = t.arity();
                let v = ptree_eval(alg, homotopy, t, &inputs[pos..pos + a]);
                if v.is_zero() {
                    return Lin::zero();
                }
                args.push(homotopy(&v));
                pos += a;
            }
        }
    }
    let refs: Vec<&Lin<A::K>> = args.iter().collect();
    bar_apply(alg, &refs)
}

/// A∞ ∞-morphism: `first` is the chain map, `higher[n-2]` tabulates the
/// unshifted component of arity `n` (degree `n - 1`).
#[derive(Clone)]
pub struct AInfMorphism<J: Ord, K: Ord> {
    pub first: LinMap<J, K>,
    pub higher: Vec<BTreeMap<Vec<J>, Lin<K>>>,
}

impl<J: Graded, K: Graded> AInfMorphism<J, K> {
    pub fn component(&self, keys: &[J]) -> Lin<K> {
        match keys.len() {
            0 => Lin::zero(),
            1 => (self.first)(&keys[0]),
            n => self.higher.get(n - 2).and_then(|t| t.get(keys)).cloned().unwrap_or_default(),
        }
    }

    /// Bar component: `(-1)^{Σ|a_i|(n-i)}` times the unshifted one.
    fn bar_component(&self, keys: &[J]) -> Lin<K> {
        self.component(keys).scale(&parity_sign(suspension_parity(keys)))
    }

    pub fn arity(&self) -> usize {
        self.higher.len() + 1
    }
}

pub struct AInfTransfer<K: Ord, J: Ord> {
    pub small: AInfTable<J>,
    pub i_inf: AInfMorphism<J, K>,
}

fn all_tuples<K: Clone>(basis: &[K], n: usize) -> Vec<Vec<K>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                basis.iter().map(move |b| {
                    let mut t = t.clone();
                    t.push(b.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// `m'_n = Σ_{t ∈ PT_n} ± p t^h i^{⊗n}` and `i_n = Σ ± h t^h i^{⊗n}`; the
/// planar sums are taken in bar form, where they carry no signs.
pub fn transfer_ainfty<A, J>(big: &A, c: &Contraction<A::K, J>, arity_cap: usize) -> Result<AInfTransfer<A::K, J>>
where
    A: AInf,
    A::K: 'static,
    J: Graded + 'static,
{
    let homotopy = |v: &Lin<A::K>| c.htpy(v);
    let mut diff = BTreeMap::new();
    for b in &c.small_basis {
        let v = (c.small_diff)(b);
        if !v.is_zero() {
            diff.insert(b.clone(), v);
        }
    }
    let mut ops = BTreeMap::new();
    let mut higher = Vec::new();
    for n in 2..=arity_cap {
        let trees = enumerate_planar(n, true)?;
        let mut table = BTreeMap::new();
        for tuple in all_tuples(&c.small_basis, n) {
            let inputs: Vec<Lin<A::K>> = tuple.iter().map(|k| (c.i)(k)).collect();
            let mut raw = Lin::zero();
            for t in &trees {
                raw += &ptree_eval(big, &homotopy, t, &inputs);
            }
            if raw.is_zero() {
                continue;
            }
            let sign = parity_sign(suspension_parity(&tuple));
            let m = c.proj(&raw).scale(&sign);
            if !m.is_zero() {
                ops.insert(tuple.clone(), m);
            }
            let comp = c.htpy(&raw).scale(&sign);
            if !comp.is_zero() {
                table.insert(tuple, comp);
            }
        }
        higher.push(table);
    }
    let small = AInfTable { basis: c.small_basis.clone(), diff, ops, arity_cap };
    Ok(AInfTransfer { small, i_inf: AInfMorphism { first: c.i.clone(), higher } })
}

/// `∂(m_n) - Σ (-1)^{n_2(n_1-j)+j+1} m_{n_1} ∘_j m_{n_2}` on `keys`, where
/// `∂(m_n) = d m_n - (-1)^{n} m_n d` and `∘_j` carries the Koszul sign of
/// `m_{n_2}` passing the first `j - 1` inputs.
pub fn printed_relation<A: AInf + ?Sized>(alg: &A, keys: &[A::K]) -> Lin<A::K> {
    let n = keys.len();
    let m = |ks: &[A::K]| if ks.len() == 1 { alg.differential(&ks[0]) } else { alg.op(ks) };
    let d = |v: &Lin<A::K>| v.apply(|k| alg.differential(k));
    let mut out = d(&m(keys));
    let sign_n = parity_sign(n % 2 == 1);
    let mut before = 0i64;
    for j in 0..n {
        let mut ks = keys.to_vec();
        let dk = alg.differential(&keys[j]);
        let s = parity_sign(before % 2 != 0);
        for (k, c) in dk.iter() {
            ks[j] = k.clone();
            out.add_scaled(&m(&ks), &(-(&sign_n * &s) * c));
        }
        before += keys[j].deg();
    }
    for n1 in 2..n {
        let n2 = n + 1 - n1;
        for j in 1..=n1 {
            let exp = n2 * (n1 - j) + j + 1;
            let passed: i64 = keys[..j - 1].iter().map(Graded::deg).sum();
            let koszul = parity_sign((n2 as i64 - 2) * passed % 2 != 0);
            let inner = m(&keys[j - 1..j - 1 + n2]);
            let sign = -(parity_sign(exp % 2 == 1) * koszul);
            for (k, c) in inner.iter() {
                let mut ks = keys[..j - 1].to_vec();
                ks.push(k.clone());
                ks.extend_from_slice(&keys[j - 1 + n2..]);
                out.add_scaled(&m(&ks), &(&sign * c));
            }
        }
    }
    out
}

/// `Σ_{n_1+n_2=n+1} Σ_j ± b_{n_1}(…, b_{n_2}(…), …)` with `b_1 = -d`.
pub fn bar_relation<A: AInf + ?Sized>(alg: &A, keys: &[A::K]) -> Lin<A::K> {
    let n = keys.len();
    let mut out = Lin::zero();
    for n2 in 1..=n {
        let n1 = n + 1 - n2;
        let mut passed = 0i64;
        for j in 0..n1 {
            let inner = bar_op(alg, &keys[j..j + n2]);
            let sign = parity_sign(passed % 2 != 0);
            for (k, c) in inner.iter() {
                let mut ks = keys[..j].to_vec();
                ks.push(k.clone());
                ks.extend_from_slice(&keys[j + n2..]);
                out.add_scaled(&bar_op(alg, &ks), &(&sign * c));
            }
            passed += keys[j].deg() + 1;
        }
    }
    out
}

fn check_all<K: Graded>(basis: &[K], n_max: usize, mut rel: impl FnMut(&[K]) -> Lin<K>) -> RelationReport {
    let mut checked = 0;
    for n in 1..=n_max {
        for tuple in all_tuples(basis, n) {
            checked += 1;
            let r = rel(&tuple);
            if !r.is_zero() {
                return RelationReport { checked, violation: Some(format!("arity {n} relation fails on {tuple:?}: {r:?}")) };
            }
        }
    }
    RelationReport { checked, violation: None }
}

/// Checks both the printed A∞ relations and the bar relations on all tuples
/// of `basis` up to `n_max`.
pub fn check_ainf<A: AInf + ?Sized>(alg: &A, basis: &[A::K], n_max: usize) -> RelationReport {
    let printed = check_all(basis, n_max, |ks| if ks.len() < 2 { Lin::zero() } else { printed_relation(alg, ks) });
    if !printed.ok() {
        return printed;
    }
    let bar = check_all(basis, n_max, |ks| bar_relation(alg, ks));
    RelationReport { checked: printed.checked + bar.checked, violation: bar.violation }
}

/// Bar form of the ∞-morphism relation:
/// `Σ ± f(…, b'(…), …) = Σ b(f(…), …, f(…))`.
pub fn ainf_morphism_residual<A, B>(src: &A, tgt: &B, f: &AInfMorphism<A::K, B::K>, keys: &[A::K]) -> Lin<B::K>
where
    A: AInf,
    B: AInf,
{
    let n = keys.len();
    let mut out = Lin::zero();
    for n2 in 1..=n {
        let n1 = n + 1 - n2;
        let mut passed = 0i64;
        for j in 0..n1 {
            let inner = bar_op(src, &keys[j..j + n2]);
            let sign = parity_sign(passed % 2 != 0);
            for (k, c) in inner.iter() {
                let mut ks = keys[..j].to_vec();
                ks.push(k.clone());
                ks.extend_from_slice(&keys[j + n2..]);
                out.add_scaled(&f.bar_component(&ks), &(&sign * c));
            }
            passed += keys[j].deg() + 1;
        }
    }
    for comp in compositions(n) {
        let mut values = Vec::with_capacity(comp.len());
        let mut pos = 0;
        for &len in &comp {
            values.push(f.bar_component(&keys[pos..pos + len]));
            pos += len;
        }
        if values.iter().any(Lin::is_zero) {
            continue;
        }
        let refs: Vec<&Lin<B::K>> = values.iter().collect();
        out -= &bar_apply(tgt, &refs);
    }
    out
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

pub fn check_ainf_morphism<A, B>(src: &A, tgt: &B, f: &AInfMorphism<A::K, B::K>, basis: &[A::K], n_max: usize) -> RelationReport
where
    A: AInf,
    B: AInf,
{
    let mut checked = 0;
    for n in 1..=n_max {
        for tuple in all_tuples(basis, n) {
            checked += 1;
            let r = ainf_morphism_residual(src, tgt, f, &tuple);
            if !r.is_zero() {
                return RelationReport { checked, violation: Some(format!("arity {n} on {tuple:?}: {r:?}")) };
            }
        }
    }
    RelationReport { checked, violation: None }
}

// ---------------------------------------------------------------------------
// multicomplexes (algebras over the dual numbers)

/// Bicomplex on a space whose basis symbols carry the column index as their
/// weight: `d` is vertical (weight-preserving), `delta` lowers the column by
/// one, `d² = Δ² = dΔ + Δd = 0`.
#[derive(Clone, Debug)]
pub struct Bicomplex {
    pub space: GradedSpace,
    pub d: GMap,
    pub delta: GMap,
}

impl Bicomplex {
    pub fn check(&self) -> bool {
        let sq = |f: &GMap, g: &GMap| self.space.syms().all(|s| f.apply(g.image(s.idx)).is_zero());
        let anti = self.space.syms().all(|s| {
            (&self.d.apply(self.delta.image(s.idx)) + &self.delta.apply(self.d.image(s.idx))).is_zero()
        });
        sq(&self.d, &self.d) && sq(&self.delta, &self.delta) && anti
    }
}

/// Seeded bicomplex with `cols × rows` cells of dimension `1..=max_dim`.
/// Vertical differentials and horizontal maps are drawn from the solution
/// spaces of the (linear, column by column) bicomplex equations.
pub fn random_bicomplex(seed: u64, cols: usize, rows: usize, max_dim: usize) -> Result<Bicomplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<Vec<usize>> = (0..cols).map(|_| (0..rows).map(|_| rng.gen_range(1..=max_dim)).collect()).collect();
    let mut entries = Vec::new();
    let mut index = vec![vec![Vec::new(); rows]; cols];
    for (col, ds) in dims.iter().enumerate() {
        for (row, &dim) in ds.iter().enumerate() {
            for k in 0..dim {
                index[col][row].push(entries.len());
                entries.push((format!("v{col}{row}_{k}"), (col + row) as i64, col as u32));
            }
        }
    }
    let space = GradedSpace::new(entries)?;
    let small_int = |rng: &mut ChaCha8Rng| q(rng.gen_range(-2..=2));
    // vertical: vert[col][row] maps row -> row-1
    let mut vert: Vec<Vec<Matrix>> = Vec::new();
    for col in 0..cols {
        let mut maps = vec![Matrix::zeros(0, dims[col][0])];
        for row in 1..rows {
            let (src, tgt) = (dims[col][row], dims[col][row - 1]);
            let prev = &maps[row - 1];
            let ker = prev.kernel();
            let mut m = Matrix::zeros(tgt, src);
            if !ker.is_empty() {
                for j in 0..src {
                    let mut v = vec![Q::zero(); tgt];
                    for k in &ker {
                        let c = small_int(&mut rng);
                        for (a, x) in v.iter_mut().zip(k) {
                            *a += &c * x;
                        }
                    }
                    for (r, x) in v.into_iter().enumerate() {
                        m.set(r, j, x);
                    }
                }
            }
            maps.push(m);
        }
        vert.push(maps);
    }
    // horizontal: horiz[col][row] maps (col,row) -> (col-1,row)
    let mut horiz: Vec<Vec<Matrix>> = vec![(0..rows).map(|r| Matrix::zeros(0, dims[0][r])).collect()];
    for col in 1..cols {
        let shapes: Vec<(usize, usize)> = (0..rows).map(|r| (dims[col - 1][r], dims[col][r])).collect();
        let unknowns: usize = shapes.iter().map(|(a, b)| a * b).sum();
        let build = |u: &[Q]| -> Vec<Matrix> {
            let mut pos = 0;
            shapes
                .iter()
                .map(|&(t, s)| {
                    let mut m = Matrix::zeros(t, s);
                    for r in 0..t {
                        for c in 0..s {
                            m.set(r, c, u[pos].clone());
                            pos += 1;
                        }
                    }
                    m
                })
                .collect()
        };
        let residual = |blocks: &[Matrix]| -> Vec<Q> {
            let mut out = Vec::new();
            for row in 0..rows {
                if row > 0 {
                    let a = vert[col - 1][row].mul(&blocks[row]);
                    let b = blocks[row - 1].mul(&vert[col][row]);
                    for r in 0..a.rows {
                        for c in 0..a.cols {
                            out.push(a.get(r, c) + b.get(r, c));
                        }
                    }
                }
                if col >= 2 {
                    let sq = horiz[col - 1][row].mul(&blocks[row]);
                    for r in 0..sq.rows {
                        for c in 0..sq.cols {
                            out.push(sq.get(r, c).clone());
                        }
                    }
                }
            }
            out
        };
        let cols_of: Vec<Vec<Q>> = (0..unknowns)
            .map(|k| {
                let mut u = vec![Q::zero(); unknowns];
                u[k] = Q::one();
                residual(&build(&u))
            })
            .collect();
        let n_eq = cols_of.first().map_or(0, Vec::len);
        let ker = if n_eq == 0 {
            (0..unknowns)
                .map(|k| {
                    let mut u = vec![Q::zero(); unknowns];
                    u[k] = Q::one();
                    u
                })
                .collect()
        } else {
            Matrix::from_cols(n_eq, &cols_of).kernel()
        };
        let mut u = vec![Q::zero(); unknowns];
        for k in &ker {
            let c = small_int(&mut rng);
            for (a, x) in u.iter_mut().zip(k) {
                *a += &c * x;
            }
        }
        horiz.push(build(&u));
    }
    let mut d_img = vec![Lin::zero(); space.dim()];
    let mut delta_img = vec![Lin::zero(); space.dim()];
    for col in 0..cols {
        for row in 0..rows {
            for (j, &g) in index[col][row].iter().enumerate() {
                if row > 0 {
                    let m = &vert[col][row];
                    d_img[g] = (0..m.rows).map(|r| (space.sym(index[col][row - 1][r]), m.get(r, j).clone())).collect();
                }
                if col > 0 {
                    let m = &horiz[col][row];
                    delta_img[g] =
                        (0..m.rows).map(|r| (space.sym(index[col - 1][row][r]), m.get(r, j).clone())).collect();
                }
            }
        }
    }
    let d = GMap::new(space.clone(), space.clone(), -1, d_img)?;
    let delta = GMap::new(space.clone(), space.clone(), -1, delta_img)?;
    Ok(Bicomplex { space, d, delta })
}

/// Transferred multicomplex on vertical homology.
pub struct TransferredMulticomplex {
    pub small: GradedSpace,
    pub contraction: Contraction<Sym, Sym>,
    /// `deltas[k-1] = Δ_k = p Δ (-hΔ)^{k-1} i`.
    pub deltas: Vec<GMap>,
}

pub fn transfer_multicomplex(b: &Bicomplex, n_max: usize) -> Result<TransferredMulticomplex> {
    let (small, c) = homology_contraction(&b.space, &b.d)?;
    let mut deltas = Vec::new();
    for k in 1..=n_max {
        let images = small
            .syms()
            .map(|z| {
                let mut v = b.delta.apply(&(c.i)(&z));
                for _ in 1..k {
                    v = -b.delta.apply(&c.htpy(&v));
                }
                c.proj(&v)
            })
            .collect();
        deltas.push(GMap::new(small.clone(), small.clone(), -1, images)?);
    }
    Ok(TransferredMulticomplex { small, contraction: c, deltas })
}

/// `Σ_{a+b=n} Δ_a Δ_b = 0` for `n ≤ deltas.len()`, where `Δ_0` is `d0`.
pub fn check_multicomplex(d0: &GMap, deltas: &[GMap]) -> RelationReport {
    let all: Vec<&GMap> = std::iter::once(d0).chain(deltas).collect();
    let mut checked = 0;
    for n in 0..all.len() {
        for s in d0.source.syms() {
            checked += 1;
            let mut total = Lin::zero();
            for a in 0..=n {
                total += &all[a].apply(all[n - a].image(s.idx));
            }
            if !total.is_zero() {
                return RelationReport { checked, violation: Some(format!("relation {n} fails on {s:?}")) };
            }
        }
    }
    RelationReport { checked, violation: None }
}

// ---------------------------------------------------------------------------
// Maurer–Cartan pushforward along p_∞

/// Element of the reduced symmetric coalgebra: sorted key tuples.
pub type SymElt<K> = Lin<Vec<K>>;

fn sym_monomial<K: Graded>(keys: &[K]) -> SymElt<K> {
    let (sorted, odd) = sort_graded(keys);
    if repeats_odd(&sorted) {
        return Lin::zero();
    }
    Lin::term(sorted, parity_sign(odd))
}

/// `e^x - 1 = Σ_{n≥1} x^{⊙n}/n!` for degree-0 `x`, up to total weight.
pub fn sym_exp<K: Graded>(x: &Lin<K>, max_weight: u32) -> SymElt<K> {
    let mut out = Lin::zero();
    let mut n = 1;
    loop {
        let term = symmetric_power(x, n, max_weight, |ks| Lin::basis(ks.to_vec()));
        if term.is_zero() {
            return out;
        }
        out.add_scaled(&term, &inv_factorial(n));
        n += 1;
    }
}

fn sym_weight<K: Graded>(keys: &[K]) -> u32 {
    keys.iter().map(Graded::weight).sum()
}

/// Coderivation extending the brackets `ℓ_{≥2}`.
fn sym_brackets<A: SLInf + ?Sized>(alg: &A, e: &SymElt<A::K>, memo: &mut BTreeMap<Vec<A::K>, Lin<A::K>>) -> SymElt<A::K> {
    let mut out = Lin::zero();
    for (keys, c) in e.iter() {
        let m = keys.len();
        let degrees: Vec<i64> = keys.iter().map(Graded::deg).collect();
        for mask in 1u32..(1 << m) {
            let size = mask.count_ones() as usize;
            if size < 2 || size > alg.arity_cap() {
                continue;
            }
            let front: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let back: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 0).collect();
            let mut perm = front.clone();
            perm.extend_from_slice(&back);
            let sign = parity_sign(koszul_parity(&perm, &degrees)) * c;
            let args: Vec<A::K> = front.iter().map(|&i| keys[i].clone()).collect();
            let value = memo.entry(args).or_insert_with_key(|a| alg.bracket(a));
            for (k, vc) in value.iter() {
                let mut ks = vec![k.clone()];
                ks.extend(back.iter().map(|&i| keys[i].clone()));
                if sym_weight(&ks) <= alg.max_weight() {
                    out.add_scaled(&sym_monomial(&ks), &(&sign * vc));
                }
            }
        }
    }
    out
}

/// Symmetrized tensor-trick homotopy:
/// `K(v_1⊙…⊙v_m) = Σ_j Σ_{A} |B|!|A|!/m! · (v_B ⊙ h v_j ⊙ ip v_A)` with
/// Koszul signs, `B` the complement of `A ∪ {j}`.
fn sym_homotopy<K: Graded + 'static, J: Graded + 'static>(
    c: &Contraction<K, J>,
    e: &SymElt<K>,
    max_weight: u32,
    memo: &mut BTreeMap<K, (Lin<K>, Lin<K>)>,
) -> SymElt<K> {
    let mut out = Lin::zero();
    for (keys, coeff) in e.iter() {
        let m = keys.len();
        let degrees: Vec<i64> = keys.iter().map(Graded::deg).collect();
        let m_fact = Q::from_integer(factorial(m));
        for k in keys {
            memo.entry(k.clone()).or_insert_with(|| ((c.h)(k), c.inc(&(c.p)(k))));
        }
        for j in 0..m {
            let hv = memo[&keys[j]].0.clone();
            if hv.is_zero() {
                continue;
            }
            let others: Vec<usize> = (0..m).filter(|&i| i != j).collect();
            for mask in 0u32..(1 << others.len()) {
                let a_set: Vec<usize> = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect();
                let b_set: Vec<usize> = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 0).map(|(_, &i)| i).collect();
                let mut perm = b_set.clone();
                perm.push(j);
                perm.extend_from_slice(&a_set);
                let passed: i64 = b_set.iter().map(|&i| degrees[i]).sum();
                let odd = koszul_parity(&perm, &degrees) ^ (passed % 2 != 0);
                let factor = Q::from_integer(factorial(b_set.len()) * factorial(a_set.len())) / &m_fact;
                let scale = parity_sign(odd) * factor * coeff;
                let mut args: Vec<Lin<K>> = b_set.iter().map(|&i| Lin::basis(keys[i].clone())).collect();
                args.push(hv.clone());
                for &i in &a_set {
                    args.push(memo[&keys[i]].1.clone());
                }
                let refs: Vec<&Lin<K>> = args.iter().collect();
                let expanded = multilinear(&refs, |ks| {
                    if sym_weight(ks) <= max_weight {
                        sym_monomial(ks)
                    } else {
                        Lin::zero()
                    }
                });
                out.add_scaled(&expanded, &scale);
            }
        }
    }
    out
}

/// Perturbation sign in `P_∞ = P Σ_k (s δ K)^k`; the value passing the
/// validations of [`select_pushforward_sign`].
pub const PUSHFORWARD_SIGN: i64 = -1;

/// `MC(p_∞)(x)`: the length-one part of `P Σ_k (s δ K)^k (e^x)`, where `K`
/// is the symmetrized tensor-trick homotopy and `δ` the bracket coderivation.
pub fn mc_pushforward_p_signed<A, J>(big: &A, c: &Contraction<A::K, J>, x: &Lin<A::K>, sign: i64) -> Result<Lin<J>>
where
    A: SLInf,
    A::K: 'static,
    J: Graded + 'static,
{
    if x.keys().any(|k| k.deg() != 0) {
        return invalid("Maurer–Cartan candidates have degree 0");
    }
    Ok(perturbed_projection(big, c, sym_exp(x, big.max_weight()), sign))
}

/// Length-one part of `P Σ_k (s δ K)^k (e)`.
fn perturbed_projection<A, J>(big: &A, c: &Contraction<A::K, J>, e: SymElt<A::K>, sign: i64) -> Lin<J>
where
    A: SLInf,
    A::K: 'static,
    J: Graded + 'static,
{
    let s = q(sign);
    let mut acc = e;
    let mut total = acc.clone();
    let (mut brackets, mut homotopies) = (BTreeMap::new(), BTreeMap::new());
    while !acc.is_zero() {
        let k = sym_homotopy(c, &acc, big.max_weight(), &mut homotopies);
        acc = sym_brackets(big, &k, &mut brackets).scale(&s);
        total += &acc;
    }
    let mut out = Lin::zero();
    for (keys, coeff) in total.iter() {
        if keys.len() == 1 {
            out.add_scaled(&(c.p)(&keys[0]), coeff);
        }
    }
    out
}

/// Polarized component `p_n(v_1, …, v_n)` of the perturbed projection, so
/// that the pushforward is `Σ p_n(x, …, x)/n!`.
pub fn p_infinity_component<A, J>(big: &A, c: &Contraction<A::K, J>, keys: &[A::K], sign: i64) -> Lin<J>
where
    A: SLInf,
    A::K: 'static,
    J: Graded + 'static,
{
    if sym_weight(keys) > big.max_weight() {
        return Lin::zero();
    }
    perturbed_projection(big, c, sym_monomial(keys), sign)
}

pub fn mc_pushforward_p<A, J>(big: &A, c: &Contraction<A::K, J>, x: &Lin<A::K>) -> Result<Lin<J>>
where
    A: SLInf,
    A::K: 'static,
    J: Graded + 'static,
{
    mc_pushforward_p_signed(big, c, x, PUSHFORWARD_SIGN)
}

/// Outcome of the four pushforward validations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PushforwardReport {
    /// `P(MC(i_∞)(y)) = y`.
    pub round_trip: bool,
    /// `h(MC(i_∞)(P(x))) = 0`.
    pub gauge_fixed: bool,
    /// `x ↦ (P(x), h(x))` is injective on the samples.
    pub injective: bool,
    /// `P(x)` is Maurer–Cartan in the small algebra.
    pub lands_in_mc: bool,
    pub failures: Vec<String>,
}

impl PushforwardReport {
    pub fn ok(&self) -> bool {
        self.round_trip && self.gauge_fixed && self.injective && self.lands_in_mc
    }
}

/// Runs the validations on small-side MC samples `ys` and big-side MC
/// samples `xs`.
pub fn validate_pushforward<A, J>(
    transfer: &TransferredSL<'_, A, J>,
    ys: &[Lin<J>],
    xs: &[Lin<A::K>],
    sign: i64,
) -> Result<PushforwardReport>
where
    A: SLInf,
    A::K: 'static,
    J: Graded + 'static,
{
    let c = transfer.contraction;
    let big = transfer.big;
    let i_inf = transfer.i_infinity();
    let w = big.max_weight();
    let mut r = PushforwardReport { round_trip: true, gauge_fixed: true, injective: true, lands_in_mc: true, failures: Vec::new() };
    for y in ys {
        let x = i_inf.mc_pushforward(y, w);
        let back = mc_pushforward_p_signed(big, c, &x, sign)?;
        if &back != y {
            r.round_trip = false;
            r.failures.push(format!("round trip: {y:?} -> {back:?}"));
        }
    }
    let mut seen: Vec<(Lin<J>, Lin<A::K>, &Lin<A::K>)> = Vec::new();
    for x in xs {
        let y = mc_pushforward_p_signed(big, c, x, sign)?;
        if !crate::linfty::is_mc(transfer, &y) {
            r.lands_in_mc = false;
            r.failures.push(format!("not Maurer–Cartan: {y:?}"));
        }
        if !c.htpy(&i_inf.mc_pushforward(&y, w)).is_zero() {
            r.gauge_fixed = false;
            r.failures.push(format!("h(i_∞(P(x))) != 0 for {x:?}"));
        }
        let hx = c.htpy(x);
        if seen.iter().any(|(py, phx, other)| py == &y && phx == &hx && *other != x) {
            r.injective = false;
            r.failures.push(format!("collision at {x:?}"));
        }
        seen.push((y, hx, x));
    }
    Ok(r)
}

/// Built-in probe: `g` free nilpotent on `a` (degree -1) and `b` (degree
/// 0) with `db = a`, weight cap 3, suspended and tensored with `Ω_1`. Samples
/// are flows of `0` along gauges `sb ⊗ f(t)`. A sign is accepted when the
/// pushforward validations pass and the polarized components satisfy the
/// ∞-morphism relations through arity 2.
pub fn select_pushforward_sign() -> Result<i64> {
    let alg = crate::freelie::FreeAlg::new(&[("a", -1), ("b", 0)], 3)?;
    let deriv = crate::freelie::LieDerivation { images: vec![Lin::zero(), alg.gen(0)] };
    let g = crate::linfty::lie_from_free(&alg, Some(&deriv))?;
    let (space, sg) = crate::linfty::suspend_lie(&g)?;
    let omega = Simplex::new(1);
    let big = crate::linfty::TensorSL { g: &sg, a: &omega };
    let sg_diff = {
        let sg = sg.clone();
        Rc::new(move |k: &Sym| sg.differential(k)) as LinMap<Sym, Sym>
    };
    let c = tensor_contraction(&sg.basis, sg_diff, &dupont_contraction(1));
    let t = transfer_slinfty(&big, &c, 3)?;
    let sb = space.sym(space.index_of("b").ok_or_else(|| Error::Validation("missing generator".into()))?);
    let t1 = omega.t(1);
    let profiles = [t1.clone(), omega.mul(&t1, &t1), &omega.one() + &t1, &t1 - &omega.mul(&t1, &omega.mul(&t1, &t1))];
    let mut xs = Vec::new();
    for f in &profiles {
        let gauge: Lin<(Sym, Mono)> = f.iter().map(|(m, c)| ((sb, m.clone()), c.clone())).collect();
        xs.push(crate::linfty::gauge_flow(&big, &gauge, &Lin::zero())?);
    }
    let small = t.tabulate();
    let keys: Vec<(Sym, Mono)> = sg
        .basis
        .iter()
        .flat_map(|x| omega.monomials(1).into_iter().map(move |m| (*x, m)))
        .filter(|k| k.deg().abs() <= 1)
        .collect();
    let shared = Rc::new((sg.clone(), omega.clone(), c.clone()));
    let mut good = Vec::new();
    for sign in [1, -1] {
        let ys: Vec<_> = xs.iter().map(|x| mc_pushforward_p_signed(&big, &c, x, sign)).collect::<Result<_>>()?;
        if !validate_pushforward(&t, &ys, &xs, sign)?.ok() {
            continue;
        }
        let data = shared.clone();
        let comp = Rc::new(move |ks: &[(Sym, Mono)]| {
            let big = crate::linfty::TensorSL { g: &data.0, a: &data.1 };
            p_infinity_component(&big, &data.2, ks, sign)
        }) as crate::linfty::Component<(Sym, Mono), (Sym, Cell)>;
        let p_inf = InfMorphism { components: vec![comp.clone(), comp] };
        if crate::linfty::check_inf_morphism(&big, &small, &p_inf, &keys, 2).ok() {
            good.push(sign);
        }
    }
    match good.as_slice() {
        [s] => Ok(*s),
        _ => Err(Error::Unsupported(format!("pushforward sign not determined by the probe: {good:?}"))),
    }
}
