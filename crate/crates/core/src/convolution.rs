//! Truncated polynomial dg algebras `Aⁿ = k̄[x, y]` (`dy = xⁿ`) with their
//! contraction onto homology, convolution sL∞ algebras on `hom(C, A)` for
//! cocommutative coalgebras `C`, and the two composites of pre- and
//! post-composition by ∞-morphisms that fail to agree.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use num_traits::One;

use crate::error::{invalid, Error, Result};
use crate::graded::{GMap, GradedSpace, Sym, Vector};
use crate::htt::{transfer_ainfty, AInf, AInfTransfer, Contraction};
use crate::lin::{multilinear, Graded, Lin};
use crate::linfty::{ell, mc_residual, CommAlg, SLInf};
use crate::scalar::{inv_factorial, parity_sign, show_q, Q};

// ---------------------------------------------------------------------------
// Aⁿ and Hⁿ

/// Monomial `x^x y^{0|1}`; `|x| = 0`, `|y| = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct XY {
    pub x: u32,
    pub y: bool,
}

impl Graded for XY {
    fn deg(&self) -> i64 {
        self.y as i64
    }
}

impl fmt::Display for XY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.x {
            0 => {}
            1 => write!(f, "x")?,
            a => write!(f, "x^{a}")?,
        }
        if self.y {
            write!(f, "y")?;
        }
        Ok(())
    }
}

/// Homology class `z_a = [x^a]`, written `z^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Z(pub u32);

impl Graded for Z {
    fn deg(&self) -> i64 {
        0
    }
}

impl fmt::Display for Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            1 => write!(f, "z"),
            a => write!(f, "z^{a}"),
        }
    }
}

/// Writes `-x^3`, `2xy - y`, `0`.
pub fn show_poly<K: Ord + Clone + fmt::Display>(v: &Lin<K>) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (k, c)) in v.iter().enumerate() {
        let neg = c < &Q::from_integer(0.into());
        let mag = if neg { -c.clone() } else { c.clone() };
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !mag.is_one() {
            out.push_str(&show_q(&mag));
        }
        out.push_str(&k.to_string());
    }
    out
}

/// `Aⁿ` modulo monomials with `x`-exponent above `cap`, a dg ideal. The
/// contraction identities hold exactly on [`PolyDga::exact_keys`].
#[derive(Clone, Debug)]
pub struct PolyDga {
    pub n: u32,
    pub cap: u32,
}

impl PolyDga {
    pub fn new(n: u32, cap: u32) -> Result<Self> {
        if n < 2 {
            return invalid(format!("A^n needs n >= 2, got {n}"));
        }
        if cap < n {
            return invalid(format!("exponent cap {cap} below n = {n}"));
        }
        Ok(PolyDga { n, cap })
    }

    pub fn basis(&self) -> Vec<XY> {
        let xs = (1..=self.cap).map(|x| XY { x, y: false });
        xs.chain((0..=self.cap).map(|x| XY { x, y: true })).collect()
    }

    /// Monomials on which `1 - ip = dh + hd` holds despite the truncation.
    pub fn exact_keys(&self) -> Vec<XY> {
        self.basis().into_iter().filter(|m| m.x + self.n <= self.cap).collect()
    }

    fn mono(&self, x: u32, y: bool) -> Lin<XY> {
        if x > self.cap || (x == 0 && !y) {
            Lin::zero()
        } else {
            Lin::basis(XY { x, y })
        }
    }

    pub fn mul_keys(&self, a: &XY, b: &XY) -> Lin<XY> {
        if a.y && b.y {
            return Lin::zero();
        }
        self.mono(a.x + b.x, a.y || b.y)
    }

    pub fn mul(&self, a: &Lin<XY>, b: &Lin<XY>) -> Lin<XY> {
        multilinear(&[a, b], |ks| self.mul_keys(&ks[0], &ks[1]))
    }

    pub fn d_key(&self, k: &XY) -> Lin<XY> {
        if k.y {
            self.mono(k.x + self.n, false)
        } else {
            Lin::zero()
        }
    }

    /// `i(z_a) = x^a`, `p(x^a) = z_a` for `a < n`, `h(x^a) = x^{a-n} y` for `a ≥ n`.
    pub fn contraction(&self) -> Contraction<XY, Z> {
        let n = self.n;
        Contraction {
            small_basis: (1..n).map(Z).collect(),
            small_diff: Rc::new(|_: &Z| Lin::zero()),
            i: Rc::new(|z: &Z| Lin::basis(XY { x: z.0, y: false })),
            p: Rc::new(move |m: &XY| if !m.y && m.x < n { Lin::basis(Z(m.x)) } else { Lin::zero() }),
            h: Rc::new(move |m: &XY| {
                if !m.y && m.x >= n {
                    Lin::basis(XY { x: m.x - n, y: true })
                } else {
                    Lin::zero()
                }
            }),
        }
    }
}

impl AInf for PolyDga {
    type K = XY;
    fn differential(&self, k: &XY) -> Lin<XY> {
        self.d_key(k)
    }
    fn op(&self, keys: &[XY]) -> Lin<XY> {
        match keys {
            [a, b] => self.mul_keys(a, b),
            _ => Lin::zero(),
        }
    }
    fn arity_cap(&self) -> usize {
        2
    }
}

/// `Aⁿ` truncated so that transfer up to `arity_cap` is exact, with its
/// verified contraction onto `Hⁿ`.
pub fn build_an(n: u32, arity_cap: usize) -> Result<(PolyDga, Contraction<XY, Z>)> {
    let alg = PolyDga::new(n, arity_cap as u32 * (n - 1).max(1) + n)?;
    let c = alg.contraction();
    let report = c.verify(|k| alg.d_key(k), &alg.exact_keys());
    if let Some(v) = report.violation {
        return Err(Error::Validation(format!("A^{n} contraction: {v}")));
    }
    Ok((alg, c))
}

// ---------------------------------------------------------------------------
// non-symmetric composites

/// Operation symbols: `Id`, the product `Mu(k)` of arity `k` (degree 0) and
/// the cooperation `Co(k)` of arity `k` (degree `k - 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NsOp {
    Id,
    Mu(usize),
    Co(usize),
}

impl NsOp {
    pub fn deg(&self) -> i64 {
        match self {
            NsOp::Co(k) => *k as i64 - 1,
            _ => 0,
        }
    }
}

/// `outer ∘ (op_1(leaves), …, op_k(leaves))`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Nested<L> {
    pub outer: NsOp,
    pub blocks: Vec<(NsOp, Vec<L>)>,
}

impl<L> Nested<L> {
    fn leaf_count(&self) -> usize {
        self.blocks.iter().map(|b| b.1.len()).sum()
    }
}

/// Decomposition map of the coalgebra `V = ⊕_{i ≥ 1} k v_i` (`|v_i| = i`)
/// through arity 3: `Id ⊗ v_n + Σ (-1)^{i_1} Co(2) ⊗ v_{i_1} v_{i_2}
/// - Σ (-1)^{j_2} Co(3) ⊗ v_{j_1} v_{j_2} v_{j_3}`.
pub fn coalgebra_v(n: u32) -> Vec<(Q, NsOp, Vec<u32>)> {
    let mut out = vec![(Q::one(), NsOp::Id, vec![n])];
    for a in 1..n.saturating_sub(1) {
        let b = n - 1 - a;
        out.push((parity_sign(a % 2 == 1), NsOp::Co(2), vec![a, b]));
    }
    for a in 1..n {
        for b in 1..n {
            if a + b + 1 <= n.saturating_sub(2) {
                let c = n - 2 - a - b;
                out.push((-parity_sign(b % 2 == 1), NsOp::Co(3), vec![a, b, c]));
            }
        }
    }
    out
}

fn compositions(n: u32) -> Vec<Vec<u32>> {
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

/// The ∞-morphism `Φ(v_n) = Σ_k Σ_{i_1+…+i_k=n} Mu(k) ⊗ v_{i_1} ⋯ v_{i_k}`,
/// or the identity `Id ⊗ v_n`.
pub fn phi_v(n: u32, full: bool) -> Vec<(Q, NsOp, Vec<u32>)> {
    if !full {
        return vec![(Q::one(), NsOp::Id, vec![n])];
    }
    compositions(n)
        .into_iter()
        .map(|c| (Q::one(), if c.len() == 1 { NsOp::Id } else { NsOp::Mu(c.len()) }, c))
        .collect()
}

/// `F = f_1 ⊗ f_2 ⊗ f_3`: `f_i(v_1) = z` for all `i`, `f_1(v_2) = z`,
/// `f_2(v_2) = f_3(v_2) = 0`.
fn f_value(slot: usize, v: u32) -> Option<Z> {
    match (slot, v) {
        (_, 1) | (0, 2) => Some(Z(1)),
        _ => None,
    }
}

/// Applies `F` leafwise. The component of `f_j` hit has degree `-|v|`, and
/// passes every earlier symbol of the flattened word.
fn apply_f(t: &Nested<u32>) -> Option<(Q, Nested<Z>)> {
    let mut passed = t.outer.deg();
    let mut odd = false;
    let mut slot = 0;
    let mut blocks = Vec::with_capacity(t.blocks.len());
    for (op, leaves) in &t.blocks {
        passed += op.deg();
        let mut zs = Vec::with_capacity(leaves.len());
        for &v in leaves {
            zs.push(f_value(slot, v)?);
            odd ^= (v as i64 * passed) % 2 != 0;
            passed += v as i64;
            slot += 1;
        }
        blocks.push((*op, zs));
    }
    Some((parity_sign(odd), Nested { outer: t.outer, blocks }))
}

/// All ways of replacing each leaf by one term of `expand(leaf)`.
fn expand_leaves(
    coeff: Q,
    outer: NsOp,
    leaves: &[u32],
    expand: impl Fn(u32) -> Vec<(Q, NsOp, Vec<u32>)>,
) -> Vec<(Q, Nested<u32>)> {
    let mut acc = vec![(coeff, Nested { outer, blocks: Vec::new() })];
    for &v in leaves {
        let options = expand(v);
        acc = acc
            .into_iter()
            .flat_map(|(c, t)| {
                options.iter().map(move |(c2, op, ls)| {
                    let mut t = t.clone();
                    t.blocks.push((*op, ls.clone()));
                    (&c * c2, t)
                })
            })
            .collect();
    }
    acc
}

/// Value of an ∞-morphism `Hⁿ ⇝ Aⁿ` on one block `op(z…)`.
fn psi_block(psi: &AInfTransfer<XY, Z>, full: bool, op: NsOp, zs: &[Lin<Z>]) -> Lin<XY> {
    let refs: Vec<&Lin<Z>> = zs.iter().collect();
    match op {
        NsOp::Id => multilinear(&refs, |ks| (psi.i_inf.first)(&ks[0])),
        NsOp::Co(_) if full => multilinear(&refs, |ks| psi.i_inf.component(ks)),
        _ => Lin::zero(),
    }
}

/// The two composites on `(μ_3^∨ ⊗ F)(v_at)`: pre-composition by `Φ` after
/// post-composition by `Ψ = i_∞`, and the reverse order. `phi_full = false`
/// replaces `Φ` by the identity; `psi_full = false` replaces `i_∞` by `i`.
pub fn composites(psi: &AInfTransfer<XY, Z>, big: &PolyDga, phi_full: bool, psi_full: bool, at: u32) -> (Lin<XY>, Lin<XY>) {
    let arity = 3;
    let mut first = Lin::zero();
    for (c, outer, leaves) in phi_v(at, phi_full) {
        for (c, t) in expand_leaves(c, outer, &leaves, coalgebra_v) {
            if t.leaf_count() != arity {
                continue;
            }
            let Some((s, t)) = apply_f(&t) else { continue };
            let values: Vec<Lin<XY>> = t
                .blocks
                .iter()
                .map(|(op, zs)| {
                    let zs: Vec<Lin<Z>> = zs.iter().map(|z| Lin::basis(*z)).collect();
                    psi_block(psi, psi_full, *op, &zs)
                })
                .collect();
            let product = values[1..].iter().fold(values[0].clone(), |acc, v| big.mul(&acc, v));
            first.add_scaled(&product, &(c * s));
        }
    }
    let mut second = Lin::zero();
    for (c, outer, leaves) in coalgebra_v(at) {
        for (c, t) in expand_leaves(c, outer, &leaves, |v| phi_v(v, phi_full)) {
            if t.leaf_count() != arity {
                continue;
            }
            let Some((s, t)) = apply_f(&t) else { continue };
            let values: Vec<Lin<Z>> = t
                .blocks
                .iter()
                .map(|(op, zs)| match op {
                    NsOp::Id => Lin::basis(zs[0]),
                    _ => psi.small.op(zs),
                })
                .collect();
            second.add_scaled(&psi_block(psi, psi_full, t.outer, &values), &(c * s));
        }
    }
    (first, second)
}

/// Both composites for `A = A²`, `A' = H²`, `Ψ = i_∞` and the ∞-morphism `Φ`
/// of `V`, evaluated at `v_4`.
pub fn counterexample_run() -> Result<(Lin<XY>, Lin<XY>)> {
    let (big, c) = build_an(2, 3)?;
    let t = transfer_ainfty(&big, &c, 3)?;
    Ok(composites(&t, &big, true, true, 4))
}

// ---------------------------------------------------------------------------
// convolution sL∞ algebras

/// Conilpotent cocommutative coassociative coalgebra on a finite basis with
/// its iterated reduced coproducts `Δ^n: C → C^{⊗n}`.
#[derive(Clone, Debug)]
pub struct CocomCoalg {
    pub space: GradedSpace,
    pub diff: GMap,
    /// `coops[n - 2][c]` is `Δ^n(c)` as ordered tensors.
    pub coops: Vec<Vec<Lin<Vec<Sym>>>>,
}

impl CocomCoalg {
    /// From the reduced coproduct; checks coassociativity, cocommutativity,
    /// the coderivation property of `diff` and conilpotency.
    pub fn new(space: GradedSpace, diff: GMap, coproduct: Vec<Lin<(Sym, Sym)>>) -> Result<Self> {
        let dim = space.dim();
        if coproduct.len() != dim || diff.source != space || diff.degree != -1 {
            return invalid("coalgebra data does not match its space");
        }
        let delta2: Vec<Lin<Vec<Sym>>> = coproduct.iter().map(|v| v.map_keys(|(a, b)| vec![*a, *b])).collect();
        let split_first = |t: &Vec<Sym>| -> Lin<Vec<Sym>> {
            delta2[t[0].idx].map_keys(|pair| pair.iter().chain(&t[1..]).copied().collect())
        };
        let split_last = |t: &Vec<Sym>| -> Lin<Vec<Sym>> {
            let n = t.len();
            delta2[t[n - 1].idx].map_keys(|pair| t[..n - 1].iter().chain(pair.iter()).copied().collect())
        };
        for (c, v) in delta2.iter().enumerate() {
            if v.apply(split_first) != v.apply(split_last) {
                return invalid(format!("coproduct is not coassociative on {}", space.id(c)));
            }
            let swapped: Lin<Vec<Sym>> = v
                .iter()
                .map(|(t, x)| (vec![t[1], t[0]], x * parity_sign(t[0].deg * t[1].deg % 2 != 0)))
                .collect();
            if &swapped != v {
                return invalid(format!("coproduct is not cocommutative on {}", space.id(c)));
            }
            let lhs = v.apply(|t| tensor_d(&diff, t));
            let rhs: Lin<Vec<Sym>> = diff.image(c).apply(|k| delta2[k.idx].clone());
            if lhs != rhs {
                return invalid(format!("differential is not a coderivation on {}", space.id(c)));
            }
        }
        let mut coops = vec![delta2.clone()];
        while coops.last().is_some_and(|l| l.iter().any(|v| !v.is_zero())) {
            if coops.len() > dim {
                return invalid("coalgebra is not conilpotent");
            }
            let next = coops.last().unwrap().iter().map(|v| v.apply(split_first)).collect();
            coops.push(next);
        }
        coops.pop();
        Ok(CocomCoalg { space, diff, coops })
    }

    /// Dual of `t k[t] / (t^{m+1})`: `c_1, …, c_m` in degree 0 and weight `k`,
    /// `Δ(c_k) = Σ_{i+j=k} c_i ⊗ c_j`.
    pub fn truncated_poly_dual(m: u32) -> Result<Self> {
        let space = GradedSpace::new((1..=m).map(|k| (format!("c{k}"), 0, k)))?;
        let diff = GMap::zero(space.clone(), space.clone(), -1);
        let coproduct = (1..=m)
            .map(|k| (1..k).map(|i| ((space.sym(i as usize - 1), space.sym((k - i) as usize - 1)), Q::one())).collect())
            .collect();
        CocomCoalg::new(space, diff, coproduct)
    }

    /// Largest `n` with `Δ^n ≠ 0`, at least 1.
    pub fn depth(&self) -> usize {
        self.coops.len() + 1
    }

    pub fn coop(&self, n: usize, c: usize) -> Option<&Lin<Vec<Sym>>> {
        self.coops.get(n.checked_sub(2)?).map(|l| &l[c])
    }
}

fn tensor_d(d: &GMap, t: &[Sym]) -> Lin<Vec<Sym>> {
    let mut out = Lin::zero();
    let mut passed = 0;
    for (j, k) in t.iter().enumerate() {
        let sign = parity_sign(passed % 2 != 0);
        for (dk, c) in d.image(k.idx).iter() {
            let mut u = t.to_vec();
            u[j] = *dk;
            out.add_term(u, c * &sign);
        }
        passed += k.deg;
    }
    out
}

/// Elementary map `c ↦ a` of degree `|a| - |c|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HomKey {
    pub c: Sym,
    pub a: Sym,
}

impl Graded for HomKey {
    fn deg(&self) -> i64 {
        self.a.deg - self.c.deg
    }
    fn weight(&self) -> u32 {
        self.c.wt + self.a.wt
    }
}

/// `hom(C, A)` for a cocommutative coalgebra `C` and an sL∞ algebra `A`:
/// `ℓ_n(f_1, …, f_n) = ℓ_n^A ∘ (f_1 ⊗ ⋯ ⊗ f_n) ∘ Δ^n` and
/// `ℓ_1(f) = ℓ_1^A f - (-1)^{|f|} f d_C`.
pub struct Conv<'a, A: SLInf<K = Sym>> {
    pub coalg: &'a CocomCoalg,
    pub target: &'a A,
    pub target_space: &'a GradedSpace,
    /// For each ordered tuple of coalgebra indices, the `(c, coefficient)`
    /// with that tuple in `Δ^n(c)`.
    index: BTreeMap<Vec<usize>, Vec<(usize, Q)>>,
}

impl<'a, A: SLInf<K = Sym>> Conv<'a, A> {
    pub fn new(coalg: &'a CocomCoalg, target: &'a A, target_space: &'a GradedSpace) -> Self {
        let mut index: BTreeMap<Vec<usize>, Vec<(usize, Q)>> = BTreeMap::new();
        for level in &coalg.coops {
            for (c, v) in level.iter().enumerate() {
                for (t, x) in v.iter() {
                    index.entry(t.iter().map(|s| s.idx).collect()).or_default().push((c, x.clone()));
                }
            }
        }
        Conv { coalg, target, target_space, index }
    }

    pub fn basis(&self) -> Vec<HomKey> {
        self.coalg.space.syms().flat_map(|c| self.target_space.syms().map(move |a| HomKey { c, a })).collect()
    }

    pub fn to_hom(&self, f: &GMap) -> Lin<HomKey> {
        self.coalg
            .space
            .syms()
            .flat_map(|c| f.image(c.idx).iter().map(move |(a, x)| (HomKey { c, a: *a }, x.clone())).collect::<Vec<_>>())
            .collect()
    }

    pub fn to_gmap(&self, v: &Lin<HomKey>, degree: i64) -> Result<GMap> {
        let mut images = vec![Vector::zero(); self.coalg.space.dim()];
        for (k, x) in v.iter() {
            images[k.c.idx].add_term(k.a, x.clone());
        }
        GMap::new(self.coalg.space.clone(), self.target_space.clone(), degree, images)
    }
}

impl<'a, A: SLInf<K = Sym>> SLInf for Conv<'a, A> {
    type K = HomKey;
    fn differential(&self, k: &HomKey) -> Lin<HomKey> {
        let mut out: Lin<HomKey> = self.target.differential(&k.a).iter().map(|(a, x)| (HomKey { c: k.c, a: *a }, x.clone())).collect();
        let sign = -parity_sign(k.deg() % 2 != 0);
        for c in self.coalg.space.syms() {
            let x = self.coalg.diff.image(c.idx).coeff(&k.c);
            if x != Q::from_integer(0.into()) {
                out.add_term(HomKey { c, a: k.a }, x * &sign);
            }
        }
        out
    }
    fn bracket(&self, keys: &[HomKey]) -> Lin<HomKey> {
        let tuple: Vec<usize> = keys.iter().map(|k| k.c.idx).collect();
        let Some(targets) = self.index.get(&tuple) else { return Lin::zero() };
        let mut odd = false;
        for j in 0..keys.len() {
            for i in 0..j {
                odd ^= keys[j].deg() * keys[i].c.deg % 2 != 0;
            }
        }
        let values: Vec<Sym> = keys.iter().map(|k| k.a).collect();
        let top = self.target.bracket(&values);
        let sign = parity_sign(odd);
        let mut out = Lin::zero();
        for (c, x) in targets {
            let c = self.coalg.space.sym(*c);
            for (a, y) in top.iter() {
                out.add_term(HomKey { c, a: *a }, x * y * &sign);
            }
        }
        out
    }
    fn arity_cap(&self) -> usize {
        self.target.arity_cap().min(self.coalg.depth())
    }
    fn max_weight(&self) -> u32 {
        self.coalg.space.max_weight() + self.target.max_weight()
    }
}

/// `ℓ_n(f_1, …, f_n)` on homogeneous maps `C → A`.
pub fn conv_bracket<A: SLInf<K = Sym>>(conv: &Conv<A>, fs: &[&GMap]) -> Result<GMap> {
    let n = fs.len();
    if n == 0 || n > conv.coalg.depth().max(1) {
        return invalid(format!("arity {n} beyond the cooperations of the coalgebra"));
    }
    let degree = fs.iter().map(|f| f.degree).sum::<i64>() - 1;
    let args: Vec<Lin<HomKey>> = fs.iter().map(|f| conv.to_hom(f)).collect();
    let refs: Vec<&Lin<HomKey>> = args.iter().collect();
    conv.to_gmap(&ell(conv, &refs), degree)
}

#[derive(Clone, Debug)]
pub struct McTwReport {
    pub residual_mc: GMap,
    pub residual_tw: GMap,
    pub equal: bool,
}

/// Maurer–Cartan residual of a degree-0 `φ` in `hom(C, A)` against the
/// twisting residual `∂φ + Σ_n (1/n!) ℓ_n^A (φ ⊗ ⋯ ⊗ φ) Δ^n`, evaluated
/// pointwise on `C`.
pub fn mc_equals_tw<A: SLInf<K = Sym>>(conv: &Conv<A>, phi: &GMap) -> Result<McTwReport> {
    if phi.degree != 0 {
        return invalid("twisting morphisms have degree 0");
    }
    let residual_mc = conv.to_gmap(&mc_residual(conv, &conv.to_hom(phi))?, -1)?;
    let mut images = Vec::with_capacity(conv.coalg.space.dim());
    for c in conv.coalg.space.syms() {
        let mut v = crate::linfty::d(conv.target, phi.image(c.idx));
        v -= &phi.apply(conv.coalg.diff.image(c.idx));
        for n in 2..=conv.coalg.depth() {
            let Some(delta) = conv.coalg.coop(n, c.idx) else { break };
            for (t, x) in delta.iter() {
                let args: Vec<&Vector> = t.iter().map(|s| phi.image(s.idx)).collect();
                v.add_scaled(&ell(conv.target, &args), &(x * inv_factorial(n)));
            }
        }
        images.push(v);
    }
    let residual_tw = GMap::new(conv.coalg.space.clone(), conv.target_space.clone(), -1, images)?;
    let equal = residual_mc == residual_tw;
    Ok(McTwReport { residual_mc, residual_tw, equal })
}

/// `t k[t] / (t^{m+1})` with `t` in degree 0; keys are exponents.
#[derive(Clone, Copy, Debug)]
pub struct TruncPoly {
    pub m: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TPow(pub u32);

impl Graded for TPow {
    fn deg(&self) -> i64 {
        0
    }
}

impl CommAlg for TruncPoly {
    type K = TPow;
    fn mul(&self, a: &TPow, b: &TPow) -> Lin<TPow> {
        if a.0 + b.0 <= self.m {
            Lin::basis(TPow(a.0 + b.0))
        } else {
            Lin::zero()
        }
    }
    fn d(&self, _: &TPow) -> Lin<TPow> {
        Lin::zero()
    }
    fn unit(&self) -> TPow {
        TPow(0)
    }
}

/// The map `c_k ↦ coefficient of t^k` of an element of `A ⊗ t k[t]/(t^{m+1})`.
pub fn series_to_hom(coalg: &CocomCoalg, target_space: &GradedSpace, x: &Lin<(Sym, TPow)>) -> Result<GMap> {
    let mut images = vec![Vector::zero(); coalg.space.dim()];
    for ((a, t), c) in x.iter() {
        let idx = coalg
            .space
            .index_of(&format!("c{}", t.0))
            .ok_or_else(|| Error::InvalidInput(format!("no coalgebra element for t^{}", t.0)))?;
        images[idx].add_term(*a, c.clone());
    }
    GMap::new(coalg.space.clone(), target_space.clone(), 0, images)
}

#[cfg(test)]
mod tests;
