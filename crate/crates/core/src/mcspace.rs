//! Maurer–Cartan elements at a fixed simplicial level: polynomial forms on
//! `Δ^n`, Whitney cells, the maps between them, and presentations of the low
//! levels of the cosimplicial models.

use std::cell::{OnceCell, RefCell};
use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dupont::{Cell, Mono, Simplex};
use crate::error::{invalid, Error, Result};
use crate::freelie::{bernoulli, lawrence_sullivan, FreeAlg, LieDerivation, TensorElt};
use crate::graded::{koszul_parity, repeats_odd, sort_graded, GradedSpace, Sym, Vector};
use crate::htt::{
    dupont_contraction, mc_pushforward_p, tensor_contraction, transfer_ainfty, transfer_slinfty, validate_pushforward,
    AInf, Contraction, LinMap, PushforwardReport, PUSHFORWARD_SIGN,
};
use crate::lin::{Graded, Lin};
use crate::linfty::{
    check_relations, ell, gauge_flow, gauge_path, is_mc, lie_coords, lie_elt, lie_from_free, mc_residual,
    nonlinear_part, sorted_tuples, suspend_lie, CommAlg, InfMorphism, LieAlgebra, RelationReport, SLInf, SLInfty,
    TensorSL,
};
use crate::scalar::{fmt_q, inv_factorial, parity_sign, parse_q, show_q, Q};
use crate::solvers::{solve_fixed_point, FPEq};
use crate::trees::{coeff_f, coeff_g, enumerate_dectrees, enumerate_wptrees, DecTree, PSlot, PTree, WPTree};

// ---------------------------------------------------------------------------
// free shifted L∞ algebras

/// Basis term of a free shifted L∞ algebra: a generator or `ℓ_n` applied to
/// a sorted tuple of terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FTerm {
    Gen { idx: usize, deg: i64 },
    Op(Vec<FTerm>),
}

impl Graded for FTerm {
    fn deg(&self) -> i64 {
        match self {
            FTerm::Gen { deg, .. } => *deg,
            FTerm::Op(c) => c.iter().map(Graded::deg).sum::<i64>() - 1,
        }
    }
    fn weight(&self) -> u32 {
        match self {
            FTerm::Gen { .. } => 1,
            FTerm::Op(c) => c.iter().map(Graded::weight).sum(),
        }
    }
}

/// Free shifted L∞ algebra truncated above a weight cap. `ℓ_1` is fixed on
/// generators and extended to brackets through the L∞ relations.
pub struct FreeSL {
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
    pub images: Vec<Lin<FTerm>>,
    pub arity_cap: usize,
    pub cap: u32,
    memo: RefCell<BTreeMap<FTerm, Lin<FTerm>>>,
}

impl FreeSL {
    pub fn new(gens: &[(&str, i64)], arity_cap: usize, cap: u32) -> Result<Self> {
        if cap == 0 {
            return invalid("cap must be at least 1");
        }
        if arity_cap < 2 {
            return invalid("arity cap must be at least 2");
        }
        Ok(FreeSL {
            names: gens.iter().map(|g| g.0.to_string()).collect(),
            degrees: gens.iter().map(|g| g.1).collect(),
            images: vec![Lin::zero(); gens.len()],
            arity_cap,
            cap,
            memo: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn gen(&self, i: usize) -> Lin<FTerm> {
        Lin::basis(FTerm::Gen { idx: i, deg: self.degrees[i] })
    }

    pub fn set_differential(&mut self, i: usize, img: Lin<FTerm>) -> Result<()> {
        if img.keys().any(|k| k.deg() != self.degrees[i] - 1) {
            return invalid(format!("differential of {} is not of degree -1", self.names[i]));
        }
        self.images[i] = img.truncate_weight(self.cap);
        self.memo.borrow_mut().clear();
        Ok(())
    }

    /// `ℓ_1 ℓ_n(x) = -Σ ε ℓ_q(ℓ_p(x_S), x_{S^c})` over the proper unshuffles.
    fn nested_d(&self, children: &[FTerm]) -> Lin<FTerm> {
        let n = children.len();
        let degrees: Vec<i64> = children.iter().map(Graded::deg).collect();
        let inputs: Vec<Lin<FTerm>> = children.iter().map(|c| Lin::basis(c.clone())).collect();
        let mut out = Lin::zero();
        for mask in 1u32..(1 << n) - 1 {
            let front: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let back: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            let mut perm = front.clone();
            perm.extend_from_slice(&back);
            let sign = parity_sign(koszul_parity(&perm, &degrees));
            let inner_args: Vec<&Lin<FTerm>> = front.iter().map(|&i| &inputs[i]).collect();
            let inner = ell(self, &inner_args);
            if inner.is_zero() {
                continue;
            }
            let mut outer: Vec<&Lin<FTerm>> = vec![&inner];
            outer.extend(back.iter().map(|&i| &inputs[i]));
            out.add_scaled(&ell(self, &outer), &-sign);
        }
        out
    }

    pub fn show_term(&self, t: &FTerm) -> String {
        match t {
            FTerm::Gen { idx, .. } => self.names[*idx].clone(),
            FTerm::Op(c) => {
                let inner: Vec<String> = c.iter().map(|x| self.show_term(x)).collect();
                format!("l{}({})", c.len(), inner.join(","))
            }
        }
    }

    pub fn show(&self, v: &Lin<FTerm>) -> String {
        show_lin(v, |t| self.show_term(t))
    }

    /// `ℓ_1 ℓ_1 = 0` on every generator and on every bracket of generators
    /// of total weight at most the cap.
    pub fn d_squared_zero(&self) -> bool {
        let gens: Vec<FTerm> = (0..self.names.len()).map(|i| FTerm::Gen { idx: i, deg: self.degrees[i] }).collect();
        let mut terms: Vec<Lin<FTerm>> = gens.iter().map(|g| Lin::basis(g.clone())).collect();
        for n in 2..=self.arity_cap {
            for tuple in sorted_tuples(&gens, n, self.cap) {
                terms.push(self.bracket(&tuple));
            }
        }
        terms.iter().all(|t| crate::linfty::d(self, &crate::linfty::d(self, t)).is_zero())
    }
}

impl SLInf for FreeSL {
    type K = FTerm;
    fn differential(&self, k: &FTerm) -> Lin<FTerm> {
        match k {
            FTerm::Gen { idx, .. } => self.images[*idx].clone(),
            FTerm::Op(children) => {
                if let Some(v) = self.memo.borrow().get(k) {
                    return v.clone();
                }
                let v = self.nested_d(children);
                self.memo.borrow_mut().insert(k.clone(), v.clone());
                v
            }
        }
    }
    fn bracket(&self, keys: &[FTerm]) -> Lin<FTerm> {
        if keys.len() > self.arity_cap || keys.iter().map(Graded::weight).sum::<u32>() > self.cap {
            return Lin::zero();
        }
        let (sorted, odd) = sort_graded(keys);
        if repeats_odd(&sorted) {
            return Lin::zero();
        }
        Lin::term(FTerm::Op(sorted), parity_sign(odd))
    }
    fn arity_cap(&self) -> usize {
        self.arity_cap
    }
    fn max_weight(&self) -> u32 {
        self.cap
    }
}

/// `2 a - 1/2 b` style rendering; `0` when empty.
pub fn show_lin<K: Ord + Clone>(v: &Lin<K>, name: impl Fn(&K) -> String) -> String {
    let mut out = String::new();
    for (k, c) in v.iter() {
        let neg = c < &Q::zero();
        let mag = c.abs();
        let body = if mag.is_one() { name(k) } else { format!("{} {}", show_q(&mag), name(k)) };
        match (out.is_empty(), neg) {
            (true, false) => out.push_str(&body),
            (true, true) => out.push_str(&format!("-{body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" - {body}")),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

// ---------------------------------------------------------------------------
// presentations

/// Free graded Lie algebra with a derivation.
pub struct LiePresentation {
    pub alg: FreeAlg,
    pub d: LieDerivation,
}

fn lie_mc_defect(alg: &FreeAlg, d: &LieDerivation, x: &TensorElt) -> TensorElt {
    let half = Q::new(BigInt::one(), BigInt::from(2));
    alg.truncate(&(&d.apply(alg, x) + &alg.bracket(x, x).scale(&half)))
}

/// One generator `α` of degree -1 with `dα = -½[α, α]`.
pub fn build_mc0(cap: usize) -> Result<LiePresentation> {
    let alg = FreeAlg::new(&[("α", -1)], cap)?;
    let a = alg.gen(0);
    let half = Q::new(BigInt::one(), BigInt::from(2));
    let d = LieDerivation { images: vec![alg.truncate(&alg.bracket(&a, &a).scale(&-half))] };
    if !d.squares_to_zero(&alg) || !lie_mc_defect(&alg, &d, &a).is_zero() {
        return Err(Error::Validation("mc_0 presentation fails d² = 0 or the MC equation".into()));
    }
    Ok(LiePresentation { alg, d })
}

/// The Lawrence–Sullivan algebra.
pub fn build_mc1(cap: usize) -> Result<LiePresentation> {
    let (alg, d) = lawrence_sullivan(cap)?;
    let ok = d.squares_to_zero(&alg) && (0..2).all(|i| lie_mc_defect(&alg, &d, &alg.gen(i)).is_zero());
    if !ok {
        return Err(Error::Validation("mc_1 presentation fails d² = 0 or the MC equation".into()));
    }
    Ok(LiePresentation { alg, d })
}

/// `dα = -Σ_{n≥2} ℓ_n(α, …, α)/n!` for each listed degree-0 generator.
fn set_mc_generators(alg: &mut FreeSL, gens: &[usize]) -> Result<()> {
    for &i in gens {
        let img = -nonlinear_part(&*alg, &alg.gen(i));
        alg.set_differential(i, img)?;
    }
    Ok(())
}

/// Free shifted L∞ algebra on one Maurer–Cartan generator.
pub fn build_mcinf0(cap: u32) -> Result<FreeSL> {
    let mut alg = FreeSL::new(&[("α", 0)], cap.max(2) as usize, cap)?;
    set_mc_generators(&mut alg, &[0])?;
    if !mc_residual(&alg, &alg.gen(0))?.is_zero() || !alg.d_squared_zero() {
        return Err(Error::Validation("mc∞_0 presentation fails d² = 0 or the MC equation".into()));
    }
    Ok(alg)
}

/// Generators `α0, α1` (degree 0, Maurer–Cartan) and `λ` (degree 1) with no
/// differential on `λ` yet.
pub fn mcinf1_generators(arity_cap: usize, cap: u32) -> Result<FreeSL> {
    let mut alg = FreeSL::new(&[("α0", 0), ("α1", 0), ("λ", 1)], arity_cap, cap)?;
    set_mc_generators(&mut alg, &[0, 1])?;
    Ok(alg)
}

/// Lower bound on the weight of `τ(α0)`: one per leaf and per vertex.
fn min_load(t: &WPTree) -> u32 {
    match t {
        WPTree::Empty => 1,
        WPTree::Node { children, .. } => 1 + children.iter().map(min_load).sum::<u32>(),
    }
}

/// `τ(α0)` with arity-0 vertices evaluated to `x` and a vertex of arity
/// `n ≥ 1` to `ℓ_{n+1}(y_1, …, y_n, λ)/n!`.
fn eval_ode_tree(alg: &FreeSL, t: &WPTree, a0: &Lin<FTerm>, x: &Lin<FTerm>, lam: &Lin<FTerm>) -> Lin<FTerm> {
    match t {
        WPTree::Empty => a0.clone(),
        WPTree::Node { children, .. } if children.is_empty() => x.clone(),
        WPTree::Node { children, .. } => {
            let mut args: Vec<Lin<FTerm>> = children.iter().map(|c| eval_ode_tree(alg, c, a0, x, lam)).collect();
            if args.iter().any(Lin::is_zero) {
                return Lin::zero();
            }
            args.push(lam.clone());
            let refs: Vec<&Lin<FTerm>> = args.iter().collect();
            ell(alg, &refs).scale(&inv_factorial(children.len()))
        }
    }
}

/// Solves `dλ = α1 - α0 - Σ_{τ ≠ ∅, c_0} τ(α0)/F(τ)`, where `dλ` itself
/// enters through the arity-0 vertices.
pub fn mcinf1_fixed_point(alg: &FreeSL) -> Result<Lin<FTerm>> {
    let (a0, a1, lam) = (alg.gen(0), alg.gen(1), alg.gen(2));
    let cap = alg.cap;
    let allowed: Vec<(usize, u32)> = (0..=cap as usize).map(|k| (k, 1)).collect();
    let c0 = WPTree::corolla(0, 1);
    let trees: Vec<(WPTree, Q)> = enumerate_wptrees(cap, &allowed)
        .into_iter()
        .filter(|t| !matches!(t, WPTree::Empty) && *t != c0 && min_load(t) <= cap)
        .map(|t| {
            let c = -Q::new(BigInt::one(), coeff_f(&t));
            (t, c)
        })
        .collect();
    let a0_op = a0.clone();
    let op = move |x: &Lin<FTerm>| {
        let mut out = Lin::zero();
        for (t, c) in &trees {
            out.add_scaled(&eval_ode_tree(alg, t, &a0_op, x, &lam), c);
        }
        out
    };
    let eq = FPEq { p0: &a1 - &a0, ops: vec![(1, Box::new(op))], cap, weight: Box::new(|k: &FTerm| k.weight()) };
    solve_fixed_point(&eq)
}

fn eval_decoration(alg: &FreeSL, t: &PTree, vals: &[Lin<FTerm>], next: &mut usize, lam: &Lin<FTerm>) -> Lin<FTerm> {
    let mut args = Vec::with_capacity(t.slots.len() + 1);
    for slot in &t.slots {
        match slot {
            PSlot::Leaf => {
                args.push(vals[*next].clone());
                *next += 1;
            }
            PSlot::Node(sub) => args.push(eval_decoration(alg, sub, vals, next, lam)),
        }
    }
    if args.iter().any(Lin::is_zero) {
        return Lin::zero();
    }
    args.push(lam.clone());
    let refs: Vec<&Lin<FTerm>> = args.iter().collect();
    ell(alg, &refs).scale(&inv_factorial(t.slots.len()))
}

fn eval_dectree(alg: &FreeSL, t: &DecTree, white: &Lin<FTerm>, black: &Lin<FTerm>, lam: &Lin<FTerm>) -> Lin<FTerm> {
    match t {
        DecTree::White => white.clone(),
        DecTree::Black => black.clone(),
        DecTree::Vertex { deco, children } => {
            let vals: Vec<Lin<FTerm>> = children.iter().map(|c| eval_dectree(alg, c, white, black, lam)).collect();
            eval_decoration(alg, deco, &vals, &mut 0, lam)
        }
    }
}

/// `α1 - α0 + Σ_T G(T) T(α0, α1 - α0)` over decorated trees.
pub fn mcinf1_tree_sum(alg: &FreeSL) -> Result<Lin<FTerm>> {
    let (a0, a1, lam) = (alg.gen(0), alg.gen(1), alg.gen(2));
    let black = &a1 - &a0;
    let mut out = black.clone();
    for t in enumerate_dectrees(alg.cap as usize) {
        let v = eval_dectree(alg, &t, &a0, &black, &lam);
        if !v.is_zero() {
            out.add_scaled(&v, &coeff_g(&t)?);
        }
    }
    Ok(out.truncate_weight(alg.cap))
}

/// Sign `ε` in the dictionary `λ ↦ s(ελ)` between the strict part of the
/// free shifted algebra and the Lawrence–Sullivan algebra; pinned by
/// [`strict_mcinf1_matches_ls`].
pub const LS_GAUGE_SIGN: i64 = -1;

/// Desuspension of a term built from `ℓ_2` only: `ℓ_2(sa, sb) = (-1)^{|a|} s[a, b]`.
fn desuspend_strict(ls: &FreeAlg, t: &FTerm, gauge_sign: i64) -> Option<TensorElt> {
    match t {
        FTerm::Gen { idx: 2, .. } => Some(ls.gen(2).scale(&Q::from_integer(gauge_sign.into()))),
        FTerm::Gen { idx, .. } => Some(ls.gen(*idx)),
        FTerm::Op(c) if c.len() == 2 => {
            let a = desuspend_strict(ls, &c[0], gauge_sign)?;
            let b = desuspend_strict(ls, &c[1], gauge_sign)?;
            Some(ls.bracket(&a, &b).scale(&parity_sign((c[0].deg() - 1) % 2 != 0)))
        }
        FTerm::Op(_) => None,
    }
}

/// With `ℓ_n = 0` for `n ≥ 3`, the fixed-point `dλ` desuspends to the
/// Lawrence–Sullivan `dλ` (`ℓ_1(sλ) = -s dλ`).
pub fn strict_mcinf1_matches_ls(cap: u32, gauge_sign: i64) -> Result<bool> {
    let alg = mcinf1_generators(2, cap)?;
    let x = mcinf1_fixed_point(&alg)?;
    let (ls, d) = lawrence_sullivan(cap as usize)?;
    let mut lhs = Lin::zero();
    for (t, c) in x.iter() {
        let v = desuspend_strict(&ls, t, gauge_sign).ok_or_else(|| Error::Validation("higher bracket in strict part".into()))?;
        lhs.add_scaled(&v, c);
    }
    let rhs = ls.truncate(&d.apply(&ls, &ls.gen(2))).scale(&Q::from_integer((-gauge_sign).into()));
    Ok(lhs == rhs)
}

/// `mc∞_1` with `dλ` from the fixed-point equation, cross-checked against
/// the decorated-tree sum and the strict specialization.
pub struct McInf1 {
    pub alg: FreeSL,
    pub d_lambda: Lin<FTerm>,
    pub tree_sum_agrees: bool,
    pub strict_matches_ls: bool,
    pub d_squared_zero: bool,
}

impl McInf1 {
    pub fn ok(&self) -> bool {
        self.tree_sum_agrees && self.strict_matches_ls && self.d_squared_zero
    }
}

pub fn build_mcinf1(cap: u32) -> Result<McInf1> {
    if !(1..=5).contains(&cap) {
        return invalid("mc∞_1 is built for caps 1..=5");
    }
    let mut alg = mcinf1_generators(cap.max(2) as usize, cap)?;
    let d_lambda = mcinf1_fixed_point(&alg)?;
    let tree = mcinf1_tree_sum(&alg)?;
    if tree != d_lambda {
        return Err(Error::Validation(format!(
            "dλ differs between the fixed point and the tree sum: {} vs {}",
            alg.show(&d_lambda),
            alg.show(&tree)
        )));
    }
    alg.set_differential(2, d_lambda.clone())?;
    let d_squared_zero = alg.d_squared_zero();
    let strict_matches_ls = strict_mcinf1_matches_ls(cap, LS_GAUGE_SIGN)?;
    Ok(McInf1 { alg, d_lambda, tree_sum_agrees: true, strict_matches_ls, d_squared_zero })
}

// ---------------------------------------------------------------------------
// fixed simplicial level

pub type PathKey = (Sym, Mono);
pub type CellKey = (Sym, Cell);

/// Element of `g ⊗ Ω_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MCPath {
    pub level: usize,
    pub form: Lin<PathKey>,
}

/// Element of `g ⊗ C_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MCCell {
    pub level: usize,
    pub elt: Lin<CellKey>,
}

/// `g ⊗ Ω_n` with the contraction `1 ⊗ (i, p, h)` onto `g ⊗ C_n`.
pub struct Level {
    pub g: SLInfty,
    pub omega: Simplex,
    pub contraction: Contraction<PathKey, CellKey>,
    cells: OnceCell<SLInfty<CellKey>>,
    i_inf: OnceCell<InfMorphism<CellKey, PathKey>>,
}

impl Level {
    pub fn new(g: &SLInfty, n: usize) -> Result<Self> {
        if n > 2 {
            return Err(Error::Unsupported(format!("simplicial level {n} (levels 0..=2 are supported)")));
        }
        let gd = g.clone();
        let diff: LinMap<Sym, Sym> = Rc::new(move |k: &Sym| gd.differential(k));
        let contraction = tensor_contraction(&g.basis, diff, &dupont_contraction(n));
        Ok(Level { g: g.clone(), omega: Simplex::new(n), contraction, cells: OnceCell::new(), i_inf: OnceCell::new() })
    }

    pub fn n(&self) -> usize {
        self.omega.n
    }

    pub fn big(&self) -> TensorSL<'_, SLInfty, Simplex> {
        TensorSL { g: &self.g, a: &self.omega }
    }

    fn transfer_arity(&self) -> usize {
        (self.g.max_weight as usize).max(2)
    }

    /// The transferred structure on `g ⊗ C_n`.
    pub fn cell_algebra(&self) -> Result<&SLInfty<CellKey>> {
        if let Some(a) = self.cells.get() {
            return Ok(a);
        }
        let big = self.big();
        let t = transfer_slinfty(&big, &self.contraction, self.transfer_arity())?;
        Ok(self.cells.get_or_init(|| t.tabulate()))
    }

    pub fn i_infinity(&self) -> Result<&InfMorphism<CellKey, PathKey>> {
        if let Some(m) = self.i_inf.get() {
            return Ok(m);
        }
        let big = self.big();
        let t = transfer_slinfty(&big, &self.contraction, self.transfer_arity())?;
        Ok(self.i_inf.get_or_init(|| t.i_infinity()))
    }

    fn same_level(&self, level: usize) -> Result<()> {
        if level != self.n() {
            return invalid(format!("element of level {level} used at level {}", self.n()));
        }
        Ok(())
    }

    /// Maurer–Cartan residual in `g ⊗ Ω_n`.
    pub fn membership(&self, x: &MCPath) -> Result<Lin<PathKey>> {
        self.same_level(x.level)?;
        mc_residual(&self.big(), &x.form)
    }

    fn require_mc(&self, x: &MCPath) -> Result<()> {
        if !self.membership(x)?.is_zero() {
            return Err(Error::Precondition("not a Maurer–Cartan element of g ⊗ Ω_n".into()));
        }
        Ok(())
    }

    /// `(1 ⊗ h)(x) = 0`.
    pub fn gamma_membership(&self, x: &MCPath) -> Result<bool> {
        self.require_mc(x)?;
        Ok(self.contraction.htpy(&x.form).is_zero())
    }

    /// `∫_{Δ^n} x = 0`.
    pub fn thin_check(&self, x: &MCPath) -> Result<bool> {
        self.require_mc(x)?;
        Ok(self.integral(x).is_zero())
    }

    /// Fiber integral `∫_{Δ^n} x ∈ g`.
    pub fn integral(&self, x: &MCPath) -> Vector {
        let mut by_sym: BTreeMap<Sym, Lin<Mono>> = BTreeMap::new();
        for ((s, m), c) in x.form.iter() {
            by_sym.entry(*s).or_default().add_term(m.clone(), c.clone());
        }
        by_sym.into_iter().map(|(s, f)| (s, self.omega.integrate(&f))).collect()
    }

    pub fn cell_is_mc(&self, b: &MCCell) -> Result<bool> {
        self.same_level(b.level)?;
        Ok(is_mc(self.cell_algebra()?, &b.elt))
    }

    /// `MC(i_∞)`.
    pub fn i_map(&self, b: &MCCell) -> Result<MCPath> {
        if !self.cell_is_mc(b)? {
            return Err(Error::Precondition("not a Maurer–Cartan element of g ⊗ C_n".into()));
        }
        let form = self.i_infinity()?.mc_pushforward(&b.elt, self.g.max_weight);
        Ok(MCPath { level: self.n(), form })
    }

    /// `MC(p_∞)`.
    pub fn p_map(&self, x: &MCPath) -> Result<MCCell> {
        self.require_mc(x)?;
        let elt = mc_pushforward_p(&self.big(), &self.contraction, &x.form)?;
        Ok(MCCell { level: self.n(), elt })
    }

    /// `I ∘ P`.
    pub fn rect(&self, x: &MCPath) -> Result<MCPath> {
        self.i_map(&self.p_map(x)?)
    }

    /// Pushforward validations on the given samples.
    pub fn pushforward_report(&self, ys: &[MCCell], xs: &[MCPath]) -> Result<PushforwardReport> {
        let big = self.big();
        let t = transfer_slinfty(&big, &self.contraction, self.transfer_arity())?;
        let ys: Vec<Lin<CellKey>> = ys.iter().map(|y| y.elt.clone()).collect();
        let xs: Vec<Lin<PathKey>> = xs.iter().map(|x| x.form.clone()).collect();
        validate_pushforward(&t, &ys, &xs, PUSHFORWARD_SIGN)
    }

    /// Relation check of the transferred structure on `g ⊗ C_n`.
    pub fn check_cell_relations(&self, n_max: usize) -> Result<RelationReport> {
        let cells = self.cell_algebra()?;
        Ok(check_relations(cells, &cells.basis, n_max))
    }

    /// Constant path `x ⊗ 1`.
    pub fn constant(&self, x: &Vector) -> MCPath {
        let one = <Simplex as CommAlg>::unit(&self.omega);
        MCPath { level: self.n(), form: x.map_keys(|s| (*s, one.clone())) }
    }
}

// ---------------------------------------------------------------------------
// level one

fn t_power(k: u32) -> Mono {
    Mono { exps: vec![k], dts: 0 }
}

fn dt_mono(k: u32) -> Mono {
    Mono { exps: vec![k], dts: 1 }
}

/// `x(t) - λ dt` for the gauge flow `x(t)` from `x0` along the constant
/// gauge `λ`; Maurer–Cartan in `g ⊗ Ω_1`.
pub fn gauge_homotopy(g: &SLInfty, lambda: &Vector, x0: &Vector) -> Result<MCPath> {
    let coeffs = gauge_path(g, lambda, x0)?;
    let mut form = Lin::zero();
    for (k, c) in coeffs.iter().enumerate() {
        form += &c.map_keys(|s| (*s, t_power(k as u32)));
    }
    form -= &lambda.map_keys(|s| (*s, dt_mono(0)));
    Ok(MCPath { level: 1, form })
}

/// Coefficients of `t^k` in the 0-form part and in the `dt` part.
pub fn split_level1(x: &MCPath) -> Result<(Vec<Vector>, Vec<Vector>)> {
    if x.level != 1 {
        return invalid("level-1 element expected");
    }
    let mut zero: Vec<Vector> = Vec::new();
    let mut one: Vec<Vector> = Vec::new();
    for ((s, m), c) in x.form.iter() {
        let part = if m.dts == 0 { &mut zero } else { &mut one };
        let k = m.exps[0] as usize;
        if part.len() <= k {
            part.resize(k + 1, Lin::zero());
        }
        part[k].add_term(*s, c.clone());
    }
    Ok((zero, one))
}

/// Values of the 0-form part at `t = 0` and `t = 1`.
pub fn endpoints(x: &MCPath) -> Result<(Vector, Vector)> {
    let (zero, _) = split_level1(x)?;
    let start = zero.first().cloned().unwrap_or_default();
    let end = zero.iter().fold(Lin::zero(), |acc, c| &acc + c);
    Ok((start, end))
}

/// The `dt` part does not depend on `t`.
pub fn dt_part_constant(x: &MCPath) -> Result<bool> {
    let (_, one) = split_level1(x)?;
    Ok(one.iter().skip(1).all(Lin::is_zero))
}

/// `g`: free graded Lie algebra on `a` (degree -1), `b`, `c` (degree 0)
/// modulo weight 3 with `db = a`, suspended.
pub fn fixture_algebra() -> Result<(GradedSpace, SLInfty)> {
    let alg = FreeAlg::new(&[("a", -1), ("b", 0), ("c", 0)], 3)?;
    let deriv = LieDerivation { images: vec![Lin::zero(), alg.gen(0), Lin::zero()] };
    let g = lie_from_free(&alg, Some(&deriv))?;
    suspend_lie(&g)
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Q {
    const CHOICES: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 3)];
    let (p, q) = CHOICES[rng.gen_range(0..CHOICES.len())];
    Q::new(p.into(), q.into())
}

/// Random combination of the basis elements of the given degree, weight at
/// most `max_weight`.
pub fn random_vector(rng: &mut ChaCha8Rng, g: &SLInfty, deg: i64, max_weight: u32) -> Vector {
    let mut v = Lin::zero();
    for s in g.basis.iter().filter(|s| s.deg == deg && s.wt <= max_weight) {
        if rng.gen_bool(0.7) {
            v.add_term(*s, random_coeff(rng));
        }
    }
    v
}

/// Seeded gauge-generated homotopy on [`fixture_algebra`]: the start point
/// is the flow of 0 along a random gauge, then the path follows another.
pub struct Level1Fixture {
    pub space: GradedSpace,
    pub g: SLInfty,
    pub lambda: Vector,
    pub x0: Vector,
    pub path: MCPath,
}

pub fn level1_fixture(seed: u64) -> Result<Level1Fixture> {
    let (space, g) = fixture_algebra()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = random_vector(&mut rng, &g, 1, 1);
    let x0 = gauge_flow(&g, &start, &Lin::zero())?;
    let mut lambda = random_vector(&mut rng, &g, 1, 3);
    if lambda.is_zero() {
        lambda = random_vector(&mut rng, &g, 1, 1);
    }
    let path = gauge_homotopy(&g, &lambda, &x0)?;
    Ok(Level1Fixture { space, g, lambda, x0, path })
}

/// Checks of the rectification on one level-1 path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RectReport {
    /// `P(x)` is Maurer–Cartan in `g ⊗ C_1`.
    pub lands_in_mc: bool,
    /// `P(I(P(x))) = P(x)`.
    pub pi_identity: bool,
    /// `h(Rect(x)) = 0`.
    pub gamma: bool,
    pub dt_constant: bool,
    pub endpoints_match: bool,
    pub idempotent: bool,
}

impl RectReport {
    pub fn ok(&self) -> bool {
        self.lands_in_mc && self.pi_identity && self.gamma && self.dt_constant && self.endpoints_match && self.idempotent
    }
}

pub fn rect_report(level: &Level, x: &MCPath) -> Result<RectReport> {
    let beta = level.p_map(x)?;
    if !level.cell_is_mc(&beta)? {
        return Ok(RectReport::default());
    }
    let r = level.i_map(&beta)?;
    let back = level.p_map(&r)?;
    Ok(RectReport {
        lands_in_mc: true,
        pi_identity: back == beta,
        gamma: level.gamma_membership(&r)?,
        dt_constant: dt_part_constant(&r)?,
        endpoints_match: endpoints(&r)? == endpoints(x)?,
        idempotent: level.i_map(&back)? == r,
    })
}

// ---------------------------------------------------------------------------
// morphisms out of mc_0 and mc_1

/// Images of the generators of `mc_0` or `mc_1` in a strict Lie algebra
/// (unshifted degrees).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomData {
    Point { alpha: Vector },
    Gauge { x0: Vector, x1: Vector, lambda: Vector },
}

/// Sign of the `ω_01` coefficient: the image of `λ` enters as `ε sλ ⊗ ω_01`.
pub const CELL_GAUGE_SIGN: i64 = 1;

fn lie_curvature(g: &LieAlgebra, x: &Vector) -> Vector {
    let half = Q::new(BigInt::one(), BigInt::from(2));
    &g.d(x) + &g.bracket(x, x).scale(&half)
}

/// `dλ - Σ B_n/n! ad_λ^n(x1 - x0) + ad_λ(x0)` with `ad_λ(x) = [x, λ]`.
fn ls_defect(g: &LieAlgebra, x0: &Vector, x1: &Vector, lambda: &Vector) -> Vector {
    let mut out = g.d(lambda);
    let mut term = x1 - x0;
    let mut n = 0;
    while !term.is_zero() {
        out.add_scaled(&term, &-(bernoulli(n) * inv_factorial(n)));
        term = g.bracket(&term, lambda);
        n += 1;
    }
    out += &g.bracket(x0, lambda);
    out
}

fn check_degree(v: &Vector, deg: i64, what: &str) -> Result<()> {
    if v.keys().any(|s| s.deg != deg) {
        return invalid(format!("{what} must have degree {deg}"));
    }
    Ok(())
}

fn validate_hom(g: &LieAlgebra, data: &HomData) -> Result<()> {
    match data {
        HomData::Point { alpha } => {
            check_degree(alpha, -1, "the image of α")?;
            if !lie_curvature(g, alpha).is_zero() {
                return invalid("the image of α is not Maurer–Cartan");
            }
        }
        HomData::Gauge { x0, x1, lambda } => {
            check_degree(x0, -1, "the image of x0")?;
            check_degree(x1, -1, "the image of x1")?;
            check_degree(lambda, 0, "the image of λ")?;
            if !lie_curvature(g, x0).is_zero() || !lie_curvature(g, x1).is_zero() {
                return invalid("an endpoint image is not Maurer–Cartan");
            }
            if !ls_defect(g, x0, x1, lambda).is_zero() {
                return invalid("the image of λ is not a gauge from x0 to x1");
            }
        }
    }
    Ok(())
}

/// `φ ↦ Σ sφ(generator) ⊗ cell`.
pub fn hom_to_cell(g: &LieAlgebra, data: &HomData) -> Result<MCCell> {
    validate_hom(g, data)?;
    let s = g.space.suspend(1);
    let put = |v: &Vector, cell: Vec<usize>, sign: i64| -> Lin<CellKey> {
        s.reindex(v).iter().map(|(k, c)| ((*k, Cell(cell.clone())), c * Q::from_integer(sign.into()))).collect()
    };
    Ok(match data {
        HomData::Point { alpha } => MCCell { level: 0, elt: put(alpha, vec![0], 1) },
        HomData::Gauge { x0, x1, lambda } => {
            let mut elt = put(x0, vec![0], 1);
            elt += &put(x1, vec![1], 1);
            elt += &put(lambda, vec![0, 1], CELL_GAUGE_SIGN);
            MCCell { level: 1, elt }
        }
    })
}

/// Inverse of [`hom_to_cell`]; fails when the read-off images violate the
/// defining relations.
pub fn cell_to_hom(g: &LieAlgebra, cell: &MCCell) -> Result<HomData> {
    let take = |idx: Vec<usize>, sign: i64| -> Vector {
        cell.elt
            .iter()
            .filter(|((_, c), _)| c.0 == idx)
            .map(|((s, _), c)| (g.space.sym(s.idx), c * Q::from_integer(sign.into())))
            .collect()
    };
    let data = match cell.level {
        0 => HomData::Point { alpha: take(vec![0], 1) },
        1 => HomData::Gauge { x0: take(vec![0], 1), x1: take(vec![1], 1), lambda: take(vec![0, 1], CELL_GAUGE_SIGN) },
        n => return Err(Error::Unsupported(format!("level {n}"))),
    };
    validate_hom(g, &data)?;
    Ok(data)
}

// ---------------------------------------------------------------------------
// two routes to the brackets on g ⊗ C_1

impl AInf for Simplex {
    type K = Mono;
    fn differential(&self, k: &Mono) -> Lin<Mono> {
        <Simplex as CommAlg>::d(self, k)
    }
    fn op(&self, keys: &[Mono]) -> Lin<Mono> {
        match keys {
            [a, b] => CommAlg::mul(self, a, b),
            _ => Lin::zero(),
        }
    }
    fn arity_cap(&self) -> usize {
        2
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub compared: usize,
    pub nonzero: usize,
    pub mismatch: Option<String>,
}

impl PipelineReport {
    pub fn ok(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Brackets on `g ⊗ C_1` for a free nilpotent Lie algebra `g`, computed (1)
/// by tree transfer from `g ⊗ Ω_1` and (2) from the A∞ structure on `C_1`
/// tensored with the tensor algebra of `g`, symmetrized in bar form.
pub fn compare_cell_pipelines(gens: &[(&str, i64)], cap: usize, arity: usize) -> Result<PipelineReport> {
    let words = FreeAlg::new(gens, cap)?;
    let g = lie_from_free(&words, None)?;
    let (space, sg) = suspend_lie(&g)?;
    let level = Level::new(&sg, 1)?;
    let big = level.big();
    let tree_route = transfer_slinfty(&big, &level.contraction, arity)?;
    let simplex = Simplex::new(1);
    let cell_contraction = dupont_contraction(1);
    let cells = transfer_ainfty(&simplex, &cell_contraction, arity)?.small;
    let elts: Vec<TensorElt> = (0..g.space.dim()).map(|i| lie_elt(&g, &words, i)).collect();
    let keys: Vec<CellKey> =
        sg.basis.iter().flat_map(|s| cell_contraction.small_basis.iter().map(move |c| (*s, c.clone()))).collect();
    let mut report = PipelineReport { compared: 0, nonzero: 0, mismatch: None };
    for n in 2..=arity {
        let perms = permutations(n);
        for tuple in sorted_tuples(&keys, n, sg.max_weight) {
            if repeats_odd(&tuple) {
                continue;
            }
            let lhs = SLInf::bracket(&tree_route, &tuple);
            let shifted: Vec<i64> = tuple.iter().map(Graded::deg).collect();
            let mut by_cell: BTreeMap<Cell, TensorElt> = BTreeMap::new();
            for perm in &perms {
                let ks: Vec<&CellKey> = perm.iter().map(|&i| &tuple[i]).collect();
                let bs: Vec<i64> = ks.iter().map(|k| k.0.deg - 1).collect();
                let cs: Vec<i64> = ks.iter().map(|k| k.1.deg()).collect();
                let mut odd = koszul_parity(perm, &shifted);
                for i in 0..n {
                    for j in i + 1..n {
                        odd ^= cs[i] * bs[j] % 2 != 0;
                    }
                    odd ^= (n as i64 - 2) * bs[i] % 2 != 0;
                    odd ^= (bs[i] + cs[i]) * (n - 1 - i) as i64 % 2 != 0;
                }
                let cell_keys: Vec<Cell> = ks.iter().map(|k| k.1.clone()).collect();
                let m = cells.op(&cell_keys);
                if m.is_zero() {
                    continue;
                }
                let word = ks.iter().fold(words.one(), |acc, k| words.mul(&acc, &elts[k.0.idx]));
                let sign = parity_sign(odd);
                for (c, coeff) in m.iter() {
                    by_cell.entry(c.clone()).or_default().add_scaled(&word, &(coeff * &sign));
                }
            }
            let mut rhs = Lin::zero();
            for (c, w) in by_cell {
                let v = lie_coords(&g, &words, &w).ok_or_else(|| Error::Validation("symmetrized word is not a Lie element".into()))?;
                rhs += &space.reindex(&v).map_keys(|s| (*s, c.clone()));
            }
            report.compared += 1;
            if !lhs.is_zero() {
                report.nonzero += 1;
            }
            if lhs != rhs {
                report.mismatch = Some(format!("{tuple:?}: trees {lhs:?} vs tensor {rhs:?}"));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// serialization

/// `[[id, [t exponents], [dt indices], "p/q"], …]`.
pub fn path_to_json(space: &GradedSpace, x: &MCPath) -> Value {
    let terms: Vec<Value> = x
        .form
        .iter()
        .map(|((s, m), c)| {
            let dts: Vec<usize> = (0..32).filter(|j| m.dts >> j & 1 == 1).map(|j| j + 1).collect();
            json!([space.id(s.idx), m.exps, dts, fmt_q(c)])
        })
        .collect();
    json!({"level": x.level, "terms": terms})
}

pub fn path_from_json(space: &GradedSpace, v: &Value) -> Result<MCPath> {
    let level = v["level"].as_u64().ok_or_else(|| Error::InvalidInput("missing level".into()))? as usize;
    let mut form = Lin::zero();
    for term in v["terms"].as_array().cloned().unwrap_or_default() {
        let id = term[0].as_str().ok_or_else(|| Error::InvalidInput("basis ids are strings".into()))?;
        let idx = space.index_of(id).ok_or_else(|| Error::InvalidInput(format!("unknown id {id}")))?;
        let exps: Vec<u32> = serde_json::from_value(term[1].clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let dt_list: Vec<u32> = serde_json::from_value(term[2].clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if exps.len() != level || dt_list.iter().any(|&j| j == 0 || j as usize > level) {
            return invalid(format!("monomial does not live on Δ^{level}"));
        }
        let dts = dt_list.iter().fold(0u32, |acc, j| acc | 1 << (j - 1));
        let c = parse_q(term[3].as_str().unwrap_or("0"))?;
        form.add_term((space.sym(idx), Mono { exps, dts }), c);
    }
    Ok(MCPath { level, form })
}

pub fn cell_to_json(space: &GradedSpace, b: &MCCell) -> Value {
    let terms: Vec<Value> = b.elt.iter().map(|((s, c), q)| json!([space.id(s.idx), c.name(), fmt_q(q)])).collect();
    json!({"level": b.level, "terms": terms})
}

/// `{"id": "p/q", …}` into a vector of `space`.
pub fn vector_from_json(space: &GradedSpace, v: &Value) -> Result<Vector> {
    let obj = v.as_object().ok_or_else(|| Error::InvalidInput("vectors are objects id -> \"p/q\"".into()))?;
    let mut out = Lin::zero();
    for (id, c) in obj {
        let idx = space.index_of(id).ok_or_else(|| Error::InvalidInput(format!("unknown id {id}")))?;
        out.add_term(space.sym(idx), parse_q(c.as_str().unwrap_or("0"))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
