//! Polynomial differential forms on the standard simplex, elementary Whitney
//! forms and Dupont's contraction. Chain convention: `dt_i` has degree -1.

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::lin::{Graded, Lin};
use crate::linfty::CommAlg;
use crate::scalar::{factorial, fmt_q, parity_sign, Q};

/// `t_1^{a_1}⋯t_n^{a_n} dt_{j_1}⋯dt_{j_k}` with `j_1 < … < j_k`; bit `j-1` of
/// `dts` marks `dt_j`. `t_0` and `dt_0` are eliminated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub exps: Vec<u32>,
    pub dts: u32,
}

impl Graded for Mono {
    fn deg(&self) -> i64 {
        -(self.dts.count_ones() as i64)
    }
}

impl Mono {
    pub fn poly_degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

pub type PolyForm = Lin<Mono>;

/// Index string `i_0 < … < i_k` naming the Whitney form `ω_{i_0…i_k}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(pub Vec<usize>);

impl Graded for Cell {
    fn deg(&self) -> i64 {
        1 - self.0.len() as i64
    }
}

impl Cell {
    pub fn name(&self) -> String {
        let idx: Vec<String> = self.0.iter().map(usize::to_string).collect();
        format!("w{}", idx.join(""))
    }
}

pub type WhitneyVec = Lin<Cell>;

/// Parity of the number of pairs `a ∈ A`, `b ∈ B` with `a > b`.
fn merge_parity(a: u32, b: u32) -> bool {
    let mut odd = false;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        odd ^= (a >> (j + 1)).count_ones() % 2 == 1;
        rest &= rest - 1;
    }
    odd
}

/// Forms on `Δ^n`.
#[derive(Clone, Debug)]
pub struct Simplex {
    pub n: usize,
    h_cache: RefCell<BTreeMap<(usize, Mono), PolyForm>>,
}

impl PartialEq for Simplex {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Simplex {
    pub fn new(n: usize) -> Self {
        Simplex { n, h_cache: RefCell::new(BTreeMap::new()) }
    }

    pub fn mono(&self, exps: Vec<u32>, dts: u32) -> Mono {
        debug_assert_eq!(exps.len(), self.n);
        Mono { exps, dts }
    }

    pub fn one(&self) -> PolyForm {
        Lin::basis(self.mono(vec![0; self.n], 0))
    }

    /// `t_i` for `0 ≤ i ≤ n`, with `t_0 = 1 - Σ t_j`.
    pub fn t(&self, i: usize) -> PolyForm {
        if i == 0 {
            let mut out = self.one();
            for j in 1..=self.n {
                out -= &self.t(j);
            }
            return out;
        }
        let mut exps = vec![0; self.n];
        exps[i - 1] = 1;
        Lin::basis(self.mono(exps, 0))
    }

    /// `dt_i`, with `dt_0 = -Σ dt_j`.
    pub fn dt(&self, i: usize) -> PolyForm {
        if i == 0 {
            let mut out = Lin::zero();
            for j in 1..=self.n {
                out -= &self.dt(j);
            }
            return out;
        }
        Lin::basis(self.mono(vec![0; self.n], 1 << (i - 1)))
    }

    fn mono_mul(a: &Mono, b: &Mono) -> Option<(Mono, bool)> {
        if a.dts & b.dts != 0 {
            return None;
        }
        let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
        Some((Mono { exps, dts: a.dts | b.dts }, merge_parity(a.dts, b.dts)))
    }

    /// Wedge product.
    pub fn mul(&self, a: &PolyForm, b: &PolyForm) -> PolyForm {
        let mut out = Lin::zero();
        for (ma, ca) in a.iter() {
            for (mb, cb) in b.iter() {
                if let Some((m, odd)) = Self::mono_mul(ma, mb) {
                    out.add_term(m, ca * cb * parity_sign(odd));
                }
            }
        }
        out
    }

    /// `d(t_i) = dt_i`, graded Leibniz.
    pub fn d(&self, a: &PolyForm) -> PolyForm {
        let mut out = Lin::zero();
        for (m, c) in a.iter() {
            for j in 0..self.n {
                let e = m.exps[j];
                if e == 0 || m.dts >> j & 1 == 1 {
                    continue;
                }
                let mut exps = m.exps.clone();
                exps[j] -= 1;
                // dt_j lands in front of the existing dt's
                let odd = (m.dts & ((1 << j) - 1)).count_ones() % 2 == 1;
                out.add_term(Mono { exps, dts: m.dts | 1 << j }, c * Q::from_integer(BigInt::from(e)) * parity_sign(odd));
            }
        }
        out
    }

    /// `ω_{i_0…i_k} = k! Σ_j (-1)^j t_{i_j} dt_{i_0}⋯\hat{dt_{i_j}}⋯dt_{i_k}`.
    pub fn whitney(&self, indices: &[usize]) -> Result<PolyForm> {
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("Whitney indices must be strictly increasing and nonempty");
        }
        if indices.iter().any(|&i| i > self.n) {
            return invalid(format!("Whitney index outside 0..={}", self.n));
        }
        let k = indices.len() - 1;
        let mut out = Lin::zero();
        for (j, &ij) in indices.iter().enumerate() {
            let mut term = self.t(ij);
            for (l, &il) in indices.iter().enumerate() {
                if l != j {
                    term = self.mul(&term, &self.dt(il));
                }
            }
            out.add_scaled(&term, &parity_sign(j % 2 == 1));
        }
        Ok(out.scale(&Q::from_integer(factorial(k))))
    }

    /// `Σ_I c_I ω_I` for `I` in any order, signed by sorting.
    pub fn whitney_signed(&self, indices: &[usize]) -> Result<WhitneyVec> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Ok(Lin::zero());
        }
        if sorted.iter().any(|&i| i > self.n) {
            return invalid(format!("Whitney index outside 0..={}", self.n));
        }
        let inversions = (0..indices.len())
            .flat_map(|a| (a + 1..indices.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| indices[a] > indices[b])
            .count();
        Ok(Lin::term(Cell(sorted), parity_sign(inversions % 2 == 1)))
    }

    /// All cells `ω_I`, ordered by dimension then lexicographically.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = (1u32..1 << (self.n + 1))
            .map(|mask| Cell((0..=self.n).filter(|i| mask >> i & 1 == 1).collect()))
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.cmp(b)));
        out
    }

    /// Differential on `C_n`: `dω_I = Σ_i ω_{iI}`.
    pub fn d_whitney(&self, c: &WhitneyVec) -> WhitneyVec {
        let mut out = Lin::zero();
        for (cell, coeff) in c.iter() {
            for i in 0..=self.n {
                let mut idx = vec![i];
                idx.extend_from_slice(&cell.0);
                out.add_scaled(&self.whitney_signed(&idx).expect("in range"), coeff);
            }
        }
        out
    }

    /// `∫_{Δ^n}`, with `∫ t^a dt_1⋯dt_n = ∏ a_i! / (n + Σ a_i)!`.
    pub fn integrate(&self, a: &PolyForm) -> Q {
        let full = if self.n == 0 { 0 } else { (1u32 << self.n) - 1 };
        a.iter()
            .filter(|(m, _)| m.dts == full)
            .map(|(m, c)| {
                let num: BigInt = m.exps.iter().map(|&e| factorial(e as usize)).product();
                let den = factorial(self.n + m.poly_degree() as usize);
                c * Q::new(num, den)
            })
            .fold(Q::zero(), |acc, x| acc + x)
    }

    /// Algebra map to `target` given the images of `t_1, …, t_n` (degree 0).
    pub fn pullback(&self, target: &Simplex, images: &[PolyForm], a: &PolyForm) -> PolyForm {
        let dimages: Vec<PolyForm> = images.iter().map(|x| target.d(x)).collect();
        let mut out = Lin::zero();
        for (m, c) in a.iter() {
            let mut term = target.one();
            for (j, &e) in m.exps.iter().enumerate() {
                for _ in 0..e {
                    term = target.mul(&term, &images[j]);
                }
            }
            for (j, dimg) in dimages.iter().enumerate() {
                if m.dts >> j & 1 == 1 {
                    term = target.mul(&term, dimg);
                }
            }
            out.add_scaled(&term, c);
        }
        out
    }

    /// Coface `∂_i: Ω_n → Ω_{n-1}` restricting to the face opposite vertex `i`.
    pub fn face(&self, i: usize, a: &PolyForm) -> Result<PolyForm> {
        if self.n == 0 || i > self.n {
            return invalid(format!("face index {i} out of range on level {}", self.n));
        }
        let target = Simplex::new(self.n - 1);
        let images: Vec<PolyForm> = (1..=self.n)
            .map(|j| match j.cmp(&i) {
                std::cmp::Ordering::Less => target.t(j),
                std::cmp::Ordering::Equal => Lin::zero(),
                std::cmp::Ordering::Greater => target.t(j - 1),
            })
            .collect();
        Ok(self.pullback(&target, &images, a))
    }

    /// Codegeneracy `s_j: Ω_n → Ω_{n+1}` with `t_j ↦ t_j + t_{j+1}`.
    pub fn degeneracy(&self, j: usize, a: &PolyForm) -> Result<PolyForm> {
        if j > self.n {
            return invalid(format!("degeneracy index {j} out of range on level {}", self.n));
        }
        let target = Simplex::new(self.n + 1);
        let images: Vec<PolyForm> = (1..=self.n)
            .map(|k| match k.cmp(&j) {
                std::cmp::Ordering::Less => target.t(k),
                std::cmp::Ordering::Equal => &target.t(k) + &target.t(k + 1),
                std::cmp::Ordering::Greater => target.t(k + 1),
            })
            .collect();
        Ok(self.pullback(&target, &images, a))
    }

    /// Restriction to the subsimplex spanned by the vertices of `cell`, in
    /// their order.
    pub fn restrict(&self, cell: &Cell, a: &PolyForm) -> PolyForm {
        let target = Simplex::new(cell.0.len() - 1);
        let images: Vec<PolyForm> = (1..=self.n)
            .map(|m| match cell.0.iter().position(|&v| v == m) {
                Some(j) => target.t(j),
                None => Lin::zero(),
            })
            .collect();
        self.pullback(&target, &images, a)
    }

    /// `p(ω) = Σ_I (∫_{Δ_I} ω) ω_I`.
    pub fn p(&self, a: &PolyForm) -> WhitneyVec {
        self.cells()
            .into_iter()
            .filter_map(|cell| {
                let k = cell.0.len() - 1;
                let part = a.filter(|m| m.dts.count_ones() as usize == k);
                if part.is_zero() {
                    return None;
                }
                let face = Simplex::new(k);
                let c = face.integrate(&self.restrict(&cell, &part));
                (!c.is_zero()).then_some((cell, c))
            })
            .collect()
    }

    /// Inclusion `C_n → Ω_n`.
    pub fn i(&self, c: &WhitneyVec) -> PolyForm {
        let mut out = Lin::zero();
        for (cell, coeff) in c.iter() {
            out.add_scaled(&self.whitney(&cell.0).expect("valid cell"), coeff);
        }
        out
    }

    /// `h_(i)`: pull back along `(u, t) ↦ (1-u)t + u e_i`, write the result as
    /// `α + du·β` and return `-∫_0^1 β du`.
    pub fn h_vertex(&self, i: usize, a: &PolyForm) -> PolyForm {
        let mut out = Lin::zero();
        for (m, c) in a.iter() {
            let key = (i, m.clone());
            let cached = self.h_cache.borrow().get(&key).cloned();
            let img = cached.unwrap_or_else(|| {
                let v = self.h_vertex_mono(i, m);
                self.h_cache.borrow_mut().insert(key, v.clone());
                v
            });
            out.add_scaled(&img, c);
        }
        out
    }

    fn h_vertex_mono(&self, i: usize, m: &Mono) -> PolyForm {
        let mut term = UForm::one(self);
        for j in 1..=self.n {
            let img = UForm::pull_t(self, i, j);
            for _ in 0..m.exps[j - 1] {
                term = term.mul(&img);
            }
        }
        for j in 1..=self.n {
            if m.dts >> (j - 1) & 1 == 1 {
                term = term.mul(&UForm::pull_dt(self, i, j));
            }
        }
        term.fiber_integral()
    }

    /// `h = Σ_{k<n} Σ_{i_0<…<i_k} (-1)^k ω_{i_0…i_k} h_(i_k)⋯h_(i_0)`.
    pub fn h(&self, a: &PolyForm) -> PolyForm {
        let mut out = Lin::zero();
        for cell in self.cells() {
            if cell.0.len() > self.n {
                continue;
            }
            let mut v = a.clone();
            for &i in &cell.0 {
                v = self.h_vertex(i, &v);
                if v.is_zero() {
                    break;
                }
            }
            if !v.is_zero() {
                let sign = parity_sign(cell.0.len() % 2 == 0);
                out.add_scaled(&self.mul(&self.whitney(&cell.0).expect("valid cell"), &v), &sign);
            }
        }
        out
    }

    /// Monomials with `Σ a_i ≤ cap` and any set of `dt`'s.
    pub fn monomials(&self, cap: u32) -> Vec<Mono> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.n];
        fn go(j: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if j == exps.len() {
                out.push(exps.clone());
                return;
            }
            for e in 0..=left {
                exps[j] = e;
                go(j + 1, left - e, exps, out);
            }
            exps[j] = 0;
        }
        let mut all = Vec::new();
        go(0, cap, &mut exps, &mut all);
        for e in all {
            for dts in 0u32..1 << self.n {
                out.push(Mono { exps: e.clone(), dts });
            }
        }
        out
    }

    pub fn form_json(&self, a: &PolyForm) -> Value {
        Value::Array(a.iter().map(|(m, c)| json!({"t": m.exps, "dt": dt_list(m.dts), "c": fmt_q(c)})).collect())
    }
}

fn dt_list(dts: u32) -> Vec<usize> {
    (0..32).filter(|j| dts >> j & 1 == 1).map(|j| j + 1).collect()
}

/// Forms on `Δ^1 × Δ^n` as `u^a du^ε ω`, `du` leftmost.
#[derive(Clone, Debug, Default)]
struct UForm(BTreeMap<(u32, bool, Mono), Q>);

impl UForm {
    fn one(s: &Simplex) -> Self {
        let mut m = BTreeMap::new();
        m.insert((0, false, s.mono(vec![0; s.n], 0)), Q::one());
        UForm(m)
    }

    fn add(&mut self, key: (u32, bool, Mono), c: Q) {
        let entry = self.0.entry(key.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&key);
        }
    }

    fn mul(&self, other: &UForm) -> UForm {
        let mut out = UForm::default();
        for ((a, ea, ma), ca) in &self.0 {
            for ((b, eb, mb), cb) in &other.0 {
                if *ea && *eb {
                    continue;
                }
                let Some((m, odd)) = Simplex::mono_mul(ma, mb) else { continue };
                // du from the right factor moves left past ma
                let du_odd = *eb && ma.dts.count_ones() % 2 == 1;
                out.add((a + b, *ea || *eb, m), ca * cb * parity_sign(odd ^ du_odd));
            }
        }
        out
    }

    /// `(1-u) t_j + u δ_ij`, with `t_0` expanded.
    fn pull_t(s: &Simplex, i: usize, j: usize) -> UForm {
        let mut out = UForm::default();
        let tj = s.mono(unit(s.n, j), 0);
        out.add((0, false, tj.clone()), Q::one());
        out.add((1, false, tj), -Q::one());
        if i == j {
            out.add((1, false, s.mono(vec![0; s.n], 0)), Q::one());
        }
        out
    }

    /// `d((1-u) t_j + u δ_ij) = -du t_j + (1-u) dt_j + δ_ij du`.
    fn pull_dt(s: &Simplex, i: usize, j: usize) -> UForm {
        let mut out = UForm::default();
        let zero = vec![0; s.n];
        out.add((0, true, s.mono(unit(s.n, j), 0)), -Q::one());
        let dtj = s.mono(zero.clone(), 1 << (j - 1));
        out.add((0, false, dtj.clone()), Q::one());
        out.add((1, false, dtj), -Q::one());
        if i == j {
            out.add((0, true, s.mono(zero, 0)), Q::one());
        }
        out
    }

    fn fiber_integral(&self) -> PolyForm {
        self.0
            .iter()
            .filter(|((_, du, _), _)| *du)
            .map(|((a, _, m), c)| (m.clone(), -(c / Q::from_integer(BigInt::from(a + 1)))))
            .collect()
    }
}

fn unit(n: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[j - 1] = 1;
    e
}

impl CommAlg for Simplex {
    type K = Mono;
    fn mul(&self, a: &Mono, b: &Mono) -> PolyForm {
        match Self::mono_mul(a, b) {
            Some((m, odd)) => Lin::term(m, parity_sign(odd)),
            None => Lin::zero(),
        }
    }
    fn d(&self, a: &Mono) -> PolyForm {
        Simplex::d(self, &Lin::basis(a.clone()))
    }
    fn unit(&self) -> Mono {
        self.mono(vec![0; self.n], 0)
    }
}

/// Outcome of checking the contraction identities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContractionReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl ContractionReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 10 {
            self.failures.push(what());
        }
    }
}

/// `pi = 1` on `C_n`; `1 - ip = dh + hd`, `h² = 0`, `ph = 0` on monomials of
/// polynomial degree at most `cap`; `hi = 0` on `C_n`.
pub fn verify_contraction(n: usize, cap: u32) -> ContractionReport {
    let s = Simplex::new(n);
    let mut report = ContractionReport::default();
    for cell in s.cells() {
        let c = Lin::basis(cell.clone());
        let back = s.p(&s.i(&c));
        report.record(back == c, || format!("pi != 1 on {}", cell.name()));
        report.record(s.h(&s.i(&c)).is_zero(), || format!("hi != 0 on {}", cell.name()));
        report.record(s.i(&s.d_whitney(&c)) == s.d(&s.i(&c)), || format!("i is not a chain map on {}", cell.name()));
    }
    for m in s.monomials(cap) {
        let w = Lin::basis(m.clone());
        let hw = s.h(&w);
        let homotopy = &(&w - &s.i(&s.p(&w))) - &(&s.d(&hw) + &s.h(&s.d(&w)));
        report.record(homotopy.is_zero(), || format!("1 - ip != dh + hd on {m:?}"));
        report.record(s.h(&hw).is_zero(), || format!("hh != 0 on {m:?}"));
        report.record(s.p(&hw).is_zero(), || format!("ph != 0 on {m:?}"));
    }
    report
}
