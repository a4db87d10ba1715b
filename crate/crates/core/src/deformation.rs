//! Hochschild and Chevalley–Eilenberg deformation complexes of
//! finite-dimensional algebras over the rationals.

use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{fmt_q, parity_sign, parse_q, q, Q};

/// A multilinear map `A^{⊗n} → A` on `A = Q^dim`, stored densely: entry
/// `(inputs, out)` is the `e_out` coefficient of `f(e_inputs)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    dim: usize,
    arity: usize,
    coeffs: Vec<Q>,
}

fn flat(dim: usize, inputs: &[usize]) -> usize {
    inputs.iter().fold(0, |acc, &i| acc * dim + i)
}

/// All input tuples of length `n` in lexicographic order.
pub fn tuples(dim: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..dim.pow(n as u32)).map(move |mut k| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = k % dim;
            k /= dim;
        }
        t
    })
}

fn add_scaled(acc: &mut [Q], v: &[Q], c: &Q) {
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += x * c;
        }
    }
}

impl Cochain {
    pub fn zero(dim: usize, arity: usize) -> Self {
        Cochain { dim, arity, coeffs: vec![Q::zero(); dim.pow(arity as u32 + 1)] }
    }

    pub fn from_fn(dim: usize, arity: usize, mut f: impl FnMut(&[usize]) -> Vec<Q>) -> Self {
        let mut coeffs = Vec::with_capacity(dim.pow(arity as u32 + 1));
        for t in tuples(dim, arity) {
            let v = f(&t);
            debug_assert_eq!(v.len(), dim);
            coeffs.extend(v);
        }
        Cochain { dim, arity, coeffs }
    }

    /// The basis cochain with a single unit entry at flat position `k`.
    pub fn unit(dim: usize, arity: usize, k: usize) -> Self {
        let mut c = Self::zero(dim, arity);
        c.coeffs[k] = Q::one();
        c
    }

    /// An element of `A` as an arity-0 cochain.
    pub fn element(v: &[Q]) -> Self {
        Cochain { dim: v.len(), arity: 0, coeffs: v.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Degree in the deformation complex: `arity - 1`.
    pub fn degree(&self) -> i64 {
        self.arity as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn value(&self, inputs: &[usize]) -> &[Q] {
        let k = flat(self.dim, inputs) * self.dim;
        &self.coeffs[k..k + self.dim]
    }

    pub fn set(&mut self, inputs: &[usize], out: usize, c: Q) {
        let k = flat(self.dim, inputs) * self.dim + out;
        self.coeffs[k] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Cochain { dim: self.dim, arity: self.arity, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Nonzero entries as `(inputs, out, coefficient)`.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, usize, &Q)> + '_ {
        tuples(self.dim, self.arity)
            .flat_map(move |t| (0..self.dim).map(move |o| (t.clone(), o)))
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|((t, o), c)| (t, o, c))
    }

    /// `f(x_1, …, x_n)` on arbitrary vectors.
    pub fn apply(&self, args: &[&[Q]]) -> Vec<Q> {
        assert_eq!(args.len(), self.arity, "arity mismatch");
        let mut out = vec![Q::zero(); self.dim];
        for t in tuples(self.dim, self.arity) {
            let mut c = Q::one();
            for (x, &i) in args.iter().zip(&t) {
                c *= &x[i];
                if c.is_zero() {
                    break;
                }
            }
            if !c.is_zero() {
                add_scaled(&mut out, self.value(&t), &c);
            }
        }
        out
    }

    /// `f` on basis inputs, with the basis input at `slot` replaced by `v`.
    fn apply_at(&self, inputs: &[usize], slot: usize, v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        let mut t = inputs.to_vec();
        for (k, c) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            t[slot] = k;
            add_scaled(&mut out, self.value(&t), c);
        }
        out
    }

    fn same_shape(&self, other: &Cochain) {
        assert!(self.dim == other.dim && self.arity == other.arity, "cochain shape mismatch");
    }
}

impl Add for &Cochain {
    type Output = Cochain;
    fn add(self, other: &Cochain) -> Cochain {
        self.same_shape(other);
        Cochain { dim: self.dim, arity: self.arity, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Cochain {
    type Output = Cochain;
    fn sub(self, other: &Cochain) -> Cochain {
        self.same_shape(other);
        Cochain { dim: self.dim, arity: self.arity, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Cochain {
    type Output = Cochain;
    fn neg(self) -> Cochain {
        self.scale(&-Q::one())
    }
}

fn check_dims(f: &Cochain, g: &Cochain) -> Result<()> {
    if f.dim != g.dim {
        return invalid(format!("cochains on spaces of dimensions {} and {}", f.dim, g.dim));
    }
    Ok(())
}

fn require_arity(f: &Cochain, arity: usize, what: &str) -> Result<()> {
    if f.arity != arity {
        return invalid(format!("{what} must have arity {arity}, got {}", f.arity));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Hochschild

/// `f ∘_i g`: `g` inserted at the `i`-th input of `f` (0-based).
pub fn insert(f: &Cochain, i: usize, g: &Cochain) -> Cochain {
    let (n, m) = (f.arity, g.arity);
    assert!(i < n, "insertion slot out of range");
    Cochain::from_fn(f.dim, n + m - 1, |a| {
        let mut inputs = a[..i].to_vec();
        inputs.push(0);
        inputs.extend_from_slice(&a[i + m..]);
        f.apply_at(&inputs, i, g.value(&a[i..i + m]))
    })
}

/// `f ∘ g = Σ_i (-1)^{(i-1)(m-1)} f ∘_i g` (1-based `i`).
pub fn gerstenhaber_circ(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    check_dims(f, g)?;
    let mut out = Cochain::zero(f.dim, (f.arity + g.arity).saturating_sub(1));
    if f.arity == 0 {
        return Ok(out);
    }
    for i in 0..f.arity {
        let odd = (i * (g.arity + 1)) % 2 == 1;
        out = &out + &insert(f, i, g).scale(&parity_sign(odd));
    }
    Ok(out)
}

/// `[f, g] = f ∘ g - (-1)^{|f||g|} g ∘ f` with `|f| = arity - 1`.
pub fn gerstenhaber(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    let odd = (f.degree() * g.degree()).rem_euclid(2) == 1;
    let fg = gerstenhaber_circ(f, g)?;
    let gf = gerstenhaber_circ(g, f)?;
    Ok(&fg - &gf.scale(&parity_sign(odd)))
}

/// `d(f)(a_1, …, a_{n+1}) = m(a_1, f(a_2, …)) + Σ_k (-1)^k f(…, m(a_k, a_{k+1}), …)
/// + (-1)^{n+1} m(f(a_1, …, a_n), a_{n+1})`.
pub fn hoch_differential(m: &Cochain, f: &Cochain) -> Result<Cochain> {
    require_arity(m, 2, "multiplication")?;
    check_dims(m, f)?;
    let n = f.arity;
    let mut out = insert(m, 1, f);
    for k in 0..n {
        out = &out + &insert(f, k, m).scale(&parity_sign(k % 2 == 0));
    }
    Ok(&out + &insert(m, 0, f).scale(&parity_sign(n % 2 == 0)))
}

/// `m(m(a, b), c) - m(a, m(b, c))`.
pub fn associator(m: &Cochain) -> Result<Cochain> {
    require_arity(m, 2, "multiplication")?;
    Ok(&insert(m, 0, m) - &insert(m, 1, m))
}

/// The Maurer–Cartan test and the direct structure test, computed
/// independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McCheck {
    /// `½[m, m] = 0`.
    pub bracket_vanishes: bool,
    /// Associativity, resp. antisymmetry and Jacobi.
    pub direct: bool,
}

impl McCheck {
    pub fn agree(&self) -> bool {
        self.bracket_vanishes == self.direct
    }

    pub fn holds(&self) -> bool {
        self.bracket_vanishes && self.direct
    }
}

pub fn is_mc_associative(m: &Cochain) -> Result<McCheck> {
    let half = Q::new(1.into(), 2.into());
    let mc = gerstenhaber(m, m)?.scale(&half);
    Ok(McCheck { bracket_vanishes: mc.is_zero(), direct: associator(m)?.is_zero() })
}

fn require_associative(m: &Cochain) -> Result<()> {
    if !associator(m)?.is_zero() {
        return Err(Error::Precondition("multiplication is not associative".into()));
    }
    Ok(())
}

/// Whether `m + εf` is associative over `k[ε]/(ε²)`, i.e. `d(f) = 0`.
pub fn infinitesimal_deformation_check(m: &Cochain, f: &Cochain) -> Result<bool> {
    require_associative(m)?;
    require_arity(f, 2, "deformation")?;
    Ok(hoch_differential(m, f)?.is_zero())
}

/// `f(x, y) = g(m(x, y)) - m(g(x), y) - m(x, g(y))`, the deformation induced
/// by the infinitesimal automorphism `1 + εg`.
pub fn trivial_deformation(m: &Cochain, g: &Cochain) -> Result<Cochain> {
    require_arity(m, 2, "multiplication")?;
    require_arity(g, 1, "infinitesimal automorphism")?;
    check_dims(m, g)?;
    Ok(&(&insert(g, 0, m) - &insert(m, 0, g)) - &insert(m, 1, g))
}

/// Matrix of a linear map between cochain spaces, in the flat bases.
pub fn cochain_matrix(dim: usize, arity: usize, map: impl Fn(&Cochain) -> Result<Cochain>) -> Result<Matrix> {
    let source = dim.pow(arity as u32 + 1);
    let cols = (0..source).map(|k| map(&Cochain::unit(dim, arity, k)).map(|c| c.coeffs)).collect::<Result<Vec<_>>>()?;
    let rows = cols.first().map_or(0, Vec::len);
    Ok(Matrix::from_cols(rows, &cols))
}

fn cohomology_dim(dim: usize, arity: usize, d: impl Fn(&Cochain) -> Result<Cochain>) -> Result<usize> {
    let outgoing = cochain_matrix(dim, arity, &d)?;
    let cycles = dim.pow(arity as u32 + 1) - outgoing.rank();
    let boundaries = if arity == 0 { 0 } else { cochain_matrix(dim, arity - 1, &d)?.rank() };
    Ok(cycles - boundaries)
}

/// `dim HH^n(A, A)` on `hom(A^{⊗n}, A)`.
pub fn hochschild_cohomology_dim(m: &Cochain, arity: usize) -> Result<usize> {
    require_associative(m)?;
    cohomology_dim(m.dim, arity, |f| hoch_differential(m, f))
}

// ---------------------------------------------------------------------------
// Chevalley–Eilenberg

/// `f(…, x_i, x_{i+1}, …) = -f(…, x_{i+1}, x_i, …)` and vanishing on
/// repeated inputs.
pub fn is_alternating(f: &Cochain) -> bool {
    tuples(f.dim, f.arity).all(|t| {
        (0..f.arity.saturating_sub(1)).all(|i| {
            let mut s = t.clone();
            s.swap(i, i + 1);
            let (a, b) = (f.value(&t), f.value(&s));
            if t[i] == t[i + 1] {
                a.iter().all(Zero::is_zero)
            } else {
                a.iter().zip(b).all(|(x, y)| x == &-y.clone())
            }
        })
    })
}

/// `[[x, y], z] + [[y, z], x] + [[z, x], y]`.
pub fn jacobiator(b: &Cochain) -> Result<Cochain> {
    require_arity(b, 2, "bracket")?;
    Ok(Cochain::from_fn(b.dim, 3, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        let mut out = b.apply_at(&[0, z], 0, b.value(&[x, y]));
        add_scaled(&mut out, &b.apply_at(&[0, x], 0, b.value(&[y, z])), &Q::one());
        add_scaled(&mut out, &b.apply_at(&[0, y], 0, b.value(&[z, x])), &Q::one());
        out
    }))
}

fn require_lie(b: &Cochain) -> Result<()> {
    if !is_alternating(b) || !jacobiator(b)?.is_zero() {
        return Err(Error::Precondition("bracket is not a Lie bracket".into()));
    }
    Ok(())
}

fn require_alternating(f: &Cochain) -> Result<()> {
    if !is_alternating(f) {
        return invalid("Chevalley–Eilenberg cochains are alternating");
    }
    Ok(())
}

/// `d(f)(x_0, …, x_n) = Σ_{i<j} (-1)^{i+j} f([x_i, x_j], …, x̂_i, …, x̂_j, …)
/// + Σ_k (-1)^k [x_k, f(…, x̂_k, …)]`.
pub fn chevalley_eilenberg(b: &Cochain, f: &Cochain) -> Result<Cochain> {
    require_lie(b)?;
    require_alternating(f)?;
    check_dims(b, f)?;
    let n = f.arity;
    Ok(Cochain::from_fn(b.dim, n + 1, |x| {
        let mut out = vec![Q::zero(); b.dim];
        for i in 0..=n {
            for j in i + 1..=n {
                let mut inputs = vec![0];
                inputs.extend((0..=n).filter(|&k| k != i && k != j).map(|k| x[k]));
                let v = f.apply_at(&inputs, 0, b.value(&[x[i], x[j]]));
                add_scaled(&mut out, &v, &parity_sign((i + j) % 2 == 1));
            }
        }
        for k in 0..=n {
            let rest: Vec<usize> = (0..=n).filter(|&l| l != k).map(|l| x[l]).collect();
            let v = b.apply_at(&[x[k], 0], 1, f.value(&rest));
            add_scaled(&mut out, &v, &parity_sign(k % 2 == 1));
        }
        out
    }))
}

/// `Σ_{σ ∈ Sh(m, n-1)} sgn(σ) f(g(x_σ(1), …, x_σ(m)), x_σ(m+1), …)`.
pub fn ce_circ(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    check_dims(f, g)?;
    let (n, m) = (f.arity, g.arity);
    if n == 0 {
        return Ok(Cochain::zero(f.dim, m.saturating_sub(1)));
    }
    let total = n + m - 1;
    Ok(Cochain::from_fn(f.dim, total, |x| {
        let mut out = vec![Q::zero(); f.dim];
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let front: Vec<usize> = (0..total).filter(|i| mask >> i & 1 == 1).collect();
            let displaced: usize = front.iter().enumerate().map(|(pos, &i)| i - pos).sum();
            let mut inputs = vec![0];
            inputs.extend((0..total).filter(|i| mask >> i & 1 == 0).map(|i| x[i]));
            let gx: Vec<usize> = front.iter().map(|&i| x[i]).collect();
            let v = f.apply_at(&inputs, 0, g.value(&gx));
            add_scaled(&mut out, &v, &parity_sign(displaced % 2 == 1));
        }
        out
    }))
}

/// `[f, g] = f ∘ g - (-1)^{|f||g|} g ∘ f` on alternating cochains.
pub fn ce_bracket(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    require_alternating(f)?;
    require_alternating(g)?;
    let odd = (f.degree() * g.degree()).rem_euclid(2) == 1;
    Ok(&ce_circ(f, g)? - &ce_circ(g, f)?.scale(&parity_sign(odd)))
}

pub fn is_mc_lie(b: &Cochain) -> Result<McCheck> {
    require_arity(b, 2, "bracket")?;
    require_alternating(b)?;
    let half = Q::new(1.into(), 2.into());
    let mc = ce_bracket(b, b)?.scale(&half);
    Ok(McCheck { bracket_vanishes: mc.is_zero(), direct: jacobiator(b)?.is_zero() })
}

/// Alternating cochains of the given arity as an alternating projection of
/// the flat basis; returns a spanning set.
fn alternating_basis(dim: usize, arity: usize) -> Vec<Cochain> {
    let mut out = Vec::new();
    for t in tuples(dim, arity).filter(|t| t.windows(2).all(|w| w[0] < w[1])) {
        for o in 0..dim {
            let mut c = Cochain::zero(dim, arity);
            for p in permutations(arity) {
                let s: Vec<usize> = p.iter().map(|&i| t[i]).collect();
                c.set(&s, o, parity_sign(permutation_parity(&p)));
            }
            out.push(c);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut r = p.clone();
            r.insert(pos, n - 1);
            out.push(r);
        }
    }
    out
}

fn permutation_parity(p: &[usize]) -> bool {
    let inversions: usize = (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum();
    inversions % 2 == 1
}

/// `dim H^n_CE(g, g)` on alternating maps of arity `n`.
pub fn ce_cohomology_dim(b: &Cochain, arity: usize) -> Result<usize> {
    require_lie(b)?;
    let span = |basis: Vec<Cochain>| -> Result<Matrix> {
        let cols = basis.iter().map(|c| chevalley_eilenberg(b, c).map(|d| d.coeffs)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_cols(cols.first().map_or(0, Vec::len), &cols))
    };
    let here = alternating_basis(b.dim, arity);
    let cycles = here.len() - span(here)?.rank();
    let boundaries = if arity == 0 { 0 } else { span(alternating_basis(b.dim, arity - 1))?.rank() };
    Ok(cycles - boundaries)
}

// ---------------------------------------------------------------------------
// fixtures

fn structure(dim: usize, rule: impl Fn(usize, usize) -> Vec<(usize, i64)>) -> Cochain {
    Cochain::from_fn(dim, 2, |t| {
        let mut v = vec![Q::zero(); dim];
        for (o, c) in rule(t[0], t[1]) {
            v[o] += q(c);
        }
        v
    })
}

/// Associative algebras of dimension at most 3, in their standard bases.
pub fn associative_catalog() -> Vec<(&'static str, Cochain)> {
    vec![
        ("k", structure(1, |_, _| vec![(0, 1)])),
        ("zero-2", Cochain::zero(2, 2)),
        ("k[x]/(x^2)", structure(2, |a, b| if a + b <= 1 { vec![(a + b, 1)] } else { vec![] })),
        ("k×k", structure(2, |a, b| if a == b { vec![(a, 1)] } else { vec![] })),
        ("k[x]/(x^3)", structure(3, |a, b| if a + b <= 2 { vec![(a + b, 1)] } else { vec![] })),
        ("k×k×k", structure(3, |a, b| if a == b { vec![(a, 1)] } else { vec![] })),
        // e11, e12, e22 with e_ij e_jk = e_ik
        ("upper triangular 2×2", structure(3, |a, b| {
            let idx = [(0, 0), (0, 1), (1, 1)];
            let ((i, j), (k, l)) = (idx[a], idx[b]);
            if j == k { vec![(idx.iter().position(|&p| p == (i, l)).unwrap(), 1)] } else { vec![] }
        })),
        // x·x = y, everything else zero
        ("x^2 = y", structure(3, |a, b| if a == 0 && b == 0 { vec![(1, 1)] } else { vec![] })),
    ]
}

/// Lie algebras of dimension at most 3, in their standard bases.
pub fn lie_catalog() -> Vec<(&'static str, Cochain)> {
    let antisym = |dim: usize, table: &'static [(usize, usize, usize, i64)]| {
        structure(dim, move |a, b| {
            table
                .iter()
                .filter_map(|&(x, y, o, c)| if (x, y) == (a, b) { Some((o, c)) } else if (y, x) == (a, b) { Some((o, -c)) } else { None })
                .collect()
        })
    };
    vec![
        ("abelian-2", Cochain::zero(2, 2)),
        ("aff(1)", antisym(2, &[(0, 1, 1, 1)])),
        ("heisenberg", antisym(3, &[(0, 1, 2, 1)])),
        // [h, e] = 2e, [h, f] = -2f, [e, f] = h
        ("sl2", antisym(3, &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)])),
        ("so3", antisym(3, &[(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)])),
    ]
}

pub(crate) fn small_coeff(rng: &mut ChaCha8Rng) -> Q {
    const CHOICES: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 3)];
    let (p, d) = CHOICES[rng.gen_range(0..CHOICES.len())];
    Q::new(p.into(), d.into())
}

/// A random invertible matrix (product of unitriangular factors) and its
/// inverse.
pub fn random_invertible(rng: &mut ChaCha8Rng, dim: usize) -> (Matrix, Matrix) {
    let mut lower = Matrix::identity(dim);
    let mut upper = Matrix::identity(dim);
    for i in 0..dim {
        for j in 0..i {
            if rng.gen_bool(0.6) {
                lower.set(i, j, small_coeff(rng));
            }
            if rng.gen_bool(0.6) {
                upper.set(j, i, small_coeff(rng));
            }
        }
    }
    let p = lower.mul(&upper);
    let cols: Vec<Vec<Q>> = (0..dim)
        .map(|j| {
            let e: Vec<Q> = (0..dim).map(|i| if i == j { Q::one() } else { Q::zero() }).collect();
            p.solve(&e).expect("unitriangular product is invertible")
        })
        .collect();
    (p.clone(), Matrix::from_cols(dim, &cols))
}

/// `P f(P^{-1} x_1, …, P^{-1} x_n)`.
pub fn transport(f: &Cochain, p: &Matrix, p_inv: &Matrix) -> Cochain {
    let cols: Vec<Vec<Q>> = (0..f.dim).map(|j| p_inv.col(j)).collect();
    Cochain::from_fn(f.dim, f.arity, |t| {
        let args: Vec<&[Q]> = t.iter().map(|&i| cols[i].as_slice()).collect();
        p.mul_vec(&f.apply(&args))
    })
}

pub fn random_cochain(rng: &mut ChaCha8Rng, dim: usize, arity: usize, density: f64) -> Cochain {
    let mut c = Cochain::zero(dim, arity);
    for k in 0..c.coeffs.len() {
        if rng.gen_bool(density) {
            c.coeffs[k] = small_coeff(rng);
        }
    }
    c
}

/// Random alternating cochain: the antisymmetrization of a random one.
pub fn random_alternating(rng: &mut ChaCha8Rng, dim: usize, arity: usize) -> Cochain {
    let mut out = Cochain::zero(dim, arity);
    for c in alternating_basis(dim, arity) {
        if rng.gen_bool(0.5) {
            out = &out + &c.scale(&small_coeff(rng));
        }
    }
    out
}

/// Seeded bilinear maps of dimension at most 3: even positions are catalog
/// algebras in a random basis, odd positions random tables (one in four a
/// small perturbation of a catalog algebra).
pub fn fuzzed_bilinear(seed: u64, count: usize) -> Vec<Cochain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let catalog = associative_catalog();
    (0..count)
        .map(|k| {
            let (_, base) = &catalog[rng.gen_range(0..catalog.len())];
            let (p, p_inv) = random_invertible(&mut rng, base.dim);
            let moved = transport(base, &p, &p_inv);
            match k % 4 {
                0 | 2 => moved,
                1 => {
                    let dim = rng.gen_range(1..=3);
                    random_cochain(&mut rng, dim, 2, 0.4)
                }
                _ => {
                    let mut bumped = moved;
                    let at = rng.gen_range(0..bumped.coeffs.len());
                    bumped.coeffs[at] += small_coeff(&mut rng);
                    bumped
                }
            }
        })
        .collect()
}

/// Catalog Lie algebras in a random basis.
pub fn random_lie(rng: &mut ChaCha8Rng) -> Cochain {
    let catalog = lie_catalog();
    let (_, base) = &catalog[rng.gen_range(0..catalog.len())];
    let (p, p_inv) = random_invertible(rng, base.dim);
    transport(base, &p, &p_inv)
}

/// Catalog associative algebras in a random basis.
pub fn random_associative(rng: &mut ChaCha8Rng) -> Cochain {
    let catalog = associative_catalog();
    let (_, base) = &catalog[rng.gen_range(0..catalog.len())];
    let (p, p_inv) = random_invertible(rng, base.dim);
    transport(base, &p, &p_inv)
}

// ---------------------------------------------------------------------------
// JSON

/// `[[i_1, …, i_n, out, "p/q"], …]`.
pub fn cochain_to_json(f: &Cochain) -> Value {
    Value::Array(
        f.entries()
            .map(|(t, o, c)| {
                let mut row: Vec<Value> = t.iter().map(|&i| json!(i)).collect();
                row.push(json!(o));
                row.push(json!(fmt_q(c)));
                Value::Array(row)
            })
            .collect(),
    )
}

fn json_q(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) if n.is_i64() => Ok(q(n.as_i64().unwrap_or_default())),
        _ => invalid(format!("expected a rational, got {v}")),
    }
}

pub fn cochain_from_json(dim: usize, arity: usize, v: &Value) -> Result<Cochain> {
    let rows = v.as_array().ok_or_else(|| Error::InvalidInput("cochain entries must be an array".into()))?;
    let mut f = Cochain::zero(dim, arity);
    for row in rows {
        let row = row.as_array().filter(|r| r.len() == arity + 2).ok_or_else(|| Error::InvalidInput(format!("entry {row} must have {} fields", arity + 2)))?;
        let idx = row[..=arity]
            .iter()
            .map(|x| x.as_u64().map(|i| i as usize).filter(|&i| i < dim).ok_or_else(|| Error::InvalidInput(format!("bad index {x}"))))
            .collect::<Result<Vec<usize>>>()?;
        let k = flat(dim, &idx[..arity]) * dim + idx[arity];
        f.coeffs[k] += json_q(&row[arity + 1])?;
    }
    Ok(f)
}

/// `{"dim": d, "m": entries, "f": entries?}` with bilinear `m` and `f`.
pub fn algebra_from_json(v: &Value) -> Result<(Cochain, Option<Cochain>)> {
    let dim = v.get("dim").and_then(Value::as_u64).filter(|&d| d > 0).ok_or_else(|| Error::InvalidInput("missing positive \"dim\"".into()))? as usize;
    let m = cochain_from_json(dim, 2, v.get("m").ok_or_else(|| Error::InvalidInput("missing \"m\"".into()))?)?;
    let f = v.get("f").map(|f| cochain_from_json(dim, 2, f)).transpose()?;
    Ok((m, f))
}

#[cfg(test)]
mod tests;
