//! Finite graded vector spaces, degree-homogeneous maps, Koszul signs and
//! suspension bookkeeping. Chain convention: differentials have degree -1.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lin::{Graded, Lin};
use crate::scalar::{parity_sign, Q};

/// Basis symbol of a [`GradedSpace`]. Ordered by index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym {
    pub idx: usize,
    pub deg: i64,
    pub wt: u32,
}

impl Graded for Sym {
    fn deg(&self) -> i64 {
        self.deg
    }
    fn weight(&self) -> u32 {
        self.wt
    }
}

pub type Vector = Lin<Sym>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub id: String,
    pub deg: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSpace {
    pub basis: Vec<BasisEntry>,
}

impl GradedSpace {
    pub fn new(entries: impl IntoIterator<Item = (String, i64, u32)>) -> Result<Self> {
        let basis: Vec<BasisEntry> = entries
            .into_iter()
            .map(|(id, deg, w)| BasisEntry { id, deg, weight: Some(w) })
            .collect();
        let space = GradedSpace { basis };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<&str> = self.basis.iter().map(|b| b.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate basis id {:?}", w[0]));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn sym(&self, idx: usize) -> Sym {
        let b = &self.basis[idx];
        Sym { idx, deg: b.deg, wt: b.weight.unwrap_or(0) }
    }

    pub fn syms(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.dim()).map(|i| self.sym(i))
    }

    pub fn elt(&self, idx: usize) -> Vector {
        Lin::basis(self.sym(idx))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.id == id)
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.basis[idx].id
    }

    pub fn max_weight(&self) -> u32 {
        self.syms().map(|s| s.wt).max().unwrap_or(0)
    }

    /// Shifts every degree by `k`.
    pub fn suspend(&self, k: i64) -> GradedSpace {
        GradedSpace {
            basis: self
                .basis
                .iter()
                .map(|b| BasisEntry { deg: b.deg + k, ..b.clone() })
                .collect(),
        }
    }

    /// Rebuilds a vector of another space with the same indexing in this one.
    pub fn reindex(&self, v: &Vector) -> Vector {
        v.map_keys(|s| self.sym(s.idx))
    }
}

/// Degree-homogeneous linear map between finite graded spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMap {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub degree: i64,
    images: Vec<Vector>,
}

impl GMap {
    pub fn new(source: GradedSpace, target: GradedSpace, degree: i64, images: Vec<Vector>) -> Result<Self> {
        if images.len() != source.dim() {
            return invalid("one image per source basis symbol is required");
        }
        for (s, img) in source.syms().zip(&images) {
            for k in img.keys() {
                if k.idx >= target.dim() {
                    return invalid(format!("image of {} leaves the target", source.id(s.idx)));
                }
                if target.sym(k.idx).deg != s.deg + degree {
                    return invalid(format!("image of {} is not of degree {}", source.id(s.idx), s.deg + degree));
                }
            }
        }
        let images = images.iter().map(|v| target.reindex(v)).collect();
        Ok(GMap { source, target, degree, images })
    }

    pub fn zero(source: GradedSpace, target: GradedSpace, degree: i64) -> Self {
        let images = vec![Lin::zero(); source.dim()];
        GMap { source, target, degree, images }
    }

    pub fn identity(space: GradedSpace) -> Self {
        let images = space.syms().map(Lin::basis).collect();
        GMap { source: space.clone(), target: space, degree: 0, images }
    }

    pub fn image(&self, idx: usize) -> &Vector {
        &self.images[idx]
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        v.apply(|s| self.images[s.idx].clone())
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GMap) -> GMap {
        let images = first.images.iter().map(|v| self.apply(v)).collect();
        GMap {
            source: first.source.clone(),
            target: self.target.clone(),
            degree: self.degree + first.degree,
            images,
        }
    }

    pub fn scale(&self, c: &Q) -> GMap {
        GMap { images: self.images.iter().map(|v| v.scale(c)).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &GMap) -> Result<GMap> {
        if self.degree != other.degree || self.source.dim() != other.source.dim() {
            return invalid("maps of different shape");
        }
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect();
        Ok(GMap { images, ..self.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Lin::is_zero)
    }

    /// `s^k f s^{-k}`: degrees shift on both sides and the map picks up
    /// `(-1)^{k|f|}`. For a differential and `k = 1` this is `d(sv) = -s dv`.
    pub fn suspend(&self, k: i64) -> GMap {
        let sign = parity_sign((k * self.degree).rem_euclid(2) == 1);
        let source = self.source.suspend(k);
        let target = self.target.suspend(k);
        let images = self.images.iter().map(|v| target.reindex(v).scale(&sign)).collect();
        GMap { source, target, degree: self.degree, images }
    }
}

/// `∂f = d_W f - (-1)^{|f|} f d_V`.
pub fn hom_differential(f: &GMap, d_source: &GMap, d_target: &GMap) -> GMap {
    let left = d_target.compose(f);
    let right = f.compose(d_source).scale(&-parity_sign(f.degree.rem_euclid(2) == 1));
    left.add(&right).expect("same shape")
}

/// Parity of the Koszul sign of the permutation placing input `perm[i]` at
/// position `i`.
pub fn koszul_parity(perm: &[usize], degrees: &[i64]) -> bool {
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && degrees[perm[i]] * degrees[perm[j]] % 2 != 0 {
                odd = !odd;
            }
        }
    }
    odd
}

/// Koszul sign of a permutation given 1-based as a list of indices.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<Q> {
    if perm.len() != degrees.len() {
        return invalid("permutation and degree lists differ in length");
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p == 0 || p > perm.len() || seen[p - 1] {
            return invalid("not a permutation of 1..n");
        }
        seen[p - 1] = true;
    }
    let zero_based: Vec<usize> = perm.iter().map(|p| p - 1).collect();
    Ok(parity_sign(koszul_parity(&zero_based, degrees)))
}

/// Sorts graded keys, returning the parity of the Koszul sign picked up.
pub fn sort_graded<K: Graded>(keys: &[K]) -> (Vec<K>, bool) {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    let degs: Vec<i64> = keys.iter().map(Graded::deg).collect();
    let odd = koszul_parity(&order, &degs);
    (order.into_iter().map(|i| keys[i].clone()).collect(), odd)
}

/// True when a sorted tuple repeats an odd key, so every graded-symmetric map
/// vanishes on it.
pub fn repeats_odd<K: Graded>(sorted: &[K]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1] && w[0].deg() % 2 != 0)
}

/// `(f ⊗ g)(v ⊗ w) = (-1)^{|g||v|} f(v) ⊗ g(w)`.
pub fn tensor_apply(f: &GMap, g: &GMap, v: &Vector, w: &Vector) -> Result<Lin<(Sym, Sym)>> {
    let dv = v
        .homogeneous_deg()
        .ok_or_else(|| Error::InvalidInput("tensor_apply needs a homogeneous left factor".into()))?;
    let sign = parity_sign(g.degree * dv % 2 != 0);
    let fv = f.apply(v);
    let gw = g.apply(w);
    let mut out = Lin::zero();
    for (a, ca) in fv.iter() {
        for (b, cb) in gw.iter() {
            out.add_term((*a, *b), ca * cb * &sign);
        }
    }
    Ok(out)
}

/// Sign carried by the dual of `s^n`: `(-1)^{n(n-1)/2}`.
pub fn dual_suspension_sign(n: i64) -> Q {
    parity_sign((n * (n - 1) / 2).rem_euclid(2) == 1)
}

/// Sign of `S_n ∘_j S_m`: `(-1)^{(j-1)(1-m)}`.
pub fn op_suspension_sign(n: usize, j: usize, m: usize) -> Result<Q> {
    if j == 0 || j > n {
        return invalid(format!("slot {j} out of range 1..={n}"));
    }
    let e = (j as i64 - 1) * (1 - m as i64);
    Ok(parity_sign(e.rem_euclid(2) == 1))
}

/// True iff `d ∘ d = 0` on every basis symbol.
pub fn check_complex(d: &GMap) -> Result<bool> {
    if d.degree != -1 {
        return invalid(format!("a differential has degree -1, got {}", d.degree));
    }
    if d.source != d.target {
        return invalid("a differential is an endomorphism");
    }
    Ok(d.compose(d).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn space(degs: &[i64]) -> GradedSpace {
        GradedSpace::new(degs.iter().enumerate().map(|(i, &d)| (format!("e{i}"), d, 0))).unwrap()
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[2, 1], &[1, 1]).unwrap(), q(-1));
        assert_eq!(koszul_sign(&[1, 2, 3], &[1, 3, 5]).unwrap(), q(1));
        assert_eq!(koszul_sign(&[2, 1], &[2, 3]).unwrap(), q(1));
        assert!(koszul_sign(&[1, 2], &[1]).is_err());
        assert!(koszul_sign(&[1, 1], &[1, 1]).is_err());
    }

    #[test]
    fn tensor_apply_signs() {
        let v = space(&[1, 2, 0]);
        let f = GMap::identity(v.clone());
        let shift = GradedSpace { basis: v.basis.iter().map(|b| BasisEntry { deg: b.deg + 1, ..b.clone() }).collect() };
        let g1 = GMap::new(v.clone(), shift, 1, v.syms().map(|s| Lin::basis(Sym { deg: s.deg + 1, ..s })).collect()).unwrap();
        let out = tensor_apply(&f, &g1, &v.elt(0), &v.elt(2)).unwrap();
        assert_eq!(out.iter().next().unwrap().1, &q(-1));
        let out = tensor_apply(&f, &f, &v.elt(0), &v.elt(2)).unwrap();
        assert_eq!(out.iter().next().unwrap().1, &q(1));
        let out = tensor_apply(&f, &g1, &v.elt(1), &v.elt(2)).unwrap();
        assert_eq!(out.iter().next().unwrap().1, &q(1));
        assert!(tensor_apply(&f, &g1, &(v.elt(0) + v.elt(1)), &v.elt(2)).is_err());
    }

    #[test]
    fn suspension_of_a_two_term_complex() {
        let v = space(&[1, 0]);
        let d = GMap::new(v.clone(), v.clone(), -1, vec![v.elt(1), Lin::zero()]).unwrap();
        assert_eq!(d.suspend(0), d);
        let sd = d.suspend(1);
        assert_eq!(sd.source.sym(0).deg, 2);
        assert_eq!(sd.image(0), &Lin::term(sd.target.sym(1), q(-1)));
        assert_eq!(sd.suspend(-1), d);
        assert_eq!(dual_suspension_sign(2), q(-1));
        assert_eq!(dual_suspension_sign(1), q(1));
    }

    #[test]
    fn complexes() {
        let v = space(&[2, 1, 0]);
        assert!(check_complex(&GMap::zero(v.clone(), v.clone(), -1)).unwrap());
        let two = space(&[1, 0]);
        let d = GMap::new(two.clone(), two.clone(), -1, vec![two.elt(1), Lin::zero()]).unwrap();
        assert!(check_complex(&d).unwrap());
        let bad = GMap::new(v.clone(), v.clone(), -1, vec![v.elt(1), v.elt(2), Lin::zero()]).unwrap();
        assert!(!check_complex(&bad).unwrap());
        assert!(check_complex(&GMap::identity(v)).is_err());
    }

    #[test]
    fn inhomogeneous_images_are_rejected() {
        let v = space(&[1, 0]);
        assert!(GMap::new(v.clone(), v.clone(), -1, vec![v.elt(0), Lin::zero()]).is_err());
        assert!(GradedSpace::new([("a".to_string(), 0, 0), ("a".to_string(), 1, 0)]).is_err());
    }

    #[test]
    fn operadic_suspension_signs() {
        assert_eq!(op_suspension_sign(2, 1, 2).unwrap(), q(1));
        assert_eq!(op_suspension_sign(2, 2, 2).unwrap(), q(-1));
        for m in 1..6 {
            assert_eq!(op_suspension_sign(4, 1, m).unwrap(), q(1));
        }
        assert!(op_suspension_sign(2, 3, 2).is_err());
    }

    fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        a.iter().map(|&i| b[i]).collect()
    }

    proptest! {
        #[test]
        fn koszul_sign_is_multiplicative(
            (sigma, tau, degs) in (1usize..=6).prop_flat_map(|n| (
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                proptest::collection::vec(-3i64..4, n),
            ))
        ) {
            // Applying tau then sigma: position i holds input tau[sigma[i]].
            let total = compose(&sigma, &tau);
            let moved: Vec<i64> = tau.iter().map(|&i| degs[i]).collect();
            let lhs = koszul_parity(&total, &degs);
            let rhs = koszul_parity(&tau, &degs) ^ koszul_parity(&sigma, &moved);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hom_differential_squares_to_zero(deg in -2i64..3, seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Two-term complexes on each side: e1 -> e0.
            let v = space(&[1, 0]);
            let w = space(&[1 + deg, deg]);
            let dv = GMap::new(v.clone(), v.clone(), -1, vec![v.elt(1).scale(&q(rng.gen_range(-3..4))), Lin::zero()]).unwrap();
            let dw = GMap::new(w.clone(), w.clone(), -1, vec![w.elt(1).scale(&q(rng.gen_range(-3..4))), Lin::zero()]).unwrap();
            let f = GMap::new(v.clone(), w.clone(), deg, vec![w.elt(0).scale(&q(rng.gen_range(-3..4))), w.elt(1).scale(&q(rng.gen_range(-3..4)))]).unwrap();
            let df = hom_differential(&f, &dv, &dw);
            prop_assert!(hom_differential(&df, &dv, &dw).is_zero());
        }

        #[test]
        fn suspend_then_desuspend_is_identity(k in -3i64..4, d0 in -2i64..3, d1 in -2i64..3) {
            let v = space(&[d0, d1]);
            let deg = d1 - d0;
            let f = GMap::new(v.clone(), v.clone(), deg, vec![v.elt(1), Lin::zero()]).unwrap();
            prop_assert_eq!(v.suspend(k).suspend(-k), v);
            prop_assert_eq!(f.suspend(k).suspend(-k), f);
        }
    }
}
