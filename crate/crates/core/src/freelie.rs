//! Weight-truncated free graded associative algebras with Lie elements as
//! commutator expressions: BCH, gauge flows, the Lawrence–Sullivan algebra.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::lin::Lin;
use crate::linalg::Matrix;
use crate::scalar::{fmt_q, inv_factorial, parity_sign, show_q, Q};

/// A word in the generators; its length is its weight.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<u8>);

pub type TensorElt = Lin<Word>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

/// Truncated free algebra on named generators of weight 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAlg {
    pub gens: Vec<Generator>,
    pub cap: usize,
}

impl FreeAlg {
    pub fn new(gens: &[(&str, i64)], cap: usize) -> Result<Self> {
        let gens: Vec<Generator> = gens.iter().map(|&(n, d)| Generator { name: n.to_string(), degree: d }).collect();
        for (i, g) in gens.iter().enumerate() {
            if gens[..i].iter().any(|h| h.name == g.name) {
                return invalid(format!("duplicate generator {}", g.name));
            }
        }
        if gens.len() > u8::MAX as usize {
            return invalid("too many generators");
        }
        Ok(FreeAlg { gens, cap })
    }

    pub fn gen(&self, i: usize) -> TensorElt {
        Lin::basis(Word(vec![i as u8]))
    }

    pub fn gen_named(&self, name: &str) -> TensorElt {
        let i = self.gens.iter().position(|g| g.name == name).expect("unknown generator");
        self.gen(i)
    }

    pub fn one(&self) -> TensorElt {
        Lin::basis(Word(Vec::new()))
    }

    pub fn word_deg(&self, w: &Word) -> i64 {
        w.0.iter().map(|&l| self.gens[l as usize].degree).sum()
    }

    /// Common degree of a nonzero homogeneous element.
    pub fn degree(&self, a: &TensorElt) -> Option<i64> {
        let mut degs = a.keys().map(|w| self.word_deg(w));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn truncate(&self, a: &TensorElt) -> TensorElt {
        a.filter(|w| w.0.len() <= self.cap)
    }

    pub fn weight_part(&self, a: &TensorElt, k: usize) -> TensorElt {
        a.filter(|w| w.0.len() == k)
    }

    pub fn mul(&self, a: &TensorElt, b: &TensorElt) -> TensorElt {
        let mut out = Lin::zero();
        for (u, cu) in a.iter() {
            for (v, cv) in b.iter() {
                if u.0.len() + v.0.len() <= self.cap {
                    let mut w = u.0.clone();
                    w.extend_from_slice(&v.0);
                    out.add_term(Word(w), cu * cv);
                }
            }
        }
        out
    }

    /// `[a,b] = ab - (-1)^{|a||b|} ba`, extended bilinearly over homogeneous
    /// components.
    pub fn bracket(&self, a: &TensorElt, b: &TensorElt) -> TensorElt {
        let mut out = Lin::zero();
        for (u, cu) in a.iter() {
            for (v, cv) in b.iter() {
                if u.0.len() + v.0.len() > self.cap {
                    continue;
                }
                let c = cu * cv;
                let mut uv = u.0.clone();
                uv.extend_from_slice(&v.0);
                let mut vu = v.0.clone();
                vu.extend_from_slice(&u.0);
                let sign = parity_sign(self.word_deg(u) * self.word_deg(v) % 2 != 0);
                out.add_term(Word(uv), c.clone());
                out.add_term(Word(vu), -(c * sign));
            }
        }
        out
    }

    /// `ad_λ(x) = [x, λ]`.
    pub fn ad(&self, lambda: &TensorElt, x: &TensorElt) -> TensorElt {
        self.bracket(x, lambda)
    }

    /// `Σ_n ad_λ^n(x) / n!` for `ad_λ(x) = [x, λ]`.
    pub fn exp_ad(&self, lambda: &TensorElt, x: &TensorElt) -> TensorElt {
        self.exp_op(x, |y| self.ad(lambda, y))
    }

    /// `Σ_n [λ,-]^n(x) / n!`, the left adjoint action.
    pub fn exp_ad_left(&self, lambda: &TensorElt, x: &TensorElt) -> TensorElt {
        self.exp_op(x, |y| self.bracket(lambda, y))
    }

    fn exp_op(&self, x: &TensorElt, op: impl Fn(&TensorElt) -> TensorElt) -> TensorElt {
        let mut out = x.clone();
        let mut term = x.clone();
        for n in 1..=self.cap {
            term = op(&term);
            if term.is_zero() {
                break;
            }
            out.add_scaled(&term, &inv_factorial(n));
        }
        out
    }

    /// `exp(a)` for `a` without constant term.
    pub fn exp(&self, a: &TensorElt) -> TensorElt {
        let mut out = self.one();
        let mut power = self.one();
        for n in 1..=self.cap {
            power = self.mul(&power, a);
            if power.is_zero() {
                break;
            }
            out.add_scaled(&power, &inv_factorial(n));
        }
        out
    }

    /// `log(g)` for `g` with constant term 1.
    pub fn log(&self, g: &TensorElt) -> TensorElt {
        let a = g - &self.one();
        let mut out = Lin::zero();
        let mut power = self.one();
        for n in 1..=self.cap {
            power = self.mul(&power, &a);
            if power.is_zero() {
                break;
            }
            let c = Q::new(if n % 2 == 1 { BigInt::one() } else { -BigInt::one() }, BigInt::from(n));
            out.add_scaled(&power, &c);
        }
        out
    }

    /// `log(exp(λ) exp(μ))` for degree-0 elements.
    pub fn bch(&self, lambda: &TensorElt, mu: &TensorElt) -> Result<TensorElt> {
        for x in [lambda, mu] {
            if !x.is_zero() && self.degree(x) != Some(0) {
                return invalid("bch needs degree-0 elements");
            }
        }
        Ok(self.log(&self.mul(&self.exp(lambda), &self.exp(mu))))
    }

    /// `x(t) = (e^{t ad_λ} - id)/ad_λ (dλ) + e^{t ad_λ}(x_0)`.
    pub fn gauge_closed_form(
        &self,
        lambda: &TensorElt,
        x0: &TensorElt,
        d: &LieDerivation,
        t: &Q,
    ) -> Result<TensorElt> {
        if !lambda.is_zero() && self.degree(lambda) != Some(0) {
            return invalid("the gauge must have degree 0");
        }
        let dl = d.apply(self, lambda);
        let mut out = Lin::zero();
        let mut tn = Q::one();
        let mut from_x = x0.clone();
        let mut from_d = dl;
        out += x0;
        for n in 1..=self.cap + 1 {
            tn = &tn * t;
            let c = &tn * inv_factorial(n);
            out.add_scaled(&from_d, &c);
            from_x = self.ad(lambda, &from_x);
            out.add_scaled(&from_x, &c);
            from_d = self.ad(lambda, &from_d);
            if from_x.is_zero() && from_d.is_zero() {
                break;
            }
        }
        Ok(out)
    }

    /// Span certificate: `a` lies in the span of iterated commutators of
    /// generators, checked weight by weight.
    pub fn is_primitive(&self, a: &TensorElt) -> bool {
        if !a.coeff(&Word(Vec::new())).is_zero() {
            return false;
        }
        (1..=self.cap).all(|k| {
            let part = self.weight_part(a, k);
            part.is_zero() || self.in_commutator_span(&part, k)
        })
    }

    fn in_commutator_span(&self, part: &TensorElt, k: usize) -> bool {
        let words = all_words(self.gens.len(), k);
        let index = |w: &Word| words.binary_search(w).expect("word of weight k");
        // left-normed commutators [g_1,[g_2,[...,g_k]]] span the weight-k Lie part
        let cols: Vec<Vec<Q>> = words
            .iter()
            .map(|w| {
                let mut c = self.gen(w.0[k - 1] as usize);
                for &l in w.0[..k - 1].iter().rev() {
                    c = self.bracket(&self.gen(l as usize), &c);
                }
                let mut col = vec![Q::zero(); words.len()];
                for (u, x) in c.iter() {
                    col[index(u)] = x.clone();
                }
                col
            })
            .collect();
        let m = Matrix::from_cols(words.len(), &cols);
        let mut b = vec![Q::zero(); words.len()];
        for (u, x) in part.iter() {
            b[index(u)] = x.clone();
        }
        m.in_column_span(&b)
    }

    pub fn show(&self, a: &TensorElt) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(&Word, &Q)> = a.iter().collect();
        terms.sort_by(|x, y| x.0 .0.len().cmp(&y.0 .0.len()).then(x.0.cmp(y.0)));
        terms
            .iter()
            .map(|(w, c)| format!("{}·{}", show_q(c), self.word_name(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn word_name(&self, w: &Word) -> String {
        if w.0.is_empty() {
            return "1".into();
        }
        w.0.iter().map(|&l| self.gens[l as usize].name.as_str()).collect::<Vec<_>>().join("")
    }

    pub fn to_json(&self, a: &TensorElt) -> Value {
        Value::Array(
            a.iter()
                .map(|(w, c)| {
                    let letters: Vec<&str> = w.0.iter().map(|&l| self.gens[l as usize].name.as_str()).collect();
                    json!([letters, fmt_q(c)])
                })
                .collect(),
        )
    }

    /// Random homogeneous Lie polynomial of the given weight in the listed
    /// generators.
    pub fn random_lie(&self, rng: &mut impl Rng, gens: &[usize], weight: usize, terms: usize) -> TensorElt {
        let mut out = Lin::zero();
        for _ in 0..terms {
            let mut c = self.gen(gens[rng.gen_range(0..gens.len())]);
            for _ in 1..weight {
                let g = self.gen(gens[rng.gen_range(0..gens.len())]);
                c = if rng.gen_bool(0.5) { self.bracket(&g, &c) } else { self.bracket(&c, &g) };
            }
            out.add_scaled(&c, &Q::from_integer(BigInt::from(rng.gen_range(-3i64..=3))));
        }
        out
    }
}

fn all_words(letters: usize, k: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w: Vec<u8>| {
                (0..letters).map(move |l| {
                    let mut w = w.clone();
                    w.push(l as u8);
                    w
                })
            })
            .collect();
    }
    let mut words: Vec<Word> = out.into_iter().map(Word).collect();
    words.sort();
    words
}

/// Degree -1 derivation determined by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieDerivation {
    pub images: Vec<TensorElt>,
}

impl LieDerivation {
    /// Graded Leibniz rule: `d(ab) = d(a)b + (-1)^{|a|} a d(b)`.
    pub fn apply(&self, alg: &FreeAlg, a: &TensorElt) -> TensorElt {
        let mut out = Lin::zero();
        for (w, c) in a.iter() {
            let mut prefix_deg = 0i64;
            for (i, &l) in w.0.iter().enumerate() {
                let sign = parity_sign(prefix_deg % 2 != 0);
                let left = Lin::basis(Word(w.0[..i].to_vec()));
                let right = Lin::basis(Word(w.0[i + 1..].to_vec()));
                let term = alg.mul(&alg.mul(&left, &self.images[l as usize]), &right);
                out.add_scaled(&term, &(c * sign));
                prefix_deg += alg.gens[l as usize].degree;
            }
        }
        out
    }

    /// `d ∘ d` vanishes on every generator.
    pub fn squares_to_zero(&self, alg: &FreeAlg) -> bool {
        self.images.iter().all(|img| self.apply(alg, img).is_zero())
    }
}

/// Bernoulli numbers from `t/(e^t - 1) = Σ B_n t^n / n!`, via the
/// reciprocal of `Σ t^k/(k+1)!`.
pub fn bernoulli(n: usize) -> Q {
    let series: Vec<Q> = (0..=n).map(|k| inv_factorial(k + 1)).collect();
    let mut inv = vec![Q::zero(); n + 1];
    inv[0] = Q::one();
    for k in 1..=n {
        let s = (1..=k).fold(Q::zero(), |acc, j| acc + &series[j] * &inv[k - j]);
        inv[k] = -s;
    }
    &inv[n] * Q::from_integer(crate::scalar::factorial(n))
}

/// Generators `x0, x1` (degree -1) and `λ` (degree 0) with
/// `dλ = Σ B_n/n! ad_λ^n(x1 - x0) - ad_λ(x0)` and `dx_i = -½[x_i, x_i]`.
pub fn lawrence_sullivan(cap: usize) -> Result<(FreeAlg, LieDerivation)> {
    if cap == 0 {
        return invalid("cap must be at least 1");
    }
    let alg = FreeAlg::new(&[("x0", -1), ("x1", -1), ("λ", 0)], cap)?;
    let (x0, x1, lambda) = (alg.gen(0), alg.gen(1), alg.gen(2));
    let half = Q::new(BigInt::one(), BigInt::from(2));
    let dx = |x: &TensorElt| alg.bracket(x, x).scale(&-half.clone());
    let mut dl = Lin::zero();
    let mut term = &x1 - &x0;
    for n in 0..cap {
        dl.add_scaled(&term, &(bernoulli(n) * inv_factorial(n)));
        term = alg.ad(&lambda, &term);
        if term.is_zero() {
            break;
        }
    }
    dl -= &alg.ad(&lambda, &x0);
    let d = LieDerivation { images: vec![dx(&x0), dx(&x1), alg.truncate(&dl)] };
    Ok((alg, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, q};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graded_alg() -> FreeAlg {
        FreeAlg::new(&[("a", 0), ("b", 1), ("c", -1), ("e", 2)], 6).unwrap()
    }

    fn random_homogeneous(alg: &FreeAlg, rng: &mut ChaCha8Rng) -> TensorElt {
        // a single nonzero multiple of a random word is homogeneous
        let len = rng.gen_range(1..=2);
        let w: Vec<u8> = (0..len).map(|_| rng.gen_range(0..alg.gens.len() as u8)).collect();
        let mut out = Lin::term(Word(w.clone()), q(rng.gen_range(1..4)));
        // add a second word of the same degree when one exists
        let mut w2 = w.clone();
        w2.reverse();
        out.add_term(Word(w2), q(rng.gen_range(1..3)));
        out
    }

    #[test]
    fn bracket_examples() {
        let alg = graded_alg();
        let b = alg.gen(1);
        assert_eq!(alg.bracket(&b, &b), alg.mul(&b, &b).scale(&q(2)));
        let a = alg.gen(0);
        assert!(alg.bracket(&a, &a).is_zero());
    }

    proptest! {
        #[test]
        fn antisymmetry_and_jacobi(seed in 0u64..500) {
            let alg = graded_alg();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y, z) = (random_homogeneous(&alg, &mut rng), random_homogeneous(&alg, &mut rng), random_homogeneous(&alg, &mut rng));
            let (dx, dy, dz) = (alg.degree(&x).unwrap(), alg.degree(&y).unwrap(), alg.degree(&z).unwrap());
            let anti = alg.bracket(&x, &y) + alg.bracket(&y, &x).scale(&parity_sign(dx * dy % 2 != 0));
            prop_assert!(anti.is_zero());
            let s = |e: i64| parity_sign(e.rem_euclid(2) == 1);
            let jac = alg.bracket(&x, &alg.bracket(&y, &z)).scale(&s(dx * dz))
                + alg.bracket(&y, &alg.bracket(&z, &x)).scale(&s(dy * dx))
                + alg.bracket(&z, &alg.bracket(&x, &y)).scale(&s(dz * dy));
            prop_assert!(jac.is_zero());
        }

        #[test]
        fn leibniz_on_products(seed in 0u64..200) {
            let alg = FreeAlg::new(&[("p", 1), ("r", 0), ("s", 2)], 5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // any images of the right degree define a derivation
            let d = LieDerivation { images: vec![
                alg.gen(1).scale(&q(rng.gen_range(-2..3))),
                alg.mul(&alg.gen(0), &alg.gen(0)).scale(&q(rng.gen_range(-2..3))),
                alg.mul(&alg.gen(0), &alg.gen(1)).scale(&q(rng.gen_range(-2..3))),
            ] };
            let u = alg.gen(rng.gen_range(0..3));
            let v = alg.mul(&alg.gen(rng.gen_range(0..3)), &alg.gen(rng.gen_range(0..3)));
            let du = alg.degree(&u).unwrap();
            let lhs = d.apply(&alg, &alg.mul(&u, &v));
            let rhs = alg.mul(&d.apply(&alg, &u), &v) + alg.mul(&u, &d.apply(&alg, &v)).scale(&parity_sign(du % 2 != 0));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(0), q(1));
        assert_eq!(bernoulli(1), frac(-1, 2));
        assert_eq!(bernoulli(2), frac(1, 6));
        assert_eq!(bernoulli(3), q(0));
        assert_eq!(bernoulli(4), frac(-1, 30));
    }

    fn printed_bch(alg: &FreeAlg, l: &TensorElt, m: &TensorElt) -> TensorElt {
        let lm = alg.bracket(l, m);
        let mut expected = l + m;
        expected.add_scaled(&lm, &frac(1, 2));
        expected.add_scaled(&alg.bracket(l, &lm), &frac(1, 12));
        expected.add_scaled(&alg.bracket(m, &alg.bracket(m, l)), &frac(1, 12));
        expected
    }

    #[test]
    fn bch_examples() {
        let alg = FreeAlg::new(&[("λ", 0), ("μ", 0)], 3).unwrap();
        let (l, m) = (alg.gen(0), alg.gen(1));
        assert_eq!(alg.bch(&l, &Lin::zero()).unwrap(), l);
        assert_eq!(alg.bch(&l, &l.scale(&q(2))).unwrap(), l.scale(&q(3)));
        assert_eq!(alg.bch(&l, &m).unwrap(), printed_bch(&alg, &l, &m));
        let odd = FreeAlg::new(&[("x", 1)], 3).unwrap();
        assert!(odd.bch(&odd.gen(0), &Lin::zero()).is_err());
    }

    #[test]
    fn bch_operator_identity_and_primitivity() {
        let alg = FreeAlg::new(&[("λ", 0), ("μ", 0), ("w", 0)], 6).unwrap();
        let (l, m) = (alg.gen(0), alg.gen(1));
        let z = alg.bch(&l, &m).unwrap();
        assert!(alg.is_primitive(&z));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..4 {
            let weight = rng.gen_range(1..=3);
            let w = alg.random_lie(&mut rng, &[0, 1, 2], weight, 2);
            // left adjoint: e^{[z,-]} = e^{[λ,-]} e^{[μ,-]}
            assert_eq!(alg.exp_ad_left(&z, &w), alg.exp_ad_left(&l, &alg.exp_ad_left(&m, &w)));
            // right action reverses the order
            assert_eq!(alg.exp_ad(&z, &w), alg.exp_ad(&m, &alg.exp_ad(&l, &w)));
        }
    }

    #[test]
    fn primitivity_rejects_symmetric_words() {
        let alg = FreeAlg::new(&[("x", 0), ("y", 0)], 3).unwrap();
        let (x, y) = (alg.gen(0), alg.gen(1));
        assert!(alg.is_primitive(&x));
        assert!(!alg.is_primitive(&(alg.mul(&x, &y) + alg.mul(&y, &x))));
        assert!(alg.is_primitive(&alg.bracket(&x, &alg.bracket(&x, &y))));
    }

    #[test]
    fn gauge_closed_form_special_cases() {
        let alg = FreeAlg::new(&[("x", -1), ("λ", 0)], 1).unwrap();
        let d = LieDerivation { images: vec![Lin::zero(), alg.gen(0).scale(&q(5))] };
        let (x, l) = (alg.gen(0), alg.gen(1));
        let t = frac(2, 3);
        let out = alg.gauge_closed_form(&l, &x, &d, &t).unwrap();
        assert_eq!(out, &x + &alg.gen(0).scale(&(q(5) * &t)));
        assert!(alg.gauge_closed_form(&x, &x, &d, &t).is_err());

        let alg = FreeAlg::new(&[("x", -1), ("λ", 0)], 5).unwrap();
        let zero_d = LieDerivation { images: vec![Lin::zero(), Lin::zero()] };
        let out = alg.gauge_closed_form(&alg.gen(1), &alg.gen(0), &zero_d, &q(1)).unwrap();
        assert_eq!(out, alg.exp_ad(&alg.gen(1), &alg.gen(0)));
    }

    #[test]
    fn lawrence_sullivan_low_weights() {
        let (alg, d) = lawrence_sullivan(6).unwrap();
        let dl = &d.images[2];
        let (x0, x1, l) = (alg.gen(0), alg.gen(1), alg.gen(2));
        assert_eq!(alg.weight_part(dl, 1), &x1 - &x0);
        let diff = &x1 - &x0;
        let expected = alg.bracket(&diff, &l).scale(&frac(-1, 2)) - alg.bracket(&x0, &l);
        assert_eq!(alg.weight_part(dl, 2), expected);
        assert!(d.squares_to_zero(&alg));
        assert_eq!(alg.gauge_closed_form(&l, &x0, &d, &q(1)).unwrap(), x1);
    }
}
