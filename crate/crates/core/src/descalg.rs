//! The free supercommutative descendent algebra and the Virasoro operators acting on it.
//!
//! One engine serves 3-folds and surfaces; the differences live in [`OperatorPreset`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cohmodel::{CohClass, CohModel, KunnethTerm};
use crate::exact::{factorial, q, qi, sign, Rational};

/// A generator `ch_k(e)` over a basis class `e`.
///
/// `odd` mirrors the parity of the class, which is also the parity of the generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub class: usize,
    pub k: u32,
    pub odd: bool,
}

impl Gen {
    pub fn new(m: &CohModel, k: u32, class: usize) -> Self {
        Gen { class, k, odd: m.is_odd_class(class) }
    }
}

pub type DescMonomial = Vec<Gen>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescError {
    #[error("operator index {0} is below -1")]
    IndexBelowMinusOne(i64),
}

/// Element of the descendent algebra in normal form: monomials sorted, odd generators
/// at most once, Koszul signs absorbed into the coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DescExpr {
    terms: BTreeMap<DescMonomial, Rational>,
}

/// Sorts a word of generators, returning the sign of the permutation restricted to odd
/// entries, or `None` when an odd generator repeats.
fn normalize_word(mut w: Vec<Gen>) -> Option<(DescMonomial, bool)> {
    let mut negative = false;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            if w[j - 1].odd && w[j].odd {
                negative = !negative;
            }
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    if w.windows(2).any(|p| p[0].odd && p[0] == p[1]) {
        return None;
    }
    Some((w, negative))
}

impl DescExpr {
    pub fn zero() -> Self {
        DescExpr::default()
    }

    pub fn one() -> Self {
        DescExpr::scalar(Rational::one())
    }

    pub fn scalar(c: Rational) -> Self {
        let mut out = DescExpr::zero();
        out.add_word(Vec::new(), c);
        out
    }

    pub fn gen(g: Gen) -> Self {
        let mut out = DescExpr::zero();
        out.add_word(vec![g], Rational::one());
        out
    }

    /// `ch_k(γ)` expanded linearly over basis classes.
    pub fn ch(m: &CohModel, k: u32, gamma: &CohClass) -> Self {
        let mut out = DescExpr::zero();
        for (i, c) in gamma.iter() {
            out.add_word(vec![Gen::new(m, k, i)], c.clone());
        }
        out
    }

    /// Adds `c` times an arbitrary word, normalizing it.
    pub fn add_word(&mut self, w: Vec<Gen>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let Some((mono, neg)) = normalize_word(w) else { return };
        let slot = self.terms.entry(mono.clone()).or_insert_with(Rational::zero);
        if neg {
            *slot -= c;
        } else {
            *slot += c;
        }
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn terms(&self) -> &BTreeMap<DescMonomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = DescExpr::zero();
        for (m, v) in &self.terms {
            out.add_word(m.clone(), v * c);
        }
        out
    }

    /// Coefficient of the empty monomial.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero)
    }

    /// Re-sorts every monomial. Elements are kept normal, so this is the identity; it
    /// exists for callers that assemble terms by hand.
    pub fn normal_form(&self) -> Self {
        let mut out = DescExpr::zero();
        for (m, c) in &self.terms {
            out.add_word(m.clone(), c.clone());
        }
        out
    }

    /// Replaces `ch_0(γ)` by `-∫γ` and `ch_1(γ)` by `0`.
    pub fn collapse(&self, m: &CohModel) -> Self {
        let mut out = DescExpr::zero();
        'terms: for (mono, c) in &self.terms {
            let mut c = c.clone();
            let mut rest = Vec::new();
            for g in mono {
                match g.k {
                    0 => c *= -m.integrate(&CohClass::basis(g.class)),
                    1 => continue 'terms,
                    _ => rest.push(g.clone()),
                }
            }
            out.add_word(rest, c);
        }
        out
    }

    /// Applies a derivation given on generators. With `odd`, passing an odd generator
    /// costs a sign.
    pub fn derive<F: Fn(&Gen) -> DescExpr>(&self, odd: bool, f: F) -> Self {
        let mut out = DescExpr::zero();
        for (mono, c) in &self.terms {
            let mut odd_before = false;
            for (i, g) in mono.iter().enumerate() {
                let image = f(g);
                let s = if odd && odd_before { -c.clone() } else { c.clone() };
                for (im, ic) in &image.terms {
                    let mut w = mono[..i].to_vec();
                    w.extend(im.iter().cloned());
                    w.extend(mono[i + 1..].iter().cloned());
                    out.add_word(w, &s * ic);
                }
                odd_before ^= g.odd;
            }
        }
        out
    }

    /// Real cohomological degree of each monomial, `Σ |γ| + 2k - 2·shift`.
    pub fn monomial_degree(m: &CohModel, mono: &[Gen], shift: i64) -> i64 {
        mono.iter().map(|g| generator_degree(m, g, shift)).sum()
    }

    /// Degree when every monomial has the same degree.
    pub fn degree(&self, m: &CohModel, shift: i64) -> Option<i64> {
        let mut ds = self.terms.keys().map(|mono| DescExpr::monomial_degree(m, mono, shift));
        let d = ds.next()?;
        ds.all(|e| e == d).then_some(d)
    }

    /// `Σ k_j` per monomial, when constant.
    pub fn index_sum(&self) -> Option<u32> {
        let mut ds = self.terms.keys().map(|mono| mono.iter().map(|g| g.k).sum::<u32>());
        let d = ds.next()?;
        ds.all(|e| e == d).then_some(d)
    }

    pub fn format(&self, m: &CohModel) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (mono, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if n > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            if mono.is_empty() {
                let _ = write!(s, "{mag}");
                continue;
            }
            if !mag.is_one() {
                let _ = write!(s, "{mag} ");
            }
            let words: Vec<String> = mono.iter().map(|g| format!("ch{}({})", g.k, m.class(g.class).name)).collect();
            s.push_str(&words.join("*"));
        }
        s
    }
}

impl Add for &DescExpr {
    type Output = DescExpr;
    fn add(self, rhs: &DescExpr) -> DescExpr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_word(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &DescExpr {
    type Output = DescExpr;
    fn neg(self) -> DescExpr {
        self.scale(&-Rational::one())
    }
}

impl Sub for &DescExpr {
    type Output = DescExpr;
    fn sub(self, rhs: &DescExpr) -> DescExpr {
        self + &(-rhs)
    }
}

impl Mul for &DescExpr {
    type Output = DescExpr;
    fn mul(self, rhs: &DescExpr) -> DescExpr {
        let mut out = DescExpr::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let mut w = a.clone();
                w.extend(b.iter().cloned());
                out.add_word(w, x * y);
            }
        }
        out
    }
}

/// `|γ| + 2k - 2·shift`.
pub fn generator_degree(m: &CohModel, g: &Gen, shift: i64) -> i64 {
    m.class(g.class).degree as i64 + 2 * g.k as i64 - 2 * shift
}

/// `n!` with the convention that negative arguments give zero.
fn weight(n: i64) -> Rational {
    if n < 0 {
        Rational::zero()
    } else {
        factorial(n as u32)
    }
}

/// The data distinguishing the 3-fold operators from the surface ones.
#[derive(Clone, Debug)]
pub struct OperatorPreset {
    model: Arc<CohModel>,
    shift: i64,
    quadratic_source: Vec<KunnethTerm>,
    scalar_source: Vec<KunnethTerm>,
    prefactor: Rational,
    diagonal: Vec<KunnethTerm>,
    tk_cache: Arc<Mutex<BTreeMap<i64, DescExpr>>>,
}

impl OperatorPreset {
    /// Shift 3, quadratic part over `Δ_* c1` with weight `-1/2`, scalar part
    /// `Δ_*(c1 c2 / 24)`.
    pub fn threefold(model: Arc<CohModel>) -> Self {
        let c1 = model.chern(1);
        let td3 = model.mul(&c1, &model.chern(2)).scale(&q(1, 24));
        OperatorPreset {
            shift: 3,
            quadratic_source: model.diagonal_pushforward(&c1),
            scalar_source: model.diagonal_pushforward(&td3),
            prefactor: q(-1, 2),
            diagonal: model.kunneth_diagonal(),
            tk_cache: Default::default(),
            model,
        }
    }

    /// Shift 2, quadratic part over `Δ` with weight `1`, scalar part
    /// `Δ_*((c1² + c2) / 12)`.
    pub fn surface(model: Arc<CohModel>) -> Self {
        let c1 = model.chern(1);
        let td2 = (&model.mul(&c1, &c1) + &model.chern(2)).scale(&q(1, 12));
        OperatorPreset {
            shift: 2,
            quadratic_source: model.kunneth_diagonal(),
            scalar_source: model.diagonal_pushforward(&td2),
            prefactor: qi(1),
            diagonal: model.kunneth_diagonal(),
            tk_cache: Default::default(),
            model,
        }
    }

    pub fn model(&self) -> &Arc<CohModel> {
        &self.model
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn degree(&self, g: &Gen) -> i64 {
        generator_degree(&self.model, g, self.shift)
    }

    fn hodge_p(&self, class: usize) -> i64 {
        self.model.class(class).p as i64
    }

    fn check(k: i64) -> Result<(), DescError> {
        if k < -1 {
            Err(DescError::IndexBelowMinusOne(k))
        } else {
            Ok(())
        }
    }

    /// `R_k`: `ch_i(γ) ↦ ∏_{j=0}^{k} (i + p - shift + j) ch_{i+k}(γ)`; `ch_{-1}` is zero.
    pub fn apply_rk(&self, e: &DescExpr, k: i64) -> Result<DescExpr, DescError> {
        Self::check(k)?;
        Ok(e.derive(false, |g| {
            let i = g.k as i64;
            if i + k < 0 {
                return DescExpr::zero();
            }
            let base = i + self.hodge_p(g.class) - self.shift;
            let c: Rational = (0..=k).map(|j| qi(base + j)).product();
            DescExpr::gen(Gen { k: (i + k) as u32, ..g.clone() }).scale(&c)
        }))
    }

    /// `R_{-1}[α]`: `ch_i(γ) ↦ ch_{i-1}(αγ)`, odd when `α` is.
    pub fn apply_twisted(&self, e: &DescExpr, alpha: &CohClass) -> DescExpr {
        let m = &self.model;
        let mut out = DescExpr::zero();
        for (a, c) in alpha.iter() {
            let class = CohClass::scaled_basis(a, c.clone());
            let image = e.derive(m.is_odd_class(a), |g| {
                if g.k == 0 {
                    return DescExpr::zero();
                }
                DescExpr::ch(m, g.k - 1, &m.mul(&class, &CohClass::basis(g.class)))
            });
            out = &out + &image;
        }
        out
    }

    fn pair(&self, a: i64, l: usize, b: i64, r: usize) -> DescExpr {
        let m = &self.model;
        &DescExpr::gen(Gen::new(m, a as u32, l)) * &DescExpr::gen(Gen::new(m, b as u32, r))
    }

    /// The element `T_k` multiplies by.
    pub fn tk_element(&self, k: i64) -> Result<DescExpr, DescError> {
        Self::check(k)?;
        if let Some(t) = self.tk_cache.lock().expect("cache lock").get(&k) {
            return Ok(t.clone());
        }
        let mut out = DescExpr::zero();
        for a in 0..=k + 2 {
            let b = k + 2 - a;
            for t in &self.quadratic_source {
                let (pl, pr) = (self.hodge_p(t.left), self.hodge_p(t.right));
                let w = weight(a + pl - self.shift) * weight(b + pr - self.shift);
                if w.is_zero() {
                    continue;
                }
                let c = &self.prefactor * &t.coeff * sign(pl * pr) * w;
                out = &out + &self.pair(a, t.left, b, t.right).scale(&c);
            }
        }
        for a in 0..=k {
            let b = k - a;
            for t in &self.scalar_source {
                let c = &t.coeff * weight(a) * weight(b);
                out = &out + &self.pair(a, t.left, b, t.right).scale(&c);
            }
        }
        self.tk_cache.lock().expect("cache lock").insert(k, out.clone());
        Ok(out)
    }

    /// `S_k = (k+1)! Σ_{p^L = 0} R_{-1}[γ^L] ∘ (ch_{k+1}(γ^R) ·)`.
    pub fn apply_sk(&self, e: &DescExpr, k: i64) -> Result<DescExpr, DescError> {
        Self::check(k)?;
        let m = &self.model;
        let mut out = DescExpr::zero();
        for t in self.diagonal.iter().filter(|t| m.class(t.left).p == 0) {
            let inserted = &DescExpr::gen(Gen::new(m, (k + 1) as u32, t.right)) * e;
            let image = self.apply_twisted(&inserted, &CohClass::basis(t.left));
            out = &out + &image.scale(&t.coeff);
        }
        Ok(out.scale(&weight(k + 1)))
    }

    /// `L_k = R_k + T_k + S_k`.
    pub fn apply_lk(&self, e: &DescExpr, k: i64) -> Result<DescExpr, DescError> {
        let r = self.apply_rk(e, k)?;
        let t = &self.tk_element(k)? * e;
        let s = self.apply_sk(e, k)?;
        Ok(&(&r + &t) + &s)
    }

    /// String, divisor and dilaton rewrites: `ch_2(γ) ↦ 0` for `γ` of type `(p,0)` or
    /// `(0,q)`, `ch_2(δ) ↦ ∫_β δ` for `δ` of degree 2, `ch_3(1) ↦ n - d_β/2`.
    pub fn reduction_rewrite(
        &self,
        e: &DescExpr,
        beta_pairing: &BTreeMap<usize, Rational>,
        n: i64,
        d_beta: &Rational,
    ) -> DescExpr {
        let m = &self.model;
        let unit = match m.unit().iter().collect::<Vec<_>>().as_slice() {
            [(u, c)] if c.is_one() => Some(*u),
            _ => None,
        };
        let dilaton = qi(n) - d_beta / qi(2);
        let mut out = DescExpr::zero();
        'terms: for (mono, c) in e.terms() {
            let mut c = c.clone();
            let mut rest = Vec::new();
            for g in mono {
                let b = m.class(g.class);
                if g.k == 2 && (b.p == 0 || b.q == 0) {
                    continue 'terms;
                } else if g.k == 2 && b.degree == 2 {
                    c *= beta_pairing.get(&g.class).cloned().unwrap_or_else(Rational::zero);
                } else if g.k == 3 && Some(g.class) == unit {
                    c *= &dilaton;
                } else {
                    rest.push(g.clone());
                }
            }
            out.add_word(rest, c);
        }
        out
    }
}
