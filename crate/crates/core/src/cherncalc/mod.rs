//! Truncated graded polynomial rings and characteristic-class calculus.
//!
//! Rings are presented by generators with real degrees, weighted degree caps (monomials
//! above a cap vanish) and monomial rewriting rules. Odd generators anticommute and
//! square to zero, which is enough to carry the odd classes of the Fano surface.

mod bundle;
mod symmetric;
mod todd_quotient;

pub use bundle::{todd_power_series, RootBundle};
pub use symmetric::{elementary_from_symmetric, segre_pushforward, surface_base_ring, sym_power_chern};
pub use todd_quotient::{cubic_ambient_ring, displayed_todd_series, todd_quotient_cubic};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::exact::{qi, Rational};

/// Exponent vector indexed like the ring's generators.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Generator {
    name: String,
    degree: u32,
    odd: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Cap {
    weights: Vec<u32>,
    max: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Rule {
    lhs: Monomial,
    rhs: Vec<(Monomial, Rational)>,
}

/// A presented graded-commutative ring over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPolyRing {
    gens: Vec<Generator>,
    caps: Vec<Cap>,
    rules: Vec<Rule>,
}

impl GradedPolyRing {
    /// Even generators with their real degrees.
    pub fn new(gens: &[(&str, u32)]) -> Self {
        GradedPolyRing {
            gens: gens
                .iter()
                .map(|(n, d)| Generator { name: n.to_string(), degree: *d, odd: false })
                .collect(),
            caps: Vec::new(),
            rules: Vec::new(),
        }
    }

    /// Adds an odd (anticommuting, square-zero) generator.
    pub fn with_odd(mut self, name: &str, degree: u32) -> Self {
        self.gens.push(Generator { name: name.to_string(), degree, odd: true });
        self
    }

    /// Monomials whose real degree exceeds `max` vanish.
    pub fn with_degree_cap(self, max: u32) -> Self {
        let weights = self.gens.iter().map(|g| g.degree).collect();
        self.with_weighted_cap(weights, max)
    }

    /// Monomials whose weighted degree exceeds `max` vanish.
    pub fn with_weighted_cap(mut self, weights: Vec<u32>, max: u32) -> Self {
        assert_eq!(weights.len(), self.gens.len(), "one weight per generator");
        self.caps.push(Cap { weights, max });
        self
    }

    /// Adds the rewriting rule `lhs -> rhs`; `lhs` must involve even generators only.
    pub fn with_rule(mut self, lhs: &[(&str, u32)], rhs: &[(&[(&str, u32)], Rational)]) -> Self {
        let lhs = self.monomial(lhs);
        assert!(
            lhs.iter().zip(&self.gens).all(|(e, g)| *e == 0 || !g.odd),
            "rewriting rules act on even generators"
        );
        let rhs = rhs.iter().map(|(m, c)| (self.monomial(m), c.clone())).collect();
        self.rules.push(Rule { lhs, rhs });
        self
    }

    /// Largest real degree that can survive, if some cap bounds the plain degree.
    pub fn top_degree(&self) -> Option<u32> {
        self.caps
            .iter()
            .filter(|c| c.weights.iter().zip(&self.gens).all(|(w, g)| *w == g.degree))
            .map(|c| c.max)
            .min()
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn generator_name(&self, i: usize) -> &str {
        &self.gens[i].name
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.gens[i].odd
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Exponent vector from `(name, exponent)` pairs; panics on unknown names.
    pub fn monomial(&self, parts: &[(&str, u32)]) -> Monomial {
        let mut m = vec![0; self.gens.len()];
        for (name, e) in parts {
            let i = self
                .generator_index(name)
                .unwrap_or_else(|| panic!("unknown generator {name}"));
            m[i] += e;
        }
        m
    }

    pub fn degree(&self, m: &[u32]) -> u32 {
        m.iter().zip(&self.gens).map(|(e, g)| e * g.degree).sum()
    }

    fn vanishes(&self, m: &[u32]) -> bool {
        if m.iter().zip(&self.gens).any(|(e, g)| g.odd && *e > 1) {
            return true;
        }
        self.caps
            .iter()
            .any(|c| m.iter().zip(&c.weights).map(|(e, w)| e * w).sum::<u32>() > c.max)
    }

    /// Sign picked up when the product `a * b` is brought into generator order.
    fn product_sign(&self, a: &[u32], b: &[u32]) -> bool {
        let mut odd_after = 0u32;
        let mut negative = false;
        // walk generators from the top; count odd generators of `a` above each odd one of `b`
        for i in (0..self.gens.len()).rev() {
            if !self.gens[i].odd {
                continue;
            }
            if b[i] == 1 && odd_after % 2 == 1 {
                negative = !negative;
            }
            odd_after += a[i];
        }
        negative
    }

    fn reduce_with(&self, terms: BTreeMap<Monomial, Rational>, order: &[usize]) -> BTreeMap<Monomial, Rational> {
        let mut out: BTreeMap<Monomial, Rational> = BTreeMap::new();
        let mut stack: Vec<(Monomial, Rational)> = terms.into_iter().collect();
        while let Some((m, c)) = stack.pop() {
            if c.is_zero() || self.vanishes(&m) {
                continue;
            }
            let hit = order.iter().map(|&r| &self.rules[r]).find(|r| divides(&r.lhs, &m));
            match hit {
                None => {
                    let slot = out.entry(m).or_insert_with(Rational::zero);
                    *slot += c;
                }
                Some(rule) => {
                    let rest: Monomial = m.iter().zip(&rule.lhs).map(|(a, b)| a - b).collect();
                    for (rm, rc) in &rule.rhs {
                        let neg = self.product_sign(rm, &rest);
                        let nm: Monomial = rm.iter().zip(&rest).map(|(a, b)| a + b).collect();
                        let v = &c * rc;
                        stack.push((nm, if neg { -v } else { v }));
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn reduce(&self, terms: BTreeMap<Monomial, Rational>) -> BTreeMap<Monomial, Rational> {
        let order: Vec<usize> = (0..self.rules.len()).collect();
        self.reduce_with(terms, &order)
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Element of a [`GradedPolyRing`], always in normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedElt {
    ring: Arc<GradedPolyRing>,
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedElt {
    pub fn from_terms(ring: &Arc<GradedPolyRing>, terms: BTreeMap<Monomial, Rational>) -> Self {
        GradedElt { ring: ring.clone(), terms: ring.reduce(terms) }
    }

    pub fn zero(ring: &Arc<GradedPolyRing>) -> Self {
        GradedElt { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<GradedPolyRing>, c: Rational) -> Self {
        let mut t = BTreeMap::new();
        t.insert(vec![0; ring.ngens()], c);
        Self::from_terms(ring, t)
    }

    pub fn one(ring: &Arc<GradedPolyRing>) -> Self {
        Self::constant(ring, Rational::one())
    }

    /// The generator called `name`.
    pub fn gen(ring: &Arc<GradedPolyRing>, name: &str) -> Self {
        Self::term(ring, Rational::one(), &[(name, 1)])
    }

    /// `c` times the monomial described by `(name, exponent)` pairs.
    pub fn term(ring: &Arc<GradedPolyRing>, c: Rational, parts: &[(&str, u32)]) -> Self {
        let mut t = BTreeMap::new();
        t.insert(ring.monomial(parts), c);
        Self::from_terms(ring, t)
    }

    pub fn ring(&self) -> &Arc<GradedPolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the monomial described by `(name, exponent)` pairs.
    pub fn coeff(&self, parts: &[(&str, u32)]) -> Rational {
        let m = self.ring.monomial(parts);
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&vec![0; self.ring.ngens()]).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        GradedElt {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Homogeneous part of real degree `d`.
    pub fn component(&self, d: u32) -> Self {
        self.filter(|m| self.ring.degree(m) == d)
    }

    /// Part of real degree at most `d`.
    pub fn truncate(&self, d: u32) -> Self {
        self.filter(|m| self.ring.degree(m) <= d)
    }

    pub fn filter<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Self {
        GradedElt {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| self.ring.degree(m)).max()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates `sum_k coeffs[k] x^k` for nilpotent `x` (zero constant term).
    pub fn compose_series(&self, coeffs: &[Rational]) -> Self {
        assert!(self.constant_term().is_zero(), "series composition needs a nilpotent argument");
        let mut acc = Self::zero(&self.ring);
        let mut power = Self::one(&self.ring);
        for c in coeffs {
            if power.is_zero() {
                break;
            }
            acc = &acc + &power.scale(c);
            power = &power * self;
        }
        acc
    }

    /// `exp(self)` for nilpotent `self`.
    pub fn exp(&self) -> Self {
        let mut out = Self::one(&self.ring);
        let mut term = Self::one(&self.ring);
        let mut k = 1i64;
        loop {
            term = (&term * self).scale(&(Rational::one() / qi(k)));
            if term.is_zero() {
                return out;
            }
            out = &out + &term;
            k += 1;
            assert!(k < 512, "exp of a non-nilpotent element");
        }
    }

    /// Multiplicative inverse; the constant term must be invertible and the rest nilpotent.
    pub fn inverse(&self) -> Option<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return None;
        }
        let inv_c = Rational::one() / &c;
        let x = (self - &Self::constant(&self.ring, c)).scale(&inv_c);
        let mut out = Self::one(&self.ring);
        let mut power = Self::one(&self.ring);
        let mut k = 0;
        loop {
            power = -(&power * &x);
            if power.is_zero() {
                return Some(out.scale(&inv_c));
            }
            out = &out + &power;
            k += 1;
            assert!(k < 512, "inverse of an element with non-nilpotent part");
        }
    }

    /// Re-reduces the terms using the rules in the given order; used to test confluence.
    pub fn reduced_with_rule_order(&self, order: &[usize]) -> BTreeMap<Monomial, Rational> {
        self.ring.reduce_with(self.terms.clone(), order)
    }

    /// Substitutes each generator of this ring by an element of `target`.
    pub fn substitute(&self, target: &Arc<GradedPolyRing>, images: &[GradedElt]) -> GradedElt {
        assert_eq!(images.len(), self.ring.ngens());
        let mut acc = GradedElt::zero(target);
        for (m, c) in &self.terms {
            let mut t = GradedElt::constant(target, c.clone());
            for (i, e) in m.iter().enumerate() {
                if *e > 0 {
                    t = &t * &images[i].pow(*e);
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl Add for &GradedElt {
    type Output = GradedElt;
    fn add(self, rhs: &GradedElt) -> GradedElt {
        debug_assert!(Arc::ptr_eq(&self.ring, &rhs.ring) || self.ring == rhs.ring);
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let slot = terms.entry(m.clone()).or_insert_with(Rational::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        GradedElt { ring: self.ring.clone(), terms }
    }
}

impl Neg for &GradedElt {
    type Output = GradedElt;
    fn neg(self) -> GradedElt {
        self.scale(&-Rational::one())
    }
}

impl Neg for GradedElt {
    type Output = GradedElt;
    fn neg(self) -> GradedElt {
        -&self
    }
}

impl Sub for &GradedElt {
    type Output = GradedElt;
    fn sub(self, rhs: &GradedElt) -> GradedElt {
        self + &(-rhs)
    }
}

impl Mul for &GradedElt {
    type Output = GradedElt;
    fn mul(self, rhs: &GradedElt) -> GradedElt {
        let ring = &self.ring;
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let m: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if ring.vanishes(&m) {
                    continue;
                }
                let v = ca * cb;
                let slot = terms.entry(m).or_insert_with(Rational::zero);
                if ring.product_sign(a, b) {
                    *slot -= v;
                } else {
                    *slot += v;
                }
            }
        }
        GradedElt::from_terms(ring, terms)
    }
}

impl fmt::Display for GradedElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by_key(|(m, _)| (self.ring.degree(m), std::cmp::Reverse((*m).clone())));
        for (i, (m, c)) in items.into_iter().enumerate() {
            let neg = c < &Rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(g, e)| {
                    let n = self.ring.generator_name(g);
                    if *e == 1 {
                        n.to_string()
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", mono.join(" "))?;
            } else {
                write!(f, "{a} {}", mono.join(" "))?;
            }
        }
        Ok(())
    }
}
