use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exact::{QSeries, RatFn, Rational};

/// Product of symbols `P(i, j)` with `i < j`, kept sorted.
pub type PairingMonomial = Vec<(u32, u32)>;

/// Polynomial in the antisymmetric symbols `P(i, j) = ∫ g_i g_j` over odd classes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairingPoly {
    terms: BTreeMap<PairingMonomial, Rational>,
}

impl PairingPoly {
    pub fn zero() -> Self {
        PairingPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut out = PairingPoly::zero();
        out.add_term(Vec::new(), c);
        out
    }

    /// `P(i, j)`, normalized so that `P(j, i) = -P(i, j)` and `P(i, i) = 0`.
    pub fn pair(i: u32, j: u32) -> Self {
        let mut out = PairingPoly::zero();
        match i.cmp(&j) {
            std::cmp::Ordering::Less => out.add_term(vec![(i, j)], Rational::one()),
            std::cmp::Ordering::Greater => out.add_term(vec![(j, i)], -Rational::one()),
            std::cmp::Ordering::Equal => {}
        }
        out
    }

    fn add_term(&mut self, m: PairingMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<PairingMonomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = PairingPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn coeff(&self, m: &[(u32, u32)]) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value when no symbol occurs.
    pub fn as_scalar(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Substitutes numbers for the symbols.
    pub fn evaluate<F: Fn(u32, u32) -> Rational>(&self, p: F) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().fold(c.clone(), |acc, (i, j)| acc * p(*i, *j)))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

impl Add for &PairingPoly {
    type Output = PairingPoly;
    fn add(self, rhs: &PairingPoly) -> PairingPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &PairingPoly {
    type Output = PairingPoly;
    fn neg(self) -> PairingPoly {
        self.scale(&-Rational::one())
    }
}

impl Sub for &PairingPoly {
    type Output = PairingPoly;
    fn sub(self, rhs: &PairingPoly) -> PairingPoly {
        self + &(-rhs)
    }
}

impl Mul for &PairingPoly {
    type Output = PairingPoly;
    fn mul(self, rhs: &PairingPoly) -> PairingPoly {
        let mut out = PairingPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let mut m = a.clone();
                m.extend(b.iter().copied());
                m.sort_unstable();
                out.add_term(m, x * y);
            }
        }
        out
    }
}

fn monomial_name(m: &[(u32, u32)]) -> String {
    m.iter().map(|(i, j)| format!("P({i},{j})")).collect::<Vec<_>>().join("*")
}

impl fmt::Display for PairingPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if n > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            match (m.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => f.write_str(&monomial_name(m))?,
                (false, false) => write!(f, "{mag} {}", monomial_name(m))?,
            }
        }
        Ok(())
    }
}

/// A q-series for each pairing monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingSeries {
    pub parts: BTreeMap<PairingMonomial, QSeries>,
    pub order: i64,
}

impl PairingSeries {
    /// Collects `Σ q^e · values[e]`.
    pub fn from_coefficients(values: &[(i64, PairingPoly)], order: i64) -> Self {
        let mut acc: BTreeMap<PairingMonomial, Vec<(i64, Rational)>> = BTreeMap::new();
        for (e, p) in values {
            for (m, c) in p.terms() {
                acc.entry(m.clone()).or_default().push((*e, c.clone()));
            }
        }
        let parts = acc.into_iter().map(|(m, t)| (m, QSeries::from_terms(t, order))).collect();
        PairingSeries { parts, order }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(QSeries::is_zero)
    }

    pub fn coeff(&self, e: i64) -> PairingPoly {
        let mut out = PairingPoly::zero();
        for (m, s) in &self.parts {
            out.add_term(m.clone(), s.coeff(e));
        }
        out
    }
}

impl fmt::Display for PairingSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let live: Vec<_> = self.parts.iter().filter(|(_, s)| !s.is_zero()).collect();
        if live.is_empty() {
            return write!(f, "O(q^{})", self.order + 1);
        }
        let rendered: Vec<String> = live
            .iter()
            .map(|(m, s)| if m.is_empty() { format!("{s}") } else { format!("({s}) {}", monomial_name(m)) })
            .collect();
        f.write_str(&rendered.join(" + "))
    }
}

/// A rational function for each pairing monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingRatFn {
    pub parts: BTreeMap<PairingMonomial, RatFn>,
}

impl PairingRatFn {
    pub fn scalar(f: RatFn) -> Self {
        PairingRatFn { parts: BTreeMap::from([(Vec::new(), f)]) }
    }

    /// `f · p` for a pairing polynomial `p`.
    pub fn times(f: &RatFn, p: &PairingPoly) -> Self {
        let parts = p
            .terms()
            .iter()
            .map(|(m, c)| (m.clone(), f.scale(c)))
            .filter(|(_, g)| !g.is_zero())
            .collect();
        PairingRatFn { parts }
    }

    pub fn series(&self, order: i64) -> PairingSeries {
        let parts = self.parts.iter().map(|(m, f)| (m.clone(), f.series(order))).collect();
        PairingSeries { parts, order }
    }
}

impl fmt::Display for PairingRatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let live: Vec<_> = self.parts.iter().filter(|(_, g)| !g.is_zero()).collect();
        if live.is_empty() {
            return f.write_str("0");
        }
        let rendered: Vec<String> = live
            .iter()
            .map(|(m, g)| if m.is_empty() { format!("{g}") } else { format!("({g}) {}", monomial_name(m)) })
            .collect();
        f.write_str(&rendered.join(" + "))
    }
}
