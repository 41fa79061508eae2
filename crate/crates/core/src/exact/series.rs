use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::Rational;

/// Truncated Laurent series `sum_{e <= order} c_e q^e`.
///
/// Coefficients are known exactly for every exponent up to and including `order`;
/// nothing is claimed beyond it. Exponents below `valuation` are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    valuation: i64,
    coeffs: Vec<Rational>,
    order: i64,
}

impl QSeries {
    /// Builds a series whose coefficient of `q^(lowest + i)` is `coeffs[i]`, known through `order`.
    /// Coefficients past `order` are discarded.
    pub fn new(lowest: i64, coeffs: Vec<Rational>, order: i64) -> Self {
        let mut s = QSeries { valuation: lowest, coeffs, order };
        s.normalize();
        s
    }

    pub fn zero(order: i64) -> Self {
        QSeries { valuation: order + 1, coeffs: Vec::new(), order }
    }

    /// Builds a series from `(exponent, coefficient)` pairs.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(terms: I, order: i64) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|(e, _)| *e <= order).collect();
        let Some(lo) = terms.iter().map(|(e, _)| *e).min() else {
            return Self::zero(order);
        };
        let mut coeffs = vec![Rational::zero(); (order - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::new(lo, coeffs, order)
    }

    fn normalize(&mut self) {
        let keep = (self.order - self.valuation + 1).max(0) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.valuation = self.order + 1;
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.valuation += k as i64;
            }
        }
    }

    /// Lowest exponent with a nonzero coefficient; `order + 1` for the zero series.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^e`; panics if `e` lies beyond the truncation order.
    pub fn coeff(&self, e: i64) -> Rational {
        assert!(e <= self.order, "coefficient q^{e} beyond truncation order {}", self.order);
        if e < self.valuation {
            return Rational::zero();
        }
        self.coeffs.get((e - self.valuation) as usize).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.valuation + i as i64, c))
    }

    /// Drops everything past `order` (which must not exceed the current order).
    pub fn truncate(&self, order: i64) -> Self {
        assert!(order <= self.order, "cannot raise truncation order");
        QSeries::new(self.valuation, self.coeffs.clone(), order)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QSeries::new(self.valuation, self.coeffs.iter().map(|x| x * c).collect(), self.order)
    }

    /// Multiplies by `q^e`, shifting the truncation order with it.
    pub fn shift(&self, e: i64) -> Self {
        QSeries { valuation: self.valuation + e, coeffs: self.coeffs.clone(), order: self.order + e }
    }

    /// `q d/dq`.
    pub fn q_derivative(&self) -> Self {
        QSeries::from_terms(self.terms().map(|(e, c)| (e, c * super::qi(e))), self.order)
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let order = self.order.min(rhs.order);
        QSeries::from_terms(
            self.terms().chain(rhs.terms()).map(|(e, c)| (e, c.clone())),
            order,
        )
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries { valuation: self.valuation, coeffs: self.coeffs.iter().map(|c| -c).collect(), order: self.order }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        // Known through min(order_a + val_b, order_b + val_a), never more than either operand claims.
        let order = (self.order + rhs.valuation.min(0))
            .min(rhs.order + self.valuation.min(0))
            .min(self.order + rhs.valuation)
            .min(rhs.order + self.valuation);
        let mut terms = Vec::new();
        for (ea, ca) in self.terms() {
            for (eb, cb) in rhs.terms() {
                if ea + eb <= order {
                    terms.push((ea + eb, ca * cb));
                }
            }
        }
        QSeries::from_terms(terms, order)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::poly::fmt_laurent(f, self.terms())?;
        write!(f, " + O(q^{})", self.order + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qi;

    #[test]
    fn zero_series_has_no_terms() {
        let z = QSeries::new(0, vec![qi(0), qi(0)], 5);
        assert!(z.is_zero());
        assert_eq!(z.valuation(), 6);
        assert_eq!(z.coeff(3), qi(0));
    }

    #[test]
    fn addition_uses_min_order() {
        let a = QSeries::from_terms([(1, qi(2))], 4);
        let b = QSeries::from_terms([(2, qi(3))], 7);
        let s = &a + &b;
        assert_eq!(s.order(), 4);
        assert_eq!(s.coeff(2), qi(3));
    }

    #[test]
    fn product_never_overclaims() {
        let a = QSeries::from_terms([(0, qi(1)), (1, qi(1))], 3);
        let b = QSeries::from_terms([(0, qi(1)), (1, qi(-1))], 5);
        let p = &a * &b;
        assert_eq!(p.order(), 3);
        assert_eq!(p.coeff(2), qi(-1));
        // negative valuation lowers what a product can know
        let c = QSeries::from_terms([(-2, qi(1))], 3);
        assert_eq!((&a * &c).order(), 1);
    }

    #[test]
    #[should_panic]
    fn reading_past_order_panics() {
        QSeries::zero(2).coeff(3);
    }
}
