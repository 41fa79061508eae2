use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Poly, QSeries, Rational};

/// Rational function `q^shift * num(q) / den(q)` in canonical form.
///
/// Canonical means `num(0) != 0`, `den(0) != 0`, `den` monic and `gcd(num, den) = 1`;
/// the zero function is `0 / 1` with shift 0. Two equal functions have identical fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl RatFn {
    /// Normalizes `num / den`; panics on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Self {
        Self::with_shift(0, num, den)
    }

    /// Normalizes `q^shift * num / den`.
    pub fn with_shift(shift: i64, num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let vn = num.valuation().unwrap();
        let vd = den.valuation().unwrap();
        let num = num.shift_down(vn);
        let den = den.shift_down(vd);
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading().unwrap().clone();
        let inv = Rational::one() / lead;
        RatFn { shift: shift + vn as i64 - vd as i64, num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero() -> Self {
        RatFn { shift: 0, num: Poly::zero(), den: Poly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(Poly::constant(c), Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::new(p, Poly::one())
    }

    /// `c * q^e`.
    pub fn monomial(c: Rational, e: i64) -> Self {
        Self::with_shift(e, Poly::constant(c), Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Power of `q` pulled out of numerator and denominator (the valuation at `q = 0`).
    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// Valuation at `q = 0`; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.shift)
    }

    /// Numerator and denominator degrees with the `q`-shift folded in on the side it belongs to.
    pub fn degrees(&self) -> (usize, usize) {
        if self.is_zero() {
            return (0, 0);
        }
        let dn = self.num.degree().unwrap() as i64 + self.shift.max(0);
        let dd = self.den.degree().unwrap() as i64 + (-self.shift).max(0);
        (dn as usize, dd as usize)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::with_shift(self.shift, self.num.scale(c), self.den.clone())
    }

    /// Multiplies by `q^e`.
    pub fn mul_q_pow(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        RatFn { shift: self.shift + e, num: self.num.clone(), den: self.den.clone() }
    }

    /// `f(1/q)`.
    pub fn invert_variable(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let dn = self.num.degree().unwrap() as i64;
        let dd = self.den.degree().unwrap() as i64;
        Self::with_shift(-self.shift - dn + dd, self.num.reversed(), self.den.reversed())
    }

    /// Laurent expansion at `q = 0` through `q^order`.
    pub fn series(&self, order: i64) -> QSeries {
        if self.is_zero() {
            return QSeries::zero(order);
        }
        let n = order - self.shift + 1;
        if n <= 0 {
            return QSeries::zero(order);
        }
        let n = n as usize;
        let d0 = self.den.coeff(0);
        let mut c: Vec<Rational> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.num.coeff(i);
            for j in 1..=i.min(self.den.degree().unwrap()) {
                acc -= self.den.coeff(j) * &c[i - j];
            }
            c.push(acc / &d0);
        }
        QSeries::new(self.shift, c, order)
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() || (x.is_zero() && self.shift < 0) {
            return None;
        }
        let xs = if self.shift >= 0 {
            num_traits::pow(x.clone(), self.shift as usize)
        } else {
            Rational::one() / num_traits::pow(x.clone(), (-self.shift) as usize)
        };
        Some(xs * self.num.eval(x) / d)
    }
}

/// `f(1/q) - (-1)^parity * q^(-d_beta) * f(q)`; zero iff `f` satisfies the functional equation.
pub fn functional_equation_residual(f: &RatFn, parity: i64, d_beta: i64) -> RatFn {
    let rhs = f.mul_q_pow(-d_beta).scale(&super::sign(parity));
    &f.invert_variable() - &rhs
}

impl RatFn {
    pub fn functional_equation_residual(&self, parity: i64, d_beta: i64) -> RatFn {
        functional_equation_residual(self, parity, d_beta)
    }
}

fn combine(a: &RatFn, b: &RatFn, sub: bool) -> RatFn {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return if sub { -b } else { b.clone() };
    }
    let lo = a.shift.min(b.shift);
    let na = &a.num.shift_up((a.shift - lo) as usize) * &b.den;
    let nb = &b.num.shift_up((b.shift - lo) as usize) * &a.den;
    let num = if sub { &na - &nb } else { &na + &nb };
    RatFn::with_shift(lo, num, &a.den * &b.den)
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        combine(self, rhs, false)
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        combine(self, rhs, true)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { shift: self.shift, num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        RatFn::with_shift(self.shift + rhs.shift, &self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RatFn {
    type Output = RatFn;
    fn div(self, rhs: &RatFn) -> RatFn {
        assert!(!rhs.is_zero(), "division by the zero rational function");
        RatFn::with_shift(self.shift - rhs.shift, &self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl fmt::Display for RatFn {
    /// Laurent polynomials print as `21/4 q`; proper fractions as `(num) / (den)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(i64, &Rational)> = self
            .num
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (i as i64 + self.shift, c))
            .collect();
        if self.den.degree() == Some(0) {
            return super::poly::fmt_laurent(f, terms);
        }
        write!(f, "(")?;
        super::poly::fmt_laurent(f, terms)?;
        write!(f, ") / ({})", self.den)
    }
}
