//! Exact scalar arithmetic and univariate objects in the formal variable `q`.
//!
//! Every coefficient in the crate is a [`Rational`]; nothing is ever rounded.

mod linalg;
mod poly;
mod ratfn;
mod reconstruct;
mod series;

pub use linalg::{invert, solve, LinearSolution, Matrix};
pub use poly::Poly;
pub use ratfn::{functional_equation_residual, RatFn};
pub use reconstruct::{reconstruct_rational, ReconstructError, Reconstruction};
pub use series::QSeries;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary precision rational, always kept in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// `n / d` as a [`Rational`].
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a [`Rational`].
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u32) -> Rational {
    (1..=n).fold(Rational::one(), |acc, i| acc * qi(i as i64))
}

/// Binomial coefficient as a rational; zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 || n < 0 || k > n {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * qi(n - i) / qi(i + 1);
    }
    acc
}

/// `(-1)^e` as a rational.
pub fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Parses `a`, `-a`, `a/b` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}
