use num_traits::One;
use thiserror::Error;

use super::linalg::{solve, LinearSolution, Matrix};
use super::{Poly, QSeries, RatFn, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("series is not rational within degree bounds ({num_deg}, {den_deg})")]
    NoSolution { num_deg: usize, den_deg: usize },
    #[error("need at least {needed} known coefficients, series has {available}")]
    InsufficientData { needed: usize, available: usize },
}

/// A fitted rational function.
///
/// `ambiguous` is set when the degree bounds were not saturated, i.e. the linear system
/// had a kernel. The returned function is the reduced one and is still the unique
/// rational function within the bounds that matches the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub function: RatFn,
    pub ambiguous: bool,
}

/// Fits `num / den` with `deg num <= num_deg`, `deg den <= den_deg` to the known
/// coefficients of `s` by solving the exact linearized system with `den(0) = 1`.
pub fn reconstruct_rational(
    s: &QSeries,
    num_deg: usize,
    den_deg: usize,
) -> Result<Reconstruction, ReconstructError> {
    let needed = num_deg + den_deg + 1;
    if s.is_zero() {
        let available = (s.order() + 1).max(0) as usize;
        if available < needed {
            return Err(ReconstructError::InsufficientData { needed, available });
        }
        return Ok(Reconstruction { function: RatFn::zero(), ambiguous: false });
    }
    let v = s.valuation();
    let available = (s.order() - v + 1) as usize;
    let nb = num_deg as i64 - v.max(0);
    let db = den_deg as i64 - (-v).max(0);
    if nb < 0 || db < 0 {
        return Err(ReconstructError::NoSolution { num_deg, den_deg });
    }
    let (nb, db) = (nb as usize, db as usize);
    if available < nb + db + 1 {
        return Err(ReconstructError::InsufficientData { needed: nb + db + 1, available });
    }
    // t(q) = q^{-v} s(q), known through q^{available-1}
    let t: Vec<Rational> = (0..available).map(|j| s.coeff(v + j as i64)).collect();

    // unknowns: d_1..d_db then n_0..n_nb
    // equation j: t_j + sum_{i=1}^{min(j,db)} d_i t_{j-i} - n_j = 0
    let cols = db + nb + 1;
    let mut a = Matrix::zeros(available, cols);
    let mut rhs = Vec::with_capacity(available);
    for j in 0..available {
        for i in 1..=j.min(db) {
            a[(j, i - 1)] = t[j - i].clone();
        }
        if j <= nb {
            a[(j, db + j)] = -Rational::one();
        }
        rhs.push(-t[j].clone());
    }
    let (x, ambiguous) = match solve(&a, &rhs) {
        LinearSolution::Unique(x) => (x, false),
        LinearSolution::Underdetermined { particular, .. } => (particular, true),
        LinearSolution::Inconsistent => {
            return Err(ReconstructError::NoSolution { num_deg, den_deg })
        }
    };
    let mut den = vec![Rational::one()];
    den.extend(x[..db].iter().cloned());
    let num = x[db..].to_vec();
    let function = RatFn::with_shift(v, Poly::new(num), Poly::new(den));

    let check = function.series(s.order());
    if check != *s {
        return Err(ReconstructError::NoSolution { num_deg, den_deg });
    }
    let ambiguous = ambiguous && {
        let (dn, dd) = function.degrees();
        dn < num_deg || dd < den_deg
    };
    Ok(Reconstruction { function, ambiguous })
}
