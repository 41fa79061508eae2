use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use super::fano::FanoModel;
use super::pairing::{PairingMonomial, PairingPoly, PairingRatFn, PairingSeries};
use super::realize::{descendent_class, ln_ring, virtual_class, FIRST_PHI, ZETA};
use super::cubic_model;
use crate::cherncalc::{segre_pushforward, GradedElt};
use crate::cohmodel::CohClass;
use crate::descalg::{DescError, DescExpr, OperatorPreset};
use crate::exact::{functional_equation_residual, reconstruct_rational, RatFn, ReconstructError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubicError {
    #[error("odd product {0} has no known integral on the Fano surface")]
    UnevaluatableOddProduct(String),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error(transparent)]
    Operator(#[from] DescError),
}

type Memo<K, V> = OnceLock<Mutex<HashMap<K, V>>>;

fn memo<K: Hash + Eq, V: Clone>(table: &'static Memo<K, V>, key: K, make: impl FnOnce() -> V) -> V {
    let map = table.get_or_init(Mutex::default);
    if let Some(v) = map.lock().expect("memo lock").get(&key) {
        return v.clone();
    }
    let v = make();
    map.lock().expect("memo lock").insert(key, v.clone());
    v
}

fn segre_classes(n: u32) -> Vec<GradedElt> {
    static TABLE: Memo<u32, Vec<GradedElt>> = OnceLock::new();
    memo(&TABLE, n, || (0..=2).map(|j| segre_pushforward(n, j)).collect())
}

fn basis_descendent(n: u32, k: u32, class: usize) -> GradedElt {
    static TABLE: Memo<(u32, u32, usize), GradedElt> = OnceLock::new();
    memo(&TABLE, (n, k, class), || descendent_class(n, k, &CohClass::basis(class)))
}

fn cached_virtual_class(n: u32) -> GradedElt {
    static TABLE: Memo<u32, GradedElt> = OnceLock::new();
    memo(&TABLE, n, || virtual_class(n))
}

/// `∫_{P_{n+1}} x` for a class on `P(Sym^n S)`: `ζ^{n+j}` pushes forward to `s_j`, then
/// the Fano surface integrals finish the job.
pub fn integrate_ln(x: &GradedElt, n: u32, fano: &FanoModel) -> Result<PairingPoly, CubicError> {
    let r = ln_ring();
    let top = 2 * (n + 2);
    let segre = segre_classes(n);
    let mut out = PairingPoly::zero();
    for (mono, c) in x.terms() {
        if r.degree(mono) != top || mono[ZETA] < n {
            continue;
        }
        let j = (mono[ZETA] - n) as usize;
        let Some(s) = segre.get(j) else { continue };
        let odd: Vec<u32> = (FIRST_PHI..mono.len()).filter(|&i| mono[i] == 1).map(|i| (i - FIRST_PHI + 1) as u32).collect();
        for (sm, sc) in s.terms() {
            let (a, b) = (mono[0] + sm[0], mono[1] + sm[1]);
            let value = fano.integrate(a, b, &odd).ok_or_else(|| {
                let names: Vec<String> = odd.iter().map(|i| format!("phi{i}")).collect();
                CubicError::UnevaluatableOddProduct(format!("c1^{a} c2^{b} {}", names.join(" ")))
            })?;
            out = &out + &value.scale(&(c * sc));
        }
    }
    Ok(out)
}

/// `⟨D⟩_{n+1}` on the line class of the cubic.
pub fn bracket(n_plus_1: u32, d: &DescExpr, fano: &FanoModel) -> Result<PairingPoly, CubicError> {
    assert!(n_plus_1 >= 1, "P_0 of the line class is empty");
    let n = n_plus_1 - 1;
    let r = ln_ring();
    let mut realized = GradedElt::zero(&r);
    for (mono, c) in d.terms() {
        let mut term = GradedElt::constant(&r, c.clone());
        for g in mono {
            term = &term * &basis_descendent(n, g.k, g.class);
            if term.is_zero() {
                break;
            }
        }
        realized = &realized + &term;
    }
    integrate_ln(&(&realized * &cached_virtual_class(n)), n, fano)
}

/// `Σ_{n=0}^{n_max} q^{n+1} ⟨D⟩_{n+1}`, known through `q^{n_max+1}`.
pub fn partition_series(d: &DescExpr, n_max: u32, fano: &FanoModel) -> Result<PairingSeries, CubicError> {
    let mut values = Vec::new();
    for n in 0..=n_max {
        values.push(((n + 1) as i64, bracket(n + 1, d, fano)?));
    }
    Ok(PairingSeries::from_coefficients(&values, (n_max + 1) as i64))
}

/// A computed partition function with its rational closed form.
#[derive(Clone, Debug)]
pub struct PartitionFunction {
    pub series: PairingSeries,
    pub closed_form: PairingRatFn,
    /// Some component was fitted with unsaturated degree bounds.
    pub ambiguous: bool,
    /// `f(1/q) - (-1)^{Σk} q^{-2} f(q)` per component; all zero when the functional
    /// equation holds.
    pub functional_equation: PairingRatFn,
}

impl PartitionFunction {
    pub fn satisfies_functional_equation(&self) -> bool {
        self.functional_equation.parts.values().all(RatFn::is_zero)
    }
}

/// Fits each component of a series with the smallest denominator degree that works,
/// keeping at least two coefficients in reserve as a check.
pub fn fit_partition_function(series: &PairingSeries, parity: i64) -> Result<PartitionFunction, CubicError> {
    let available = (series.order + 1) as usize;
    let mut parts = BTreeMap::new();
    let mut ambiguous = false;
    for (m, s) in &series.parts {
        let mut fitted = None;
        let mut last_err = None;
        for den in 0.. {
            let num = den + 1;
            if num + den + 1 + 2 > available {
                break;
            }
            match reconstruct_rational(s, num, den) {
                Ok(rec) => {
                    fitted = Some(rec);
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        let rec = match (fitted, last_err) {
            (Some(rec), _) => rec,
            (None, Some(e)) => return Err(e.into()),
            (None, None) => return Err(ReconstructError::InsufficientData { needed: 4, available }.into()),
        };
        ambiguous |= rec.ambiguous;
        parts.insert(m.clone() as PairingMonomial, rec.function);
    }
    let functional_equation = PairingRatFn {
        parts: parts.iter().map(|(m, f)| (m.clone(), functional_equation_residual(f, parity, 2))).collect(),
    };
    Ok(PartitionFunction { series: series.clone(), closed_form: PairingRatFn { parts }, ambiguous, functional_equation })
}

/// Computes brackets for `n + 1 = 1..=n_max+1`, fits the closed form and evaluates the
/// functional equation with parity `Σ k_j` and `d_β = 2`.
pub fn partition_function(d: &DescExpr, n_max: u32, fano: &FanoModel) -> Result<PartitionFunction, CubicError> {
    let series = partition_series(d, n_max, fano)?;
    let parity = d.index_sum().unwrap_or(0) as i64;
    fit_partition_function(&series, parity)
}

/// `Σ_n q^{n+1} ⟨L_k D⟩_{n+1}` on the cubic, through `q^{n_max+1}`.
pub fn virasoro_residual_cubic(k: i64, d: &DescExpr, n_max: u32, fano: &FanoModel) -> Result<PairingSeries, CubicError> {
    let preset = OperatorPreset::threefold(cubic_model());
    let l = preset.apply_lk(d, k)?.collapse(&cubic_model());
    partition_series(&l, n_max, fano)
}
