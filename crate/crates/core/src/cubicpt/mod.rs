//! Stable pairs on the cubic 3-fold in the line class.
//!
//! `P_{n+1}(X, line)` is the projectivization of `Sym^n S` over the Fano surface of
//! lines, so every bracket reduces to Segre pushforwards and a handful of integrals on
//! the Fano surface.

mod bracket;
mod fano;
mod pairing;
mod realize;

use std::sync::{Arc, OnceLock};

use crate::cohmodel::{build_model, BasisClass, CohClass, CohModel, ModelSpec};
use crate::exact::{q, qi};

pub use bracket::{
    bracket, fit_partition_function, integrate_ln, partition_function, partition_series, virasoro_residual_cubic,
    CubicError, PartitionFunction,
};
pub use fano::{derive_fano_integrals, fano_class_in_grassmannian, FanoIntegrals, FanoModel};
pub use pairing::{PairingMonomial, PairingPoly, PairingRatFn, PairingSeries};
pub use realize::{
    descendent_class, ln_ring, n0_descendent, reduce_mod_r, virtual_class, virtual_class_root_product,
};

/// Number of odd classes: `h^{2,1} = h^{1,2} = 5`.
pub const ODD_PAIRS: usize = 5;

/// `H*(X)` for the cubic 3-fold.
///
/// Even basis `1, H, H2, H3` with `H2 = H²`, `H3 = H³` and `∫H3 = 3`. Odd basis
/// `g1..g5` of type `(2,1)` and `g6..g10` of type `(1,2)`, with `∫ g_i g_{i+5} = 1`.
/// `c(X) = 1 + 2H + 4H² - 2H³`; the point class is `H3/3`, also available as `p`.
pub fn cubic_model() -> Arc<CohModel> {
    static MODEL: OnceLock<Arc<CohModel>> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            let mut basis = vec![
                BasisClass::new("1", 0, 0),
                BasisClass::new("H", 1, 1),
                BasisClass::new("H2", 2, 2),
                BasisClass::new("H3", 3, 3),
            ];
            for i in 1..=ODD_PAIRS {
                basis.push(BasisClass::new(&format!("g{i}"), 2, 1));
            }
            for i in 1..=ODD_PAIRS {
                basis.push(BasisClass::new(&format!("g{}", i + ODD_PAIRS), 1, 2));
            }
            let point = CohClass::scaled_basis(3, q(1, 3));
            let mut products = vec![(1, 1, CohClass::basis(2)), (1, 2, CohClass::basis(3))];
            for i in 0..ODD_PAIRS {
                products.push((4 + i, 4 + ODD_PAIRS + i, point.clone()));
            }
            let mut integrals = vec![qi(0); basis.len()];
            integrals[3] = qi(3);
            let spec = ModelSpec {
                name: "cubic".into(),
                dim: 3,
                basis,
                unit: CohClass::basis(0),
                products,
                integrals,
                chern: vec![
                    CohClass::scaled_basis(1, qi(2)),
                    CohClass::scaled_basis(2, qi(4)),
                    CohClass::scaled_basis(3, qi(-2)),
                ],
                point: point.clone(),
                aliases: vec![("p".into(), point)],
            };
            Arc::new(build_model(spec).expect("cubic model is valid"))
        })
        .clone()
}

/// Position of an odd basis class among the odd classes, counted from 1.
pub fn odd_label(m: &CohModel, class: usize) -> Option<u32> {
    if !m.is_odd_class(class) {
        return None;
    }
    Some((0..=class).filter(|&i| m.is_odd_class(i)).count() as u32)
}

/// `∫_X g_i g_j` for odd labels.
pub fn pairing_value(m: &CohModel, i: u32, j: u32) -> crate::exact::Rational {
    let odd: Vec<usize> = (0..m.len()).filter(|&c| m.is_odd_class(c)).collect();
    let (a, b) = (CohClass::basis(odd[i as usize - 1]), CohClass::basis(odd[j as usize - 1]));
    m.integrate(&m.mul(&a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohmodel::hrr_report;

    #[test]
    fn cubic_ring() {
        let m = cubic_model();
        let h = CohClass::basis(1);
        assert_eq!(m.mul(&h, &CohClass::basis(2)), CohClass::basis(3));
        assert_eq!(m.integrate(&CohClass::basis(3)), qi(3));
        let c1c2 = m.mul(&m.chern(1), &m.chern(2));
        assert_eq!(c1c2, m.point().scale(&qi(24)));
        let g = CohClass::basis(4);
        assert!(m.mul(&g, &g).is_zero());
        assert!(m.mul(&h, &g).is_zero());
        assert!(hrr_report(&m).passed());
    }

    #[test]
    fn diagonal_pushforward_of_c1() {
        let m = cubic_model();
        let terms: Vec<_> = m
            .diagonal_pushforward(&m.chern(1))
            .into_iter()
            .map(|t| (m.class(t.left).name.clone(), m.class(t.right).name.clone(), t.coeff))
            .collect();
        let two_thirds = q(2, 3);
        assert_eq!(
            terms,
            vec![
                ("H".into(), "H3".into(), two_thirds.clone()),
                ("H2".into(), "H2".into(), two_thirds.clone()),
                ("H3".into(), "H".into(), two_thirds),
            ]
        );
    }

    #[test]
    fn odd_labels() {
        let m = cubic_model();
        assert_eq!(odd_label(&m, 4), Some(1));
        assert_eq!(odd_label(&m, 13), Some(10));
        assert_eq!(odd_label(&m, 2), None);
        assert_eq!(pairing_value(&m, 1, 6), qi(1));
        assert_eq!(pairing_value(&m, 6, 1), qi(-1));
        assert_eq!(pairing_value(&m, 1, 7), qi(0));
    }
}
