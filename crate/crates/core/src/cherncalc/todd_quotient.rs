use std::sync::{Arc, OnceLock};

use super::{GradedElt, GradedPolyRing, RootBundle};
use crate::exact::qi;

/// `Q[H, c1, c2]` on the product of the cubic 3-fold and its Fano surface:
/// `H^4 = 0` and classes pulled back from the surface vanish above real degree 4.
pub fn cubic_ambient_ring() -> Arc<GradedPolyRing> {
    static RING: OnceLock<Arc<GradedPolyRing>> = OnceLock::new();
    RING.get_or_init(|| {
        Arc::new(
            GradedPolyRing::new(&[("H", 2), ("c1", 2), ("c2", 4)])
                .with_weighted_cap(vec![2, 0, 0], 6)
                .with_weighted_cap(vec![0, 2, 4], 4)
                .with_degree_cap(10),
        )
    })
    .clone()
}

/// `td(O(3)) / td(O(1) ⊠ Q)` through complex degree `order`, where `Q` is the universal
/// quotient bundle and `c(Q) = 1 / c(S)`.
pub fn todd_quotient_cubic(order: usize) -> GradedElt {
    let r = cubic_ambient_ring();
    let h = GradedElt::gen(&r, "H");
    let c_s = &(&GradedElt::one(&r) + &GradedElt::gen(&r, "c1")) + &GradedElt::gen(&r, "c2");
    let c_q = c_s.inverse().expect("unit constant term");
    let quotient = RootBundle::from_chern(&r, 3, (1..=3).map(|i| c_q.component(2 * i)).collect());
    let td_o3 = RootBundle::line(&h.scale(&qi(3))).todd(order);
    let td_q = quotient.twist(&h).todd(order);
    (&td_o3 * &td_q.inverse().expect("Todd classes are invertible")).truncate(2 * order as u32)
}

/// The reciprocal `td(O(1) ⊠ Q) / td(O(3))`, the form in which the quotient is usually
/// tabulated.
pub fn displayed_todd_series(order: usize) -> GradedElt {
    todd_quotient_cubic(order)
        .inverse()
        .expect("Todd classes are invertible")
        .truncate(2 * order as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn tabulated_coefficients() {
        let d = displayed_todd_series(7);
        assert_eq!(d.coeff(&[("c1", 1)]), q(-1, 2));
        assert_eq!(d.coeff(&[("c1", 2)]), q(1, 6));
        assert_eq!(d.coeff(&[("c2", 1)]), q(-1, 12));
        assert_eq!(d.coeff(&[("H", 1), ("c1", 1)]), q(1, 12));
        assert_eq!(d.coeff(&[("H", 1), ("c1", 2)]), q(-1, 24));
        assert_eq!(d.coeff(&[("H", 2)]), q(1, 4));
        assert_eq!(d.coeff(&[("H", 2), ("c1", 1)]), q(-1, 8));
        assert_eq!(d.coeff(&[("H", 2), ("c1", 2)]), q(31, 720));
        assert_eq!(d.coeff(&[("H", 2), ("c2", 1)]), q(-1, 60));
        assert_eq!(d.coeff(&[("H", 3), ("c1", 1)]), q(7, 360));
        assert_eq!(d.coeff(&[("H", 3), ("c1", 2)]), q(-7, 720));
        assert_eq!(d.terms().len(), 12);
    }

    #[test]
    fn geometric_quotient() {
        let t = todd_quotient_cubic(7);
        assert_eq!(t.coeff(&[("c1", 1)]), q(1, 2));
        assert_eq!(t.coeff(&[("H", 2)]), q(-1, 4));
        assert_eq!(t.coeff(&[("H", 3), ("c1", 2)]), q(1, 90));
    }
}
