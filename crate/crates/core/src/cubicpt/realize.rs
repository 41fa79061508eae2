use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use super::{cubic_model, odd_label, ODD_PAIRS};
use crate::cherncalc::{cubic_ambient_ring, elementary_from_symmetric, todd_quotient_cubic, GradedElt, GradedPolyRing};
use crate::cohmodel::CohClass;
use crate::exact::{factorial, q, qi, sign, Rational};

/// Index of `zeta` among the generators of [`ln_ring`].
pub(super) const ZETA: usize = 2;
/// Index of the first odd generator of [`ln_ring`].
pub(super) const FIRST_PHI: usize = 3;

/// `H*(F)[ζ]` with `F` the Fano surface: generators `c1, c2, ζ` and odd `phi1..phi10`
/// (the images of the odd classes of `X`). Classes pulled back from `F` vanish above
/// real degree 4; `ζ` is left free and pushed forward with Segre classes.
pub fn ln_ring() -> Arc<GradedPolyRing> {
    static RING: OnceLock<Arc<GradedPolyRing>> = OnceLock::new();
    RING.get_or_init(|| {
        let mut r = GradedPolyRing::new(&[("c1", 2), ("c2", 4), ("zeta", 2)]);
        for i in 1..=2 * ODD_PAIRS {
            r = r.with_odd(&format!("phi{i}"), 1);
        }
        let mut weights = vec![2, 4, 0];
        weights.extend(std::iter::repeat_n(1, 2 * ODD_PAIRS));
        Arc::new(r.with_weighted_cap(weights, 4))
    })
    .clone()
}

fn geometric_todd() -> &'static GradedElt {
    static T: OnceLock<GradedElt> = OnceLock::new();
    T.get_or_init(|| todd_quotient_cubic(5))
}

/// `[L] = H²/3 - H c1/3 + (c1² - c2)/3`, dropping the odd Künneth component.
fn line_class() -> GradedElt {
    let r = cubic_ambient_ring();
    let t = |c: Rational, parts: &[(&str, u32)]| GradedElt::term(&r, c, parts);
    let terms = [
        t(q(1, 3), &[("H", 2)]),
        t(q(-1, 3), &[("H", 1), ("c1", 1)]),
        t(q(1, 3), &[("c1", 2)]),
        t(q(-1, 3), &[("c2", 1)]),
    ];
    terms.iter().fold(GradedElt::zero(&r), |a, b| &a + b)
}

/// Moves a polynomial in `c1, c2` from one ring into [`ln_ring`].
fn into_ln(terms: impl IntoIterator<Item = (u32, u32, Rational)>) -> GradedElt {
    let r = ln_ring();
    let mut out = BTreeMap::new();
    for (a, b, c) in terms {
        let mut m = vec![0; r.ngens()];
        m[0] = a;
        m[1] = b;
        *out.entry(m).or_insert_with(Rational::zero) += c;
    }
    GradedElt::from_terms(&r, out)
}

fn phi(label: u32) -> GradedElt {
    GradedElt::gen(&ln_ring(), &format!("phi{label}"))
}

/// `ch_b` at `n = 0` on a basis class of the cubic, as a class on the Fano surface.
///
/// Even classes `H^i` use `ch(F) = [L] · td(O(3)) / td(O(1) ⊠ Q)` pushed forward along
/// `X`; odd classes give `ch_2(γ) = φ(γ)` and `ch_3(γ) = c1 φ(γ) / 2`.
pub fn n0_descendent(b: u32, class: usize) -> GradedElt {
    let m = cubic_model();
    let r = ln_ring();
    if b == 0 {
        return GradedElt::constant(&r, -m.integrate(&CohClass::basis(class)));
    }
    if b == 1 {
        return GradedElt::zero(&r);
    }
    if let Some(label) = odd_label(&m, class) {
        return match b {
            2 => phi(label),
            3 => (&GradedElt::gen(&r, "c1") * &phi(label)).scale(&q(1, 2)),
            _ => GradedElt::zero(&r),
        };
    }
    let ambient = cubic_ambient_ring();
    let h_power = m.class(class).degree / 2;
    let integrand = &(&line_class() * &geometric_todd().component(2 * (b - 2))) * &GradedElt::term(&ambient, qi(1), &[("H", h_power)]);
    // pushing forward along X picks the H³ coefficient times ∫H³ = 3
    into_ln(
        integrand
            .terms()
            .iter()
            .filter(|(mono, _)| mono[0] == 3)
            .map(|(mono, c)| (mono[1], mono[2], c * qi(3))),
    )
}

/// `ch_k(γ)` on `P_{n+1}(X, line)` for a class `γ` of the cubic:
/// `ch(γ) = e^{ζ + n c1} ch⁰(e^{nH} γ)`, plus `-∫γ` in degree 0.
pub fn descendent_class(n: u32, k: u32, gamma: &CohClass) -> GradedElt {
    let m = cubic_model();
    let r = ln_ring();
    let mut out = GradedElt::zero(&r);
    for (class, coeff) in gamma.iter() {
        if k == 0 {
            out = &out + &GradedElt::constant(&r, -coeff * m.integrate(&CohClass::basis(class)));
        }
        if n == 0 {
            if k >= 2 {
                out = &out + &n0_descendent(k, class).scale(coeff);
            }
            continue;
        }
        let shift = &GradedElt::gen(&r, "zeta") + &GradedElt::term(&r, qi(n as i64), &[("c1", 1)]);
        let mut h_i = CohClass::basis(class);
        for i in 0..=k {
            if h_i.is_zero() {
                break;
            }
            let weight = coeff * Rational::from_integer((n as i64).pow(i).into()) / factorial(i);
            for b in 2..=(k - i) {
                let a = k - i - b;
                let exp_a = shift.pow(a).scale(&(qi(1) / factorial(a)));
                let mut ch0 = GradedElt::zero(&r);
                for (c, v) in h_i.iter() {
                    ch0 = &ch0 + &n0_descendent(b, c).scale(v);
                }
                out = &out + &(&exp_a * &ch0).scale(&weight);
            }
            h_i = m.mul(&CohClass::basis(1), &h_i);
        }
    }
    out
}

/// Drops `H^{>4}` and everything of degree above 2 on the Fano surface: the ideal that
/// the virtual class annihilates for `n > 0`.
pub fn reduce_mod_r(x: &GradedElt) -> GradedElt {
    let r = x.ring().clone();
    x.filter(|mono| {
        let total = r.degree(mono);
        let fano = total - 2 * mono[ZETA];
        total <= 4 && fano <= 2
    })
}

/// `[P_{n+1}(X, line)]^vir` in closed form: `1` for `n = 0`, otherwise
/// `(-1)^n c1 (ζ^{n-1} + (n+2)(n-1)/2 · ζ^{n-2} c1)`.
pub fn virtual_class(n: u32) -> GradedElt {
    let r = ln_ring();
    if n == 0 {
        return GradedElt::one(&r);
    }
    let c1 = GradedElt::gen(&r, "c1");
    let zeta = GradedElt::gen(&r, "zeta");
    let mut inner = zeta.pow(n - 1);
    if n >= 2 {
        let c = Rational::from_integer((((n + 2) * (n - 1)) / 2).into());
        inner = &inner + &(&zeta.pow(n - 2) * &c1).scale(&c);
    }
    (&c1 * &inner).scale(&sign(n as i64))
}

/// `c_n(Obs) = (-1)^n c1 ∏_{j=0}^{n-2} (ζ + n c1 - jα - (n-2-j)β)` with `α, β` the
/// roots of `S`, rewritten through `c1 = α + β`, `c2 = αβ`.
pub fn virtual_class_root_product(n: u32) -> GradedElt {
    let r = ln_ring();
    if n == 0 {
        return GradedElt::one(&r);
    }
    let roots = Arc::new(GradedPolyRing::new(&[("alpha", 2), ("beta", 2), ("zeta", 2)]).with_weighted_cap(vec![2, 2, 0], 4));
    let a = GradedElt::gen(&roots, "alpha");
    let b = GradedElt::gen(&roots, "beta");
    let z = GradedElt::gen(&roots, "zeta");
    let c1 = &a + &b;
    let mut prod = c1.scale(&sign(n as i64));
    for j in 0..n.saturating_sub(1) {
        // n c1 - jα - (n-2-j)β = (n-j)α + (j+2)β
        let factor = &(&z + &a.scale(&qi((n - j) as i64))) + &b.scale(&qi((j + 2) as i64));
        prod = &prod * &factor;
    }
    let mut by_zeta: BTreeMap<u32, BTreeMap<Vec<u32>, Rational>> = BTreeMap::new();
    for (m, c) in prod.terms() {
        by_zeta.entry(m[2]).or_default().insert(vec![m[0], m[1], 0], c.clone());
    }
    let zeta = GradedElt::gen(&r, "zeta");
    let mut out = GradedElt::zero(&r);
    for (e, terms) in by_zeta {
        let sym = elementary_from_symmetric(&GradedElt::from_terms(&roots, terms), &r).expect("symmetric in the roots");
        out = &out + &(&sym * &zeta.pow(e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln(parts: &[(Rational, &[(&str, u32)])]) -> GradedElt {
        let r = ln_ring();
        parts.iter().fold(GradedElt::zero(&r), |acc, (c, p)| &acc + &GradedElt::term(&r, c.clone(), p))
    }

    #[test]
    fn even_descendents_at_n0() {
        let c1 = |c: Rational| (c, &[("c1", 1)][..]);
        assert_eq!(n0_descendent(3, 0), GradedElt::zero(&ln_ring()));
        assert_eq!(n0_descendent(2, 1), GradedElt::one(&ln_ring()));
        assert_eq!(n0_descendent(4, 0), ln(&[c1(q(1, 6))]));
        assert_eq!(n0_descendent(3, 1), ln(&[c1(q(1, 2))]));
        assert_eq!(n0_descendent(2, 2), ln(&[c1(qi(-1))]));
        assert_eq!(n0_descendent(5, 0), ln(&[(q(1, 12), &[("c1", 2)])]));
        assert_eq!(n0_descendent(4, 1), ln(&[(q(-1, 12), &[("c1", 2)]), (q(1, 3), &[("c2", 1)])]));
        assert_eq!(n0_descendent(3, 2), ln(&[(q(-1, 2), &[("c1", 2)])]));
        assert_eq!(n0_descendent(2, 3), ln(&[(qi(1), &[("c1", 2)]), (qi(-1), &[("c2", 1)])]));
    }

    #[test]
    fn descendents_mod_r() {
        let n = 3u32;
        let nq = qi(n as i64);
        let one = CohClass::basis(0);
        let h = CohClass::basis(1);
        let red = |k, g: &CohClass| reduce_mod_r(&descendent_class(n, k, g));
        assert_eq!(red(3, &one), ln(&[(nq.clone(), &[])]));
        assert_eq!(red(2, &h), ln(&[(qi(1), &[])]));
        let lead = q(1, 6) + &nq / qi(2) + &nq * &nq / qi(2);
        assert_eq!(red(4, &one), ln(&[(lead.clone(), &[("c1", 1)]), (nq.clone(), &[("zeta", 1)])]));
        assert_eq!(red(3, &h), ln(&[(q(1, 2), &[("c1", 1)]), (qi(1), &[("zeta", 1)])]));
        assert_eq!(red(2, &CohClass::basis(2)), ln(&[(qi(-1), &[("c1", 1)])]));
        assert_eq!(red(4, &h), ln(&[(q(1, 2), &[("c1", 1), ("zeta", 1)]), (q(1, 2), &[("zeta", 2)])]));
        assert_eq!(red(3, &CohClass::basis(2)), ln(&[(qi(-1), &[("c1", 1), ("zeta", 1)])]));
        assert!(red(2, &CohClass::basis(3)).is_zero());
        assert_eq!(red(3, &CohClass::basis(4)), ln(&[(qi(1), &[("zeta", 1), ("phi1", 1)])]));
        // the ζ² coefficient of ch_5(1) is n/2
        assert_eq!(red(5, &one), ln(&[(lead, &[("c1", 1), ("zeta", 1)]), (&nq / qi(2), &[("zeta", 2)])]));
    }

    #[test]
    fn virtual_class_forms_agree() {
        for n in 0..=8 {
            assert_eq!(virtual_class_root_product(n), virtual_class(n), "n = {n}");
        }
        let c1 = GradedElt::gen(&ln_ring(), "c1");
        assert_eq!(virtual_class(1), -c1.clone());
        let z = GradedElt::gen(&ln_ring(), "zeta");
        assert_eq!(virtual_class(2), &(&c1 * &z) + &(&c1 * &c1).scale(&qi(2)));
    }
}
