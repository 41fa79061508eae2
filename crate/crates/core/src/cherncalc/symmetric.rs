use std::sync::{Arc, OnceLock};


use super::{GradedElt, GradedPolyRing, RootBundle};
use crate::exact::qi;

/// `Q[c1, c2]` on a surface: everything above real degree 4 vanishes.
pub fn surface_base_ring() -> Arc<GradedPolyRing> {
    static RING: OnceLock<Arc<GradedPolyRing>> = OnceLock::new();
    RING.get_or_init(|| Arc::new(GradedPolyRing::new(&[("c1", 2), ("c2", 4)]).with_degree_cap(4)))
        .clone()
}

fn root_ring() -> Arc<GradedPolyRing> {
    static RING: OnceLock<Arc<GradedPolyRing>> = OnceLock::new();
    RING.get_or_init(|| Arc::new(GradedPolyRing::new(&[("alpha", 2), ("beta", 2)]).with_degree_cap(4)))
        .clone()
}

/// Rewrites a symmetric polynomial in the first two generators of its ring (the roots)
/// in terms of `c1 = e1`, `c2 = e2` in `target`. Returns `None` if it is not symmetric.
pub fn elementary_from_symmetric(f: &GradedElt, target: &Arc<GradedPolyRing>) -> Option<GradedElt> {
    let ring = f.ring().clone();
    let (a, b) = (GradedElt::gen(&ring, ring.generator_name(0)), GradedElt::gen(&ring, ring.generator_name(1)));
    let e1 = &a + &b;
    let e2 = &a * &b;
    let (t1, t2) = (GradedElt::gen(target, "c1"), GradedElt::gen(target, "c2"));
    let mut rest = f.clone();
    let mut out = GradedElt::zero(target);
    while let Some((m, c)) = rest.terms().iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        if m[2..].iter().any(|e| *e > 0) || m[0] < m[1] {
            return None;
        }
        let (i, j) = (m[0] - m[1], m[1]);
        rest = &rest - &(&e1.pow(i) * &e2.pow(j)).scale(&c);
        out = &out + &(&t1.pow(i) * &t2.pow(j)).scale(&c);
    }
    Some(out)
}

/// `(c1, c2)` of `Sym^n S` for the rank-2 bundle `S` on a surface, in [`surface_base_ring`].
pub fn sym_power_chern(n: u32) -> (GradedElt, GradedElt) {
    let r = root_ring();
    let a = GradedElt::gen(&r, "alpha");
    let b = GradedElt::gen(&r, "beta");
    let roots: Vec<GradedElt> = (0..=n)
        .map(|j| &a.scale(&qi(j as i64)) + &b.scale(&qi((n - j) as i64)))
        .collect();
    let e = RootBundle::from_roots(&r, &roots);
    let base = surface_base_ring();
    let c1 = elementary_from_symmetric(&e.chern_class(1), &base).expect("symmetric in the roots");
    let c2 = elementary_from_symmetric(&e.chern_class(2), &base).expect("symmetric in the roots");
    (c1, c2)
}

/// `pi_*(zeta^(n+j))` for the projectivization of `Sym^n S`: the Segre class `s_j`.
pub fn segre_pushforward(n: u32, j: u32) -> GradedElt {
    let base = surface_base_ring();
    let (c1, c2) = sym_power_chern(n);
    let total = &(&GradedElt::one(&base) + &c1) + &c2;
    total.inverse().expect("unit constant term").component(2 * j)
}
