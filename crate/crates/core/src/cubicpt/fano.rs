use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use super::pairing::PairingPoly;
use crate::cherncalc::{elementary_from_symmetric, GradedElt, GradedPolyRing, RootBundle};
use crate::exact::{qi, solve, LinearSolution, Matrix, Rational};

/// `Q[c1, c2]` of the rank-2 tautological bundle on `G(2,5)`, real dimension 12.
fn grassmannian_ring() -> Arc<GradedPolyRing> {
    static RING: OnceLock<Arc<GradedPolyRing>> = OnceLock::new();
    RING.get_or_init(|| Arc::new(GradedPolyRing::new(&[("c1", 2), ("c2", 4)]).with_degree_cap(12)))
        .clone()
}

/// `[F] = c_4(Sym³ S^*)` via the roots `-aα - (3-a)β`.
pub fn fano_class_in_grassmannian() -> GradedElt {
    let roots_ring = Arc::new(GradedPolyRing::new(&[("alpha", 2), ("beta", 2)]).with_degree_cap(8));
    let a = GradedElt::gen(&roots_ring, "alpha");
    let b = GradedElt::gen(&roots_ring, "beta");
    let roots: Vec<GradedElt> = (0..=3).map(|i| -(&a.scale(&qi(i)) + &b.scale(&qi(3 - i)))).collect();
    let c4 = RootBundle::from_roots(&roots_ring, &roots).chern_class(4);
    elementary_from_symmetric(&c4, &grassmannian_ring()).expect("symmetric in the roots")
}

/// Integrals on the Fano surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoIntegrals {
    pub c1_squared: Rational,
    pub c2: Rational,
    /// `∫_G c1^a c2^b` for `a + 2b = 6`, keyed by `b`.
    pub top_monomials: [Rational; 4],
}

/// Solves for the top-degree integrals on `G(2,5)` from `c_4(Q) = c_5(Q) = 0` and
/// `∫ c2³ = 1`, then caps with `[F]`.
pub fn derive_fano_integrals() -> FanoIntegrals {
    let r = grassmannian_ring();
    let c1 = GradedElt::gen(&r, "c1");
    let c2 = GradedElt::gen(&r, "c2");
    let c_s = &(&GradedElt::one(&r) + &c1) + &c2;
    let c_q = c_s.inverse().expect("unit constant term");
    let (c4q, c5q) = (c_q.component(8), c_q.component(10));
    // unknowns x_b = ∫ c1^{6-2b} c2^b
    let column = |m: &[u32]| m[1] as usize;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs = Vec::new();
    for rel in [&c4q * &c1.pow(2), &c4q * &c2, &c5q * &c1] {
        let mut row = vec![Rational::zero(); 4];
        for (m, c) in rel.terms() {
            row[column(m)] += c;
        }
        rows.push(row);
        rhs.push(Rational::zero());
    }
    rows.push(vec![qi(0), qi(0), qi(0), qi(1)]);
    rhs.push(Rational::one());
    let x = match solve(&Matrix::from_rows(rows), &rhs) {
        LinearSolution::Unique(x) => x,
        other => panic!("Grassmannian relations do not pin the integrals: {other:?}"),
    };
    let integrate = |e: &GradedElt| {
        e.component(12).terms().iter().map(|(m, c)| c * &x[column(m)]).fold(Rational::zero(), |a, b| a + b)
    };
    let f = fano_class_in_grassmannian();
    FanoIntegrals {
        c1_squared: integrate(&(&f * &c1.pow(2))),
        c2: integrate(&(&f * &c2)),
        top_monomials: [x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone()],
    }
}

/// Integration on the Fano surface of products of `c1`, `c2` and the odd classes
/// `φ(g_i)`.
#[derive(Clone, Debug)]
pub struct FanoModel {
    pub integrals: FanoIntegrals,
}

impl Default for FanoModel {
    fn default() -> Self {
        Self::new()
    }
}

impl FanoModel {
    pub fn new() -> Self {
        let integrals = derive_fano_integrals();
        assert_eq!(integrals.c1_squared, qi(45));
        assert_eq!(integrals.c2, qi(27));
        FanoModel { integrals }
    }

    /// `∫ c1^a c2^b φ_{odd[0]} ... φ_{odd[r-1]}` with `odd` strictly increasing.
    ///
    /// Returns `None` when the odd product is outside the two known rules:
    /// `∫ c1 φ_i φ_j = 6 P(i,j)` and the four-point formula.
    pub fn integrate(&self, a: u32, b: u32, odd: &[u32]) -> Option<PairingPoly> {
        let degree = 2 * a + 4 * b + odd.len() as u32;
        if degree != 4 {
            return Some(PairingPoly::zero());
        }
        let p = PairingPoly::pair;
        match (a, b, odd) {
            (2, 0, []) => Some(PairingPoly::constant(self.integrals.c1_squared.clone())),
            (0, 1, []) => Some(PairingPoly::constant(self.integrals.c2.clone())),
            (1, 0, [i, j]) => Some(p(*i, *j).scale(&qi(6))),
            (0, 0, [i, j, k, l]) => {
                let s = &(&(&p(*i, *j) * &p(*k, *l)) + &(&p(*i, *l) * &p(*j, *k))) + &(&p(*i, *k) * &p(*l, *j));
                Some(s)
            }
            _ => None,
        }
    }
}
