//! Invariants checked on random inputs.

use std::sync::Arc;

use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptvir::cli::{format_surface_spec, parse_surface_spec};
use ptvir::cohmodel::{CohClass, CohModel};
use ptvir::cubicpt::cubic_model;
use ptvir::descalg::{DescExpr, Gen, OperatorPreset};
use ptvir::exact::{functional_equation_residual, q, qi, reconstruct_rational, Poly, RatFn};
use ptvir::hilbsurf::{hilb_descendent, load_surface, random_surface_spec, HilbClass};

fn random_class(rng: &mut ChaCha8Rng, m: &CohModel) -> CohClass {
    CohClass::from_coords((0..m.len()).map(|i| (i, qi(rng.random_range(-2..=2)))))
}

/// A random sum of up to three monomials of length up to three.
fn random_expr(rng: &mut ChaCha8Rng, m: &CohModel) -> DescExpr {
    let mut out = DescExpr::zero();
    for _ in 0..rng.random_range(1..=3) {
        let mut term = DescExpr::scalar(q(rng.random_range(-3..=3), rng.random_range(1..=3)));
        for _ in 0..rng.random_range(0..=3) {
            term = &term * &DescExpr::gen(Gen::new(m, rng.random_range(0..=5), rng.random_range(0..m.len())));
        }
        out = &out + &term;
    }
    out
}

fn surface(seed: u64) -> Arc<CohModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Arc::new(load_surface(&random_surface_spec(&mut rng, "s")).unwrap())
}

fn homogeneous_monomial(rng: &mut ChaCha8Rng, m: &CohModel) -> DescExpr {
    let classes: Vec<usize> = (0..m.len()).collect();
    let mut e = DescExpr::one();
    for _ in 0..rng.random_range(0..=3) {
        e = &e * &DescExpr::gen(Gen::new(m, rng.random_range(0..=5), *classes.choose(rng).unwrap()));
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rk_is_a_derivation(seed in any::<u64>(), k in -1i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = cubic_model();
        let p = OperatorPreset::threefold(m.clone());
        let (a, b) = (random_expr(&mut rng, &m), random_expr(&mut rng, &m));
        let lhs = p.apply_rk(&(&a * &b), k).unwrap();
        let rhs = &(&p.apply_rk(&a, k).unwrap() * &b) + &(&a * &p.apply_rk(&b, k).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lk_shifts_degree_by_2k(seed in any::<u64>(), k in -1i64..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = cubic_model();
        let p = OperatorPreset::threefold(m.clone());
        let d = homogeneous_monomial(&mut rng, &m);
        prop_assume!(!d.is_zero());
        let l = p.apply_lk(&d, k).unwrap();
        if !l.is_zero() {
            prop_assert_eq!(l.degree(&m, 3), Some(d.degree(&m, 3).unwrap() + 2 * k));
        }
        let s = surface(seed);
        let ps = OperatorPreset::surface(s.clone());
        let d = homogeneous_monomial(&mut rng, &s);
        let l = ps.apply_lk(&d, k).unwrap();
        if !l.is_zero() {
            prop_assert_eq!(l.degree(&s, 2), Some(d.degree(&s, 2).unwrap() + 2 * k));
        }
    }

    #[test]
    fn surface_rings_are_commutative_and_associative(seed in any::<u64>()) {
        let m = surface(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let (a, b, c) = (random_class(&mut rng, &m), random_class(&mut rng, &m), random_class(&mut rng, &m));
        prop_assert_eq!(m.mul(&a, &b), m.mul(&b, &a));
        prop_assert_eq!(m.mul(&m.mul(&a, &b), &c), m.mul(&a, &m.mul(&b, &c)));
        prop_assert_eq!(m.mul(m.unit(), &a), a);
    }

    #[test]
    fn diagonal_contracts_to_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for m in [cubic_model(), surface(seed)] {
            let b = random_class(&mut rng, &m);
            let mut back = CohClass::zero();
            for t in m.kunneth_diagonal() {
                let w = m.integrate(&m.mul(&CohClass::basis(t.right), &b));
                back = &back + &CohClass::scaled_basis(t.left, &t.coeff * w);
            }
            prop_assert_eq!(back, b);
        }
    }

    #[test]
    fn reconstruction_roundtrip(num in prop::collection::vec(-9i64..=9, 1..=4), den in prop::collection::vec(-3i64..=3, 0..=3)) {
        let mut d = vec![1];
        d.extend(den);
        let f = RatFn::new(Poly::from_ints(&num), Poly::from_ints(&d));
        let (a, b) = (num.len() - 1, d.len() - 1);
        let s = f.series((a + b + 4) as i64);
        let rec = reconstruct_rational(&s, a, b).unwrap();
        prop_assert_eq!(rec.function, f);
    }

    #[test]
    fn functional_equation_of_palindromic_numerators(c in prop::collection::vec(-5i64..=5, 1..=3), power in 0usize..=3, odd in any::<bool>()) {
        // f = q P(q) / (1+q)^p with P (anti)palindromic of degree e has f(1/q) = ±q^{p-2-e} f(q)
        let sign = if odd { -1 } else { 1 };
        let mut pal = c.clone();
        pal.extend(c.iter().rev().skip(1).map(|x| sign * x));
        if odd && pal.len() % 2 == 1 {
            let mid = pal.len() / 2;
            pal[mid] = 0;
        }
        let e = (pal.len() - 1) as i64;
        let mut num = vec![0];
        num.extend(pal);
        let mut den = Poly::one();
        for _ in 0..power {
            den = &den * &Poly::from_ints(&[1, 1]);
        }
        let f = RatFn::new(Poly::from_ints(&num), den);
        prop_assume!(!f.is_zero());
        let d_beta = e + 2 - power as i64;
        let parity = if odd { 1 } else { 0 };
        prop_assert!(functional_equation_residual(&f, parity, d_beta).is_zero());
        prop_assert!(!functional_equation_residual(&f, parity + 1, d_beta).is_zero());
    }

    #[test]
    fn hilb_descendents_shift_hodge_type(seed in any::<u64>(), k in 2u32..=6) {
        let m = surface(seed);
        for i in 0..m.len() {
            let b = m.class(i);
            let HilbClass::Surface(x) = hilb_descendent(&m, 1, k, &CohClass::basis(i)) else { unreachable!() };
            for (j, c) in x.iter() {
                prop_assert!(!c.is_zero());
                let t = m.class(j);
                prop_assert_eq!((t.p, t.q), (b.p + k - 2, b.q + k - 2));
            }
        }
    }

    #[test]
    fn spec_files_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_surface_spec(&mut rng, "roundtrip");
        prop_assert_eq!(parse_surface_spec(&format_surface_spec(&s)).unwrap(), s);
    }
}
