//! Descendents on Hilbert schemes of at most one point of a surface with `H¹ = 0`.
//!
//! `S^[0]` is a point and `S^[1] = S`. On `S^[1]` the universal subscheme is the
//! diagonal, so GRR gives `ch_k(γ) = [td(S)^{-1}]_{k-2} · γ` for `k ≥ 2`.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::cherncalc::{surface_base_ring, GradedElt, RootBundle};
use crate::cohmodel::{build_model, hrr_report, BasisClass, CohClass, CohModel, ModelSpec, ValidationError};
use crate::descalg::{DescError, DescExpr, Gen, OperatorPreset};
use crate::exact::{qi, Matrix, Rational};

/// Numerical data of a surface with `H¹ = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub name: String,
    pub h20: usize,
    pub h11: usize,
    /// `c1` in the `H^{1,1}` basis.
    pub c1: Vec<Rational>,
    /// `∫ h_i h_j`.
    pub intersection: Matrix,
    /// `∫ u_i v_j` between the `H^{2,0}` and `H^{0,2}` bases.
    pub pairing20_02: Matrix,
    pub c1sq: Rational,
    pub c2: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("malformed surface data: {0}")]
    Shape(String),
    #[error("{identity} fails: {lhs} != {rhs}")]
    Identity { identity: String, lhs: Rational, rhs: Rational },
    #[error(transparent)]
    Model(#[from] ValidationError),
}

fn check(identity: &str, lhs: Rational, rhs: Rational) -> Result<(), SurfaceError> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(SurfaceError::Identity { identity: identity.into(), lhs, rhs })
    }
}

/// Builds `H*(S)` with basis `1, h1.., u1.., v1.., p` and validates it.
pub fn load_surface(spec: &SurfaceSpec) -> Result<CohModel, SurfaceError> {
    let (h20, h11) = (spec.h20, spec.h11);
    if spec.c1.len() != h11 {
        return Err(SurfaceError::Shape(format!("c1 has {} entries, h11 = {h11}", spec.c1.len())));
    }
    if spec.intersection.rows() != h11 || spec.intersection.cols() != h11 {
        return Err(SurfaceError::Shape(format!("intersection must be {h11}x{h11}")));
    }
    if spec.pairing20_02.rows() != h20 || spec.pairing20_02.cols() != h20 {
        return Err(SurfaceError::Shape(format!("pairing20_02 must be {h20}x{h20}")));
    }
    if !spec.intersection.is_symmetric() {
        return Err(SurfaceError::Shape("intersection matrix is not symmetric".into()));
    }
    let quad = (0..h11)
        .flat_map(|i| (0..h11).map(move |j| (i, j)))
        .map(|(i, j)| &spec.c1[i] * &spec.c1[j] * &spec.intersection[(i, j)])
        .fold(Rational::zero(), |a, b| a + b);
    check("c1 squared against the intersection form", quad, spec.c1sq.clone())?;
    check("(c1^2 + c2)/12 = 1 + h20", (&spec.c1sq + &spec.c2) / qi(12), qi(1 + h20 as i64))?;
    check("(5 c2 - c1^2)/6 = h11", (qi(5) * &spec.c2 - &spec.c1sq) / qi(6), qi(h11 as i64))?;

    let h = |i: usize| 1 + i;
    let u = |j: usize| 1 + h11 + j;
    let v = |j: usize| 1 + h11 + h20 + j;
    let pt = 1 + h11 + 2 * h20;
    let mut basis = vec![BasisClass::new("1", 0, 0)];
    basis.extend((1..=h11).map(|i| BasisClass::new(&format!("h{i}"), 1, 1)));
    basis.extend((1..=h20).map(|i| BasisClass::new(&format!("u{i}"), 2, 0)));
    basis.extend((1..=h20).map(|i| BasisClass::new(&format!("v{i}"), 0, 2)));
    basis.push(BasisClass::new("p", 2, 2));
    let mut products = Vec::new();
    for i in 0..h11 {
        for j in 0..h11 {
            products.push((h(i), h(j), CohClass::scaled_basis(pt, spec.intersection[(i, j)].clone())));
        }
    }
    for i in 0..h20 {
        for j in 0..h20 {
            let c = CohClass::scaled_basis(pt, spec.pairing20_02[(i, j)].clone());
            products.push((u(i), v(j), c.clone()));
            products.push((v(j), u(i), c));
        }
    }
    let mut integrals = vec![qi(0); basis.len()];
    integrals[pt] = qi(1);
    let c1 = CohClass::from_coords(spec.c1.iter().enumerate().map(|(i, c)| (h(i), c.clone())));
    let mut aliases = vec![("pt".to_string(), CohClass::basis(pt))];
    if h11 > 0 {
        aliases.push(("h".into(), CohClass::basis(h(0))));
    }
    if h20 > 0 {
        aliases.push(("u".into(), CohClass::basis(u(0))));
        aliases.push(("v".into(), CohClass::basis(v(0))));
    }
    let model = build_model(ModelSpec {
        name: spec.name.clone(),
        dim: 2,
        basis,
        unit: CohClass::basis(0),
        products,
        integrals,
        chern: vec![c1, CohClass::scaled_basis(pt, spec.c2.clone())],
        point: CohClass::basis(pt),
        aliases,
    })?;
    for c in hrr_report(&model).checks {
        check(&c.name, c.lhs, c.rhs)?;
    }
    Ok(model)
}

/// A descendent realized on `S^[0]` (a number) or `S^[1]` (a class on `S`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HilbClass {
    Point(Rational),
    Surface(CohClass),
}

/// `td(S)^{-1}` as a class on the model.
pub fn inverse_todd(m: &CohModel) -> CohClass {
    static UNIVERSAL: OnceLock<GradedElt> = OnceLock::new();
    let inv = UNIVERSAL.get_or_init(|| {
        let base = surface_base_ring();
        let bundle = RootBundle::from_chern(&base, 2, vec![GradedElt::gen(&base, "c1"), GradedElt::gen(&base, "c2")]);
        bundle.todd(2).inverse().expect("Todd class is invertible")
    });
    let (c1, c2) = (m.chern(1), m.chern(2));
    let mut out = CohClass::zero();
    for (mono, c) in inv.terms() {
        let mut x = m.unit().clone();
        for _ in 0..mono[0] {
            x = m.mul(&x, &c1);
        }
        for _ in 0..mono[1] {
            x = m.mul(&x, &c2);
        }
        out = &out + &x.scale(c);
    }
    out
}

/// `ch_k(γ)` on `S^[n]` for `n ∈ {0, 1}`.
pub fn hilb_descendent(m: &CohModel, n: u32, k: u32, gamma: &CohClass) -> HilbClass {
    assert!(n <= 1, "only S^[0] and S^[1] are realized");
    let structure = -m.integrate(gamma);
    if n == 0 {
        return HilbClass::Point(if k == 0 { structure } else { Rational::zero() });
    }
    let class = match k {
        0 => m.unit().scale(&structure),
        1 => CohClass::zero(),
        _ => m.mul(&m.component(&inverse_todd(m), 2 * (k - 2)), gamma),
    };
    HilbClass::Surface(class)
}

/// `D` realized on `S^[n]` for `n ∈ {0, 1}`; realization is multiplicative there.
pub fn realize_hilb(n: u32, d: &DescExpr, m: &CohModel) -> HilbClass {
    realize_with(n, d, m, &inverse_todd(m))
}

fn realize_with(n: u32, d: &DescExpr, m: &CohModel, td_inv: &CohClass) -> HilbClass {
    let mut cache: BTreeMap<(u32, usize), HilbClass> = BTreeMap::new();
    let mut realize = |g: &Gen| -> HilbClass {
        cache
            .entry((g.k, g.class))
            .or_insert_with(|| {
                let gamma = CohClass::basis(g.class);
                if n == 1 && g.k >= 2 {
                    // reuse the Todd class across generators
                    return HilbClass::Surface(m.mul(&m.component(td_inv, 2 * (g.k - 2)), &gamma));
                }
                hilb_descendent(m, n, g.k, &gamma)
            })
            .clone()
    };
    if n == 0 {
        let mut total = Rational::zero();
        for (mono, c) in d.terms() {
            total += mono.iter().fold(c.clone(), |acc, g| match realize(g) {
                HilbClass::Point(x) => acc * x,
                HilbClass::Surface(_) => unreachable!(),
            });
        }
        return HilbClass::Point(total);
    }
    let mut total = CohClass::zero();
    for (mono, c) in d.terms() {
        let mut x = m.unit().scale(c);
        for g in mono {
            let HilbClass::Surface(y) = realize(g) else { unreachable!() };
            x = m.mul(&x, &y);
            if x.is_zero() {
                break;
            }
        }
        total = &total + &x;
    }
    HilbClass::Surface(total)
}

fn integrate_hilb(x: &HilbClass, m: &CohModel) -> Rational {
    match x {
        HilbClass::Point(v) => v.clone(),
        HilbClass::Surface(c) => m.integrate(c),
    }
}

/// `∫_{S^[n]} D` for `n ∈ {0, 1}`.
pub fn bracket_hilb(n: u32, d: &DescExpr, m: &CohModel) -> Rational {
    integrate_hilb(&realize_hilb(n, d, m), m)
}

/// `Σ_{n_1 + ... = n} ∏ ⟨D_i⟩_{n_i}` with each `n_i ∈ {0, 1}`.
pub fn disconnected_bracket(parts: &[(&CohModel, &DescExpr)], n: u32) -> Rational {
    let mut total = Rational::zero();
    let count = parts.len();
    for mask in 0u32..(1 << count) {
        if mask.count_ones() != n {
            continue;
        }
        let mut prod = Rational::one();
        for (i, (m, d)) in parts.iter().enumerate() {
            prod *= bracket_hilb((mask >> i) & 1, d, m);
            if prod.is_zero() {
                break;
            }
        }
        total += prod;
    }
    total
}

/// Moves an expression on one component into the basis of a disjoint union, where that
/// component's classes start at `offset`.
pub fn embed_in_union(d: &DescExpr, offset: usize) -> DescExpr {
    let mut out = DescExpr::zero();
    for (mono, c) in d.terms() {
        let w = mono.iter().map(|g| Gen { class: g.class + offset, ..g.clone() }).collect();
        out.add_word(w, c.clone());
    }
    out
}

/// `∫_{S^[n]} L_k D` with the surface operators.
pub fn virasoro_residual_surface(k: i64, d: &DescExpr, n: u32, m: &Arc<CohModel>) -> Result<Rational, DescError> {
    SurfaceResidual::new(m.clone()).residual(k, d, n)
}

/// Evaluates `∫_{S^[n]} L_k D` for many `D` on one surface.
///
/// The `T_k` part is realized once per `(k, n)` and multiplied with the realized `D`
/// rather than expanded as a product of descendents.
pub struct SurfaceResidual {
    preset: OperatorPreset,
    td_inv: CohClass,
    realized_t: Mutex<BTreeMap<(i64, u32), HilbClass>>,
}

impl SurfaceResidual {
    pub fn new(m: Arc<CohModel>) -> Self {
        SurfaceResidual { td_inv: inverse_todd(&m), preset: OperatorPreset::surface(m), realized_t: Mutex::default() }
    }

    pub fn preset(&self) -> &OperatorPreset {
        &self.preset
    }

    pub fn residual(&self, k: i64, d: &DescExpr, n: u32) -> Result<Rational, DescError> {
        let m = self.preset.model();
        let rs = &self.preset.apply_rk(d, k)? + &self.preset.apply_sk(d, k)?;
        let cached = self.realized_t.lock().expect("cache lock").get(&(k, n)).cloned();
        let t = match cached {
            Some(t) => t,
            None => {
                let t = realize_with(n, &self.preset.tk_element(k)?, m, &self.td_inv);
                self.realized_t.lock().expect("cache lock").insert((k, n), t.clone());
                t
            }
        };
        let t_times_d = match (t, realize_with(n, d, m, &self.td_inv)) {
            (HilbClass::Point(a), HilbClass::Point(b)) => HilbClass::Point(a * b),
            (HilbClass::Surface(a), HilbClass::Surface(b)) => HilbClass::Surface(m.mul(&a, &b)),
            _ => unreachable!("both realized at the same n"),
        };
        Ok(integrate_hilb(&realize_with(n, &rs, m, &self.td_inv), m) + integrate_hilb(&t_times_d, m))
    }
}

fn random_invertible<R: Rng>(rng: &mut R, size: usize, symmetric: bool) -> Matrix {
    loop {
        let mut a = Matrix::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                if symmetric && j < i {
                    a[(i, j)] = a[(j, i)].clone();
                } else {
                    a[(i, j)] = qi(rng.random_range(-3..=3));
                }
            }
        }
        if size == 0 || !a.determinant().is_zero() {
            return a;
        }
    }
}

/// A random surface spec satisfying both HRR constraints by construction:
/// `c2 = 2 + 2 h20 + h11` and `c1² = 10 + 10 h20 - h11`.
pub fn random_surface_spec<R: Rng>(rng: &mut R, name: &str) -> SurfaceSpec {
    loop {
        let h20 = rng.random_range(0..=2usize);
        let h11 = rng.random_range(1..=4usize);
        let c2 = qi((2 + 2 * h20 + h11) as i64);
        let c1sq = qi(10 + 10 * h20 as i64 - h11 as i64);
        let mut c1: Vec<Rational> = (0..h11).map(|_| qi(rng.random_range(-3..=3))).collect();
        if c1[0].is_zero() {
            c1[0] = qi(1);
        }
        let mut q = random_invertible(rng, h11, true);
        // fix ∫h1² so that c1·c1 matches c1sq
        let rest = (0..h11)
            .flat_map(|i| (0..h11).map(move |j| (i, j)))
            .filter(|&(i, j)| (i, j) != (0, 0))
            .map(|(i, j)| &c1[i] * &c1[j] * &q[(i, j)])
            .fold(Rational::zero(), |a, b| a + b);
        q[(0, 0)] = (&c1sq - rest) / (&c1[0] * &c1[0]);
        if q.determinant().is_zero() {
            continue;
        }
        return SurfaceSpec {
            name: name.to_string(),
            h20,
            h11,
            c1,
            intersection: q,
            pairing20_02: random_invertible(rng, h20, false),
            c1sq,
            c2,
        };
    }
}

/// Projective plane data.
pub fn plane_spec() -> SurfaceSpec {
    SurfaceSpec {
        name: "plane".into(),
        h20: 0,
        h11: 1,
        c1: vec![qi(3)],
        intersection: Matrix::from_rows(vec![vec![qi(1)]]),
        pairing20_02: Matrix::zeros(0, 0),
        c1sq: qi(9),
        c2: qi(3),
    }
}

/// A K3-like surface: `h20 = 1`, `h11 = 20`, `c1 = 0`, `c2 = 24`, intersection form
/// `diag(1, -1, ..., -1)` (only the determinant matters here).
pub fn k3_spec() -> SurfaceSpec {
    let mut q = Matrix::zeros(20, 20);
    for i in 0..20 {
        q[(i, i)] = if i == 0 { qi(1) } else { qi(-1) };
    }
    SurfaceSpec {
        name: "k3".into(),
        h20: 1,
        h11: 20,
        c1: vec![qi(0); 20],
        intersection: q,
        pairing20_02: Matrix::from_rows(vec![vec![qi(1)]]),
        c1sq: qi(0),
        c2: qi(24),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ch(m: &CohModel, k: u32, name: &str) -> DescExpr {
        DescExpr::ch(m, k, &m.resolve(name).unwrap())
    }

    #[test]
    fn plane_and_k3_load() {
        let p = load_surface(&plane_spec()).unwrap();
        assert_eq!(p.integrate(&p.mul(&p.chern(1), &p.chern(1))), qi(9));
        load_surface(&k3_spec()).unwrap();
        let mut bad = k3_spec();
        bad.c2 = qi(25);
        assert!(matches!(load_surface(&bad), Err(SurfaceError::Identity { .. })));
    }

    #[test]
    fn inverse_todd_by_hand() {
        let m = load_surface(&plane_spec()).unwrap();
        // 1 - c1/2 + (2c1² - c2)/12 = 1 - 3h/2 + (18 - 3)/12 p
        let want = CohClass::from_coords([(0, qi(1)), (1, q(-3, 2)), (2, q(5, 4))]);
        assert_eq!(inverse_todd(&m), want);
    }

    #[test]
    fn realizations() {
        let m = load_surface(&k3_spec()).unwrap();
        let u = m.resolve("u").unwrap();
        assert_eq!(hilb_descendent(&m, 1, 2, &u), HilbClass::Surface(u.clone()));
        assert_eq!(hilb_descendent(&m, 1, 3, &u), HilbClass::Surface(CohClass::zero()));
        assert_eq!(hilb_descendent(&m, 0, 0, m.point()), HilbClass::Point(qi(-1)));
        assert_eq!(bracket_hilb(1, &ch(&m, 2, "pt"), &m), qi(1));
        assert_eq!(bracket_hilb(0, &DescExpr::one(), &m), qi(1));
        // ch_3(1) ch_2(pt): [td^{-1}]_1 · pt = 0, so only degree counts; ch_4(1) = (2c1² - c2)/12
        assert_eq!(bracket_hilb(1, &ch(&m, 4, "1"), &m), q(-24, 12));
    }

    #[test]
    fn virasoro_instances() {
        for spec in [plane_spec(), k3_spec()] {
            let m = Arc::new(load_surface(&spec).unwrap());
            assert_eq!(virasoro_residual_surface(0, &DescExpr::one(), 1, &m).unwrap(), qi(0));
            assert_eq!(virasoro_residual_surface(1, &ch(&m, 3, "1"), 1, &m).unwrap(), qi(0));
            assert_eq!(virasoro_residual_surface(2, &DescExpr::one(), 1, &m).unwrap(), qi(0));
        }
    }

    #[test]
    fn factored_residual_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = Arc::new(load_surface(&random_surface_spec(&mut rng, "r")).unwrap());
        let eval = SurfaceResidual::new(m.clone());
        let preset = eval.preset();
        let d = &ch(&m, 3, "h") * &ch(&m, 4, "1");
        for k in -1..=2 {
            for n in 0..=1 {
                let direct = bracket_hilb(n, &preset.apply_lk(&d, k).unwrap(), &m);
                assert_eq!(eval.residual(k, &d, n).unwrap(), direct);
            }
        }
    }

    #[test]
    fn random_specs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..20 {
            let s = random_surface_spec(&mut rng, &format!("s{i}"));
            load_surface(&s).unwrap();
        }
    }

    #[test]
    fn disconnected_distribution() {
        let s = load_surface(&plane_spec()).unwrap();
        let e = load_surface(&k3_spec()).unwrap();
        let d1 = ch(&s, 4, "1");
        let d2 = DescExpr::one();
        // ⟨1⟩_1 = 0 by dimension
        let v = disconnected_bracket(&[(&s, &d1), (&e, &d2)], 1);
        assert_eq!(v, bracket_hilb(1, &d1, &s));
        let union = s.disjoint_union(&e, "union").unwrap();
        let d = &embed_in_union(&d1, 0) * &embed_in_union(&ch(&e, 2, "pt"), s.len());
        let direct = bracket_hilb(1, &d, &union);
        let split = disconnected_bracket(&[(&s, &d1), (&e, &ch(&e, 2, "pt"))], 1);
        assert_eq!(direct, split);
    }
}
