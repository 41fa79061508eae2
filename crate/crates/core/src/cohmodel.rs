//! Finite bigraded supercommutative cohomology rings with integration.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{invert, q, qi, Matrix, Rational};

/// A basis element with real degree and Hodge type `(p, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisClass {
    pub name: String,
    pub degree: u32,
    pub p: u32,
    pub q: u32,
}

impl BasisClass {
    pub fn new(name: &str, p: u32, q: u32) -> Self {
        BasisClass { name: name.to_string(), degree: p + q, p, q }
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

/// Sparse linear combination of basis classes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CohClass {
    coords: BTreeMap<usize, Rational>,
}

impl CohClass {
    pub fn zero() -> Self {
        CohClass::default()
    }

    pub fn basis(i: usize) -> Self {
        Self::scaled_basis(i, Rational::one())
    }

    pub fn scaled_basis(i: usize, c: Rational) -> Self {
        let mut coords = BTreeMap::new();
        if !c.is_zero() {
            coords.insert(i, c);
        }
        CohClass { coords }
    }

    pub fn from_coords<I: IntoIterator<Item = (usize, Rational)>>(it: I) -> Self {
        let mut out = CohClass::zero();
        for (i, c) in it {
            out.add_term(i, &c);
        }
        out
    }

    fn add_term(&mut self, i: usize, c: &Rational) {
        let slot = self.coords.entry(i).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coords.remove(&i);
        }
    }

    pub fn coord(&self, i: usize) -> Rational {
        self.coords.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coords.iter().map(|(i, c)| (*i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        CohClass::from_coords(self.coords.iter().map(|(i, v)| (*i, v * c)))
    }
}

impl Add for &CohClass {
    type Output = CohClass;
    fn add(self, rhs: &CohClass) -> CohClass {
        let mut out = self.clone();
        for (i, c) in &rhs.coords {
            out.add_term(*i, c);
        }
        out
    }
}

impl Sub for &CohClass {
    type Output = CohClass;
    fn sub(self, rhs: &CohClass) -> CohClass {
        self + &(-rhs)
    }
}

impl Neg for &CohClass {
    type Output = CohClass;
    fn neg(self) -> CohClass {
        self.scale(&-Rational::one())
    }
}

/// One term `coeff * left ⊗ right` of a class on the product `M × M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KunnethTerm {
    pub left: usize,
    pub right: usize,
    pub coeff: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("{axiom} fails at ({left}, {right}): {detail}")]
    Axiom {
        axiom: Axiom,
        left: String,
        right: String,
        detail: String,
    },
    #[error("malformed model data: {0}")]
    Malformed(String),
}

impl ValidationError {
    pub fn axiom(&self) -> Option<Axiom> {
        match self {
            ValidationError::Axiom { axiom, .. } => Some(*axiom),
            ValidationError::Malformed(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Grading,
    Unit,
    Duality,
    Associativity,
    Supercommutativity,
    Chern,
    Hrr,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Grading => "grading",
            Axiom::Unit => "unit",
            Axiom::Duality => "duality",
            Axiom::Associativity => "associativity",
            Axiom::Supercommutativity => "supercommutativity",
            Axiom::Chern => "chern classes",
            Axiom::Hrr => "hrr",
        };
        f.write_str(s)
    }
}

/// Raw data for [`build_model`].
///
/// `products` lists `(i, j, e_i * e_j)`. When only one order of a pair is given the
/// other is filled in with the Koszul sign; products with the unit may be omitted.
#[derive(Clone, Debug, Default)]
pub struct ModelSpec {
    pub name: String,
    pub dim: u32,
    pub basis: Vec<BasisClass>,
    pub unit: CohClass,
    pub products: Vec<(usize, usize, CohClass)>,
    pub integrals: Vec<Rational>,
    /// `c_1, c_2, ...`
    pub chern: Vec<CohClass>,
    pub point: CohClass,
    /// Extra names accepted by the insertion parser, e.g. `H2 = 3 L`.
    pub aliases: Vec<(String, CohClass)>,
}

/// A validated cohomology model.
#[derive(Clone, Debug)]
pub struct CohModel {
    name: String,
    dim: u32,
    basis: Vec<BasisClass>,
    unit: CohClass,
    table: Vec<Vec<CohClass>>,
    integrals: Vec<Rational>,
    chern: Vec<CohClass>,
    point: CohClass,
    aliases: Vec<(String, CohClass)>,
    pairing_inverse: Matrix,
}

fn koszul(a: &BasisClass, b: &BasisClass) -> Rational {
    if a.is_odd() && b.is_odd() {
        -Rational::one()
    } else {
        Rational::one()
    }
}

pub fn build_model(spec: ModelSpec) -> Result<CohModel, ValidationError> {
    let n = spec.basis.len();
    let malformed = |s: String| Err(ValidationError::Malformed(s));
    if spec.integrals.len() != n {
        return malformed(format!("{} integrals for {} basis classes", spec.integrals.len(), n));
    }
    let fail = |axiom, i: usize, j: usize, detail: String| {
        Err(ValidationError::Axiom {
            axiom,
            left: spec.basis[i].name.clone(),
            right: spec.basis[j].name.clone(),
            detail,
        })
    };
    for (i, b) in spec.basis.iter().enumerate() {
        if b.degree != b.p + b.q || b.degree > 2 * spec.dim {
            return fail(Axiom::Grading, i, i, "inconsistent Hodge type".into());
        }
        if !spec.integrals[i].is_zero() && b.degree != 2 * spec.dim {
            return fail(Axiom::Grading, i, i, "integral outside top degree".into());
        }
    }

    let mut table: Vec<Vec<Option<CohClass>>> = vec![vec![None; n]; n];
    for (i, j, c) in &spec.products {
        if *i >= n || *j >= n || c.iter().any(|(k, _)| k >= n) {
            return malformed(format!("product ({i}, {j}) references an unknown class"));
        }
        if table[*i][*j].is_some() {
            return malformed(format!("product ({i}, {j}) given twice"));
        }
        table[*i][*j] = Some(c.clone());
    }
    // unit products
    let unit_basis = match spec.unit.iter().collect::<Vec<_>>().as_slice() {
        [(u, c)] if c.is_one() => Some(*u),
        _ => None,
    };
    if let Some(u) = unit_basis {
        for k in 0..n {
            for (a, b) in [(u, k), (k, u)] {
                if table[a][b].is_none() {
                    table[a][b] = Some(CohClass::basis(k));
                }
            }
        }
    }
    // Koszul completion
    for i in 0..n {
        for j in 0..n {
            if table[i][j].is_none() {
                if let Some(c) = table[j][i].clone() {
                    table[i][j] = Some(c.scale(&koszul(&spec.basis[i], &spec.basis[j])));
                }
            }
        }
    }
    let table: Vec<Vec<CohClass>> = table
        .into_iter()
        .map(|row| row.into_iter().map(Option::unwrap_or_default).collect())
        .collect();

    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&spec.basis[i], &spec.basis[j]);
            for (k, _) in table[i][j].iter() {
                let c = &spec.basis[k];
                if c.p != a.p + b.p || c.q != a.q + b.q {
                    return fail(Axiom::Grading, i, j, format!("product has a {} component", c.name));
                }
            }
        }
    }

    let mut model = CohModel {
        name: spec.name.clone(),
        dim: spec.dim,
        basis: spec.basis.clone(),
        unit: spec.unit.clone(),
        table,
        integrals: spec.integrals.clone(),
        chern: spec.chern.clone(),
        point: spec.point.clone(),
        aliases: spec.aliases.clone(),
        pairing_inverse: Matrix::zeros(0, 0),
    };

    for k in 0..n {
        let e = CohClass::basis(k);
        if model.mul(&model.unit, &e) != e || model.mul(&e, &model.unit) != e {
            return fail(Axiom::Unit, k, k, "unit does not act as identity".into());
        }
    }

    let m = model.pairing_matrix();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&spec.basis[i], &spec.basis[j]);
            if m[(i, j)] != &koszul(a, b) * &m[(j, i)] {
                return fail(Axiom::Duality, i, j, "pairing is not graded symmetric".into());
            }
        }
    }
    let Some(inv) = invert(&m) else {
        return fail(Axiom::Duality, 0, n - 1, "intersection pairing is degenerate".into());
    };
    model.pairing_inverse = inv;

    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b, c) = (CohClass::basis(i), CohClass::basis(j), CohClass::basis(k));
                let left = model.mul(&model.mul(&a, &b), &c);
                let right = model.mul(&a, &model.mul(&b, &c));
                if left != right {
                    return fail(Axiom::Associativity, i, j, format!("with {}", spec.basis[k].name));
                }
            }
            let (a, b) = (&spec.basis[i], &spec.basis[j]);
            if model.table[i][j] != model.table[j][i].scale(&koszul(a, b)) {
                return fail(Axiom::Supercommutativity, i, j, "products disagree".into());
            }
        }
    }

    for (idx, c) in model.chern.iter().enumerate() {
        let want = 2 * (idx as u32 + 1);
        for (k, _) in c.iter() {
            let b = &model.basis[k];
            if b.p != b.q || b.degree != want {
                return fail(Axiom::Chern, k, k, format!("c{} has a component of type ({}, {})", idx + 1, b.p, b.q));
            }
        }
    }
    if model.integrate(&model.point) != Rational::one() {
        return malformed("point class does not integrate to 1".into());
    }
    Ok(model)
}

impl CohModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn basis(&self) -> &[BasisClass] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn class(&self, i: usize) -> &BasisClass {
        &self.basis[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    /// Looks a name up among basis classes, then aliases.
    pub fn resolve(&self, name: &str) -> Option<CohClass> {
        self.index_of(name)
            .map(CohClass::basis)
            .or_else(|| self.aliases.iter().find(|(n, _)| n == name).map(|(_, c)| c.clone()))
    }

    pub fn unit(&self) -> &CohClass {
        &self.unit
    }

    pub fn point(&self) -> &CohClass {
        &self.point
    }

    /// `c_i` for `i >= 1`; zero when not supplied.
    pub fn chern(&self, i: usize) -> CohClass {
        self.chern.get(i.wrapping_sub(1)).cloned().unwrap_or_default()
    }

    pub fn mul(&self, a: &CohClass, b: &CohClass) -> CohClass {
        let mut out = CohClass::zero();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                let xy = x * y;
                for (k, z) in self.table[i][j].iter() {
                    out.add_term(k, &(&xy * z));
                }
            }
        }
        out
    }

    pub fn integrate(&self, a: &CohClass) -> Rational {
        a.iter().fold(Rational::zero(), |acc, (i, c)| acc + c * &self.integrals[i])
    }

    /// `M_ij = ∫ e_i e_j`.
    pub fn pairing_matrix(&self) -> Matrix {
        let n = self.basis.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.integrate(&self.table[i][j]);
            }
        }
        m
    }

    /// Homogeneous part of real degree `d`.
    pub fn component(&self, a: &CohClass, d: u32) -> CohClass {
        CohClass::from_coords(a.iter().filter(|(i, _)| self.basis[*i].degree == d).map(|(i, c)| (i, c.clone())))
    }

    pub fn is_odd_class(&self, i: usize) -> bool {
        self.basis[i].is_odd()
    }

    /// Real degree of a homogeneous class; `None` for zero or mixed classes.
    pub fn degree_of(&self, a: &CohClass) -> Option<u32> {
        let mut ds = a.iter().map(|(i, _)| self.basis[i].degree);
        let d = ds.next()?;
        ds.all(|e| e == d).then_some(d)
    }

    /// Künneth decomposition of the diagonal: `Δ = Σ (M^{-1})_{ij} e_i ⊗ e_j`.
    pub fn kunneth_diagonal(&self) -> Vec<KunnethTerm> {
        let n = self.basis.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let c = &self.pairing_inverse[(i, j)];
                if !c.is_zero() {
                    out.push(KunnethTerm { left: i, right: j, coeff: c.clone() });
                }
            }
        }
        out
    }

    /// Künneth decomposition of `Δ_* x = (x ⊗ 1) · Δ`.
    pub fn diagonal_pushforward(&self, x: &CohClass) -> Vec<KunnethTerm> {
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for t in self.kunneth_diagonal() {
            let left = self.mul(x, &CohClass::basis(t.left));
            for (k, c) in left.iter() {
                let slot = acc.entry((k, t.right)).or_insert_with(Rational::zero);
                *slot += c * &t.coeff;
            }
        }
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((left, right), coeff)| KunnethTerm { left, right, coeff })
            .collect()
    }

    /// `Σ_{p^L = p} ∫ γ^L γ^R` over the diagonal.
    pub fn partial_trace(&self, p: u32) -> Rational {
        self.kunneth_diagonal()
            .iter()
            .filter(|t| self.basis[t.left].p == p)
            .map(|t| &t.coeff * self.integrate(&self.mul(&CohClass::basis(t.left), &CohClass::basis(t.right))))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Cohomology of the disjoint union: products across components vanish.
    pub fn disjoint_union(&self, other: &CohModel, name: &str) -> Result<CohModel, ValidationError> {
        assert_eq!(self.dim, other.dim, "components of different dimension");
        let off = self.basis.len();
        let shift = |c: &CohClass| CohClass::from_coords(c.iter().map(|(i, v)| (i + off, v.clone())));
        let mut basis = self.basis.clone();
        for b in &other.basis {
            let mut b = b.clone();
            b.name = format!("{}'", b.name);
            basis.push(b);
        }
        let mut products = Vec::new();
        for i in 0..off {
            for j in 0..off {
                products.push((i, j, self.table[i][j].clone()));
            }
        }
        for i in 0..other.basis.len() {
            for j in 0..other.basis.len() {
                products.push((i + off, j + off, shift(&other.table[i][j])));
            }
        }
        let nc = self.chern.len().max(other.chern.len());
        let chern = (1..=nc).map(|i| &self.chern(i) + &shift(&other.chern(i))).collect();
        let mut integrals = self.integrals.clone();
        integrals.extend(other.integrals.iter().cloned());
        build_model(ModelSpec {
            name: name.to_string(),
            dim: self.dim,
            basis,
            unit: &self.unit + &shift(&other.unit),
            products,
            integrals,
            chern,
            point: self.point.clone(),
            aliases: Vec::new(),
        })
    }

    /// Display name of a class, using basis names.
    pub fn format_class(&self, a: &CohClass) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (i, c)) in a.iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if n > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            if !mag.is_one() {
                s.push_str(&format!("{mag} "));
            }
            s.push_str(&self.basis[i].name);
        }
        s
    }
}

/// One identity checked by [`hrr_report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HrrCheck {
    pub name: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl HrrCheck {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HrrReport {
    pub checks: Vec<HrrCheck>,
}

impl HrrReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(HrrCheck::passed)
    }
}

/// Partial traces of the diagonal against Chern numbers.
///
/// Surfaces: `p^L = 0` and `p^L = 2` give `∫(c1² + c2)/12`, `p^L = 1` gives
/// `∫(5c2 − c1²)/6`. Three-folds: `p^L = 0` gives `∫c1c2/24`. Every model also checks
/// that the full trace is the Euler number `∫c_top`.
pub fn hrr_report(m: &CohModel) -> HrrReport {
    let mut checks = Vec::new();
    let c1 = m.chern(1);
    let c2 = m.chern(2);
    let c1c1 = m.integrate(&m.mul(&c1, &c1));
    match m.dim() {
        2 => {
            let noether = (&c1c1 + m.integrate(&c2)) / qi(12);
            checks.push(HrrCheck { name: "trace p=0".into(), lhs: m.partial_trace(0), rhs: noether.clone() });
            checks.push(HrrCheck {
                name: "trace p=1".into(),
                lhs: m.partial_trace(1),
                rhs: (qi(5) * m.integrate(&c2) - &c1c1) / qi(6),
            });
            checks.push(HrrCheck { name: "trace p=2".into(), lhs: m.partial_trace(2), rhs: noether });
        }
        3 => {
            checks.push(HrrCheck {
                name: "trace p=0".into(),
                lhs: m.partial_trace(0),
                rhs: m.integrate(&m.mul(&c1, &c2)) * q(1, 24),
            });
        }
        _ => {}
    }
    let total = (0..=m.dim()).map(|p| m.partial_trace(p)).fold(Rational::zero(), |a, b| a + b);
    checks.push(HrrCheck { name: "euler".into(), lhs: total, rhs: m.integrate(&m.chern(m.dim() as usize)) });
    HrrReport { checks }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Projective plane: 1, h, pt with ∫h² = 1, c(P²) = (1 + h)³.
    pub(crate) fn plane() -> CohModel {
        build_model(ModelSpec {
            name: "plane".into(),
            dim: 2,
            basis: vec![BasisClass::new("1", 0, 0), BasisClass::new("h", 1, 1), BasisClass::new("p", 2, 2)],
            unit: CohClass::basis(0),
            products: vec![(1, 1, CohClass::basis(2))],
            integrals: vec![qi(0), qi(0), qi(1)],
            chern: vec![CohClass::scaled_basis(1, qi(3)), CohClass::scaled_basis(2, qi(3))],
            point: CohClass::basis(2),
            aliases: vec![],
        })
        .unwrap()
    }

    #[test]
    fn plane_characteristic_numbers() {
        let m = plane();
        let c1 = m.chern(1);
        // Euler sequence: c(T) = (1 + h)^3, so c1 = 3h, c2 = 3h²
        assert_eq!(m.integrate(&m.mul(&c1, &c1)), qi(9));
        assert_eq!(m.integrate(&m.chern(2)), qi(3));
        assert_eq!(m.integrate(m.unit()), qi(0));
        let r = hrr_report(&m);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checks[0].lhs, qi(1));
        assert_eq!(r.checks[1].lhs, qi(1));
    }

    #[test]
    fn plane_diagonal_by_hand() {
        let m = plane();
        let d = m.kunneth_diagonal();
        let expect = [(0, 2), (1, 1), (2, 0)];
        assert_eq!(d.len(), 3);
        for (t, (l, r)) in d.iter().zip(expect) {
            assert_eq!((t.left, t.right, t.coeff.clone()), (l, r, qi(1)));
        }
    }

    fn symplectic_pair() -> CohModel {
        // a point-like toy: 1, α (odd), β (odd), top; ∫αβ = 1
        build_model(ModelSpec {
            name: "odd".into(),
            dim: 1,
            basis: vec![
                BasisClass::new("1", 0, 0),
                BasisClass::new("a", 1, 0),
                BasisClass::new("b", 0, 1),
                BasisClass::new("t", 1, 1),
            ],
            unit: CohClass::basis(0),
            products: vec![(1, 2, CohClass::basis(3))],
            integrals: vec![qi(0), qi(0), qi(0), qi(1)],
            chern: vec![],
            point: CohClass::basis(3),
            aliases: vec![],
        })
        .unwrap()
    }

    #[test]
    fn odd_diagonal_contracts_to_identity() {
        let m = symplectic_pair();
        let d = m.kunneth_diagonal();
        let odd: Vec<_> = d.iter().filter(|t| m.is_odd_class(t.left)).map(|t| (t.left, t.right, t.coeff.clone())).collect();
        assert_eq!(odd, vec![(1, 2, -qi(1)), (2, 1, qi(1))]);
        for b in 0..m.len() {
            let mut acc = CohClass::zero();
            for t in &d {
                let s = m.integrate(&m.mul(&CohClass::basis(t.right), &CohClass::basis(b)));
                acc = &acc + &CohClass::scaled_basis(t.left, &t.coeff * s);
            }
            assert_eq!(acc, CohClass::basis(b));
        }
    }

    #[test]
    fn odd_squares_vanish() {
        let m = symplectic_pair();
        let a = CohClass::basis(1);
        assert!(m.mul(&a, &a).is_zero());
        let b = CohClass::basis(2);
        assert_eq!(m.mul(&b, &a), -&m.mul(&a, &b));
    }

    #[test]
    fn asymmetric_pairing_is_rejected() {
        let err = build_model(ModelSpec {
            name: "bad".into(),
            dim: 2,
            basis: vec![
                BasisClass::new("1", 0, 0),
                BasisClass::new("x", 1, 1),
                BasisClass::new("y", 1, 1),
                BasisClass::new("p", 2, 2),
            ],
            unit: CohClass::basis(0),
            products: vec![
                (1, 2, CohClass::basis(3)),
                (2, 1, CohClass::scaled_basis(3, qi(2))),
                (1, 1, CohClass::basis(3)),
            ],
            integrals: vec![qi(0), qi(0), qi(0), qi(1)],
            chern: vec![],
            point: CohClass::basis(3),
            aliases: vec![],
        })
        .unwrap_err();
        assert_eq!(err.axiom(), Some(Axiom::Duality));
    }

    #[test]
    fn degenerate_pairing_is_rejected() {
        let err = build_model(ModelSpec {
            name: "bad".into(),
            dim: 2,
            basis: vec![BasisClass::new("1", 0, 0), BasisClass::new("x", 1, 1), BasisClass::new("p", 2, 2)],
            unit: CohClass::basis(0),
            products: vec![],
            integrals: vec![qi(0), qi(0), qi(1)],
            chern: vec![],
            point: CohClass::basis(2),
            aliases: vec![],
        })
        .unwrap_err();
        assert_eq!(err.axiom(), Some(Axiom::Duality));
    }
}
