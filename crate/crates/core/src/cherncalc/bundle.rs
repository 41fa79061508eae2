use std::sync::Arc;

use num_traits::{One, Zero};

use super::{GradedElt, GradedPolyRing};
use crate::exact::{binomial, factorial, qi, Rational};

/// Coefficients of `x / (1 - e^{-x})` through `x^order`.
pub fn todd_power_series(order: usize) -> Vec<Rational> {
    // (1 - e^{-x}) / x = sum_k (-1)^k x^k / (k+1)!
    let f: Vec<Rational> = (0..=order)
        .map(|k| {
            let c = Rational::one() / factorial(k as u32 + 1);
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    series_inverse(&f)
}

fn series_inverse(f: &[Rational]) -> Vec<Rational> {
    let mut g = vec![Rational::zero(); f.len()];
    g[0] = Rational::one() / &f[0];
    for n in 1..f.len() {
        let mut acc = Rational::zero();
        for k in 1..=n {
            acc += &f[k] * &g[n - k];
        }
        g[n] = -acc * &g[0];
    }
    g
}

/// `log f` for a series with `f(0) = 1`, via `(log f)' = f' / f`.
fn series_log(f: &[Rational]) -> Vec<Rational> {
    assert!(f[0].is_one());
    let n = f.len();
    let inv = series_inverse(f);
    let mut out = vec![Rational::zero(); n];
    for k in 1..n {
        // coefficient of x^{k-1} in f' / f
        let mut acc = Rational::zero();
        for j in 1..=k {
            acc += qi(j as i64) * &f[j] * &inv[k - j];
        }
        out[k] = acc / qi(k as i64);
    }
    out
}

/// A vector bundle known through its Chern classes (equivalently its formal roots).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBundle {
    rank: usize,
    ring: Arc<GradedPolyRing>,
    /// `chern[i]` is `c_{i+1}`.
    chern: Vec<GradedElt>,
}

impl RootBundle {
    pub fn from_chern(ring: &Arc<GradedPolyRing>, rank: usize, chern: Vec<GradedElt>) -> Self {
        assert!(chern.len() <= rank, "more Chern classes than the rank");
        let mut chern = chern;
        chern.resize(rank, GradedElt::zero(ring));
        RootBundle { rank, ring: ring.clone(), chern }
    }

    /// Bundle split as a sum of line bundles with the given first Chern classes (real degree 2).
    pub fn from_roots(ring: &Arc<GradedPolyRing>, roots: &[GradedElt]) -> Self {
        let mut total = GradedElt::one(ring);
        for r in roots {
            total = &total * &(&GradedElt::one(ring) + r);
        }
        let rank = roots.len();
        let chern = (1..=rank).map(|i| total.component(2 * i as u32)).collect();
        RootBundle { rank, ring: ring.clone(), chern }
    }

    pub fn line(root: &GradedElt) -> Self {
        Self::from_roots(root.ring(), std::slice::from_ref(root))
    }

    pub fn trivial(ring: &Arc<GradedPolyRing>, rank: usize) -> Self {
        Self::from_chern(ring, rank, Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ring(&self) -> &Arc<GradedPolyRing> {
        &self.ring
    }

    /// `c_i`, with `c_0 = 1` and zero above the rank.
    pub fn chern_class(&self, i: usize) -> GradedElt {
        match i {
            0 => GradedElt::one(&self.ring),
            i if i <= self.rank => self.chern[i - 1].clone(),
            _ => GradedElt::zero(&self.ring),
        }
    }

    pub fn total_chern(&self) -> GradedElt {
        self.chern.iter().fold(GradedElt::one(&self.ring), |acc, c| &acc + c)
    }

    /// Power sums `p_0 = rank, p_1, ..., p_max` of the roots (Newton's identities).
    pub fn power_sums(&self, max: usize) -> Vec<GradedElt> {
        let mut p = vec![GradedElt::constant(&self.ring, qi(self.rank as i64))];
        for k in 1..=max {
            let mut acc = self.chern_class(k).scale(&qi(k as i64));
            if k % 2 == 0 {
                acc = -acc;
            }
            for i in 1..k {
                let t = &self.chern_class(i) * &p[k - i];
                acc = if i % 2 == 1 { &acc + &t } else { &acc - &t };
            }
            p.push(acc);
        }
        p
    }

    fn from_power_sums(ring: &Arc<GradedPolyRing>, rank: usize, p: &[GradedElt]) -> Self {
        // k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i
        let mut e = vec![GradedElt::one(ring)];
        for k in 1..=rank {
            let mut acc = GradedElt::zero(ring);
            for i in 1..=k {
                let t = &e[k - i] * &p[i];
                acc = if i % 2 == 1 { &acc + &t } else { &acc - &t };
            }
            e.push(acc.scale(&(Rational::one() / qi(k as i64))));
        }
        e.remove(0);
        Self::from_chern(ring, rank, e)
    }

    fn nil_bound(&self) -> usize {
        let top = self.ring.top_degree().expect("twisting needs a ring with a degree cap");
        (top as usize / 2).max(self.rank) + 1
    }

    /// `E ⊗ L` where `L` has first Chern class `x`.
    pub fn twist(&self, x: &GradedElt) -> Self {
        let n = self.nil_bound();
        let p = self.power_sums(n);
        let twisted: Vec<GradedElt> = (0..=n)
            .map(|k| {
                (0..=k).fold(GradedElt::zero(&self.ring), |acc, j| {
                    let t = (&x.pow((k - j) as u32) * &p[j]).scale(&binomial(k as i64, j as i64));
                    &acc + &t
                })
            })
            .collect();
        Self::from_power_sums(&self.ring, self.rank, &twisted)
    }

    pub fn direct_sum(&self, other: &RootBundle) -> Self {
        let c = &self.total_chern() * &other.total_chern();
        let rank = self.rank + other.rank;
        let chern = (1..=rank).map(|i| c.component(2 * i as u32)).collect();
        Self::from_chern(&self.ring, rank, chern)
    }

    pub fn dual(&self) -> Self {
        let chern = self
            .chern
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { -c } else { c.clone() })
            .collect();
        Self::from_chern(&self.ring, self.rank, chern)
    }

    /// Todd class through complex degree `order`.
    pub fn todd(&self, order: usize) -> GradedElt {
        let n = order.max(1);
        let logs = series_log(&todd_power_series(n));
        let p = self.power_sums(n);
        let mut arg = GradedElt::zero(&self.ring);
        for k in 1..=n {
            arg = &arg + &p[k].scale(&logs[k]);
        }
        arg.exp().truncate(2 * order as u32)
    }
}
