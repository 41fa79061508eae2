//! The verification suites behind `ptvir verify`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::parse::{parse_insertion, parse_surface_spec, ParseError};
use super::report::{Row, SuiteReport};
use crate::cherncalc::{displayed_todd_series, GradedElt};
use crate::cohmodel::{hrr_report, CohModel};
use crate::cubicpt::{
    bracket, cubic_model, derive_fano_integrals, fano_class_in_grassmannian, partition_function,
    virasoro_residual_cubic, virtual_class, virtual_class_root_product, FanoModel, PairingPoly, PairingRatFn,
    PairingSeries,
};
use crate::descalg::{DescExpr, Gen, OperatorPreset};
use crate::exact::{q, qi, sign, Poly, RatFn, Rational};
use crate::hilbsurf::{
    bracket_hilb, disconnected_bracket, embed_in_union, k3_spec, load_surface, plane_spec, random_surface_spec,
    SurfaceError, SurfaceResidual, SurfaceSpec,
};

pub const SUITES: [&str; 6] =
    ["cubic-table", "cubic-virasoro", "fano-geometry", "surface-n1", "disconnected", "operator-identities"];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Brackets are computed for `n + 1 = 1..=max_order + 1`.
    pub max_order: u32,
    pub specs: Vec<PathBuf>,
    pub fuzz: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_order: 10, specs: Vec::new(), fuzz: 50, seed: 1 }
    }
}

/// Problems with the input rather than with a check.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("unknown suite '{0}' (expected one of {list})", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Surface { path: String, source: SurfaceError },
    #[error("{0}")]
    Option(String),
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport, InputError> {
    match name {
        "cubic-table" => cubic_table(opts),
        "cubic-virasoro" => cubic_virasoro(opts),
        "fano-geometry" => Ok(fano_geometry()),
        "surface-n1" => surface_n1(opts),
        "disconnected" => Ok(disconnected(opts)),
        "operator-identities" => Ok(operator_identities(opts)),
        other => Err(InputError::UnknownSuite(other.to_string())),
    }
}

fn require_order(opts: &VerifyOptions, least: u32) -> Result<(), InputError> {
    if opts.max_order < least {
        return Err(InputError::Option(format!("--max-order must be at least {least}")));
    }
    Ok(())
}

fn series_text(s: &PairingSeries) -> String {
    if s.is_zero() {
        "0".into()
    } else {
        s.to_string()
    }
}

/// `scale · num(q) / (1+q)^power`.
fn closed(num: &[i64], scale: Rational, power: u32) -> RatFn {
    let mut den = Poly::one();
    for _ in 0..power {
        den = &den * &Poly::from_ints(&[1, 1]);
    }
    RatFn::new(Poly::from_ints(num).scale(&scale), den)
}

/// The fifteen tabulated partition functions. Odd classes: `g1` of type (2,1), `g6` its
/// dual of type (1,2); the four-point row uses `g1, g2, g6, g7`.
pub fn cubic_table_rows() -> Vec<(&'static str, PairingRatFn)> {
    let s = |f: RatFn| PairingRatFn::scalar(f);
    let p16 = PairingPoly::pair(1, 6);
    let pair_row = |f: RatFn| PairingRatFn::times(&f, &p16);
    let p = PairingPoly::pair;
    let four = &(&(&p(1, 2) * &p(6, 7)) + &(&p(1, 7) * &p(2, 6))) + &(&p(1, 6) * &p(7, 2));
    vec![
        ("ch4(1)*ch4(1)", s(closed(&[0, 1, -44, 126, -44, 1], q(5, 4), 4))),
        ("ch4(1)*ch3(H)", s(closed(&[0, 1, -5, 5, -1], q(15, 4), 3))),
        ("ch4(1)*ch2(H2)", s(closed(&[0, -1, 4, -1], q(15, 2), 2))),
        ("ch3(H)*ch3(H)", s(closed(&[0, 1], q(45, 4), 0))),
        ("ch3(H)*ch2(H2)", s(closed(&[0, -1, 1], q(45, 2), 1))),
        ("ch2(H2)*ch2(H2)", s(closed(&[0, 1], qi(45), 0))),
        ("ch5(1)", s(closed(&[0, 1, -5, 5, -1], q(15, 4), 3))),
        ("ch4(H)", s(closed(&[0, 1], q(21, 4), 0))),
        ("ch3(H2)", s(closed(&[0, -1, 1], q(45, 2), 1))),
        ("ch2(H3)", s(closed(&[0, 1], qi(18), 0))),
        ("ch2(g1)*ch3(g6)", pair_row(closed(&[0, 1, -1], qi(3), 1))),
        ("ch2(g1)*ch2(g6)*ch4(1)", pair_row(closed(&[0, 1, -4, 1], qi(1), 2))),
        ("ch2(g1)*ch2(g6)*ch3(H)", pair_row(closed(&[0, 1, -1], qi(3), 1))),
        ("ch2(g1)*ch2(g6)*ch2(H2)", pair_row(closed(&[0, 1], qi(-6), 0))),
        ("ch2(g1)*ch2(g2)*ch2(g6)*ch2(g7)", PairingRatFn::times(&closed(&[0, 1], qi(1), 0), &four)),
    ]
}

/// `ch4(1)*ch3(H)` becomes `ch4.ch3H`.
pub fn short_label(insertion: &str) -> String {
    insertion.replace("(1)", "").replace(['(', ')'], "").replace('*', ".")
}

fn cubic_table(opts: &VerifyOptions) -> Result<SuiteReport, InputError> {
    // three unknowns for the widest denominator, one spare
    require_order(opts, 4)?;
    let m = cubic_model();
    let fano = FanoModel::new();
    let order = opts.max_order as i64 + 1;
    let rows = cubic_table_rows();
    let results: Vec<Vec<Row>> = rows
        .par_iter()
        .enumerate()
        .map(|(i, (ins, want))| {
            let id = format!("cubic-table/{}", short_label(ins));
            let anchor = format!("table-row-{:02}", i + 1);
            let d = parse_insertion(ins, &m).expect("table insertions parse");
            let expected_series = series_text(&want.series(order));
            match partition_function(&d, opts.max_order, &fano) {
                Ok(z) => {
                    let mut computed = z.closed_form.to_string();
                    if z.ambiguous {
                        computed.push_str(" (ambiguous fit)");
                    }
                    let fe = if z.satisfies_functional_equation() { "0".to_string() } else { z.functional_equation.to_string() };
                    vec![
                        Row::new(format!("{id}/series"), &anchor, expected_series, series_text(&z.series)),
                        Row::new(id.clone(), &anchor, want.to_string(), computed),
                        Row::new(format!("{id}/functional-equation"), &anchor, "0", fe),
                    ]
                }
                Err(e) => vec![Row::new(id, &anchor, want.to_string(), format!("error: {e}"))],
            }
        })
        .collect();
    let mut report = SuiteReport::new("cubic-table");
    report.notes.push(format!("brackets for n+1 = 1..={}", opts.max_order + 1));
    report.rows = results.into_iter().flatten().collect();
    Ok(report)
}

/// Classes used to build insertion menus on the cubic.
const CUBIC_MENU_CLASSES: [&str; 6] = ["1", "H", "H2", "H3", "g1", "g6"];

/// Generators `ch_j(γ)` for `j ≤ max_index` over the menu classes.
fn generators(m: &CohModel, classes: &[&str], max_index: u32) -> Vec<Gen> {
    let mut out = Vec::new();
    for name in classes {
        let Some(i) = m.index_of(name) else { continue };
        for j in 0..=max_index {
            out.push(Gen::new(m, j, i));
        }
    }
    out
}

/// Non-zero monomials of length `≤ max_len` in the generators whose degree (for the
/// given shift) is `target`. The empty product is included when `target = 0`.
fn monomials_of_degree(m: &CohModel, gens: &[Gen], shift: i64, max_len: usize, target: i64) -> Vec<DescExpr> {
    let deg: Vec<i64> = gens.iter().map(|g| crate::descalg::generator_degree(m, g, shift)).collect();
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn walk(
        start: usize,
        stack: &mut Vec<usize>,
        sum: i64,
        ctx: (&[Gen], &[i64], usize, i64),
        out: &mut Vec<DescExpr>,
    ) {
        let (gens, deg, max_len, target) = ctx;
        if sum == target {
            let mut e = DescExpr::one();
            for &i in stack.iter() {
                e = &e * &DescExpr::gen(gens[i].clone());
            }
            if !e.is_zero() {
                out.push(e);
            }
        }
        if stack.len() == max_len {
            return;
        }
        for i in start..gens.len() {
            stack.push(i);
            walk(i, stack, sum + deg[i], ctx, out);
            stack.pop();
        }
    }
    walk(0, &mut stack, 0, (gens, &deg, max_len, target), &mut out);
    out
}

/// The cubic insertion menu: products of up to `max_len` generators `ch_j(γ)`, `j ≤ 5`,
/// over `1, H, H2, H3, g1, g6`, of real degree `target`.
pub fn cubic_menu(max_len: usize, target: i64) -> Vec<DescExpr> {
    let m = cubic_model();
    monomials_of_degree(&m, &generators(&m, &CUBIC_MENU_CLASSES, 5), 3, max_len, target)
}

fn cubic_virasoro(opts: &VerifyOptions) -> Result<SuiteReport, InputError> {
    require_order(opts, 0)?;
    let m = cubic_model();
    let fano = FanoModel::new();
    let mut cases: Vec<(String, i64, DescExpr)> = Vec::new();
    let parse = |s: &str| parse_insertion(s, &m).expect("menu insertions parse");
    cases.push(("case-1".into(), 2, parse("1")));
    for s in ["ch1(H3)", "ch2(H2)", "ch3(H)", "ch4(1)"] {
        cases.push(("case-2".into(), 1, parse(s)));
    }
    for (a, b) in [("g6", "g1"), ("g7", "g1"), ("g6", "g2"), ("g8", "g3")] {
        cases.push(("case-3".into(), 1, parse(&format!("ch2({a})*ch2({b})"))));
    }
    for k in [-1i64, 0] {
        for d in cubic_menu(3, 4 - 2 * k) {
            cases.push((format!("menu-k{k}"), k, d));
        }
    }
    let rows: Vec<Row> = cases
        .par_iter()
        .map(|(anchor, k, d)| {
            let id = format!("cubic-virasoro/L{k}/{}", d.format(&m));
            let computed = match virasoro_residual_cubic(*k, d, opts.max_order, &fano) {
                Ok(r) => series_text(&r),
                Err(e) => format!("error: {e}"),
            };
            Row::new(id, anchor, "0", computed)
        })
        .collect();
    let mut report = SuiteReport::new("cubic-virasoro");
    report.notes.push(format!("residuals through q^{}", opts.max_order + 1));
    report.rows = rows;
    Ok(report)
}

/// Brackets at `n + 1 = 1` quoted in the tables of values on the Fano surface.
pub fn n1_values() -> Vec<(&'static str, PairingPoly)> {
    let c = |x: Rational| PairingPoly::constant(x);
    let p16 = PairingPoly::pair(1, 6);
    let p = PairingPoly::pair;
    vec![
        ("ch4(1)*ch4(1)", c(q(5, 4))),
        ("ch4(1)*ch3(H)", c(q(15, 4))),
        ("ch4(1)*ch2(H2)", c(q(-15, 2))),
        ("ch3(H)*ch3(H)", c(q(45, 4))),
        ("ch3(H)*ch2(H2)", c(q(-45, 2))),
        ("ch2(H2)*ch2(H2)", c(qi(45))),
        ("ch5(1)", c(q(15, 4))),
        ("ch4(H)", c(q(21, 4))),
        ("ch3(H2)", c(q(-45, 2))),
        ("ch2(H3)", c(qi(18))),
        ("ch2(g1)*ch3(g6)", p16.scale(&qi(3))),
        ("ch2(g1)*ch2(g6)*ch4(1)", p16.clone()),
        ("ch2(g1)*ch2(g6)*ch3(H)", p16.scale(&qi(3))),
        ("ch2(g1)*ch2(g6)*ch2(H2)", p16.scale(&qi(-6))),
        ("ch2(g1)*ch2(g2)*ch2(g6)*ch2(g7)", &(&(&p(1, 2) * &p(6, 7)) + &(&p(1, 7) * &p(2, 6))) + &(&p(1, 6) * &p(7, 2))),
    ]
}

/// `⟨ch5(1)⟩_{n+1}` read off the tabulated closed form.
pub fn ch5_value(n: u32) -> Rational {
    sign(n as i64) * q(15, 2) * qi(1 + 3 * (n as i64) * (n as i64))
}

/// The tabulated Todd coefficients: `(H exponent, c1 exponent, c2 exponent, value)`.
pub const TODD_DISPLAY: [(u32, u32, u32, (i64, i64)); 12] = [
    (0, 1, 0, (-1, 2)),
    (0, 2, 0, (1, 6)),
    (0, 0, 1, (-1, 12)),
    (1, 1, 0, (1, 12)),
    (1, 2, 0, (-1, 24)),
    (2, 0, 0, (1, 4)),
    (2, 1, 0, (-1, 8)),
    (2, 2, 0, (31, 720)),
    (2, 0, 1, (-1, 60)),
    (3, 1, 0, (7, 360)),
    (3, 2, 0, (-7, 720)),
    (0, 0, 0, (1, 1)),
];

fn fano_geometry() -> SuiteReport {
    let mut r = SuiteReport::new("fano-geometry");
    let ints = derive_fano_integrals();
    r.push(Row::new("fano-geometry/integral-c1^2", "fano-integrals", "45", ints.c1_squared.to_string()));
    r.push(Row::new("fano-geometry/integral-c2", "fano-integrals", "27", ints.c2.to_string()));
    let f = fano_class_in_grassmannian();
    let want_f = &GradedElt::term(f.ring(), qi(18), &[("c1", 2), ("c2", 1)]) + &GradedElt::term(f.ring(), qi(9), &[("c2", 2)]);
    r.push(Row::new("fano-geometry/fano-class", "fano-integrals", want_f.to_string(), f.to_string()));
    let todd = displayed_todd_series(7);
    for (h, a, b, (num, den)) in TODD_DISPLAY {
        let id = format!("fano-geometry/todd/H^{h}c1^{a}c2^{b}");
        let got = todd.coeff(&[("H", h), ("c1", a), ("c2", b)]);
        r.push(Row::new(id, "todd-display", q(num, den).to_string(), got.to_string()));
    }
    r.push(Row::new(
        "fano-geometry/todd/term-count",
        "todd-display",
        TODD_DISPLAY.len().to_string(),
        todd.terms().len().to_string(),
    ));
    let m = cubic_model();
    let fano = FanoModel::new();
    for (ins, want) in n1_values() {
        let d = parse_insertion(ins, &m).expect("value insertions parse");
        let got = bracket(1, &d, &fano).map(|v| v.to_string()).unwrap_or_else(|e| format!("error: {e}"));
        r.push(Row::new(format!("fano-geometry/n1/{}", short_label(ins)), "n1-values", want.to_string(), got));
    }
    for n in 0..=8 {
        r.push(Row::new(
            format!("fano-geometry/virtual-class/n{}", n + 1),
            "virtual-class",
            virtual_class_root_product(n).to_string(),
            virtual_class(n).to_string(),
        ));
    }
    let ch5 = parse_insertion("ch5(1)", &m).expect("parses");
    for n in 1..=8 {
        let got = bracket(n + 1, &ch5, &fano).map(|v| v.to_string()).unwrap_or_else(|e| format!("error: {e}"));
        r.push(Row::new(format!("fano-geometry/ch5/n{}", n + 1), "ch5-series", ch5_value(n).to_string(), got));
    }
    r
}

/// Surface models to check: spec files, the plane, the K3-like spec and `fuzz` random
/// specs drawn from `seed`.
fn surface_corpus(opts: &VerifyOptions) -> Result<Vec<SurfaceSpec>, InputError> {
    let mut specs = Vec::new();
    for path in &opts.specs {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| InputError::Io { path: shown.clone(), message: e.to_string() })?;
        let spec = parse_surface_spec(&text).map_err(|source| InputError::Parse { path: shown.clone(), source })?;
        load_surface(&spec).map_err(|source| InputError::Surface { path: shown, source })?;
        specs.push(spec);
    }
    specs.push(plane_spec());
    specs.push(k3_spec());
    specs.extend(fuzz_specs(opts.seed, opts.fuzz));
    Ok(specs)
}

pub fn fuzz_specs(seed: u64, count: usize) -> Vec<SurfaceSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_surface_spec(&mut rng, &format!("fuzz-s{seed}-{i:03}"))).collect()
}

/// Menu generators `ch_j(γ)` for `γ ∈ {1, h, pt, u, v}` and `j ≤ 6`.
pub fn surface_generators(m: &CohModel) -> Vec<Gen> {
    let mut out = Vec::new();
    for name in ["1", "h", "pt", "u", "v"] {
        let Some(class) = m.resolve(name) else { continue };
        let Some((i, _)) = class.iter().next() else { continue };
        for j in 0..=6 {
            out.push(Gen::new(m, j, i));
        }
    }
    out
}

/// Every degree-matched `(k, D, n)` with `k ≤ 4`, `D` of length `≤ 3`: for each `(k, n)`,
/// the number of insertions and the first non-zero residual, if any.
pub fn surface_virasoro_sweep(m: &Arc<CohModel>) -> Vec<(i64, u32, usize, Option<(String, Rational)>)> {
    let gens = surface_generators(m);
    let eval = SurfaceResidual::new(m.clone());
    let mut out = Vec::new();
    for n in 0..=1u32 {
        for k in -1..=4i64 {
            let menu = monomials_of_degree(m, &gens, 2, 3, 4 * n as i64 - 2 * k);
            let bad = menu.iter().find_map(|d| match eval.residual(k, d, n) {
                Ok(v) if v == qi(0) => None,
                Ok(v) => Some((d.format(m), v)),
                Err(e) => Some((format!("{} ({e})", d.format(m)), qi(0))),
            });
            out.push((k, n, menu.len(), bad));
        }
    }
    out
}

fn surface_rows(spec: &SurfaceSpec) -> Vec<Row> {
    let m = match load_surface(spec) {
        Ok(m) => Arc::new(m),
        Err(e) => return vec![Row::new(format!("surface-n1/{}/load", spec.name), "surface-model", "valid", e.to_string())],
    };
    let mut rows = Vec::new();
    for c in hrr_report(&m).checks {
        rows.push(Row::new(format!("surface-n1/{}/hrr/{}", spec.name, c.name), "hrr-identities", c.rhs.to_string(), c.lhs.to_string()));
    }
    for (k, n, count, bad) in surface_virasoro_sweep(&m) {
        let expected = format!("0 on {count} insertions");
        let computed = match bad {
            None => expected.clone(),
            Some((d, v)) => format!("{v} at {d}"),
        };
        rows.push(Row::new(format!("surface-n1/{}/L{k}/n{n}", spec.name), "surface-virasoro", expected, computed));
    }
    rows
}

fn surface_n1(opts: &VerifyOptions) -> Result<SuiteReport, InputError> {
    let specs = surface_corpus(opts)?;
    let rows: Vec<Vec<Row>> = specs.par_iter().map(surface_rows).collect();
    let mut report = SuiteReport::new("surface-n1");
    report.notes.push(format!("fuzz = {}, seed = {}", opts.fuzz, opts.seed));
    report.rows = rows.into_iter().flatten().collect();
    Ok(report)
}

const PART_MENU: [&str; 6] = ["1", "ch4(1)", "ch3(h)", "ch2(pt)", "ch3(1)*ch3(h)", "ch2(h)*ch2(pt)"];

/// Compares the bracket on `S1 ⊔ S2` with the sum over distributions of points, for
/// every pair of menu insertions and `n ≤ 1`. Returns the count and the first mismatch.
pub fn disconnected_agreement(a: &CohModel, b: &CohModel) -> (usize, Option<String>) {
    let union = a.disjoint_union(b, "union").expect("disjoint unions of valid models are valid");
    let mut count = 0;
    for x in PART_MENU {
        for y in PART_MENU {
            let dx = parse_insertion(x, a).expect("menu parses");
            let dy = parse_insertion(y, b).expect("menu parses");
            let joined = &embed_in_union(&dx, 0) * &embed_in_union(&dy, a.len());
            for n in 0..=1 {
                count += 1;
                let direct = bracket_hilb(n, &joined, &union);
                let split = disconnected_bracket(&[(a, &dx), (b, &dy)], n);
                if direct != split {
                    return (count, Some(format!("{x} | {y} at n={n}: {direct} vs {split}")));
                }
            }
        }
    }
    (count, None)
}

fn disconnected(opts: &VerifyOptions) -> SuiteReport {
    let specs = fuzz_specs(opts.seed, opts.fuzz.max(2));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let pairs: Vec<(usize, usize)> = (0..opts.fuzz.max(1)).map(|_| (rng.random_range(0..specs.len()), rng.random_range(0..specs.len()))).collect();
    let rows: Vec<Row> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (load_surface(&specs[i]).expect("valid"), load_surface(&specs[j]).expect("valid"));
            let (count, bad) = disconnected_agreement(&a, &b);
            let expected = format!("agree on {count} brackets");
            let computed = bad.unwrap_or_else(|| expected.clone());
            Row::new(format!("disconnected/{}+{}", specs[i].name, specs[j].name), "disconnected-sum", expected, computed)
        })
        .collect();
    let mut report = SuiteReport::new("disconnected");
    report.notes.push(format!("pairs = {}, seed = {}", opts.fuzz.max(1), opts.seed));
    report.rows = rows;
    report
}

fn ch(m: &CohModel, k: u32, name: &str) -> DescExpr {
    DescExpr::ch(m, k, &m.resolve(name).expect("known class"))
}

/// The collapsed `T_1`, `T_2` and `L_2(1)` in closed form on the cubic.
pub fn displayed_cubic_operators() -> (DescExpr, DescExpr, DescExpr) {
    let m = cubic_model();
    let t1 = ch(&m, 3, "H").scale(&qi(-2));
    let t2 = &(&(&ch(&m, 4, "H").scale(&qi(-4)) + &(&ch(&m, 2, "H") * &ch(&m, 2, "H3")).scale(&q(4, 3)))
        - &(&ch(&m, 2, "H2") * &ch(&m, 2, "H2")).scale(&q(1, 3)))
        - &ch(&m, 2, "H3").scale(&q(4, 3));
    let l2_on_one = &t2 + &ch(&m, 2, "H3").scale(&qi(2));
    (t1, t2, l2_on_one)
}

/// `L_1 D` by the collapsed display: `R_1 D - 2 ch3(H) D + (2/3) ch2(H3) R_{-1} D`.
pub fn displayed_l1(d: &DescExpr) -> DescExpr {
    let m = cubic_model();
    let p = OperatorPreset::threefold(m.clone());
    let r1 = p.apply_rk(d, 1).expect("k = 1");
    let rm1 = p.apply_rk(d, -1).expect("k = -1");
    let out = &(&r1 - &(&ch(&m, 3, "H") * d).scale(&qi(2))) + &(&ch(&m, 2, "H3") * &rm1).scale(&q(2, 3));
    out.collapse(&m)
}

/// Aggregates a family of checks into one row.
fn family<I: IntoIterator<Item = Result<(), String>>>(id: &str, anchor: &str, checks: I) -> Row {
    let mut count = 0;
    for c in checks {
        count += 1;
        if let Err(e) = c {
            return Row::new(id, anchor, format!("holds on {count} cases"), e);
        }
    }
    let s = format!("holds on {count} cases");
    Row::new(id, anchor, s.clone(), s)
}

fn operator_identities(opts: &VerifyOptions) -> SuiteReport {
    let m = cubic_model();
    let p = OperatorPreset::threefold(m.clone());
    let fano = FanoModel::new();
    let mut r = SuiteReport::new("operator-identities");
    let n_max = opts.max_order;
    let (t1, t2, l2) = displayed_cubic_operators();
    let fmt = |e: &DescExpr| e.format(&m);
    r.push(Row::new("operator-identities/T1", "collapsed-L1", fmt(&t1), fmt(&p.tk_element(1).unwrap().collapse(&m))));
    r.push(Row::new("operator-identities/T2", "collapsed-L2", fmt(&t2), fmt(&p.tk_element(2).unwrap().collapse(&m))));
    r.push(Row::new(
        "operator-identities/L2(1)",
        "collapsed-L2",
        fmt(&l2),
        fmt(&p.apply_lk(&DescExpr::one(), 2).unwrap().collapse(&m)),
    ));
    let small: Vec<DescExpr> = (-2..=6).flat_map(|t| cubic_menu(2, t)).collect();
    r.push(family(
        "operator-identities/L1-display",
        "collapsed-L1",
        small.iter().map(|d| {
            let got = p.apply_lk(d, 1).unwrap().collapse(&m);
            let want = displayed_l1(d);
            (got == want).then_some(()).ok_or_else(|| format!("{}: {} vs {}", fmt(d), fmt(&got), fmt(&want)))
        }),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pairs: Vec<(DescExpr, DescExpr, i64)> =
        (0..40).map(|_| (small.choose(&mut rng).unwrap().clone(), small.choose(&mut rng).unwrap().clone(), rng.random_range(-1..=3))).collect();
    r.push(family(
        "operator-identities/Rk-derivation",
        "rk-derivation",
        pairs.iter().map(|(a, b, k)| {
            let lhs = p.apply_rk(&(a * b), *k).unwrap();
            let rhs = &(&p.apply_rk(a, *k).unwrap() * b) + &(a * &p.apply_rk(b, *k).unwrap());
            (lhs == rhs).then_some(()).ok_or_else(|| format!("R_{k} on {} * {}", fmt(a), fmt(b)))
        }),
    ));
    r.push(family(
        "operator-identities/degree",
        "degree-bookkeeping",
        small.iter().flat_map(|d| (-1..=3).map(move |k| (d, k))).map(|(d, k)| {
            let l = p.apply_lk(d, k).unwrap();
            let (dd, dl) = (d.degree(&m, 3), l.degree(&m, 3));
            match (dd, dl) {
                (_, None) if l.is_zero() => Ok(()),
                (Some(a), Some(b)) if b == a + 2 * k => Ok(()),
                _ => Err(format!("L_{k} {}: {dd:?} -> {dl:?}", fmt(d))),
            }
        }),
    ));
    // string, divisor and dilaton rewrites against realized brackets
    let beta: BTreeMap<usize, Rational> = BTreeMap::from([(m.index_of("H").unwrap(), qi(1))]);
    let d_beta = qi(2);
    let rules = [("string", ch(&m, 2, "1")), ("divisor", ch(&m, 2, "H")), ("dilaton", ch(&m, 3, "1"))];
    let rewrite_menu: Vec<DescExpr> = (0..=4).flat_map(|t| cubic_menu(2, t)).collect();
    for (name, rule) in &rules {
        let cases: Vec<Result<(), String>> = rewrite_menu
            .par_iter()
            .flat_map_iter(|d| (0..=n_max).map(move |n| (d, n)))
            .map(|(d, n)| {
                let e = rule * d;
                let rewritten = p.reduction_rewrite(&e, &beta, n as i64 + 1, &d_beta);
                let a = bracket(n + 1, &e, &fano);
                let b = bracket(n + 1, &rewritten, &fano);
                match (a, b) {
                    (Ok(a), Ok(b)) if a == b => Ok(()),
                    (a, b) => Err(format!("{} at n+1={}: {a:?} vs {b:?}", fmt(&e), n + 1)),
                }
            })
            .collect();
        r.push(family(&format!("operator-identities/rewrite-{name}"), "reduction-rewrites", cases));
    }
    for (case, rule) in reduction_rules(&m).into_iter().enumerate() {
        let cases = reduction_case(&p, &rule, &beta, &d_beta, n_max, &fano);
        r.push(family(&format!("operator-identities/reduction-case-{}", case + 1), "reduction-virasoro", cases));
    }
    let models: Vec<(String, CohModel)> = vec![
        ("cubic".into(), (*m).clone()),
        ("plane".into(), load_surface(&plane_spec()).unwrap()),
        ("k3".into(), load_surface(&k3_spec()).unwrap()),
    ];
    for (name, model) in &models {
        for c in hrr_report(model).checks {
            r.push(Row::new(format!("operator-identities/hrr/{name}/{}", c.name), "hrr-identities", c.rhs.to_string(), c.lhs.to_string()));
        }
    }
    r
}

/// The five families of extra factors: `ch0(γ)`, `ch1(γ)`, `ch2(1)`, `ch2(δ)`, `ch3(1)`.
fn reduction_rules(m: &CohModel) -> Vec<Vec<DescExpr>> {
    let classes = ["1", "H", "H2", "H3", "g1", "g6"];
    vec![
        classes.iter().map(|c| ch(m, 0, c)).collect(),
        classes.iter().map(|c| ch(m, 1, c)).collect(),
        vec![ch(m, 2, "1")],
        vec![ch(m, 2, "H")],
        vec![ch(m, 3, "1")],
    ]
}

/// For each factor `f` in the family and each menu `D` with `deg(f D) + 2k = 4`:
/// `⟨L_k(f D)⟩ = ⟨f · L_k D⟩` after collapsing and rewriting, and both vanish.
fn reduction_case(
    p: &OperatorPreset,
    family: &[DescExpr],
    beta: &BTreeMap<usize, Rational>,
    d_beta: &Rational,
    n_max: u32,
    fano: &FanoModel,
) -> Vec<Result<(), String>> {
    let m = p.model().clone();
    let mut jobs = Vec::new();
    for f in family {
        let fdeg = f.degree(&m, 3).expect("generators are homogeneous");
        for k in -1..=2i64 {
            for d in cubic_menu(2, 4 - 2 * k - fdeg) {
                jobs.push((f.clone(), k, d));
            }
        }
    }
    jobs.par_iter()
        .flat_map_iter(|job| (0..=n_max).map(move |n| (job, n)))
        .map(|((f, k, d), n)| {
            let whole = p.apply_lk(&(f * d), *k).map_err(|e| e.to_string())?.collapse(&m);
            let reduced = (f * &p.apply_lk(d, *k).map_err(|e| e.to_string())?).collapse(&m);
            let reduced = p.reduction_rewrite(&reduced, beta, n as i64 + 1, d_beta);
            let a = bracket(n + 1, &whole, fano).map_err(|e| e.to_string())?;
            let b = bracket(n + 1, &reduced, fano).map_err(|e| e.to_string())?;
            if a == b && a.is_zero() {
                Ok(())
            } else {
                Err(format!("{} * {} with k={k} at n+1={}: {a} vs {b}", f.format(&m), d.format(&m), n + 1))
            }
        })
        .collect()
}
