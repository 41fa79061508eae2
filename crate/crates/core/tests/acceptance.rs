//! Acceptance criteria, one PASS/FAIL line each. Expected values are written out here
//! independently of the library tables.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptvir::cherncalc::displayed_todd_series;
use ptvir::cli::{parse_insertion, run_suite, VerifyOptions};
use ptvir::cohmodel::{hrr_report, CohModel};
use ptvir::cubicpt::{
    bracket, cubic_model, derive_fano_integrals, partition_function, virasoro_residual_cubic, virtual_class,
    virtual_class_root_product, FanoModel, PairingPoly,
};
use ptvir::descalg::{generator_degree, DescExpr, Gen, OperatorPreset};
use ptvir::exact::{binomial, q, qi, Rational};
use ptvir::hilbsurf::{
    disconnected_bracket, embed_in_union, bracket_hilb, k3_spec, load_surface, plane_spec, random_surface_spec,
    SurfaceResidual, SurfaceSpec,
};

type Outcome = Result<String, String>;

const N_MAX: u32 = 10;

fn pow_i(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        (0..e).fold(Rational::one(), |acc, _| acc * x)
    } else {
        Rational::one() / pow_i(x, -e)
    }
}

/// `scale · Σ num_i q^i / (1+q)^p` as plain data.
#[derive(Clone)]
struct Closed {
    num: Vec<i64>,
    scale: Rational,
    power: i64,
}

impl Closed {
    fn new(num: &[i64], scale: Rational, power: i64) -> Self {
        Closed { num: num.to_vec(), scale, power }
    }

    /// Coefficient of `q^e`, using `(1+q)^{-p} = Σ (-1)^m C(m+p-1, p-1) q^m`.
    fn coeff(&self, e: i64) -> Rational {
        let mut total = Rational::zero();
        for (i, c) in self.num.iter().enumerate() {
            let m = e - i as i64;
            if m < 0 || *c == 0 {
                continue;
            }
            let geometric = if self.power == 0 {
                if m == 0 { qi(1) } else { qi(0) }
            } else {
                qi(if m % 2 == 0 { 1 } else { -1 }) * binomial(m + self.power - 1, self.power - 1)
            };
            total += qi(*c) * geometric;
        }
        total * &self.scale
    }

    fn eval(&self, x: &Rational) -> Rational {
        let num: Rational = self.num.iter().enumerate().map(|(i, c)| qi(*c) * pow_i(x, i as i64)).sum();
        &self.scale * num / pow_i(&(x + qi(1)), self.power)
    }
}

fn four_point(a: u32, b: u32, c: u32, d: u32) -> PairingPoly {
    let p = PairingPoly::pair;
    &(&(&p(a, b) * &p(c, d)) + &(&p(a, d) * &p(b, c))) + &(&p(a, c) * &p(d, b))
}

/// The tabulated partition functions: insertion, closed form, pairing factor.
fn table() -> Vec<(&'static str, Closed, PairingPoly)> {
    let one = PairingPoly::constant(qi(1));
    let p16 = PairingPoly::pair(1, 6);
    vec![
        ("ch4(1)*ch4(1)", Closed::new(&[0, 1, -44, 126, -44, 1], q(5, 4), 4), one.clone()),
        ("ch4(1)*ch3(H)", Closed::new(&[0, 1, -5, 5, -1], q(15, 4), 3), one.clone()),
        ("ch4(1)*ch2(H2)", Closed::new(&[0, -1, 4, -1], q(15, 2), 2), one.clone()),
        ("ch3(H)*ch3(H)", Closed::new(&[0, 1], q(45, 4), 0), one.clone()),
        ("ch3(H)*ch2(H2)", Closed::new(&[0, -1, 1], q(45, 2), 1), one.clone()),
        ("ch2(H2)*ch2(H2)", Closed::new(&[0, 1], qi(45), 0), one.clone()),
        ("ch5(1)", Closed::new(&[0, 1, -5, 5, -1], q(15, 4), 3), one.clone()),
        ("ch4(H)", Closed::new(&[0, 1], q(21, 4), 0), one.clone()),
        ("ch3(H2)", Closed::new(&[0, -1, 1], q(45, 2), 1), one.clone()),
        ("ch2(H3)", Closed::new(&[0, 1], qi(18), 0), one),
        ("ch2(g1)*ch3(g6)", Closed::new(&[0, 1, -1], qi(3), 1), p16.clone()),
        ("ch2(g1)*ch2(g6)*ch4(1)", Closed::new(&[0, 1, -4, 1], qi(1), 2), p16.clone()),
        ("ch2(g1)*ch2(g6)*ch3(H)", Closed::new(&[0, 1, -1], qi(3), 1), p16.clone()),
        ("ch2(g1)*ch2(g6)*ch2(H2)", Closed::new(&[0, 1], qi(-6), 0), p16),
        ("ch2(g1)*ch2(g2)*ch2(g6)*ch2(g7)", Closed::new(&[0, 1], qi(1), 0), four_point(1, 2, 6, 7)),
    ]
}

fn ins(s: &str) -> DescExpr {
    parse_insertion(s, &cubic_model()).expect("insertion parses")
}

fn criterion_1() -> Outcome {
    let fano = FanoModel::new();
    let mut brackets = 0;
    for (s, closed, factor) in table() {
        let d = ins(s);
        for n in 0..=N_MAX {
            let got = bracket(n + 1, &d, &fano).map_err(|e| format!("{s}: {e}"))?;
            let want = factor.scale(&closed.coeff(n as i64 + 1));
            if got != want {
                return Err(format!("{s} at n+1={}: computed {got}, expected {want}", n + 1));
            }
            brackets += 1;
        }
        let z = partition_function(&d, N_MAX, &fano).map_err(|e| format!("{s}: {e}"))?;
        if z.ambiguous {
            return Err(format!("{s}: reconstruction not saturated"));
        }
        // the reconstructed closed form must agree with the tabulated one at sample points
        for (m, c) in factor.terms() {
            let f = z.closed_form.parts.get(m).ok_or_else(|| format!("{s}: missing pairing component"))?;
            for x in [q(1, 2), q(2, 3), qi(3), q(-1, 5)] {
                if f.eval(&x) != Some(c * closed.eval(&x)) {
                    return Err(format!("{s}: reconstructed {} differs at q={x}", z.closed_form));
                }
            }
        }
        if z.closed_form.parts.len() != factor.terms().len() {
            return Err(format!("{s}: reconstructed {} has extra components", z.closed_form));
        }
    }
    Ok(format!("15 partition functions, {brackets} brackets n+1=1..={} and closed forms recovered", N_MAX + 1))
}

fn criterion_2() -> Outcome {
    let fano = FanoModel::new();
    for (s, closed, _) in table() {
        let d = ins(s);
        let parity = d.index_sum().unwrap() as i64;
        // independent check on the tabulated form at sample points
        for x in [q(1, 2), qi(2), q(3, 7)] {
            let lhs = closed.eval(&(qi(1) / &x));
            let rhs = qi(if parity % 2 == 0 { 1 } else { -1 }) * pow_i(&x, -2) * closed.eval(&x);
            if lhs != rhs {
                return Err(format!("{s}: tabulated form violates the functional equation at q={x}"));
            }
        }
        let z = partition_function(&d, N_MAX, &fano).map_err(|e| e.to_string())?;
        if !z.satisfies_functional_equation() {
            return Err(format!("{s}: residual {}", z.functional_equation));
        }
    }
    Ok("functional equation residual 0 for all 15 (d_beta = 2, parity = sum of indices)".into())
}

fn criterion_3() -> Outcome {
    let ints = derive_fano_integrals();
    if ints.c1_squared != qi(45) || ints.c2 != qi(27) {
        return Err(format!("integrals c1^2 = {}, c2 = {}", ints.c1_squared, ints.c2));
    }
    let todd = displayed_todd_series(7);
    for (parts, want) in [
        (vec![("c1", 1)], q(-1, 2)),
        (vec![("H", 1), ("c1", 1)], q(1, 12)),
        (vec![("H", 2), ("c1", 2)], q(31, 720)),
        (vec![("H", 3), ("c1", 2)], q(-7, 720)),
    ] {
        let got = todd.coeff(&parts);
        if got != want {
            return Err(format!("Todd coefficient {parts:?}: {got} vs {want}"));
        }
    }
    let fano = FanoModel::new();
    let values = [
        ("ch4(1)*ch4(1)", q(5, 4)),
        ("ch4(1)*ch3(H)", q(15, 4)),
        ("ch4(1)*ch2(H2)", q(-15, 2)),
        ("ch3(H)*ch3(H)", q(45, 4)),
        ("ch3(H)*ch2(H2)", q(-45, 2)),
        ("ch2(H2)*ch2(H2)", qi(45)),
        ("ch5(1)", q(15, 4)),
        ("ch4(H)", q(21, 4)),
        ("ch3(H2)", q(-45, 2)),
        ("ch2(H3)", qi(18)),
    ];
    for (s, want) in values {
        let got = bracket(1, &ins(s), &fano).map_err(|e| e.to_string())?;
        if got.as_scalar() != Some(want.clone()) {
            return Err(format!("<{s}>_1 = {got}, expected {want}"));
        }
    }
    Ok("integrals 45 and 27 derived, Todd anchors, ten even values at n+1 = 1".into())
}

fn criterion_4() -> Outcome {
    for n in 1..=8 {
        if virtual_class(n) != virtual_class_root_product(n) {
            return Err(format!("virtual class at n={n}: {} vs {}", virtual_class(n), virtual_class_root_product(n)));
        }
    }
    let fano = FanoModel::new();
    let d = ins("ch5(1)");
    let mut stated_failures = Vec::new();
    for n in 1..=8u32 {
        let got = bracket(n + 1, &d, &fano).map_err(|e| e.to_string())?.as_scalar().unwrap_or_default();
        let sign = qi(if n % 2 == 0 { 1 } else { -1 });
        let n2 = qi((n * n) as i64);
        let corrected = &sign * q(15, 2) * (qi(1) + qi(3) * &n2);
        if got != corrected {
            return Err(format!("<ch5(1)>_{} = {got}, corrected formula gives {corrected}", n + 1));
        }
        let stated = &sign * q(45, 2) * (qi(3) + &n2);
        if got != stated {
            stated_failures.push(format!("n={n}: {got} vs {stated}"));
        }
    }
    if stated_failures.is_empty() {
        Ok("virtual class n=1..8 and <ch5(1)>_{n+1} = (-1)^n (45/2)(3+n^2)".into())
    } else {
        Err(format!(
            "virtual class n=1..8 holds; <ch5(1)>_{{n+1}} = (-1)^n (45/2)(3+n^2) fails ({}); \
             computed values equal (-1)^n (15/2)(1+3n^2), the expansion of the tabulated closed form",
            stated_failures.join(", ")
        ))
    }
}

const CUBIC_CLASSES: [&str; 6] = ["1", "H", "H2", "H3", "g1", "g6"];

/// Degree-matched products of up to `len` generators `ch_j(γ)`, `j ≤ 5`.
fn cubic_products(len: usize, target: i64) -> Vec<DescExpr> {
    let m = cubic_model();
    let gens: Vec<Gen> = CUBIC_CLASSES
        .iter()
        .flat_map(|c| (0..=5).map(move |j| (*c, j)))
        .map(|(c, j)| Gen::new(&m, j, m.index_of(c).unwrap()))
        .collect();
    products(&m, &gens, 3, len, target)
}

fn products(m: &CohModel, gens: &[Gen], shift: i64, len: usize, target: i64) -> Vec<DescExpr> {
    let mut out = Vec::new();
    let mut words: Vec<(Vec<usize>, i64)> = vec![(vec![], 0)];
    for _ in 0..=len {
        let mut next = Vec::new();
        for (w, deg) in &words {
            if *deg == target {
                let e = w.iter().fold(DescExpr::one(), |acc, &i| &acc * &DescExpr::gen(gens[i].clone()));
                if !e.is_zero() {
                    out.push(e);
                }
            }
            if w.len() < len {
                let start = w.last().copied().unwrap_or(0);
                for i in start..gens.len() {
                    let mut v = w.clone();
                    v.push(i);
                    next.push((v, deg + generator_degree(m, &gens[i], shift)));
                }
            }
        }
        words = next;
    }
    out
}

fn criterion_5() -> Outcome {
    let fano = FanoModel::new();
    let mut cases: Vec<(i64, DescExpr)> = vec![(2, DescExpr::one())];
    for s in ["ch1(H3)", "ch2(H2)", "ch3(H)", "ch4(1)"] {
        cases.push((1, ins(s)));
    }
    for (a, b) in [("g6", "g1"), ("g7", "g1"), ("g9", "g4"), ("g10", "g2")] {
        cases.push((1, ins(&format!("ch2({a})*ch2({b})"))));
    }
    for k in [-1i64, 0] {
        for d in cubic_products(3, 4 - 2 * k) {
            cases.push((k, d));
        }
    }
    let m = cubic_model();
    for (k, d) in &cases {
        let r = virasoro_residual_cubic(*k, d, N_MAX, &fano).map_err(|e| e.to_string())?;
        if !r.is_zero() {
            return Err(format!("L_{k} {}: {r}", d.format(&m)));
        }
    }
    Ok(format!("{} residuals vanish through q^{}", cases.len(), N_MAX + 1))
}

fn ch(m: &CohModel, k: u32, c: &str) -> DescExpr {
    DescExpr::ch(m, k, &m.resolve(c).unwrap())
}

fn criterion_6() -> Outcome {
    let m = cubic_model();
    let p = OperatorPreset::threefold(m.clone());
    let mut checked = 0;
    for t in -2..=6 {
        for d in cubic_products(2, t) {
            let l1 = p.apply_lk(&d, 1).unwrap().collapse(&m);
            let r1 = p.apply_rk(&d, 1).unwrap();
            let rm1 = p.apply_rk(&d, -1).unwrap();
            let display =
                &(&r1 - &(&ch(&m, 3, "H") * &d).scale(&qi(2))) + &(&ch(&m, 2, "H3") * &rm1).scale(&q(2, 3));
            if l1 != display.collapse(&m) {
                return Err(format!("L_1 on {}", d.format(&m)));
            }
            checked += 1;
        }
    }
    // L_2 = R_2 - 4ch4(H) + 4/3 ch2(H)ch2(H3) - 1/3 ch2(H2)ch2(H2) - 4/3 ch2(H3) + 2 ch2(H3)
    let t2 = &(&(&ch(&m, 4, "H").scale(&qi(-4)) + &(&ch(&m, 2, "H") * &ch(&m, 2, "H3")).scale(&q(4, 3)))
        - &(&ch(&m, 2, "H2") * &ch(&m, 2, "H2")).scale(&q(1, 3)))
        - &ch(&m, 2, "H3").scale(&q(4, 3));
    if p.tk_element(2).unwrap().collapse(&m) != t2 {
        return Err(format!("T_2 collapsed: {}", p.tk_element(2).unwrap().collapse(&m).format(&m)));
    }
    if p.tk_element(1).unwrap().collapse(&m) != ch(&m, 3, "H").scale(&qi(-2)) {
        return Err("T_1 collapsed".into());
    }
    let l2 = &t2 + &ch(&m, 2, "H3").scale(&qi(2));
    if p.apply_lk(&DescExpr::one(), 2).unwrap().collapse(&m) != l2 {
        return Err("L_2(1) collapsed".into());
    }
    for d in cubic_products(1, 0) {
        // on any D: the S-part contributes 2 ch2(H3) D + 2 ch3(H3) R_{-1} D
        let s2 = p.apply_sk(&d, 2).unwrap().collapse(&m);
        let want = &(&ch(&m, 2, "H3") * &d).scale(&qi(2)) + &(&ch(&m, 3, "H3") * &p.apply_rk(&d, -1).unwrap()).scale(&qi(2));
        if s2 != want.collapse(&m) {
            return Err(format!("S_2 on {}", d.format(&m)));
        }
    }
    Ok(format!("collapsed L_1 on {checked} monomials, T_1, T_2 and L_2(1) termwise"))
}

/// `(k, n, D)` with `deg(D) + 2k = 4n` over `{ch_j(1), ch_j(h), ch_j(pt), ch_j(u), ch_j(v)}`,
/// `j ≤ 6`, length `≤ 3`.
fn surface_cases(m: &CohModel) -> Vec<(i64, u32, DescExpr)> {
    let mut gens = Vec::new();
    for c in ["1", "h", "pt", "u", "v"] {
        if let Some(class) = m.resolve(c) {
            let (i, _) = class.iter().next().unwrap();
            gens.extend((0..=6).map(|j| Gen::new(m, j, i)));
        }
    }
    let mut out = Vec::new();
    for n in 0..=1u32 {
        for k in -1..=4i64 {
            for d in products(m, &gens, 2, 3, 4 * n as i64 - 2 * k) {
                out.push((k, n, d));
            }
        }
    }
    out
}

fn fuzz_corpus() -> Vec<SurfaceSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..50).map(|i| random_surface_spec(&mut rng, &format!("fuzz{i}"))).collect()
}

fn criterion_7() -> Outcome {
    let mut evaluated = 0;
    for spec in fuzz_corpus() {
        // the two constraints the corpus is drawn from
        let (h20, h11) = (spec.h20 as i64, spec.h11 as i64);
        if spec.c2 != qi(2 + 2 * h20 + h11) || spec.c1sq != qi(10 + 10 * h20 - h11) {
            return Err(format!("{}: spec violates the constraints", spec.name));
        }
        let m = Arc::new(load_surface(&spec).map_err(|e| format!("{}: {e}", spec.name))?);
        let eval = SurfaceResidual::new(m.clone());
        for (k, n, d) in surface_cases(&m) {
            let r = eval.residual(k, &d, n).map_err(|e| e.to_string())?;
            if !r.is_zero() {
                return Err(format!("{}: L_{k} {} at n={n} gives {r}", spec.name, d.format(&m)));
            }
            evaluated += 1;
        }
    }
    Ok(format!("50 fuzzed specs, {evaluated} degree-matched residuals vanish"))
}

fn criterion_8() -> Outcome {
    let mut models: Vec<(String, CohModel)> = vec![
        ("cubic".into(), (*cubic_model()).clone()),
        ("plane".into(), load_surface(&plane_spec()).unwrap()),
        ("k3".into(), load_surface(&k3_spec()).unwrap()),
    ];
    for s in fuzz_corpus() {
        models.push((s.name.clone(), load_surface(&s).unwrap()));
    }
    for (name, m) in &models {
        let r = hrr_report(m);
        if !r.passed() {
            return Err(format!("hrr_report fails on {name}"));
        }
    }
    // two-path agreement on random pairs
    let corpus = fuzz_corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let menu = ["1", "ch4(1)", "ch3(h)", "ch2(pt)", "ch2(h)*ch3(1)"];
    for _ in 0..20 {
        let a = load_surface(&corpus[rng.random_range(0..corpus.len())]).unwrap();
        let b = load_surface(&corpus[rng.random_range(0..corpus.len())]).unwrap();
        let union = a.disjoint_union(&b, "union").unwrap();
        for x in menu {
            for y in menu {
                let dx = parse_insertion(x, &a).unwrap();
                let dy = parse_insertion(y, &b).unwrap();
                let joined = &embed_in_union(&dx, 0) * &embed_in_union(&dy, a.len());
                for n in 0..=1 {
                    if bracket_hilb(n, &joined, &union) != disconnected_bracket(&[(&a, &dx), (&b, &dy)], n) {
                        return Err(format!("disconnected {x} | {y} at n={n}"));
                    }
                }
            }
        }
    }
    // rewrites against realized brackets on the cubic
    let m = cubic_model();
    let p = OperatorPreset::threefold(m.clone());
    let fano = FanoModel::new();
    let beta = BTreeMap::from([(m.index_of("H").unwrap(), qi(1))]);
    for (rule, factor) in [("ch2(1)", qi(0)), ("ch2(H)", qi(1))] {
        for t in 0..=4 {
            for d in cubic_products(2, t) {
                let e = &ins(rule) * &d;
                for n in 0..=N_MAX {
                    let lhs = bracket(n + 1, &e, &fano).map_err(|e| e.to_string())?;
                    let rhs = bracket(n + 1, &d, &fano).map_err(|e| e.to_string())?.scale(&factor);
                    let rewritten = bracket(n + 1, &p.reduction_rewrite(&e, &beta, n as i64 + 1, &qi(2)), &fano).unwrap();
                    if lhs != rhs || lhs != rewritten {
                        return Err(format!("{rule} rewrite on {} at n+1={}", d.format(&m), n + 1));
                    }
                }
            }
        }
    }
    for t in 0..=4 {
        for d in cubic_products(2, t) {
            let e = &ins("ch3(1)") * &d;
            for n in 0..=N_MAX {
                // dilaton: ch3(1) = n+1 - d_beta/2 on P_{n+1}
                let lhs = bracket(n + 1, &e, &fano).unwrap();
                let rhs = bracket(n + 1, &d, &fano).unwrap().scale(&qi(n as i64));
                if lhs != rhs {
                    return Err(format!("dilaton on {} at n+1={}", d.format(&m), n + 1));
                }
            }
        }
    }
    let report = run_suite("operator-identities", &VerifyOptions::default()).map_err(|e| e.to_string())?;
    for row in report.rows.iter().filter(|r| r.id.contains("reduction-case")) {
        if !row.passed() {
            return Err(format!("{}: {}", row.id, row.computed));
        }
    }
    Ok(format!("hrr on {} models, disconnected pairs, rewrites, reduction cases (1)-(5)", models.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("cubic partition functions", criterion_1),
        ("functional equation", criterion_2),
        ("Fano geometry", criterion_3),
        ("virtual class and ch5(1)", criterion_4),
        ("Virasoro on the cubic", criterion_5),
        ("collapsed operators", criterion_6),
        ("surface Virasoro at n <= 1", criterion_7),
        ("structural identities", criterion_8),
    ];
    // criteria whose stated value is known to be wrong; see the ledger entry on ch5(1)
    const KNOWN_RED: [usize; 1] = [4];
    let mut failed = 0;
    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_RED.contains(&(i + 1));
        match outcome {
            Ok(detail) => {
                println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", i + 1);
                if known {
                    unexpected.push(format!("criterion {} is listed as known red but passes", i + 1));
                }
            }
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.1}s]", i + 1);
                if !known {
                    unexpected.push(format!("criterion {} fails", i + 1));
                }
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if unexpected.is_empty() {
        if failed > 0 {
            println!("acceptance: every failure is a documented defect of the stated value");
        }
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            println!("acceptance: unexpected result: {u}");
        }
        ExitCode::FAILURE
    }
}
