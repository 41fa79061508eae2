//! Text formats: insertion products and surface spec files.

use std::collections::BTreeMap;

use num_traits::One;
use thiserror::Error;

use crate::cohmodel::{CohClass, CohModel};
use crate::descalg::DescExpr;
use crate::exact::{parse_rational, Matrix, Rational};
use crate::hilbsurf::SurfaceSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {message}")]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

fn err_at(pos: usize, message: impl Into<String>) -> ParseError {
    ParseError { location: format!("column {}", pos + 1), message: message.into() }
}

/// Characters with their original column, whitespace removed.
fn squeeze(s: &str) -> Vec<(usize, char)> {
    s.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect()
}

struct Cursor<'a> {
    chars: &'a [(usize, char)],
    at: usize,
    end_col: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|(_, c)| *c)
    }

    fn col(&self) -> usize {
        self.chars.get(self.at).map(|(p, _)| *p).unwrap_or(self.end_col)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err_at(self.col(), format!("expected '{c}'")))
        }
    }

    fn take_while<F: Fn(char) -> bool>(&mut self, f: F) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| f(*c)) {
            s.push(c);
            self.at += 1;
        }
        s
    }

    /// `digits [/ digits]`
    fn number(&mut self) -> Result<Option<Rational>, ParseError> {
        let start = self.col();
        let mut s = self.take_while(|c| c.is_ascii_digit());
        if s.is_empty() {
            return Ok(None);
        }
        if self.eat('/') {
            let d = self.take_while(|c| c.is_ascii_digit());
            if d.is_empty() {
                return Err(err_at(self.col(), "expected a denominator"));
            }
            s = format!("{s}/{d}");
        }
        parse_rational(&s).map(Some).ok_or_else(|| err_at(start, format!("bad number {s}")))
    }

    fn symbol(&mut self) -> String {
        let mut s = self.take_while(|c| c.is_ascii_alphabetic());
        s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        s
    }
}

/// `term (('+' | '-') term)*` with `term = [number ['*']] symbol | number`.
fn class_expr(cur: &mut Cursor, m: &CohModel) -> Result<CohClass, ParseError> {
    let mut total = CohClass::zero();
    let mut negative = cur.eat('-');
    loop {
        let start = cur.col();
        let scalar = cur.number()?;
        let explicit_star = scalar.is_some() && cur.eat('*');
        let class = if cur.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            let name = cur.symbol();
            let class = m
                .resolve(&name)
                .ok_or_else(|| err_at(start, format!("unknown class '{name}' for model {}", m.name())))?;
            class.scale(scalar.as_ref().unwrap_or(&Rational::one()))
        } else if let Some(c) = scalar {
            if explicit_star {
                return Err(err_at(cur.col(), "expected a class after '*'"));
            }
            // a bare number is a multiple of the unit
            m.unit().scale(&c)
        } else {
            return Err(err_at(start, "expected a class"));
        };
        total = if negative { &total - &class } else { &total + &class };
        if cur.eat('+') {
            negative = false;
        } else if cur.eat('-') {
            negative = true;
        } else {
            return Ok(total);
        }
    }
}

/// Parses `chK(EXPR)` factors joined by `*`, e.g. `ch4(1)*ch3(H)` or
/// `ch2(g1) * ch2(1/3 H2 - g6)`. The single token `1` is the empty product.
pub fn parse_insertion(s: &str, m: &CohModel) -> Result<DescExpr, ParseError> {
    let chars = squeeze(s);
    let mut cur = Cursor { chars: &chars, at: 0, end_col: s.chars().count() };
    if chars.iter().map(|(_, c)| *c).eq("1".chars()) {
        return Ok(DescExpr::one());
    }
    let mut out = DescExpr::one();
    loop {
        let start = cur.col();
        if cur.take_while(|c| c.is_ascii_alphabetic()) != "ch" {
            return Err(err_at(start, "expected chK(...)"));
        }
        let k = cur.take_while(|c| c.is_ascii_digit());
        let k: u32 = k.parse().map_err(|_| err_at(cur.col(), "expected a descendent index"))?;
        cur.expect('(')?;
        let class = class_expr(&mut cur, m)?;
        cur.expect(')')?;
        out = &out * &DescExpr::ch(m, k, &class);
        if cur.peek().is_none() {
            return Ok(out);
        }
        cur.expect('*')?;
    }
}

fn line_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { location: format!("line {line}"), message: message.into() }
}

/// `[a, b; c, d]` or `[[a, b], [c, d]]`; `[]` is empty.
fn parse_matrix(v: &str, line: usize) -> Result<Vec<Vec<Rational>>, ParseError> {
    let t: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| line_err(line, "matrices are written in brackets"))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let rows: Vec<String> = if inner.starts_with('[') {
        let body = inner
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| line_err(line, "unbalanced brackets"))?;
        body.split("],[").map(str::to_string).collect()
    } else {
        inner.split(';').map(str::to_string).collect()
    };
    let mut out = Vec::new();
    for r in rows {
        let mut row = Vec::new();
        for x in r.split(',') {
            row.push(parse_rational(x).ok_or_else(|| line_err(line, format!("bad number '{x}'")))?);
        }
        out.push(row);
    }
    if out.iter().any(|r| r.len() != out[0].len()) {
        return Err(line_err(line, "rows have different lengths"));
    }
    Ok(out)
}

fn square(rows: Vec<Vec<Rational>>, n: usize, key: &str, line: usize) -> Result<Matrix, ParseError> {
    if n == 0 && rows.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(line_err(line, format!("{key} must be {n}x{n}")));
    }
    Ok(Matrix::from_rows(rows))
}

const KEYS: [&str; 8] = ["name", "h20", "h11", "c1", "intersection", "pairing20_02", "c1sq", "c2"];

/// Reads a surface spec: one `key = value` per line, `#` starts a comment.
pub fn parse_surface_spec(text: &str) -> Result<SurfaceSpec, ParseError> {
    let mut values: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| line_err(line, "expected key = value"))?;
        let k = k.trim();
        let Some(key) = KEYS.iter().find(|x| **x == k) else {
            return Err(line_err(line, format!("unknown key '{k}'")));
        };
        if values.insert(key, (line, v.trim().to_string())).is_some() {
            return Err(line_err(line, format!("duplicate key '{k}'")));
        }
    }
    let get = |k: &str| {
        values
            .get(k)
            .cloned()
            .ok_or_else(|| ParseError { location: "file".into(), message: format!("missing key '{k}'") })
    };
    let int = |k: &str| -> Result<usize, ParseError> {
        let (line, v) = get(k)?;
        v.parse().map_err(|_| line_err(line, format!("{k} must be a non-negative integer")))
    };
    let rat = |k: &str| -> Result<Rational, ParseError> {
        let (line, v) = get(k)?;
        parse_rational(&v).ok_or_else(|| line_err(line, format!("{k} must be a rational number")))
    };
    let (h20, h11) = (int("h20")?, int("h11")?);
    let (c1_line, c1_text) = get("c1")?;
    let c1_rows = parse_matrix(&c1_text, c1_line)?;
    let c1 = match c1_rows.as_slice() {
        [] if h11 == 0 => Vec::new(),
        [row] => row.clone(),
        _ => return Err(line_err(c1_line, "c1 is a single bracketed row")),
    };
    if c1.len() != h11 {
        return Err(line_err(c1_line, format!("c1 needs {h11} entries")));
    }
    let (il, iv) = get("intersection")?;
    let (pl, pv) = get("pairing20_02")?;
    Ok(SurfaceSpec {
        name: get("name")?.1,
        h20,
        h11,
        c1,
        intersection: square(parse_matrix(&iv, il)?, h11, "intersection", il)?,
        pairing20_02: square(parse_matrix(&pv, pl)?, h20, "pairing20_02", pl)?,
        c1sq: rat("c1sq")?,
        c2: rat("c2")?,
    })
}

/// Writes a spec in the format read by [`parse_surface_spec`].
pub fn format_surface_spec(s: &SurfaceSpec) -> String {
    let row = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let matrix = |m: &Matrix| {
        let rows: Vec<String> = (0..m.rows()).map(|i| row(m.row(i))).collect();
        format!("[{}]", rows.join("; "))
    };
    format!(
        "name = {}\nh20 = {}\nh11 = {}\nc1 = [{}]\nintersection = {}\npairing20_02 = {}\nc1sq = {}\nc2 = {}\n",
        s.name,
        s.h20,
        s.h11,
        row(&s.c1),
        matrix(&s.intersection),
        matrix(&s.pairing20_02),
        s.c1sq,
        s.c2
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubicpt::cubic_model;
    use crate::descalg::Gen;
    use crate::exact::{q, qi};
    use crate::hilbsurf::{k3_spec, plane_spec};

    #[test]
    fn insertion_products() {
        let m = cubic_model();
        let d = parse_insertion("ch4(1) * ch3( H )", &m).unwrap();
        let want = &DescExpr::gen(Gen::new(&m, 4, 0)) * &DescExpr::gen(Gen::new(&m, 3, 1));
        assert_eq!(d, want);
        assert_eq!(parse_insertion("1", &m).unwrap(), DescExpr::one());
        let p = parse_insertion("ch2(p)", &m).unwrap();
        assert_eq!(p, DescExpr::gen(Gen::new(&m, 2, 3)).scale(&q(1, 3)));
        let lin = parse_insertion("ch2(2H - 1/3*H2 + 3)", &m).unwrap();
        assert_eq!(lin.terms().len(), 3);
        assert_eq!(lin.terms().values().cloned().collect::<Vec<_>>(), vec![qi(3), qi(2), q(-1, 3)]);
    }

    #[test]
    fn odd_insertions_anticommute() {
        let m = cubic_model();
        let a = parse_insertion("ch2(g1)*ch2(g6)", &m).unwrap();
        let b = parse_insertion("ch2(g6)*ch2(g1)", &m).unwrap();
        assert_eq!(a, -&b);
        assert!(parse_insertion("ch2(g1)*ch2(g1)", &m).unwrap().is_zero());
    }

    #[test]
    fn insertion_errors_have_locations() {
        let m = cubic_model();
        let e = parse_insertion("ch4(Q)", &m).unwrap_err();
        assert_eq!(e.location, "column 5");
        assert!(parse_insertion("ch4(1", &m).is_err());
        assert!(parse_insertion("cx4(1)", &m).is_err());
        assert!(parse_insertion("ch4(1)ch3(H)", &m).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        for s in [plane_spec(), k3_spec()] {
            assert_eq!(parse_surface_spec(&format_surface_spec(&s)).unwrap(), s);
        }
        let nested = "name = x\nh20 = 0\nh11 = 2\nc1 = [1, 1]\nintersection = [[0, 1], [1, 0]]\npairing20_02 = []\nc1sq = 2\nc2 = 4 # comment\n";
        let s = parse_surface_spec(nested).unwrap();
        assert_eq!(s.intersection[(0, 1)], qi(1));
    }

    #[test]
    fn spec_rejects_unknown_keys() {
        let text = format_surface_spec(&plane_spec()) + "genus = 0\n";
        let e = parse_surface_spec(&text).unwrap_err();
        assert_eq!(e.location, "line 9");
        let missing = format_surface_spec(&plane_spec()).replace("c2 = 3\n", "");
        assert!(parse_surface_spec(&missing).is_err());
    }
}
