//! The text grammar and JSON forms for decorated diagrams.
//!
//! Text specs look like `A4[X=2,3; tau=1:4]` or `G2~v[X=1]`: a catalogue
//! name followed by optional clauses for X (node labels), tau (transposed
//! label pairs) and chi (label: value with Gaussian-rational values written
//! `re` or `re|im`).

use num::{BigInt, BigRational, Zero};
use serde_json::{json, Value};

use crate::cartan::CartanMatrix;
use crate::catalogue::cartan_by_name;
use crate::decoration::{Decoration, EnrichedDecoration};
use crate::error::{Error, Result};
use crate::scalar::{Gaussian, Rat};

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { s, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::ParseError { position: self.pos, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if pred(c)) {
            self.bump();
        }
        &self.s[start..self.pos]
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some('-') {
            self.bump();
            true
        } else {
            false
        };
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.error("expected an integer"));
        }
        let v: i64 = digits.parse().map_err(|_| self.error("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn rational(&mut self) -> Result<Rat> {
        let num = self.integer()?;
        if self.peek() == Some('/') {
            self.bump();
            let den = self.integer()?;
            if den == 0 {
                return Err(self.error("zero denominator"));
            }
            Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
        } else {
            Ok(BigRational::from_integer(BigInt::from(num)))
        }
    }

    fn gaussian(&mut self) -> Result<Gaussian> {
        let re = self.rational()?;
        if self.peek() == Some('|') {
            self.bump();
            let im = self.rational()?;
            Ok(Gaussian::new(re, im))
        } else {
            Ok(Gaussian::from_rat(re))
        }
    }
}

/// Parses a diagram spec into an enriched decoration; chi defaults to 1.
pub fn parse_spec(input: &str) -> Result<EnrichedDecoration> {
    let mut c = Cursor::new(input.trim_end());
    c.skip_ws();
    let name = c.take_while(|ch| ch.is_ascii_alphanumeric() || "~'()".contains(ch));
    if name.is_empty() {
        return Err(c.error("expected a diagram name"));
    }
    let cartan = cartan_by_name(name).map_err(|_| Error::ParseError {
        position: 0,
        message: format!("unknown diagram name `{name}`"),
    })?;
    let n = cartan.size();
    c.skip_ws();
    c.expect('[')?;
    let mut x: Vec<usize> = Vec::new();
    let mut tau: Vec<usize> = (0..n).collect();
    let mut chi: Vec<Gaussian> = vec![Gaussian::one(); n];
    loop {
        c.skip_ws();
        if c.peek() == Some(']') {
            c.bump();
            break;
        }
        let keyword = c.take_while(|ch| ch.is_ascii_alphabetic());
        c.skip_ws();
        c.expect('=')?;
        match keyword {
            "X" => loop {
                c.skip_ws();
                let label = c.integer()?;
                let idx = resolve_label(&cartan, label, &mut c)?;
                x.push(idx);
                c.skip_ws();
                if c.peek() == Some(',') {
                    c.bump();
                } else {
                    break;
                }
            },
            "tau" => loop {
                c.skip_ws();
                let a = c.integer()?;
                let ai = resolve_label(&cartan, a, &mut c)?;
                c.skip_ws();
                c.expect(':')?;
                c.skip_ws();
                let b = c.integer()?;
                let bi = resolve_label(&cartan, b, &mut c)?;
                tau[ai] = bi;
                tau[bi] = ai;
                c.skip_ws();
                if c.peek() == Some(',') {
                    c.bump();
                } else {
                    break;
                }
            },
            "chi" => loop {
                c.skip_ws();
                let a = c.integer()?;
                let ai = resolve_label(&cartan, a, &mut c)?;
                c.skip_ws();
                c.expect(':')?;
                c.skip_ws();
                chi[ai] = c.gaussian()?;
                c.skip_ws();
                if c.peek() == Some(',') {
                    c.bump();
                } else {
                    break;
                }
            },
            other => {
                return Err(c.error(format!("unknown clause `{other}` (expected X, tau or chi)")))
            }
        }
        c.skip_ws();
        if c.peek() == Some(';') {
            c.bump();
        }
    }
    c.skip_ws();
    if !c.rest().is_empty() {
        return Err(c.error("trailing input after `]`"));
    }
    Ok(EnrichedDecoration { dec: Decoration::new(cartan, x, tau), chi })
}

fn resolve_label(cartan: &CartanMatrix, label: i64, c: &mut Cursor) -> Result<usize> {
    if label < 0 {
        return Err(c.error(format!("negative node label {label}")));
    }
    cartan
        .index_of_label(label as usize)
        .ok_or_else(|| c.error(format!("node label {label} not in the diagram")))
}

fn rat_str(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn gaussian_str(g: &Gaussian) -> String {
    if g.im.is_zero() {
        rat_str(&g.re)
    } else {
        format!("{}|{}", rat_str(&g.re), rat_str(&g.im))
    }
}

/// Canonical text form; `parse_spec(render_spec(e)) == e` for catalogue
/// diagrams.
pub fn render_spec(edec: &EnrichedDecoration) -> String {
    let dec = &edec.dec;
    let cartan = &dec.cartan;
    let name = cartan.classify().to_string();
    let labels = cartan.labels();
    let mut clauses: Vec<String> = Vec::new();
    if !dec.x.is_empty() {
        let xs: Vec<String> = dec.x.iter().map(|&i| labels[i].to_string()).collect();
        clauses.push(format!("X={}", xs.join(",")));
    }
    let mut pairs: Vec<(usize, usize)> = (0..dec.n())
        .filter(|&i| dec.tau[i] > i)
        .map(|i| (labels[i], labels[dec.tau[i]]))
        .collect();
    pairs.sort_unstable();
    if !pairs.is_empty() {
        let ts: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        clauses.push(format!("tau={}", ts.join(",")));
    }
    let nontrivial: Vec<String> = (0..dec.n())
        .filter(|&i| !edec.chi[i].is_one())
        .map(|i| format!("{}:{}", labels[i], gaussian_str(&edec.chi[i])))
        .collect();
    if !nontrivial.is_empty() {
        clauses.push(format!("chi={}", nontrivial.join(",")));
    }
    format!("{name}[{}]", clauses.join("; "))
}

/// Builds a Cartan matrix from its JSON form: either
/// `{"cartan": {"matrix": [[..]]}}`, `{"cartan": {"name": "G2"}}`, or the
/// bare `{"name": "A", "rank": 4, "affine": false, "dual": false}`.
pub fn cartan_from_json(v: &Value) -> Result<CartanMatrix> {
    let inner = v.get("cartan").unwrap_or(v);
    if let Some(m) = inner.get("matrix") {
        let rows: Vec<Vec<i64>> = serde_json::from_value(m.clone()).map_err(|e| {
            Error::ParseError { position: 0, message: format!("bad matrix: {e}") }
        })?;
        return CartanMatrix::new(&rows);
    }
    if let Some(name) = inner.get("name").and_then(|x| x.as_str()) {
        if name.len() > 1 || inner.get("rank").is_none() {
            return cartan_by_name(name);
        }
        let rank = inner.get("rank").and_then(|x| x.as_u64()).unwrap_or(0) as usize;
        let affine = inner.get("affine").and_then(|x| x.as_bool()).unwrap_or(false);
        let dual = inner.get("dual").and_then(|x| x.as_bool()).unwrap_or(false);
        let prime = inner.get("prime").and_then(|x| x.as_bool()).unwrap_or(false);
        let name = if affine {
            crate::cartan::SimpleTypeName::affine(name.chars().next().unwrap(), rank, dual, prime)
        } else {
            crate::cartan::SimpleTypeName::finite(name.chars().next().unwrap(), rank)
        };
        return crate::catalogue::cartan_for(&name);
    }
    Err(Error::ParseError { position: 0, message: "expected `matrix` or `name`".into() })
}

/// JSON output mirroring the input plus the symmetrizer and type.
pub fn cartan_to_json(cm: &CartanMatrix) -> Value {
    let label = cm.classify();
    let kac: Vec<String> = label.factors.iter().filter_map(|f| f.kac_alias()).collect();
    json!({
        "cartan": { "matrix": cm.rows() },
        "epsilon": cm.epsilon(),
        "type": label.to_string(),
        "kac": kac,
        "labels": cm.labels(),
    })
}

/// JSON form of a decoration spec, mirroring the text grammar.
pub fn spec_to_json(edec: &EnrichedDecoration) -> Value {
    let dec = &edec.dec;
    let labels = dec.cartan.labels();
    let pairs: Vec<Vec<usize>> = (0..dec.n())
        .filter(|&i| dec.tau[i] > i)
        .map(|i| vec![labels[i], labels[dec.tau[i]]])
        .collect();
    let chi: serde_json::Map<String, Value> = (0..dec.n())
        .filter(|&i| !edec.chi[i].is_one())
        .map(|i| (labels[i].to_string(), Value::String(gaussian_str(&edec.chi[i]))))
        .collect();
    json!({
        "cartan": { "name": dec.cartan.classify().to_string() },
        "X": dec.x.iter().map(|&i| labels[i]).collect::<Vec<_>>(),
        "tau": pairs,
        "chi": chi,
        "text": render_spec(edec),
    })
}

/// Parses the JSON mirror of the grammar.
pub fn spec_from_json(v: &Value) -> Result<EnrichedDecoration> {
    let cartan = cartan_from_json(v)?;
    let n = cartan.size();
    let mut x = Vec::new();
    if let Some(arr) = v.get("X").and_then(|x| x.as_array()) {
        for item in arr {
            let label = item.as_u64().ok_or_else(|| Error::ParseError {
                position: 0,
                message: "X entries must be node labels".into(),
            })? as usize;
            x.push(cartan.index_of_label(label).ok_or_else(|| Error::ParseError {
                position: 0,
                message: format!("node label {label} not in the diagram"),
            })?);
        }
    }
    let mut tau: Vec<usize> = (0..n).collect();
    if let Some(arr) = v.get("tau").and_then(|x| x.as_array()) {
        for pair in arr {
            let p = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| Error::ParseError {
                position: 0,
                message: "tau entries must be pairs".into(),
            })?;
            let a = p[0].as_u64().unwrap_or(u64::MAX) as usize;
            let b = p[1].as_u64().unwrap_or(u64::MAX) as usize;
            let (ai, bi) = match (cartan.index_of_label(a), cartan.index_of_label(b)) {
                (Some(ai), Some(bi)) => (ai, bi),
                _ => {
                    return Err(Error::ParseError {
                        position: 0,
                        message: format!("bad tau pair [{a},{b}]"),
                    })
                }
            };
            tau[ai] = bi;
            tau[bi] = ai;
        }
    }
    let mut chi = vec![Gaussian::one(); n];
    if let Some(map) = v.get("chi").and_then(|x| x.as_object()) {
        for (k, val) in map {
            let label: usize = k.parse().map_err(|_| Error::ParseError {
                position: 0,
                message: format!("bad chi key `{k}`"),
            })?;
            let idx = cartan.index_of_label(label).ok_or_else(|| Error::ParseError {
                position: 0,
                message: format!("node label {label} not in the diagram"),
            })?;
            let s = val.as_str().ok_or_else(|| Error::ParseError {
                position: 0,
                message: "chi values must be strings".into(),
            })?;
            let mut c = Cursor::new(s);
            chi[idx] = c.gaussian()?;
        }
    }
    Ok(EnrichedDecoration { dec: Decoration::new(cartan, x, tau), chi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoration::is_compatible;
    use crate::scalar::ratio;

    #[test]
    fn parse_basic_specs() {
        let e = parse_spec("A2[X=1]").unwrap();
        assert_eq!(e.dec.x, vec![0]);
        assert!(is_compatible(&e.dec));
        let e = parse_spec("A2[]").unwrap();
        assert!(e.dec.x.is_empty());
        let e = parse_spec("A4[X=2,3; tau=1:4]").unwrap();
        assert_eq!(e.dec.x, vec![1, 2]);
        assert_eq!(e.dec.tau, vec![3, 1, 2, 0]);
        let e = parse_spec("G2~v[X=1]").unwrap();
        assert_eq!(e.dec.x, vec![e.dec.cartan.index_of_label(1).unwrap()]);
        let e = parse_spec("A2[tau=1:2; chi=1:1/2|3,2:2]").unwrap();
        assert_eq!(e.chi[0], Gaussian::new(ratio(1, 2), ratio(3, 1)));
        assert_eq!(e.chi[1], Gaussian::from_int(2));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_spec("A2[Y=1]") {
            Err(Error::ParseError { position, .. }) => assert!(position > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_spec("Q9[]").is_err());
        assert!(parse_spec("A2[X=7]").is_err());
        assert!(parse_spec("A2[X=1] junk").is_err());
    }

    #[test]
    fn render_roundtrip() {
        for s in ["A2[]", "A2[X=1]", "A4[X=2,3; tau=1:4]", "G2~v[X=1]", "A2[tau=1:2; chi=1:2,2:1/2]"] {
            let e = parse_spec(s).unwrap();
            let rendered = render_spec(&e);
            let back = parse_spec(&rendered).unwrap();
            assert_eq!(back, e, "{s} -> {rendered}");
        }
    }

    #[test]
    fn cartan_json_forms() {
        let v: Value = serde_json::from_str(r#"{"cartan": {"name": "G2"}}"#).unwrap();
        let cm = cartan_from_json(&v).unwrap();
        assert_eq!(cm.rows(), vec![vec![2, -1], vec![-3, 2]]);
        let v: Value = serde_json::from_str(r#"{"cartan": {"matrix": [[2,-1],[-3,2]]}}"#).unwrap();
        assert_eq!(cartan_from_json(&v).unwrap().rows(), cm.rows());
        let v: Value =
            serde_json::from_str(r#"{"name": "A", "rank": 4, "affine": false, "dual": false}"#)
                .unwrap();
        assert_eq!(cartan_from_json(&v).unwrap().size(), 4);
        let out = cartan_to_json(&cm);
        assert_eq!(out["epsilon"], json!([3, 1]));
        assert_eq!(out["type"], json!("G2"));
    }

    #[test]
    fn spec_json_roundtrip() {
        let e = parse_spec("A4[X=2,3; tau=1:4]").unwrap();
        let v = spec_to_json(&e);
        let back = spec_from_json(&v).unwrap();
        assert_eq!(back, e);
    }
}
