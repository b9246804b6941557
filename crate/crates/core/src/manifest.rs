//! JSON manifests for presentations, pairing seeds and Lie bialgebras.
//!
//! Coefficients are written as `{"v_min", "order", "coeffs"}` objects; on
//! input a coefficient may also be a generator-free expression string such
//! as `"exp(2*h)"` or `"-1/2*h^2"`.
//!
//! ```
//! use qdp::examples::builtin;
//! use qdp::manifest::{dump_presentation, load_presentation};
//!
//! let p = builtin("heisenberg3").unwrap().quea;
//! let text = dump_presentation(&p);
//! let q = load_presentation(&text).unwrap();
//! assert_eq!(dump_presentation(&q), text);
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::classical::LieBialgebra;
use crate::error::{Error, Result};
use crate::freealg::{Element, Monomial, TensorElement};
use crate::hopf::{Model, Presentation};
use crate::pairing::{PairingSeed, SeedSlot};
use crate::series::{parse_rational, HSeries};

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffRaw {
    Series(HSeries),
    Expr(String),
}

impl CoeffRaw {
    fn resolve(&self, order: i64) -> Result<HSeries> {
        match self {
            CoeffRaw::Series(s) => Ok(s.clone()),
            CoeffRaw::Expr(src) => crate::expr::parse_series(src, order),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRaw {
    monomial: Vec<u32>,
    coeff: CoeffRaw,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorTermRaw {
    monomials: Vec<Vec<u32>>,
    coeff: CoeffRaw,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationRaw {
    i: usize,
    j: usize,
    r: Vec<TermRaw>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestRaw {
    name: String,
    model: Model,
    h_order: i64,
    degree_cap: u32,
    generators: Vec<String>,
    #[serde(default)]
    relations: Vec<RelationRaw>,
    #[serde(default)]
    coproduct: BTreeMap<String, Vec<TensorTermRaw>>,
    #[serde(default)]
    counit: BTreeMap<String, CoeffRaw>,
    #[serde(default)]
    antipode: BTreeMap<String, Vec<TermRaw>>,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Manifest(e.to_string())
}

fn element(id: &Arc<str>, terms: &[TermRaw], order: i64) -> Result<Element> {
    let mut out = Element::zero(id);
    for t in terms {
        out.add_term(Monomial::from_exps(t.monomial.clone()), t.coeff.resolve(order)?);
    }
    Ok(out)
}

fn tensor(terms: &[TensorTermRaw], order: i64) -> Result<TensorElement> {
    let mut out = TensorElement::zero(2);
    for t in terms {
        if t.monomials.len() != 2 {
            return Err(Error::Manifest(format!(
                "coproduct term has {} tensor slots, expected 2",
                t.monomials.len()
            )));
        }
        let key = t.monomials.iter().map(|e| Monomial::from_exps(e.clone())).collect();
        out.add_term(key, t.coeff.resolve(order)?);
    }
    Ok(out)
}

/// Parses and validates a presentation manifest.
pub fn load_presentation(text: &str) -> Result<Presentation> {
    let raw: ManifestRaw = serde_json::from_str(text).map_err(json_err)?;
    let n = raw.h_order;
    let gens: Vec<&str> = raw.generators.iter().map(String::as_str).collect();
    let mut b = Presentation::builder(&raw.name, raw.model, &gens, n, raw.degree_cap);
    let id: Arc<str> = Arc::from(raw.name.as_str());
    let index = |g: &str| -> Result<usize> {
        raw.generators
            .iter()
            .position(|x| x == g)
            .ok_or_else(|| Error::UnknownGenerator(g.to_string()))
    };
    for r in &raw.relations {
        b.relation(r.i, r.j, element(&id, &r.r, n)?);
    }
    for (g, t) in &raw.coproduct {
        b.coproduct(index(g)?, tensor(t, n)?);
    }
    for (g, c) in &raw.counit {
        b.counit(index(g)?, c.resolve(n)?);
    }
    for (g, s) in &raw.antipode {
        b.antipode(index(g)?, element(&id, s, n)?);
    }
    b.build()
}

/// Reads a manifest file.
pub fn read_presentation(path: &std::path::Path) -> Result<Presentation> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    load_presentation(&text)
}

struct ByGenerator<'a, T>(&'a [String], Vec<&'a T>);

impl<T: Serialize> Serialize for ByGenerator<'_, T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (g, v) in self.0.iter().zip(&self.1) {
            m.serialize_entry(g, v)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct RelationOut {
    i: usize,
    j: usize,
    r: Element,
}

#[derive(Serialize)]
struct ManifestOut<'a> {
    name: &'a str,
    model: Model,
    h_order: i64,
    degree_cap: u32,
    generators: &'a [String],
    relations: Vec<RelationOut>,
    coproduct: ByGenerator<'a, TensorElement>,
    counit: ByGenerator<'a, HSeries>,
    antipode: ByGenerator<'a, Element>,
}

/// Pretty-printed manifest with generator-ordered maps and a trailing
/// newline.
pub fn dump_presentation(p: &Presentation) -> String {
    let n = p.ngens();
    let g = p.generators();
    let mut relations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let r = p.relation(i, j);
            if !r.is_zero() {
                relations.push(RelationOut { i, j, r });
            }
        }
    }
    let out = ManifestOut {
        name: p.name(),
        model: p.model(),
        h_order: p.h_order(),
        degree_cap: p.degree_cap(),
        generators: g,
        relations,
        coproduct: ByGenerator(g, (0..n).map(|i| p.coproduct_of(i)).collect()),
        counit: ByGenerator(g, (0..n).map(|i| p.counit_of(i)).collect()),
        antipode: ByGenerator(g, (0..n).map(|i| p.antipode_of(i)).collect()),
    };
    let mut s = serde_json::to_string_pretty(&out).expect("manifest serialises");
    s.push('\n');
    s
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedValue {
    lgen: String,
    rgen: String,
    value: HSeries,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedFile {
    left: String,
    right: String,
    values: Vec<SeedValue>,
}

fn slot(p: &Presentation, name: &str) -> Result<SeedSlot> {
    if name == "1" {
        return Ok(SeedSlot::Unit);
    }
    p.generator_index(name)
        .map(SeedSlot::Gen)
        .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
}

fn slot_name(p: &Presentation, s: SeedSlot) -> String {
    match s {
        SeedSlot::Unit => "1".into(),
        SeedSlot::Gen(i) => p.generators()[i].clone(),
    }
}

/// Parses a seed; generator names are resolved against the two
/// presentations and `"1"` names the unit.
pub fn load_seed(text: &str, left: &Presentation, right: &Presentation) -> Result<PairingSeed> {
    let raw: SeedFile = serde_json::from_str(text).map_err(json_err)?;
    if raw.left != left.name() || raw.right != right.name() {
        return Err(Error::InvalidPairing(format!(
            "seed pairs {} with {}, not {} with {}",
            raw.left,
            raw.right,
            left.name(),
            right.name()
        )));
    }
    let mut seed = PairingSeed::new(&raw.left, &raw.right);
    for v in raw.values {
        seed.set(slot(left, &v.lgen)?, slot(right, &v.rgen)?, v.value);
    }
    Ok(seed)
}

pub fn dump_seed(seed: &PairingSeed, left: &Presentation, right: &Presentation) -> String {
    let out = SeedFile {
        left: seed.left.clone(),
        right: seed.right.clone(),
        values: seed
            .values
            .iter()
            .map(|(&(l, r), v)| SeedValue {
                lgen: slot_name(left, l),
                rgen: slot_name(right, r),
                value: v.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&out).expect("seed serialises");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LieRaw {
    dim: usize,
    basis: Vec<String>,
    bracket: Vec<(usize, usize, usize, String)>,
    cobracket: Vec<(usize, usize, usize, String)>,
}

/// Parses the Lie bialgebra format written by its `Serialize` impl.
pub fn load_lie_bialgebra(text: &str) -> Result<LieBialgebra> {
    let raw: LieRaw = serde_json::from_str(text).map_err(json_err)?;
    if raw.dim != raw.basis.len() {
        return Err(Error::DimensionMismatch {
            left: raw.dim,
            right: raw.basis.len(),
        });
    }
    let mut l = LieBialgebra::with_names(raw.basis);
    let check = |a: usize, b: usize, c: usize| -> Result<()> {
        if a.max(b).max(c) >= raw.dim {
            return Err(Error::Manifest(format!("index out of range in ({a}, {b}, {c})")));
        }
        Ok(())
    };
    for (i, j, k, q) in &raw.bracket {
        check(*i, *j, *k)?;
        l.set_bracket(*i, *j, *k, parse_rational(q)?);
    }
    for (k, i, j, q) in &raw.cobracket {
        check(*i, *j, *k)?;
        l.set_cobracket(*k, *i, *j, parse_rational(q)?);
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{builtin_with, NAMES};

    #[test]
    fn builtins_round_trip() {
        for name in NAMES {
            let p = builtin_with(name, 4, 4).unwrap().quea;
            let text = dump_presentation(&p);
            let q = load_presentation(&text).unwrap();
            assert_eq!(dump_presentation(&q), text, "{name}");
        }
    }

    #[test]
    fn expression_coefficients() {
        let text = r#"{
          "name": "t", "model": "POLY", "h_order": 3, "degree_cap": 3,
          "generators": ["x", "y"],
          "relations": [{"i": 0, "j": 1, "r": [{"monomial": [0, 1], "coeff": "-1"}]}],
          "coproduct": {"y": [
            {"monomials": [[0, 1], [0, 0]], "coeff": "1"},
            {"monomials": [[0, 0], [0, 1]], "coeff": "1"},
            {"monomials": [[1, 0], [0, 1]], "coeff": "exp(h) - 1"}
          ]}
        }"#;
        let p = load_presentation(text).unwrap();
        let c = p.coproduct_of(1).coeff(&[Monomial::from_exps(vec![1, 0]), Monomial::from_exps(vec![0, 1])]);
        assert_eq!(c.unwrap().to_string(), "h + 1/2*h^2 + 1/6*h^3");
    }

    #[test]
    fn bad_manifests() {
        assert!(matches!(load_presentation("{"), Err(Error::Manifest(_))));
        let unknown = r#"{"name":"t","model":"POLY","h_order":2,"degree_cap":2,"generators":["x"],
            "counit":{"q":"0"}}"#;
        assert_eq!(load_presentation(unknown).unwrap_err(), Error::UnknownGenerator("q".into()));
        let counit = r#"{"name":"t","model":"POLY","h_order":2,"degree_cap":2,"generators":["x"],
            "counit":{"x":"1"}}"#;
        assert!(matches!(load_presentation(counit), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn lie_round_trip() {
        let b = builtin_with("borel2", 2, 2).unwrap();
        let text = serde_json::to_string(&b.lie).unwrap();
        assert_eq!(load_lie_bialgebra(&text).unwrap(), b.lie);
    }
}
