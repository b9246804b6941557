//! Sparse elements of a presented algebra and of its tensor powers.
//!
//! Keys are ordered monomials `x_1^{e_1}···x_n^{e_n}` stored as exponent
//! vectors. Nothing here knows about relations: an [`Element`] is only
//! meaningful once it has been produced by the normal-form engine in
//! [`crate::hopf`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::{One, Signed};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::series::{HSeries, Valuation};

/// An ordered monomial, compared degree-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    deg: u32,
}

impl Monomial {
    pub fn one(ngens: usize) -> Self {
        Monomial {
            exps: vec![0; ngens],
            deg: 0,
        }
    }

    pub fn generator(ngens: usize, i: usize) -> Self {
        let mut m = Self::one(ngens);
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        let deg = exps.iter().sum();
        Monomial { exps, deg }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn ngens(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    /// Index of the last letter of the ordered word.
    pub fn last_gen(&self) -> Option<usize> {
        self.exps.iter().rposition(|&e| e > 0)
    }

    /// Index of the first letter of the ordered word.
    pub fn first_gen(&self) -> Option<usize> {
        self.exps.iter().position(|&e| e > 0)
    }

    /// `self · x_i` as a raw exponent bump; only an ordered monomial when
    /// `i` is at least [`Monomial::last_gen`].
    pub fn bumped(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.exps[i] += 1;
        m.deg += 1;
        m
    }

    /// Removes one copy of `x_i`.
    pub fn lowered(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.exps[i] -= 1;
        m.deg -= 1;
        m
    }

    /// The letters of the ordered word, e.g. `x1^2 x3` gives `[0, 0, 2]`.
    pub fn word(&self) -> Vec<usize> {
        self.exps
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize))
            .collect()
    }

    pub fn to_expr(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push('*');
            }
            out.push_str(&names[i]);
            if e > 1 {
                let _ = write!(out, "^{e}");
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }

    /// All ordered monomials of degree exactly `deg` in `ngens` generators.
    pub fn all_of_degree(ngens: usize, deg: u32) -> Vec<Monomial> {
        fn rec(ngens: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i + 1 == ngens {
                cur.push(left);
                out.push(Monomial::from_exps(cur.clone()));
                cur.pop();
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e);
                rec(ngens, i + 1, left - e, cur, out);
                cur.pop();
            }
        }
        if ngens == 0 {
            return if deg == 0 { vec![Monomial::one(0)] } else { vec![] };
        }
        let mut out = Vec::new();
        rec(ngens, 0, deg, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// All ordered monomials of degree at most `deg`, ascending.
    pub fn all_up_to_degree(ngens: usize, deg: u32) -> Vec<Monomial> {
        (0..=deg)
            .flat_map(|d| Monomial::all_of_degree(ngens, d))
            .collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg
            .cmp(&other.deg)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.exps.serialize(s)
    }
}

fn min_valuation<'a>(it: impl Iterator<Item = &'a HSeries>) -> Valuation {
    it.map(HSeries::valuation).min().unwrap_or(Valuation::Infinity)
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, HSeries>, key: K, c: HSeries) {
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            let sum = o.get() + &c;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

/// Formats `coeff·body` in expression syntax; `first` controls the sign.
fn fmt_term(out: &mut String, c: &HSeries, body: &str, first: bool) {
    let terms: Vec<_> = c.terms().collect();
    let simple = terms.len() == 1;
    if simple {
        let (k, q) = terms[0];
        let neg = q.is_negative();
        if first {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = q.abs();
        let mut parts: Vec<String> = Vec::new();
        if !mag.is_one() || (k == 0 && body == "1") {
            parts.push(mag.to_string());
        }
        match k {
            0 => {}
            1 => parts.push("h".into()),
            _ => parts.push(format!("h^{k}")),
        }
        if body != "1" {
            parts.push(body.to_string());
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        out.push_str(&parts.join("*"));
    } else {
        if !first {
            out.push_str(" + ");
        }
        let _ = write!(out, "({c})");
        if body != "1" {
            out.push('*');
            out.push_str(body);
        }
    }
}

/// A finite sum of ordered monomials with series coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pres: Arc<str>,
    terms: BTreeMap<Monomial, HSeries>,
}

impl Element {
    pub fn zero(pres: &Arc<str>) -> Self {
        Element {
            pres: pres.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(pres: &Arc<str>, terms: impl IntoIterator<Item = (Monomial, HSeries)>) -> Self {
        let mut e = Self::zero(pres);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn monomial(pres: &Arc<str>, m: Monomial, c: HSeries) -> Self {
        Self::from_terms(pres, [(m, c)])
    }

    pub fn presentation_id(&self) -> &str {
        &self.pres
    }

    pub fn pres_arc(&self) -> &Arc<str> {
        &self.pres
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, HSeries> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, HSeries> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&HSeries> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Monomial, c: HSeries) {
        add_into(&mut self.terms, m, c);
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.pres != other.pres {
            return Err(Error::MixedPresentations {
                left: self.pres.to_string(),
                right: other.pres.to_string(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        Element {
            pres: self.pres.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &HSeries) -> Element {
        Element::from_terms(&self.pres, self.terms.iter().map(|(m, c)| (m.clone(), c * s)))
    }

    /// `Σ scalars[i]·elems[i]`.
    pub fn combine(scalars: &[HSeries], elems: &[Element]) -> Result<Element> {
        let Some(first) = elems.first() else {
            return Err(Error::Manifest("combine of an empty list".into()));
        };
        let mut out = Element::zero(&first.pres);
        for (s, e) in scalars.iter().zip(elems) {
            out = out.try_add(&e.scale(s))?;
        }
        Ok(out)
    }

    pub fn h_valuation(&self) -> Valuation {
        min_valuation(self.terms.values())
    }

    /// Minimum over terms of `valuation + degree`.
    pub fn i_degree(&self) -> Valuation {
        self.terms
            .iter()
            .map(|(m, c)| match c.valuation() {
                Valuation::Finite(v) => Valuation::Finite(v + m.degree() as i64),
                Valuation::Infinity => Valuation::Infinity,
            })
            .min()
            .unwrap_or(Valuation::Infinity)
    }

    /// Drops exponents above `n` and, when `d` is given, monomials of
    /// degree above `d`.
    pub fn truncate(&self, n: i64, d: Option<u32>) -> Element {
        Element::from_terms(
            &self.pres,
            self.terms
                .iter()
                .filter(|(m, _)| d.is_none_or(|d| m.degree() <= d))
                .map(|(m, c)| (m.clone(), c.truncate(n))),
        )
    }

    /// Largest monomial degree, `None` for zero.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Same terms under another presentation id.
    pub fn relabel(&self, pres: &Arc<str>) -> Element {
        Element {
            pres: pres.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Expression-syntax rendering, readable back by [`crate::expr`].
    pub fn to_expr(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            fmt_term(&mut out, c, &m.to_expr(names), idx == 0);
        }
        out
    }

    /// As a rank-1 tensor.
    pub fn to_tensor(&self) -> TensorElement {
        TensorElement::from_terms(1, self.terms.iter().map(|(m, c)| (vec![m.clone()], c.clone())))
    }
}

#[derive(Serialize)]
struct TermRef<'a> {
    monomial: &'a Monomial,
    coeff: &'a HSeries,
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(m, c)| TermRef { monomial: m, coeff: c }))
    }
}

/// A rank-`n` tensor with monomial-tuple keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    rank: usize,
    terms: BTreeMap<Vec<Monomial>, HSeries>,
}

impl TensorElement {
    pub fn zero(rank: usize) -> Self {
        assert!(rank >= 1, "tensor rank must be positive");
        TensorElement {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (Vec<Monomial>, HSeries)>) -> Self {
        let mut t = Self::zero(rank);
        for (k, c) in terms {
            t.add_term(k, c);
        }
        t
    }

    /// `c·(1⊗···⊗1)`.
    pub fn scalar(rank: usize, ngens: usize, c: HSeries) -> Self {
        Self::from_terms(rank, [(vec![Monomial::one(ngens); rank], c)])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Monomial>, HSeries> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &[Monomial]) -> Option<&HSeries> {
        self.terms.get(key)
    }

    pub fn add_term(&mut self, key: Vec<Monomial>, c: HSeries) {
        assert_eq!(key.len(), self.rank, "tensor key has wrong rank");
        add_into(&mut self.terms, key, c);
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.rank, other.rank, "adding tensors of different rank");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TensorElement {
        TensorElement {
            rank: self.rank,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &HSeries) -> TensorElement {
        TensorElement::from_terms(self.rank, self.terms.iter().map(|(k, c)| (k.clone(), c * s)))
    }

    pub fn h_valuation(&self) -> Valuation {
        min_valuation(self.terms.values())
    }

    pub fn truncate(&self, n: i64, d: Option<u32>) -> TensorElement {
        TensorElement::from_terms(
            self.rank,
            self.terms
                .iter()
                .filter(|(k, _)| d.is_none_or(|d| total_degree(k) <= d))
                .map(|(k, c)| (k.clone(), c.truncate(n))),
        )
    }

    /// Swaps the two factors of a rank-2 tensor.
    pub fn flip(&self) -> TensorElement {
        assert_eq!(self.rank, 2, "flip needs rank 2");
        TensorElement::from_terms(
            2,
            self.terms
                .iter()
                .map(|(k, c)| (vec![k[1].clone(), k[0].clone()], c.clone())),
        )
    }

    /// Terms with no identity slot, i.e. `(id−ε)^{⊗n}` when every
    /// generator has zero counit.
    pub fn augmentation_part(&self) -> TensorElement {
        TensorElement {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.iter().all(|m| !m.is_one()))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// True if some term has an identity slot.
    pub fn touches_unit(&self) -> bool {
        self.terms.keys().any(|k| k.iter().any(Monomial::is_one))
    }

    pub fn to_expr(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (k, c)) in self.terms.iter().enumerate() {
            let body = k
                .iter()
                .map(|m| m.to_expr(names))
                .collect::<Vec<_>>()
                .join(" (x) ");
            let body = if self.rank > 1 { format!("[{body}]") } else { body };
            fmt_term(&mut out, c, &body, idx == 0);
        }
        out
    }
}

/// Sum of the slot degrees of a tensor key.
pub fn total_degree(key: &[Monomial]) -> u32 {
    key.iter().map(Monomial::degree).sum()
}

impl Serialize for TensorElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct T<'a>(&'a [Monomial], &'a HSeries);
        impl Serialize for T<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut st = s.serialize_struct("TensorTerm", 2)?;
                st.serialize_field("monomials", self.0)?;
                st.serialize_field("coeff", self.1)?;
                st.end()
            }
        }
        s.collect_seq(self.terms.iter().map(|(k, c)| T(k, c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn pid() -> Arc<str> {
        Arc::from("t")
    }

    fn gen(i: usize) -> Monomial {
        Monomial::generator(2, i)
    }

    #[test]
    fn combine_cancels_and_mixes() {
        let p = pid();
        let x = Element::monomial(&p, gen(0), HSeries::one(8));
        let y = Element::monomial(&p, gen(1), HSeries::one(8));
        let z = Element::combine(&[HSeries::one(8), -HSeries::one(8)], &[x.clone(), x.clone()]).unwrap();
        assert!(z.is_zero());
        let h = HSeries::h_pow(1, 8);
        let s = Element::combine(&[h.clone(), h.clone()], &[x.clone(), y]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.coeff(&gen(0)), Some(&h));
        let other = Element::monomial(&Arc::from("u"), gen(0), HSeries::one(8));
        assert!(matches!(x.try_add(&other), Err(Error::MixedPresentations { .. })));
    }

    #[test]
    fn valuations_and_degrees() {
        let p = pid();
        let a = Element::from_terms(
            &p,
            [(gen(0), HSeries::h_pow(1, 8)), (gen(1), HSeries::h_pow(2, 8))],
        );
        assert_eq!(a.h_valuation(), Valuation::Finite(1));
        assert_eq!(Element::zero(&p).h_valuation(), Valuation::Infinity);
        assert_eq!(a.i_degree(), Valuation::Finite(2));
        let one = Element::monomial(&p, Monomial::one(2), HSeries::one(8));
        assert_eq!(one.i_degree(), Valuation::Finite(0));
        let b = Element::from_terms(
            &p,
            [
                (Monomial::one(2), HSeries::h_pow(2, 8)),
                (Monomial::from_exps(vec![1, 1]), HSeries::one(8)),
            ],
        );
        assert_eq!(b.i_degree(), Valuation::Finite(2));
    }

    #[test]
    fn tensor_valuation_of_exp_minus_one() {
        // (e^{hx} - 1) ⊗ y at N = 4 has leading term h·(x ⊗ y)
        let mut t = TensorElement::zero(2);
        let mut fact = 1i64;
        for k in 1..=4u32 {
            fact *= k as i64;
            t.add_term(
                vec![Monomial::from_exps(vec![k, 0]), gen(1)],
                HSeries::monomial(rat(1, fact), k as i64, 4),
            );
        }
        assert_eq!(t.h_valuation(), Valuation::Finite(1));
        assert_eq!(TensorElement::zero(2).h_valuation(), Valuation::Infinity);
    }

    #[test]
    fn truncate_is_idempotent() {
        let p = pid();
        let a = Element::from_terms(
            &p,
            [
                (gen(0), HSeries::one(10)),
                (gen(1), HSeries::h_pow(9, 10)),
                (Monomial::from_exps(vec![9, 0]), HSeries::one(10)),
            ],
        );
        let t = a.truncate(8, Some(8));
        assert_eq!(t, Element::monomial(&p, gen(0), HSeries::one(8)));
        assert_eq!(t.truncate(8, Some(8)), t);
    }

    #[test]
    fn monomial_enumeration_and_order() {
        let ms = Monomial::all_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Monomial::all_up_to_degree(2, 3).len(), 10);
        let m = Monomial::from_exps(vec![2, 0, 1]);
        assert_eq!(m.word(), vec![0, 0, 2]);
        assert_eq!(m.last_gen(), Some(2));
        assert_eq!(m.first_gen(), Some(0));
    }

    #[test]
    fn expression_rendering() {
        let p = pid();
        let names = vec!["x".to_string(), "y".to_string()];
        let a = Element::from_terms(
            &p,
            [
                (Monomial::one(2), HSeries::from_ints(0, &[1, 1], 4)),
                (gen(1), HSeries::monomial(rat(-1, 2), 2, 4)),
                (Monomial::from_exps(vec![1, 2]), HSeries::one(4)),
            ],
        );
        assert_eq!(a.to_expr(&names), "(1 + h) - 1/2*h^2*y + x*y^2");
    }
}
