//! Hopf algebras presented by generators and PBW-type relations.
//!
//! A [`Presentation`] stores, for generators `x_1 < ··· < x_n`, one relation
//! `x_j·x_i = x_i·x_j + r_ij` per pair `i < j`, and the coproduct, counit and
//! antipode of every generator. Everything else (products, `Δ`, `S` on
//! monomials, iterated coproducts and the `δ_E` family) is computed here by
//! rewriting into ordered monomials.
//!
//! ```
//! use qdp::examples::builtin;
//!
//! let b = builtin("borel2").unwrap();
//! let p = &b.quea;
//! let yx = p.normal_form(&[1, 0], p.one_series()).unwrap();
//! assert_eq!(p.show(&yx), "-y + x*y");
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freealg::{total_degree, Element, Monomial, TensorElement};
use crate::report::{CheckEntry, HopfReport};
use crate::series::{HSeries, Rational};

/// POLY presentations model quantised enveloping algebras (unbounded
/// degree); SERIES presentations model quantised formal series algebras
/// (degree truncated at the cap).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "POLY")]
    Poly,
    #[serde(rename = "SERIES")]
    Series,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Poly => "POLY",
            Model::Series => "SERIES",
        })
    }
}

type Terms = Vec<(Monomial, HSeries)>;

#[derive(Default)]
struct Caches {
    mono_gen: Mutex<HashMap<(Monomial, usize), Arc<(Terms, u64)>>>,
    mono_mono: Mutex<HashMap<(Monomial, Monomial), Arc<(Terms, u64)>>>,
    coproduct: Mutex<HashMap<Monomial, Arc<TensorElement>>>,
    antipode: Mutex<HashMap<Monomial, Arc<Element>>>,
}

struct Fuel {
    spent: u64,
    budget: u64,
}

impl Fuel {
    fn charge(&mut self, cost: u64) -> bool {
        self.spent = self.spent.saturating_add(cost);
        self.spent <= self.budget
    }
}

/// Sentinel raised inside the rewriting recursion, turned into
/// [`Error::FuelExceeded`] at the public boundary.
struct OutOfFuel;

/// A Hopf algebra by generators and relations, truncated at h-order `N`
/// and (for SERIES) degree `D`.
pub struct Presentation {
    id: Arc<str>,
    model: Model,
    generators: Vec<String>,
    h_order: i64,
    degree_cap: u32,
    relations: BTreeMap<(usize, usize), Element>,
    coproduct: Vec<TensorElement>,
    counit: Vec<HSeries>,
    antipode: Vec<Element>,
    lowering: Option<Rational>,
    cache: Caches,
}

impl Clone for Presentation {
    fn clone(&self) -> Self {
        Presentation {
            id: self.id.clone(),
            model: self.model,
            generators: self.generators.clone(),
            h_order: self.h_order,
            degree_cap: self.degree_cap,
            relations: self.relations.clone(),
            coproduct: self.coproduct.clone(),
            counit: self.counit.clone(),
            antipode: self.antipode.clone(),
            lowering: self.lowering.clone(),
            cache: Caches::default(),
        }
    }
}

impl std::fmt::Debug for Presentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Presentation")
            .field("name", &self.id)
            .field("model", &self.model)
            .field("generators", &self.generators)
            .field("h_order", &self.h_order)
            .field("degree_cap", &self.degree_cap)
            .finish_non_exhaustive()
    }
}

/// Assembles a [`Presentation`]; [`PresentationBuilder::build`] validates.
///
/// Generators start primitive with antipode `−x` and no relations.
#[derive(Clone, Debug)]
pub struct PresentationBuilder {
    name: String,
    model: Model,
    generators: Vec<String>,
    h_order: i64,
    degree_cap: u32,
    relations: BTreeMap<(usize, usize), Element>,
    coproduct: Vec<TensorElement>,
    counit: Vec<HSeries>,
    antipode: Vec<Element>,
}

impl PresentationBuilder {
    pub fn new(name: &str, model: Model, generators: &[&str], h_order: i64, degree_cap: u32) -> Self {
        let gens: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let n = gens.len();
        let id: Arc<str> = Arc::from(name);
        let one = HSeries::one(h_order);
        let coproduct = (0..n)
            .map(|i| {
                TensorElement::from_terms(
                    2,
                    [
                        (vec![Monomial::generator(n, i), Monomial::one(n)], one.clone()),
                        (vec![Monomial::one(n), Monomial::generator(n, i)], one.clone()),
                    ],
                )
            })
            .collect();
        let antipode = (0..n)
            .map(|i| Element::monomial(&id, Monomial::generator(n, i), -&one))
            .collect();
        PresentationBuilder {
            name: name.to_string(),
            model,
            generators: gens,
            h_order,
            degree_cap,
            relations: BTreeMap::new(),
            coproduct,
            counit: vec![HSeries::zero(h_order); n],
            antipode,
        }
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn h_order(&self) -> i64 {
        self.h_order
    }

    pub fn name(&mut self, name: &str) -> &mut Self {
        self.name = name.to_string();
        self
    }

    /// Sets `r_ij` in `x_j·x_i = x_i·x_j + r_ij`.
    pub fn relation(&mut self, i: usize, j: usize, r: Element) -> &mut Self {
        self.relations.insert((i, j), r);
        self
    }

    pub fn coproduct(&mut self, i: usize, t: TensorElement) -> &mut Self {
        self.coproduct[i] = t;
        self
    }

    pub fn counit(&mut self, i: usize, c: HSeries) -> &mut Self {
        self.counit[i] = c;
        self
    }

    pub fn antipode(&mut self, i: usize, s: Element) -> &mut Self {
        self.antipode[i] = s;
        self
    }

    pub fn build(&self) -> Result<Presentation> {
        let n = self.generators.len();
        let id: Arc<str> = Arc::from(self.name.as_str());
        if self.h_order < 0 {
            return Err(Error::Inadmissible("h_order must be nonnegative".into()));
        }
        for (a, g) in self.generators.iter().enumerate() {
            if !crate::expr::is_identifier(g) {
                return Err(Error::Inadmissible(format!("bad generator name {g:?}")));
            }
            if self.generators[..a].contains(g) {
                return Err(Error::Inadmissible(format!("duplicate generator {g:?}")));
            }
        }
        let check_len = |m: &Monomial, what: &str| -> Result<()> {
            if m.ngens() != n {
                return Err(Error::Inadmissible(format!(
                    "{what}: monomial has {} exponents, expected {n}",
                    m.ngens()
                )));
            }
            Ok(())
        };
        let data_cap = |c: &HSeries| c.truncate(self.h_order);
        let mut relations = BTreeMap::new();
        for (&(i, j), r) in &self.relations {
            if !(i < j && j < n) {
                return Err(Error::Inadmissible(format!("relation indices ({i}, {j}) need i < j < {n}")));
            }
            let lead = Monomial::from_exps({
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                e
            });
            for (m, c) in r.terms() {
                check_len(m, "relation")?;
                let v = c.valuation();
                let ok = match m.degree() {
                    0 | 1 => v.at_least(0),
                    2 => v.at_least(1) && *m < lead,
                    _ => false,
                };
                if !ok {
                    return Err(Error::Inadmissible(format!(
                        "relation ({}, {}) term {} with coefficient {c} breaks the admissible shape",
                        self.generators[i],
                        self.generators[j],
                        m.to_expr(&self.generators)
                    )));
                }
            }
            let r = Element::from_terms(&id, r.terms().iter().map(|(m, c)| (m.clone(), data_cap(c))));
            if !r.is_zero() {
                relations.insert((i, j), r);
            }
        }
        if self.coproduct.len() != n || self.antipode.len() != n || self.counit.len() != n {
            return Err(Error::Inadmissible("structure maps must cover every generator".into()));
        }
        let mut coproduct = Vec::with_capacity(n);
        for (i, t) in self.coproduct.iter().enumerate() {
            if t.rank() != 2 {
                return Err(Error::Inadmissible(format!(
                    "coproduct of {} must have rank 2",
                    self.generators[i]
                )));
            }
            for (k, c) in t.terms() {
                for m in k {
                    check_len(m, "coproduct")?;
                }
                if !c.valuation().at_least(0) {
                    return Err(Error::NegativeValuation(format!("coproduct of {}", self.generators[i])));
                }
            }
            coproduct.push(TensorElement::from_terms(
                2,
                t.terms().iter().map(|(k, c)| (k.clone(), data_cap(c))),
            ));
        }
        for (i, c) in self.counit.iter().enumerate() {
            if !c.is_zero() {
                return Err(Error::Inadmissible(format!(
                    "counit of {g} is {c}, not 0; substitute {g} - ({c}) for {g} to normalise",
                    g = self.generators[i]
                )));
            }
        }
        let mut antipode = Vec::with_capacity(n);
        for (i, s) in self.antipode.iter().enumerate() {
            for (m, c) in s.terms() {
                check_len(m, "antipode")?;
                if !c.valuation().at_least(0) {
                    return Err(Error::NegativeValuation(format!("antipode of {}", self.generators[i])));
                }
            }
            antipode.push(Element::from_terms(
                &id,
                s.terms().iter().map(|(m, c)| (m.clone(), data_cap(c))),
            ));
        }
        let mut p = Presentation {
            id,
            model: self.model,
            generators: self.generators.clone(),
            h_order: self.h_order,
            degree_cap: self.degree_cap,
            relations,
            coproduct,
            counit: vec![HSeries::zero(self.h_order); n],
            antipode,
            lowering: None,
            cache: Caches::default(),
        };
        if p.model == Model::Series {
            p.lowering = p.lowering_rate();
            let d = p.degree_cap;
            for t in &mut p.coproduct {
                *t = t.truncate(p.h_order, Some(d));
            }
            for s in &mut p.antipode {
                *s = s.truncate(p.h_order, Some(d));
            }
        }
        Ok(p)
    }
}

fn word_string(names: &[String], word: &[usize]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join("*")
}

impl Presentation {
    pub fn builder(name: &str, model: Model, generators: &[&str], h_order: i64, degree_cap: u32) -> PresentationBuilder {
        PresentationBuilder::new(name, model, generators, h_order, degree_cap)
    }

    /// A builder holding this presentation's data.
    pub fn to_builder(&self) -> PresentationBuilder {
        let gens: Vec<&str> = self.generators.iter().map(String::as_str).collect();
        let mut b = PresentationBuilder::new(&self.id, self.model, &gens, self.h_order, self.degree_cap);
        b.relations = self.relations.clone();
        b.coproduct = self.coproduct.clone();
        b.counit = self.counit.clone();
        b.antipode = self.antipode.clone();
        b
    }

    pub fn name(&self) -> &str {
        &self.id
    }

    pub fn id(&self) -> &Arc<str> {
        &self.id
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn h_order(&self) -> i64 {
        self.h_order
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// `r_ij` for `i < j` (zero when not stored).
    pub fn relation(&self, i: usize, j: usize) -> Element {
        self.relations
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| Element::zero(&self.id))
    }

    pub fn coproduct_of(&self, i: usize) -> &TensorElement {
        &self.coproduct[i]
    }

    pub fn counit_of(&self, i: usize) -> &HSeries {
        &self.counit[i]
    }

    pub fn antipode_of(&self, i: usize) -> &Element {
        &self.antipode[i]
    }

    /// Degree filter applied to every computed value.
    pub fn degree_filter(&self) -> Option<u32> {
        match self.model {
            Model::Poly => None,
            Model::Series => Some(self.degree_cap),
        }
    }

    /// Minimum h-cost per unit of degree lost when a relation is applied:
    /// `min val(c)/(2 − deg)` over relation terms of degree below two.
    fn lowering_rate(&self) -> Option<Rational> {
        self.relations
            .values()
            .flat_map(|r| r.terms().iter())
            .filter(|(m, _)| m.degree() < 2)
            .filter_map(|(m, c)| {
                c.valuation()
                    .finite()
                    .map(|v| Rational::new(v.into(), (2 - m.degree() as i64).into()))
            })
            .min()
    }

    /// Highest h-exponent that is reliable for a computed coefficient of a
    /// monomial (or tensor term) of total degree `deg`.
    ///
    /// In the SERIES model, products whose degree exceeds the cap are
    /// dropped; rewriting them could only have reached degree `deg` by
    /// paying at least `ρ·(D + 1 − deg)` powers of h.
    pub fn known_order(&self, deg: u32) -> i64 {
        match (self.model, &self.lowering) {
            (Model::Poly, _) | (Model::Series, None) => self.h_order,
            (Model::Series, Some(rho)) => {
                if deg > self.degree_cap {
                    return -1;
                }
                let gap = Rational::from_integer((self.degree_cap + 1 - deg).into());
                let cost = (rho * gap).ceil().to_integer().to_i64().unwrap_or(i64::MAX);
                self.h_order.min(cost - 1)
            }
        }
    }

    pub fn one_series(&self) -> HSeries {
        HSeries::one(self.h_order)
    }

    pub fn one(&self) -> Element {
        self.scalar(self.one_series())
    }

    pub fn scalar(&self, c: HSeries) -> Element {
        Element::monomial(&self.id, Monomial::one(self.ngens()), c.truncate(self.h_order))
    }

    pub fn gen(&self, i: usize) -> Element {
        Element::monomial(&self.id, Monomial::generator(self.ngens(), i), self.one_series())
    }

    /// `c·x^exps`.
    pub fn mono(&self, exps: &[u32], c: HSeries) -> Element {
        Element::monomial(&self.id, Monomial::from_exps(exps.to_vec()), c.truncate(self.h_order))
    }

    pub fn show(&self, a: &Element) -> String {
        a.to_expr(&self.generators)
    }

    pub fn show_tensor(&self, t: &TensorElement) -> String {
        t.to_expr(&self.generators)
    }

    fn budget(&self, word_len: u32) -> u64 {
        let s = self.degree_cap as u64 + self.h_order.max(0) as u64 + 2;
        10 * (word_len.max(1) as u64) * s * s
    }

    fn too_big(&self, deg: u32) -> bool {
        self.model == Model::Series && deg > self.degree_cap
    }

    fn cap(&self, c: HSeries) -> HSeries {
        c.truncate(self.h_order)
    }

    fn accumulate(&self, out: &mut BTreeMap<Monomial, HSeries>, m: Monomial, c: HSeries) {
        use std::collections::btree_map::Entry;
        if c.is_zero() || self.too_big(m.degree()) {
            return;
        }
        match out.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `m·x_i` in ordered monomials.
    fn mul_mono_gen(&self, m: &Monomial, i: usize, fuel: &mut Fuel) -> std::result::Result<Arc<(Terms, u64)>, OutOfFuel> {
        if self.too_big(m.degree() + 1) {
            if !fuel.charge(1) {
                return Err(OutOfFuel);
            }
            return Ok(Arc::new((Vec::new(), 1)));
        }
        let j = match m.last_gen() {
            Some(j) if j > i => j,
            _ => {
                if !fuel.charge(1) {
                    return Err(OutOfFuel);
                }
                return Ok(Arc::new((vec![(m.bumped(i), self.one_series())], 1)));
            }
        };
        let key = (m.clone(), i);
        if let Some(hit) = self.cache.mono_gen.lock().unwrap().get(&key).cloned() {
            if !fuel.charge(hit.1) {
                return Err(OutOfFuel);
            }
            return Ok(hit);
        }
        let start = fuel.spent;
        if !fuel.charge(1) {
            return Err(OutOfFuel);
        }
        // m = m'·x_j with j > i:  m'·x_j·x_i = (m'·x_i)·x_j + m'·r_ij
        let mp = m.lowered(j);
        let mut acc = BTreeMap::new();
        let first = self.mul_mono_gen(&mp, i, fuel)?;
        for (t, c) in &first.0 {
            let next = self.mul_mono_gen(t, j, fuel)?;
            for (u, d) in &next.0 {
                self.accumulate(&mut acc, u.clone(), self.cap(c * d));
            }
        }
        if let Some(r) = self.relations.get(&(i, j)) {
            for (e, c) in r.terms() {
                let prod = self.mul_mono_mono_inner(&mp, e, fuel)?;
                for (u, d) in &prod.0 {
                    self.accumulate(&mut acc, u.clone(), self.cap(c * d));
                }
            }
        }
        let cost = fuel.spent - start;
        let val = Arc::new((acc.into_iter().collect::<Terms>(), cost));
        self.cache.mono_gen.lock().unwrap().insert(key, val.clone());
        Ok(val)
    }

    fn mul_mono_mono_inner(&self, a: &Monomial, b: &Monomial, fuel: &mut Fuel) -> std::result::Result<Arc<(Terms, u64)>, OutOfFuel> {
        if b.is_one() {
            return Ok(Arc::new((vec![(a.clone(), self.one_series())], 0)));
        }
        if a.is_one() {
            return Ok(Arc::new((vec![(b.clone(), self.one_series())], 0)));
        }
        if self.too_big(a.degree() + b.degree()) {
            return Ok(Arc::new((Vec::new(), 0)));
        }
        let key = (a.clone(), b.clone());
        if let Some(hit) = self.cache.mono_mono.lock().unwrap().get(&key).cloned() {
            if !fuel.charge(hit.1) {
                return Err(OutOfFuel);
            }
            return Ok(hit);
        }
        let start = fuel.spent;
        let mut cur: Terms = vec![(a.clone(), self.one_series())];
        for g in b.word() {
            let mut acc = BTreeMap::new();
            for (t, c) in &cur {
                let next = self.mul_mono_gen(t, g, fuel)?;
                for (u, d) in &next.0 {
                    self.accumulate(&mut acc, u.clone(), self.cap(c * d));
                }
            }
            cur = acc.into_iter().collect();
        }
        let val = Arc::new((cur, fuel.spent - start));
        self.cache.mono_mono.lock().unwrap().insert(key, val.clone());
        Ok(val)
    }

    /// Normal form of the product of two ordered monomials.
    pub fn mono_product(&self, a: &Monomial, b: &Monomial) -> Result<Arc<(Terms, u64)>> {
        let len = a.degree() + b.degree();
        let mut fuel = Fuel {
            spent: 0,
            budget: self.budget(len),
        };
        self.mul_mono_mono_inner(a, b, &mut fuel).map_err(|OutOfFuel| {
            let mut word = a.word();
            word.extend(b.word());
            Error::FuelExceeded {
                word: word_string(&self.generators, &word),
                spent: fuel.spent,
                budget: fuel.budget,
            }
        })
    }

    fn finish_terms(&self, terms: BTreeMap<Monomial, HSeries>) -> Element {
        Element::from_terms(
            &self.id,
            terms
                .into_iter()
                .filter(|(m, _)| !self.too_big(m.degree()))
                .map(|(m, c)| {
                    let k = self.known_order(m.degree());
                    (m, c.truncate(k))
                }),
        )
    }

    fn finish_tensor(&self, rank: usize, terms: BTreeMap<Vec<Monomial>, HSeries>) -> TensorElement {
        TensorElement::from_terms(
            rank,
            terms
                .into_iter()
                .filter(|(k, _)| !self.too_big(total_degree(k)))
                .map(|(k, c)| {
                    let o = self.known_order(total_degree(&k));
                    (k, c.truncate(o))
                }),
        )
    }

    fn check_elem(&self, a: &Element) -> Result<()> {
        if a.pres_arc() != &self.id && a.presentation_id() != &*self.id {
            return Err(Error::MixedPresentations {
                left: a.presentation_id().to_string(),
                right: self.id.to_string(),
            });
        }
        Ok(())
    }

    /// Normal form of `coeff · x_{w_1}···x_{w_k}`.
    pub fn normal_form(&self, word: &[usize], coeff: HSeries) -> Result<Element> {
        if let Some(&bad) = word.iter().find(|&&g| g >= self.ngens()) {
            return Err(Error::UnknownGenerator(format!("#{bad}")));
        }
        let mut fuel = Fuel {
            spent: 0,
            budget: self.budget(word.len() as u32),
        };
        let mut cur: BTreeMap<Monomial, HSeries> = BTreeMap::new();
        cur.insert(Monomial::one(self.ngens()), self.cap(coeff));
        for &g in word {
            let mut acc = BTreeMap::new();
            for (t, c) in &cur {
                let next = self.mul_mono_gen(t, g, &mut fuel).map_err(|OutOfFuel| Error::FuelExceeded {
                    word: word_string(&self.generators, word),
                    spent: fuel.spent,
                    budget: fuel.budget,
                })?;
                for (u, d) in &next.0 {
                    self.accumulate(&mut acc, u.clone(), self.cap(c * d));
                }
            }
            cur = acc;
        }
        Ok(self.finish_terms(cur))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_elem(a)?;
        self.check_elem(b)?;
        let mut acc = BTreeMap::new();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if self.too_big(ma.degree() + mb.degree()) {
                    continue;
                }
                let c = self.cap(ca * cb);
                if c.is_zero() {
                    continue;
                }
                let prod = self.mono_product(ma, mb)?;
                for (u, d) in &prod.0 {
                    self.accumulate(&mut acc, u.clone(), self.cap(&c * d));
                }
            }
        }
        Ok(self.finish_terms(acc))
    }

    pub fn multiply_all(&self, factors: &[Element]) -> Result<Element> {
        let mut cur = self.one();
        for f in factors {
            cur = self.multiply(&cur, f)?;
        }
        Ok(cur)
    }

    pub fn power(&self, a: &Element, k: u32) -> Result<Element> {
        let mut cur = self.one();
        for _ in 0..k {
            cur = self.multiply(&cur, a)?;
        }
        Ok(cur)
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        a.try_add(b)
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element> {
        a.try_sub(b)
    }

    /// `exp(a)` for an element of h-valuation at least one.
    pub fn exp(&self, a: &Element) -> Result<Element> {
        if !a.h_valuation().at_least(1) {
            return Err(Error::NotTopologicallyNilpotent {
                context: format!("exp({})", self.show(a)),
            });
        }
        let mut sum = self.one();
        let mut term = self.one();
        let mut k: i64 = 1;
        loop {
            term = self.multiply(&term, a)?.scale(&HSeries::constant(crate::series::rat(1, k), self.h_order));
            if term.is_zero() {
                return Ok(sum);
            }
            sum = sum.try_add(&term)?;
            k += 1;
        }
    }

    /// Product in the k-fold tensor power, computed slot by slot.
    pub fn tensor_multiply(&self, s: &TensorElement, t: &TensorElement) -> Result<TensorElement> {
        assert_eq!(s.rank(), t.rank(), "tensor ranks differ");
        let rank = s.rank();
        let mut out: BTreeMap<Vec<Monomial>, HSeries> = BTreeMap::new();
        for (ks, cs) in s.terms() {
            for (kt, ct) in t.terms() {
                if self.too_big(total_degree(ks) + total_degree(kt)) {
                    continue;
                }
                let c = self.cap(cs * ct);
                if c.is_zero() {
                    continue;
                }
                let mut partial: Vec<(Vec<Monomial>, HSeries, u32)> = vec![(Vec::with_capacity(rank), c, 0)];
                for slot in 0..rank {
                    let prod = self.mono_product(&ks[slot], &kt[slot])?;
                    let mut next = Vec::with_capacity(partial.len() * prod.0.len());
                    for (key, c, deg) in &partial {
                        for (m, d) in &prod.0 {
                            let nd = deg + m.degree();
                            if self.too_big(nd) {
                                continue;
                            }
                            let nc = self.cap(c * d);
                            if nc.is_zero() {
                                continue;
                            }
                            let mut nk = key.clone();
                            nk.push(m.clone());
                            next.push((nk, nc, nd));
                        }
                    }
                    partial = next;
                }
                for (k, c, _) in partial {
                    add_to(&mut out, k, c);
                }
            }
        }
        Ok(self.finish_tensor(rank, out))
    }

    fn coproduct_mono(&self, m: &Monomial) -> Result<Arc<TensorElement>> {
        if let Some(hit) = self.cache.coproduct.lock().unwrap().get(m).cloned() {
            return Ok(hit);
        }
        let n = self.ngens();
        let val = match m.last_gen() {
            None => TensorElement::scalar(2, n, self.one_series()),
            Some(j) if m.degree() == 1 => self.coproduct[j].clone(),
            Some(j) => {
                let rest = self.coproduct_mono(&m.lowered(j))?;
                self.tensor_multiply(&rest, &self.coproduct[j])?
            }
        };
        let val = Arc::new(val);
        self.cache.coproduct.lock().unwrap().insert(m.clone(), val.clone());
        Ok(val)
    }

    /// `Δ(a)` in the tensor square.
    pub fn coproduct(&self, a: &Element) -> Result<TensorElement> {
        self.check_elem(a)?;
        let mut out = BTreeMap::new();
        for (m, c) in a.terms() {
            let d = self.coproduct_mono(m)?;
            for (k, e) in d.terms() {
                add_to(&mut out, k.clone(), self.cap(c * e));
            }
        }
        Ok(self.finish_tensor(2, out))
    }

    /// `ε(a)`: the coefficient of the empty monomial.
    pub fn counit(&self, a: &Element) -> HSeries {
        a.coeff(&Monomial::one(self.ngens()))
            .cloned()
            .unwrap_or_else(|| HSeries::zero(self.h_order))
    }

    fn antipode_mono(&self, m: &Monomial) -> Result<Arc<Element>> {
        if let Some(hit) = self.cache.antipode.lock().unwrap().get(m).cloned() {
            return Ok(hit);
        }
        let val = match m.last_gen() {
            None => self.one(),
            Some(j) if m.degree() == 1 => self.antipode[j].clone(),
            Some(j) => {
                let rest = self.antipode_mono(&m.lowered(j))?;
                self.multiply(&self.antipode[j], &rest)?
            }
        };
        let val = Arc::new(val);
        self.cache.antipode.lock().unwrap().insert(m.clone(), val.clone());
        Ok(val)
    }

    /// `S(a)`, anti-multiplicative on monomials.
    pub fn antipode(&self, a: &Element) -> Result<Element> {
        self.check_elem(a)?;
        let mut out = BTreeMap::new();
        for (m, c) in a.terms() {
            let s = self.antipode_mono(m)?;
            for (u, d) in s.terms() {
                self.accumulate(&mut out, u.clone(), self.cap(c * d));
            }
        }
        Ok(self.finish_terms(out))
    }

    /// Applies `Δ` to one slot, raising the rank by one.
    pub fn coproduct_on_slot(&self, t: &TensorElement, slot: usize) -> Result<TensorElement> {
        let rank = t.rank();
        assert!(slot < rank, "slot out of range");
        let mut out = BTreeMap::new();
        for (k, c) in t.terms() {
            let d = self.coproduct_mono(&k[slot])?;
            let rest_deg = total_degree(k) - k[slot].degree();
            for (dk, e) in d.terms() {
                if self.too_big(rest_deg + total_degree(dk)) {
                    continue;
                }
                let mut nk = Vec::with_capacity(rank + 1);
                nk.extend_from_slice(&k[..slot]);
                nk.extend_from_slice(dk);
                nk.extend_from_slice(&k[slot + 1..]);
                add_to(&mut out, nk, self.cap(c * e));
            }
        }
        Ok(self.finish_tensor(rank + 1, out))
    }

    /// `Δ^n(a)`; `Δ^0 = ε` as a rank-1 scalar tensor and `Δ^1 = id`.
    pub fn iterated_coproduct(&self, a: &Element, n: usize) -> Result<TensorElement> {
        self.check_elem(a)?;
        match n {
            0 => Ok(TensorElement::scalar(1, self.ngens(), self.counit(a))),
            _ => {
                let mut t = a.to_tensor();
                for _ in 1..n {
                    t = self.coproduct_on_slot(&t, 0)?;
                }
                Ok(t)
            }
        }
    }

    /// Places a rank-k tensor into rank n at `positions` (0-based, sorted),
    /// filling the other slots with 1. A rank-1 scalar with empty
    /// `positions` becomes `c·1^{⊗n}`.
    pub fn embed(&self, t: &TensorElement, positions: &[usize], n: usize) -> TensorElement {
        let one = Monomial::one(self.ngens());
        let mut out = TensorElement::zero(n.max(1));
        for (k, c) in t.terms() {
            let mut key = vec![one.clone(); n.max(1)];
            if positions.is_empty() {
                debug_assert!(k.iter().all(Monomial::is_one));
            } else {
                for (slot, &pos) in positions.iter().enumerate() {
                    key[pos] = k[slot].clone();
                }
            }
            out.add_term(key, c.clone());
        }
        out
    }

    /// `Δ_E(a) = j_E(Δ^{|E|}(a))` for `E ⊆ {1..n}` (1-based).
    pub fn big_delta_e(&self, a: &Element, e: &[usize], n: usize) -> Result<TensorElement> {
        let pos = positions(e, n);
        let t = self.iterated_coproduct(a, pos.len())?;
        Ok(self.embed(&t, &pos, n))
    }

    /// `δ_E(a) = Σ_{E′⊆E} (−1)^{|E|−|E′|} Δ_{E′}(a)`, rank `n` (1-based `E`).
    pub fn delta_e(&self, a: &Element, e: &[usize], n: usize) -> Result<TensorElement> {
        let pos = positions(e, n);
        let k = pos.len();
        let mut iter = Vec::with_capacity(k + 1);
        for j in 0..=k {
            iter.push(self.iterated_coproduct(a, j)?);
        }
        let mut out = TensorElement::zero(n.max(1));
        for mask in 0u32..(1 << k) {
            let sub: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| pos[b]).collect();
            let emb = self.embed(&iter[sub.len()], &sub, n);
            if (k - sub.len()) % 2 == 1 {
                out = out.sub(&emb);
            } else {
                out = out.add(&emb);
            }
        }
        Ok(out)
    }

    /// `δ_n(a) = (id − ε)^{⊗n} Δ^n(a)`; `δ_0 = ε`.
    pub fn delta_n(&self, a: &Element, n: usize) -> Result<TensorElement> {
        Ok(self.delta_sequence(a, n)?.pop().expect("sequence is nonempty"))
    }

    /// `[δ_0(a), …, δ_{n_max}(a)]`, sharing the coproduct work.
    pub fn delta_sequence(&self, a: &Element, n_max: usize) -> Result<Vec<TensorElement>> {
        self.check_elem(a)?;
        let mut out = vec![TensorElement::scalar(1, self.ngens(), self.counit(a))];
        if n_max == 0 {
            return Ok(out);
        }
        let mut t = a.to_tensor().augmentation_part();
        out.push(t.clone());
        for _ in 2..=n_max {
            t = self.coproduct_on_slot(&t, 0)?.augmentation_part();
            out.push(t.clone());
        }
        Ok(out)
    }

    /// The reliable part of a difference: every coefficient cut to the
    /// precision the engine can vouch for. Zero means equal up to
    /// truncation.
    pub fn residual(&self, diff: &Element) -> Element {
        Element::from_terms(
            diff.pres_arc(),
            diff.terms()
                .iter()
                .filter(|(m, _)| !self.too_big(m.degree()))
                .map(|(m, c)| (m.clone(), c.truncate(self.known_order(m.degree())))),
        )
    }

    pub fn residual_tensor(&self, diff: &TensorElement) -> TensorElement {
        self.finish_tensor(diff.rank(), diff.terms().clone())
    }

    pub fn residual_series(&self, diff: &HSeries) -> HSeries {
        diff.truncate(self.known_order(0))
    }

    /// `(ε⊗id)` or `(id⊗ε)` of a rank-2 tensor.
    fn counit_slot(&self, t: &TensorElement, slot: usize) -> Element {
        let other = 1 - slot;
        Element::from_terms(
            &self.id,
            t.terms()
                .iter()
                .filter(|(k, _)| k[slot].is_one())
                .map(|(k, c)| (k[other].clone(), c.clone())),
        )
    }

    /// `m(S⊗id)` (`left = true`) or `m(id⊗S)` of a rank-2 tensor.
    fn antipode_contract(&self, t: &TensorElement, left: bool) -> Result<Element> {
        let mut acc = Element::zero(&self.id);
        for (k, c) in t.terms() {
            let a = Element::monomial(&self.id, k[0].clone(), self.one_series());
            let b = Element::monomial(&self.id, k[1].clone(), self.one_series());
            let prod = if left {
                self.multiply(&self.antipode(&a)?, &b)?
            } else {
                self.multiply(&a, &self.antipode(&b)?)?
            };
            acc = acc.try_add(&prod.scale(c))?;
        }
        Ok(acc)
    }

    fn axioms_on_monomial(&self, m: &Monomial) -> Result<Vec<CheckEntry>> {
        let subj = m.to_expr(&self.generators);
        let a = Element::monomial(&self.id, m.clone(), self.one_series());
        let d = self.coproduct(&a)?;
        let mut out = Vec::new();
        let l = self.coproduct_on_slot(&d, 0)?;
        let r = self.coproduct_on_slot(&d, 1)?;
        out.push(CheckEntry::from_tensor("coassociativity", &subj, self.residual_tensor(&l.sub(&r))));
        let eps = self.scalar(self.counit(&a));
        for (name, slot) in [("counit_left", 0), ("counit_right", 1)] {
            let v = self.counit_slot(&d, slot);
            out.push(CheckEntry::from_element(name, &subj, self.residual(&v.try_sub(&a)?)));
        }
        for (name, left) in [("antipode_left", true), ("antipode_right", false)] {
            let v = self.antipode_contract(&d, left)?;
            out.push(CheckEntry::from_element(name, &subj, self.residual(&v.try_sub(&eps)?)));
        }
        Ok(out)
    }

    fn axioms_on_relation(&self, i: usize, j: usize) -> Result<Vec<CheckEntry>> {
        let subj = format!("{}*{}", self.generators[j], self.generators[i]);
        let r = self.relation(i, j);
        let (xi, xj) = (self.gen(i), self.gen(j));
        let (di, dj) = (&self.coproduct[i], &self.coproduct[j]);
        let lhs = self.tensor_multiply(dj, di)?;
        let rhs = self.tensor_multiply(di, dj)?.add(&self.coproduct(&r)?);
        let mut out = vec![CheckEntry::from_tensor(
            "coproduct_respects_relation",
            &subj,
            self.residual_tensor(&lhs.sub(&rhs)),
        )];
        out.push(CheckEntry::from_series(
            "counit_respects_relation",
            &subj,
            self.residual_series(&self.counit(&r)),
        ));
        let (si, sj) = (self.antipode(&xi)?, self.antipode(&xj)?);
        let lhs = self.multiply(&si, &sj)?;
        let rhs = self.multiply(&sj, &si)?.try_add(&self.antipode(&r)?)?;
        out.push(CheckEntry::from_element(
            "antipode_respects_relation",
            &subj,
            self.residual(&lhs.try_sub(&rhs)?),
        ));
        Ok(out)
    }

    /// Coassociativity, counit and antipode laws on every monomial of
    /// degree at most `degree_bound`, plus compatibility of `Δ`, `ε`, `S`
    /// with every relation.
    pub fn check_hopf_axioms(&self, degree_bound: u32) -> Result<HopfReport> {
        let bound = match self.degree_filter() {
            Some(d) => degree_bound.min(d),
            None => degree_bound,
        };
        let mut entries: Vec<CheckEntry> = (0..self.ngens())
            .map(|i| {
                CheckEntry::from_series("counit_normalised", &self.generators[i], self.counit[i].clone())
            })
            .collect();
        let monos = Monomial::all_up_to_degree(self.ngens(), bound);
        let per_mono: Vec<Result<Vec<CheckEntry>>> =
            monos.par_iter().map(|m| self.axioms_on_monomial(m)).collect();
        for r in per_mono {
            entries.extend(r?);
        }
        let pairs: Vec<(usize, usize)> = (0..self.ngens())
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .collect();
        let per_rel: Vec<Result<Vec<CheckEntry>>> =
            pairs.par_iter().map(|&(i, j)| self.axioms_on_relation(i, j)).collect();
        for r in per_rel {
            entries.extend(r?);
        }
        Ok(HopfReport::new(entries))
    }

    /// Confluence of the rewriting on every overlap `x_k·x_j·x_i`, `i<j<k`.
    pub fn check_diamond(&self) -> Result<HopfReport> {
        let n = self.ngens();
        let mut triples = Vec::new();
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    triples.push((i, j, k));
                }
            }
        }
        let res: Vec<Result<CheckEntry>> = triples
            .par_iter()
            .map(|&(i, j, k)| {
                let kj = self.normal_form(&[k, j], self.one_series())?;
                let ji = self.normal_form(&[j, i], self.one_series())?;
                let left = self.multiply(&kj, &self.gen(i))?;
                let right = self.multiply(&self.gen(k), &ji)?;
                let subj = word_string(&self.generators, &[k, j, i]);
                Ok(CheckEntry::from_element("diamond", &subj, self.residual(&left.try_sub(&right)?)))
            })
            .collect();
        Ok(HopfReport::new(res.into_iter().collect::<Result<Vec<_>>>()?))
    }
}

fn add_to(out: &mut BTreeMap<Vec<Monomial>, HSeries>, k: Vec<Monomial>, c: HSeries) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match out.entry(k) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// 1-based subset to sorted 0-based positions.
fn positions(e: &[usize], n: usize) -> Vec<usize> {
    let mut pos: Vec<usize> = e
        .iter()
        .map(|&s| {
            assert!(s >= 1 && s <= n, "slot {s} outside 1..={n}");
            s - 1
        })
        .collect();
    pos.sort_unstable();
    pos.dedup();
    pos
}

/// All subsets of `{1..n}` as sorted vectors, by bitmask order.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .map(|mask| (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect())
        .collect()
}
