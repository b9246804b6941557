//! Drinfeld's functors at finite truncation.
//!
//! * [`prime_membership`] decides `δ_n(a) ∈ h^n H^{⊗n}` for `n ≤ n_max`.
//! * [`prime_presentation`] rewrites a POLY presentation on the generators
//!   `X_i = h·x_i`; every division by `h` it needs is checked exactly.
//! * [`vee_presentation`] goes the other way with `X̌_i = h⁻¹·X_i`.
//! * [`roundtrip_check`] composes the two and compares with the input.
//!
//! ```
//! use qdp::drinfeld::{prime_membership, Verdict};
//! use qdp::examples::builtin;
//!
//! let p = builtin("borel2").unwrap().quea;
//! let y = p.gen(1);
//! let cert = prime_membership(&y, &p, None).unwrap();
//! assert_eq!(cert.verdict, Verdict::NotMember { witness: 2 });
//! ```

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freealg::{Element, Monomial, TensorElement};
use crate::hopf::{Model, Presentation, PresentationBuilder};
use crate::report::{CheckEntry, Discrepancy, HopfReport};
use crate::series::{HSeries, Valuation};

/// Outcome of a membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    MemberUpToTruncation,
    NotMember { witness: usize },
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::MemberUpToTruncation)
    }
}

/// Evidence for a membership verdict, relative to the stated truncation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipCertificate {
    pub element: Element,
    pub expression: String,
    pub h_order: i64,
    pub degree_cap: u32,
    pub n_checked: Vec<usize>,
    pub valuations: Vec<Valuation>,
    pub failing: Vec<usize>,
    pub verdict: Verdict,
}

impl MembershipCertificate {
    /// Builds the verdict from per-`n` valuations.
    ///
    /// The reported witness is the smallest failing `n ≥ 2`, or the smallest
    /// failing `n` when only `n ≤ 1` fails. Below two the test only sees
    /// the counit and `a − ε(a)`, which every generator fails; the first
    /// informative failure is the useful one.
    pub fn from_valuations(a: &Element, p: &Presentation, valuations: Vec<Valuation>) -> Self {
        let n_checked: Vec<usize> = (0..valuations.len()).collect();
        let failing: Vec<usize> = n_checked
            .iter()
            .copied()
            .filter(|&n| !valuations[n].at_least(n as i64))
            .collect();
        let verdict = match failing.iter().find(|&&n| n >= 2).or(failing.first()) {
            Some(&w) => Verdict::NotMember { witness: w },
            None => Verdict::MemberUpToTruncation,
        };
        MembershipCertificate {
            element: a.clone(),
            expression: p.show(a),
            h_order: p.h_order(),
            degree_cap: p.degree_cap(),
            n_checked,
            valuations,
            failing,
            verdict,
        }
    }
}

/// Tests `a ∈ H′` through `δ_0 … δ_{n_max}` (default `n_max = N`).
pub fn prime_membership(a: &Element, p: &Presentation, n_max: Option<usize>) -> Result<MembershipCertificate> {
    if p.model() != Model::Poly {
        return Err(Error::WrongModel(format!("{} is not a POLY presentation", p.name())));
    }
    let n_max = n_max.unwrap_or(p.h_order().max(0) as usize);
    let deltas = p.delta_sequence(a, n_max)?;
    let vals = deltas.iter().map(TensorElement::h_valuation).collect();
    Ok(MembershipCertificate::from_valuations(a, p, vals))
}

/// Generator names with the first letter's case changed, made unique.
fn recased(names: &[String], upper: bool) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(names.len());
    for n in names {
        let mut chars = n.chars();
        let first = chars.next().unwrap_or('x');
        let head: String = if upper {
            first.to_uppercase().collect()
        } else {
            first.to_lowercase().collect()
        };
        let mut cand = format!("{head}{}", chars.as_str());
        while out.contains(&cand) {
            cand.push('\'');
        }
        out.push(cand);
    }
    out
}

/// Name of `P′`.
pub fn prime_name(name: &str) -> String {
    match name.strip_suffix("^vee") {
        Some(base) => base.to_string(),
        None => format!("{name}'"),
    }
}

/// Name of `P^∨`.
pub fn vee_name(name: &str) -> String {
    match name.strip_suffix('\'') {
        Some(base) => base.to_string(),
        None => format!("{name}^vee"),
    }
}

/// Multiplies `c` by `h^k`, dividing exactly when `k < 0`.
fn rescale(c: &HSeries, k: i64, order: i64, what: impl FnOnce() -> String) -> Result<HSeries> {
    let out = if k >= 0 {
        c.shift(k)
    } else {
        c.div_h(-k).map_err(|_| Error::NotDivisible {
            context: format!("{}: coefficient {c} times h^{k}", what()),
        })?
    };
    Ok(out.truncate(order))
}

fn weight(m: &Monomial, w: &[i64]) -> i64 {
    m.exps().iter().zip(w).map(|(&e, &wi)| e as i64 * wi).sum()
}

/// Target shape of a generator rescaling.
pub struct Rescaling<'a> {
    pub name: String,
    pub model: Model,
    pub generators: Vec<String>,
    /// New generator `i` is `h^{weights[i]}·x_i`.
    pub weights: &'a [i64],
    pub h_order: i64,
    pub degree_cap: u32,
}

/// Rewrites `P` on the generators `h^{w_i}·x_i`.
///
/// A term `c·x^e` of `r_ij` becomes `c·h^{w_i+w_j−w·e}·X^e`, a term of
/// `Δ(x_i)` on `x^e⊗x^f` gets `h^{w_i−w·e−w·f}`, a term of `S(x_i)` gets
/// `h^{w_i−w·e}`. Negative powers are exact divisions.
pub fn rescale_presentation(p: &Presentation, t: &Rescaling<'_>) -> Result<Presentation> {
    let n = p.ngens();
    assert_eq!(t.weights.len(), n);
    let gens: Vec<&str> = t.generators.iter().map(String::as_str).collect();
    let mut b = PresentationBuilder::new(&t.name, t.model, &gens, t.h_order, t.degree_cap);
    let keep = |d: u32| t.model == Model::Poly || d <= t.degree_cap;
    let id: std::sync::Arc<str> = std::sync::Arc::from(t.name.as_str());
    let w = t.weights;
    let pg = p.generators();
    for j in 0..n {
        for i in 0..j {
            let r = p.relation(i, j);
            let mut terms = Vec::new();
            for (m, c) in r.terms() {
                let k = w[i] + w[j] - weight(m, w);
                let c2 = rescale(c, k, t.h_order, || {
                    format!("relation {}*{} term {}", pg[j], pg[i], m.to_expr(pg))
                })?;
                terms.push((m.clone(), c2));
            }
            b.relation(i, j, Element::from_terms(&id, terms));
        }
    }
    for i in 0..n {
        let mut cop = TensorElement::zero(2);
        for (k, c) in p.coproduct_of(i).terms() {
            let deg = k[0].degree() + k[1].degree();
            let e = w[i] - weight(&k[0], w) - weight(&k[1], w);
            let c2 = rescale(c, e, t.h_order, || {
                format!(
                    "coproduct of {} term {} (x) {}",
                    pg[i],
                    k[0].to_expr(pg),
                    k[1].to_expr(pg)
                )
            })?;
            if keep(deg) {
                cop.add_term(k.clone(), c2);
            }
        }
        b.coproduct(i, cop);
        let mut anti = Vec::new();
        for (m, c) in p.antipode_of(i).terms() {
            let e = w[i] - weight(m, w);
            let c2 = rescale(c, e, t.h_order, || format!("antipode of {} term {}", pg[i], m.to_expr(pg)))?;
            if keep(m.degree()) {
                anti.push((m.clone(), c2));
            }
        }
        b.antipode(i, Element::from_terms(&id, anti));
    }
    b.build()
}

/// `P′` on `X_i = h·x_i`: a SERIES presentation with the same `N` and
/// degree cap `min(D, N)`.
///
/// The cap is lowered to `N` because a degree-`d` coefficient of `P′` is
/// only determined modulo `h^{N+1−d}`.
pub fn prime_presentation(p: &Presentation) -> Result<Presentation> {
    if p.model() != Model::Poly {
        return Err(Error::WrongModel(format!("prime needs a POLY presentation, {} is SERIES", p.name())));
    }
    let weights = vec![1; p.ngens()];
    rescale_presentation(
        p,
        &Rescaling {
            name: prime_name(p.name()),
            model: Model::Series,
            generators: recased(p.generators(), true),
            weights: &weights,
            h_order: p.h_order(),
            degree_cap: p.degree_cap().min(p.h_order().max(0) as u32),
        },
    )
}

/// `Q^∨` on `X̌_i = h⁻¹·X_i`: a POLY presentation with h-order
/// `min(N, D − 1)`.
///
/// Terms of `Q` above the degree cap are unknown and would land at
/// h-exponent `D` or more, hence the order drop.
pub fn vee_presentation(q: &Presentation) -> Result<Presentation> {
    if q.model() != Model::Series {
        return Err(Error::WrongModel(format!("vee needs a SERIES presentation, {} is POLY", q.name())));
    }
    let weights = vec![-1; q.ngens()];
    let order = q.h_order().min(q.degree_cap() as i64 - 1).max(0);
    rescale_presentation(
        q,
        &Rescaling {
            name: vee_name(q.name()),
            model: Model::Poly,
            generators: recased(q.generators(), false),
            weights: &weights,
            h_order: order,
            degree_cap: q.degree_cap(),
        },
    )
}

/// Direction of a round trip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    PrimeThenVee,
    VeeThenPrime,
}

/// Compares the structure maps of two presentations on the same number of
/// generators, up to their common truncation.
pub fn compare_presentations(a: &Presentation, b: &Presentation) -> HopfReport {
    let mut rep = HopfReport::default();
    if a.ngens() != b.ngens() || a.model() != b.model() {
        rep.push(CheckEntry::fail(
            "shape",
            format!("{} vs {}", a.name(), b.name()),
            Discrepancy::Text(format!(
                "{} {} generators vs {} {} generators",
                a.model(),
                a.ngens(),
                b.model(),
                b.ngens()
            )),
        ));
        return rep;
    }
    let n = a.h_order().min(b.h_order());
    let d = match a.model() {
        Model::Poly => None,
        Model::Series => Some(a.degree_cap().min(b.degree_cap())),
    };
    let names = a.generators();
    let ediff = |x: &Element, y: &Element| x.try_sub(&y.relabel(x.pres_arc())).map(|e| e.truncate(n, d));
    for j in 0..a.ngens() {
        for i in 0..j {
            let subj = format!("{}*{}", names[j], names[i]);
            let entry = match ediff(&a.relation(i, j), &b.relation(i, j)) {
                Ok(r) => CheckEntry::from_element("relation", &subj, r),
                Err(e) => CheckEntry::fail("relation", &subj, Discrepancy::Text(e.to_string())),
            };
            rep.push(entry);
        }
    }
    for i in 0..a.ngens() {
        let g = &names[i];
        let t = a.coproduct_of(i).sub(b.coproduct_of(i)).truncate(n, d);
        rep.push(CheckEntry::from_tensor("coproduct", g, t));
        rep.push(CheckEntry::from_series(
            "counit",
            g,
            (a.counit_of(i) - b.counit_of(i)).truncate(n),
        ));
        let entry = match ediff(a.antipode_of(i), b.antipode_of(i)) {
            Ok(r) => CheckEntry::from_element("antipode", g, r),
            Err(e) => CheckEntry::fail("antipode", g, Discrepancy::Text(e.to_string())),
        };
        rep.push(entry);
    }
    rep
}

/// Applies both functors in the given order and compares with `p`.
pub fn roundtrip_check(p: &Presentation, direction: Direction) -> Result<HopfReport> {
    let back = match direction {
        Direction::PrimeThenVee => vee_presentation(&prime_presentation(p)?)?,
        Direction::VeeThenPrime => prime_presentation(&vee_presentation(p)?)?,
    };
    Ok(compare_presentations(p, &back))
}

/// Images of the generators under a candidate equivalence `id + h·φ₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeMap {
    pub images: Vec<Element>,
}

impl GaugeMap {
    /// Checks that every image reduces to its generator modulo `h`.
    pub fn new(p: &Presentation, images: Vec<Element>) -> Result<Self> {
        if images.len() != p.ngens() {
            return Err(Error::Inadmissible(format!(
                "gauge map needs {} images, got {}",
                p.ngens(),
                images.len()
            )));
        }
        for (i, im) in images.iter().enumerate() {
            let d = im.try_sub(&p.gen(i))?;
            if !d.h_valuation().at_least(1) {
                return Err(Error::Inadmissible(format!(
                    "gauge image of {} is {}, not {} modulo h",
                    p.generators()[i],
                    p.show(im),
                    p.generators()[i]
                )));
            }
        }
        Ok(GaugeMap { images })
    }

    pub fn identity(p: &Presentation) -> Self {
        GaugeMap {
            images: (0..p.ngens()).map(|i| p.gen(i)).collect(),
        }
    }

    fn on_monomial(&self, p: &Presentation, m: &Monomial, memo: &mut BTreeMap<Monomial, Element>) -> Result<Element> {
        if let Some(v) = memo.get(m) {
            return Ok(v.clone());
        }
        let v = match m.last_gen() {
            None => p.one(),
            Some(j) => {
                let rest = self.on_monomial(p, &m.lowered(j), memo)?;
                p.multiply(&rest, &self.images[j])?
            }
        };
        memo.insert(m.clone(), v.clone());
        Ok(v)
    }

    /// The algebra map on an element.
    pub fn apply(&self, p: &Presentation, a: &Element) -> Result<Element> {
        let mut memo = BTreeMap::new();
        let mut out = Element::zero(p.id());
        for (m, c) in a.terms() {
            out = out.try_add(&self.on_monomial(p, m, &mut memo)?.scale(c))?;
        }
        Ok(p.residual(&out))
    }

    /// `φ^{⊗n}` on a tensor.
    pub fn apply_tensor(&self, p: &Presentation, t: &TensorElement) -> Result<TensorElement> {
        let mut memo = BTreeMap::new();
        let mut out = TensorElement::zero(t.rank());
        for (k, c) in t.terms() {
            let mut partial: Vec<(Vec<Monomial>, HSeries)> = vec![(Vec::new(), c.clone())];
            for m in k {
                let img = self.on_monomial(p, m, &mut memo)?;
                let mut next = Vec::new();
                for (key, c) in &partial {
                    for (u, d) in img.terms() {
                        let mut nk = key.clone();
                        nk.push(u.clone());
                        next.push((nk, c * d));
                    }
                }
                partial = next;
            }
            for (key, c) in partial {
                out.add_term(key, c);
            }
        }
        Ok(p.residual_tensor(&out))
    }
}

/// Checks that a gauge map is a Hopf map, intertwines `δ_n` for `n ≤ 3`,
/// and sends every `h·x_i` into `H′`.
///
/// Fails with [`Error::NotAHopfMap`] when the first group of checks fails.
pub fn gauge_preservation_check(p: &Presentation, phi: &GaugeMap) -> Result<HopfReport> {
    let names = p.generators();
    let mut hopf = Vec::new();
    for i in 0..p.ngens() {
        let img = &phi.images[i];
        let lhs = p.coproduct(img)?;
        let rhs = phi.apply_tensor(p, p.coproduct_of(i))?;
        hopf.push(CheckEntry::from_tensor(
            "hopf_map_coproduct",
            &names[i],
            p.residual_tensor(&lhs.sub(&rhs)),
        ));
        hopf.push(CheckEntry::from_series(
            "hopf_map_counit",
            &names[i],
            p.residual_series(&p.counit(img)),
        ));
        let lhs = p.antipode(img)?;
        let rhs = phi.apply(p, p.antipode_of(i))?;
        hopf.push(CheckEntry::from_element(
            "hopf_map_antipode",
            &names[i],
            p.residual(&lhs.try_sub(&rhs)?),
        ));
    }
    for j in 0..p.ngens() {
        for i in 0..j {
            let (pi, pj) = (&phi.images[i], &phi.images[j]);
            let lhs = p.multiply(pj, pi)?;
            let rhs = p.multiply(pi, pj)?.try_add(&phi.apply(p, &p.relation(i, j))?)?;
            hopf.push(CheckEntry::from_element(
                "hopf_map_relation",
                &format!("{}*{}", names[j], names[i]),
                p.residual(&lhs.try_sub(&rhs)?),
            ));
        }
    }
    if let Some(bad) = hopf.iter().find(|c| !c.pass) {
        let what = match &bad.discrepancy {
            Some(Discrepancy::Tensor(t)) => p.show_tensor(t),
            Some(Discrepancy::Element(e)) => p.show(e),
            Some(Discrepancy::Series(s)) => s.to_string(),
            Some(Discrepancy::Text(t)) => t.clone(),
            None => String::new(),
        };
        return Err(Error::NotAHopfMap(format!(
            "{} on {} leaves {}",
            bad.axiom, bad.subject, what
        )));
    }
    let mut rep = HopfReport::new(hopf);
    let rows: Vec<Result<Vec<CheckEntry>>> = (0..p.ngens())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let x = p.gen(i);
            let img = &phi.images[i];
            for n in 0..=3 {
                let lhs = p.delta_n(img, n)?;
                let rhs = phi.apply_tensor(p, &p.delta_n(&x, n)?)?;
                out.push(CheckEntry::from_tensor(
                    "delta_intertwines",
                    &format!("n={n} {}", names[i]),
                    p.residual_tensor(&lhs.sub(&rhs)),
                ));
            }
            let hx = phi.apply(p, &x.scale(&HSeries::h_pow(1, p.h_order())))?;
            let cert = prime_membership(&hx, p, None)?;
            out.push(CheckEntry::from_bool(
                "membership_preserved",
                &format!("phi(h*{})", names[i]),
                cert.verdict.is_member(),
                || format!("{:?}", cert.verdict),
            ));
            Ok(out)
        })
        .collect();
    for r in rows {
        for e in r? {
            rep.push(e);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        assert_eq!(prime_name("borel2"), "borel2'");
        assert_eq!(vee_name("borel2'"), "borel2");
        assert_eq!(prime_name(&vee_name("k")), "k");
        let up = recased(&["x".into(), "X".into()], true);
        assert_eq!(up, vec!["X".to_string(), "X'".to_string()]);
    }

    #[test]
    fn witness_rule() {
        let p = PresentationBuilder::new("t", Model::Poly, &["x"], 4, 4).build().unwrap();
        let a = p.gen(0);
        let v = |xs: &[i64]| xs.iter().map(|&x| Valuation::Finite(x)).collect::<Vec<_>>();
        let c = MembershipCertificate::from_valuations(&a, &p, v(&[0, 0, 1, 3]));
        assert_eq!(c.failing, vec![1, 2]);
        assert_eq!(c.verdict, Verdict::NotMember { witness: 2 });
        let c = MembershipCertificate::from_valuations(&a, &p, v(&[0, 0, 5, 5]));
        assert_eq!(c.verdict, Verdict::NotMember { witness: 1 });
        let c = MembershipCertificate::from_valuations(&a, &p, v(&[0, 1, 2, 3]));
        assert_eq!(c.verdict, Verdict::MemberUpToTruncation);
    }
}
