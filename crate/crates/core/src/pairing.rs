//! Truncated Hopf pairings between a POLY and a SERIES presentation.
//!
//! A [`PairingSeed`] fixes `⟨x_i, X_j⟩` on generators; everything else
//! follows from the pairing rules
//! `⟨u₁u₂, v⟩ = ⟨u₁⊗u₂, Δv⟩`, `⟨u, v₁v₂⟩ = ⟨Δu, v₁⊗v₂⟩` and the counit
//! rules. [`orthogonal_membership`] uses the pairing as a second,
//! independent route to `H′`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::drinfeld::MembershipCertificate;
use crate::error::{Error, Result};
use crate::freealg::{Element, Monomial, TensorElement};
use crate::hopf::{Model, Presentation};
use crate::report::{CheckEntry, HopfReport};
use crate::series::{HSeries, Valuation};

/// Slot of a seed value: a generator index or the unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SeedSlot {
    Unit,
    Gen(usize),
}

/// Generator-level values of a pairing.
///
/// Unlisted pairs are zero. Values against the unit (`⟨x_i, 1⟩`,
/// `⟨1, X_j⟩`) may be given, which lets the axiom check catch seeds that
/// break the counit rules.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingSeed {
    pub left: String,
    pub right: String,
    pub values: BTreeMap<(SeedSlot, SeedSlot), HSeries>,
    validated: bool,
}

impl PairingSeed {
    pub fn new(left: &str, right: &str) -> Self {
        PairingSeed {
            left: left.to_string(),
            right: right.to_string(),
            values: BTreeMap::new(),
            validated: false,
        }
    }

    /// `⟨x_i, X_j⟩ = δ_ij`.
    pub fn diagonal(left: &Presentation, right: &Presentation) -> Self {
        let mut s = Self::new(left.name(), right.name());
        for i in 0..left.ngens().min(right.ngens()) {
            s.set(SeedSlot::Gen(i), SeedSlot::Gen(i), HSeries::one(left.h_order()));
        }
        s
    }

    pub fn set(&mut self, l: SeedSlot, r: SeedSlot, v: HSeries) -> &mut Self {
        self.validated = false;
        self.values.insert((l, r), v);
        self
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    fn value(&self, l: SeedSlot, r: SeedSlot, order: i64) -> HSeries {
        self.values
            .get(&(l, r))
            .map(|v| v.truncate(order))
            .unwrap_or_else(|| HSeries::zero(order))
    }
}

/// Pairing evaluator with a call-local memo table.
pub struct Pairing<'a> {
    left: &'a Presentation,
    right: &'a Presentation,
    seed: &'a PairingSeed,
    order: i64,
    memo: Mutex<HashMap<(Monomial, Monomial), HSeries>>,
}

impl<'a> Pairing<'a> {
    pub fn new(left: &'a Presentation, right: &'a Presentation, seed: &'a PairingSeed) -> Self {
        Pairing {
            left,
            right,
            seed,
            order: left.h_order().min(right.h_order()),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// `⟨u, v⟩` on ordered monomials.
    pub fn pair_monomials(&self, u: &Monomial, v: &Monomial) -> Result<HSeries> {
        let ord = self.order;
        match (u.first_gen(), v.first_gen()) {
            (None, None) => return Ok(HSeries::one(ord)),
            (Some(i), None) if u.degree() == 1 => return Ok(self.seed.value(SeedSlot::Gen(i), SeedSlot::Unit, ord)),
            (None, Some(j)) if v.degree() == 1 => return Ok(self.seed.value(SeedSlot::Unit, SeedSlot::Gen(j), ord)),
            (Some(i), Some(j)) if u.degree() == 1 && v.degree() == 1 => {
                return Ok(self.seed.value(SeedSlot::Gen(i), SeedSlot::Gen(j), ord))
            }
            _ => {}
        }
        let key = (u.clone(), v.clone());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let mut acc = HSeries::zero(ord);
        if u.degree() >= 2 || (u.degree() == 1 && v.is_one()) {
            // split the left word: ⟨x_i·u′, v⟩ = Σ ⟨x_i, v₁⟩⟨u′, v₂⟩
            let i = u.first_gen().expect("nonempty");
            let xi = Monomial::generator(u.ngens(), i);
            let rest = u.lowered(i);
            let dv = coproduct_monomial(self.right, v)?;
            for (k, c) in dv.terms() {
                let a = self.pair_monomials(&xi, &k[0])?;
                if a.is_zero() {
                    continue;
                }
                let b = self.pair_monomials(&rest, &k[1])?;
                acc = &acc + &(&(c * &a) * &b).truncate(ord);
            }
        } else {
            // |u| ≤ 1 and |v| ≥ 2: ⟨u, X_j·v′⟩ = Σ ⟨u₁, X_j⟩⟨u₂, v′⟩
            let j = v.first_gen().expect("nonempty");
            let xj = Monomial::generator(v.ngens(), j);
            let rest = v.lowered(j);
            let du = coproduct_monomial(self.left, u)?;
            for (k, c) in du.terms() {
                let a = self.pair_monomials(&k[0], &xj)?;
                if a.is_zero() {
                    continue;
                }
                let b = self.pair_monomials(&k[1], &rest)?;
                acc = &acc + &(&(c * &a) * &b).truncate(ord);
            }
        }
        self.memo.lock().unwrap().insert(key, acc.clone());
        Ok(acc)
    }

    /// Bilinear extension to elements.
    pub fn pair(&self, a: &Element, b: &Element) -> Result<HSeries> {
        let mut acc = HSeries::zero(self.order);
        for (u, c) in a.terms() {
            for (v, d) in b.terms() {
                let val = self.pair_monomials(u, v)?;
                acc = &acc + &(&(c * d) * &val).truncate(self.order);
            }
        }
        Ok(acc)
    }

    /// `⟨s, t⟩` slotwise on rank-2 tensors.
    pub fn pair_tensors(&self, s: &TensorElement, t: &TensorElement) -> Result<HSeries> {
        let mut acc = HSeries::zero(self.order);
        for (ks, cs) in s.terms() {
            for (kt, ct) in t.terms() {
                let mut v = cs * ct;
                for slot in 0..s.rank() {
                    if v.is_zero() {
                        break;
                    }
                    v = &v * &self.pair_monomials(&ks[slot], &kt[slot])?;
                }
                acc = &acc + &v.truncate(self.order);
            }
        }
        Ok(acc)
    }
}

fn coproduct_monomial(p: &Presentation, m: &Monomial) -> Result<TensorElement> {
    p.coproduct(&Element::monomial(p.id(), m.clone(), p.one_series()))
}

/// `⟨a, b⟩` with a fresh memo table.
pub fn pair(a: &Element, b: &Element, left: &Presentation, right: &Presentation, seed: &PairingSeed) -> Result<HSeries> {
    Pairing::new(left, right, seed).pair(a, b)
}

/// Checks every pairing rule on monomials up to `degree_bound` and marks
/// the seed validated when all pass.
pub fn pairing_axioms_check(
    seed: &mut PairingSeed,
    left: &Presentation,
    right: &Presentation,
    degree_bound: u32,
) -> Result<HopfReport> {
    let rep = {
        let pr = Pairing::new(left, right, seed);
        let lm = Monomial::all_up_to_degree(left.ngens(), degree_bound);
        let rm = Monomial::all_up_to_degree(right.ngens(), degree_bound.min(right.degree_cap()));
        let lname = |m: &Monomial| m.to_expr(left.generators());
        let rname = |m: &Monomial| m.to_expr(right.generators());
        let lel = |m: &Monomial| Element::monomial(left.id(), m.clone(), left.one_series());
        let rel = |m: &Monomial| Element::monomial(right.id(), m.clone(), right.one_series());
        let residual = |d: HSeries| d.truncate(pr.order());
        let mut entries = Vec::new();
        for u in &lm {
            let v = pr.pair_monomials(u, &Monomial::one(right.ngens()))?;
            let e = left.counit(&lel(u));
            entries.push(CheckEntry::from_series("unit_right", &lname(u), residual(&v - &e)));
        }
        for v in &rm {
            let x = pr.pair_monomials(&Monomial::one(left.ngens()), v)?;
            let e = right.counit(&rel(v));
            entries.push(CheckEntry::from_series("unit_left", &rname(v), residual(&x - &e)));
        }
        let rows: Vec<Result<Vec<CheckEntry>>> = lm
            .par_iter()
            .map(|u| {
                let mut out = Vec::new();
                let du = left.coproduct(&lel(u))?;
                let su = left.antipode(&lel(u))?;
                for v in &rm {
                    let lhs = pr.pair(&su, &rel(v))?;
                    let rhs = pr.pair(&lel(u), &right.antipode(&rel(v))?)?;
                    out.push(CheckEntry::from_series(
                        "antipode",
                        &format!("<S({}), {}>", lname(u), rname(v)),
                        residual(&lhs - &rhs),
                    ));
                }
                for v1 in &rm {
                    for v2 in &rm {
                        if v1.degree() + v2.degree() > degree_bound || v1.is_one() || v2.is_one() {
                            continue;
                        }
                        let prod = right.multiply(&rel(v1), &rel(v2))?;
                        let lhs = pr.pair(&lel(u), &prod)?;
                        let t = TensorElement::from_terms(2, [(vec![v1.clone(), v2.clone()], right.one_series())]);
                        let rhs = pr.pair_tensors(&du, &t)?;
                        out.push(CheckEntry::from_series(
                            "right_product",
                            &format!("<{}, {}*{}>", lname(u), rname(v1), rname(v2)),
                            residual(&lhs - &rhs),
                        ));
                    }
                }
                Ok(out)
            })
            .collect();
        for r in rows {
            entries.extend(r?);
        }
        let rows: Vec<Result<Vec<CheckEntry>>> = rm
            .par_iter()
            .map(|v| {
                let mut out = Vec::new();
                let dv = right.coproduct(&rel(v))?;
                for u1 in &lm {
                    for u2 in &lm {
                        if u1.degree() + u2.degree() > degree_bound || u1.is_one() || u2.is_one() {
                            continue;
                        }
                        let prod = left.multiply(&lel(u1), &lel(u2))?;
                        let lhs = pr.pair(&prod, &rel(v))?;
                        let t = TensorElement::from_terms(2, [(vec![u1.clone(), u2.clone()], left.one_series())]);
                        let rhs = pr.pair_tensors(&t, &dv)?;
                        out.push(CheckEntry::from_series(
                            "left_product",
                            &format!("<{}*{}, {}>", lname(u1), lname(u2), rname(v)),
                            residual(&lhs - &rhs),
                        ));
                    }
                }
                Ok(out)
            })
            .collect();
        for r in rows {
            entries.extend(r?);
        }
        HopfReport::new(entries)
    };
    seed.validated = rep.passed();
    Ok(rep)
}

/// Membership in `H′` through orthogonality: `⟨a, J^n⟩ ⊆ h^n k[[h]]` for
/// `n ≤ n_max` (default the h-order), `J` the augmentation ideal of the
/// right presentation.
///
/// `J^n` is spanned by the ordered monomials `X^e` with `|e| ≥ n`, and
/// `⟨a, j_1⋯j_n⟩ = ⟨δ_n(a), j_1⊗⋯⊗j_n⟩`, so the per-`n` valuations are
/// those of the delta route whenever the pairing is nondegenerate.
pub fn orthogonal_membership(
    a: &Element,
    seed: &PairingSeed,
    left: &Presentation,
    right: &Presentation,
    n_max: Option<usize>,
) -> Result<MembershipCertificate> {
    if !seed.is_validated() {
        return Err(Error::InvalidPairing("seed has not passed the axiom check".into()));
    }
    if left.model() != Model::Poly || right.model() != Model::Series {
        return Err(Error::WrongModel("orthogonality pairs a POLY with a SERIES presentation".into()));
    }
    let n_max = n_max.unwrap_or(left.h_order().max(0) as usize);
    let pr = Pairing::new(left, right, seed);
    let monos = Monomial::all_up_to_degree(right.ngens(), right.degree_cap());
    let paired: Vec<Result<(u32, Valuation)>> = monos
        .par_iter()
        .map(|e| {
            let v = pr.pair(a, &Element::monomial(right.id(), e.clone(), right.one_series()))?;
            Ok((e.degree(), v.valuation()))
        })
        .collect();
    let paired = paired.into_iter().collect::<Result<Vec<_>>>()?;
    let vals = (0..=n_max)
        .map(|n| {
            paired
                .iter()
                .filter(|(d, _)| if n == 0 { *d == 0 } else { *d as usize >= n })
                .map(|(_, v)| *v)
                .min()
                .unwrap_or(Valuation::Infinity)
        })
        .collect();
    Ok(MembershipCertificate::from_valuations(a, left, vals))
}
