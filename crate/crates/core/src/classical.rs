//! Semiclassical limits and Lie bialgebras.
//!
//! A QUEA specialises to `U(g)` and yields `g` with its cobracket; a QFSHA
//! specialises to `F[[k]]`, whose cotangent space `m/m²` carries the dual
//! structure. [`extract_poisson_structure`] returns `k` itself, so for a QUEA `P`
//! one expects `extract_poisson_structure(P′) = dual(extract_lie_bialgebra(P))`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freealg::{Element, Monomial};
use crate::hopf::{Model, Presentation};
use crate::report::{CheckEntry, HopfReport};
use crate::series::{Rational, Valuation};

/// Structure constants `[x_i,x_j] = Σ c[i][j][k] x_k` and
/// `δ(x_k) = Σ_{i<j} d[k][i][j] (x_i⊗x_j − x_j⊗x_i)`, both stored
/// antisymmetrised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieBialgebra {
    basis: Vec<String>,
    bracket: Vec<Rational>,
    cobracket: Vec<Rational>,
}

impl LieBialgebra {
    /// The abelian Lie algebra with zero cobracket.
    pub fn zero(basis: &[&str]) -> Self {
        Self::with_names(basis.iter().map(|s| s.to_string()).collect())
    }

    pub fn with_names(basis: Vec<String>) -> Self {
        let n = basis.len();
        LieBialgebra {
            basis,
            bracket: vec![Rational::zero(); n * n * n],
            cobracket: vec![Rational::zero(); n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.dim();
        (a * n + b) * n + c
    }

    /// `c[i][j][k]`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.bracket[self.idx(i, j, k)]
    }

    /// `d[k][i][j]`.
    pub fn d(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.cobracket[self.idx(k, i, j)]
    }

    /// Sets `[x_i, x_j]`'s `x_k` coefficient (and its antisymmetric twin).
    pub fn set_bracket(&mut self, i: usize, j: usize, k: usize, q: Rational) -> &mut Self {
        let (a, b) = (self.idx(i, j, k), self.idx(j, i, k));
        self.bracket[b] = -&q;
        self.bracket[a] = q;
        self
    }

    /// Sets the `x_i⊗x_j` coefficient of `δ(x_k)` (and its twin).
    pub fn set_cobracket(&mut self, k: usize, i: usize, j: usize, q: Rational) -> &mut Self {
        let (a, b) = (self.idx(k, i, j), self.idx(k, j, i));
        self.cobracket[b] = -&q;
        self.cobracket[a] = q;
        self
    }

    /// Nonzero entries with the antisymmetric pair in ascending order;
    /// `pair_first` selects which two indices form the pair.
    fn triples(&self, table: &[Rational], pair_first: bool) -> Vec<(usize, usize, usize, String)> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let q = &table[self.idx(a, b, c)];
                    let lower = if pair_first { a < b } else { b < c };
                    if lower && !q.is_zero() {
                        out.push((a, b, c, q.to_string()));
                    }
                }
            }
        }
        out
    }

    /// Renders the nonzero brackets and cobrackets, one per line.
    pub fn describe(&self) -> String {
        let n = self.dim();
        let b = &self.basis;
        let mut lines = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let rhs = lin_comb((0..n).map(|k| (self.c(i, j, k).clone(), b[k].clone())));
                if rhs != "0" {
                    lines.push(format!("[{}, {}] = {rhs}", b[i], b[j]));
                }
            }
        }
        for k in 0..n {
            let mut parts = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    parts.push((self.d(k, i, j).clone(), format!("{}^{}", b[i], b[j])));
                }
            }
            let rhs = lin_comb(parts.into_iter());
            if rhs != "0" {
                lines.push(format!("delta({}) = {rhs}", b[k]));
            }
        }
        if lines.is_empty() {
            lines.push("abelian, zero cobracket".into());
        }
        lines.join("\n")
    }
}

fn lin_comb(parts: impl Iterator<Item = (Rational, String)>) -> String {
    let mut out = String::new();
    for (q, name) in parts {
        if q.is_zero() {
            continue;
        }
        let neg = q < Rational::zero();
        let mag = if neg { -q } else { q };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&format!("{mag}*"));
        }
        out.push_str(&name);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

impl Serialize for LieBialgebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            dim: usize,
            basis: &'a [String],
            bracket: Vec<(usize, usize, usize, String)>,
            cobracket: Vec<(usize, usize, usize, String)>,
        }
        Repr {
            dim: self.dim(),
            basis: &self.basis,
            bracket: self.triples(&self.bracket, true),
            cobracket: self.triples(&self.cobracket, false),
        }
        .serialize(s)
    }
}

/// An element of `H/hH`: rational coefficients on ordered monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalElement {
    pub terms: BTreeMap<Monomial, Rational>,
}

impl ClassicalElement {
    /// Largest degree in the support; `None` stands for `−∞` (the zero
    /// element).
    pub fn filtration_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The lift with constant series coefficients.
    pub fn lift(&self, p: &Presentation) -> Element {
        Element::from_terms(
            p.id(),
            self.terms
                .iter()
                .map(|(m, q)| (m.clone(), crate::series::HSeries::constant(q.clone(), p.h_order()))),
        )
    }
}

/// Value at `h = 0`.
pub fn specialise(a: &Element) -> Result<ClassicalElement> {
    if !a.h_valuation().at_least(0) {
        return Err(Error::NegativeValuation(format!("valuation {}", a.h_valuation())));
    }
    Ok(ClassicalElement {
        terms: a
            .terms()
            .iter()
            .map(|(m, c)| (m.clone(), c.coeff(0)))
            .filter(|(_, q)| !q.is_zero())
            .collect(),
    })
}

/// `filtration_degree(a)`, `None` meaning `−∞`.
pub fn filtration_degree(a: &ClassicalElement) -> Option<u32> {
    a.filtration_degree()
}

fn gen_index(m: &Monomial) -> Option<usize> {
    if m.degree() == 1 {
        m.first_gen()
    } else {
        None
    }
}

/// Reads `g` and its cobracket off a QUEA presentation.
pub fn extract_lie_bialgebra(p: &Presentation) -> Result<LieBialgebra> {
    if p.model() != Model::Poly {
        return Err(Error::WrongModel(format!("{} is not POLY", p.name())));
    }
    let names = p.generators();
    let n = p.ngens();
    let mut lie = LieBialgebra::with_names(names.to_vec());
    for j in 0..n {
        for i in 0..j {
            for (m, c) in p.relation(i, j).terms() {
                let c0 = c.coeff(0);
                if c0.is_zero() {
                    continue;
                }
                match gen_index(m) {
                    Some(k) => {
                        lie.set_bracket(i, j, k, -c0);
                    }
                    None => {
                        return Err(Error::NotLieType(format!(
                            "[{}, {}] has the term {} at h^0",
                            names[i],
                            names[j],
                            m.to_expr(names)
                        )))
                    }
                }
            }
        }
    }
    for k in 0..n {
        let t = p.coproduct_of(k);
        let anti = t.sub(&t.flip());
        for (key, c) in anti.terms() {
            let where_ = || format!("delta({}) at {} (x) {}", names[k], key[0].to_expr(names), key[1].to_expr(names));
            if !c.coeff(0).is_zero() {
                return Err(Error::CobracketNotInWedge(format!("{} is not cocommutative mod h", where_())));
            }
            let c1 = c.coeff(1);
            if c1.is_zero() {
                continue;
            }
            match (gen_index(&key[0]), gen_index(&key[1])) {
                (Some(a), Some(b)) if a < b => {
                    lie.set_cobracket(k, a, b, c1);
                }
                (Some(_), Some(_)) => {}
                _ => return Err(Error::CobracketNotInWedge(where_())),
            }
        }
    }
    Ok(lie)
}

/// The raw cotangent tables of a QFSHA: `m/m²` with the bracket induced by
/// `h⁻¹[ , ]` and the cobracket induced by `Δ − Δ^op` at `h = 0`.
pub fn cotangent_structure(q: &Presentation) -> Result<LieBialgebra> {
    if q.model() != Model::Series {
        return Err(Error::WrongModel(format!("{} is not SERIES", q.name())));
    }
    let names = q.generators();
    let n = q.ngens();
    let mut lie = LieBialgebra::with_names(names.to_vec());
    for j in 0..n {
        for i in 0..j {
            for (m, c) in q.relation(i, j).terms() {
                if !c.valuation().at_least(1) {
                    return Err(Error::NotCommutativeModH(format!(
                        "{}*{} has the term {} at h^0",
                        names[j],
                        names[i],
                        m.to_expr(names)
                    )));
                }
                if let Some(k) = gen_index(m) {
                    let c1 = c.coeff(1);
                    if !c1.is_zero() {
                        lie.set_bracket(i, j, k, -c1);
                    }
                }
            }
        }
    }
    for k in 0..n {
        let t = q.coproduct_of(k);
        let anti = t.sub(&t.flip());
        for (key, c) in anti.terms() {
            let c0 = c.coeff(0);
            if c0.is_zero() {
                continue;
            }
            if let (Some(a), Some(b)) = (gen_index(&key[0]), gen_index(&key[1])) {
                if a < b {
                    lie.set_cobracket(k, a, b, c0);
                }
            }
        }
    }
    Ok(lie)
}

/// The Lie bialgebra `k` with `Q/hQ = F[[k]]`: the dual of the cotangent
/// tables.
pub fn extract_poisson_structure(q: &Presentation) -> Result<LieBialgebra> {
    Ok(dual_lie_bialgebra(&cotangent_structure(q)?))
}

/// Transposes bracket and cobracket tables.
pub fn dual_lie_bialgebra(l: &LieBialgebra) -> LieBialgebra {
    let names = l
        .basis
        .iter()
        .map(|b| match b.strip_suffix('*') {
            Some(s) => s.to_string(),
            None => format!("{b}*"),
        })
        .collect();
    let n = l.dim();
    let mut out = LieBialgebra::with_names(names);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let i = l.idx(a, b, c);
                // ⟨[ξ_a,ξ_b], x_c⟩ = d[c][a][b];  ⟨δ*(ξ_c), x_a⊗x_b⟩ = c[a][b][c]
                out.bracket[i] = l.cobracket[l.idx(c, a, b)].clone();
                out.cobracket[l.idx(c, a, b)] = l.bracket[i].clone();
            }
        }
    }
    out
}

fn jacobi(n: usize, t: impl Fn(usize, usize, usize) -> Rational) -> Vec<(usize, usize, usize, usize, Rational)> {
    let mut bad = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in 0..n {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        s += t(j, k, m) * t(i, m, l) + t(k, i, m) * t(j, m, l) + t(i, j, m) * t(k, m, l);
                    }
                    if !s.is_zero() {
                        bad.push((i, j, k, l, s));
                    }
                }
            }
        }
    }
    bad
}

/// Antisymmetry, Jacobi, co-Jacobi and the 1-cocycle condition.
pub fn validate_lie_bialgebra(l: &LieBialgebra) -> HopfReport {
    let n = l.dim();
    let names = &l.basis;
    let mut rep = HopfReport::default();
    let antisym = (0..n).all(|a| {
        (0..n).all(|b| (0..n).all(|c| *l.c(a, b, c) == -l.c(b, a, c) && *l.d(c, a, b) == -l.d(c, b, a)))
    });
    rep.push(CheckEntry::from_bool("antisymmetry", "tables", antisym, || {
        "bracket or cobracket table is not antisymmetric".into()
    }));
    let describe = |bad: Vec<(usize, usize, usize, usize, Rational)>| {
        bad.iter()
            .map(|(i, j, k, l, s)| format!("({},{},{}) -> {s}*{}", names[*i], names[*j], names[*k], names[*l]))
            .collect::<Vec<_>>()
            .join("; ")
    };
    let bad = jacobi(n, |a, b, c| l.c(a, b, c).clone());
    rep.push(CheckEntry::from_bool("jacobi", "bracket", bad.is_empty(), || describe(bad.clone())));
    let bad = jacobi(n, |a, b, c| l.d(c, a, b).clone());
    rep.push(CheckEntry::from_bool("co_jacobi", "cobracket", bad.is_empty(), || describe(bad.clone())));
    for a in 0..n {
        for b in a + 1..n {
            let mut defect = Vec::new();
            for p in 0..n {
                for q in 0..n {
                    let mut lhs = Rational::zero();
                    for k in 0..n {
                        lhs += l.c(a, b, k) * l.d(k, p, q);
                    }
                    let mut rhs = Rational::zero();
                    for i in 0..n {
                        rhs += l.d(b, i, q) * l.c(a, i, p) - l.d(a, i, q) * l.c(b, i, p);
                        rhs += l.d(b, p, i) * l.c(a, i, q) - l.d(a, p, i) * l.c(b, i, q);
                    }
                    if lhs != rhs {
                        defect.push(format!("{}(x){}: {}", names[p], names[q], lhs - rhs));
                    }
                }
            }
            let subj = format!("[{}, {}]", names[a], names[b]);
            rep.push(CheckEntry::from_bool("cocycle", &subj, defect.is_empty(), || defect.join("; ")));
        }
    }
    rep
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Exact comparison of structure constants, optionally through a basis map
/// `φ(x_i) = Σ_j map[i][j]·y_j` from `l1` to `l2`.
pub fn lie_bialgebra_equal(l1: &LieBialgebra, l2: &LieBialgebra, basis_map: Option<&[Vec<Rational>]>) -> Result<bool> {
    let n = l1.dim();
    if n != l2.dim() {
        return Err(Error::DimensionMismatch { left: n, right: l2.dim() });
    }
    let Some(m) = basis_map else {
        return Ok(l1.bracket == l2.bracket && l1.cobracket == l2.cobracket);
    };
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { left: n, right: m.len() });
    }
    if invert(m).is_none() {
        return Err(Error::SingularBasisMap);
    }
    for a in 0..n {
        for b in 0..n {
            for t in 0..n {
                let mut lhs = Rational::zero();
                for k in 0..n {
                    lhs += l1.c(a, b, k) * &m[k][t];
                }
                let mut rhs = Rational::zero();
                for i in 0..n {
                    for j in 0..n {
                        rhs += &m[a][i] * &m[b][j] * l2.c(i, j, t);
                    }
                }
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    for k in 0..n {
        for p in 0..n {
            for q in 0..n {
                let mut lhs = Rational::zero();
                for i in 0..n {
                    for j in 0..n {
                        lhs += l1.d(k, i, j) * &m[i][p] * &m[j][q];
                    }
                }
                let mut rhs = Rational::zero();
                for t in 0..n {
                    rhs += &m[k][t] * l2.d(t, p, q);
                }
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Valuation-based check that `Δ(X̌) − Δ^op(X̌)` and
/// `Δ(X̌) − X̌⊗1 − 1⊗X̌` vanish at `h = 0` for every generator.
pub fn vee_limit_report(p: &Presentation) -> HopfReport {
    let mut rep = HopfReport::default();
    let n = p.ngens();
    for i in 0..n {
        let t = p.coproduct_of(i);
        let g = &p.generators()[i];
        let anti = t.sub(&t.flip());
        rep.push(CheckEntry::from_bool(
            "cocommutative_mod_h",
            g,
            anti.h_valuation().at_least(1),
            || p.show_tensor(&anti),
        ));
        let prim = crate::freealg::TensorElement::from_terms(
            2,
            [
                (vec![Monomial::generator(n, i), Monomial::one(n)], p.one_series()),
                (vec![Monomial::one(n), Monomial::generator(n, i)], p.one_series()),
            ],
        );
        let rest = t.sub(&prim);
        rep.push(CheckEntry::from_bool(
            "primitive_mod_h",
            g,
            rest.h_valuation().at_least(1),
            || p.show_tensor(&rest),
        ));
    }
    rep
}

/// Every relation correction of a SERIES presentation has valuation ≥ 1.
pub fn commutative_mod_h_report(q: &Presentation) -> HopfReport {
    let mut rep = HopfReport::default();
    let names = q.generators();
    for j in 0..q.ngens() {
        for i in 0..j {
            let r = q.relation(i, j);
            let v = r.h_valuation();
            rep.push(CheckEntry::from_bool(
                "commutative_mod_h",
                &format!("{}*{}", names[j], names[i]),
                v >= Valuation::Finite(1),
                || q.show(&r),
            ));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn borel() -> LieBialgebra {
        let mut l = LieBialgebra::zero(&["x", "y"]);
        l.set_bracket(0, 1, 1, rat(1, 1));
        l.set_cobracket(1, 0, 1, rat(1, 1));
        l
    }

    #[test]
    fn borel_is_valid_and_self_dual() {
        let l = borel();
        assert!(validate_lie_bialgebra(&l).passed());
        let d = dual_lie_bialgebra(&l);
        assert!(lie_bialgebra_equal(&l, &d, None).unwrap());
        assert_eq!(dual_lie_bialgebra(&d), l);
    }

    #[test]
    fn heisenberg_dual_tables() {
        let mut l = LieBialgebra::zero(&["x", "y", "z"]);
        l.set_bracket(0, 1, 2, rat(1, 1));
        assert!(validate_lie_bialgebra(&l).passed());
        let d = dual_lie_bialgebra(&l);
        assert!((0..3).all(|a| (0..3).all(|b| (0..3).all(|c| d.c(a, b, c).is_zero()))));
        assert_eq!(*d.d(2, 0, 1), rat(1, 1));
        assert!(validate_lie_bialgebra(&d).passed());
    }

    #[test]
    fn jacobi_violation_detected() {
        let mut l = LieBialgebra::zero(&["x", "y", "z"]);
        l.set_bracket(0, 1, 1, rat(1, 1));
        l.set_bracket(0, 2, 2, rat(1, 1));
        l.set_bracket(1, 2, 0, rat(1, 1));
        let rep = validate_lie_bialgebra(&l);
        assert!(!rep.passed());
        assert!(rep.failures().any(|c| c.axiom == "jacobi"));
    }

    #[test]
    fn equality_with_basis_map() {
        let l = borel();
        let a = LieBialgebra::zero(&["x", "y"]);
        assert!(!lie_bialgebra_equal(&l, &a, None).unwrap());
        let id = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]];
        assert!(lie_bialgebra_equal(&l, &l, Some(&id)).unwrap());
        // y -> 2y rescales δ(y) = x∧y consistently
        let m = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(2, 1)]];
        assert!(lie_bialgebra_equal(&l, &l, Some(&m)).unwrap());
        let sing = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]];
        assert_eq!(lie_bialgebra_equal(&l, &l, Some(&sing)), Err(Error::SingularBasisMap));
        let three = LieBialgebra::zero(&["a", "b", "c"]);
        assert!(matches!(
            lie_bialgebra_equal(&l, &three, None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inverse_of_small_matrix() {
        let m = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(inv, vec![vec![rat(1, 1), rat(-1, 1)], vec![rat(-1, 1), rat(2, 1)]]);
    }
}
