//! Built-in example bundles.
//!
//! | name | generators | deformation |
//! |---|---|---|
//! | `abelian1`, `abelian2`, `abelian3` | `x` / `x1..xn` | none |
//! | `borel2` | `x, y` | `Δ(y) = y⊗1 + e^{hx}⊗y` |
//! | `heisenberg3` | `x, y, z` | none, `[x,y] = z` |
//!
//! ```
//! use qdp::examples::builtin;
//!
//! let b = builtin("borel2").unwrap();
//! assert!(b.quea.check_hopf_axioms(2).unwrap().passed());
//! assert!(builtin("nope").is_err());
//! ```

use crate::classical::{extract_lie_bialgebra, validate_lie_bialgebra, LieBialgebra};
use crate::error::{Error, Result};
use crate::freealg::{Element, Monomial, TensorElement};
use crate::hopf::{Model, Presentation};
use crate::pairing::PairingSeed;
use crate::report::{CheckEntry, HopfReport};
use crate::series::{rat, HSeries};

/// Default h-order and degree cap.
pub const DEFAULT_ORDER: i64 = 8;
pub const DEFAULT_DEGREE: u32 = 8;

/// Names accepted by [`builtin`], in listing order.
pub const NAMES: [&str; 5] = ["abelian1", "abelian2", "abelian3", "borel2", "heisenberg3"];

/// A quantisation together with the classical data it should reproduce.
#[derive(Clone, Debug)]
pub struct ExampleBundle {
    pub name: String,
    pub quea: Presentation,
    pub lie: LieBialgebra,
    pub expected_dual: LieBialgebra,
    /// Seed for pairing `quea` with `prime_presentation(quea)`.
    pub pairing_seed: Option<PairingSeed>,
    pub notes: String,
}

/// `builtin_with(name, DEFAULT_ORDER, DEFAULT_DEGREE)`.
pub fn builtin(name: &str) -> Result<ExampleBundle> {
    builtin_with(name, DEFAULT_ORDER, DEFAULT_DEGREE)
}

/// A bundle at h-order `n` and degree cap `d`.
pub fn builtin_with(name: &str, n: i64, d: u32) -> Result<ExampleBundle> {
    match name {
        "abelian1" => abelian(name, &["x"], n, d),
        "abelian2" => abelian(name, &["x1", "x2"], n, d),
        "abelian3" => abelian(name, &["x1", "x2", "x3"], n, d),
        "borel2" => borel2(n, d),
        "heisenberg3" => heisenberg3(n, d),
        _ => Err(Error::UnknownExample(name.to_string())),
    }
}

fn starred(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| format!("{s}*")).collect()
}

fn diagonal_seed(p: &Presentation) -> PairingSeed {
    let mut s = PairingSeed::new(p.name(), &crate::drinfeld::prime_name(p.name()));
    for i in 0..p.ngens() {
        s.set(
            crate::pairing::SeedSlot::Gen(i),
            crate::pairing::SeedSlot::Gen(i),
            HSeries::one(p.h_order()),
        );
    }
    s
}

fn abelian(name: &str, gens: &[&str], n: i64, d: u32) -> Result<ExampleBundle> {
    let quea = Presentation::builder(name, Model::Poly, gens, n, d).build()?;
    let seed = diagonal_seed(&quea);
    Ok(ExampleBundle {
        name: name.to_string(),
        quea,
        lie: LieBialgebra::zero(gens),
        expected_dual: LieBialgebra::with_names(starred(gens)),
        pairing_seed: Some(seed),
        notes: "commutative and cocommutative; every generator primitive".into(),
    })
}

/// `Σ_{k≤n} c^k h^k/k! x^k ⊗ y` style coefficients: `(ch)^k/k!`.
fn exp_coeff(c: i64, k: u32, n: i64) -> HSeries {
    let mut fact: i64 = 1;
    for j in 2..=k as i64 {
        fact *= j;
    }
    HSeries::monomial(rat(c.pow(k), fact), k as i64, n)
}

fn borel2(n: i64, d: u32) -> Result<ExampleBundle> {
    let mut b = Presentation::builder("borel2", Model::Poly, &["x", "y"], n, d);
    let id: std::sync::Arc<str> = "borel2".into();
    let one = HSeries::one(n);
    let x_pow = |k: u32| Monomial::from_exps(vec![k, 0]);
    let y = Monomial::from_exps(vec![0, 1]);
    b.relation(0, 1, Element::monomial(&id, y.clone(), -&one));
    let mut dy = TensorElement::from_terms(2, [(vec![y.clone(), Monomial::one(2)], one.clone())]);
    let mut sy = Vec::new();
    for k in 0..=n.max(0) as u32 {
        dy.add_term(vec![x_pow(k), y.clone()], exp_coeff(1, k, n));
        sy.push((Monomial::from_exps(vec![k, 1]), -exp_coeff(-1, k, n)));
    }
    b.coproduct(1, dy);
    b.antipode(1, Element::from_terms(&id, sy));
    let quea = b.build()?;
    let mut lie = LieBialgebra::zero(&["x", "y"]);
    lie.set_bracket(0, 1, 1, rat(1, 1));
    lie.set_cobracket(1, 0, 1, rat(1, 1));
    let mut dual = LieBialgebra::with_names(starred(&["x", "y"]));
    dual.set_bracket(0, 1, 1, rat(1, 1));
    dual.set_cobracket(1, 0, 1, rat(1, 1));
    let seed = diagonal_seed(&quea);
    Ok(ExampleBundle {
        name: "borel2".into(),
        quea,
        lie,
        expected_dual: dual,
        pairing_seed: Some(seed),
        notes: "y*x = x*y - y, Delta(y) = y (x) 1 + e^{hx} (x) y. \
                Compatibility: [x (x) 1 + 1 (x) x, y (x) 1 + e^{hx} (x) y] = [x, y] (x) 1 + e^{hx} (x) [x, y] \
                = y (x) 1 + e^{hx} (x) y = Delta(y), since x (x) 1 and 1 (x) x commute with e^{hx} (x) 1. \
                The Lie bialgebra [x,y] = y, delta(y) = x^y is isomorphic to its dual in the canonical basis."
            .into(),
    })
}

fn heisenberg3(n: i64, d: u32) -> Result<ExampleBundle> {
    let gens = ["x", "y", "z"];
    let id: std::sync::Arc<str> = "heisenberg3".into();
    let mut b = Presentation::builder("heisenberg3", Model::Poly, &gens, n, d);
    b.relation(0, 1, Element::monomial(&id, Monomial::generator(3, 2), -HSeries::one(n)));
    let quea = b.build()?;
    let mut lie = LieBialgebra::zero(&gens);
    lie.set_bracket(0, 1, 2, rat(1, 1));
    let mut dual = LieBialgebra::with_names(starred(&gens));
    dual.set_cobracket(2, 0, 1, rat(1, 1));
    Ok(ExampleBundle {
        name: "heisenberg3".into(),
        quea,
        lie,
        expected_dual: dual,
        pairing_seed: None,
        notes: "undeformed: all generators primitive, y*x = x*y - z, z central".into(),
    })
}

impl ExampleBundle {
    /// Hopf axioms up to `degree_bound`, both Lie bialgebras valid, and the
    /// stored `lie` equal to the one read off `quea`.
    pub fn self_check(&self, degree_bound: u32) -> Result<HopfReport> {
        let mut rep = self.quea.check_hopf_axioms(degree_bound)?.tagged("quea.");
        rep.extend(validate_lie_bialgebra(&self.lie).tagged("lie."));
        rep.extend(validate_lie_bialgebra(&self.expected_dual).tagged("expected_dual."));
        let got = extract_lie_bialgebra(&self.quea)?;
        rep.push(CheckEntry::from_bool("lie_matches_quea", &self.name, got == self.lie, || {
            format!("extracted:\n{}\nstored:\n{}", got.describe(), self.lie.describe())
        }));
        Ok(rep)
    }
}

/// Runs [`ExampleBundle::self_check`] at degree 3 on every built-in.
pub fn self_test() -> Result<HopfReport> {
    let mut rep = HopfReport::default();
    for name in NAMES {
        rep.extend(builtin(name)?.self_check(3)?.tagged(&format!("{name}.")));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name() {
        assert_eq!(builtin("nope").unwrap_err(), Error::UnknownExample("nope".into()));
    }

    #[test]
    fn abelian_tables_are_zero() {
        let b = builtin("abelian2").unwrap();
        assert_eq!(b.lie, LieBialgebra::zero(&["x1", "x2"]));
        assert_eq!(b.lie.describe(), LieBialgebra::zero(&["x1", "x2"]).describe());
    }

    #[test]
    fn borel2_coproduct_of_bracket() {
        // Δ(yx − xy) = −Δ(y)
        let b = builtin_with("borel2", 5, 5).unwrap();
        let p = &b.quea;
        let (x, y) = (p.gen(0), p.gen(1));
        let comm = p.multiply(&y, &x).unwrap().try_sub(&p.multiply(&x, &y).unwrap()).unwrap();
        let lhs = p.coproduct(&comm).unwrap();
        let rhs = p.coproduct(&y).unwrap().neg();
        assert!(p.residual_tensor(&lhs.sub(&rhs)).is_zero());
    }

    #[test]
    fn every_bundle_checks_out() {
        for name in NAMES {
            let b = builtin_with(name, 4, 4).unwrap();
            let rep = b.self_check(2).unwrap();
            assert!(rep.passed(), "{name}: {:?}", rep.failures().collect::<Vec<_>>());
        }
    }
}
