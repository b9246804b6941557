//! The acceptance suite: one [`CriterionResult`] per numbered criterion,
//! plus supplementary checks run by `qdp selftest`.
//!
//! Results are assembled in a fixed order, so the JSON form of a
//! [`SuiteReport`] does not depend on how many threads ran it.

use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{
    commutative_mod_h_report, dual_lie_bialgebra, extract_lie_bialgebra, extract_poisson_structure,
    lie_bialgebra_equal, vee_limit_report, ClassicalElement,
};
use crate::drinfeld::{
    gauge_preservation_check, prime_membership, prime_presentation, roundtrip_check, vee_presentation,
    Direction, GaugeMap, Verdict,
};
use crate::error::{Error, Result};
use crate::examples::{builtin_with, ExampleBundle, NAMES};
use crate::freealg::{Element, Monomial, TensorElement};
use crate::hopf::{subsets, Model, Presentation};
use crate::pairing::{orthogonal_membership, pairing_axioms_check, Pairing, PairingSeed, SeedSlot};
use crate::random::{random_element, rng, Shape, DEFAULT_SEED};
use crate::report::HopfReport;
use crate::series::{rat, HSeries, Valuation};

/// Truncation and seed for a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub h_order: i64,
    pub degree_cap: u32,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            h_order: crate::examples::DEFAULT_ORDER,
            degree_cap: crate::examples::DEFAULT_DEGREE,
            seed: DEFAULT_SEED,
        }
    }
}

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub title: String,
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl CriterionResult {
    fn new(id: &str, title: &str) -> Self {
        CriterionResult {
            id: id.into(),
            title: title.into(),
            pass: true,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.pass = false;
            self.failures.push(what());
        }
    }

    fn report(&mut self, prefix: &str, rep: &HopfReport) {
        self.checks += rep.len();
        for f in rep.failures() {
            self.pass = false;
            self.failures.push(format!("{prefix}{} on {}", f.axiom, f.subject));
        }
    }

    fn error(&mut self, e: &Error) {
        self.checks += 1;
        self.pass = false;
        self.failures.push(format!("error: {e}"));
    }

    /// `PASS`/`FAIL`, id and title on one line.
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {} ({} checks)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checks
        )
    }
}

fn run(id: &str, title: &str, body: impl FnOnce(&mut CriterionResult) -> Result<()>) -> CriterionResult {
    let mut r = CriterionResult::new(id, title);
    if let Err(e) = body(&mut r) {
        r.error(&e);
    }
    r
}

/// Every criterion of a suite run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub pass: bool,
    pub criteria: Vec<CriterionResult>,
}

fn bundle(name: &str, cfg: &SuiteConfig) -> Result<ExampleBundle> {
    builtin_with(name, cfg.h_order, cfg.degree_cap)
}

fn h_times(p: &Presentation, a: &Element) -> Element {
    a.scale(&HSeries::h_pow(1, p.h_order()))
}

/// Membership of `h·x`, `h·y` and `y` in borel2′.
pub fn criterion_1(cfg: &SuiteConfig) -> CriterionResult {
    run("1", "membership battery on borel2", |r| {
        let p = bundle("borel2", cfg)?.quea;
        let (x, y) = (p.gen(0), p.gen(1));
        for (name, a) in [("h*x", h_times(&p, &x)), ("h*y", h_times(&p, &y))] {
            let c = prime_membership(&a, &p, None)?;
            r.check(c.verdict.is_member(), || format!("{name}: {:?}", c.verdict));
        }
        let c = prime_membership(&y, &p, None)?;
        r.check(c.verdict == Verdict::NotMember { witness: 2 }, || format!("y: {:?}", c.verdict));
        r.check(c.valuations.get(2) == Some(&Valuation::Finite(1)), || {
            format!("valuation of delta_2(y) is {:?}", c.valuations.get(2))
        });
        Ok(())
    })
}

/// Classical limits of `P′` and `(P′)^∨` against the dual and original
/// Lie bialgebras.
pub fn criterion_2(cfg: &SuiteConfig) -> CriterionResult {
    run("2", "duality of semiclassical limits", |r| {
        let rows: Vec<Result<Vec<(String, bool)>>> = ["abelian2", "borel2", "heisenberg3"]
            .par_iter()
            .map(|name| {
                let b = bundle(name, cfg)?;
                let lie = extract_lie_bialgebra(&b.quea)?;
                let q = prime_presentation(&b.quea)?;
                let poisson = extract_poisson_structure(&q)?;
                let back = extract_lie_bialgebra(&vee_presentation(&q)?)?;
                Ok(vec![
                    (
                        format!("{name}: poisson(P') = dual(lie(P))"),
                        lie_bialgebra_equal(&poisson, &dual_lie_bialgebra(&lie), None)?,
                    ),
                    (
                        format!("{name}: dual(lie(P)) = stored expected dual"),
                        lie_bialgebra_equal(&dual_lie_bialgebra(&lie), &b.expected_dual, None)?,
                    ),
                    (
                        format!("{name}: lie((P')^vee) = lie(P)"),
                        lie_bialgebra_equal(&back, &lie, None)?,
                    ),
                ])
            })
            .collect();
        for row in rows {
            for (what, ok) in row? {
                r.check(ok, || what);
            }
        }
        Ok(())
    })
}

/// Prime-then-vee on every built-in and vee-then-prime on its prime.
pub fn criterion_3(cfg: &SuiteConfig) -> CriterionResult {
    run("3", "round trips in both directions", |r| {
        let reps: Vec<Result<(String, HopfReport, HopfReport)>> = NAMES
            .par_iter()
            .map(|name| {
                let p = bundle(name, cfg)?.quea;
                let a = roundtrip_check(&p, Direction::PrimeThenVee)?;
                let b = roundtrip_check(&prime_presentation(&p)?, Direction::VeeThenPrime)?;
                Ok((name.to_string(), a, b))
            })
            .collect();
        for rep in reps {
            let (name, a, b) = rep?;
            r.report(&format!("{name} prime-vee: "), &a);
            r.report(&format!("{name}' vee-prime: "), &b);
        }
        Ok(())
    })
}

/// `δ_Φ(ab)` and `δ_Φ(ab − ba)` against their expansions, `Φ ⊆ {1,2,3}`.
pub fn product_identities(p: &Presentation, a: &Element, b: &Element) -> Result<Vec<(String, bool)>> {
    let n = 3;
    let subs = subsets(n);
    let da: Vec<TensorElement> = subs.iter().map(|e| p.delta_e(a, e, n)).collect::<Result<_>>()?;
    let db: Vec<TensorElement> = subs.iter().map(|e| p.delta_e(b, e, n)).collect::<Result<_>>()?;
    let ab = p.multiply(a, b)?;
    let ba = p.multiply(b, a)?;
    let comm = ab.try_sub(&ba)?;
    let mut out = Vec::new();
    for phi in &subs {
        let mut prod = TensorElement::zero(n);
        let mut comm_sum = TensorElement::zero(n);
        for (li, lam) in subs.iter().enumerate() {
            for (yi, ups) in subs.iter().enumerate() {
                let mut union: Vec<usize> = lam.iter().chain(ups).copied().collect();
                union.sort_unstable();
                union.dedup();
                if union != *phi {
                    continue;
                }
                let t = p.tensor_multiply(&da[li], &db[yi])?;
                if lam.iter().any(|s| ups.contains(s)) {
                    let u = p.tensor_multiply(&db[yi], &da[li])?;
                    comm_sum = comm_sum.add(&t.sub(&u));
                }
                prod = prod.add(&t);
            }
        }
        let lhs = p.delta_e(&ab, phi, n)?;
        out.push((
            format!("product Phi={phi:?}"),
            p.residual_tensor(&lhs.sub(&prod)).is_zero(),
        ));
        if !phi.is_empty() {
            let lhs = p.delta_e(&comm, phi, n)?;
            out.push((
                format!("commutator Phi={phi:?}"),
                p.residual_tensor(&lhs.sub(&comm_sum)).is_zero(),
            ));
        }
    }
    Ok(out)
}

const PAIR_SHAPE: Shape = Shape {
    max_degree: 3,
    max_h: 4,
    max_terms: 3,
};

/// Product and commutator identities for `δ_Φ` on 50 random pairs per
/// built-in, at h-order 4.
pub fn criterion_4(cfg: &SuiteConfig) -> CriterionResult {
    run("4", "delta_Phi product and commutator identities", |r| {
        let n_order = cfg.h_order.min(4);
        for (bi, name) in NAMES.iter().enumerate() {
            let p = builtin_with(name, n_order, cfg.degree_cap)?.quea;
            let mut g = rng(cfg.seed.wrapping_add(bi as u64));
            let pairs: Vec<(Element, Element)> = (0..50)
                .map(|_| (random_element(&p, &mut g, PAIR_SHAPE), random_element(&p, &mut g, PAIR_SHAPE)))
                .collect();
            let rows: Vec<Result<Vec<(String, bool)>>> =
                pairs.par_iter().map(|(a, b)| product_identities(&p, a, b)).collect();
            for (k, row) in rows.into_iter().enumerate() {
                for (what, ok) in row? {
                    r.check(ok, || format!("{name} pair {k}: {what}"));
                }
            }
        }
        Ok(())
    })
}

/// `Δ_E(a) = Σ_{Ψ⊆E} δ_Ψ(a)` for every `E ⊆ {1..n}`, `n ≤ 3`.
pub fn inclusion_exclusion(p: &Presentation, a: &Element) -> Result<Vec<(String, bool)>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for e in subsets(n) {
            let lhs = p.big_delta_e(a, &e, n)?;
            let mut rhs = TensorElement::zero(n);
            for psi in subsets(n).into_iter().filter(|s| s.iter().all(|x| e.contains(x))) {
                rhs = rhs.add(&p.delta_e(a, &psi, n)?);
            }
            out.push((format!("n={n} E={e:?}"), p.residual_tensor(&lhs.sub(&rhs)).is_zero()));
        }
    }
    Ok(out)
}

pub fn criterion_5(cfg: &SuiteConfig) -> CriterionResult {
    run("5", "inclusion-exclusion inversion", |r| {
        for (bi, name) in NAMES.iter().enumerate() {
            let p = bundle(name, cfg)?.quea;
            let mut g = rng(cfg.seed.wrapping_add(100 + bi as u64));
            let elems: Vec<Element> = (0..10).map(|_| random_element(&p, &mut g, PAIR_SHAPE)).collect();
            let rows: Vec<Result<Vec<(String, bool)>>> = elems.par_iter().map(|a| inclusion_exclusion(&p, a)).collect();
            for (k, row) in rows.into_iter().enumerate() {
                for (what, ok) in row? {
                    r.check(ok, || format!("{name} element {k}: {what}"));
                }
            }
        }
        Ok(())
    })
}

/// `P′` commutative mod h; `(P′)^∨` primitive and cocommutative mod h.
pub fn criterion_6(cfg: &SuiteConfig) -> CriterionResult {
    run("6", "limit-structure invariants", |r| {
        let reps: Vec<Result<(String, HopfReport, HopfReport)>> = NAMES
            .par_iter()
            .map(|name| {
                let q = prime_presentation(&bundle(name, cfg)?.quea)?;
                let v = vee_presentation(&q)?;
                Ok((name.to_string(), commutative_mod_h_report(&q), vee_limit_report(&v)))
            })
            .collect();
        for rep in reps {
            let (name, a, b) = rep?;
            r.report(&format!("{name}': "), &a);
            r.report(&format!("({name}')^vee: "), &b);
        }
        Ok(())
    })
}

/// `δ_{n+1}` of lifted PBW monomials of degree ≤ n vanishes mod h.
pub fn criterion_7(cfg: &SuiteConfig) -> CriterionResult {
    run("7", "filtration-kernel property", |r| {
        for name in ["borel2", "heisenberg3"] {
            let p = bundle(name, cfg)?.quea;
            let jobs: Vec<(usize, Monomial)> = (0..=4usize)
                .flat_map(|n| Monomial::all_up_to_degree(p.ngens(), n as u32).into_iter().map(move |m| (n, m)))
                .collect();
            let vals: Vec<Result<Valuation>> = jobs
                .par_iter()
                .map(|(n, m)| {
                    let lift = ClassicalElement {
                        terms: [(m.clone(), rat(1, 1))].into_iter().collect(),
                    }
                    .lift(&p);
                    Ok(p.delta_n(&lift, n + 1)?.h_valuation())
                })
                .collect();
            for ((n, m), v) in jobs.iter().zip(vals) {
                let v = v?;
                r.check(v.at_least(1), || {
                    format!("{name}: delta_{}({}) has valuation {v}", n + 1, m.to_expr(p.generators()))
                });
            }
        }
        Ok(())
    })
}

/// The canonical seed of a bundle, validated against `P′` up to degree 3.
pub fn validated_seed(b: &ExampleBundle, q: &Presentation) -> Result<(PairingSeed, HopfReport)> {
    let mut seed = b
        .pairing_seed
        .clone()
        .ok_or_else(|| Error::InvalidPairing(format!("{} has no canonical seed", b.name)))?;
    let rep = pairing_axioms_check(&mut seed, &b.quea, q, 3)?;
    Ok((seed, rep))
}

/// Dual bases on abelian1 and the pairing axioms on abelian1 and borel2.
pub fn criterion_8(cfg: &SuiteConfig) -> CriterionResult {
    run("8", "pairing duality and axioms", |r| {
        let b = bundle("abelian1", cfg)?;
        let q = prime_presentation(&b.quea)?;
        let (seed, rep) = validated_seed(&b, &q)?;
        r.report("abelian1: ", &rep);
        let pr = Pairing::new(&b.quea, &q, &seed);
        let mut fact: i64 = 1;
        for n in 0..=5u32 {
            if n > 0 {
                fact *= n as i64;
            }
            let yn = q.mono(&[n], HSeries::constant(rat(1, fact), q.h_order()));
            for m in 0..=5u32 {
                let v = pr.pair(&b.quea.mono(&[m], b.quea.one_series()), &yn)?;
                let want = if m == n { HSeries::one(pr.order()) } else { HSeries::zero(pr.order()) };
                r.check(v == want, || format!("<x^{m}, X^{n}/{n}!> = {v}"));
            }
        }
        let b = bundle("borel2", cfg)?;
        let q = prime_presentation(&b.quea)?;
        let (_, rep) = validated_seed(&b, &q)?;
        r.report("borel2: ", &rep);
        Ok(())
    })
}

/// Generators, their h-multiples, products and random combinations.
pub fn membership_battery(p: &Presentation, seed: u64) -> Result<Vec<Element>> {
    let n = p.ngens();
    let hs = |k: i64| HSeries::h_pow(k, p.h_order());
    let mut out = vec![p.one(), p.scalar(hs(1))];
    for i in 0..n {
        out.push(p.gen(i));
        out.push(p.gen(i).scale(&hs(1)));
        out.push(p.gen(i).scale(&hs(2)));
    }
    for i in 0..n {
        for j in 0..n {
            let xy = p.multiply(&p.gen(i), &p.gen(j))?;
            out.push(xy.clone());
            out.push(xy.scale(&hs(1)));
            out.push(xy.scale(&hs(2)));
        }
    }
    let mut g = rng(seed);
    let shape = Shape {
        max_degree: 2,
        max_h: 3,
        max_terms: 3,
    };
    while out.len() < 36 {
        out.push(p.residual(&random_element(p, &mut g, shape)));
    }
    Ok(out)
}

/// Delta route and pairing route on one element.
pub fn oracle_agreement(p: &Presentation, q: &Presentation, seed: &PairingSeed, a: &Element) -> Result<(Verdict, Verdict)> {
    let d = prime_membership(a, p, None)?;
    let o = orthogonal_membership(a, seed, p, q, None)?;
    Ok((d.verdict, o.verdict))
}

pub fn criterion_9(cfg: &SuiteConfig) -> CriterionResult {
    run("9", "delta and pairing membership oracles agree on borel2", |r| {
        let b = bundle("borel2", cfg)?;
        let q = prime_presentation(&b.quea)?;
        let (seed, rep) = validated_seed(&b, &q)?;
        r.report("seed: ", &rep);
        let battery = membership_battery(&b.quea, cfg.seed)?;
        let verdicts: Vec<Result<(Verdict, Verdict)>> = battery
            .par_iter()
            .map(|a| oracle_agreement(&b.quea, &q, &seed, a))
            .collect();
        for (a, v) in battery.iter().zip(verdicts) {
            let (d, o) = v?;
            r.check(d == o, || {
                format!("{}: delta {:?}, pairing {:?}", b.quea.show(a), d, o)
            });
        }
        Ok(())
    })
}

pub fn criterion_10(cfg: &SuiteConfig) -> CriterionResult {
    run("10", "gauge equivalences", |r| {
        let p = bundle("abelian2", cfg)?.quea;
        let img = p.gen(0).try_add(&h_times(&p, &p.gen(1)))?;
        let phi = GaugeMap::new(&p, vec![img, p.gen(1)])?;
        let rep = gauge_preservation_check(&p, &phi)?;
        r.report("abelian2: ", &rep);
        let p = bundle("borel2", cfg)?.quea;
        let img = p.gen(0).try_add(&h_times(&p, &p.gen(1)))?;
        let phi = GaugeMap::new(&p, vec![img, p.gen(1)])?;
        let res = gauge_preservation_check(&p, &phi);
        r.check(matches!(res, Err(Error::NotAHopfMap(_))), || {
            format!("borel2 x -> x + h*y: {:?}", res.map(|rep| rep.passed()))
        });
        Ok(())
    })
}

/// A POLY presentation whose `Δ(y)` has an `x⊗y` term without `h`.
pub fn fake_presentation(n: i64, d: u32) -> Result<Presentation> {
    let mut b = Presentation::builder("fake", Model::Poly, &["x", "y"], n, d);
    let one = HSeries::one(n);
    let m = |e: [u32; 2]| Monomial::from_exps(e.to_vec());
    b.coproduct(
        1,
        TensorElement::from_terms(
            2,
            [
                (vec![m([0, 1]), m([0, 0])], one.clone()),
                (vec![m([0, 0]), m([0, 1])], one.clone()),
                (vec![m([1, 0]), m([0, 1])], one),
            ],
        ),
    );
    b.build()
}

/// Checks outside the numbered criteria: bundle invariants, confluence,
/// Hopf axioms of transformed presentations, negative tests and oracle
/// agreement on the other seeded built-ins.
pub fn supplementary(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    let mut out = Vec::new();
    out.push(run("s1", "built-in bundles satisfy their invariants", |r| {
        let reps: Vec<Result<HopfReport>> = NAMES
            .par_iter()
            .map(|name| bundle(name, cfg)?.self_check(3).map(|rep| rep.tagged(&format!("{name}."))))
            .collect();
        for rep in reps {
            r.report("", &rep?);
        }
        Ok(())
    }));
    out.push(run("s2", "diamond lemma and Hopf axioms after the transforms", |r| {
        let reps: Vec<Result<Vec<(String, HopfReport)>>> = NAMES
            .par_iter()
            .map(|name| {
                let p = bundle(name, cfg)?.quea;
                let q = prime_presentation(&p)?;
                let v = vee_presentation(&q)?;
                Ok(vec![
                    (format!("{name} diamond: "), p.check_diamond()?),
                    (format!("{name}' diamond: "), q.check_diamond()?),
                    (format!("{name}' axioms: "), q.check_hopf_axioms(3)?),
                    (format!("({name}')^vee axioms: "), v.check_hopf_axioms(3)?),
                ])
            })
            .collect();
        for rep in reps {
            for (prefix, rep) in rep? {
                r.report(&prefix, &rep);
            }
        }
        Ok(())
    }));
    out.push(run("s3", "negative tests", |r| {
        let fake = fake_presentation(cfg.h_order, cfg.degree_cap)?;
        let res = prime_presentation(&fake);
        r.check(matches!(res, Err(Error::NotDivisible { .. })), || {
            format!("prime of a non-QUEA: {:?}", res.map(|q| q.name().to_string()))
        });
        let b = bundle("borel2", cfg)?;
        let q = prime_presentation(&b.quea)?;
        let mut h_seed = PairingSeed::new(b.quea.name(), q.name());
        for i in 0..2 {
            h_seed.set(SeedSlot::Gen(i), SeedSlot::Gen(i), HSeries::h_pow(1, cfg.h_order));
        }
        let rep = pairing_axioms_check(&mut h_seed, &b.quea, &q, 3)?;
        r.check(!rep.passed() && !h_seed.is_validated(), || "h-scaled seed passed".into());
        let mut bad = b.pairing_seed.clone().expect("borel2 has a seed");
        bad.set(SeedSlot::Gen(0), SeedSlot::Unit, HSeries::one(cfg.h_order));
        let rep = pairing_axioms_check(&mut bad, &b.quea, &q, 2)?;
        r.check(!rep.passed(), || "counit-breaking seed passed".into());
        let res = orthogonal_membership(&b.quea.gen(0), &bad, &b.quea, &q, None);
        r.check(matches!(res, Err(Error::InvalidPairing(_))), || "unvalidated seed was used".into());
        let res = GaugeMap::new(&b.quea, vec![b.quea.gen(1), b.quea.gen(0)]);
        r.check(matches!(res, Err(Error::Inadmissible(_))), || "swap accepted as a gauge".into());
        Ok(())
    }));
    out.push(run("s4", "oracle agreement on the abelian built-ins", |r| {
        for name in ["abelian1", "abelian2"] {
            let b = bundle(name, cfg)?;
            let q = prime_presentation(&b.quea)?;
            let (seed, rep) = validated_seed(&b, &q)?;
            r.report(&format!("{name} seed: "), &rep);
            let battery = membership_battery(&b.quea, cfg.seed)?;
            let verdicts: Vec<Result<(Verdict, Verdict)>> = battery
                .par_iter()
                .map(|a| oracle_agreement(&b.quea, &q, &seed, a))
                .collect();
            for (a, v) in battery.iter().zip(verdicts) {
                let (d, o) = v?;
                r.check(d == o, || {
                    format!("{name} {}: delta {:?}, pairing {:?}", b.quea.show(a), d, o)
                });
            }
        }
        Ok(())
    }));
    out
}

/// Criteria 1 to 10 in order.
pub fn criteria(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    let fns: [fn(&SuiteConfig) -> CriterionResult; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    fns.iter().map(|f| f(cfg)).collect()
}

/// Criteria 1 to 10 followed by the supplementary checks.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut all = criteria(cfg);
    all.extend(supplementary(cfg));
    SuiteReport {
        config: *cfg,
        pass: all.iter().all(|c| c.pass),
        criteria: all,
    }
}
