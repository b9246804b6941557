//! Hand-derived values checked against the engine.

use qdp::classical::{extract_lie_bialgebra, extract_poisson_structure, LieBialgebra};
use qdp::drinfeld::{prime_membership, prime_presentation, vee_presentation, Verdict};
use qdp::examples::builtin_with;
use qdp::expr::{parse_element, parse_series};
use qdp::freealg::{Element, Monomial, TensorElement};
use qdp::hopf::Presentation;
use qdp::pairing::{pairing_axioms_check, Pairing};
use qdp::series::{rat, HSeries, Rational, Valuation};

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

fn binomial(n: u32, k: u32) -> i64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn mono(p: &Presentation, exps: &[u32], c: Rational) -> Element {
    p.mono(exps, HSeries::constant(c, p.h_order()))
}

fn m(exps: &[u32]) -> Monomial {
    Monomial::from_exps(exps.to_vec())
}

#[test]
fn exp_of_two_h() {
    let n = 10;
    let e = parse_series("exp(2*h)", n).unwrap();
    for k in 0..=n {
        assert_eq!(e.coeff(k), rat(1 << k, factorial(k as u32)), "coefficient of h^{k}");
    }
    let e1 = parse_series("exp(h) - 1", n).unwrap();
    assert_eq!(e1.valuation(), Valuation::Finite(1));
    assert_eq!(e1.coeff(3), rat(1, 6));
}

#[test]
fn borel2_y_past_powers_of_x() {
    // y·x = (x − 1)·y, so y·x^n = Σ_k C(n,k) (−1)^{n−k} x^k y
    let p = builtin_with("borel2", 6, 8).unwrap().quea;
    for n in 0..=5u32 {
        let got = parse_element(&format!("y*x^{n}"), &p).unwrap();
        let mut want = Element::zero(p.id());
        for k in 0..=n {
            let sign = if (n - k) % 2 == 0 { 1 } else { -1 };
            want.add_term(m(&[k, 1]), HSeries::constant(rat(sign * binomial(n, k), 1), 6));
        }
        assert_eq!(got, want, "y*x^{n}");
    }
}

#[test]
fn heisenberg_y_squared_x() {
    // y y x = y (x y − z) = (x y − z) y − y z = x y² − 2 y z
    let p = builtin_with("heisenberg3", 4, 6).unwrap().quea;
    let got = parse_element("y^2*x", &p).unwrap();
    let want = mono(&p, &[1, 2, 0], rat(1, 1)).try_add(&mono(&p, &[0, 1, 1], rat(-2, 1))).unwrap();
    assert_eq!(got, want);
}

#[test]
fn borel2_delta_2_of_y() {
    // Δ(y) = y⊗1 + e^{hx}⊗y, so δ_2(y) = (e^{hx} − 1)⊗y
    let n = 7;
    let p = builtin_with("borel2", n, 8).unwrap().quea;
    let got = p.delta_n(&p.gen(1), 2).unwrap();
    let mut want = TensorElement::zero(2);
    for k in 1..=n as u32 {
        want.add_term(vec![m(&[k, 0]), m(&[0, 1])], HSeries::monomial(rat(1, factorial(k)), k as i64, n));
    }
    assert!(p.residual_tensor(&got.sub(&want)).is_zero(), "{}", p.show_tensor(&got));
    assert_eq!(got.h_valuation(), Valuation::Finite(1));
}

#[test]
fn heisenberg_delta_2_of_xy() {
    // Δ(xy) = xy⊗1 + x⊗y + y⊗x + 1⊗xy
    let p = builtin_with("heisenberg3", 4, 4).unwrap().quea;
    let xy = p.multiply(&p.gen(0), &p.gen(1)).unwrap();
    let got = p.delta_n(&xy, 2).unwrap();
    let one = HSeries::one(4);
    let want = TensorElement::from_terms(
        2,
        [
            (vec![m(&[1, 0, 0]), m(&[0, 1, 0])], one.clone()),
            (vec![m(&[0, 1, 0]), m(&[1, 0, 0])], one),
        ],
    );
    assert_eq!(got, want);
    assert!(p.delta_n(&xy, 3).unwrap().is_zero());
}

#[test]
fn prime_of_borel2() {
    // X = hx, Y = hy: Y·X = X·Y − h·Y and Δ(Y) = Y⊗1 + Σ_k X^k/k!⊗Y
    let b = builtin_with("borel2", 8, 8).unwrap();
    let q = prime_presentation(&b.quea).unwrap();
    assert_eq!(q.generators(), ["X", "Y"]);
    assert_eq!(q.degree_cap(), 8);
    let r = q.relation(0, 1);
    assert_eq!(r, Element::monomial(q.id(), m(&[0, 1]), HSeries::monomial(rat(-1, 1), 1, 8)).truncate(q.h_order(), None));
    let dy = q.coproduct_of(1);
    assert_eq!(dy.coeff(&[m(&[0, 1]), m(&[0, 0])]).unwrap().coeff(0), rat(1, 1));
    for k in 0..=7u32 {
        let c = dy.coeff(&[m(&[k, 0]), m(&[0, 1])]).unwrap();
        assert_eq!(c.coeff(0), rat(1, factorial(k)), "X^{k}⊗Y");
        assert_eq!(c.valuation(), Valuation::Finite(0));
    }
    // S(Y) = −Σ_k (−X)^k/k!·Y
    let sy = q.antipode_of(1);
    for k in 0..=7u32 {
        let sign = if k % 2 == 0 { -1 } else { 1 };
        assert_eq!(sy.coeff(&m(&[k, 1])).unwrap().coeff(0), rat(sign, factorial(k)), "X^{k}Y in S(Y)");
    }
}

#[test]
fn classical_tables_of_borel2() {
    let b = builtin_with("borel2", 6, 6).unwrap();
    let lie = extract_lie_bialgebra(&b.quea).unwrap();
    let mut want = LieBialgebra::zero(&["x", "y"]);
    want.set_bracket(0, 1, 1, rat(1, 1));
    want.set_cobracket(1, 0, 1, rat(1, 1));
    assert_eq!(lie, want);
    assert_eq!(*lie.c(1, 0, 1), rat(-1, 1));
    assert_eq!(*lie.d(1, 1, 0), rat(-1, 1));
    let q = prime_presentation(&b.quea).unwrap();
    let poisson = extract_poisson_structure(&q).unwrap();
    assert_eq!(*poisson.c(0, 1, 1), rat(1, 1));
    assert_eq!(*poisson.d(1, 0, 1), rat(1, 1));
    assert_eq!(*poisson.c(0, 1, 0), rat(0, 1));
    let back = extract_lie_bialgebra(&vee_presentation(&q).unwrap()).unwrap();
    assert_eq!(back, lie);
}

#[test]
fn heisenberg_dual_has_only_a_cobracket() {
    // [x,y] = z, δ = 0 dualises to δ(z*) = x*∧y*, zero bracket
    let b = builtin_with("heisenberg3", 4, 4).unwrap();
    let q = prime_presentation(&b.quea).unwrap();
    let d = extract_poisson_structure(&q).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(*d.c(i, j, k), rat(0, 1));
                let want = match (k, i, j) {
                    (2, 0, 1) => rat(1, 1),
                    (2, 1, 0) => rat(-1, 1),
                    _ => rat(0, 1),
                };
                assert_eq!(*d.d(k, i, j), want, "d({k},{i},{j})");
            }
        }
    }
}

#[test]
fn abelian2_dual_bases() {
    // ⟨x1^a x2^b, X1^c X2^d⟩ = a! b! δ_ac δ_bd
    let b = builtin_with("abelian2", 6, 6).unwrap();
    let q = prime_presentation(&b.quea).unwrap();
    let mut seed = b.pairing_seed.clone().unwrap();
    assert!(pairing_axioms_check(&mut seed, &b.quea, &q, 3).unwrap().passed());
    let pr = Pairing::new(&b.quea, &q, &seed);
    for a in 0..=3u32 {
        for bb in 0..=3u32 {
            for c in 0..=3u32 {
                for d in 0..=3u32 {
                    let v = pr.pair_monomials(&m(&[a, bb]), &m(&[c, d])).unwrap();
                    let want = if (a, bb) == (c, d) { factorial(a) * factorial(bb) } else { 0 };
                    assert_eq!(v, HSeries::constant(rat(want, 1), pr.order()), "({a},{bb}) vs ({c},{d})");
                }
            }
        }
    }
}

#[test]
fn borel2_pairing_values() {
    // ⟨y, X^k Y⟩ = ⟨Δ^{(k+1)} y, X⊗…⊗X⊗Y⟩ = k!·h^k/k! = h^k
    let b = builtin_with("borel2", 8, 8).unwrap();
    let q = prime_presentation(&b.quea).unwrap();
    let mut seed = b.pairing_seed.clone().unwrap();
    assert!(pairing_axioms_check(&mut seed, &b.quea, &q, 3).unwrap().passed());
    let pr = Pairing::new(&b.quea, &q, &seed);
    for k in 0..=5u32 {
        let v = pr.pair_monomials(&m(&[0, 1]), &m(&[k, 1])).unwrap();
        assert_eq!(v, HSeries::h_pow(k as i64, pr.order()), "<y, X^{k} Y>");
    }
    let v = pr.pair(&parse_element("x*y", &b.quea).unwrap(), &parse_element("X*Y", &q).unwrap()).unwrap();
    assert!(v.order() >= 6, "known through h^{}", v.order());
    assert_eq!(v, HSeries::from_ints(0, &[1, 1], v.order()));
}

#[test]
fn scaled_monomials_and_membership() {
    // h^v·(degree d) lies in H′ iff v ≥ d, for PBW monomials of borel2
    let p = builtin_with("borel2", 8, 8).unwrap().quea;
    for mono_ in Monomial::all_up_to_degree(2, 3) {
        let d = mono_.degree() as i64;
        for v in 0..=d {
            let a = Element::monomial(p.id(), mono_.clone(), HSeries::h_pow(v, 8));
            let c = prime_membership(&a, &p, None).unwrap();
            assert_eq!(c.verdict.is_member(), v >= d, "h^{v}*{}", p.show(&a));
        }
    }
    let c = prime_membership(&p.gen(1), &p, None).unwrap();
    assert_eq!(c.verdict, Verdict::NotMember { witness: 2 });
}
