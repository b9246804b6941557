use proptest::prelude::*;

use qdp::acceptance::{inclusion_exclusion, product_identities};
use qdp::drinfeld::{prime_membership, prime_presentation, vee_presentation};
use qdp::examples::builtin_with;
use qdp::expr::{parse_element, parse_expr, parse_series};
use qdp::freealg::{Element, Monomial, TensorElement};
use qdp::hopf::Presentation;
use qdp::manifest::{dump_presentation, load_presentation};
use qdp::pairing::{orthogonal_membership, pairing_axioms_check, Pairing, PairingSeed};
use qdp::series::{rat, HSeries};

const N: i64 = 5;

fn series(order: i64) -> impl Strategy<Value = HSeries> + Clone {
    (0..=2i64, prop::collection::vec(-3i64..=3, 0..4)).prop_map(move |(v, cs)| HSeries::from_ints(v, &cs, order))
}

fn nilpotent(order: i64) -> impl Strategy<Value = HSeries> {
    (1..=2i64, prop::collection::vec(-2i64..=2, 0..3)).prop_map(move |(v, cs)| HSeries::from_ints(v, &cs, order))
}

fn element(p: Presentation, max_deg: u32) -> impl Strategy<Value = Element> + Clone {
    let monos = Monomial::all_up_to_degree(p.ngens(), max_deg);
    let order = p.h_order();
    prop::collection::vec((0..monos.len(), series(order)), 0..4).prop_map(move |ts| {
        Element::from_terms(p.id(), ts.into_iter().map(|(i, c)| (monos[i].clone(), c)))
    })
}

fn quea(name: &str) -> Presentation {
    builtin_with(name, N, 6).unwrap().quea
}

fn same(p: &Presentation, a: &Element, b: &Element) -> bool {
    p.residual(&a.try_sub(b).unwrap()).is_zero()
}

fn same_tensor(p: &Presentation, s: &TensorElement, t: &TensorElement) -> bool {
    p.residual_tensor(&s.sub(t)).is_zero()
}

fn ring_case(name: &'static str) -> impl Strategy<Value = (Presentation, Element, Element, Element)> {
    let p = quea(name);
    let e = element(p.clone(), 2);
    (Just(p), e.clone(), e.clone(), e)
}

/// One expression in the grammar, as source text.
fn expr_src() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1i64..=5, 1i64..=3).prop_map(|(p, q)| format!("{p}/{q}")),
        (0u32..=3).prop_map(|k| format!("h^{k}")),
        Just("h".to_string()),
        prop::sample::select(vec!["x", "y", "x^2", "y^3"]).prop_map(str::to_string),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            inner.clone().prop_map(|a| format!("({a})")),
            inner.clone().prop_map(|a| format!("(-{a})")),
            inner.prop_map(|a| format!("exp(h*({a}))")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_axioms(a in series(6), b in series(6), c in series(6)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        let lhs = &a * &(&b + &c);
        let rhs = &(&a * &b) + &(&a * &c);
        let o = lhs.order().min(rhs.order());
        prop_assert_eq!(lhs.truncate(o), rhs.truncate(o));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn series_exp_is_a_homomorphism(a in nilpotent(7), b in nilpotent(7)) {
        let lhs = (&a + &b).exp().unwrap();
        let rhs = &a.exp().unwrap() * &b.exp().unwrap();
        prop_assert_eq!(lhs.truncate(7), rhs.truncate(7));
    }

    #[test]
    fn series_shift_and_divide(a in series(6), k in 0..3i64) {
        prop_assert_eq!(a.shift(k).div_h(k).unwrap(), a);
    }

    #[test]
    fn series_text_round_trip(a in series(6)) {
        prop_assert_eq!(parse_series(&a.to_string(), 6).unwrap(), a);
    }

    #[test]
    fn print_parse_fixed_point(src in expr_src()) {
        let once = parse_expr(&src).unwrap().to_string();
        let twice = parse_expr(&once).unwrap().to_string();
        prop_assert_eq!(&once, &twice);
        let p = quea("borel2");
        if let Ok(a) = parse_element(&src, &p) {
            prop_assert_eq!(parse_element(&once, &p).unwrap(), a);
        }
    }

    #[test]
    fn element_show_parses_back((p, a, _, _) in ring_case("borel2")) {
        prop_assert_eq!(parse_element(&p.show(&a), &p).unwrap(), a);
    }

    #[test]
    fn borel2_is_an_associative_ring((p, a, b, c) in ring_case("borel2")) {
        let ab_c = p.multiply(&p.multiply(&a, &b).unwrap(), &c).unwrap();
        let a_bc = p.multiply(&a, &p.multiply(&b, &c).unwrap()).unwrap();
        prop_assert!(same(&p, &ab_c, &a_bc));
        let lhs = p.multiply(&a, &b.try_add(&c).unwrap()).unwrap();
        let rhs = p.multiply(&a, &b).unwrap().try_add(&p.multiply(&a, &c).unwrap()).unwrap();
        prop_assert!(same(&p, &lhs, &rhs));
        prop_assert_eq!(p.multiply(&p.one(), &a).unwrap(), a.clone());
    }

    #[test]
    fn heisenberg3_is_an_associative_ring((p, a, b, c) in ring_case("heisenberg3")) {
        let ab_c = p.multiply(&p.multiply(&a, &b).unwrap(), &c).unwrap();
        let a_bc = p.multiply(&a, &p.multiply(&b, &c).unwrap()).unwrap();
        prop_assert!(same(&p, &ab_c, &a_bc));
    }

    #[test]
    fn coproduct_is_multiplicative((p, a, b, _) in ring_case("borel2")) {
        let lhs = p.coproduct(&p.multiply(&a, &b).unwrap()).unwrap();
        let rhs = p.tensor_multiply(&p.coproduct(&a).unwrap(), &p.coproduct(&b).unwrap()).unwrap();
        prop_assert!(same_tensor(&p, &lhs, &rhs));
    }

    #[test]
    fn antipode_reverses_products((p, a, b, _) in ring_case("borel2")) {
        let lhs = p.antipode(&p.multiply(&a, &b).unwrap()).unwrap();
        let rhs = p.multiply(&p.antipode(&b).unwrap(), &p.antipode(&a).unwrap()).unwrap();
        prop_assert!(same(&p, &lhs, &rhs));
    }

    #[test]
    fn delta_n_is_the_reduced_iterated_coproduct((p, a, _, _) in ring_case("heisenberg3"), n in 1usize..=3) {
        // every generator has counit 0, so (id − ε) kills exactly the unit slots
        let full = p.iterated_coproduct(&a, n).unwrap();
        let mut want = TensorElement::zero(n);
        for (key, c) in full.terms() {
            if key.iter().all(|m| !m.is_one()) {
                want.add_term(key.clone(), c.clone());
            }
        }
        prop_assert!(same_tensor(&p, &p.delta_n(&a, n).unwrap(), &want));
    }

    #[test]
    fn inclusion_exclusion_inverts((p, a, _, _) in ring_case("borel2")) {
        for (what, ok) in inclusion_exclusion(&p, &a).unwrap() {
            prop_assert!(ok, "{}", what);
        }
    }

    #[test]
    fn delta_phi_product_identities((p, a, b, _) in ring_case("heisenberg3")) {
        for (what, ok) in product_identities(&p, &a, &b).unwrap() {
            prop_assert!(ok, "{}", what);
        }
    }

    #[test]
    fn manifests_round_trip(name in prop::sample::select(qdp::examples::NAMES.to_vec())) {
        let p = quea(name);
        let q = prime_presentation(&p).unwrap();
        let v = vee_presentation(&q).unwrap();
        for x in [&p, &q, &v] {
            let text = dump_presentation(x);
            prop_assert_eq!(dump_presentation(&load_presentation(&text).unwrap()), text);
        }
    }
}

fn borel2_pairing() -> (Presentation, Presentation, PairingSeed) {
    let b = builtin_with("borel2", N, N as u32).unwrap();
    let q = prime_presentation(&b.quea).unwrap();
    let mut seed = b.pairing_seed.unwrap();
    assert!(pairing_axioms_check(&mut seed, &b.quea, &q, 2).unwrap().passed());
    (b.quea, q, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pairing_sees_the_antipode(a in 0u32..=2, b in 0u32..=2, c in 0u32..=2, d in 0u32..=2) {
        let (p, q, seed) = borel2_pairing();
        let pr = Pairing::new(&p, &q, &seed);
        let u = p.mono(&[a, b], p.one_series());
        let v = q.mono(&[c, d], q.one_series());
        let lhs = pr.pair(&p.antipode(&u).unwrap(), &v).unwrap();
        let rhs = pr.pair(&u, &q.antipode(&v).unwrap()).unwrap();
        let o = lhs.order().min(rhs.order());
        prop_assert_eq!(lhs.truncate(o), rhs.truncate(o));
    }

    #[test]
    fn pairing_turns_products_into_coproducts(a in 0u32..=2, b in 0u32..=1, c in 0u32..=2, d in 0u32..=1) {
        let (p, q, seed) = borel2_pairing();
        let pr = Pairing::new(&p, &q, &seed);
        let u = p.mono(&[a, b], p.one_series());
        let w = p.mono(&[b, a], p.one_series());
        let v = q.mono(&[c, d], q.one_series());
        let lhs = pr.pair(&p.multiply(&u, &w).unwrap(), &v).unwrap();
        let uw = TensorElement::from_terms(2, [(vec![Monomial::from_exps(vec![a, b]), Monomial::from_exps(vec![b, a])], p.one_series())]);
        let rhs = pr.pair_tensors(&uw, &q.coproduct(&v).unwrap()).unwrap();
        let o = lhs.order().min(rhs.order());
        prop_assert_eq!(lhs.truncate(o), rhs.truncate(o));
    }

    #[test]
    fn membership_routes_give_equal_valuations(a in element(quea("borel2"), 2)) {
        let (p, q, seed) = borel2_pairing();
        let a = a.relabel(p.id()).truncate(p.h_order(), None);
        let d = prime_membership(&a, &p, None).unwrap();
        let o = orthogonal_membership(&a, &seed, &p, &q, None).unwrap();
        prop_assert_eq!(&d.valuations, &o.valuations, "{}", p.show(&a));
        prop_assert_eq!(d.verdict, o.verdict);
    }
}

#[test]
fn rationals_print_in_lowest_terms() {
    let s = HSeries::constant(rat(6, -4), 2);
    assert_eq!(s.to_string(), "-3/2");
}
