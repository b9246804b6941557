//! Seeded pseudo-random elements for test batteries.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::freealg::{Element, Monomial};
use crate::hopf::Presentation;
use crate::series::{rat, HSeries};

/// Default seed of every battery.
pub const DEFAULT_SEED: u64 = 20240229;

/// Shape of generated elements.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_degree: u32,
    /// Highest h-exponent in a coefficient.
    pub max_h: i64,
    pub max_terms: usize,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small nonzero rational `p/q`, `|p| ≤ 3`, `q ≤ 2`.
fn small_rational(r: &mut ChaCha8Rng) -> crate::series::Rational {
    let mut p = r.gen_range(-3i64..=3);
    if p == 0 {
        p = 1;
    }
    rat(p, r.gen_range(1i64..=2))
}

pub fn random_series(r: &mut ChaCha8Rng, max_h: i64, order: i64) -> HSeries {
    let mut acc = HSeries::zero(order);
    for k in 0..=max_h.min(order) {
        if r.gen_bool(0.5) {
            acc = &acc + &HSeries::monomial(small_rational(r), k, order);
        }
    }
    if acc.is_zero() {
        acc = HSeries::monomial(small_rational(r), r.gen_range(0..=max_h.min(order)), order);
    }
    acc
}

/// A random element of `p` with up to `shape.max_terms` ordered monomials.
pub fn random_element(p: &Presentation, r: &mut ChaCha8Rng, shape: Shape) -> Element {
    let monos = Monomial::all_up_to_degree(p.ngens(), shape.max_degree);
    let mut out = Element::zero(p.id());
    let terms = r.gen_range(1..=shape.max_terms);
    for _ in 0..terms {
        let m = monos[r.gen_range(0..monos.len())].clone();
        out.add_term(m, random_series(r, shape.max_h, p.h_order()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::builtin_with;

    #[test]
    fn same_seed_same_elements() {
        let p = builtin_with("borel2", 4, 4).unwrap().quea;
        let shape = Shape {
            max_degree: 3,
            max_h: 2,
            max_terms: 4,
        };
        let (mut a, mut b) = (rng(7), rng(7));
        for _ in 0..10 {
            let x = random_element(&p, &mut a, shape);
            assert_eq!(x, random_element(&p, &mut b, shape));
            assert!(x.max_degree().unwrap_or(0) <= 3);
        }
    }
}
