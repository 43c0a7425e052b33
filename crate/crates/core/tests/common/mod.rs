//! Test-only helpers: an independent brute-force product oracle and random
//! value generators.
//!
//! The oracle multiplies basis blades by explicit factor-list manipulation —
//! concatenate the factor indices, bubble-sort with a sign flip per adjacent
//! swap, cancel equal adjacent factors — and never touches the bitmask fast
//! path it is used to check.

// each test binary uses its own subset of these helpers
#![allow(dead_code)]

use psframe::algebra::{Algebra, Blade, Multivector};
use rand::rngs::StdRng;
use rand::Rng;

fn sorted_factors_with_sign(a: Blade, b: Blade) -> (Vec<usize>, f64) {
    let mut factors: Vec<usize> = a.indices().chain(b.indices()).collect();
    let mut sign = 1.0;
    loop {
        let mut swapped = false;
        for i in 0..factors.len().saturating_sub(1) {
            if factors[i] > factors[i + 1] {
                factors.swap(i, i + 1);
                sign = -sign;
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    // σ_i σ_i = +1: drop equal adjacent pairs
    let mut reduced = Vec::with_capacity(factors.len());
    let mut iter = factors.into_iter().peekable();
    while let Some(f) = iter.next() {
        if iter.peek() == Some(&f) {
            iter.next();
        } else {
            reduced.push(f);
        }
    }
    (reduced, sign)
}

fn brute_product_filtered(
    a: &Multivector,
    b: &Multivector,
    keep: impl Fn(usize, usize, usize) -> bool,
) -> Multivector {
    let mut terms: Vec<(Blade, f64)> = Vec::new();
    for (ba, ca) in a.terms() {
        for (bb, cb) in b.terms() {
            let (factors, sign) = sorted_factors_with_sign(ba, bb);
            if keep(ba.grade(), bb.grade(), factors.len()) {
                terms.push((Blade::from_indices(&factors), sign * ca * cb));
            }
        }
    }
    Multivector::from_terms(a.sig(), terms)
}

pub fn brute_geometric(a: &Multivector, b: &Multivector) -> Multivector {
    brute_product_filtered(a, b, |_, _, _| true)
}

pub fn brute_outer(a: &Multivector, b: &Multivector) -> Multivector {
    brute_product_filtered(a, b, |ga, gb, gout| gout == ga + gb)
}

pub fn brute_left_contraction(a: &Multivector, b: &Multivector) -> Multivector {
    brute_product_filtered(a, b, |ga, gb, gout| ga <= gb && gout == gb - ga)
}

/// Random sparse multivector with up to `max_terms` terms.
pub fn random_multivector(rng: &mut StdRng, sig: Algebra, max_terms: usize) -> Multivector {
    let blades = 1u32 << sig.dim();
    let count = rng.random_range(1..=max_terms);
    let terms = (0..count).map(|_| {
        let mask = rng.random_range(0..blades) as u16;
        let coeff = rng.random_range(-2.0..2.0);
        (Blade::from_mask(mask), coeff)
    });
    Multivector::from_terms(sig, terms)
}

/// Random grade-1 multivector.
pub fn random_vector(rng: &mut StdRng, sig: Algebra) -> Multivector {
    let components: Vec<f64> = (0..sig.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
    Multivector::vector(sig, &components).expect("lengths match")
}

/// Max-coefficient distance scaled by the larger operand norm.
pub fn relative_difference(a: &Multivector, b: &Multivector) -> f64 {
    let scale = a.norm().max(b.norm()).max(1.0);
    (a.clone() - b.clone()).max_abs_coeff() / scale
}
