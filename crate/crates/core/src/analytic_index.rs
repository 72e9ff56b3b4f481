//! Analytic side: dimensions of the weight-m Dolbeault cohomology of the
//! example family, by counting Z_l-invariant monomials.

use crate::orbifold_model::ExampleFamilySpec;

/// `#{k : 0 <= k <= d, k = r (mod l)}`, by enumeration.
pub fn invariant_monomial_count(d: u64, l: u64, r: u64) -> u64 {
    assert!(l >= 2 && r < l, "need l >= 2 and 0 <= r < l");
    (0..=d).filter(|k| k % l == r).count() as u64
}

/// h^0 of the weight-m sections: 1 + 2 floor(m / l).
pub fn kappa(spec: ExampleFamilySpec) -> u64 {
    1 + 2 * (spec.m() / spec.l())
}

/// h^1 vanishes for the whole family: it injects into H^0(CP^1, O(-2m-2)) = 0.
pub fn h1_equivariant(_spec: ExampleFamilySpec) -> u64 {
    0
}

pub fn analytic_index(spec: ExampleFamilySpec) -> i64 {
    kappa(spec) as i64 - h1_equivariant(spec) as i64
}
