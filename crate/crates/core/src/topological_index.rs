//! Topological side: smooth Riemann-Roch term plus fixed-point contributions.

use serde::Serialize;

use crate::analytic_index::analytic_index;
use crate::error::Result;
use crate::exact_arith::lefschetz_point_sum;
use crate::orbifold_model::{
    example_to_kawasaki, ExampleFamilySpec, IndexReport, KawasakiCurveSpec, PointContribution,
};
use crate::scalar::{int, rational_string, Rational};

/// Integral of the smooth density over the quotient: (2m+1)/l.
pub fn hrr_term(spec: ExampleFamilySpec) -> Rational {
    Rational::new((2 * spec.m() as i64 + 1).into(), (spec.l() as i64).into())
}

/// Closed form `(1/l)(-m + (l-1)/2 + l q)` with `q = floor(m/l)`.
pub fn mu_closed(spec: ExampleFamilySpec) -> Rational {
    let (l, m) = (spec.l() as i64, spec.m() as i64);
    let q = m / l;
    (int(-m + l * q) + Rational::new((l - 1).into(), 2.into())) / int(l)
}

/// The pole contribution summed over the group in Q(zeta_l).
pub fn mu_bruteforce(spec: ExampleFamilySpec) -> Result<Rational> {
    lefschetz_point_sum(spec.l(), 1, (spec.m() % spec.l()) as i64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KawasakiTotal {
    #[serde(with = "rational_string")]
    pub total: Rational,
    pub contributions: Vec<PointContribution>,
    pub is_integer: bool,
}

/// Smooth term plus every point contribution. A non-integral total is
/// reported through `is_integer`, never as an error.
pub fn kawasaki_index(spec: &KawasakiCurveSpec) -> Result<KawasakiTotal> {
    let contributions = spec
        .points
        .iter()
        .map(|p| {
            let contribution = lefschetz_point_sum(p.isotropy_order(), p.normal_weight(), p.bundle_weight())?;
            Ok(PointContribution {
                point: *p,
                contribution,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = contributions
        .iter()
        .fold(spec.smooth_term.clone(), |acc, c| acc + &c.contribution);
    Ok(KawasakiTotal {
        is_integer: total.is_integer(),
        total,
        contributions,
    })
}

/// Evaluates both sides for one (l, m); disagreement is a report field.
pub fn verify_identity(spec: ExampleFamilySpec) -> Result<IndexReport> {
    let curve = example_to_kawasaki(spec);
    let evaluated = kawasaki_index(&curve)?;
    Ok(IndexReport::new(
        spec.l(),
        spec.m(),
        analytic_index(spec),
        curve.smooth_term,
        evaluated.contributions,
    ))
}
