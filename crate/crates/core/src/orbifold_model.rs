//! Data model for curve-level index problems.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{int, rational_string, Rational};

pub const SCHEMA_VERSION: u32 = 1;

/// An isolated cyclic orbifold point: isotropy order `N`, rotation exponent
/// `a` of the generator on the normal direction, and bundle weight `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFixedPoint")]
pub struct FixedPointDatum {
    #[serde(rename = "N")]
    isotropy_order: u64,
    #[serde(rename = "a")]
    normal_weight: i64,
    #[serde(rename = "b")]
    bundle_weight: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixedPoint {
    #[serde(rename = "N")]
    n: u64,
    a: i64,
    b: i64,
}

impl TryFrom<RawFixedPoint> for FixedPointDatum {
    type Error = Error;
    fn try_from(raw: RawFixedPoint) -> Result<Self> {
        FixedPointDatum::new(raw.n, raw.a, raw.b)
    }
}

impl FixedPointDatum {
    /// Normalizes `a` and `b` into `[0, N)`; `a` must be a unit mod `N`.
    pub fn new(isotropy_order: u64, normal_weight: i64, bundle_weight: i64) -> Result<Self> {
        if isotropy_order < 2 {
            return Err(Error::InvalidInput(format!(
                "isotropy order N must be >= 2, got {isotropy_order}"
            )));
        }
        let n = isotropy_order as i64;
        let a = normal_weight.rem_euclid(n);
        if a.gcd(&n) != 1 {
            return Err(Error::InvalidInput(format!(
                "normal weight a = {normal_weight} must be coprime to N = {n}"
            )));
        }
        Ok(FixedPointDatum {
            isotropy_order,
            normal_weight: a,
            bundle_weight: bundle_weight.rem_euclid(n),
        })
    }

    pub fn isotropy_order(&self) -> u64 {
        self.isotropy_order
    }

    pub fn normal_weight(&self) -> i64 {
        self.normal_weight
    }

    pub fn bundle_weight(&self) -> i64 {
        self.bundle_weight
    }
}

/// The family Sigma = (K_{CP^1} minus zero section) / Z_l with Fourier weight m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawExample")]
pub struct ExampleFamilySpec {
    l: u64,
    m: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExample {
    l: u64,
    m: u64,
}

impl TryFrom<RawExample> for ExampleFamilySpec {
    type Error = Error;
    fn try_from(raw: RawExample) -> Result<Self> {
        ExampleFamilySpec::new(raw.l, raw.m)
    }
}

impl ExampleFamilySpec {
    pub fn new(l: u64, m: u64) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidInput(format!("group order l must be >= 2, got {l}")));
        }
        Ok(ExampleFamilySpec { l, m })
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

/// A genus-0 orbifold curve index problem: the integrated smooth density plus
/// the isolated fixed points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(clippy::manual_non_exhaustive)]
pub struct KawasakiCurveSpec {
    #[serde(serialize_with = "schema_version_out", deserialize_with = "schema_version_in")]
    schema_version: (),
    #[serde(with = "rational_string")]
    pub smooth_term: Rational,
    pub points: Vec<FixedPointDatum>,
}

fn schema_version_out<S: serde::Serializer>(_: &(), s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u32(SCHEMA_VERSION)
}

fn schema_version_in<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<(), D::Error> {
    let v = u32::deserialize(d)?;
    if v != SCHEMA_VERSION {
        return Err(serde::de::Error::custom(format!(
            "unsupported schema_version {v}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

impl KawasakiCurveSpec {
    pub fn new(smooth_term: Rational, points: Vec<FixedPointDatum>) -> Self {
        KawasakiCurveSpec {
            schema_version: (),
            smooth_term,
            points,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Parses and validates; schema violations report the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() {
                Error::Json(inner)
            } else {
                Error::Schema {
                    path,
                    message: inner.to_string(),
                }
            }
        })
    }
}

/// Both sides of the index identity with the per-point breakdown.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub l: u64,
    pub m: u64,
    pub analytic_index: i64,
    #[serde(with = "rational_string")]
    pub topological_smooth: Rational,
    pub topological_points: Vec<PointContribution>,
    #[serde(with = "rational_string")]
    pub topological_total: Rational,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointContribution {
    pub point: FixedPointDatum,
    #[serde(with = "rational_string")]
    pub contribution: Rational,
}

impl IndexReport {
    pub fn new(l: u64, m: u64, analytic_index: i64, smooth: Rational, points: Vec<PointContribution>) -> Self {
        let total = points.iter().fold(smooth.clone(), |acc, p| acc + &p.contribution);
        IndexReport {
            l,
            m,
            analytic_index,
            agree: int(analytic_index) == total,
            topological_smooth: smooth,
            topological_points: points,
            topological_total: total,
        }
    }
}

/// Smooth term (2m+1)/l and two poles, each with N = l, a = 1, b = m mod l.
pub fn example_to_kawasaki(spec: ExampleFamilySpec) -> KawasakiCurveSpec {
    let (l, m) = (spec.l as i64, spec.m as i64);
    let pole = FixedPointDatum::new(spec.l, 1, m).expect("1 is a unit mod l >= 2");
    KawasakiCurveSpec::new(Rational::new((2 * m + 1).into(), l.into()), vec![pole, pole])
}
