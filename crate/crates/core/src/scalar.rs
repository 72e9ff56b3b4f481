//! Scalar abstractions shared by the exact and floating-point paths.
//!
//! Exact code instantiates these with [`Rational`]; numerical code with `f64`
//! (or `f32` where precision allows).

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Coefficient ring: anything with exact-enough `+ - *` and negation.
pub trait Ring: Clone + Debug + PartialEq + Num + Neg<Output = Self> {}
impl<T: Clone + Debug + PartialEq + Num + Neg<Output = T>> Ring for T {}

/// A field that can absorb exact rational data.
pub trait Scalar: Ring + Send + Sync {
    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }
}

/// Floating-point scalar used by the quadrature and projector code.
pub trait Real: Scalar + Float + FloatConst + FromPrimitive + Copy + Default + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f64 {}
impl Real for f32 {}

pub type C<F> = Complex<F>;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`; whitespace and decimals are rejected.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix('-').unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) || den.starts_with('-') {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Serde adapter: rationals travel as `"p/q"` strings.
pub mod rational_string {
    use super::{parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).ok_or_else(|| de::Error::custom(format!("expected a rational \"p/q\", got {raw:?}")))
    }
}

/// Pairwise summation; deterministic for a fixed input order.
pub fn pairwise_sum<T: Copy + std::ops::Add<Output = T>>(xs: &[T], zero: T) -> T {
    match xs.len() {
        0 => zero,
        1 => xs[0],
        n if n <= 8 => xs.iter().fold(zero, |acc, &x| acc + x),
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum(lo, zero) + pairwise_sum(hi, zero)
        }
    }
}
