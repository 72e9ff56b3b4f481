//! Root-of-unity sums contributed by isolated cyclic fixed points.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;

use super::cyclotomic::{assert_rational, cyc_add, cyc_inv, cyc_mul, cyc_sub, CyclotomicElement, CyclotomicField};
use crate::error::{Error, Result};
use crate::scalar::{int, Rational};

fn check_point(n: u64, a: i64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("isotropy order must be >= 2, got {n}")));
    }
    if a.gcd(&(n as i64)) != 1 {
        return Err(Error::InvalidInput(format!(
            "normal weight {a} is not coprime to isotropy order {n}"
        )));
    }
    Ok(())
}

/// `sum_{k=1}^{N-1} zeta^{bk} / (1 - zeta^{-ak})` as an element of Q(zeta_N),
/// before the 1/N normalization.
pub fn lefschetz_sum_element(n: u64, a: i64, b: i64) -> Result<CyclotomicElement<Rational>> {
    check_point(n, a)?;
    let n_i = n as i64;
    let (a, b) = (a.rem_euclid(n_i), b.rem_euclid(n_i));
    let field = CyclotomicField::<Rational>::new(n)?;
    let one = field.one();
    let mut acc = field.zero();
    for k in 1..n_i {
        let denom = cyc_sub(&one, &field.zeta_pow(-a * k))?;
        let term = cyc_mul(&field.zeta_pow(b * k), &cyc_inv(&denom)?)?;
        acc = cyc_add(&acc, &term)?;
    }
    Ok(acc)
}

/// `(1/N) sum_{k=1}^{N-1} zeta^{bk} / (1 - zeta^{-ak})`, computed exactly.
///
/// The sum is fixed by every Galois automorphism, so it must land in Q; a
/// nonzero irrational coefficient surfaces as [`Error::NotRational`].
pub fn lefschetz_point_sum(n: u64, a: i64, b: i64) -> Result<Rational> {
    let sum = lefschetz_sum_element(n, a, b)?;
    Ok(assert_rational(&sum)? / int(n as i64))
}

/// The same sum in double precision with `zeta = exp(2 pi i / N)`.
pub fn lefschetz_point_sum_float(n: u64, a: i64, b: i64) -> Result<Complex64> {
    check_point(n, a)?;
    let z = |e: i64| Complex64::from_polar(1.0, TAU * e.rem_euclid(n as i64) as f64 / n as f64);
    let s: Complex64 = (1..n as i64)
        .map(|k| z(b * k) / (Complex64::new(1.0, 0.0) - z(-a * k)))
        .sum();
    Ok(s / n as f64)
}

/// `sum_{k=1}^{N-1} 1 / (zeta^k - 1)`, which equals `-(N-1)/2`.
pub fn unit_root_reciprocal_sum(n: u64) -> Result<Rational> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("order must be >= 2, got {n}")));
    }
    let field = CyclotomicField::<Rational>::new(n)?;
    let one = field.one();
    let mut acc = field.zero();
    for k in 1..n as i64 {
        acc = cyc_add(&acc, &cyc_inv(&cyc_sub(&field.zeta_pow(k), &one)?)?)?;
    }
    assert_rational(&acc)
}
