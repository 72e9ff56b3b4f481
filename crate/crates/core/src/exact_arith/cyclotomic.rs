//! The cyclotomic field Q(zeta_N) in the power basis modulo Phi_N.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Phi_N computed by exact division `(x^N - 1) / prod_{d | N, d < N} Phi_d`.
pub fn cyclotomic_polynomial(n: u64) -> Poly<BigInt> {
    assert!(n >= 1, "cyclotomic order must be positive");
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut table: BTreeMap<u64, Poly<BigInt>> = BTreeMap::new();
    for &d in &divisors {
        let mut phi = x_pow_minus_one(d);
        for (&e, phi_e) in table.iter().filter(|(e, _)| d % **e == 0) {
            debug_assert!(e < d);
            let (quot, rem) = phi.div_rem(phi_e).expect("monic divisor");
            debug_assert!(rem.is_zero());
            phi = quot;
        }
        table.insert(d, phi);
    }
    table.remove(&n).expect("n divides itself")
}

fn x_pow_minus_one(n: u64) -> Poly<BigInt> {
    let mut coeffs = vec![BigInt::zero(); n as usize + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[n as usize] = BigInt::one();
    Poly::new(coeffs)
}

/// Shared context for elements of Q(zeta_N): the order and its reduction modulus.
#[derive(Debug)]
pub struct CyclotomicField<T> {
    order: u64,
    modulus: Poly<T>,
}

impl<T: Scalar> CyclotomicField<T> {
    pub fn new(order: u64) -> Result<Arc<Self>> {
        if order == 0 {
            return Err(Error::InvalidInput("cyclotomic order must be >= 1".into()));
        }
        let modulus = cyclotomic_polynomial(order).map(|c| T::from_rational(&Rational::from_integer(c.clone())));
        Ok(Arc::new(CyclotomicField { order, modulus }))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Euler phi of the order, the field degree over Q.
    pub fn degree(&self) -> usize {
        self.modulus.degree().expect("Phi_N is nonzero")
    }

    pub fn modulus(&self) -> &Poly<T> {
        &self.modulus
    }

    fn reduce(self: &Arc<Self>, p: &Poly<T>) -> CyclotomicElement<T> {
        let r = p.rem(&self.modulus).expect("modulus is nonzero");
        let mut coeffs = r.into_coeffs();
        coeffs.resize(self.degree(), T::zero());
        CyclotomicElement {
            field: Arc::clone(self),
            coeffs,
        }
    }

    pub fn from_poly(self: &Arc<Self>, p: &Poly<T>) -> CyclotomicElement<T> {
        self.reduce(p)
    }

    pub fn constant(self: &Arc<Self>, c: T) -> CyclotomicElement<T> {
        self.reduce(&Poly::constant(c))
    }

    pub fn zero(self: &Arc<Self>) -> CyclotomicElement<T> {
        self.constant(T::zero())
    }

    pub fn one(self: &Arc<Self>) -> CyclotomicElement<T> {
        self.constant(T::one())
    }

    /// zeta^k for any integer k (reduced mod N first).
    pub fn zeta_pow(self: &Arc<Self>, k: i64) -> CyclotomicElement<T> {
        let e = k.rem_euclid(self.order as i64) as usize;
        self.reduce(&Poly::monomial(T::one(), e))
    }
}

/// An element of Q(zeta_N) as a coefficient vector of length phi(N).
#[derive(Clone)]
pub struct CyclotomicElement<T> {
    field: Arc<CyclotomicField<T>>,
    coeffs: Vec<T>,
}

impl<T: Scalar> CyclotomicElement<T> {
    pub fn order(&self) -> u64 {
        self.field.order
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn field(&self) -> &Arc<CyclotomicField<T>> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn poly(&self) -> Poly<T> {
        Poly::new(self.coeffs.clone())
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn scale(&self, c: &T) -> Self {
        CyclotomicElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    /// The automorphism zeta -> zeta^c; requires gcd(c, N) = 1.
    pub fn galois(&self, c: i64) -> Result<Self> {
        let n = self.order() as i64;
        if c.gcd(&n) != 1 {
            return Err(Error::InvalidInput(format!(
                "galois exponent {c} is not a unit mod {n}"
            )));
        }
        let mut acc = Poly::zero();
        for (i, coeff) in self.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let e = (i as i64 * c).rem_euclid(n) as usize;
            acc = &acc + &Poly::monomial(coeff.clone(), e);
        }
        Ok(self.field.reduce(&acc))
    }
}

impl<T: Scalar> PartialEq for CyclotomicElement<T> {
    fn eq(&self, other: &Self) -> bool {
        self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl<T: Scalar + fmt::Display> fmt::Debug for CyclotomicElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})[", self.order())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

pub fn cyc_add<T: Scalar>(u: &CyclotomicElement<T>, v: &CyclotomicElement<T>) -> Result<CyclotomicElement<T>> {
    u.same_field(v)?;
    let coeffs = u
        .coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(a, b)| a.clone() + b.clone())
        .collect();
    Ok(CyclotomicElement {
        field: Arc::clone(&u.field),
        coeffs,
    })
}

pub fn cyc_sub<T: Scalar>(u: &CyclotomicElement<T>, v: &CyclotomicElement<T>) -> Result<CyclotomicElement<T>> {
    u.same_field(v)?;
    let coeffs = u
        .coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(a, b)| a.clone() - b.clone())
        .collect();
    Ok(CyclotomicElement {
        field: Arc::clone(&u.field),
        coeffs,
    })
}

pub fn cyc_mul<T: Scalar>(u: &CyclotomicElement<T>, v: &CyclotomicElement<T>) -> Result<CyclotomicElement<T>> {
    u.same_field(v)?;
    Ok(u.field.reduce(&(&u.poly() * &v.poly())))
}

/// Inverse via extended Euclid against Phi_N. Every nonzero element is a unit
/// because Phi_N is irreducible.
pub fn cyc_inv<T: Scalar>(u: &CyclotomicElement<T>) -> Result<CyclotomicElement<T>> {
    if u.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let (g, s, _) = Poly::ext_gcd(&u.poly(), u.field.modulus());
    if g.degree() != Some(0) {
        return Err(Error::DivisionByZero);
    }
    Ok(u.field.reduce(&s))
}

/// Returns the constant coefficient when every higher coefficient vanishes.
pub fn assert_rational<T: Scalar + fmt::Display>(u: &CyclotomicElement<T>) -> Result<T> {
    if let Some((degree, c)) = u.coeffs.iter().enumerate().skip(1).find(|(_, c)| !c.is_zero()) {
        return Err(Error::NotRational {
            degree,
            coefficient: c.to_string(),
        });
    }
    Ok(u.coeffs[0].clone())
}
