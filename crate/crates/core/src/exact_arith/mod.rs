//! Exact rational and cyclotomic arithmetic.

pub mod cyclotomic;
pub mod lefschetz;
pub mod poly;

pub use cyclotomic::{
    assert_rational, cyc_add, cyc_inv, cyc_mul, cyc_sub, cyclotomic_polynomial, CyclotomicElement, CyclotomicField,
};
pub use lefschetz::{lefschetz_point_sum, lefschetz_point_sum_float, lefschetz_sum_element, unit_root_reciprocal_sum};
pub use poly::Poly;
