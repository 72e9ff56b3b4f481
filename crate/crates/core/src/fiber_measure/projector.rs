//! Orthogonal projection onto weight-m functions on the model orbit C*,
//! realized as an orbit integral against the normalized fiber measure.

use serde::Serialize;

use std::cell::Cell;

use super::quadrature::{angular_mean, angular_mean_with_magnitude, QuadratureConfig, WithMagnitude};
use super::{FiberMeasure, FiberMeasureParams};
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// A function on C* evaluated on demand.
pub trait SampledFunction<F: Real> {
    fn eval(&self, w: C<F>) -> Result<C<F>>;
}

impl<F: Real, T: Fn(C<F>) -> C<F>> SampledFunction<F> for T {
    fn eval(&self, w: C<F>) -> Result<C<F>> {
        Ok(self(w))
    }
}

#[derive(Clone, Debug)]
pub struct Projector<F> {
    measure: FiberMeasure<F>,
}

impl<F: Real> Projector<F> {
    pub fn new(params: FiberMeasureParams<F>, quad: QuadratureConfig) -> Result<Self> {
        Ok(Projector {
            measure: FiberMeasure::new(params, quad)?,
        })
    }

    pub fn measure(&self) -> &FiberMeasure<F> {
        &self.measure
    }

    pub fn m(&self) -> u32 {
        self.measure.params().m()
    }

    /// `pi_m(u)(w) = l(w)^m integral u(xi w) conj(xi)^m dv_{f,m}(xi w)` with
    /// `l(w) = |w|^2`. The orbit is parametrized by `xi = (r/|w|) e^{i gamma}`
    /// so the radial integral runs over `r = |xi w|` and the angle is measured
    /// from `arg w`.
    pub fn eval<U: SampledFunction<F> + ?Sized>(&self, u: &U, w: C<F>) -> Result<C<F>> {
        let modulus = w.norm();
        if !(modulus > F::zero() && modulus.is_finite()) {
            return Err(Error::InvalidInput("projector evaluated off C*".into()));
        }
        let m = self.m() as i32;
        let theta = w.arg();
        let quad = *self.measure.quad();
        // Largest |u| sampled so far; circles where u is negligible against it
        // are resolved in absolute rather than relative terms.
        let peak = Cell::new(F::zero());
        let weight = |r: F| -> Result<WithMagnitude<C<F>, F>> {
            let orbit_mean = angular_mean_with_magnitude(
                |gamma: F| {
                    let eta = C::from_polar(r, gamma + theta);
                    let value = u.eval(eta)?;
                    peak.set(peak.get().max(value.norm()));
                    Ok(value * C::from_polar(F::one(), -F::from_i32(m).unwrap() * gamma))
                },
                &quad,
                peak.get(),
            )?;
            let rm = r.powi(m);
            Ok(WithMagnitude {
                value: orbit_mean.value * rm,
                magnitude: orbit_mean.magnitude * rm,
            })
        };
        let radial = self.measure.integrate_radial(weight)?;
        Ok(radial.value * modulus.powi(m))
    }

    /// The image of `u` is `w^m` times the value of the projection at `w = 1`,
    /// so a single quadrature fixes it everywhere.
    pub fn project<U: SampledFunction<F> + ?Sized>(&self, u: &U) -> Result<Projected<F>> {
        let coefficient = self.eval(u, C::new(F::one(), F::zero()))?;
        Ok(Projected {
            m: self.m(),
            coefficient,
        })
    }

    /// Total mass of `l(xi w)^m dv_{f,m}(xi)` over the orbit through `w`.
    pub fn orbit_mass(&self, w: C<F>) -> Result<F> {
        let m = self.m() as i32;
        let quad = *self.measure.quad();
        let modulus = w.norm();
        if modulus.partial_cmp(&F::zero()) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidInput("orbit base point must lie in C*".into()));
        }
        self.measure.integrate_radial(|r: F| {
            let mean: F = angular_mean(|_gamma: F| Ok(F::one()), &quad)?;
            Ok(mean * r.powi(2 * m))
        })
    }
}

/// `pi_m(u)`, stored as its coefficient on `w^m`.
#[derive(Clone, Copy, Debug)]
pub struct Projected<F> {
    m: u32,
    coefficient: C<F>,
}

impl<F: Real> Projected<F> {
    pub fn coefficient(&self) -> C<F> {
        self.coefficient
    }
}

impl<F: Real> SampledFunction<F> for Projected<F> {
    fn eval(&self, w: C<F>) -> Result<C<F>> {
        Ok(w.powi(self.m as i32) * self.coefficient)
    }
}

pub fn project_m<F: Real, U: SampledFunction<F> + ?Sized>(u: &U, projector: &Projector<F>) -> Result<Projected<F>> {
    projector.project(u)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectorReport {
    pub a: f64,
    pub m: u32,
    pub lambda_m: f64,
    pub unity_defect: f64,
    pub orbit_mass_defect: f64,
    pub monomial_resolution_defect: f64,
    pub idempotency_defect: f64,
    pub equivariance_defect: f64,
    pub rel_tol: f64,
    pub angular_nodes: usize,
}

fn defect<F: Real>(x: C<F>, reference: C<F>) -> f64 {
    let scale = reference.norm().max(F::one());
    ((x - reference).norm() / scale).to_f64().unwrap_or(f64::NAN)
}

/// Base points with `|w|` in [0.5, 2].
pub fn sample_points<F: Real>() -> Vec<C<F>> {
    [(0.5, 0.0), (0.9, 1.3), (1.2, -2.2), (1.7, 0.4), (2.0, 3.0)]
        .into_iter()
        .map(|(r, t)| C::from_polar(F::lit(r), F::lit(t)))
        .collect()
}

/// Group elements used for the equivariance test.
pub fn sample_group_elements<F: Real>() -> Vec<C<F>> {
    [(1.3, 0.3), (0.8, -1.1), (1.0, 2.0)]
        .into_iter()
        .map(|(r, t)| C::from_polar(F::lit(r), F::lit(t)))
        .collect()
}

/// Checks the projector on the supplied test functions: idempotency
/// `pi(pi u) = pi u`, equivariance `pi u(xi w) = xi^m pi u(w)`, unit orbit
/// mass, unity of the normalized radial measure, and resolution of the
/// monomials `w^0, ..., w^{m+2}`. Defects are relative to
/// `max(1, |reference|)`.
pub fn projector_axioms_check<F: Real>(
    params: &FiberMeasureParams<F>,
    quad: &QuadratureConfig,
    tests: &[&dyn SampledFunction<F>],
) -> Result<ProjectorReport> {
    let projector = Projector::new(*params, *quad)?;
    let m = params.m();
    let points = sample_points::<F>();
    let unity = super::unity_check(params, quad)?;

    let mut orbit_mass_defect = 0.0f64;
    for &w in &points {
        let mass = projector.orbit_mass(w)?;
        orbit_mass_defect = orbit_mass_defect.max((mass - F::one()).abs().to_f64().unwrap_or(f64::NAN));
    }

    let exponents: Vec<u32> = (0..=m + 2).collect();
    let monomial_resolution_defect = monomial_resolution_defect(&projector, &exponents)?;

    let mut idempotency_defect = 0.0f64;
    let mut equivariance_defect = 0.0f64;
    for u in tests {
        let once = projector.project(*u)?;
        let twice = projector.project(&once)?;
        for &w in &points {
            let pu = projector.eval(*u, w)?;
            idempotency_defect = idempotency_defect.max(defect(twice.eval(w)?, pu));
            for xi in sample_group_elements::<F>() {
                let shifted = projector.eval(*u, xi * w)?;
                equivariance_defect = equivariance_defect.max(defect(shifted, xi.powi(m as i32) * pu));
            }
        }
    }

    Ok(ProjectorReport {
        a: params.a().to_f64().unwrap_or(f64::NAN),
        m,
        lambda_m: projector.measure().lambda().to_f64().unwrap_or(f64::NAN),
        unity_defect: (unity - F::one()).abs().to_f64().unwrap_or(f64::NAN),
        orbit_mass_defect,
        monomial_resolution_defect,
        idempotency_defect,
        equivariance_defect,
        rel_tol: quad.rel_tol,
        angular_nodes: quad.angular_nodes,
    })
}

/// `max_k max_w |pi_m(w^k)(w) - delta_{km} w^k|` over the sample points, for
/// the supplied exponents.
pub fn monomial_resolution_defect<F: Real>(projector: &Projector<F>, exponents: &[u32]) -> Result<f64> {
    let m = projector.m();
    let mut worst = 0.0f64;
    for &k in exponents {
        let u = move |w: C<F>| w.powi(k as i32);
        for w in sample_points::<F>() {
            let expected = if k == m {
                w.powi(k as i32)
            } else {
                C::new(F::zero(), F::zero())
            };
            worst = worst.max((projector.eval(&u, w)? - expected).norm().to_f64().unwrap_or(f64::NAN));
        }
    }
    Ok(worst)
}

/// A smooth bump centred away from the origin; it has components of every weight.
pub fn gaussian_bump<F: Real>(center: C<F>, width: F) -> impl Fn(C<F>) -> C<F> {
    move |w: C<F>| {
        let d = (w - center).norm_sqr();
        C::new((-d / (width * width)).exp(), F::zero())
    }
}

/// A Lipschitz tent of height 1 supported on the disc of radius `radius`
/// around `center`. Its kink limits quadrature to algebraic convergence, so
/// the achieved accuracy tracks the requested tolerance.
pub fn cone<F: Real>(center: C<F>, radius: F) -> impl Fn(C<F>) -> C<F> {
    move |w: C<F>| {
        let height = F::one() - (w - center).norm() / radius;
        C::new(height.max(F::zero()), F::zero())
    }
}

/// Least-squares slope of `log defect` against `log tol`: 1 means the
/// defects shrink in proportion to the requested tolerance.
pub fn observed_order(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(t, d)| (t.ln(), d.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Two off-centre bumps, which between them carry every weight.
pub fn standard_test_functions<F: Real>() -> Vec<Box<dyn SampledFunction<F>>> {
    vec![
        Box::new(gaussian_bump(C::new(F::lit(1.1), F::lit(0.4)), F::lit(0.5))),
        Box::new(gaussian_bump(C::new(F::lit(-0.6), F::lit(0.8)), F::lit(0.7))),
    ]
}

/// [`projector_axioms_check`] on [`standard_test_functions`].
pub fn standard_axioms_check<F: Real>(
    params: &FiberMeasureParams<F>,
    quad: &QuadratureConfig,
) -> Result<ProjectorReport> {
    let owned = standard_test_functions::<F>();
    let tests: Vec<&dyn SampledFunction<F>> = owned.iter().map(|b| b.as_ref()).collect();
    projector_axioms_check(params, quad, &tests)
}

#[cfg(test)]
mod tests {
    use super::super::Cutoff;
    use super::*;

    fn projector(a: f64, m: u32) -> Projector<f64> {
        Projector::new(
            FiberMeasureParams::new(a, m, Cutoff::SmoothBump).unwrap(),
            QuadratureConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn weight_m_monomial_is_fixed() {
        for (a, m) in [(1.0, 0), (2.0, 1), (3.0, 2)] {
            let p = projector(a, m);
            let u = move |w: C<f64>| w.powi(m as i32);
            for w in sample_points::<f64>() {
                let v = p.eval(&u, w).unwrap();
                assert!((v - w.powi(m as i32)).norm() < 1e-8, "m={m} w={w}: {v}");
            }
        }
    }

    #[test]
    fn other_weights_are_annihilated() {
        let p = projector(2.0, 1);
        let u = |w: C<f64>| w * w;
        for w in sample_points::<f64>() {
            assert!(p.eval(&u, w).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn mixed_monomials_resolve_termwise() {
        let p = projector(3.0, 1);
        let u = |w: C<f64>| w + 3.0 * w.powi(3);
        let head = |w: C<f64>| w;
        let tail = |w: C<f64>| 3.0 * w.powi(3);
        for w in sample_points::<f64>() {
            let whole = p.eval(&u, w).unwrap();
            let split = p.eval(&head, w).unwrap() + p.eval(&tail, w).unwrap();
            assert!((whole - split).norm() < 1e-8);
            assert!((whole - w).norm() < 1e-8);
        }
    }

    #[test]
    fn origin_is_rejected() {
        let p = projector(1.0, 0);
        let u = |w: C<f64>| w;
        assert!(p.eval(&u, C::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn lipschitz_defects_follow_the_tolerance() {
        let params = FiberMeasureParams::new(1.0, 0, Cutoff::HardStep).unwrap();
        let u = cone(C::new(0.9, 0.5), 0.8);
        let samples: Vec<(f64, f64)> = [1e-3, 1e-4, 1e-5]
            .into_iter()
            .map(|tol| {
                let quad = QuadratureConfig::default().with_tolerance(tol).unwrap();
                let r = projector_axioms_check(&params, &quad, &[&u]).unwrap();
                let worst = r.idempotency_defect.max(r.equivariance_defect);
                assert!(worst < 10.0 * tol, "tol {tol}: {r:?}");
                (tol, worst)
            })
            .collect();
        assert!(observed_order(&samples) > 0.75, "{samples:?}");
    }

    #[test]
    fn order_of_an_exact_power_law() {
        let samples = [(1e-2, 3e-2), (1e-3, 3e-3), (1e-4, 3e-4)];
        assert!((observed_order(&samples) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn axioms_on_a_bump() {
        let params = FiberMeasureParams::new(2.0, 1, Cutoff::SmoothBump).unwrap();
        let bump = gaussian_bump(C::new(1.1, 0.4), 0.5);
        let report = projector_axioms_check(&params, &QuadratureConfig::default(), &[&bump]).unwrap();
        assert!(report.idempotency_defect < 1e-6, "{report:?}");
        assert!(report.equivariance_defect < 1e-6, "{report:?}");
        assert!(report.orbit_mass_defect < 1e-8, "{report:?}");
        assert!(report.monomial_resolution_defect < 1e-6, "{report:?}");
        assert!(report.unity_defect < 1e-8, "{report:?}");
    }
}
