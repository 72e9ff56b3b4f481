//! The fiber part of the C*-invariant metric: radial density, the weight-m
//! normalization constant, the normalized measure dv_m and the transversal
//! Fourier projector on the model orbit C*.

pub mod projector;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
pub use projector::{
    monomial_resolution_defect, project_m, projector_axioms_check, standard_axioms_check, standard_test_functions,
    Projected, Projector, ProjectorReport, SampledFunction,
};
pub use quadrature::{integrate, QuadValue, QuadratureConfig};

/// Concrete shape of the cutoff phi_1, which equals 1 on [-1, 1] and vanishes
/// for |x| >= 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    /// C-infinity step `psi(2 - x) / (psi(2 - x) + psi(x - 1))`, `psi(t) = exp(-1/t)`.
    SmoothBump,
    /// Indicator of `x <= 1`; gives closed-form normalization constants.
    HardStep,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberMeasureParams<F> {
    a: F,
    m: u32,
    cutoff: Cutoff,
}

impl<F: Real> FiberMeasureParams<F> {
    /// Requires `a > m/2`, the range where `|w|^{2m}` is integrable.
    pub fn new(a: F, m: u32, cutoff: Cutoff) -> Result<Self> {
        let p = Self::divergence_test(a, m, cutoff)?;
        if a <= F::from_u32(m).unwrap() * F::lit(0.5) {
            return Err(Error::InvalidInput(format!(
                "a = {} is at or below the integrability threshold m/2 = {}",
                a.to_f64().unwrap_or(f64::NAN),
                m as f64 / 2.0
            )));
        }
        Ok(p)
    }

    /// Accepts any `a > 0`, including divergent parameters, so the tail test
    /// can be exercised.
    pub fn divergence_test(a: F, m: u32, cutoff: Cutoff) -> Result<Self> {
        if !(a > F::zero() && a.is_finite()) {
            return Err(Error::InvalidInput("metric exponent a must be positive".into()));
        }
        Ok(FiberMeasureParams { a, m, cutoff })
    }

    pub fn a(&self) -> F {
        self.a
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    /// phi_1 evaluated at `x = |w|^2 >= 0`.
    pub fn phi1(&self, x: F) -> F {
        let one = F::one();
        let two = F::lit(2.0);
        match self.cutoff {
            Cutoff::HardStep => {
                if x <= one {
                    one
                } else {
                    F::zero()
                }
            }
            Cutoff::SmoothBump => {
                if x <= one {
                    one
                } else if x >= two {
                    F::zero()
                } else {
                    let psi = |t: F| (-one / t).exp();
                    let (left, right) = (psi(two - x), psi(x - one));
                    left / (left + right)
                }
            }
        }
    }

    /// Radii where the density changes formula; quadrature splits there.
    pub fn seams(&self) -> Vec<F> {
        match self.cutoff {
            Cutoff::HardStep => vec![F::one()],
            Cutoff::SmoothBump => vec![F::one(), F::lit(2.0).sqrt()],
        }
    }

    /// Beyond this radius the density is the pure power `4a^2 r^{-4a-1}`.
    pub fn power_law_start(&self) -> F {
        *self.seams().last().expect("at least one seam")
    }
}

/// `[phi_1(r^2) + (1 - phi_1(r^2)) 4a^2 r^{-4a-2}] r`.
pub fn radial_density<F: Real>(r: F, params: &FiberMeasureParams<F>) -> F {
    let phi = params.phi1(r * r);
    let a = params.a;
    let outer = if phi < F::one() {
        F::lit(4.0) * a * a * r.powf(-F::lit(4.0) * a - F::lit(2.0))
    } else {
        F::zero()
    };
    (phi + (F::one() - phi) * outer) * r
}

fn weighted_density<F: Real>(r: F, params: &FiberMeasureParams<F>) -> F {
    if r == F::zero() {
        return F::zero();
    }
    r.powi(2 * params.m as i32) * radial_density(r, params)
}

/// Geometric-shell diagnostics of the tail `integral_{R}^{inf} r^{2m} rho dr`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub shells: Vec<f64>,
    pub ratio: f64,
    pub value: Option<f64>,
}

const SHELL_RATIO_STABILITY: f64 = 1e-6;
const DIVERGENCE_RATIO: f64 = 1.0 - 1e-9;
const MIN_SHELLS: usize = 3;

/// Integrates the tail on shells `[R 2^k, R 2^{k+1}]` (in log radius). Once
/// consecutive shell ratios agree, the remainder is summed as a geometric
/// series; a ratio at or above one means the tail diverges.
fn power_tail<F: Real>(params: &FiberMeasureParams<F>, cfg: &QuadratureConfig) -> Result<(F, TailEstimate)> {
    let start = params.power_law_start().ln();
    let step = F::LN_2();
    let mut shells: Vec<F> = Vec::new();
    let max_shells = cfg.max_subdivisions.max(MIN_SHELLS);
    let to64 = |x: F| x.to_f64().unwrap_or(f64::NAN);
    for k in 0..max_shells {
        let lo = start + step * F::from_usize(k).unwrap();
        let shell: F = quadrature::integrate(
            |s: F| {
                let r = s.exp();
                Ok(weighted_density(r, params) * r)
            },
            &[lo, lo + step],
            cfg,
        )?;
        shells.push(shell);
        if shells.len() < MIN_SHELLS {
            continue;
        }
        let n = shells.len();
        let ratio = shells[n - 1] / shells[n - 2];
        let previous = shells[n - 2] / shells[n - 3];
        let diag = |value| TailEstimate {
            shells: shells.iter().map(|&s| to64(s)).collect(),
            ratio: to64(ratio),
            value,
        };
        if ratio >= F::lit(DIVERGENCE_RATIO) && previous >= F::lit(DIVERGENCE_RATIO) {
            return Err(Error::DivergenceDetected {
                a: to64(params.a),
                m: params.m,
                ratio: to64(ratio),
            });
        }
        if (ratio - previous).abs() <= F::lit(SHELL_RATIO_STABILITY) * ratio && ratio < F::one() {
            let partial = shells.iter().fold(F::zero(), |acc, &s| acc + s);
            let total = partial + shells[n - 1] * ratio / (F::one() - ratio);
            return Ok((total, diag(Some(to64(total)))));
        }
    }
    Err(Error::QuadratureNonconvergence(format!(
        "tail shells did not reach a geometric regime within {max_shells} shells"
    )))
}

/// Shell ratio of the tail; values >= 1 mean `lambda_m` diverges.
pub fn tail_diagnostics<F: Real>(params: &FiberMeasureParams<F>, cfg: &QuadratureConfig) -> Result<TailEstimate> {
    match power_tail(params, cfg) {
        Ok((_, diag)) => Ok(diag),
        Err(Error::DivergenceDetected { ratio, .. }) => Ok(TailEstimate {
            shells: Vec::new(),
            ratio,
            value: None,
        }),
        Err(e) => Err(e),
    }
}

/// `lambda_m = 2 pi integral_0^inf r^{2m} rho(r) dr`.
pub fn lambda_m<F: Real>(params: &FiberMeasureParams<F>, cfg: &QuadratureConfig) -> Result<F> {
    let mut breaks = vec![F::zero()];
    breaks.extend(params.seams());
    let core: F = quadrature::integrate(|r: F| Ok(weighted_density(r, params)), &breaks, cfg)?;
    let (tail, _) = power_tail(params, cfg)?;
    Ok(F::TAU() * (core + tail))
}

/// The normalized radial measure `dv_m = 2 pi rho(r) dr / lambda_m`.
#[derive(Clone, Debug)]
pub struct FiberMeasure<F> {
    params: FiberMeasureParams<F>,
    quad: QuadratureConfig,
    lambda: F,
}

impl<F: Real> FiberMeasure<F> {
    pub fn new(params: FiberMeasureParams<F>, quad: QuadratureConfig) -> Result<Self> {
        let lambda = lambda_m(&params, &quad)?;
        Ok(FiberMeasure { params, quad, lambda })
    }

    pub fn params(&self) -> &FiberMeasureParams<F> {
        &self.params
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    pub fn lambda(&self) -> F {
        self.lambda
    }

    /// `integral_0^inf g(r) dv_m(r)`. Panels split at the cutoff seams; the
    /// unbounded part is mapped onto (0, 1] with `r = R / u`.
    pub fn integrate_radial<V: QuadValue<F>>(&self, mut g: impl FnMut(F) -> Result<V>) -> Result<V> {
        let norm = F::TAU() / self.lambda;
        let mut breaks = vec![F::zero()];
        breaks.extend(self.params.seams());
        let start = self.params.power_law_start();
        let inner = quadrature::integrate(
            |r: F| {
                let w = radial_density(r, &self.params);
                if w == F::zero() {
                    return Ok(V::zero());
                }
                Ok(g(r)?.scale(w * norm))
            },
            &breaks,
            &self.quad,
        )?;
        let tail = quadrature::integrate(
            |u: F| {
                let r = start / u;
                let w = radial_density(r, &self.params) * start / (u * u);
                if w == F::zero() || !w.is_finite() {
                    return Ok(V::zero());
                }
                Ok(g(r)?.scale(w * norm))
            },
            &[F::zero(), F::one()],
            &self.quad,
        )?;
        Ok(inner + tail)
    }
}

/// `integral_0^inf r^{2m} dv_m(r)`, evaluated along a different radial route
/// than the one that produced `lambda_m`; equals 1 up to quadrature error.
pub fn unity_check<F: Real>(params: &FiberMeasureParams<F>, quad: &QuadratureConfig) -> Result<F> {
    let measure = FiberMeasure::new(*params, *quad)?;
    let m = params.m as i32;
    measure.integrate_radial(|r: F| Ok(r.powi(2 * m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn hard(a: f64, m: u32) -> FiberMeasureParams<f64> {
        FiberMeasureParams::new(a, m, Cutoff::HardStep).unwrap()
    }

    fn smooth(a: f64, m: u32) -> FiberMeasureParams<f64> {
        FiberMeasureParams::new(a, m, Cutoff::SmoothBump).unwrap()
    }

    #[test]
    fn density_values() {
        assert_eq!(radial_density(0.5, &smooth(1.0, 0)), 0.5);
        assert!((radial_density(2.0, &smooth(1.0, 0)) - 0.125).abs() < 1e-15);
        assert!((radial_density(2.0, &hard(1.0, 0)) - 0.125).abs() < 1e-15);
        assert_eq!(radial_density(1e-9, &smooth(3.0, 0)), 1e-9);
    }

    #[test]
    fn smooth_cutoff_is_monotone_step() {
        let p = smooth(1.0, 0);
        assert_eq!(p.phi1(-1.0), 1.0);
        assert_eq!(p.phi1(2.5), 0.0);
        assert!((p.phi1(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 1..100 {
            let v = p.phi1(1.0 + k as f64 / 100.0);
            assert!(v <= prev && v > 0.0);
            prev = v;
        }
    }

    /// Closed form for the hard cutoff:
    /// integral_0^1 r^{2m+1} dr + integral_1^inf 4a^2 r^{2m-4a-1} dr
    fn hard_lambda(a: f64, m: u32) -> f64 {
        let m = m as f64;
        2.0 * PI * (1.0 / (2.0 * m + 2.0) + 4.0 * a * a / (4.0 * a - 2.0 * m))
    }

    #[test]
    fn hard_step_lambda_closed_form() {
        let cfg = QuadratureConfig::default();
        assert!((lambda_m(&hard(1.0, 0), &cfg).unwrap() - 3.0 * PI).abs() < 1e-10);
        for (a, m) in [(2.0, 0), (3.0, 0), (1.3, 1), (2.5, 3), (0.7, 1)] {
            let v = lambda_m(&hard(a, m), &cfg).unwrap();
            assert!((v - hard_lambda(a, m)).abs() < 1e-9 * v, "a={a} m={m}: {v}");
        }
    }

    #[test]
    fn divergence_is_detected() {
        let cfg = QuadratureConfig::default();
        let p = FiberMeasureParams::divergence_test(0.4, 1, Cutoff::SmoothBump).unwrap();
        assert!(matches!(lambda_m(&p, &cfg), Err(Error::DivergenceDetected { .. })));
        assert!(FiberMeasureParams::new(0.4, 1, Cutoff::SmoothBump).is_err());
        assert!(FiberMeasureParams::<f64>::divergence_test(0.0, 0, Cutoff::HardStep).is_err());
    }

    #[test]
    fn integrability_dichotomy() {
        let cfg = QuadratureConfig::default();
        for m in 1..=4u32 {
            for cutoff in [Cutoff::HardStep, Cutoff::SmoothBump] {
                let half = m as f64 / 2.0;
                let below = FiberMeasureParams::divergence_test(half - 0.1, m, cutoff).unwrap();
                let above = FiberMeasureParams::divergence_test(half + 0.1, m, cutoff).unwrap();
                let d_below = tail_diagnostics(&below, &cfg).unwrap();
                let d_above = tail_diagnostics(&above, &cfg).unwrap();
                assert!(d_below.ratio > 1.0 && d_below.value.is_none());
                assert!(d_above.ratio < 1.0 && d_above.value.is_some());
                // shell ratio is 2^{2m - 4a}
                assert!((d_above.ratio - 2f64.powf(-0.4)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn smooth_lambda_is_stable_under_refinement() {
        let coarse = lambda_m(
            &smooth(1.0, 0),
            &QuadratureConfig::default().with_tolerance(1e-8).unwrap(),
        )
        .unwrap();
        let fine = lambda_m(
            &smooth(1.0, 0),
            &QuadratureConfig::default().with_tolerance(1e-13).unwrap(),
        )
        .unwrap();
        assert!(fine > 0.0 && fine.is_finite());
        assert!((coarse - fine).abs() < 1e-8);
    }

    #[test]
    fn unity_for_both_cutoffs() {
        let cfg = QuadratureConfig::default();
        for (a, m) in [(1.0, 0), (2.0, 1), (3.0, 2), (5.0, 3), (0.8, 1)] {
            for p in [smooth(a, m), hard(a, m)] {
                let u = unity_check(&p, &cfg).unwrap();
                assert!((u - 1.0).abs() < 10.0 * cfg.rel_tol, "a={a} m={m}: {u}");
            }
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let p = FiberMeasureParams::<f32>::new(1.0, 0, Cutoff::HardStep).unwrap();
        let cfg = QuadratureConfig::new(1e-5, 200, 8).unwrap();
        let v = lambda_m(&p, &cfg).unwrap();
        assert!((v - 3.0 * std::f32::consts::PI).abs() < 1e-4);
    }
}
