//! Adaptive Gauss-Kronrod (7/15) on finite intervals and adaptive periodic
//! trapezoid on the circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Real, C};

/// Values a quadrature rule can accumulate.
pub trait QuadValue<F: Real>: Copy + std::ops::Add<Output = Self> {
    fn zero() -> Self;
    fn scale(self, s: F) -> Self;
    fn norm(self) -> F;

    /// Size used for the relative tolerance; defaults to `norm`.
    fn magnitude(self) -> F {
        self.norm()
    }
}

impl<F: Real> QuadValue<F> for F {
    fn zero() -> Self {
        F::zero()
    }
    fn scale(self, s: F) -> Self {
        self * s
    }
    fn norm(self) -> F {
        self.abs()
    }
}

/// A value carried with the magnitude of the quantity it was averaged from, so
/// integrands that cancel to zero still get a meaningful error target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WithMagnitude<V, F> {
    pub value: V,
    pub magnitude: F,
}

impl<F: Real, V: QuadValue<F>> std::ops::Add for WithMagnitude<V, F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        WithMagnitude {
            value: self.value + rhs.value,
            magnitude: self.magnitude + rhs.magnitude,
        }
    }
}

impl<F: Real, V: QuadValue<F>> QuadValue<F> for WithMagnitude<V, F> {
    fn zero() -> Self {
        WithMagnitude {
            value: V::zero(),
            magnitude: F::zero(),
        }
    }
    fn scale(self, s: F) -> Self {
        WithMagnitude {
            value: self.value.scale(s),
            magnitude: self.magnitude * s.abs(),
        }
    }
    fn norm(self) -> F {
        self.value.norm()
    }
    fn magnitude(self) -> F {
        self.magnitude
    }
}

impl<F: Real> QuadValue<F> for C<F> {
    fn zero() -> Self {
        C::new(F::zero(), F::zero())
    }
    fn scale(self, s: F) -> Self {
        C::new(self.re * s, self.im * s)
    }
    fn norm(self) -> F {
        C::norm(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub angular_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            max_subdivisions: 400,
            angular_nodes: 16,
        }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, max_subdivisions: usize, angular_nodes: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {rel_tol}"
            )));
        }
        if max_subdivisions == 0 || angular_nodes < 2 {
            return Err(Error::InvalidInput(
                "need at least one subdivision and two angular nodes".into(),
            ));
        }
        Ok(QuadratureConfig {
            rel_tol,
            max_subdivisions,
            angular_nodes,
        })
    }

    pub fn with_tolerance(self, rel_tol: f64) -> Result<Self> {
        QuadratureConfig::new(rel_tol, self.max_subdivisions, self.angular_nodes)
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel<F, V> {
    a: F,
    b: F,
    value: V,
    error: F,
    abs: F,
}

fn kronrod_panel<F: Real, V: QuadValue<F>>(f: &mut impl FnMut(F) -> Result<V>, a: F, b: F) -> Result<Panel<F, V>> {
    let half = (b - a) * F::lit(0.5);
    let center = (a + b) * F::lit(0.5);
    let fc = f(center)?;
    let mut kronrod = fc.scale(F::lit(WGK[7]));
    let mut gauss = fc.scale(F::lit(WG[3]));
    let mut abs = fc.magnitude() * F::lit(WGK[7]);
    for j in 0..7 {
        let dx = half * F::lit(XGK[j]);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        let pair = f1 + f2;
        kronrod = kronrod + pair.scale(F::lit(WGK[j]));
        abs = abs + (f1.magnitude() + f2.magnitude()) * F::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair.scale(F::lit(WG[j / 2]));
        }
    }
    let value = kronrod.scale(half);
    let diff = value + gauss.scale(-half);
    let error = diff.norm();
    if !(error.is_finite() && value.norm().is_finite()) {
        return Err(Error::QuadratureNonconvergence(format!(
            "non-finite integrand on [{:e}, {:e}]",
            a.to_f64().unwrap_or(f64::NAN),
            b.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        abs: abs * half.abs(),
    })
}

/// Globally adaptive integral over `[breaks[0], breaks[last]]`, starting with
/// one panel per consecutive pair of break points. Terminates once the summed
/// error estimate falls below `rel_tol` times the integral of `|f|`.
pub fn integrate<F: Real, V: QuadValue<F>>(
    mut f: impl FnMut(F) -> Result<V>,
    breaks: &[F],
    cfg: &QuadratureConfig,
) -> Result<V> {
    let tol = F::lit(cfg.rel_tol);
    let mut panels = breaks
        .windows(2)
        .map(|w| kronrod_panel(&mut f, w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    loop {
        let error = panels.iter().fold(F::zero(), |acc, p| acc + p.error);
        let abs = panels.iter().fold(F::zero(), |acc, p| acc + p.abs);
        if error <= tol * abs || abs == F::zero() {
            break;
        }
        if panels.len() >= cfg.max_subdivisions {
            return Err(Error::QuadratureNonconvergence(format!(
                "{} panels, error estimate {:e} above target {:e}",
                panels.len(),
                error.to_f64().unwrap_or(f64::NAN),
                (tol * abs).to_f64().unwrap_or(f64::NAN)
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).expect("finite errors"))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) * F::lit(0.5);
        panels.push(kronrod_panel(&mut f, p.a, mid)?);
        panels.push(kronrod_panel(&mut f, mid, p.b)?);
    }
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).expect("finite endpoints"));
    let values: Vec<V> = panels.iter().map(|p| p.value).collect();
    Ok(pairwise_sum(&values, V::zero()))
}

const MAX_ANGULAR_DOUBLINGS: u32 = 12;

/// `(1/2pi) * integral_0^{2pi} f(gamma) dgamma` by the periodic trapezoid
/// rule, doubling the node count until two levels agree to `rel_tol` times
/// the mean of `|f|`.
pub fn angular_mean<F: Real, V: QuadValue<F>>(f: impl FnMut(F) -> Result<V>, cfg: &QuadratureConfig) -> Result<V> {
    angular_mean_with_magnitude(f, cfg, F::zero()).map(|r| r.value)
}

/// As [`angular_mean`], also returning the mean of `|f|`. The error target
/// is `rel_tol * max(mean |f|, floor)`; a positive `floor` stops circles
/// that graze the support of `f` from demanding unbounded refinement.
pub fn angular_mean_with_magnitude<F: Real, V: QuadValue<F>>(
    mut f: impl FnMut(F) -> Result<V>,
    cfg: &QuadratureConfig,
    floor: F,
) -> Result<WithMagnitude<V, F>> {
    let tol = F::lit(cfg.rel_tol);
    let tau = F::TAU();
    let mut n = cfg.angular_nodes;
    let mut values = (0..n)
        .map(|j| f(tau * F::from_usize(j).unwrap() / F::from_usize(n).unwrap()))
        .collect::<Result<Vec<V>>>()?;
    let mean = |vals: &[V], n: usize| pairwise_sum(vals, V::zero()).scale(F::one() / F::from_usize(n).unwrap());
    let mut current = mean(&values, n);
    for _ in 0..MAX_ANGULAR_DOUBLINGS {
        for j in 0..n {
            let gamma = tau * (F::from_usize(2 * j + 1).unwrap() / F::from_usize(2 * n).unwrap());
            values.push(f(gamma)?);
        }
        n *= 2;
        let refined = mean(&values, n);
        let scale = values.iter().fold(F::zero(), |acc, v| acc + v.norm()) / F::from_usize(n).unwrap();
        if (refined + current.scale(-F::one())).norm() <= tol * scale.max(floor) || scale == F::zero() {
            return Ok(WithMagnitude {
                value: refined,
                magnitude: scale,
            });
        }
        current = refined;
    }
    Err(Error::QuadratureNonconvergence(format!(
        "angular trapezoid not converged with {n} nodes"
    )))
}
