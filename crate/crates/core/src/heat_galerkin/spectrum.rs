//! Floating-point spectra of the two Laplacians `D^* D` and `D D^*`.

use std::io::Write;

use nalgebra::{DMatrix, RealField};
use num_traits::Float;

use super::{
    build_dbar_matrix, exact_index, gram_matrices, GalerkinProblem, SparseMatrix, SpectralReport, SupertraceSample,
};
use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Real};

fn dense<F: Real + RealField>(m: &SparseMatrix<F>) -> DMatrix<F> {
    let mut out = DMatrix::zeros(m.rows(), m.cols());
    for (r, c, &v) in m.iter() {
        out[(r, c)] = v;
    }
    out
}

/// Eigenvalues, ascending, of the Laplacians on sections (`plus`) and on
/// (0,1)-forms (`minus`), both taken in orthonormalized coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<F> {
    pub plus: Vec<F>,
    pub minus: Vec<F>,
}

fn sorted_eigenvalues<F: Real + RealField>(m: DMatrix<F>) -> Vec<F> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut ev: Vec<F> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

pub fn spectrum<F: Real + RealField>(p: &GalerkinProblem) -> Result<Spectrum<F>> {
    let d = dense(&build_dbar_matrix::<F>(p)?);
    let (gv, gw) = gram_matrices::<F>(p);
    let (dim_w, dim_v) = d.shape();
    let lv = dense(&gv).cholesky().ok_or(Error::Cholesky("section"))?.unpack();
    let lw = if dim_w == 0 {
        DMatrix::zeros(0, 0)
    } else {
        dense(&gw).cholesky().ok_or(Error::Cholesky("(0,1)-form"))?.unpack()
    };
    // In coordinates y = L_V^T x and z = L_W^T w the operator is L_W^T D L_V^{-T}.
    let dt = d.transpose();
    let x = lv.solve_lower_triangular(&dt).ok_or(Error::Cholesky("section"))?;
    let orthonormal = lw.transpose() * x.transpose();
    debug_assert_eq!(orthonormal.shape(), (dim_w, dim_v));
    let plus = sorted_eigenvalues(orthonormal.transpose() * &orthonormal);
    let minus = sorted_eigenvalues(&orthonormal * orthonormal.transpose());
    Ok(Spectrum { plus, minus })
}

impl<F: Real + RealField> Spectrum<F> {
    fn heat_trace(ev: &[F], t: F) -> F {
        let terms: Vec<F> = ev.iter().map(|&l| Float::exp(-t * Float::max(l, F::zero()))).collect();
        pairwise_sum(&terms, F::zero())
    }

    /// `Tr e^{-t D^*D} - Tr e^{-t DD^*}`.
    pub fn supertrace(&self, t: F) -> F {
        Self::heat_trace(&self.plus, t) - Self::heat_trace(&self.minus, t)
    }

    fn largest(&self) -> F {
        self.plus.iter().chain(&self.minus).copied().fold(F::zero(), Float::max)
    }

    /// Largest relative mismatch between the top `rank` eigenvalues of the two
    /// Laplacians, which must pair off exactly in exact arithmetic.
    pub fn pairing_defect(&self, rank: usize) -> F {
        let top = |ev: &[F]| ev[ev.len() - rank..].to_vec();
        let scale = Float::max(self.largest(), F::min_positive_value());
        top(&self.plus)
            .iter()
            .zip(top(&self.minus))
            .map(|(&a, b)| Float::abs(a - b) / scale)
            .fold(F::zero(), Float::max)
    }

    /// Number of eigenvalues on each side below `rel_tol` times the largest one.
    pub fn zero_modes(&self, rel_tol: F) -> (usize, usize) {
        let cut = rel_tol * self.largest();
        let count = |ev: &[F]| ev.iter().filter(|&&l| l <= cut).count();
        (count(&self.plus), count(&self.minus))
    }

    /// Singular values of the orthonormalized operator, descending.
    pub fn singular_values(&self) -> Vec<F> {
        let side = if self.plus.len() <= self.minus.len() {
            &self.plus
        } else {
            &self.minus
        };
        side.iter()
            .rev()
            .map(|&l| Float::sqrt(Float::max(l, F::zero())))
            .collect()
    }
}

/// Exact report with supertrace samples at each `t`.
pub fn supertrace(p: &GalerkinProblem, t_values: &[f64]) -> Result<SpectralReport> {
    if let Some(t) = t_values.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput(format!("heat time must be positive, got {t}")));
    }
    let mut report = exact_index(p)?;
    let spec = spectrum::<f64>(p)?;
    report.supertrace_samples = t_values
        .iter()
        .map(|&t| SupertraceSample {
            t,
            value: spec.supertrace(t),
        })
        .collect();
    Ok(report)
}

pub fn write_singular_values_csv<F: Real + RealField, W: Write>(spec: &Spectrum<F>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "sigma"])?;
    for (i, s) in spec.singular_values().iter().enumerate() {
        w.write_record([i.to_string(), format!("{:e}", s.to_f64().unwrap_or(f64::NAN))])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat_galerkin::rank_exact;
    use crate::scalar::Rational;

    const TIMES: [f64; 3] = [0.05, 0.5, 5.0];

    fn problem(d: i64, k: i64) -> GalerkinProblem {
        GalerkinProblem::new(d, k).unwrap()
    }

    #[test]
    fn small_problems() {
        let r = supertrace(&problem(0, 1), &[0.1, 1.0, 10.0]).unwrap();
        assert!(r.max_deviation() < 1e-10, "{r:?}");
        assert_eq!(r.index_exact, 1);
        let r = supertrace(&problem(-1, 2), &[1.0]).unwrap();
        assert!(r.max_deviation() < 1e-10);
        assert_eq!(r.index_exact, 0);
        assert!(supertrace(&problem(0, 1), &[0.0]).is_err());
    }

    #[test]
    fn mckean_singer_on_the_grid() {
        for d in -4..=8 {
            for k in 1.max(-d)..=6 {
                let r = supertrace(&problem(d, k), &TIMES).unwrap();
                assert!(r.max_deviation() < 1e-8, "d={d} K={k}: {:?}", r.supertrace_samples);
            }
        }
    }

    #[test]
    fn large_time_leaves_zero_modes() {
        let p = problem(3, 4);
        let spec = spectrum::<f64>(&p).unwrap();
        let exact = exact_index(&p).unwrap();
        assert_eq!(spec.zero_modes(1e-10), (exact.ker_dim, exact.coker_dim));
        assert!((spec.supertrace(1e3) - exact.index_exact as f64).abs() < 1e-9);
    }

    #[test]
    fn nonzero_modes_pair_off() {
        for (d, k) in [(0, 1), (2, 3), (-2, 4), (6, 5)] {
            let p = problem(d, k);
            let rank = rank_exact(&build_dbar_matrix::<Rational>(&p).unwrap());
            let spec = spectrum::<f64>(&p).unwrap();
            assert!(spec.pairing_defect(rank) < 1e-10, "d={d} K={k}");
            assert_eq!(spec.singular_values().len(), spec.plus.len().min(spec.minus.len()));
        }
    }

    #[test]
    fn equivariant_blocks_have_consistent_spectra() {
        let p = problem(4, 3).with_block(2, 0).unwrap();
        let r = supertrace(&p, &TIMES).unwrap();
        assert_eq!(r.index_exact, 3);
        assert!(r.max_deviation() < 1e-8);
    }

    #[test]
    fn single_precision() {
        let spec = spectrum::<f32>(&problem(2, 2)).unwrap();
        assert!((spec.supertrace(0.5) - 3.0).abs() < 1e-3);
    }

    #[test]
    fn singular_value_csv() {
        let spec = spectrum::<f64>(&problem(0, 1)).unwrap();
        let mut buf = Vec::new();
        write_singular_values_csv(&spec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,sigma\n0,"));
        assert_eq!(text.lines().count(), 1 + spec.singular_values().len());
    }
}
