//! Exact Galerkin model of the Dolbeault operator on `O(d) -> CP^1` with the
//! Fubini-Study metric, plus its heat supertrace.
//!
//! Sections are spanned by `v_{a,b} = z^a zbar^b (1+|z|^2)^{-K}` and
//! (0,1)-forms by `w_{alpha,beta} = z^alpha zbar^beta (1+|z|^2)^{-(K+1)} dzbar`.
//! Gram entries carry a common factor of pi which is dropped throughout.

mod rank;
mod sparse;
mod spectrum;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

pub use rank::rank_exact;
pub use sparse::SparseMatrix;
pub use spectrum::{spectrum, supertrace, write_singular_values_csv, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockLabel {
    pub l: u64,
    pub block: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GalerkinProblem {
    d: i64,
    k: i64,
    equivariance: Option<BlockLabel>,
}

impl GalerkinProblem {
    pub fn new(d: i64, k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidInput(format!("truncation level K must be >= 1, got {k}")));
        }
        if d + k < 0 {
            return Err(Error::InvalidInput(format!(
                "d + K must be >= 0 for a nonempty basis, got d = {d}, K = {k}"
            )));
        }
        Ok(GalerkinProblem {
            d,
            k,
            equivariance: None,
        })
    }

    /// Restricts to the `Z_l` weight block `block`, with `z -> e^{2 pi i / l} z`.
    pub fn with_block(self, l: u64, block: u64) -> Result<Self> {
        if l < 2 || block >= l {
            return Err(Error::InvalidInput(format!(
                "need l >= 2 and 0 <= block < l, got l = {l}, block = {block}"
            )));
        }
        Ok(GalerkinProblem {
            equivariance: Some(BlockLabel { l, block }),
            ..self
        })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn block(&self) -> Option<BlockLabel> {
        self.equivariance
    }

    fn unrestricted(&self) -> Self {
        GalerkinProblem {
            equivariance: None,
            ..*self
        }
    }

    /// The exponent of `(1+|z|^2)^{-1}` in every Gram integrand.
    fn moment_exponent(&self) -> i64 {
        2 * self.k + self.d + 2
    }

    fn in_block(&self, weight: i64) -> bool {
        match self.equivariance {
            None => true,
            Some(BlockLabel { l, block }) => weight.rem_euclid(l as i64) == block as i64,
        }
    }

    pub fn v_basis(&self) -> Vec<BasisElementV> {
        let mut out = Vec::new();
        for a in 0..=self.d + self.k {
            for b in 0..=self.k {
                let v = BasisElementV { a, b };
                if self.in_block(v.weight()) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn w_basis(&self) -> Vec<BasisElementW> {
        let mut out = Vec::new();
        for alpha in 0..=self.d + self.k + 1 {
            for beta in 0..self.k {
                let w = BasisElementW { alpha, beta };
                if self.in_block(w.weight()) {
                    out.push(w);
                }
            }
        }
        out
    }

    fn w_index(&self, alpha: i64, beta: i64) -> Option<usize> {
        let in_range = (0..=self.d + self.k + 1).contains(&alpha) && (0..self.k).contains(&beta);
        in_range.then(|| (alpha * self.k + beta) as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisElementV {
    pub a: i64,
    pub b: i64,
}

impl BasisElementV {
    pub fn weight(&self) -> i64 {
        self.a - self.b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisElementW {
    pub alpha: i64,
    pub beta: i64,
}

impl BasisElementW {
    /// Shifted by one so that dbar, which multiplies by `dzbar`, keeps labels fixed.
    pub fn weight(&self) -> i64 {
        self.alpha - self.beta - 1
    }
}

/// `I(p, s) = p! (s-p-2)! / (s-1)!`, the normalized integral of
/// `|z|^{2p} (1+|z|^2)^{-s}` over the plane.
pub fn moment(p: i64, s: i64) -> Rational {
    assert!(p >= 0 && s >= p + 2, "moment I({p}, {s}) diverges");
    let fact = |n: i64| (1..=n).fold(BigInt::one(), |acc, k| acc * k);
    Rational::new(fact(p) * fact(s - p - 2), fact(s - 1))
}

fn dbar_unrestricted<T: Scalar>(p: &GalerkinProblem) -> SparseMatrix<T> {
    let v = p.v_basis();
    let dim_w = ((p.d + p.k + 2) * p.k) as usize;
    let mut d = SparseMatrix::new(dim_w, v.len());
    for (col, &BasisElementV { a, b }) in v.iter().enumerate() {
        for (alpha, beta, coeff) in [(a, b - 1, b), (a + 1, b, b - p.k)] {
            if coeff == 0 {
                continue;
            }
            let row = p
                .w_index(alpha, beta)
                .expect("nonzero dbar coefficient leaves the (0,1) basis");
            d.add(row, col, T::from_int(coeff));
        }
    }
    d
}

/// Checks that every nonzero entry joins equal labels mod `l`.
fn check_blocks<T: Scalar>(d: &SparseMatrix<T>, row_labels: &[i64], col_labels: &[i64], l: u64) -> Result<()> {
    for (row, col, _) in d.iter() {
        let (rl, cl) = (row_labels[row], col_labels[col]);
        if (rl - cl).rem_euclid(l as i64) != 0 {
            return Err(Error::BlockLeak {
                row,
                col,
                row_label: rl,
                col_label: cl,
                l,
            });
        }
    }
    Ok(())
}

/// Matrix of dbar from the section basis (columns) to the (0,1) basis (rows).
pub fn build_dbar_matrix<T: Scalar>(p: &GalerkinProblem) -> Result<SparseMatrix<T>> {
    let full_problem = p.unrestricted();
    let full = dbar_unrestricted::<T>(&full_problem);
    let Some(BlockLabel { l, .. }) = p.equivariance else {
        return Ok(full);
    };
    let v_all = full_problem.v_basis();
    let w_all = full_problem.w_basis();
    let col_labels: Vec<i64> = v_all.iter().map(BasisElementV::weight).collect();
    let row_labels: Vec<i64> = w_all.iter().map(BasisElementW::weight).collect();
    check_blocks(&full, &row_labels, &col_labels, l)?;
    let rows: Vec<usize> = (0..w_all.len()).filter(|&i| p.in_block(row_labels[i])).collect();
    let cols: Vec<usize> = (0..v_all.len()).filter(|&j| p.in_block(col_labels[j])).collect();
    Ok(full.submatrix(&rows, &cols))
}

fn gram<T: Scalar, B: Copy>(
    basis: &[B],
    s: i64,
    weight: impl Fn(B) -> i64,
    power: impl Fn(B, B) -> i64,
) -> SparseMatrix<T> {
    let mut g = SparseMatrix::new(basis.len(), basis.len());
    for (i, &x) in basis.iter().enumerate() {
        for (j, &y) in basis.iter().enumerate() {
            if weight(x) == weight(y) {
                g.add(i, j, T::from_rational(&moment(power(x, y), s)));
            }
        }
    }
    g
}

/// `(G_V, G_W)`, the L^2 Gram matrices of the two bases.
pub fn gram_matrices<T: Scalar>(p: &GalerkinProblem) -> (SparseMatrix<T>, SparseMatrix<T>) {
    let s = p.moment_exponent();
    let gv = gram(&p.v_basis(), s, |v: BasisElementV| v.weight(), |x, y| x.a + y.b);
    let gw = gram(&p.w_basis(), s, |w: BasisElementW| w.weight(), |x, y| x.alpha + y.beta);
    (gv, gw)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupertraceSample {
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub d: i64,
    #[serde(rename = "K")]
    pub k: i64,
    pub dim_v: usize,
    pub dim_w: usize,
    pub ker_dim: usize,
    pub coker_dim: usize,
    pub index_exact: i64,
    pub supertrace_samples: Vec<SupertraceSample>,
    pub block_label: Option<BlockLabel>,
}

impl SpectralReport {
    pub fn max_deviation(&self) -> f64 {
        self.supertrace_samples
            .iter()
            .map(|s| (s.value - self.index_exact as f64).abs())
            .fold(0.0, f64::max)
    }
}

pub fn exact_index(p: &GalerkinProblem) -> Result<SpectralReport> {
    let d = build_dbar_matrix::<Rational>(p)?;
    let rank = rank_exact(&d);
    let (dim_v, dim_w) = (d.cols(), d.rows());
    let ker_dim = dim_v - rank;
    let coker_dim = dim_w - rank;
    Ok(SpectralReport {
        d: p.d,
        k: p.k,
        dim_v,
        dim_w,
        ker_dim,
        coker_dim,
        index_exact: ker_dim as i64 - coker_dim as i64,
        supertrace_samples: Vec::new(),
        block_label: p.equivariance,
    })
}

/// Index of the block of `O(2m)` singled out by `Z_l` weight `m`.
pub fn equivariant_block_index(l: u64, m: u64, k: i64) -> Result<i64> {
    let p = GalerkinProblem::new(2 * m as i64, k)?.with_block(l, m % l)?;
    Ok(exact_index(&p)?.index_exact)
}

/// Coordinates of the holomorphic section `z^a` in the section basis, via
/// `z^a = z^a (1+|z|^2)^K (1+|z|^2)^{-K}` expanded binomially.
pub fn holomorphic_section(p: &GalerkinProblem, a: i64) -> Result<Vec<Rational>> {
    if p.equivariance.is_some() || !(0..=p.d).contains(&a) {
        return Err(Error::InvalidInput(format!(
            "z^{a} is not a global holomorphic section of O({})",
            p.d
        )));
    }
    let basis = p.v_basis();
    let mut coords = vec![Rational::zero(); basis.len()];
    let mut binom = BigInt::one();
    for j in 0..=p.k {
        let idx = basis
            .iter()
            .position(|v| v.a == a + j && v.b == j)
            .expect("binomial term lies in the basis");
        coords[idx] = Rational::from_integer(binom.clone());
        binom = binom * (p.k - j) / (j + 1);
    }
    Ok(coords)
}
