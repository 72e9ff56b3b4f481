use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic_index::kappa;
use crate::error::Result;
use crate::exact_arith::lefschetz_point_sum_float;
use crate::heat_galerkin::equivariant_block_index;
use crate::orbifold_model::ExampleFamilySpec;
use crate::scalar::{int, rational_string, Rational};
use crate::topological_index::{hrr_term, mu_bruteforce, mu_closed};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub l_range: RangeInclusive<u64>,
    pub m_range: RangeInclusive<u64>,
    /// Truncation level for the Galerkin block index column; omitted when `None`.
    pub k: Option<i64>,
    /// Bound on `|mu_float - mu_closed|` for the floating-point cross-check.
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub l: u64,
    pub m: u64,
    pub kappa: u64,
    #[serde(with = "rational_string")]
    pub hrr: Rational,
    #[serde(with = "rational_string")]
    pub mu_closed: Rational,
    #[serde(with = "rational_string")]
    pub mu_bruteforce: Rational,
    pub mu_float_error: f64,
    #[serde(with = "rational_string")]
    pub total: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_index: Option<i64>,
    pub agree: bool,
}

fn sweep_cell(l: u64, m: u64, config: &SweepConfig) -> Result<SweepRow> {
    let spec = ExampleFamilySpec::new(l, m)?;
    let hrr = hrr_term(spec);
    let closed = mu_closed(spec);
    let brute = mu_bruteforce(spec)?;
    let float = lefschetz_point_sum_float(l, 1, (m % l) as i64)?;
    let exact_f64: f64 = crate::scalar::Scalar::from_rational(&closed);
    let mu_float_error = (float - exact_f64).norm();
    let total = hrr.clone() + int(2) * brute.clone();
    let kappa = kappa(spec);
    let block_index = config.k.map(|k| equivariant_block_index(l, m, k)).transpose()?;
    let agree = total == int(kappa as i64)
        && closed == brute
        && mu_float_error < config.tolerance
        && block_index.is_none_or(|b| b == kappa as i64);
    Ok(SweepRow {
        l,
        m,
        kappa,
        hrr,
        mu_closed: closed,
        mu_bruteforce: brute,
        mu_float_error,
        total,
        block_index,
        agree,
    })
}

/// One row per `(l, m)`, l-major and m-minor, computed in parallel.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let cells: Vec<(u64, u64)> = config
        .l_range
        .clone()
        .flat_map(|l| config.m_range.clone().map(move |m| (l, m)))
        .collect();
    cells.par_iter().map(|&(l, m)| sweep_cell(l, m, config)).collect()
}

pub fn sweep_csv(rows: &[SweepRow], with_block: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "l",
        "m",
        "kappa",
        "hrr",
        "mu_closed",
        "mu_bruteforce",
        "mu_float_error",
        "total",
    ];
    if with_block {
        header.push("block_index");
    }
    header.push("agree");
    w.write_record(&header)?;
    for r in rows {
        let mut record = vec![
            r.l.to_string(),
            r.m.to_string(),
            r.kappa.to_string(),
            r.hrr.to_string(),
            r.mu_closed.to_string(),
            r.mu_bruteforce.to_string(),
            format!("{:e}", r.mu_float_error),
            r.total.to_string(),
        ];
        if with_block {
            record.push(r.block_index.map(|b| b.to_string()).unwrap_or_default());
        }
        record.push(r.agree.to_string());
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
