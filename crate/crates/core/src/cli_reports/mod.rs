//! Command-line front end: argument parsing, report rendering and exit codes.

mod sweep;

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber_measure::{
    lambda_m, standard_axioms_check, Cutoff, FiberMeasureParams, ProjectorReport, QuadratureConfig,
};
use crate::heat_galerkin::{spectrum, supertrace, write_singular_values_csv, GalerkinProblem, SpectralReport};
use crate::orbifold_model::{ExampleFamilySpec, IndexReport, KawasakiCurveSpec};
use crate::topological_index::{kawasaki_index, verify_identity, KawasakiTotal};

pub use sweep::{run_sweep, sweep_csv, SweepConfig, SweepRow};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_DIVERGENCE: u8 = 4;

pub const THREADS_ENV: &str = "CSTAR_INDEX_THREADS";

const DEFAULT_SWEEP_TOLERANCE: f64 = 1e-10;
const DEFAULT_HEAT_TOLERANCE: f64 = 1e-8;
const AXIOM_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CutoffArg {
    Smooth,
    Hard,
}

impl From<CutoffArg> for Cutoff {
    fn from(c: CutoffArg) -> Self {
        match c {
            CutoffArg::Smooth => Cutoff::SmoothBump,
            CutoffArg::Hard => Cutoff::HardStep,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cstar-index",
    version,
    about = "Exact m-index calculator for C*-actions on orbifold curves"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Floating-point tolerance: cross-check bound for `sweep`, supertrace
    /// deviation bound for `heat`, quadrature relative tolerance for `measure`.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare kappa(l, m) with the smooth term plus fixed-point contributions.
    Verify {
        #[arg(long)]
        l: u64,
        #[arg(long)]
        m: u64,
    },
    /// Tabulate the identity over an (l, m) grid.
    Sweep {
        /// Inclusive range `lo:hi` (or a single value).
        #[arg(long, value_parser = parse_range)]
        l: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        m: RangeInclusive<u64>,
        /// Also compute the Galerkin block index at this truncation level.
        #[arg(long = "K")]
        k: Option<i64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Evaluate a curve specification file exactly.
    Kawasaki { spec_file: PathBuf },
    /// Exact index and heat supertrace of the Galerkin Dolbeault operator.
    Heat {
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        #[arg(long = "K")]
        k: i64,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, requires = "m")]
        l: Option<u64>,
        #[arg(long, requires = "l")]
        m: Option<u64>,
        /// Write the singular values of the orthonormalized operator here.
        #[arg(long)]
        singular_values: Option<PathBuf>,
    },
    /// Fiber measure normalization and projector axiom defects.
    Measure {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value_t = CutoffArg::Smooth)]
        cutoff: CutoffArg,
    },
}

pub fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u64>, String> {
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad bound {t:?}: {e}"));
    match s.split_once(':') {
        Some((lo, hi)) => Ok(parse(lo)?..=parse(hi)?),
        None => {
            let v = parse(s)?;
            Ok(v..=v)
        }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::Schema { .. } | Error::Json(_) => EXIT_USAGE,
        Error::Io { .. } => EXIT_IO,
        Error::DivergenceDetected { .. } => EXIT_DIVERGENCE,
        _ => EXIT_FAILED,
    }
}

/// Thread count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidInput(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn check_tolerance(tol: f64) -> Result<f64> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")))
    }
}

/// Text written to stdout plus the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let tolerance = cli.tolerance.map(check_tolerance).transpose()?;
    match &cli.command {
        Command::Verify { l, m } => cmd_verify(*l, *m, cli.format),
        Command::Sweep { l, m, k, output } => {
            let config = SweepConfig {
                l_range: l.clone(),
                m_range: m.clone(),
                k: *k,
                tolerance: tolerance.unwrap_or(DEFAULT_SWEEP_TOLERANCE),
            };
            cmd_sweep(&config, output.as_deref(), cli.format)
        }
        Command::Kawasaki { spec_file } => cmd_kawasaki(spec_file, cli.format),
        Command::Heat {
            d,
            k,
            t,
            l,
            m,
            singular_values,
        } => {
            let block = l.zip(*m);
            let tol = tolerance.unwrap_or(DEFAULT_HEAT_TOLERANCE);
            cmd_heat(*d, *k, t, block, singular_values.as_deref(), tol, cli.format)
        }
        Command::Measure { a, m, cutoff } => {
            let quad = match tolerance {
                Some(t) => QuadratureConfig::default().with_tolerance(t)?,
                None => QuadratureConfig::default(),
            };
            cmd_measure(*a, *m, (*cutoff).into(), &quad, cli.format)
        }
    }
}

pub fn cmd_verify(l: u64, m: u64, format: Format) -> Result<Outcome> {
    let report = verify_identity(ExampleFamilySpec::new(l, m)?)?;
    let stdout = match format {
        Format::Json => json(&report),
        Format::Text => verify_text(&report),
        Format::Csv => verify_csv(&report)?,
    };
    Ok(Outcome {
        stdout,
        code: if report.agree { EXIT_OK } else { EXIT_FAILED },
    })
}

fn verify_text(r: &IndexReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "l = {}, m = {}", r.l, r.m);
    let _ = writeln!(s, "analytic index: {}", r.analytic_index);
    let _ = writeln!(s, "smooth term: {}", r.topological_smooth);
    for p in &r.topological_points {
        let pt = p.point;
        let _ = writeln!(
            s,
            "fixed point (N={}, a={}, b={}): {}",
            pt.isotropy_order(),
            pt.normal_weight(),
            pt.bundle_weight(),
            p.contribution
        );
    }
    let _ = writeln!(s, "topological total: {}", r.topological_total);
    let _ = writeln!(s, "agree: {}", r.agree);
    s
}

fn verify_csv(r: &IndexReport) -> Result<String> {
    let points: Vec<String> = r
        .topological_points
        .iter()
        .map(|p| p.contribution.to_string())
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["l", "m", "analytic_index", "smooth", "points", "total", "agree"])?;
    w.write_record([
        r.l.to_string(),
        r.m.to_string(),
        r.analytic_index.to_string(),
        r.topological_smooth.to_string(),
        points.join(";"),
        r.topological_total.to_string(),
        r.agree.to_string(),
    ])?;
    csv_string(w)
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn cmd_sweep(config: &SweepConfig, output: Option<&Path>, format: Format) -> Result<Outcome> {
    check_tolerance(config.tolerance)?;
    let rows = run_sweep(config)?;
    let table = match format {
        Format::Json => json(&rows),
        Format::Text | Format::Csv => sweep_csv(&rows, config.k.is_some())?,
    };
    let code = if rows.iter().all(|r| r.agree) {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    match output {
        Some(path) => {
            write_file(path, &table)?;
            let stdout = format!("wrote {} rows to {}\n", rows.len(), path.display());
            Ok(Outcome { stdout, code })
        }
        None => Ok(Outcome { stdout: table, code }),
    }
}

pub fn cmd_kawasaki(spec_file: &Path, format: Format) -> Result<Outcome> {
    let text = fs::read_to_string(spec_file).map_err(|source| Error::Io {
        path: spec_file.to_path_buf(),
        source,
    })?;
    let spec = KawasakiCurveSpec::from_json(&text)?;
    let total = kawasaki_index(&spec)?;
    let stdout = match format {
        Format::Json => json(&KawasakiJson {
            smooth_term: spec.smooth_term.to_string(),
            result: &total,
        }),
        Format::Text => kawasaki_text(&spec, &total),
        Format::Csv => kawasaki_csv(&spec, &total)?,
    };
    Ok(Outcome {
        stdout,
        code: if total.is_integer { EXIT_OK } else { EXIT_FAILED },
    })
}

#[derive(Serialize)]
struct KawasakiJson<'a> {
    smooth_term: String,
    #[serde(flatten)]
    result: &'a KawasakiTotal,
}

fn integrality(total: &KawasakiTotal) -> &'static str {
    if total.is_integer {
        "integer"
    } else {
        "non-integer"
    }
}

fn kawasaki_text(spec: &KawasakiCurveSpec, total: &KawasakiTotal) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} ({})", total.total, integrality(total));
    let _ = writeln!(s, "smooth term: {}", spec.smooth_term);
    for (i, c) in total.contributions.iter().enumerate() {
        let p = c.point;
        let _ = writeln!(
            s,
            "point {i} (N={}, a={}, b={}): {}",
            p.isotropy_order(),
            p.normal_weight(),
            p.bundle_weight(),
            c.contribution
        );
    }
    s
}

fn kawasaki_csv(spec: &KawasakiCurveSpec, total: &KawasakiTotal) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["term", "N", "a", "b", "value"])?;
    w.write_record(["smooth", "", "", "", &spec.smooth_term.to_string()])?;
    for c in &total.contributions {
        let p = c.point;
        w.write_record([
            "point".to_string(),
            p.isotropy_order().to_string(),
            p.normal_weight().to_string(),
            p.bundle_weight().to_string(),
            c.contribution.to_string(),
        ])?;
    }
    w.write_record(["total", "", "", "", &total.total.to_string()])?;
    csv_string(w)
}

#[derive(Serialize)]
struct HeatJson<'a> {
    #[serde(flatten)]
    report: &'a SpectralReport,
    max_deviation: f64,
    tolerance: f64,
}

pub fn cmd_heat(
    d: i64,
    k: i64,
    t: &[f64],
    block: Option<(u64, u64)>,
    singular_values: Option<&Path>,
    tolerance: f64,
    format: Format,
) -> Result<Outcome> {
    let mut problem = GalerkinProblem::new(d, k)?;
    if let Some((l, m)) = block {
        if l < 2 {
            return Err(Error::InvalidInput(format!("l must be >= 2, got {l}")));
        }
        problem = problem.with_block(l, m % l)?;
    }
    let report = supertrace(&problem, t)?;
    if let Some(path) = singular_values {
        let spec = spectrum::<f64>(&problem)?;
        let mut buf = Vec::new();
        write_singular_values_csv(&spec, &mut buf)?;
        write_file(path, &String::from_utf8(buf).expect("csv output is UTF-8"))?;
    }
    let max_deviation = report.max_deviation();
    let stdout = match format {
        Format::Json => json(&HeatJson {
            report: &report,
            max_deviation,
            tolerance,
        }),
        Format::Text => heat_text(&report, tolerance),
        Format::Csv => heat_csv(&report)?,
    };
    let code = if max_deviation < tolerance {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    Ok(Outcome { stdout, code })
}

fn heat_text(r: &SpectralReport, tolerance: f64) -> String {
    let mut s = String::new();
    let _ = write!(s, "d = {}, K = {}", r.d, r.k);
    if let Some(b) = r.block_label {
        let _ = write!(s, ", Z_{} block {}", b.l, b.block);
    }
    s.push('\n');
    let _ = writeln!(s, "dim V = {}, dim W = {}", r.dim_v, r.dim_w);
    let _ = writeln!(s, "ker = {}, coker = {}", r.ker_dim, r.coker_dim);
    let label = if r.block_label.is_some() {
        "block index"
    } else {
        "index"
    };
    let _ = writeln!(s, "{label} = {}", r.index_exact);
    for sample in &r.supertrace_samples {
        let dev = (sample.value - r.index_exact as f64).abs();
        let _ = writeln!(
            s,
            "t = {}: supertrace = {:.12} (deviation {:e})",
            sample.t, sample.value, dev
        );
    }
    let _ = writeln!(s, "max deviation: {:e} (tolerance {:e})", r.max_deviation(), tolerance);
    s
}

fn heat_csv(r: &SpectralReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "supertrace", "deviation", "index_exact"])?;
    for sample in &r.supertrace_samples {
        w.write_record([
            sample.t.to_string(),
            format!("{:e}", sample.value),
            format!("{:e}", (sample.value - r.index_exact as f64).abs()),
            r.index_exact.to_string(),
        ])?;
    }
    csv_string(w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub cutoff: Cutoff,
    #[serde(flatten)]
    pub axioms: ProjectorReport,
}

impl MeasureReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let r = &self.axioms;
        vec![
            (
                "cutoff",
                serde_json::to_value(self.cutoff)
                    .expect("cutoff serializes")
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
            ),
            ("a", r.a.to_string()),
            ("m", r.m.to_string()),
            ("lambda_m", format!("{:.15e}", r.lambda_m)),
            ("unity_defect", format!("{:e}", r.unity_defect)),
            ("orbit_mass_defect", format!("{:e}", r.orbit_mass_defect)),
            (
                "monomial_resolution_defect",
                format!("{:e}", r.monomial_resolution_defect),
            ),
            ("idempotency_defect", format!("{:e}", r.idempotency_defect)),
            ("equivariance_defect", format!("{:e}", r.equivariance_defect)),
            ("rel_tol", format!("{:e}", r.rel_tol)),
            ("angular_nodes", r.angular_nodes.to_string()),
        ]
    }

    fn worst_defect(&self) -> f64 {
        let r = &self.axioms;
        [
            r.unity_defect,
            r.orbit_mass_defect,
            r.monomial_resolution_defect,
            r.idempotency_defect,
            r.equivariance_defect,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn measure_report(a: f64, m: u32, cutoff: Cutoff, quad: &QuadratureConfig) -> Result<MeasureReport> {
    // Divergence is diagnosed from the tail before the a > m/2 precondition
    // would reject the parameters outright.
    lambda_m(&FiberMeasureParams::divergence_test(a, m, cutoff)?, quad)?;
    let params = FiberMeasureParams::new(a, m, cutoff)?;
    Ok(MeasureReport {
        cutoff,
        axioms: standard_axioms_check(&params, quad)?,
    })
}

pub fn cmd_measure(a: f64, m: u32, cutoff: Cutoff, quad: &QuadratureConfig, format: Format) -> Result<Outcome> {
    let report = measure_report(a, m, cutoff, quad)?;
    let stdout = match format {
        Format::Json => json(&report),
        Format::Text => {
            let mut s = String::new();
            for (k, v) in report.fields() {
                let _ = writeln!(s, "{k}: {v}");
            }
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["field", "value"])?;
            for (k, v) in report.fields() {
                w.write_record([k, v.as_str()])?;
            }
            csv_string(w)?
        }
    };
    let code = if report.worst_defect() < AXIOM_THRESHOLD {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    Ok(Outcome { stdout, code })
}

/// Parses, runs and writes to `out`; returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = out.write_all(outcome.stdout.as_bytes()).and_then(|_| out.flush()) {
                let _ = writeln!(err, "error: <stdout>: {e}");
                return EXIT_IO;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
