//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rayon::prelude::*;

use cstar_index::analytic_index::{analytic_index, kappa};
use cstar_index::exact_arith::{lefschetz_point_sum_float, unit_root_reciprocal_sum};
use cstar_index::fiber_measure::projector::{cone, observed_order};
use cstar_index::fiber_measure::{
    lambda_m, projector_axioms_check, standard_axioms_check, unity_check, Cutoff, FiberMeasureParams, QuadratureConfig,
};
use cstar_index::heat_galerkin::{equivariant_block_index, exact_index, supertrace, GalerkinProblem};
use cstar_index::orbifold_model::ExampleFamilySpec;
use cstar_index::scalar::{int, rational, C};
use cstar_index::topological_index::{hrr_term, mu_bruteforce, mu_closed, verify_identity};
use cstar_index::{Error, Rational};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn spec(l: u64, m: u64) -> ExampleFamilySpec {
    ExampleFamilySpec::new(l, m).expect("l >= 2")
}

fn grid() -> Vec<(u64, u64)> {
    (2..=20).flat_map(|l| (0..=60).map(move |m| (l, m))).collect()
}

/// `#{n >= 0 : r + l n <= 2m}` with `r = m mod l`, counted directly.
fn kappa_by_count(l: u64, m: u64) -> i64 {
    let r = m % l;
    (0..).take_while(|n| r + l * n <= 2 * m).count() as i64
}

fn within(elapsed: Duration, budget_s: u64) -> Result<(), String> {
    if elapsed.as_secs_f64() < budget_s as f64 {
        Ok(())
    } else {
        Err(format!("took {:.1} s, budget {budget_s} s", elapsed.as_secs_f64()))
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let cells = grid();
    let failures: Vec<String> = cells
        .par_iter()
        .filter_map(|&(l, m)| {
            let s = spec(l, m);
            let rhs = hrr_term(s) + int(2) * mu_bruteforce(s).ok()?;
            let lhs = analytic_index(s);
            (int(lhs) != rhs || lhs != kappa_by_count(l, m)).then(|| format!("(l={l}, m={m}): {lhs} vs {rhs}"))
        })
        .collect();
    let elapsed = start.elapsed();
    if !failures.is_empty() {
        return Err(format!("{} cells disagree, first {}", failures.len(), failures[0]));
    }
    within(elapsed, 10)?;
    Ok(format!("{} cells exact, {:.2} s", cells.len(), elapsed.as_secs_f64()))
}

fn criterion_2() -> Check {
    let cells = grid();
    let worst: Result<Vec<f64>, String> = cells
        .par_iter()
        .map(|&(l, m)| {
            let s = spec(l, m);
            let brute = mu_bruteforce(s).map_err(|e| e.to_string())?;
            let closed = mu_closed(s);
            if brute != closed {
                return Err(format!("(l={l}, m={m}): brute {brute} vs closed {closed}"));
            }
            let float = lefschetz_point_sum_float(l, 1, m as i64).map_err(|e| e.to_string())?;
            Ok((float - C::new(closed.to_f64().unwrap(), 0.0)).norm())
        })
        .collect();
    let worst = worst?.into_iter().fold(0.0, f64::max);
    if worst < 1e-10 {
        Ok(format!("{} cells exact, max float deviation {worst:.1e}", cells.len()))
    } else {
        Err(format!("float deviation {worst:e}"))
    }
}

fn criterion_3() -> Check {
    for l in 2..=20u64 {
        let li = l as i64;
        let mu0 = mu_bruteforce(spec(l, 0)).map_err(|e| e.to_string())?;
        if mu0 != rational(li - 1, 2 * li) {
            return Err(format!("mu({l}, 0) = {mu0}"));
        }
        let recip = unit_root_reciprocal_sum(l).map_err(|e| e.to_string())?;
        if recip != rational(-(li - 1), 2) {
            return Err(format!("reciprocal sum for l = {l} is {recip}"));
        }
        let total = verify_identity(spec(l, 0))
            .map_err(|e| e.to_string())?
            .topological_total;
        let expected = rational(1, li) + int(2) * rational(li - 1, 2 * li);
        if total != int(1) || expected != int(1) {
            return Err(format!("m = 0 total for l = {l} is {total}"));
        }
        for m in (0..=60).step_by(l as usize) {
            let k = kappa(spec(l, m)) as i64;
            let formula = Rational::new((2 * m as i64).into(), li.into()) + int(1);
            let topological = verify_identity(spec(l, m))
                .map_err(|e| e.to_string())?
                .topological_total;
            if int(k) != formula || topological != formula {
                return Err(format!(
                    "kappa({l}, {m}) = {k}, 2m/l + 1 = {formula}, total {topological}"
                ));
            }
        }
    }
    Ok("mu(l,0), reciprocal sum, m = 0 total and kappa at l | m exact for l in [2,20]".into())
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let problems: Vec<(i64, i64)> = (-4..=8).flat_map(|d| (1.max(-d)..=6).map(move |k| (d, k))).collect();
    let results: Result<Vec<f64>, String> = problems
        .par_iter()
        .map(|&(d, k)| {
            let p = GalerkinProblem::new(d, k).map_err(|e| e.to_string())?;
            let r = supertrace(&p, &[0.05, 0.5, 5.0]).map_err(|e| e.to_string())?;
            if r.index_exact != d + 1 {
                return Err(format!("(d={d}, K={k}): exact index {}", r.index_exact));
            }
            Ok(r.max_deviation())
        })
        .collect();
    let worst = results?.into_iter().fold(0.0, f64::max);
    let elapsed = start.elapsed();
    if worst >= 1e-8 {
        return Err(format!("supertrace deviation {worst:e}"));
    }
    within(elapsed, 60)?;
    Ok(format!(
        "{} problems, index d+1 exact, max |str - (d+1)| {worst:.1e}, {:.2} s",
        problems.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_5() -> Check {
    let mut cases = 0;
    for l in [2u64, 3, 5] {
        for m in 0..=6u64 {
            let expected = kappa(spec(l, m)) as i64;
            for k in [2i64, 3, 4] {
                let block = equivariant_block_index(l, m, k).map_err(|e| e.to_string())?;
                if block != expected {
                    return Err(format!("block index ({l}, {m}, K={k}) = {block}, kappa = {expected}"));
                }
                let mut sum = 0;
                for b in 0..l {
                    let p = GalerkinProblem::new(2 * m as i64, k)
                        .and_then(|p| p.with_block(l, b))
                        .map_err(|e| e.to_string())?;
                    sum += exact_index(&p).map_err(|e| e.to_string())?.index_exact;
                }
                if sum != 2 * m as i64 + 1 {
                    return Err(format!("blocks of ({l}, {m}, K={k}) sum to {sum}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases match kappa, block sums equal 2m+1"))
}

fn criterion_6() -> Check {
    let quad = QuadratureConfig::default();
    let mut worst_lambda = 0.0f64;
    for a in [1.0, 2.0, 3.0] {
        let p = FiberMeasureParams::new(a, 0, Cutoff::HardStep).map_err(|e| e.to_string())?;
        let lambda: f64 = lambda_m(&p, &quad).map_err(|e| e.to_string())?;
        worst_lambda = worst_lambda.max((lambda - PI * (1.0 + 2.0 * a)).abs());
    }
    if worst_lambda >= 1e-8 {
        return Err(format!("hard-cutoff lambda_0 off by {worst_lambda:e}"));
    }
    let mut worst_unity = 0.0f64;
    for (a, m) in [(1.0, 0), (2.0, 1), (3.0, 2), (5.0, 3)] {
        for cutoff in [Cutoff::SmoothBump, Cutoff::HardStep] {
            let p = FiberMeasureParams::new(a, m, cutoff).map_err(|e| e.to_string())?;
            let u: f64 = unity_check(&p, &quad).map_err(|e| e.to_string())?;
            worst_unity = worst_unity.max((u - 1.0).abs());
        }
    }
    if worst_unity >= 1e-8 {
        return Err(format!("unity defect {worst_unity:e}"));
    }
    for m in [1u32, 2] {
        let a = m as f64 / 2.0 - 0.1;
        let p = FiberMeasureParams::divergence_test(a, m, Cutoff::SmoothBump).map_err(|e| e.to_string())?;
        match lambda_m(&p, &quad) {
            Err(Error::DivergenceDetected { .. }) => {}
            other => return Err(format!("a = {a}, m = {m}: expected divergence, got {other:?}")),
        }
    }
    Ok(format!(
        "lambda_0 error {worst_lambda:.1e}, unity defect {worst_unity:.1e}, divergence flagged for m = 1, 2"
    ))
}

fn criterion_7() -> Check {
    let quad = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for (a, m, cutoff) in [
        (2.0, 1, Cutoff::SmoothBump),
        (3.0, 2, Cutoff::SmoothBump),
        (1.0, 0, Cutoff::HardStep),
    ] {
        let p = FiberMeasureParams::new(a, m, cutoff).map_err(|e| e.to_string())?;
        let r = standard_axioms_check(&p, &quad).map_err(|e| e.to_string())?;
        worst = worst
            .max(r.monomial_resolution_defect)
            .max(r.idempotency_defect)
            .max(r.equivariance_defect);
    }
    if worst >= 1e-6 {
        return Err(format!("axiom defect {worst:e} at default tolerance"));
    }

    let tolerances = [1e-3, 1e-4, 1e-5, 1e-6];
    let u = cone(C::new(0.9, 0.5), 0.8);
    let mut orders = Vec::new();
    for (a, m, cutoff) in [(2.0, 1, Cutoff::SmoothBump), (1.0, 0, Cutoff::HardStep)] {
        let p = FiberMeasureParams::new(a, m, cutoff).map_err(|e| e.to_string())?;
        let mut samples = Vec::new();
        for tol in tolerances {
            let q = quad.with_tolerance(tol).map_err(|e| e.to_string())?;
            let r = projector_axioms_check(&p, &q, &[&u]).map_err(|e| e.to_string())?;
            let d = r.idempotency_defect.max(r.equivariance_defect);
            if d > 10.0 * tol {
                return Err(format!("a = {a}, m = {m}: defect {d:e} at tolerance {tol:e}"));
            }
            samples.push((tol, d));
        }
        let order = observed_order(&samples);
        if order < 0.75 {
            return Err(format!("a = {a}, m = {m}: observed order {order:.2} from {samples:?}"));
        }
        orders.push(order);
    }
    Ok(format!(
        "smooth defects <= {worst:.1e} at default tolerance; Lipschitz study orders {}",
        orders.iter().map(|o| format!("{o:.2}")).collect::<Vec<_>>().join(", ")
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("identity sweep", criterion_1),
        ("closed form vs brute force", criterion_2),
        ("closed-form constants", criterion_3),
        ("McKean-Singer at matrix level", criterion_4),
        ("equivariant descent", criterion_5),
        ("fiber measure", criterion_6),
        ("projector axioms", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
