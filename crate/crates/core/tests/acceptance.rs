//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime
//! against the budget. Runs without the libtest harness so the lines come
//! out in order; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use bregproj::matcore::{eigendecompose, expm, HermitianMatrix};
use bregproj::oracle::{
    classical_adaboost, dual_descent, finite_difference_gradient, golden::adaboost_dataset, golden_thompson_check,
    pythagorean_residual, scalar_reference, strong_convexity_sampler, RateSchedule,
};
use bregproj::random::{
    random_density_matrix, random_hermitian, random_per_item_constraints, random_positive_definite, random_povm,
    random_summed_constraints, random_unitary, seeded_rng, uniform_vec,
};
use bregproj::solvers::{
    adaboost_embed, exponential_loss, maxent, partition_min, partition_problem, qis, solve, Algorithm,
    ConstraintSystem, NullSink, Normalization, SolverConfig,
};
use bregproj::{
    bregman_divergence, dual_objective_gradient, exact_bregman, kl_parallel, kl_sequential, lb_projection,
    ExtendedReal, LegendreFamily,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: bregproj::Error) -> String {
    e.to_string()
}

fn trace_distance(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let diff = a.checked_sub(b).unwrap();
    0.5 * eigendecompose(&diff).unwrap().eigenvalues.iter().map(|v| v.abs()).sum::<f64>()
}

/// Largest rise `D^(t+1) − D^(t)` over a run; `+∞` if a finite value turns infinite.
fn worst_rise(objectives: &[ExtendedReal]) -> f64 {
    objectives
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => b - a,
            (ExtendedReal::Finite(_), ExtendedReal::PosInfinity) => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn monotone_descent() -> Outcome {
    let fam = LegendreFamily::shannon();
    let cfg = SolverConfig::default().with_max_iterations(300).with_violation_tol(1e-10);
    let mut rng = seeded_rng(1001);
    let mut runs = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for instance in 0..100 {
        let dim = rng.random_range(2..=4);
        let k = rng.random_range(1..=4);
        let x0 = random_density_matrix(&mut rng, dim);
        let y0 = random_positive_definite(&mut rng, dim, 0.1, 1.0);
        let summed = ConstraintSystem::new(random_summed_constraints(&mut rng, dim, k), x0.clone(), Normalization::Summed)
            .map_err(err)?;
        let mut traces = Vec::new();
        for alg in [
            Algorithm::Exact,
            Algorithm::ParallelApprox,
            Algorithm::SequentialApprox,
            Algorithm::KlParallel,
            Algorithm::KlSequential,
        ] {
            traces.push(solve(alg, &fam, &y0, &summed, &cfg, &mut NullSink).map_err(err)?.trace);
        }
        traces.push(partition_min(&random_per_item_constraints(&mut rng, dim, k), &cfg).map_err(err)?.trace);
        let povm = ConstraintSystem::new(random_povm(&mut rng, dim, k), x0, Normalization::Povm).map_err(err)?;
        let sigma0 = HermitianMatrix::identity(dim).scale(1.0 / dim as f64);
        traces.push(qis(&sigma0, &povm, &cfg).map_err(err)?.trace);
        for tr in traces {
            runs += 1;
            let rise = worst_rise(&tr.objectives());
            worst = worst.max(rise);
            if rise > 1e-9 {
                failures.push(format!("instance {instance} {}: rise {rise:e}", tr.algorithm));
            }
        }
    }
    check(
        failures.is_empty(),
        format!("{runs} runs over all seven solvers, largest one-step rise {worst:.2e} {failures:?}"),
    )
}

fn duality_equivalence() -> Outcome {
    let fam = LegendreFamily::shannon();
    let cfg = SolverConfig::default().with_violation_tol(1e-10);
    let schedule = RateSchedule::default();
    let mut rng = seeded_rng(1002);
    let (mut worst_obj, mut worst_frob) = (0.0_f64, 0.0_f64);
    for _ in 0..25 {
        let dim = rng.random_range(2..=4);
        let k = rng.random_range(1..=4);
        let x0 = random_density_matrix(&mut rng, dim);
        let y0 = random_positive_definite(&mut rng, dim, 0.1, 1.0);
        let cs = ConstraintSystem::new(random_summed_constraints(&mut rng, dim, k), x0.clone(), Normalization::Summed)
            .map_err(err)?;
        let dd = dual_descent(&fam, &y0, &cs, &vec![0.0; k], 50_000, &schedule).map_err(err)?;
        let d_dd = dd.objective.expect("X0 is present").value();
        for sol in [kl_parallel(&y0, &cs, &cfg).map_err(err)?, kl_sequential(&y0, &cs, &cfg).map_err(err)?] {
            let d = bregman_divergence(&fam, &x0, &sol.state.y).map_err(err)?.value();
            worst_obj = worst_obj.max((d - d_dd).abs());
            worst_frob = worst_frob.max(sol.state.y.distance(&dd.y));
        }
    }
    check(
        worst_obj <= 1e-4 && worst_frob <= 1e-4,
        format!("25 instances, objective gap {worst_obj:.2e}, Frobenius gap {worst_frob:.2e}"),
    )
}

fn strong_convexity() -> Outcome {
    let report = strong_convexity_sampler(&LegendreFamily::shannon(), 1000, 6, 4, 1003);
    check(
        report.violations == 0 && report.trials == 1000,
        format!(
            "{} samples, {} violations, worst margin {:.2e}",
            report.trials, report.violations, report.worst_margin
        ),
    )
}

fn golden_thompson() -> Outcome {
    let report = golden_thompson_check(500, 4, 1004);
    check(
        report.violations == 0 && report.trials == 500,
        format!("{} pairs, {} violations, worst margin {:.2e}", report.trials, report.violations, report.worst_margin),
    )
}

/// Diagonal `X` in the linear family: `x0 + t·v` with `v` orthogonal to every
/// row of `f`, scaled to stay inside `(0, ∞)`.
fn member_of_family(rng: &mut impl Rng, x0: &[f64], f: &[Vec<f64>]) -> Vec<f64> {
    let n = x0.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in f {
        let mut q = row.clone();
        for b in &basis {
            let c: f64 = q.iter().zip(b).map(|(a, b)| a * b).sum();
            q.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
        }
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-10 {
            basis.push(q.iter().map(|v| v / norm).collect());
        }
    }
    let mut v = uniform_vec(rng, n, -1.0, 1.0);
    for b in &basis {
        let c: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(b).for_each(|(a, b)| *a -= c * b);
    }
    let room = x0
        .iter()
        .zip(&v)
        .filter(|(_, d)| **d < 0.0)
        .map(|(x, d)| -0.9 * x / d)
        .fold(f64::INFINITY, f64::min);
    let t = rng.random_range(0.0..1.0) * room.min(2.0);
    x0.iter().zip(&v).map(|(x, d)| x + t * d).collect()
}

fn pythagorean() -> Outcome {
    let cfg = SolverConfig::default().with_violation_tol(1e-13);
    let mut rng = seeded_rng(1005);
    let mut worst = 0.0_f64;
    let mut pairs = 0;
    for fam in [LegendreFamily::shannon(), LegendreFamily::euclidean()] {
        for _ in 0..5 {
            let n = rng.random_range(3..=6);
            let k = rng.random_range(1..n);
            let f: Vec<Vec<f64>> = (0..k).map(|_| uniform_vec(&mut rng, n, -1.0, 1.0)).collect();
            let ops: Vec<HermitianMatrix> = f.iter().map(|r| HermitianMatrix::from_diagonal(r).unwrap()).collect();
            let x0 = uniform_vec(&mut rng, n, 0.2, 1.0);
            let y0 = HermitianMatrix::from_diagonal(&uniform_vec(&mut rng, n, 0.2, 1.0)).unwrap();
            let cs = ConstraintSystem::new(ops.clone(), HermitianMatrix::from_diagonal(&x0).unwrap(), Normalization::Free)
                .map_err(err)?;
            let y_star = exact_bregman(&fam, &y0, &cs, &cfg).map_err(err)?.state.y;
            for _ in 0..20 {
                let x = HermitianMatrix::from_diagonal(&member_of_family(&mut rng, &x0, &f)).unwrap();
                // Y on the projection family through Y0.
                let mu = uniform_vec(&mut rng, k, -0.5, 0.5);
                let y = lb_projection(&fam, &y0, &HermitianMatrix::linear_combination(&mu, &ops).unwrap()).map_err(err)?;
                let r = pythagorean_residual(&fam, &x, &y_star, &y).map_err(err)?;
                worst = worst.max(r.unwrap_or(f64::INFINITY));
                pairs += 1;
            }
        }
    }
    check(worst <= 1e-5, format!("{pairs} (X, Y) pairs over 10 instances, worst residual {worst:.2e}"))
}

fn adaboost_equivalence() -> Outcome {
    let (labels, outputs) = adaboost_dataset(104);
    let rounds = 50;
    let ops = adaboost_embed(&labels, &outputs).map_err(err)?;
    let cfg = SolverConfig::default().with_max_iterations(rounds + 1).with_violation_tol(0.0);
    let sol = partition_min(&ops, &cfg).map_err(err)?;
    let classical = classical_adaboost(&labels, &outputs, rounds);
    let deltas = sol.trace.deltas();
    if deltas.len() != rounds {
        return Err(format!("matrix run took {} steps, expected {rounds}", deltas.len()));
    }
    let mut worst_step = 0.0_f64;
    for (d, c) in deltas.iter().zip(&classical) {
        for (j, v) in d.iter().enumerate() {
            let expected = if j == c.hypothesis { c.step } else { 0.0 };
            worst_step = worst_step.max((v - expected).abs());
        }
    }
    let z = HermitianMatrix::linear_combination(&sol.state.lambda, &ops).map_err(err)?;
    let partition = expm(&z).map_err(err)?.trace();
    let loss = exponential_loss(&labels, &outputs, &sol.state.lambda).map_err(err)?;
    let loss_gap = (partition - loss).abs();
    check(
        worst_step <= 1e-12 && loss_gap <= 1e-12,
        format!("20 examples, 3 stumps, {rounds} rounds: step gap {worst_step:.2e}, loss gap {loss_gap:.2e}"),
    )
}

fn qis_maxent() -> Outcome {
    let p = HermitianMatrix::identity(2)
        .checked_add(&HermitianMatrix::pauli_z())
        .unwrap()
        .scale(0.5);
    let r = maxent(&[0.9], &[p], 2, &SolverConfig::default()).map_err(err)?;
    let target = HermitianMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
    let dist = trace_distance(&r.state, &target);
    let peak = r.solution.trace.records.iter().map(|x| x.trace_y).fold(f64::MIN, f64::max);
    check(
        dist <= 1e-6 && peak <= 1.0 + 1e-9,
        format!("trace distance to diag(0.9, 0.1) {dist:.2e}, max tr Y {peak:.15}"),
    )
}

fn gradient() -> Outcome {
    let mut rng = seeded_rng(1008);
    let mut worst = 0.0_f64;
    for trial in 0..50 {
        let fam = if trial % 2 == 0 { LegendreFamily::shannon() } else { LegendreFamily::euclidean() };
        let dim = rng.random_range(2..=4);
        let k = rng.random_range(1..=4);
        let ops: Vec<HermitianMatrix> = (0..k).map(|_| random_hermitian(&mut rng, dim, 1.0)).collect();
        let x0 = random_positive_definite(&mut rng, dim, 0.2, 1.0);
        let y0 = random_positive_definite(&mut rng, dim, 0.2, 1.0);
        let cs = ConstraintSystem::new(ops, x0, Normalization::Free).map_err(err)?;
        let lambda = uniform_vec(&mut rng, k, -0.5, 0.5);
        let g = dual_objective_gradient(&fam, &y0, &cs, &lambda).map_err(err)?;
        let fd = finite_difference_gradient(&fam, &y0, &cs, &lambda, 1e-5).map_err(err)?;
        let scale = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let gap = g.iter().zip(&fd).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        worst = worst.max(gap / scale.max(1e-8));
    }
    check(worst <= 1e-4, format!("50 instances (Shannon and Euclidean), worst relative error {worst:.2e}"))
}

/// Diagonal instance data for one algorithm: `(fam, y0, rows, x0)`.
fn diagonal_instance(rng: &mut impl Rng, alg: Algorithm, fam: &LegendreFamily) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.random_range(2..=5);
    let k = rng.random_range(1..=3);
    let interior = |rng: &mut _| match fam.name() {
        "fermi_dirac" => uniform_vec(rng, n, 0.1, 0.9),
        _ => uniform_vec(rng, n, 0.1, 1.0),
    };
    match alg {
        Algorithm::PartitionMin => {
            let rows = (0..k).map(|_| uniform_vec(rng, n, -1.0, 1.0)).collect();
            (vec![1.0; n], rows, vec![0.0; n])
        }
        Algorithm::Qis => {
            let mut rows = vec![vec![0.0; n]; k];
            for i in 0..n {
                let w = uniform_vec(rng, k, 0.0, 1.0);
                let s: f64 = w.iter().sum();
                for j in 0..k {
                    rows[j][i] = w[j] / s;
                }
            }
            let p = uniform_vec(rng, n, 0.1, 1.0);
            let total: f64 = p.iter().sum();
            (vec![1.0 / n as f64; n], rows, p.iter().map(|v| v / total).collect())
        }
        _ => {
            let mut rows: Vec<Vec<f64>> = (0..k).map(|_| uniform_vec(rng, n, -1.0, 1.0)).collect();
            let col_max = (0..n)
                .map(|i| rows.iter().map(|r| r[i].abs()).sum::<f64>())
                .fold(0.0_f64, f64::max);
            rows.iter_mut().for_each(|r| r.iter_mut().for_each(|v| *v /= col_max * (1.0 + 1e-12)));
            (interior(rng), rows, interior(rng))
        }
    }
}

fn commuting_equivalence() -> Outcome {
    let cfg = SolverConfig::default().with_max_iterations(200).with_violation_tol(1e-10);
    let mut rng = seeded_rng(1009);
    let mut worst = 0.0_f64;
    let mut runs = 0;
    let mut problems = Vec::new();
    for alg in Algorithm::ALL {
        let families = if alg.shannon_only() {
            vec![LegendreFamily::shannon()]
        } else {
            vec![LegendreFamily::shannon(), LegendreFamily::euclidean(), LegendreFamily::fermi_dirac()]
        };
        for fam in families {
            for _ in 0..4 {
                let (y0v, rows, x0v) = diagonal_instance(&mut rng, alg, &fam);
                let reference = scalar_reference(&fam, &y0v, &rows, &x0v, alg, &cfg).map_err(err)?;
                let ops: Vec<HermitianMatrix> = rows.iter().map(|r| HermitianMatrix::from_diagonal(r).unwrap()).collect();
                let y0 = HermitianMatrix::from_diagonal(&y0v).unwrap();
                let x0 = HermitianMatrix::from_diagonal(&x0v).unwrap();
                let cs = match alg {
                    Algorithm::PartitionMin => partition_problem(ops).map_err(err)?.1,
                    _ => ConstraintSystem::new(ops, x0, alg.required_normalization()).map_err(err)?,
                };
                let sol = solve(alg, &fam, &y0, &cs, &cfg, &mut NullSink).map_err(err)?;
                runs += 1;
                if sol.trace.records.len() != reference.lambdas.len() {
                    problems.push(format!(
                        "{alg}/{}: {} vs {} iterations",
                        fam.name(),
                        sol.trace.records.len(),
                        reference.lambdas.len()
                    ));
                    continue;
                }
                let mut lambda = vec![0.0; rows.len()];
                for (rec, expected) in sol.trace.records.iter().zip(&reference.lambdas) {
                    for (l, e) in lambda.iter().zip(expected) {
                        worst = worst.max((l - e).abs());
                    }
                    lambda.iter_mut().zip(&rec.delta).for_each(|(l, d)| *l += d);
                }
            }
        }
    }
    check(
        problems.is_empty() && worst <= 1e-10,
        format!("{runs} diagonal runs over all 7 algorithms, worst lambda gap {worst:.2e} {problems:?}"),
    )
}

fn extended_domain() -> Outcome {
    let fam = LegendreFamily::shannon();
    let mut rng = seeded_rng(1010);
    let mut worst_limit = 0.0_f64;
    let (mut finite_ok, mut infinite_ok, mut total) = (0, 0, 0);
    for _ in 0..20 {
        let dim = rng.random_range(2..=4);
        let u = random_unitary(&mut rng, dim);
        let mut spectrum = uniform_vec(&mut rng, dim, 0.2, 1.0);
        spectrum[0] = 0.0;
        let y = HermitianMatrix::from_diagonal(&spectrum).unwrap().conjugate_by(&u);
        let mut perturbed = spectrum.clone();
        perturbed[0] = 1e-6;
        let y_eps = HermitianMatrix::from_diagonal(&perturbed).unwrap().conjugate_by(&u);
        // Λ leaves the kernel of Y invariant: block-diagonal in Y's eigenbasis.
        let mut lam = random_hermitian(&mut rng, dim, 2.0).into_inner();
        for i in 1..dim {
            lam[(0, i)] = 0.0.into();
            lam[(i, 0)] = 0.0.into();
        }
        let lambda = HermitianMatrix::new(lam).unwrap().conjugate_by(&u);
        let at_boundary = lb_projection(&fam, &y, &lambda).map_err(err)?;
        let limit = lb_projection(&fam, &y_eps, &lambda).map_err(err)?;
        worst_limit = worst_limit.max(at_boundary.distance(&limit));

        // X vanishing on the kernel of Y is admissible; weight or coupling on
        // the kernel is not.
        let a = random_positive_definite(&mut rng, dim, 0.1, 1.0).into_inner();
        let mut good = a.clone();
        for i in 0..dim {
            good[(0, i)] = 0.0.into();
            good[(i, 0)] = 0.0.into();
        }
        let mut weighted = good.clone();
        weighted[(0, 0)] = 0.3.into();
        let mut coupled = good.clone();
        coupled[(0, 1)] = 1e-3.into();
        coupled[(1, 0)] = 1e-3.into();
        coupled[(0, 0)] = 1e-2.into();
        let d = |m: nalgebra::DMatrix<bregproj::matcore::C64>| {
            bregman_divergence(&fam, &HermitianMatrix::new(m).unwrap().conjugate_by(&u), &y)
        };
        total += 1;
        if d(good).map_err(err)?.is_finite() {
            finite_ok += 1;
        }
        if !d(weighted).map_err(err)?.is_finite() && !d(coupled).map_err(err)?.is_finite() {
            infinite_ok += 1;
        }
    }
    check(
        worst_limit <= 1e-4 && finite_ok == total && infinite_ok == total,
        format!(
            "limit gap {worst_limit:.2e} at eps 1e-6; admissible finite {finite_ok}/{total}, non-admissible infinite {infinite_ok}/{total}"
        ),
    )
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("monotone descent", 60, monotone_descent),
        ("duality/oracle equivalence", 120, duality_equivalence),
        ("strong-convexity inequality", 60, strong_convexity),
        ("Golden-Thompson sanity", 10, golden_thompson),
        ("Pythagorean identity", 30, pythagorean),
        ("classical AdaBoost equivalence", 5, adaboost_equivalence),
        ("QIS maxent", 5, qis_maxent),
        ("gradient correctness", 30, gradient),
        ("commuting-case equivalence", 60, commuting_equivalence),
        ("extended-domain behavior", 10, extended_domain),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {detail} [{:.2} s of {budget} s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
