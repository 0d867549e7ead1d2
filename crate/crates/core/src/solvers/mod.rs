//! Iterative solvers for Bregman projection onto a linear family.
//!
//! All seven algorithms share one driver: iterate `Y^(t) = L_f(Y0, λ^(t)·F)`,
//! record the trace row, stop or ask the step rule for `δ^(t)`, and update
//! `λ^(t+1) = λ^(t) + δ^(t)`.

mod adaboost;
mod constraints;
mod maxent;
mod root;
mod rules;
mod trace;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::{bregman_divergence, divergence_against, ExtendedReal, LegendreFamily, ProjectionBase};
use crate::matcore::{eigendecompose, HermitianMatrix};

pub use adaboost::{adaboost_embed, exponential_loss, stump_outputs, DecisionStump};
pub use constraints::{ConstraintSystem, Normalization, NORMALIZATION_SLACK};
pub use maxent::{maxent, maxent_with_sink, von_neumann_entropy, MaxEntResult};
pub use root::{solve_monotone, Root};
pub use rules::{argmax_abs, kl_step, partition_step, KlStep, MOMENT_UNDERFLOW};
pub use trace::{
    monotonicity_breaks, ConvergenceTrace, NullSink, Status, StepIndex, TraceFlags, TraceRecord, TraceSink,
};

use rules::{needs_moments, propose, SpectralMoments, StepContext};

/// Default per-coordinate step clamp.
pub const DEFAULT_DELTA_MAX: f64 = 50.0;
/// Relative slack used by the in-run descent check.
pub const DESCENT_SLACK: f64 = 1e-9;
/// Trace and positivity slack for density-matrix inputs.
pub const DENSITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StoppingRule {
    pub max_iterations: usize,
    pub violation_tol: f64,
    /// Stop once the objective decreases by less than this in one iteration;
    /// zero disables the rule.
    pub divergence_delta_tol: f64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            max_iterations: 10_000,
            violation_tol: 1e-8,
            divergence_delta_tol: 0.0,
        }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        if !(self.violation_tol >= 0.0) || !(self.divergence_delta_tol >= 0.0) {
            return Err(Error::InvalidInput("tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub stopping: StoppingRule,
    pub delta_max: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            stopping: StoppingRule::default(),
            delta_max: DEFAULT_DELTA_MAX,
        }
    }
}

impl SolverConfig {
    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.stopping.max_iterations = n;
        self
    }

    pub fn with_violation_tol(mut self, tol: f64) -> Self {
        self.stopping.violation_tol = tol;
        self
    }
}

/// `λ^(t)` and the cached iterate `Y^(t) = L_f(Y0, λ^(t)·F)`.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub lambda: Vec<f64>,
    pub y: HermitianMatrix,
    pub iteration: usize,
    /// `⟨F_j, Y⟩ − α_j`.
    pub violation: Vec<f64>,
}

impl SolverState {
    pub fn max_violation(&self) -> f64 {
        self.violation.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub state: SolverState,
    pub trace: ConvergenceTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Exact,
    #[serde(rename = "parallel")]
    ParallelApprox,
    #[serde(rename = "sequential")]
    SequentialApprox,
    KlParallel,
    KlSequential,
    #[serde(rename = "partition")]
    PartitionMin,
    Qis,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Exact,
        Algorithm::ParallelApprox,
        Algorithm::SequentialApprox,
        Algorithm::KlParallel,
        Algorithm::KlSequential,
        Algorithm::PartitionMin,
        Algorithm::Qis,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::ParallelApprox => "parallel",
            Algorithm::SequentialApprox => "sequential",
            Algorithm::KlParallel => "kl_parallel",
            Algorithm::KlSequential => "kl_sequential",
            Algorithm::PartitionMin => "partition",
            Algorithm::Qis => "qis",
        }
    }

    /// Weakest normalization the algorithm accepts.
    pub fn required_normalization(&self) -> Normalization {
        match self {
            Algorithm::Exact => Normalization::Free,
            Algorithm::ParallelApprox | Algorithm::KlParallel => Normalization::Summed,
            Algorithm::SequentialApprox | Algorithm::KlSequential | Algorithm::PartitionMin => {
                Normalization::PerItem
            }
            Algorithm::Qis => Normalization::Povm,
        }
    }

    /// Whether the algorithm is only defined for the Shannon family.
    pub fn shannon_only(&self) -> bool {
        matches!(
            self,
            Algorithm::KlParallel | Algorithm::KlSequential | Algorithm::PartitionMin | Algorithm::Qis
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown solver '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Objective {
    /// `D_f(X0, Y)`.
    Divergence,
    /// `ℓ_f(Y0, λ·F) − λ·α`, the divergence up to the constant `D_f(X0, Y0)`.
    DualPotential,
}

/// Fails unless `m` has unit trace and no eigenvalue below `−DENSITY_TOL`.
pub fn check_density_matrix(m: &HermitianMatrix, name: &str) -> Result<()> {
    let tr = m.trace();
    if (tr - 1.0).abs() > DENSITY_TOL {
        return Err(Error::InvalidInput(format!("{name} has trace {tr}, expected 1")));
    }
    let low = eigendecompose(m)?.eigenvalues[0];
    if low < -DENSITY_TOL {
        return Err(Error::InvalidInput(format!("{name} has negative eigenvalue {low}")));
    }
    Ok(())
}

/// Runs `algorithm` from `Y0`, sending each trace row to `sink`.
pub fn solve(
    algorithm: Algorithm,
    fam: &LegendreFamily,
    y0: &HermitianMatrix,
    cs: &ConstraintSystem,
    cfg: &SolverConfig,
    sink: &mut dyn TraceSink,
) -> Result<Solution> {
    cfg.stopping.validate()?;
    if !(cfg.delta_max > 0.0) {
        return Err(Error::InvalidInput("delta_max must be positive".into()));
    }
    if algorithm.shannon_only() && fam.name() != "shannon" {
        return Err(Error::InvalidInput(format!(
            "{algorithm} is defined for the shannon family only, got {}",
            fam.name()
        )));
    }
    cs.require(algorithm.required_normalization(), algorithm.as_str())?;
    if y0.dim() != cs.dim() {
        return Err(Error::DimensionMismatch {
            context: "starting matrix Y0".into(),
            expected: cs.dim(),
            found: y0.dim(),
        });
    }
    let base = ProjectionBase::new(fam, y0)?;
    let objective = match cs.x0() {
        Some(x0) => {
            if !divergence_against(fam, x0, base.split())?.is_finite() {
                return Err(Error::InvalidInput(
                    "D_f(X0, Y0) is infinite: X0 is not admissible against Y0".into(),
                ));
            }
            Objective::Divergence
        }
        None => Objective::DualPotential,
    };

    let k = cs.k();
    let mut trace = ConvergenceTrace::new(algorithm.as_str(), fam.name());
    trace.flags.strong_convexity_unverified = matches!(
        algorithm,
        Algorithm::ParallelApprox | Algorithm::SequentialApprox
    ) && !fam.has_strong_convexity_certificate();
    if trace.flags.strong_convexity_unverified {
        log::warn!("{} has no strong-convexity certificate; descent is not guaranteed", fam.name());
    }
    let abort_on_ascent = trace.flags.strong_convexity_unverified;

    let start = Instant::now();
    let mut lambda = vec![0.0; k];
    let mut prev_objective: Option<ExtendedReal> = None;

    for t in 1..=cfg.stopping.max_iterations {
        let (y, conj) = base.project_with_conjugate(&cs.combination(&lambda)?)?;
        let violation = cs.violation(&y)?;
        let max_violation = violation.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let objective_value = match objective {
            Objective::Divergence => bregman_divergence(fam, cs.x0().expect("checked above"), &y)?,
            Objective::DualPotential => {
                let lin: f64 = lambda.iter().zip(cs.targets()).map(|(l, a)| l * a).sum();
                ExtendedReal::Finite(conj - lin)
            }
        };

        let mut stalled = false;
        if let Some(prev) = prev_objective {
            if let (Some(a), Some(b)) = (prev.finite(), objective_value.finite()) {
                if b > a + DESCENT_SLACK * a.abs().max(1.0) {
                    trace.flags.descent_violations.push(t);
                    if abort_on_ascent {
                        trace.status = Status::Error;
                        return Err(Error::DescentViolation {
                            iteration: t,
                            before: a,
                            after: b,
                        });
                    }
                }
                let tol = cfg.stopping.divergence_delta_tol;
                stalled = tol > 0.0 && a - b < tol;
            }
        }
        prev_objective = Some(objective_value);

        let converged = max_violation <= cfg.stopping.violation_tol;
        let last = t == cfg.stopping.max_iterations;
        let mut record = TraceRecord {
            t,
            objective: objective_value,
            max_violation,
            step: StepIndex::None,
            delta: vec![0.0; k],
            trace_y: y.trace(),
            seconds: 0.0,
            auxiliary: None,
        };

        if converged || stalled || last {
            record.seconds = start.elapsed().as_secs_f64();
            sink.record(&record);
            trace.records.push(record);
            trace.status = if !trace.flags.unbounded.is_empty() {
                Status::UnboundedStep
            } else if converged {
                Status::Converged
            } else if stalled {
                Status::Stalled
            } else {
                Status::BudgetExhausted
            };
            let state = SolverState {
                lambda,
                y,
                iteration: t,
                violation,
            };
            return Ok(Solution { state, trace });
        }

        let moments = if needs_moments(algorithm) {
            Some(SpectralMoments::new(fam, &y, cs)?)
        } else {
            None
        };
        let ctx = StepContext {
            algorithm,
            family: fam,
            base: &base,
            cs,
            lambda: &lambda,
            y: &y,
            violation: &violation,
            delta_max: cfg.delta_max,
            moments: moments.as_ref(),
        };
        let mut step = propose(&ctx)?;
        for j in 0..k {
            if step.delta[j].abs() > cfg.delta_max {
                step.delta[j] = cfg.delta_max.copysign(step.delta[j]);
                step.capped.push(j);
            }
        }
        for &j in &step.capped {
            trace.flags.clamped.push((t, j));
        }
        for &j in &step.unbounded {
            trace.flags.clamped.push((t, j));
            trace.flags.unbounded.push((t, j));
        }
        for &j in &step.frozen {
            trace.flags.frozen.push((t, j));
        }

        let aux_moments = match moments {
            Some(m) => Some(m),
            None => SpectralMoments::new(fam, &y, cs).ok(),
        };
        record.auxiliary = aux_moments.and_then(|m| m.auxiliary(fam, cs.targets(), &step.delta).ok());
        record.step = step.index;
        record.delta = step.delta.clone();
        record.seconds = start.elapsed().as_secs_f64();
        sink.record(&record);
        trace.records.push(record);

        for (l, d) in lambda.iter_mut().zip(&step.delta) {
            *l += d;
        }
    }
    unreachable!("the loop returns at t = max_iterations")
}

fn run(algorithm: Algorithm, fam: &LegendreFamily, y0: &HermitianMatrix, cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<Solution> {
    solve(algorithm, fam, y0, cs, cfg, &mut NullSink)
}

/// Bregman's exact iterative projection: one coordinate per iteration, with
/// the step solving `⟨F_j, L_f(Y^(t), δF_j)⟩ = α_j` exactly.
pub fn exact_bregman(fam: &LegendreFamily, y0: &HermitianMatrix, cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<Solution> {
    run(Algorithm::Exact, fam, y0, cs, cfg)
}

/// Parallel approximate projection; needs summed normalization.
pub fn parallel_approx(fam: &LegendreFamily, y0: &HermitianMatrix, cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<Solution> {
    run(Algorithm::ParallelApprox, fam, y0, cs, cfg)
}

/// Sequential approximate projection; needs per-item normalization.
pub fn sequential_approx(fam: &LegendreFamily, y0: &HermitianMatrix, cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<Solution> {
    run(Algorithm::SequentialApprox, fam, y0, cs, cfg)
}

pub fn kl_parallel(y0: &HermitianMatrix, cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<Solution> {
    run(Algorithm::KlParallel, &LegendreFamily::shannon(), y0, cs, cfg)
}

pub fn kl_sequential(y0: &HermitianMatrix, cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<Solution> {
    run(Algorithm::KlSequential, &LegendreFamily::shannon(), y0, cs, cfg)
}

/// Builds the partition-function problem: `X0 = 0`, `Y0 = I`, per-item
/// normalization.
pub fn partition_problem(operators: Vec<HermitianMatrix>) -> Result<(HermitianMatrix, ConstraintSystem)> {
    let dim = operators
        .first()
        .ok_or_else(|| Error::InvalidInput("at least one constraint operator is required".into()))?
        .dim();
    let cs = ConstraintSystem::new(operators, HermitianMatrix::zeros(dim), Normalization::PerItem)?;
    Ok((HermitianMatrix::identity(dim), cs))
}

/// Minimizes `tr exp(λ·F)` by sequential coordinate steps `½ ln(b/a)`.
pub fn partition_min(operators: &[HermitianMatrix], cfg: &SolverConfig) -> Result<Solution> {
    let (y0, cs) = partition_problem(operators.to_vec())?;
    run(Algorithm::PartitionMin, &LegendreFamily::shannon(), &y0, &cs, cfg)
}

/// Quantum iterative scaling from the prior `σ0`. The constraint system must
/// be POVM-normalized; when it carries `X0` that matrix is the reference
/// state `ρ0` and must be a density matrix.
pub fn qis(sigma0: &HermitianMatrix, cs: &ConstraintSystem, cfg: &SolverConfig) -> Result<Solution> {
    check_density_matrix(sigma0, "sigma0")?;
    if let Some(rho0) = cs.x0() {
        check_density_matrix(rho0, "rho0")?;
    }
    run(Algorithm::Qis, &LegendreFamily::shannon(), sigma0, cs, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(v: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_diagonal(v).unwrap()
    }

    #[test]
    fn satisfied_constraints_stop_at_once() {
        let cs = ConstraintSystem::new(vec![diag(&[1.0, 0.0])], diag(&[0.5, 0.5]), Normalization::Povm).unwrap();
        for alg in [Algorithm::Exact, Algorithm::ParallelApprox, Algorithm::KlSequential, Algorithm::Qis] {
            let sol = run(alg, &LegendreFamily::shannon(), &diag(&[0.5, 0.5]), &cs, &SolverConfig::default()).unwrap();
            assert_eq!(sol.trace.iterations(), 1, "{alg}");
            assert_eq!(sol.state.lambda, vec![0.0]);
            assert_eq!(sol.trace.status, Status::Converged);
        }
    }

    #[test]
    fn euclidean_exact_is_affine_projection() {
        let f = HermitianMatrix::from_real_rows(&[vec![1.0, 0.5], vec![0.5, -1.0]]).unwrap();
        let x0 = HermitianMatrix::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let y0 = HermitianMatrix::identity(2);
        let cs = ConstraintSystem::new(vec![f.clone()], x0.clone(), Normalization::Free).unwrap();
        let sol = exact_bregman(&LegendreFamily::euclidean(), &y0, &cs, &SolverConfig::default()).unwrap();
        let delta = crate::matcore::inner(&f, &x0.checked_sub(&y0).unwrap()).unwrap()
            / crate::matcore::inner(&f, &f).unwrap();
        let expected = y0.checked_add(&f.scale(delta)).unwrap();
        assert!(sol.state.y.distance(&expected) < 1e-12);
        assert_eq!(sol.trace.iterations(), 2);
        assert!(sol.trace.records[1].max_violation <= 1e-12);
    }

    #[test]
    fn parallel_two_level_example() {
        // Z/2 split into positive and negative halves plus the complement.
        let cs = ConstraintSystem::new(
            vec![diag(&[0.5, 0.0]), diag(&[0.0, -0.5]), diag(&[0.5, 0.5])],
            diag(&[0.7, 0.3]),
            Normalization::Summed,
        )
        .unwrap();
        let cfg = SolverConfig::default().with_max_iterations(200);
        let sol = parallel_approx(&LegendreFamily::shannon(), &HermitianMatrix::identity(2).scale(0.5), &cs, &cfg).unwrap();
        assert_eq!(sol.trace.status, Status::Converged);
        assert!(sol.state.y.distance(&diag(&[0.7, 0.3])) < 1e-7);
    }

    #[test]
    fn partition_single_operator() {
        let sol = partition_min(&[HermitianMatrix::pauli_z()], &SolverConfig::default()).unwrap();
        assert_eq!(sol.trace.iterations(), 1);
        assert_abs_diff_eq!(sol.state.y.trace(), 2.0, epsilon = 1e-15);

        // min e^λ + e^{−λ/2} at λ = −(2/3) ln 2.
        let sol = partition_min(&[diag(&[1.0, -0.5])], &SolverConfig::default()).unwrap();
        assert_eq!(sol.trace.status, Status::Converged);
        let lam = -(2.0 / 3.0) * 2f64.ln();
        assert_abs_diff_eq!(sol.state.lambda[0], lam, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.state.y.trace(), lam.exp() + (-lam / 2.0).exp(), epsilon = 1e-12);
    }

    #[test]
    fn qis_diagonal_example() {
        let cs = ConstraintSystem::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], diag(&[0.7, 0.3]), Normalization::Povm).unwrap();
        let sol = qis(&diag(&[0.5, 0.5]), &cs, &SolverConfig::default()).unwrap();
        assert_eq!(sol.trace.status, Status::Converged);
        assert!(sol.state.y.distance(&diag(&[0.7, 0.3])) < 1e-8);
    }

    #[test]
    fn qis_freezes_zero_targets() {
        let cs = ConstraintSystem::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], diag(&[1.0, 0.0]), Normalization::Povm).unwrap();
        let cfg = SolverConfig::default().with_max_iterations(5);
        let sol = qis(&diag(&[0.5, 0.5]), &cs, &cfg).unwrap();
        assert!(!sol.trace.flags.frozen.is_empty());
        assert_eq!(sol.state.lambda[1], 0.0);
    }

    #[test]
    fn separable_partition_is_flagged_unbounded() {
        let sol = partition_min(&[diag(&[-1.0, -1.0])], &SolverConfig::default().with_max_iterations(5)).unwrap();
        assert_eq!(sol.trace.status, Status::UnboundedStep);
        assert_eq!(sol.state.lambda[0], DEFAULT_DELTA_MAX);
    }

    #[test]
    fn shannon_only_algorithms_reject_other_families() {
        let cs = ConstraintSystem::new(vec![diag(&[1.0, 0.0])], diag(&[0.5, 0.5]), Normalization::Povm).unwrap();
        let err = run(Algorithm::KlParallel, &LegendreFamily::euclidean(), &HermitianMatrix::identity(2), &cs, &SolverConfig::default());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
    }
}
