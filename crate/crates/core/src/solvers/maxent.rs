//! Maximum-entropy inference through quantum iterative scaling.

use crate::error::{Error, Result};
use crate::legendre::LegendreFamily;
use crate::matcore::{eigendecompose, HermitianMatrix};

use super::constraints::{ConstraintSystem, Normalization};
use super::trace::{NullSink, TraceSink};
use super::{solve, Algorithm, Solution, SolverConfig};

/// Operators whose completion `I − ΣF_j` has spectral norm below this are
/// treated as already summing to the identity.
const COMPLETION_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct MaxEntResult {
    pub solution: Solution,
    /// Multipliers of the caller's operators.
    pub lambda: Vec<f64>,
    /// Multiplier of the appended completion `I − ΣF_j`, if one was needed.
    pub completion_lambda: Option<f64>,
    /// Final iterate `exp(ln(I/d) + λ·F)`.
    pub state: HermitianMatrix,
    pub entropy: f64,
    /// Budget ran out with the violation above tolerance.
    pub non_converged: bool,
}

impl MaxEntResult {
    /// Hamiltonian parameters: `state ∝ exp(Σ_j θ_j F_j)` with the completion
    /// multiplier folded into the normalization.
    pub fn hamiltonian_parameters(&self) -> Vec<f64> {
        let c = self.completion_lambda.unwrap_or(0.0);
        self.lambda.iter().map(|l| l - c).collect()
    }
}

/// `−tr ρ ln ρ`.
pub fn von_neumann_entropy(rho: &HermitianMatrix) -> Result<f64> {
    Ok(eigendecompose(rho)?
        .eigenvalues
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum())
}

/// Maximizes von Neumann entropy subject to `⟨F_j, ρ⟩ = α_j`.
///
/// When the operators do not sum to the identity the completion `I − ΣF_j`
/// with target `1 − Σα_j` is appended, which pins the trace to one.
pub fn maxent(targets: &[f64], operators: &[HermitianMatrix], dim: usize, cfg: &SolverConfig) -> Result<MaxEntResult> {
    maxent_with_sink(targets, operators, dim, cfg, &mut NullSink)
}

/// [`maxent`], sending each trace row to `sink`.
pub fn maxent_with_sink(
    targets: &[f64],
    operators: &[HermitianMatrix],
    dim: usize,
    cfg: &SolverConfig,
    sink: &mut dyn TraceSink,
) -> Result<MaxEntResult> {
    if operators.is_empty() {
        return Err(Error::InvalidInput("at least one constraint operator is required".into()));
    }
    if let Some((j, f)) = operators.iter().enumerate().find(|(_, f)| f.dim() != dim) {
        return Err(Error::DimensionMismatch {
            context: format!("constraint operator F_{}", j + 1),
            expected: dim,
            found: f.dim(),
        });
    }
    let mut ops = operators.to_vec();
    let mut alpha = targets.to_vec();
    let sum = HermitianMatrix::linear_combination(&vec![1.0; ops.len()], &ops)?;
    let completion = HermitianMatrix::identity(dim).checked_sub(&sum)?;
    let completed = completion.spectral_norm()? > COMPLETION_TOL;
    if completed {
        let rest = 1.0 - targets.iter().sum::<f64>();
        if rest < -1e-9 {
            return Err(Error::InvalidInput(format!(
                "moments sum to {}, more than a unit-trace state allows",
                1.0 - rest
            )));
        }
        ops.push(completion);
        alpha.push(rest.max(0.0));
    }
    let cs = ConstraintSystem::from_targets(ops, alpha, Normalization::Povm)?;
    let sigma0 = HermitianMatrix::identity(dim).scale(1.0 / dim as f64);
    let solution = solve(Algorithm::Qis, &LegendreFamily::shannon(), &sigma0, &cs, cfg, sink)?;
    let mut lambda = solution.state.lambda.clone();
    let completion_lambda = if completed { lambda.pop() } else { None };
    let state = solution.state.y.clone();
    let entropy = von_neumann_entropy(&state)?;
    let non_converged = solution.state.max_violation() > cfg.stopping.violation_tol;
    Ok(MaxEntResult {
        solution,
        lambda,
        completion_lambda,
        state,
        entropy,
        non_converged,
    })
}
