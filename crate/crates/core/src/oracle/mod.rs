//! Independent brute-force references for the solvers.
//!
//! Nothing here calls into the iterative solvers: the dual descent works on
//! the dual objective directly, the scalar references re-derive the commuting
//! algorithms on plain vectors, and the samplers check trace inequalities on
//! random inputs.

mod dual_descent;
pub mod golden;
mod scalar;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::{bregman_divergence, dual_objective, lb_conjugate, lb_conjugate_scalar_lift, LegendreFamily};
use crate::matcore::{expm, inner, HermitianMatrix, Interval};
use crate::random::{
    random_diagonal_partition, random_hermitian, random_povm, random_unitary, seeded_rng, uniform_vec,
};
use crate::solvers::ConstraintSystem;

pub use dual_descent::{dual_descent, least_squares_projection, DualDescentResult, RateSchedule};
pub use scalar::{classical_adaboost, scalar_reference, AdaBoostRound, ScalarTrace};

/// One oracle-versus-solver comparison together with its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub quantity: String,
    pub oracle: f64,
    pub solver: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
}

impl Comparison {
    /// Compares two scalars by absolute difference.
    pub fn scalar(quantity: &str, oracle: f64, solver: f64, tolerance: f64) -> Self {
        Comparison {
            quantity: quantity.to_string(),
            oracle,
            solver,
            discrepancy: (oracle - solver).abs(),
            tolerance,
        }
    }

    /// Compares two vectors by the largest entrywise difference; `oracle` and
    /// `solver` hold the respective infinity norms.
    pub fn vector(quantity: &str, oracle: &[f64], solver: &[f64], tolerance: f64) -> Self {
        let discrepancy = if oracle.len() == solver.len() {
            oracle.iter().zip(solver).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
        } else {
            f64::INFINITY
        };
        let norm = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        Comparison {
            quantity: quantity.to_string(),
            oracle: norm(oracle),
            solver: norm(solver),
            discrepancy,
            tolerance,
        }
    }

    /// Compares two matrices in Frobenius norm.
    pub fn matrix(quantity: &str, oracle: &HermitianMatrix, solver: &HermitianMatrix, tolerance: f64) -> Self {
        Comparison {
            quantity: quantity.to_string(),
            oracle: oracle.frobenius_norm(),
            solver: solver.frobenius_norm(),
            discrepancy: oracle.distance(solver),
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.discrepancy <= self.tolerance
    }
}

/// Outcome of an oracle run: sampled-inequality counts and named comparisons.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub instance: String,
    pub trials: usize,
    /// Trials that could not be evaluated (inadmissible shifts).
    pub skipped: usize,
    pub violations: usize,
    /// Largest `lhs − rhs` seen; positive means the inequality failed.
    pub worst_margin: f64,
    /// Slack allowed before a sampled inequality counts as violated.
    pub slack: f64,
    pub comparisons: Vec<Comparison>,
}

impl OracleReport {
    pub fn new(instance: impl Into<String>) -> Self {
        OracleReport {
            instance: instance.into(),
            worst_margin: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    pub fn push(&mut self, c: Comparison) {
        self.comparisons.push(c);
    }

    /// Records `lhs ≤ rhs + slack` for one trial.
    fn sample(&mut self, lhs: f64, rhs: f64) {
        self.trials += 1;
        let margin = lhs - rhs;
        if margin.is_nan() || margin > self.slack {
            self.violations += 1;
        }
        if margin > self.worst_margin || margin.is_nan() {
            self.worst_margin = margin;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.comparisons.iter().all(Comparison::passed)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}", self.instance)?;
        if self.trials > 0 {
            write!(
                f,
                ": {} trials, {} violations beyond {:e}, worst margin {:e}",
                self.trials, self.violations, self.slack, self.worst_margin
            )?;
            if self.skipped > 0 {
                write!(f, ", {} skipped", self.skipped)?;
            }
        }
        for c in &self.comparisons {
            write!(
                f,
                "\n  {} {}: oracle {:.12e} solver {:.12e} diff {:.3e} (tol {:e})",
                if c.passed() { "ok  " } else { "FAIL" },
                c.quantity,
                c.oracle,
                c.solver,
                c.discrepancy,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

/// Random matrix with every eigenvalue strictly inside `domain`.
pub fn random_interior_matrix(rng: &mut impl Rng, domain: &Interval, dim: usize) -> HermitianMatrix {
    let vals: Vec<f64> = (0..dim)
        .map(|_| match (domain.lo.is_finite(), domain.hi.is_finite()) {
            (true, true) => domain.lo + rng.random_range(0.05..0.95) * (domain.hi - domain.lo),
            (true, false) => domain.lo + rng.random_range(0.1..3.0),
            (false, true) => domain.hi - rng.random_range(0.1..3.0),
            (false, false) => rng.random_range(-2.0..2.0),
        })
        .collect();
    let u = random_unitary(rng, dim);
    HermitianMatrix::from_diagonal(&vals).unwrap().conjugate_by(&u)
}

/// Samples `ℓ_f(Y, δ·F) ≤ Σ_j tr(ℓ̂_f(Y, δ_j) F_j)` for PSD `F_j` summing to
/// the identity, `dim` in `2..=max_dim` and `k` in `1..=max_k`.
///
/// Even trials conjugate a diagonal partition of unity by one unitary; odd
/// trials use `S^{-1/2} G_j S^{-1/2}`, whose operators do not commute.
pub fn strong_convexity_sampler(
    fam: &LegendreFamily,
    trials: usize,
    max_dim: usize,
    max_k: usize,
    seed: u64,
) -> OracleReport {
    let mut report = OracleReport::new(format!(
        "strong convexity of {} (dim <= {max_dim}, k <= {max_k}, seed {seed})",
        fam.name()
    ));
    report.slack = 1e-9;
    let mut rng = seeded_rng(seed);
    for trial in 0..trials {
        let dim = rng.random_range(2..=max_dim.max(2));
        let k = rng.random_range(1..=max_k.max(1));
        let fs = if trial % 2 == 0 || k == 1 {
            random_diagonal_partition(&mut rng, dim, k)
        } else {
            random_povm(&mut rng, dim, k)
        };
        let y = random_interior_matrix(&mut rng, fam.domain(), dim);
        let delta = uniform_vec(&mut rng, k, -3.0, 3.0);
        match strong_convexity_sides(fam, &y, &fs, &delta) {
            Ok((lhs, rhs)) => report.sample(lhs, rhs),
            Err(_) => report.skipped += 1,
        }
    }
    report
}

/// Both sides of the strong-convexity inequality.
pub fn strong_convexity_sides(
    fam: &LegendreFamily,
    y: &HermitianMatrix,
    fs: &[HermitianMatrix],
    delta: &[f64],
) -> Result<(f64, f64)> {
    let shift = HermitianMatrix::linear_combination(delta, fs)?;
    let lhs = lb_conjugate(fam, y, &shift)?;
    let mut rhs = 0.0;
    for (f, &d) in fs.iter().zip(delta) {
        rhs += inner(&lb_conjugate_scalar_lift(fam, y, d)?, f)?;
    }
    Ok((lhs, rhs))
}

/// Samples `tr e^{A+B} ≤ tr(e^A e^B)` for random Hermitian `A`, `B` with
/// spectral norm at most 3.
pub fn golden_thompson_check(trials: usize, dim: usize, seed: u64) -> OracleReport {
    let mut report = OracleReport::new(format!("golden-thompson (dim {dim}, seed {seed})"));
    report.slack = 1e-9;
    let mut rng = seeded_rng(seed);
    for _ in 0..trials {
        let na = rng.random_range(0.0..3.0);
        let nb = rng.random_range(0.0..3.0);
        let a = random_hermitian(&mut rng, dim, na);
        let b = random_hermitian(&mut rng, dim, nb);
        match golden_thompson_sides(&a, &b) {
            Ok((lhs, rhs)) => report.sample(lhs, rhs),
            Err(_) => report.skipped += 1,
        }
    }
    report
}

/// `(tr e^{A+B}, tr(e^A e^B))`.
pub fn golden_thompson_sides(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<(f64, f64)> {
    let lhs = expm(&a.checked_add(b)?)?.trace();
    // tr(e^A e^B) = ⟨e^A, e^B⟩ since both factors are Hermitian.
    let rhs = inner(&expm(a)?, &expm(b)?)?;
    Ok((lhs, rhs))
}

/// Central finite differences of `λ ↦ D_f(X0, L_f(Y0, λ·F))`.
pub fn finite_difference_gradient(
    fam: &LegendreFamily,
    y0: &HermitianMatrix,
    cs: &ConstraintSystem,
    lambda: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    let eval = |l: &[f64]| -> Result<f64> {
        dual_objective(fam, y0, cs, l)?
            .finite()
            .ok_or_else(|| Error::InvalidInput("dual objective is infinite".into()))
    };
    (0..lambda.len())
        .map(|j| {
            let mut up = lambda.to_vec();
            let mut down = lambda.to_vec();
            up[j] += h;
            down[j] -= h;
            Ok((eval(&up)? - eval(&down)?) / (2.0 * h))
        })
        .collect()
}

/// `|D(X,Y) − D(X,Y*) − D(Y*,Y)|`; `None` if any divergence is infinite.
pub fn pythagorean_residual(
    fam: &LegendreFamily,
    x: &HermitianMatrix,
    y_star: &HermitianMatrix,
    y: &HermitianMatrix,
) -> Result<Option<f64>> {
    let dxy = bregman_divergence(fam, x, y)?;
    let dxs = bregman_divergence(fam, x, y_star)?;
    let dsy = bregman_divergence(fam, y_star, y)?;
    Ok(match (dxy.finite(), dxs.finite(), dsy.finite()) {
        (Some(a), Some(b), Some(c)) => Some((a - b - c).abs()),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_thompson_pauli_pair_is_strict() {
        let (lhs, rhs) = golden_thompson_sides(&HermitianMatrix::pauli_x(), &HermitianMatrix::pauli_z()).unwrap();
        assert_abs_diff_eq!(lhs, 2.0 * 2f64.sqrt().cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(rhs, 2.0 * 1f64.cosh().powi(2), epsilon = 1e-12);
        assert!(lhs < rhs);
    }

    #[test]
    fn golden_thompson_commuting_is_equality() {
        let a = HermitianMatrix::from_diagonal(&[0.3, -1.2]).unwrap();
        let b = HermitianMatrix::from_diagonal(&[2.0, 0.4]).unwrap();
        let (lhs, rhs) = golden_thompson_sides(&a, &b).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn single_identity_block_is_tight() {
        let mut rng = seeded_rng(5);
        let y = random_interior_matrix(&mut rng, LegendreFamily::shannon().domain(), 3);
        let (lhs, rhs) =
            strong_convexity_sides(&LegendreFamily::shannon(), &y, &[HermitianMatrix::identity(3)], &[1.7]).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn shannon_sampler_smoke() {
        let r = strong_convexity_sampler(&LegendreFamily::shannon(), 50, 4, 3, 1);
        assert!(r.passed(), "{r}");
        assert_eq!(r.trials, 50);
    }
}
