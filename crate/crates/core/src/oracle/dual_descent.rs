use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::legendre::{bregman_divergence, ExtendedReal, LegendreFamily, ProjectionBase};
use crate::matcore::{inner, HermitianMatrix};
use crate::solvers::ConstraintSystem;

/// Step-size policy of [`dual_descent`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSchedule {
    pub initial_step: f64,
    /// Backtracking factor.
    pub shrink: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    /// Start each line search from the Barzilai-Borwein step.
    pub barzilai_borwein: bool,
    /// Stop once the largest gradient entry falls below this.
    pub gradient_tol: f64,
    pub max_backtracks: usize,
}

impl Default for RateSchedule {
    fn default() -> Self {
        RateSchedule {
            initial_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
            barzilai_borwein: true,
            gradient_tol: 1e-11,
            max_backtracks: 80,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DualDescentResult {
    pub lambda: Vec<f64>,
    /// `ℓ_f(Y0, λ·F) − λ·α`.
    pub potential: f64,
    /// `D_f(X0, Y)` when the constraint system carries `X0`.
    pub objective: Option<ExtendedReal>,
    pub y: HermitianMatrix,
    pub gradient_norm: f64,
    pub steps: usize,
}

struct Point {
    lambda: Vec<f64>,
    potential: f64,
    y: HermitianMatrix,
    gradient: Vec<f64>,
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `λ ↦ D_f(X0, L_f(Y0, λ·F))` by gradient descent with
/// backtracking, starting from `lambda0`.
///
/// The objective is evaluated through the dual potential `ℓ_f(Y0, λ·F) − λ·α`,
/// which differs from it by the constant `D_f(X0, Y0)` and needs only the
/// targets. Its gradient is `⟨F_j, L_f(Y0, λ·F)⟩ − α_j`. Trial points whose
/// shifted spectrum leaves the conjugate domain are rejected by backtracking.
pub fn dual_descent(
    fam: &LegendreFamily,
    y0: &HermitianMatrix,
    cs: &ConstraintSystem,
    lambda0: &[f64],
    steps: usize,
    schedule: &RateSchedule,
) -> Result<DualDescentResult> {
    if lambda0.len() != cs.k() {
        return Err(Error::DimensionMismatch {
            context: "starting multipliers".into(),
            expected: cs.k(),
            found: lambda0.len(),
        });
    }
    let base = ProjectionBase::new(fam, y0)?;
    let eval = |lambda: Vec<f64>| -> Result<Point> {
        let (y, conj) = base.project_with_conjugate(&cs.combination(&lambda)?)?;
        let potential = conj - dot(&lambda, cs.targets());
        let gradient = cs.violation(&y)?;
        if !potential.is_finite() || gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::InadmissibleShift {
                value: potential,
                domain: "finite potential".into(),
            });
        }
        Ok(Point { lambda, potential, y, gradient })
    };

    let mut cur = eval(lambda0.to_vec())?;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut taken = 0;
    while taken < steps && sup_norm(&cur.gradient) > schedule.gradient_tol {
        let mut rate = schedule.initial_step;
        if let (true, Some((pl, pg))) = (schedule.barzilai_borwein, &prev) {
            let s: Vec<f64> = cur.lambda.iter().zip(pl).map(|(a, b)| a - b).collect();
            let d: Vec<f64> = cur.gradient.iter().zip(pg).map(|(a, b)| a - b).collect();
            let curvature = dot(&s, &d);
            if curvature > 0.0 {
                let bb = dot(&s, &s) / curvature;
                if bb.is_finite() && bb > 0.0 {
                    rate = bb;
                }
            }
        }
        let g2 = dot(&cur.gradient, &cur.gradient);
        let gnorm = sup_norm(&cur.gradient);
        let mut next = None;
        for _ in 0..schedule.max_backtracks {
            let trial: Vec<f64> = cur.lambda.iter().zip(&cur.gradient).map(|(l, g)| l - rate * g).collect();
            if let Ok(p) = eval(trial) {
                let sufficient = p.potential <= cur.potential - schedule.armijo * rate * g2;
                // Near the optimum the potential stalls at rounding level; accept
                // steps that keep it flat and shrink the gradient.
                let flat = p.potential <= cur.potential + 4.0 * f64::EPSILON * cur.potential.abs().max(1.0)
                    && sup_norm(&p.gradient) < gnorm;
                if sufficient || flat {
                    next = Some(p);
                    break;
                }
            }
            rate *= schedule.shrink;
        }
        let Some(p) = next else { break };
        prev = Some((cur.lambda.clone(), cur.gradient.clone()));
        cur = p;
        taken += 1;
    }
    let objective = match cs.x0() {
        Some(x0) => Some(bregman_divergence(fam, x0, &cur.y)?),
        None => None,
    };
    Ok(DualDescentResult {
        gradient_norm: sup_norm(&cur.gradient),
        lambda: cur.lambda,
        potential: cur.potential,
        objective,
        y: cur.y,
        steps: taken,
    })
}

/// Euclidean projection of `Y0` onto the linear family by the normal
/// equations `Σ_l ⟨F_j, F_l⟩ λ_l = α_j − ⟨F_j, Y0⟩`.
pub fn least_squares_projection(y0: &HermitianMatrix, cs: &ConstraintSystem) -> Result<(Vec<f64>, HermitianMatrix)> {
    let k = cs.k();
    let ops = cs.operators();
    let mut gram = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        for l in 0..k {
            gram[(j, l)] = inner(&ops[j], &ops[l])?;
        }
    }
    let rhs = DVector::from_iterator(
        k,
        (0..k).map(|j| inner(&ops[j], y0).map(|v| cs.targets()[j] - v)).collect::<Result<Vec<_>>>()?,
    );
    let lambda = gram
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::InvalidInput(format!("normal equations: {e}")))?;
    let lambda: Vec<f64> = lambda.iter().copied().collect();
    let y = y0.checked_add(&cs.combination(&lambda)?)?;
    Ok((lambda, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, seeded_rng};
    use crate::solvers::Normalization;
    use approx::assert_abs_diff_eq;

    #[test]
    fn optimal_start_is_returned() {
        let cs = ConstraintSystem::new(
            vec![HermitianMatrix::from_diagonal(&[1.0, 0.0]).unwrap()],
            HermitianMatrix::identity(2).scale(0.5),
            Normalization::Povm,
        )
        .unwrap();
        let r = dual_descent(&LegendreFamily::shannon(), &HermitianMatrix::identity(2).scale(0.5), &cs, &[0.0], 100, &RateSchedule::default()).unwrap();
        assert_eq!(r.lambda, vec![0.0]);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn euclidean_matches_normal_equations() {
        let mut rng = seeded_rng(11);
        let fs: Vec<_> = (0..3).map(|_| random_hermitian(&mut rng, 3, 1.0)).collect();
        let x0 = random_hermitian(&mut rng, 3, 2.0);
        let y0 = random_hermitian(&mut rng, 3, 2.0);
        let cs = ConstraintSystem::new(fs, x0, Normalization::Free).unwrap();
        let fam = LegendreFamily::euclidean();
        let (_, y_ls) = least_squares_projection(&y0, &cs).unwrap();
        let r = dual_descent(&fam, &y0, &cs, &[0.0; 3], 10_000, &RateSchedule::default()).unwrap();
        assert!(r.y.distance(&y_ls) < 1e-8, "{}", r.y.distance(&y_ls));
        let d_ls = bregman_divergence(&fam, cs.x0().unwrap(), &y_ls).unwrap().value();
        assert_abs_diff_eq!(r.objective.unwrap().value(), d_ls, epsilon = 1e-8);
    }
}
