//! Step rules for the seven iterative algorithms.
//!
//! Every rule sees the current iterate `Y^(t)` and violation vector and
//! returns the step `δ^(t)`; the driver in the parent module owns the loop.

use crate::error::{Error, Result};
use crate::legendre::{LegendreFamily, ProjectionBase};
use crate::matcore::{eigendecompose_in, inner, HermitianMatrix};

use super::constraints::ConstraintSystem;
use super::root::{solve_monotone, Root};
use super::trace::StepIndex;
use super::Algorithm;

/// Moments below this are treated as underflow in iterative scaling.
pub const MOMENT_UNDERFLOW: f64 = 1e-300;

/// Step proposed by a rule before clamping.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub index: StepIndex,
    pub delta: Vec<f64>,
    /// Coordinates whose step equation has no finite solution; their entry in
    /// `delta` already carries the clamped value `±δ_max`.
    pub unbounded: Vec<usize>,
    /// Coordinates whose closed-form or bracketed solution exceeded `δ_max`.
    pub capped: Vec<usize>,
    pub frozen: Vec<usize>,
}

impl Step {
    fn zeros(k: usize, index: StepIndex) -> Self {
        Step {
            index,
            delta: vec![0.0; k],
            unbounded: Vec::new(),
            capped: Vec::new(),
            frozen: Vec::new(),
        }
    }
}

/// Index of the largest `|v_j|`; ties go to the lowest index.
pub fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = j;
        }
    }
    best
}

/// Solution of `a e^δ − b e^{−δ} = c` for `a, b ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KlStep {
    Finite(f64),
    /// No finite solution; the objective keeps decreasing as `δ → sign·∞`.
    Unbounded(f64),
}

/// Closed-form step of the Kullback-Leibler updates: the positive root of
/// `a u² − c u − b = 0` in `u = e^δ`.
pub fn kl_step(a: f64, b: f64, c: f64) -> KlStep {
    if a > 0.0 && b > 0.0 {
        let s = (c * c + 4.0 * a * b).sqrt();
        // Pick the cancellation-free form of the positive root.
        let u = if c >= 0.0 { (c + s) / (2.0 * a) } else { 2.0 * b / (s - c) };
        KlStep::Finite(u.ln())
    } else if a > 0.0 {
        if c > 0.0 {
            KlStep::Finite((c / a).ln())
        } else {
            KlStep::Unbounded(-1.0)
        }
    } else if b > 0.0 {
        if c < 0.0 {
            KlStep::Finite(-(-c / b).ln())
        } else {
            KlStep::Unbounded(1.0)
        }
    } else {
        KlStep::Finite(0.0)
    }
}

/// Step of the partition-function minimization, `½ ln(b/a)`.
pub fn partition_step(a: f64, b: f64) -> KlStep {
    match (a > 0.0, b > 0.0) {
        (true, true) => KlStep::Finite(0.5 * (b / a).ln()),
        (true, false) => KlStep::Unbounded(-1.0),
        (false, true) => KlStep::Unbounded(1.0),
        (false, false) => KlStep::Finite(0.0),
    }
}

/// Eigenvalues of `Y^(t)` with the diagonal weights `v_i† F_j^± v_i`.
pub struct SpectralMoments {
    pub values: Vec<f64>,
    pub interior: Vec<f64>,
    pub pos: Vec<Vec<f64>>,
    pub neg: Vec<Vec<f64>>,
}

impl SpectralMoments {
    pub fn new(fam: &LegendreFamily, y: &HermitianMatrix, cs: &ConstraintSystem) -> Result<Self> {
        let eig = eigendecompose_in(y, fam.domain())?;
        let interior = eig
            .eigenvalues
            .iter()
            .copied()
            .filter(|&v| fam.domain().boundary_point(v).is_none())
            .collect();
        let pos = cs.positive_parts().iter().map(|p| eig.diagonal_weights(p)).collect();
        let neg = cs.negative_parts().iter().map(|m| eig.diagonal_weights(m)).collect();
        Ok(SpectralMoments {
            values: eig.eigenvalues,
            interior,
            pos,
            neg,
        })
    }

    /// `tr(F_j⁺ L(Y, δ)) − tr(F_j⁻ L(Y, −δ))`.
    fn split_moment(&self, fam: &LegendreFamily, j: usize, delta: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (i, &y) in self.values.iter().enumerate() {
            let (p, n) = (self.pos[j][i], self.neg[j][i]);
            if p != 0.0 {
                acc += p * fam.scalar_projection(y, delta)?;
            }
            if n != 0.0 {
                acc -= n * fam.scalar_projection(y, -delta)?;
            }
        }
        Ok(acc)
    }

    /// `tr(ℓ̂(Y, δ) F_j⁺ + ℓ̂(Y, −δ) F_j⁻)`.
    fn split_conjugate(&self, fam: &LegendreFamily, j: usize, delta: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (i, &y) in self.values.iter().enumerate() {
            let (p, n) = (self.pos[j][i], self.neg[j][i]);
            if p != 0.0 {
                acc += p * fam.scalar_conjugate(y, delta)?;
            }
            if n != 0.0 {
                acc += n * fam.scalar_conjugate(y, -delta)?;
            }
        }
        Ok(acc)
    }

    /// Auxiliary function `⟨δ·F, X0⟩ − Σ_j tr(ℓ̂(Y, δ_j) F_j⁺ + ℓ̂(Y, −δ_j) F_j⁻)`.
    pub fn auxiliary(&self, fam: &LegendreFamily, targets: &[f64], delta: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for (j, (&d, &a)) in delta.iter().zip(targets).enumerate() {
            if d != 0.0 {
                acc += d * a - self.split_conjugate(fam, j, d)?;
            }
        }
        Ok(acc)
    }

    fn admissible_range(&self, fam: &LegendreFamily, j: usize) -> Option<(f64, f64)> {
        let has_pos = self.pos[j].iter().any(|&w| w != 0.0);
        let has_neg = self.neg[j].iter().any(|&w| w != 0.0);
        if !has_pos && !has_neg {
            return None;
        }
        let (lo, hi) = fam.admissible_shift_range(&self.interior);
        let (mut a, mut b) = (f64::NEG_INFINITY, f64::INFINITY);
        if has_pos {
            a = a.max(lo);
            b = b.min(hi);
        }
        if has_neg {
            a = a.max(-hi);
            b = b.min(-lo);
        }
        Some((a, b))
    }

    /// Solves `tr(F_j⁺ L(Y, δ)) − tr(F_j⁻ L(Y, −δ)) = α_j` for `δ`.
    fn solve_split(
        &self,
        fam: &LegendreFamily,
        j: usize,
        target: f64,
        delta_max: f64,
    ) -> Result<(f64, Bound)> {
        let Some(range) = self.admissible_range(fam, j) else {
            return Ok((0.0, Bound::Inside));
        };
        match solve_monotone(j, range, delta_max, |d| Ok(self.split_moment(fam, j, d)? - target))? {
            Root::Found(d) => Ok((d, Bound::Inside)),
            Root::BeyondCap(dir) => {
                // Probe far beyond the cap to tell a large finite root from none.
                let far = dir * delta_max * 1e6;
                let finite_root = match self.split_moment(fam, j, far.clamp(range.0, range.1)) {
                    Ok(v) => (v - target).signum() == dir || v.is_nan(),
                    Err(_) => true,
                };
                let bound = if finite_root { Bound::Capped } else { Bound::Unbounded };
                Ok((dir * delta_max, bound))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Bound {
    Inside,
    Capped,
    Unbounded,
}

fn apply_kl(step: &mut Step, j: usize, s: KlStep, delta_max: f64) {
    match s {
        KlStep::Finite(d) => step.delta[j] = d,
        KlStep::Unbounded(sign) => {
            step.delta[j] = sign * delta_max;
            step.unbounded.push(j);
        }
    }
}

fn apply_bound(step: &mut Step, j: usize, d: f64, bound: Bound) {
    step.delta[j] = d;
    match bound {
        Bound::Inside => {}
        Bound::Capped => step.capped.push(j),
        Bound::Unbounded => step.unbounded.push(j),
    }
}

/// Inputs available to a rule at iteration `t`.
pub struct StepContext<'a> {
    pub algorithm: Algorithm,
    pub family: &'a LegendreFamily,
    pub base: &'a ProjectionBase,
    pub cs: &'a ConstraintSystem,
    pub lambda: &'a [f64],
    pub y: &'a HermitianMatrix,
    pub violation: &'a [f64],
    pub delta_max: f64,
    pub moments: Option<&'a SpectralMoments>,
}

pub fn needs_moments(algorithm: Algorithm) -> bool {
    matches!(algorithm, Algorithm::ParallelApprox | Algorithm::SequentialApprox)
}

pub fn propose(ctx: &StepContext<'_>) -> Result<Step> {
    let k = ctx.cs.k();
    let targets = ctx.cs.targets();
    match ctx.algorithm {
        Algorithm::Exact => {
            let j = argmax_abs(ctx.violation);
            let mut step = Step::zeros(k, StepIndex::Coordinate(j));
            let fj = &ctx.cs.operators()[j];
            let base_shift = ctx.cs.combination(ctx.lambda)?;
            let range = (f64::NEG_INFINITY, f64::INFINITY);
            let root = solve_monotone(j, range, ctx.delta_max, |d| {
                let shift = base_shift.checked_add(&fj.scale(d))?;
                Ok(inner(fj, &ctx.base.project(&shift)?)? - targets[j])
            })?;
            match root {
                Root::Found(d) => step.delta[j] = d,
                Root::BeyondCap(dir) => apply_bound(&mut step, j, dir * ctx.delta_max, Bound::Capped),
            }
            Ok(step)
        }
        Algorithm::ParallelApprox => {
            let m = ctx.moments.expect("moments computed for approximate rules");
            let mut step = Step::zeros(k, StepIndex::All);
            for (j, &target) in targets.iter().enumerate() {
                let (d, bound) = m.solve_split(ctx.family, j, target, ctx.delta_max)?;
                apply_bound(&mut step, j, d, bound);
            }
            Ok(step)
        }
        Algorithm::SequentialApprox => {
            let m = ctx.moments.expect("moments computed for approximate rules");
            let j = argmax_abs(ctx.violation);
            let mut step = Step::zeros(k, StepIndex::Coordinate(j));
            let (d, bound) = m.solve_split(ctx.family, j, targets[j], ctx.delta_max)?;
            apply_bound(&mut step, j, d, bound);
            Ok(step)
        }
        Algorithm::KlParallel => {
            let mut step = Step::zeros(k, StepIndex::All);
            for j in 0..k {
                let (a, b) = kl_moments(ctx, j)?;
                apply_kl(&mut step, j, kl_step(a, b, targets[j]), ctx.delta_max);
            }
            Ok(step)
        }
        Algorithm::KlSequential => {
            let j = argmax_abs(ctx.violation);
            let mut step = Step::zeros(k, StepIndex::Coordinate(j));
            let (a, b) = kl_moments(ctx, j)?;
            apply_kl(&mut step, j, kl_step(a, b, targets[j]), ctx.delta_max);
            Ok(step)
        }
        Algorithm::PartitionMin => {
            let j = argmax_abs(ctx.violation);
            let mut step = Step::zeros(k, StepIndex::Coordinate(j));
            let (a, b) = kl_moments(ctx, j)?;
            apply_kl(&mut step, j, partition_step(a, b), ctx.delta_max);
            Ok(step)
        }
        Algorithm::Qis => {
            let mut step = Step::zeros(k, StepIndex::All);
            for (j, &alpha) in targets.iter().enumerate() {
                if alpha <= 0.0 {
                    step.frozen.push(j);
                    continue;
                }
                let moment = inner(&ctx.cs.operators()[j], ctx.y)?;
                if moment <= MOMENT_UNDERFLOW {
                    return Err(Error::ZeroMoment { coordinate: j, value: moment });
                }
                step.delta[j] = alpha.ln() - moment.ln();
            }
            Ok(step)
        }
    }
}

fn kl_moments(ctx: &StepContext<'_>, j: usize) -> Result<(f64, f64)> {
    let a = inner(&ctx.cs.positive_parts()[j], ctx.y)?;
    let b = inner(&ctx.cs.negative_parts()[j], ctx.y)?;
    Ok((a.max(0.0), b.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Bisection on `a e^δ − b e^{−δ} − c`, independent of the closed form.
    fn bisect(a: f64, b: f64, c: f64) -> f64 {
        let g = |d: f64| a * d.exp() - b * (-d).exp() - c;
        let (mut lo, mut hi) = (-60.0, 60.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn kl_step_examples() {
        assert_eq!(kl_step(1.0, 1.0, 0.0), KlStep::Finite(0.0));
        match kl_step(1.0, 0.0, 2.0) {
            KlStep::Finite(d) => assert_abs_diff_eq!(d, 2f64.ln(), epsilon = 1e-15),
            s => panic!("{s:?}"),
        }
        match kl_step(2.0, 3.0, 1.0) {
            KlStep::Finite(d) => {
                assert_abs_diff_eq!(d, 1.5f64.ln(), epsilon = 1e-15);
                assert_abs_diff_eq!(d, bisect(2.0, 3.0, 1.0), epsilon = 1e-12);
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn kl_step_edge_cases() {
        assert_eq!(kl_step(1.0, 0.0, -0.5), KlStep::Unbounded(-1.0));
        assert_eq!(kl_step(0.0, 2.0, 0.5), KlStep::Unbounded(1.0));
        match kl_step(0.0, 2.0, -0.5) {
            KlStep::Finite(d) => assert_abs_diff_eq!(d, -(0.25f64).ln(), epsilon = 1e-15),
            s => panic!("{s:?}"),
        }
        assert_eq!(kl_step(0.0, 0.0, 3.0), KlStep::Finite(0.0));
    }

    #[test]
    fn kl_step_matches_bisection_for_negative_targets() {
        for &(a, b, c) in &[(0.3, 0.8, -0.6), (1e-3, 2.0, -1.9), (0.7, 1e-6, -1e-7), (2.0, 0.1, 1.5)] {
            match kl_step(a, b, c) {
                KlStep::Finite(d) => assert_abs_diff_eq!(d, bisect(a, b, c), epsilon = 1e-11),
                s => panic!("{s:?}"),
            }
        }
    }

    #[test]
    fn partition_step_examples() {
        assert_eq!(partition_step(1.0, 1.0), KlStep::Finite(0.0));
        match partition_step(2.0, 8.0) {
            KlStep::Finite(d) => assert_abs_diff_eq!(d, 0.5 * 4f64.ln(), epsilon = 1e-15),
            s => panic!("{s:?}"),
        }
        assert_eq!(partition_step(0.0, 1.0), KlStep::Unbounded(1.0));
        assert_eq!(partition_step(1.0, 0.0), KlStep::Unbounded(-1.0));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax_abs(&[0.1, -0.3, 0.3]), 1);
        assert_eq!(argmax_abs(&[0.0, 0.0]), 0);
    }
}
