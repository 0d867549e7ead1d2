//! Commuting-case references: every algorithm rewritten on plain vectors.

use crate::error::{Error, Result};
use crate::legendre::LegendreFamily;
use crate::solvers::{Algorithm, SolverConfig};

/// Per-iteration record of a vector run. Index `t − 1` holds iteration `t`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarTrace {
    pub lambdas: Vec<Vec<f64>>,
    pub deltas: Vec<Vec<f64>>,
    /// `D_f(x0, y^(t))`, `+∞` for non-admissible pairs.
    pub objectives: Vec<f64>,
    pub max_violations: Vec<f64>,
    pub y: Vec<f64>,
    pub converged: bool,
}

fn is_boundary(fam: &LegendreFamily, v: f64) -> bool {
    fam.domain().boundary_point(v).is_some()
}

fn project(fam: &LegendreFamily, y0: &[f64], f_rows: &[Vec<f64>], lambda: &[f64]) -> Result<Vec<f64>> {
    (0..y0.len())
        .map(|i| {
            if is_boundary(fam, y0[i]) {
                return Ok(y0[i]);
            }
            let s: f64 = f_rows.iter().zip(lambda).map(|(row, l)| l * row[i]).sum();
            fam.scalar_projection(y0[i], s)
        })
        .collect()
}

fn divergence(fam: &LegendreFamily, x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            if is_boundary(fam, b) {
                if a == b { 0.0 } else { f64::INFINITY }
            } else {
                fam.scalar_divergence(a, b)
            }
        })
        .sum()
}

/// Root of a nondecreasing `g` on `[−cap, cap]` by bisection; points where
/// `g` is undefined count as lying past the root. Returns `±cap` when the
/// sign never changes.
fn bisect(cap: f64, g: impl Fn(f64) -> Result<f64>) -> f64 {
    let value = |d: f64| match g(d) {
        Ok(v) => v,
        Err(_) => {
            if d > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        }
    };
    let g0 = value(0.0);
    if g0 == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = if g0 < 0.0 { (0.0, cap) } else { (-cap, 0.0) };
    if g0 < 0.0 && value(cap) < 0.0 {
        return cap;
    }
    if g0 > 0.0 && value(-cap) > 0.0 {
        return -cap;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = value(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if value(lo).abs() <= value(hi).abs() { lo } else { hi }
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for j in 1..v.len() {
        if v[j].abs() > v[best].abs() {
            best = j;
        }
    }
    best
}

/// Runs the vector form of `algorithm` on diagonal data: `y0` is the starting
/// point, `f_rows[j]` the diagonal of `F_j` and `x0` the reference point.
///
/// Uses the same stopping rule and step clamp as the matrix driver but shares
/// none of its code: root finding is plain bisection and the
/// Kullback-Leibler steps are found numerically rather than in closed form.
pub fn scalar_reference(
    fam: &LegendreFamily,
    y0: &[f64],
    f_rows: &[Vec<f64>],
    x0: &[f64],
    algorithm: Algorithm,
    cfg: &SolverConfig,
) -> Result<ScalarTrace> {
    let n = y0.len();
    if x0.len() != n || f_rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("scalar reference inputs must share one length".into()));
    }
    let k = f_rows.len();
    let targets: Vec<f64> = f_rows.iter().map(|r| r.iter().zip(x0).map(|(f, x)| f * x).sum()).collect();
    let pos: Vec<Vec<f64>> = f_rows.iter().map(|r| r.iter().map(|v| v.max(0.0)).collect()).collect();
    let neg: Vec<Vec<f64>> = f_rows.iter().map(|r| r.iter().map(|v| (-v).max(0.0)).collect()).collect();
    let moment = |w: &[f64], y: &[f64]| -> f64 { w.iter().zip(y).map(|(a, b)| a * b).sum() };
    let cap = cfg.delta_max;

    let mut out = ScalarTrace::default();
    let mut lambda = vec![0.0; k];
    for t in 1..=cfg.stopping.max_iterations {
        let y = project(fam, y0, f_rows, &lambda)?;
        let viol: Vec<f64> = (0..k).map(|j| moment(&f_rows[j], &y) - targets[j]).collect();
        let maxv = viol.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        out.lambdas.push(lambda.clone());
        out.objectives.push(divergence(fam, x0, &y));
        out.max_violations.push(maxv);
        if maxv <= cfg.stopping.violation_tol || t == cfg.stopping.max_iterations {
            out.converged = maxv <= cfg.stopping.violation_tol;
            out.y = y;
            break;
        }

        let approx_step = |j: usize| {
            bisect(cap, |d| {
                let mut acc = -targets[j];
                for i in 0..n {
                    if pos[j][i] > 0.0 {
                        acc += pos[j][i] * fam.scalar_projection(y[i], d)?;
                    }
                    if neg[j][i] > 0.0 {
                        acc -= neg[j][i] * fam.scalar_projection(y[i], -d)?;
                    }
                }
                Ok(acc)
            })
        };
        let kl = |j: usize, c: f64| {
            let (a, b) = (moment(&pos[j], &y), moment(&neg[j], &y));
            if a == 0.0 && b == 0.0 {
                0.0
            } else {
                bisect(cap, |d| Ok(a * d.exp() - b * (-d).exp() - c))
            }
        };
        let mut delta = vec![0.0; k];
        match algorithm {
            Algorithm::Exact => {
                let j = argmax_abs(&viol);
                delta[j] = bisect(cap, |d| {
                    let mut acc = -targets[j];
                    for i in 0..n {
                        if f_rows[j][i] != 0.0 {
                            acc += f_rows[j][i] * fam.scalar_projection(y[i], d * f_rows[j][i])?;
                        }
                    }
                    Ok(acc)
                });
            }
            Algorithm::ParallelApprox => {
                for (j, d) in delta.iter_mut().enumerate() {
                    *d = approx_step(j);
                }
            }
            Algorithm::SequentialApprox => {
                let j = argmax_abs(&viol);
                delta[j] = approx_step(j);
            }
            Algorithm::KlParallel => {
                for (j, d) in delta.iter_mut().enumerate() {
                    *d = kl(j, targets[j]);
                }
            }
            Algorithm::KlSequential | Algorithm::PartitionMin => {
                let j = argmax_abs(&viol);
                delta[j] = kl(j, targets[j]);
            }
            Algorithm::Qis => {
                for (j, d) in delta.iter_mut().enumerate() {
                    let m = moment(&f_rows[j], &y);
                    if targets[j] > 0.0 {
                        if m <= 1e-300 {
                            return Err(Error::ZeroMoment { coordinate: j, value: m });
                        }
                        *d = (targets[j] / m).ln();
                    }
                }
            }
        }
        for d in delta.iter_mut() {
            *d = d.clamp(-cap, cap);
        }
        for (l, d) in lambda.iter_mut().zip(&delta) {
            *l += d;
        }
        out.deltas.push(delta);
    }
    Ok(out)
}

/// One boosting round: chosen hypothesis, its step and the normalized
/// example weights it was chosen with.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaBoostRound {
    pub hypothesis: usize,
    pub step: f64,
    pub weights: Vec<f64>,
}

/// Textbook AdaBoost with normalized weights. Each round picks the hypothesis
/// with the largest weighted edge `|Σ_i w_i y_i h_j(x_i)|` (lowest index on
/// ties) and steps by `½ ln(W₊/W₋)` with `W₊ = Σ_i w_i max(0, y_i h_j(x_i))`
/// and `W₋ = Σ_i w_i max(0, −y_i h_j(x_i))`.
pub fn classical_adaboost(labels: &[f64], outputs: &[Vec<f64>], rounds: usize) -> Vec<AdaBoostRound> {
    let m = labels.len();
    let mut w = vec![1.0 / m as f64; m];
    let mut history = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let edges: Vec<f64> = outputs
            .iter()
            .map(|h| (0..m).map(|i| w[i] * labels[i] * h[i]).sum())
            .collect();
        let j = argmax_abs(&edges);
        let h = &outputs[j];
        let right: f64 = (0..m).map(|i| w[i] * (labels[i] * h[i]).max(0.0)).sum();
        let wrong: f64 = (0..m).map(|i| w[i] * (-labels[i] * h[i]).max(0.0)).sum();
        let step = 0.5 * (right / wrong).ln();
        history.push(AdaBoostRound {
            hypothesis: j,
            step,
            weights: w.clone(),
        });
        for i in 0..m {
            w[i] *= (-step * labels[i] * h[i]).exp();
        }
        let z: f64 = w.iter().sum();
        for wi in w.iter_mut() {
            *wi /= z;
        }
    }
    history
}
