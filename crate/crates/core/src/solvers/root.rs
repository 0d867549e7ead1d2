//! Safeguarded root finding for the monotone scalar step equations.

use crate::error::{Error, Result};

/// Result of searching for `g(δ) = 0` with `g` nondecreasing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Root {
    Found(f64),
    /// No sign change before the step cap; the sign says which way the
    /// solution lies.
    BeyondCap(f64),
}

const MAX_EXPANSIONS: usize = 200;
const MAX_BOUNDARY_HALVINGS: usize = 80;
const MAX_BRENT_ITERS: usize = 300;

/// Solves `g(δ) = 0` for nondecreasing `g`.
///
/// Starts at `δ = 0` and doubles the trial step towards the root until the
/// sign changes, staying inside the open admissible interval `range` and the
/// cap `|δ| ≤ cap`. Trial points that `g` rejects with
/// [`Error::InadmissibleShift`] shrink the interval. The bracket is then
/// refined with Brent's method.
pub fn solve_monotone(
    coordinate: usize,
    range: (f64, f64),
    cap: f64,
    mut g: impl FnMut(f64) -> Result<f64>,
) -> Result<Root> {
    let (mut lo_lim, mut hi_lim) = range;
    if !(lo_lim < 0.0 && hi_lim > 0.0) {
        return Err(Error::RootBracketFailure {
            coordinate,
            reason: format!("zero step is not admissible (range {lo_lim}..{hi_lim})"),
        });
    }
    let g0 = g(0.0)?;
    if g0 == 0.0 {
        return Ok(Root::Found(0.0));
    }
    let dir = if g0 > 0.0 { -1.0 } else { 1.0 };
    let mut prev = 0.0;
    let mut gprev = g0;
    let mut step = 1.0_f64.min(cap);
    let mut halvings = 0;
    for _ in 0..MAX_EXPANSIONS + MAX_BOUNDARY_HALVINGS {
        let limit = if dir > 0.0 { hi_lim } else { lo_lim };
        let mut trial = dir * step;
        let capped = trial.abs() >= cap;
        if capped {
            trial = dir * cap;
        }
        let beyond_domain = if dir > 0.0 { trial >= limit } else { trial <= limit };
        if beyond_domain {
            halvings += 1;
            if halvings > MAX_BOUNDARY_HALVINGS {
                return Err(Error::RootBracketFailure {
                    coordinate,
                    reason: "admissible shift range exhausted before a sign change".into(),
                });
            }
            trial = prev + 0.5 * (limit - prev);
        }
        match g(trial) {
            Ok(gt) => {
                if gt.signum() != gprev.signum() || gt == 0.0 {
                    let (a, fa, b, fb) = if trial < prev {
                        (trial, gt, prev, gprev)
                    } else {
                        (prev, gprev, trial, gt)
                    };
                    return Ok(Root::Found(brent(a, fa, b, fb, &mut g)?));
                }
                if capped && !beyond_domain {
                    return Ok(Root::BeyondCap(dir));
                }
                prev = trial;
                gprev = gt;
                if !beyond_domain {
                    step *= 2.0;
                }
            }
            Err(Error::InadmissibleShift { .. }) => {
                if dir > 0.0 {
                    hi_lim = trial;
                } else {
                    lo_lim = trial;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::RootBracketFailure {
        coordinate,
        reason: "bracket expansion did not terminate".into(),
    })
}

/// Brent's method on a bracket with `fa` and `fb` of opposite sign.
fn brent(
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    g: &mut impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_BRENT_ITERS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = g(b)?;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn finds_roots_of_increasing_maps() {
        let r = solve_monotone(0, (f64::NEG_INFINITY, f64::INFINITY), 50.0, |x| Ok(x.exp() - 2.0)).unwrap();
        assert_abs_diff_eq!(match r { Root::Found(x) => x, _ => f64::NAN }, 2f64.ln(), epsilon = 1e-15);
        let r = solve_monotone(0, (f64::NEG_INFINITY, f64::INFINITY), 50.0, |x| Ok(x + 30.0)).unwrap();
        assert_eq!(r, Root::Found(-30.0));
        let r = solve_monotone(0, (f64::NEG_INFINITY, f64::INFINITY), 50.0, |x| Ok(x * x * x)).unwrap();
        assert_eq!(r, Root::Found(0.0));
    }

    #[test]
    fn reports_roots_beyond_the_cap() {
        let r = solve_monotone(0, (f64::NEG_INFINITY, f64::INFINITY), 50.0, |x| Ok(x.exp())).unwrap();
        assert_eq!(r, Root::BeyondCap(-1.0));
    }

    #[test]
    fn respects_open_range() {
        // Root at 0.9 inside the range (−1, 1).
        let r = solve_monotone(0, (-1.0, 1.0), 50.0, |x| Ok(x - 0.9)).unwrap();
        assert_abs_diff_eq!(match r { Root::Found(x) => x, _ => f64::NAN }, 0.9, epsilon = 1e-15);
        // No root inside the range.
        assert!(matches!(
            solve_monotone(0, (-1.0, 1.0), 50.0, |x| Ok(x - 2.0)),
            Err(Error::RootBracketFailure { .. })
        ));
    }

    #[test]
    fn shrinks_on_inadmissible_trials() {
        let r = solve_monotone(3, (f64::NEG_INFINITY, f64::INFINITY), 50.0, |x| {
            if x >= 1.0 {
                Err(Error::InadmissibleShift { value: x, domain: "(-inf, 1)".into() })
            } else {
                Ok(1.0 / (1.0 - x) - 5.0)
            }
        })
        .unwrap();
        assert_abs_diff_eq!(match r { Root::Found(x) => x, _ => f64::NAN }, 0.8, epsilon = 1e-14);
    }
}
