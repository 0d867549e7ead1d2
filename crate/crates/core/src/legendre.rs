//! Scalar Legendre families and their matrix Bregman machinery.
//!
//! A [`LegendreFamily`] packages `f`, `f'`, `f*` and `(f*)'` together with the
//! domains `Δ` and `Δ*`. Matrix quantities are computed in the eigenbasis of
//! the anchor `Y`: eigenspaces on a closed endpoint of `Δ` are copied through
//! unchanged and only the interior block is transformed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matcore::{
    admissible_against, eigendecompose, eigendecompose_in, split_support, CMatrix,
    HermitianMatrix, Interval, SupportSplit,
};
use crate::random::seeded_rng;
use crate::solvers::ConstraintSystem;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Names accepted for the built-in families.
pub const BUILTIN_FAMILIES: [&str; 5] = ["euclidean", "hellinger", "shannon", "fermi_dirac", "burg"];

/// Number of sample points drawn when validating a family.
pub const VALIDATION_SAMPLES: usize = 1000;
const VALIDATION_TOL: f64 = 1e-8;

/// A convex function of Legendre type with its derivative, conjugate and
/// conjugate derivative.
#[derive(Clone)]
pub struct LegendreFamily {
    name: String,
    f: ScalarFn,
    fprime: ScalarFn,
    fstar: ScalarFn,
    fstar_prime: ScalarFn,
    domain: Interval,
    conj_domain: Interval,
}

impl fmt::Debug for LegendreFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LegendreFamily")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("conj_domain", &self.conj_domain)
            .finish()
    }
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn arc(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(g)
}

impl LegendreFamily {
    /// Builds a family without validation. Use [`LegendreFamily::custom`] for
    /// user-supplied functions.
    fn raw(
        name: &str,
        f: ScalarFn,
        fprime: ScalarFn,
        fstar: ScalarFn,
        fstar_prime: ScalarFn,
        domain: Interval,
        conj_domain: Interval,
    ) -> Self {
        LegendreFamily {
            name: name.to_string(),
            f,
            fprime,
            fstar,
            fstar_prime,
            domain,
            conj_domain,
        }
    }

    /// `x²/2` on `ℝ`; the divergence is half the squared Frobenius distance.
    pub fn euclidean() -> Self {
        Self::raw(
            "euclidean",
            arc(|x| 0.5 * x * x),
            arc(|x| x),
            arc(|y| 0.5 * y * y),
            arc(|y| y),
            Interval::real_line(),
            Interval::real_line(),
        )
    }

    /// `−√(1−x²)` on `[−1, 1]`.
    pub fn hellinger() -> Self {
        Self::raw(
            "hellinger",
            arc(|x| -(1.0 - x * x).max(0.0).sqrt()),
            arc(|x| x / (1.0 - x * x).sqrt()),
            arc(|y| (1.0 + y * y).sqrt()),
            arc(|y| y / (1.0 + y * y).sqrt()),
            Interval::closed(-1.0, 1.0),
            Interval::real_line(),
        )
    }

    /// Boltzmann/Shannon entropy `x ln x − x` on `[0, ∞)`; the divergence is the
    /// non-normalized relative entropy.
    pub fn shannon() -> Self {
        Self::raw(
            "shannon",
            arc(|x| xlogx(x) - x),
            arc(f64::ln),
            arc(f64::exp),
            arc(f64::exp),
            Interval::at_least(0.0),
            Interval::real_line(),
        )
    }

    /// Fermi/Dirac entropy `x ln x + (1−x) ln(1−x)` on `[0, 1]`.
    pub fn fermi_dirac() -> Self {
        Self::raw(
            "fermi_dirac",
            arc(|x| xlogx(x) + xlogx(1.0 - x)),
            arc(|x| x.ln() - (-x).ln_1p()),
            arc(|y| if y > 0.0 { y + (-y).exp().ln_1p() } else { y.exp().ln_1p() }),
            arc(|y| {
                if y >= 0.0 {
                    1.0 / (1.0 + (-y).exp())
                } else {
                    let e = y.exp();
                    e / (1.0 + e)
                }
            }),
            Interval::closed(0.0, 1.0),
            Interval::real_line(),
        )
    }

    /// Burg entropy `−ln x` on `(0, ∞)`, with conjugate `−1 − ln(−y)` on `(−∞, 0)`.
    pub fn burg() -> Self {
        Self::raw(
            "burg",
            arc(|x| -x.ln()),
            arc(|x| -1.0 / x),
            arc(|y| -1.0 - (-y).ln()),
            arc(|y| -1.0 / y),
            Interval::open(0.0, f64::INFINITY),
            Interval::open(f64::NEG_INFINITY, 0.0),
        )
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "euclidean" => Ok(Self::euclidean()),
            "hellinger" => Ok(Self::hellinger()),
            "shannon" => Ok(Self::shannon()),
            "fermi_dirac" => Ok(Self::fermi_dirac()),
            "burg" => Ok(Self::burg()),
            other => Err(Error::InvalidInput(format!(
                "unknown family '{other}', expected one of {}",
                BUILTIN_FAMILIES.join(", ")
            ))),
        }
    }

    /// A user-defined family, accepted only if it passes [`Self::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fprime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fstar: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fstar_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Interval,
        conj_domain: Interval,
    ) -> Result<Self> {
        if !conj_domain.closed_endpoints().is_empty() {
            return Err(Error::InvalidFamily(format!(
                "conjugate domain {conj_domain} of '{name}' must be open"
            )));
        }
        let fam = Self::raw(name, arc(f), arc(fprime), arc(fstar), arc(fstar_prime), domain, conj_domain);
        fam.validate(VALIDATION_SAMPLES, 0x5eed)?;
        Ok(fam)
    }

    /// Samples interior points and checks `(f*)'(f'(x)) = x` and
    /// `f*(y) = y (f*)'(y) − f((f*)'(y))` for `y = f'(x)`.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = seeded_rng(seed);
        for _ in 0..samples {
            let x = sample_interior(&self.domain, &mut rng);
            let y = self.fprime(x);
            if !self.conj_domain.contains_interior(y) {
                return Err(Error::InvalidFamily(format!(
                    "{}: f'({x}) = {y} is outside the conjugate domain {}",
                    self.name, self.conj_domain
                )));
            }
            let back = self.fstar_prime(y);
            if !((back - x).abs() <= VALIDATION_TOL * x.abs().max(1.0)) {
                return Err(Error::InvalidFamily(format!(
                    "{}: (f*)'(f'({x})) = {back}, conjugate derivative does not invert f'",
                    self.name
                )));
            }
            let lhs = self.fstar(y);
            let rhs = y * back - self.f(back);
            if !((lhs - rhs).abs() <= VALIDATION_TOL * lhs.abs().max(1.0)) {
                return Err(Error::InvalidFamily(format!(
                    "{}: f*({y}) = {lhs} but y (f*)'(y) - f((f*)'(y)) = {rhs}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn conj_domain(&self) -> &Interval {
        &self.conj_domain
    }

    pub fn conj_domain_open(&self) -> bool {
        self.conj_domain.closed_endpoints().is_empty()
    }

    /// True for the one family whose conjugate is known to satisfy the
    /// strong-convexity inequality needed by the approximate solvers.
    pub fn has_strong_convexity_certificate(&self) -> bool {
        self.name == "shannon"
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn fprime(&self, x: f64) -> f64 {
        (self.fprime)(x)
    }

    pub fn fstar(&self, y: f64) -> f64 {
        (self.fstar)(y)
    }

    pub fn fstar_prime(&self, y: f64) -> f64 {
        (self.fstar_prime)(y)
    }

    fn check_shift(&self, v: f64) -> Result<()> {
        if self.conj_domain.contains_interior(v) {
            Ok(())
        } else {
            Err(Error::InadmissibleShift {
                value: v,
                domain: self.conj_domain.to_string(),
            })
        }
    }

    /// Scalar conjugate `ℓ(y, δ) = f*(f'(y)+δ) − f*(f'(y))`; zero on the boundary.
    pub fn scalar_conjugate(&self, y: f64, delta: f64) -> Result<f64> {
        if self.domain.boundary_point(y).is_some() {
            return Ok(0.0);
        }
        let g = self.fprime(y);
        self.check_shift(g + delta)?;
        Ok(self.fstar(g + delta) - self.fstar(g))
    }

    /// Scalar projection `L(y, δ) = (f*)'(f'(y)+δ)`; boundary points are fixed.
    pub fn scalar_projection(&self, y: f64, delta: f64) -> Result<f64> {
        if self.domain.boundary_point(y).is_some() {
            return Ok(y);
        }
        let g = self.fprime(y) + delta;
        self.check_shift(g)?;
        Ok(self.fstar_prime(g))
    }

    /// Scalar divergence `f(x) − f(y) − f'(y)(x − y)` for interior `y`.
    pub fn scalar_divergence(&self, x: f64, y: f64) -> f64 {
        self.f(x) - self.f(y) - self.fprime(y) * (x - y)
    }

    /// Open interval of scalar shifts `δ` keeping `f'(y_i) + δ` inside `Δ*`
    /// for every interior value `y_i`.
    pub fn admissible_shift_range(&self, interior_values: &[f64]) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for &y in interior_values {
            let g = self.fprime(y);
            lo = lo.max(self.conj_domain.lo - g);
            hi = hi.min(self.conj_domain.hi - g);
        }
        (lo, hi)
    }
}

fn sample_interior(domain: &Interval, rng: &mut impl Rng) -> f64 {
    match (domain.lo.is_finite(), domain.hi.is_finite()) {
        (true, true) => {
            let u = rng.random_range(1e-3..1.0 - 1e-3);
            domain.lo + u * (domain.hi - domain.lo)
        }
        (true, false) => domain.lo + rng.random_range(-4.0..4.0_f64).exp(),
        (false, true) => domain.hi - rng.random_range(-4.0..4.0_f64).exp(),
        (false, false) => rng.random_range(-10.0..10.0),
    }
}

/// Name-keyed table of families. Registration takes `&mut self`, so there
/// is a single writer; lookups clone the cheap `Arc`-backed family.
#[derive(Clone, Debug)]
pub struct FamilyRegistry {
    families: BTreeMap<String, LegendreFamily>,
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl FamilyRegistry {
    pub fn with_builtins() -> Self {
        let families = BUILTIN_FAMILIES
            .iter()
            .map(|n| (n.to_string(), LegendreFamily::builtin(n).unwrap()))
            .collect();
        FamilyRegistry { families }
    }

    pub fn get(&self, name: &str) -> Result<LegendreFamily> {
        self.families
            .get(name)
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("unknown family '{name}'")))
    }

    pub fn names(&self) -> Vec<&str> {
        self.families.keys().map(String::as_str).collect()
    }

    /// Validates and inserts a family; existing names cannot be replaced.
    pub fn register(&mut self, fam: LegendreFamily) -> Result<()> {
        if self.families.contains_key(fam.name()) {
            return Err(Error::InvalidFamily(format!("'{}' is already registered", fam.name())));
        }
        fam.validate(VALIDATION_SAMPLES, 0x5eed)?;
        self.families.insert(fam.name().to_string(), fam);
        Ok(())
    }
}

/// Real number or `+∞`. Divergences use `+∞` for non-admissible pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// The value as an `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn value(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v:e}"),
            ExtendedReal::PosInfinity => write!(f, "inf"),
        }
    }
}

/// An anchor `Y` prepared for repeated projections `L_f(Y, Λ)`: the
/// eigenbasis split and `f'` of the interior eigenvalues are cached.
#[derive(Clone, Debug)]
pub struct ProjectionBase {
    family: LegendreFamily,
    split: SupportSplit,
    gradient: Vec<f64>,
    conj_at_zero: f64,
}

impl ProjectionBase {
    pub fn new(family: &LegendreFamily, y: &HermitianMatrix) -> Result<Self> {
        let split = split_support(y, family.domain())?;
        let gradient: Vec<f64> = split.interior_values.iter().map(|&v| family.fprime(v)).collect();
        let conj_at_zero = gradient.iter().map(|&g| family.fstar(g)).sum();
        Ok(ProjectionBase {
            family: family.clone(),
            split,
            gradient,
            conj_at_zero,
        })
    }

    pub fn split(&self) -> &SupportSplit {
        &self.split
    }

    pub fn family(&self) -> &LegendreFamily {
        &self.family
    }

    /// Spectrum of `f'(Y_int) + Λ_int(Y)` in the interior eigenbasis of `Y`.
    fn shifted(&self, lambda: &HermitianMatrix) -> Result<Option<crate::matcore::SpectralDecomposition>> {
        if lambda.dim() != self.split.dim {
            return Err(Error::DimensionMismatch {
                context: "projection shift".into(),
                expected: self.split.dim,
                found: lambda.dim(),
            });
        }
        let r = self.split.interior_rank();
        if r == 0 {
            return Ok(None);
        }
        let mut block = self.split.compress(lambda);
        for i in 0..r {
            block[(i, i)] += self.gradient[i];
        }
        let eig = eigendecompose(&HermitianMatrix::new(block)?)?;
        for &mu in &eig.eigenvalues {
            self.family.check_shift(mu)?;
        }
        Ok(Some(eig))
    }

    /// `L_f(Y, Λ)` together with `ℓ_f(Y, Λ)`.
    pub fn project_with_conjugate(&self, lambda: &HermitianMatrix) -> Result<(HermitianMatrix, f64)> {
        match self.shifted(lambda)? {
            None => Ok((self.split.embed(&CMatrix::zeros(0, 0)), 0.0)),
            Some(eig) => {
                let block = eig.map(|mu| self.family.fstar_prime(mu));
                let conj: f64 = eig.eigenvalues.iter().map(|&mu| self.family.fstar(mu)).sum::<f64>()
                    - self.conj_at_zero;
                Ok((self.split.embed(block.matrix()), conj))
            }
        }
    }

    pub fn project(&self, lambda: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(self.project_with_conjugate(lambda)?.0)
    }

    pub fn conjugate(&self, lambda: &HermitianMatrix) -> Result<f64> {
        Ok(self.project_with_conjugate(lambda)?.1)
    }
}

/// Extended Bregman divergence `D_f(X, Y)`; `+∞` when `X ▷ Y` fails.
pub fn bregman_divergence(
    fam: &LegendreFamily,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
) -> Result<ExtendedReal> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            context: "bregman divergence".into(),
            expected: y.dim(),
            found: x.dim(),
        });
    }
    eigendecompose_in(x, fam.domain())?;
    let split = split_support(y, fam.domain())?;
    divergence_against(fam, x, &split)
}

pub(crate) fn divergence_against(
    fam: &LegendreFamily,
    x: &HermitianMatrix,
    split: &SupportSplit,
) -> Result<ExtendedReal> {
    if !admissible_against(x, split) {
        return Ok(ExtendedReal::PosInfinity);
    }
    let r = split.interior_rank();
    if r == 0 {
        return Ok(ExtendedReal::Finite(0.0));
    }
    let xr = HermitianMatrix::new(split.compress(x))?;
    let tr_fx: f64 = eigendecompose_in(&xr, fam.domain())?
        .eigenvalues
        .iter()
        .map(|&v| fam.f(v))
        .sum();
    let mut total = tr_fx;
    let mut scale = tr_fx.abs();
    for (i, &yv) in split.interior_values.iter().enumerate() {
        let fy = fam.f(yv);
        let lin = fam.fprime(yv) * (xr.get(i, i).re - yv);
        total -= fy + lin;
        scale += fy.abs() + lin.abs();
    }
    if total < -1e-9 * scale.max(1.0) {
        log::warn!("bregman divergence evaluated to {total:e}; clamping to zero");
    }
    Ok(ExtendedReal::Finite(total.max(0.0)))
}

/// Legendre-Bregman projection `L_f(Y, Λ) = (f*)'(f'(Y) + Λ)` on the support
/// of `Y`, with the boundary block of `Y` copied through.
pub fn lb_projection(fam: &LegendreFamily, y: &HermitianMatrix, lambda: &HermitianMatrix) -> Result<HermitianMatrix> {
    ProjectionBase::new(fam, y)?.project(lambda)
}

/// Legendre-Bregman conjugate `ℓ_f(Y, Λ) = tr f*(f'(Y)+Λ) − tr f*(f'(Y))`.
pub fn lb_conjugate(fam: &LegendreFamily, y: &HermitianMatrix, lambda: &HermitianMatrix) -> Result<f64> {
    ProjectionBase::new(fam, y)?.conjugate(lambda)
}

/// `ℓ̂_f(Y, δ) = Σ_i ℓ_f(y_i, δ) Π_i`.
pub fn lb_conjugate_scalar_lift(fam: &LegendreFamily, y: &HermitianMatrix, delta: f64) -> Result<HermitianMatrix> {
    let eig = eigendecompose_in(y, fam.domain())?;
    let vals = eig
        .eigenvalues
        .iter()
        .map(|&v| fam.scalar_conjugate(v, delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(eig.rebuild(&vals))
}

/// `L_f(Y, δ I)` computed eigenvalue by eigenvalue.
pub fn lb_projection_scalar_lift(fam: &LegendreFamily, y: &HermitianMatrix, delta: f64) -> Result<HermitianMatrix> {
    let eig = eigendecompose_in(y, fam.domain())?;
    let vals = eig
        .eigenvalues
        .iter()
        .map(|&v| fam.scalar_projection(v, delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(eig.rebuild(&vals))
}

/// `D_f(X0, L_f(Y0, λ·F))`. Requires the constraint system to carry `X0`.
pub fn dual_objective(
    fam: &LegendreFamily,
    y0: &HermitianMatrix,
    cs: &ConstraintSystem,
    lambda: &[f64],
) -> Result<ExtendedReal> {
    let x0 = cs
        .x0()
        .ok_or_else(|| Error::InvalidInput("dual objective needs the reference matrix X0".into()))?;
    let y = lb_projection(fam, y0, &cs.combination(lambda)?)?;
    bregman_divergence(fam, x0, &y)
}

/// `ℓ_f(Y0, λ·F) − Σ_j λ_j α_j`, equal to `D_f(X0, L_f(Y0, λ·F)) − D_f(X0, Y0)`
/// and computable from the targets alone.
pub fn dual_potential(
    fam: &LegendreFamily,
    y0: &HermitianMatrix,
    cs: &ConstraintSystem,
    lambda: &[f64],
) -> Result<f64> {
    let conj = lb_conjugate(fam, y0, &cs.combination(lambda)?)?;
    let lin: f64 = lambda.iter().zip(cs.targets()).map(|(l, a)| l * a).sum();
    Ok(conj - lin)
}

/// Gradient of `λ ↦ D_f(X0, L_f(Y0, λ·F))`: `g_j = ⟨F_j, L_f(Y0, λ·F)⟩ − ⟨F_j, X0⟩`.
pub fn dual_objective_gradient(
    fam: &LegendreFamily,
    y0: &HermitianMatrix,
    cs: &ConstraintSystem,
    lambda: &[f64],
) -> Result<Vec<f64>> {
    let y = lb_projection(fam, y0, &cs.combination(lambda)?)?;
    cs.violation(&y)
}
