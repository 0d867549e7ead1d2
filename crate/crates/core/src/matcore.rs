//! Dense Hermitian linear algebra.
//!
//! Everything in the crate is carried by [`HermitianMatrix`]: constraint
//! operators, targets, iterates and shifts. Scalar functions are lifted to
//! matrices through the spectral decomposition, `g(A) = V diag(g(λ)) V†`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Eigenvalues closer than this are treated as one eigenspace.
pub const CLUSTER_GAP: f64 = 1e-9;
/// Relative tolerance used to snap eigenvalues onto a closed endpoint.
pub const SNAP_TOL: f64 = 1e-10;
/// Absolute distance to a closed endpoint that counts as "on the boundary".
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Subspace containment tolerance for admissibility.
pub const ADMISSIBLE_TOL: f64 = 1e-8;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// A dense complex Hermitian operator.
///
/// Construction symmetrizes the input as `(A + A†)/2`, so the stored matrix is
/// Hermitian up to rounding regardless of small asymmetries in the source.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self::hermitize(m))
    }

    fn hermitize(m: CMatrix) -> Self {
        let adj = m.adjoint();
        let inner = (m + adj).scale(0.5);
        HermitianMatrix { inner }
    }

    /// Builds from real row-major entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows must form a square matrix".into()));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        HermitianMatrix {
            inner: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        HermitianMatrix {
            inner: CMatrix::zeros(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let z = C64::new(0.0, 0.0);
        let m = CMatrix::from_row_slice(2, 2, &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z]);
        Self::new(m).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_diagonal(&[1.0, -1.0]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_inner(self) -> CMatrix {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.inner[(i, j)].norm() <= tol))
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix {
            inner: self.inner.map(|z| z * s),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_dims("addition", self, other)?;
        Ok(HermitianMatrix {
            inner: &self.inner + &other.inner,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_dims("subtraction", self, other)?;
        Ok(HermitianMatrix {
            inner: &self.inner - &other.inner,
        })
    }

    /// `Σ c_j M_j`; the list must be non-empty with matching dimensions.
    pub fn linear_combination(coeffs: &[f64], mats: &[HermitianMatrix]) -> Result<Self> {
        if coeffs.len() != mats.len() {
            return Err(Error::DimensionMismatch {
                context: "linear combination length".into(),
                expected: mats.len(),
                found: coeffs.len(),
            });
        }
        let first = mats
            .first()
            .ok_or_else(|| Error::InvalidInput("empty linear combination".into()))?;
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (c, m) in coeffs.iter().zip(mats) {
            check_dims("linear combination", first, m)?;
            if *c != 0.0 {
                acc += m.inner.map(|z| z * *c);
            }
        }
        Ok(HermitianMatrix { inner: acc })
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::hermitize(u * &self.inner * u.adjoint())
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64> {
        let eig = eigendecompose(self)?;
        Ok(eig
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs())))
    }

    /// Frobenius distance between two matrices of the same dimension.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.inner - &other.inner)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.inner[(i, j)];
                    if z.im == 0.0 {
                        format!("{:.6}", z.re)
                    } else {
                        format!("{:.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn check_dims(context: &str, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: context.into(),
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Closed or open interval of the extended real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInput(format!("invalid interval bounds {lo}, {hi}")));
        }
        if (lo.is_infinite() && lo_closed) || (hi.is_infinite() && hi_closed) {
            return Err(Error::InvalidInput("infinite endpoints must be open".into()));
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub const fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub const fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    /// `[lo, ∞)`.
    pub const fn at_least(lo: f64) -> Self {
        Interval {
            lo,
            hi: f64::INFINITY,
            lo_closed: true,
            hi_closed: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// Finite endpoints that belong to the interval.
    pub fn closed_endpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2);
        if self.lo_closed {
            out.push(self.lo);
        }
        if self.hi_closed && self.hi != self.lo {
            out.push(self.hi);
        }
        out
    }

    /// Closed endpoint within [`BOUNDARY_TOL`] of `x`, if any.
    pub fn boundary_point(&self, x: f64) -> Option<f64> {
        self.closed_endpoints()
            .into_iter()
            .find(|e| (x - e).abs() <= BOUNDARY_TOL)
    }

    /// Pulls `x` onto a closed endpoint when it sits within `tol` of it, and
    /// rejects values outside the interval beyond that tolerance.
    pub fn snap(&self, x: f64, tol: f64) -> Result<f64> {
        for e in self.closed_endpoints() {
            if (x - e).abs() <= tol {
                return Ok(e);
            }
        }
        if self.contains(x) {
            Ok(x)
        } else {
            Err(Error::DomainViolation {
                value: x,
                domain: self.to_string(),
            })
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", fmt_endpoint(self.lo), fmt_endpoint(self.hi))
    }
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// Eigenvalues in ascending order with matching unitary eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(g(λ)) V†`.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> HermitianMatrix {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&x| g(x)).collect();
        self.rebuild(&vals)
    }

    /// `V diag(vals) V†` for replacement eigenvalues.
    pub fn rebuild(&self, vals: &[f64]) -> HermitianMatrix {
        let v = &self.eigenvectors;
        let d = DVector::from_iterator(vals.len(), vals.iter().map(|&x| C64::new(x, 0.0)));
        let scaled = v * CMatrix::from_diagonal(&d);
        HermitianMatrix::hermitize(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.rebuild(&self.eigenvalues)
    }

    /// Projector onto the span of the selected eigenvector columns.
    pub fn projector(&self, indices: &[usize]) -> HermitianMatrix {
        let n = self.dim();
        if indices.is_empty() {
            return HermitianMatrix::zeros(n);
        }
        let cols = self.eigenvectors.select_columns(indices);
        HermitianMatrix::hermitize(&cols * cols.adjoint())
    }

    /// `v_i† B v_i` for every eigenvector column.
    pub fn diagonal_weights(&self, b: &HermitianMatrix) -> Vec<f64> {
        let rot = self.eigenvectors.adjoint() * b.matrix() * &self.eigenvectors;
        (0..self.dim()).map(|i| rot[(i, i)].re).collect()
    }

    /// Index ranges of eigenvalue clusters separated by more than [`CLUSTER_GAP`].
    pub fn clusters(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.dim() {
            if i == self.dim() || self.eigenvalues[i] - self.eigenvalues[i - 1] >= CLUSTER_GAP {
                out.push(start..i);
                start = i;
            }
        }
        out
    }
}

/// Dense Hermitian eigendecomposition with ascending eigenvalues.
pub fn eigendecompose(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let dim = a.dim();
    let eig = nalgebra::SymmetricEigen::try_new(a.inner.clone(), EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::EigensolverFailure { dim })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = eig.eigenvectors.select_columns(&order);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn snap_tolerance(eig: &SpectralDecomposition) -> f64 {
    let norm = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    SNAP_TOL * norm.max(1.0)
}

/// Eigendecomposition whose eigenvalues have been snapped into `domain`.
pub fn eigendecompose_in(a: &HermitianMatrix, domain: &Interval) -> Result<SpectralDecomposition> {
    let mut eig = eigendecompose(a)?;
    let tol = snap_tolerance(&eig);
    for v in eig.eigenvalues.iter_mut() {
        *v = domain.snap(*v, tol)?;
    }
    Ok(eig)
}

/// Lifts a scalar function to `a` through its spectrum: `Σ g(λ_k) Π_k`.
pub fn apply_scalar_function(
    a: &HermitianMatrix,
    domain: &Interval,
    g: impl Fn(f64) -> f64,
) -> Result<HermitianMatrix> {
    Ok(eigendecompose_in(a, domain)?.map(g))
}

pub fn expm(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_scalar_function(a, &Interval::real_line(), f64::exp)
}

/// Matrix logarithm of a positive definite matrix.
pub fn logm(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_scalar_function(a, &Interval::open(0.0, f64::INFINITY), f64::ln)
}

/// `tr(A† B)`, which is real for a Hermitian pair.
pub fn inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    check_dims("inner product", a, b)?;
    let z: C64 = a
        .inner
        .iter()
        .zip(b.inner.iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    if z.im.abs() > 1e-8 {
        return Err(Error::NonRealResult { residue: z.im.abs() });
    }
    Ok(z.re)
}

/// Spectral positive part `A⁺`.
pub fn positive_part(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(eigendecompose(a)?.map(|x| x.max(0.0)))
}

/// Spectral negative part `A⁻`, so that `A = A⁺ − A⁻`.
pub fn negative_part(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(eigendecompose(a)?.map(|x| (-x).max(0.0)))
}

/// `|A| = A⁺ + A⁻`.
pub fn abs_part(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(eigendecompose(a)?.map(f64::abs))
}

/// One eigenspace of a matrix sitting on a closed endpoint of its domain.
#[derive(Clone, Debug)]
pub struct BoundaryBlock {
    pub value: f64,
    pub vectors: CMatrix,
}

/// Eigenbasis of a matrix split into interior and boundary eigenspaces.
#[derive(Clone, Debug)]
pub struct SupportSplit {
    pub dim: usize,
    pub interior_values: Vec<f64>,
    /// `dim × r` isometry onto the interior eigenspaces.
    pub interior_vectors: CMatrix,
    pub boundary: Vec<BoundaryBlock>,
}

impl SupportSplit {
    pub fn interior_rank(&self) -> usize {
        self.interior_values.len()
    }

    pub fn is_interior(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Compression `V_int† B V_int` of another operator onto the interior block.
    pub fn compress(&self, b: &HermitianMatrix) -> CMatrix {
        self.interior_vectors.adjoint() * b.matrix() * &self.interior_vectors
    }

    /// Embeds an `r × r` interior block and copies the boundary blocks through.
    pub fn embed(&self, block: &CMatrix) -> HermitianMatrix {
        let mut out = if self.interior_rank() > 0 {
            &self.interior_vectors * block * self.interior_vectors.adjoint()
        } else {
            CMatrix::zeros(self.dim, self.dim)
        };
        for b in &self.boundary {
            if b.value != 0.0 {
                out += (&b.vectors * b.vectors.adjoint()).map(|z| z * b.value);
            }
        }
        HermitianMatrix::hermitize(out)
    }
}

/// Splits `a` into the eigenspaces with eigenvalues in the interior of
/// `domain` and those sitting on a closed endpoint.
pub fn split_support(a: &HermitianMatrix, domain: &Interval) -> Result<SupportSplit> {
    let eig = eigendecompose_in(a, domain)?;
    let mut interior = Vec::new();
    let mut by_endpoint: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        match domain.boundary_point(v) {
            Some(e) => match by_endpoint.iter_mut().find(|(x, _)| *x == e) {
                Some((_, idx)) => idx.push(i),
                None => by_endpoint.push((e, vec![i])),
            },
            None => interior.push(i),
        }
    }
    let interior_values = interior.iter().map(|&i| eig.eigenvalues[i]).collect();
    let interior_vectors = eig.eigenvectors.select_columns(&interior);
    let boundary = by_endpoint
        .into_iter()
        .map(|(value, idx)| BoundaryBlock {
            value,
            vectors: eig.eigenvectors.select_columns(&idx),
        })
        .collect();
    Ok(SupportSplit {
        dim: a.dim(),
        interior_values,
        interior_vectors,
        boundary,
    })
}

/// Projectors `(Π_int, Π_bd)` onto the interior and boundary eigenspaces of `a`.
pub fn support_projector(
    a: &HermitianMatrix,
    domain: &Interval,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let split = split_support(a, domain)?;
    let n = a.dim();
    let pint = if split.interior_rank() > 0 {
        HermitianMatrix::hermitize(&split.interior_vectors * split.interior_vectors.adjoint())
    } else {
        HermitianMatrix::zeros(n)
    };
    let mut pbd = CMatrix::zeros(n, n);
    for b in &split.boundary {
        pbd += &b.vectors * b.vectors.adjoint();
    }
    Ok((pint, HermitianMatrix::hermitize(pbd)))
}

/// `X ▷ Y`: every boundary eigenspace of `y` is an eigenspace of `x` with the
/// same eigenvalue.
pub fn is_admissible(x: &HermitianMatrix, y: &HermitianMatrix, domain: &Interval) -> Result<bool> {
    check_dims("admissibility", x, y)?;
    eigendecompose_in(x, domain)?;
    let split = split_support(y, domain)?;
    Ok(admissible_against(x, &split))
}

pub(crate) fn admissible_against(x: &HermitianMatrix, split: &SupportSplit) -> bool {
    let tol = ADMISSIBLE_TOL * x.frobenius_norm().max(1.0);
    split.boundary.iter().all(|b| {
        let shifted = x.matrix() * &b.vectors - b.vectors.map(|z| z * b.value);
        shifted.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn frob(a: &CMatrix) -> f64 {
        a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn construction_hermitizes() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(2.0, 1.0), C64::new(0.0, 0.0), C64::new(3.0, 0.5)],
        );
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        assert_eq!(h.get(1, 1).im, 0.0);
        assert!(HermitianMatrix::new(CMatrix::zeros(2, 3)).is_err());
        assert!(HermitianMatrix::new(CMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn eigendecompose_examples() {
        let e = eigendecompose(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues.len(), 2);
        assert_abs_diff_eq!(e.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
        let e = eigendecompose(&HermitianMatrix::from_diagonal(&[3.0, -1.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 3.0, epsilon = 1e-14);
        let e = eigendecompose(&HermitianMatrix::pauli_x()).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
        let vv = e.eigenvectors.adjoint() * &e.eigenvectors;
        assert!(frob(&(vv - CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn apply_scalar_function_examples() {
        let x = HermitianMatrix::pauli_y();
        let id = apply_scalar_function(&x, &Interval::real_line(), |v| v).unwrap();
        assert!(id.distance(&x) < 1e-12);

        let a = HermitianMatrix::from_diagonal(&[0.0, 2f64.ln()]).unwrap();
        let e = expm(&a).unwrap();
        assert!(e.distance(&HermitianMatrix::from_diagonal(&[1.0, 2.0]).unwrap()) < 1e-14);
    }

    #[test]
    fn apply_scalar_function_rejects_outside_domain() {
        let a = HermitianMatrix::from_diagonal(&[-1.0, 2.0]).unwrap();
        match logm(&a) {
            Err(Error::DomainViolation { value, .. }) => assert_abs_diff_eq!(value, -1.0, epsilon = 1e-12),
            other => panic!("expected domain violation, got {other:?}"),
        }
    }

    #[test]
    fn snapping_pulls_tiny_negatives_to_endpoint() {
        let a = HermitianMatrix::from_diagonal(&[-1e-13, 1.0]).unwrap();
        let eig = eigendecompose_in(&a, &Interval::at_least(0.0)).unwrap();
        assert_eq!(eig.eigenvalues[0], 0.0);
        let a = HermitianMatrix::from_diagonal(&[-1e-6, 1.0]).unwrap();
        assert!(eigendecompose_in(&a, &Interval::at_least(0.0)).is_err());
    }

    #[test]
    fn inner_examples() {
        assert_abs_diff_eq!(
            inner(&HermitianMatrix::identity(3), &HermitianMatrix::identity(3)).unwrap(),
            3.0
        );
        assert_abs_diff_eq!(
            inner(&HermitianMatrix::pauli_z(), &HermitianMatrix::pauli_x()).unwrap(),
            0.0
        );
        let a = HermitianMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let b = HermitianMatrix::from_diagonal(&[3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(inner(&a, &b).unwrap(), 11.0);
        assert!(matches!(
            inner(&a, &HermitianMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn positive_negative_parts_examples() {
        let a = HermitianMatrix::from_diagonal(&[2.0, -3.0]).unwrap();
        let p = positive_part(&a).unwrap();
        let n = negative_part(&a).unwrap();
        assert!(p.distance(&HermitianMatrix::from_diagonal(&[2.0, 0.0]).unwrap()) < 1e-14);
        assert!(n.distance(&HermitianMatrix::from_diagonal(&[0.0, 3.0]).unwrap()) < 1e-14);

        let z = HermitianMatrix::pauli_z();
        assert!(positive_part(&z).unwrap().distance(&HermitianMatrix::from_diagonal(&[1.0, 0.0]).unwrap()) < 1e-14);
        assert!(negative_part(&z).unwrap().distance(&HermitianMatrix::from_diagonal(&[0.0, 1.0]).unwrap()) < 1e-14);

        let psd = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(positive_part(&psd).unwrap().distance(&psd) < 1e-12);
        assert!(negative_part(&psd).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn support_projector_examples() {
        let dom = Interval::at_least(0.0);
        let (pi, pb) = support_projector(&HermitianMatrix::from_diagonal(&[0.0, 1.0]).unwrap(), &dom).unwrap();
        assert!(pb.distance(&HermitianMatrix::from_diagonal(&[1.0, 0.0]).unwrap()) < 1e-14);
        assert!(pi.distance(&HermitianMatrix::from_diagonal(&[0.0, 1.0]).unwrap()) < 1e-14);

        let (pi, pb) = support_projector(&HermitianMatrix::from_diagonal(&[0.5, 2.0]).unwrap(), &dom).unwrap();
        assert!(pi.distance(&HermitianMatrix::identity(2)) < 1e-14);
        assert!(pb.frobenius_norm() < 1e-14);

        let fd = Interval::closed(0.0, 1.0);
        let (pi, pb) = support_projector(&HermitianMatrix::from_diagonal(&[0.0, 0.5, 1.0]).unwrap(), &fd).unwrap();
        assert_abs_diff_eq!(pb.trace(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pi.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn admissibility_examples() {
        let dom = Interval::at_least(0.0);
        let y = HermitianMatrix::from_diagonal(&[0.5, 1.0]).unwrap();
        let x = HermitianMatrix::from_real_rows(&[vec![1.0, 0.3], vec![0.3, 0.0]]).unwrap();
        assert!(is_admissible(&HermitianMatrix::from_diagonal(&[2.0, 0.0]).unwrap(), &y, &dom).unwrap());
        assert!(!x.is_diagonal(0.0));

        let y = HermitianMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        assert!(is_admissible(&HermitianMatrix::from_diagonal(&[0.0, 2.0]).unwrap(), &y, &dom).unwrap());
        assert!(!is_admissible(&HermitianMatrix::from_diagonal(&[2.0, 0.0]).unwrap(), &y, &dom).unwrap());
        assert!(is_admissible(&y, &y, &dom).unwrap());
    }

    #[test]
    fn interval_display_and_validation() {
        assert_eq!(Interval::at_least(0.0).to_string(), "[0, inf)");
        assert_eq!(Interval::real_line().to_string(), "(-inf, inf)");
        assert!(Interval::new(1.0, 0.0, false, false).is_err());
        assert!(Interval::new(0.0, f64::INFINITY, true, true).is_err());
    }

    #[test]
    fn clusters_group_degenerate_eigenvalues() {
        let e = eigendecompose(&HermitianMatrix::from_diagonal(&[1.0, 1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(e.clusters(), vec![0..2, 2..3]);
    }
}
