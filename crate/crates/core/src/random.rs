//! Seeded random instance generators for tests, oracles and examples.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{abs_part, eigendecompose, CMatrix, HermitianMatrix, C64};

pub type InstanceRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rng: &mut impl Rng, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Gaussian Hermitian matrix rescaled to the given spectral norm.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize, spectral_norm: f64) -> HermitianMatrix {
    let h = HermitianMatrix::new(gaussian_matrix(rng, dim)).expect("finite gaussian entries");
    let n = h.spectral_norm().expect("eigensolver");
    if n == 0.0 {
        h
    } else {
        h.scale(spectral_norm / n)
    }
}

/// Real symmetric Gaussian matrix rescaled to the given spectral norm.
pub fn random_real_symmetric(rng: &mut impl Rng, dim: usize, spectral_norm: f64) -> HermitianMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        C64::new(re, 0.0)
    });
    let h = HermitianMatrix::new(m).expect("finite gaussian entries");
    let n = h.spectral_norm().expect("eigensolver");
    if n == 0.0 {
        h
    } else {
        h.scale(spectral_norm / n)
    }
}

/// Haar-ish random unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn uniform_vec(rng: &mut impl Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(lo..hi)).collect()
}

/// `U diag(λ) U†` with eigenvalues drawn uniformly from `[lo, hi)`.
pub fn random_positive_definite(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> HermitianMatrix {
    let vals = uniform_vec(rng, dim, lo, hi);
    let u = random_unitary(rng, dim);
    HermitianMatrix::from_diagonal(&vals).unwrap().conjugate_by(&u)
}

/// Full-rank density matrix with eigenvalues bounded away from zero.
pub fn random_density_matrix(rng: &mut impl Rng, dim: usize) -> HermitianMatrix {
    let rho = random_positive_definite(rng, dim, 0.2, 1.0);
    let t = rho.trace();
    rho.scale(1.0 / t)
}

/// Constraint operators rescaled so that `Σ_j |F_j| ≤ I`.
pub fn random_summed_constraints(rng: &mut impl Rng, dim: usize, k: usize) -> Vec<HermitianMatrix> {
    let fs: Vec<HermitianMatrix> = (0..k).map(|_| random_hermitian(rng, dim, 1.0)).collect();
    let total = fs
        .iter()
        .map(|f| abs_part(f).expect("eigensolver"))
        .reduce(|a, b| a.checked_add(&b).unwrap())
        .expect("k >= 1");
    let top = eigendecompose(&total).expect("eigensolver").eigenvalues[dim - 1];
    let s = 1.0 / (top * (1.0 + 1e-12));
    fs.into_iter().map(|f| f.scale(s)).collect()
}

/// Constraint operators each with spectral norm drawn from `[0.5, 1]`.
pub fn random_per_item_constraints(rng: &mut impl Rng, dim: usize, k: usize) -> Vec<HermitianMatrix> {
    (0..k)
        .map(|_| {
            let n = rng.random_range(0.5..1.0);
            random_hermitian(rng, dim, n)
        })
        .collect()
}

/// PSD operators summing to the identity, `F_j = S^{-1/2} G_j S^{-1/2}` with
/// random PSD `G_j` and `S = Σ G_j`. The resulting operators do not commute.
pub fn random_povm(rng: &mut impl Rng, dim: usize, k: usize) -> Vec<HermitianMatrix> {
    let gs: Vec<HermitianMatrix> = (0..k)
        .map(|_| {
            let g = gaussian_matrix(rng, dim);
            HermitianMatrix::new(&g * g.adjoint()).unwrap()
        })
        .collect();
    let s = gs
        .iter()
        .cloned()
        .reduce(|a, b| a.checked_add(&b).unwrap())
        .unwrap();
    let inv_sqrt = eigendecompose(&s).unwrap().map(|x| 1.0 / x.sqrt());
    gs.iter()
        .map(|g| HermitianMatrix::new(inv_sqrt.matrix() * g.matrix() * inv_sqrt.matrix()).unwrap())
        .collect()
}

/// PSD operators summing to the identity obtained by conjugating a random
/// diagonal partition of unity with one random unitary.
pub fn random_diagonal_partition(rng: &mut impl Rng, dim: usize, k: usize) -> Vec<HermitianMatrix> {
    let u = random_unitary(rng, dim);
    let mut cols = vec![vec![0.0; dim]; k];
    for i in 0..dim {
        let w = uniform_vec(rng, k, 0.0, 1.0);
        let s: f64 = w.iter().sum();
        for j in 0..k {
            cols[j][i] = w[j] / s;
        }
    }
    cols.iter()
        .map(|d| HermitianMatrix::from_diagonal(d).unwrap().conjugate_by(&u))
        .collect()
}

/// Diagonal matrix from a random vector, handy for commuting instances.
pub fn random_diagonal(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> HermitianMatrix {
    let v = DVector::from_vec(uniform_vec(rng, dim, lo, hi));
    HermitianMatrix::from_diagonal(v.as_slice()).unwrap()
}
