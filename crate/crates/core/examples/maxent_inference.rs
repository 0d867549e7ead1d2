//! Maximum-entropy inference of a two-qubit state from a few Pauli
//! expectation values.
//!
//! ```text
//! cargo run --example maxent_inference
//! ```

use bregproj::matcore::{inner, HermitianMatrix};
use bregproj::random::{random_density_matrix, seeded_rng};
use bregproj::solvers::maxent;
use bregproj::SolverConfig;

/// Tensor product of two 2 × 2 matrices.
fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::new(a.matrix().kronecker(b.matrix())).expect("product of Hermitian matrices")
}

/// `(I + P)/8` is a valid effect for any Pauli string `P`, and four of them
/// sum to at most I.
fn effect(p: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::identity(4).checked_add(p).unwrap().scale(0.125)
}

fn main() -> bregproj::Result<()> {
    let (x, z) = (HermitianMatrix::pauli_x(), HermitianMatrix::pauli_z());
    let i2 = HermitianMatrix::identity(2);
    let ops = vec![effect(&kron(&z, &i2)), effect(&kron(&i2, &z)), effect(&kron(&z, &z)), effect(&kron(&x, &x))];

    let mut rng = seeded_rng(41);
    let hidden = random_density_matrix(&mut rng, 4);
    let targets: Vec<f64> = ops.iter().map(|f| inner(f, &hidden)).collect::<Result<_, _>>()?;

    let r = maxent(&targets, &ops, 4, &SolverConfig::default().with_violation_tol(1e-10))?;
    println!("{} iterations, converged: {}", r.solution.trace.iterations(), !r.non_converged);
    println!("entropy of the maxent state {:.8}", r.entropy);
    println!("entropy of the hidden state {:.8}", bregproj::solvers::von_neumann_entropy(&hidden)?);
    for (j, f) in ops.iter().enumerate() {
        println!("  <F_{j}>: target {:.8}  maxent {:.8}", targets[j], inner(f, &r.state)?);
    }
    println!("hamiltonian parameters {:?}", r.hamiltonian_parameters());
    let peak = r.solution.trace.records.iter().map(|rec| rec.trace_y).fold(f64::MIN, f64::max);
    println!("largest tr Y over the run {peak:.12}");
    Ok(())
}
