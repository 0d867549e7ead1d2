//! The five built-in families side by side: divergence between two fixed
//! matrices, a projection step, and what happens on the domain boundary.
//!
//! ```text
//! cargo run --example legendre_families
//! ```

use bregproj::matcore::HermitianMatrix;
use bregproj::{bregman_divergence, lb_conjugate, lb_projection, FamilyRegistry};

fn main() -> bregproj::Result<()> {
    // Both matrices have spectrum inside (0, 1), so every family accepts them.
    let x = HermitianMatrix::from_real_rows(&[vec![0.6, 0.1], vec![0.1, 0.3]])?;
    let y = HermitianMatrix::from_real_rows(&[vec![0.5, -0.05], vec![-0.05, 0.4]])?;
    let lambda = HermitianMatrix::pauli_z().scale(0.2);

    let registry = FamilyRegistry::with_builtins();
    println!("{:<12} {:>12} {:>12} {:>10}", "family", "D(X, Y)", "l(Y, 0.2Z)", "tr L(Y,.)");
    for name in registry.names() {
        let fam = registry.get(name)?;
        let d = bregman_divergence(&fam, &x, &y)?;
        let conj = lb_conjugate(&fam, &y, &lambda)?;
        let proj = lb_projection(&fam, &y, &lambda)?;
        println!("{name:<12} {:>12.6e} {conj:>12.6e} {:>10.6}", d.value(), proj.trace());
    }

    // A rank-deficient Y sits on the boundary of the Shannon domain. The
    // projection leaves its kernel alone and the divergence is finite only
    // for X that vanishes on that kernel.
    let shannon = registry.get("shannon")?;
    let boundary = HermitianMatrix::from_diagonal(&[0.7, 0.0])?;
    let shift = HermitianMatrix::pauli_x().scale(0.5);
    let moved = lb_projection(&shannon, &boundary, &shift)?;
    println!("\nL(diag(0.7, 0), 0.5X) has diagonal {:?}", moved.diagonal());
    let inside = HermitianMatrix::from_diagonal(&[0.2, 0.0])?;
    println!("D(diag(0.2, 0), Y) = {}", bregman_divergence(&shannon, &inside, &boundary)?.value());
    println!("D(X, Y)            = {}", bregman_divergence(&shannon, &x, &boundary)?.value());
    Ok(())
}
