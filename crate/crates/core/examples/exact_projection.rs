//! Bregman's exact iterative projection under the Euclidean and Shannon
//! families. The Euclidean run is checked against the least-squares answer.
//!
//! ```text
//! cargo run --example exact_projection
//! ```

use bregproj::oracle::least_squares_projection;
use bregproj::random::{random_hermitian, random_positive_definite, seeded_rng};
use bregproj::{exact_bregman, ConstraintSystem, HermitianMatrix, LegendreFamily, Normalization, SolverConfig};

fn main() -> bregproj::Result<()> {
    let mut rng = seeded_rng(11);
    let dim = 3;
    let ops: Vec<HermitianMatrix> = (0..3).map(|_| random_hermitian(&mut rng, dim, 1.0)).collect();
    let x0 = random_positive_definite(&mut rng, dim, 0.2, 1.0);
    let cs = ConstraintSystem::new(ops, x0, Normalization::Free)?;
    let cfg = SolverConfig::default().with_violation_tol(1e-11);

    let euclid = LegendreFamily::euclidean();
    let y0 = HermitianMatrix::identity(dim);
    let sol = exact_bregman(&euclid, &y0, &cs, &cfg)?;
    let (_, y_ls) = least_squares_projection(&y0, &cs)?;
    println!(
        "euclidean: {} iterations, {:?}, distance to least squares {:.2e}",
        sol.trace.iterations(),
        sol.trace.status,
        sol.state.y.distance(&y_ls)
    );

    let shannon = LegendreFamily::shannon();
    let sol = exact_bregman(&shannon, &y0, &cs, &cfg)?;
    println!("shannon:   {} iterations, {:?}", sol.trace.iterations(), sol.trace.status);
    println!("  t  objective      max violation  j");
    for r in sol.trace.records.iter().take(8) {
        println!("{:>3}  {:<13.6e}  {:<13.3e}  {}", r.t, r.objective.value(), r.max_violation, r.step);
    }
    println!("lambda = {:?}", sol.state.lambda);
    Ok(())
}
