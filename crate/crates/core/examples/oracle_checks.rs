//! The inequality samplers and the Pythagorean identity on a commuting
//! instance.
//!
//! ```text
//! cargo run --release --example oracle_checks
//! ```

use bregproj::oracle::{golden_thompson_check, pythagorean_residual, strong_convexity_sampler};
use bregproj::random::{random_diagonal, seeded_rng};
use bregproj::{kl_sequential, ConstraintSystem, HermitianMatrix, LegendreFamily, Normalization, SolverConfig};

fn main() -> bregproj::Result<()> {
    for fam in [LegendreFamily::shannon(), LegendreFamily::euclidean(), LegendreFamily::fermi_dirac()] {
        println!("{}", strong_convexity_sampler(&fam, 400, 5, 3, 5));
    }
    println!("{}", golden_thompson_check(500, 4, 5));

    // Diagonal data: the projection Y* is computable and any X in the linear
    // family can be built by moving weight inside the level sets of F.
    let mut rng = seeded_rng(51);
    let f = HermitianMatrix::from_diagonal(&[1.0, 1.0, 0.0, 0.0])?;
    let x0 = random_diagonal(&mut rng, 4, 0.1, 1.0);
    let cs = ConstraintSystem::new(vec![f], x0.clone(), Normalization::PerItem)?;
    let y0 = random_diagonal(&mut rng, 4, 0.1, 1.0);
    let y_star = kl_sequential(&y0, &cs, &SolverConfig::default().with_violation_tol(1e-13))?.state.y;
    let fam = LegendreFamily::shannon();
    let d = x0.diagonal();
    for s in [0.0, 0.3, -0.2] {
        let x = HermitianMatrix::from_diagonal(&[d[0] + s * d[1], d[1] - s * d[1], d[2], d[3]])?;
        let r = pythagorean_residual(&fam, &x, &y_star, &y0)?;
        println!("pythagorean residual (shift {s:+}): {:.2e}", r.unwrap_or(f64::NAN));
    }
    Ok(())
}
