//! Parallel and sequential approximate projection. Shannon comes with a
//! descent guarantee; Fermi-Dirac runs but its trace is flagged.
//!
//! ```text
//! cargo run --example approximate_projection
//! ```

use bregproj::random::{random_summed_constraints, seeded_rng};
use bregproj::solvers::DESCENT_SLACK;
use bregproj::{
    parallel_approx, sequential_approx, ConstraintSystem, HermitianMatrix, LegendreFamily, Normalization,
    SolverConfig,
};

fn main() -> bregproj::Result<()> {
    let mut rng = seeded_rng(21);
    let dim = 3;
    let ops = random_summed_constraints(&mut rng, dim, 3);
    // A reference point in (0, 1) keeps both families happy.
    let x0 = HermitianMatrix::from_real_rows(&[
        vec![0.5, 0.1, 0.0],
        vec![0.1, 0.3, 0.05],
        vec![0.0, 0.05, 0.6],
    ])?;
    let cs = ConstraintSystem::new(ops, x0, Normalization::Summed)?;
    let y0 = HermitianMatrix::identity(dim).scale(0.5);
    let cfg = SolverConfig::default().with_violation_tol(1e-9);

    for fam in [LegendreFamily::shannon(), LegendreFamily::fermi_dirac()] {
        for (label, sol) in [
            ("parallel", parallel_approx(&fam, &y0, &cs, &cfg)?),
            ("sequential", sequential_approx(&fam, &y0, &cs, &cfg)?),
        ] {
            let last = sol.trace.last().expect("at least one row");
            println!(
                "{:<12} {label:<10} {:>5} iterations  D = {:.8e}  violation {:.1e}  monotone {}  unverified {}",
                fam.name(),
                sol.trace.iterations(),
                last.objective.value(),
                last.max_violation,
                sol.trace.monotonicity_breaks(DESCENT_SLACK).is_empty(),
                sol.trace.flags.strong_convexity_unverified
            );
        }
    }
    Ok(())
}
