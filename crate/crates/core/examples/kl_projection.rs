//! Information projection with the closed-form Kullback-Leibler steps,
//! compared with plain gradient descent on the dual.
//!
//! ```text
//! cargo run --example kl_projection
//! ```

use bregproj::oracle::{dual_descent, RateSchedule};
use bregproj::random::{random_density_matrix, random_summed_constraints, seeded_rng};
use bregproj::{kl_parallel, kl_sequential, ConstraintSystem, HermitianMatrix, LegendreFamily, Normalization, SolverConfig};

fn main() -> bregproj::Result<()> {
    let mut rng = seeded_rng(31);
    let dim = 4;
    let ops = random_summed_constraints(&mut rng, dim, 3);
    let x0 = random_density_matrix(&mut rng, dim);
    let cs = ConstraintSystem::new(ops, x0, Normalization::Summed)?;
    let y0 = HermitianMatrix::identity(dim).scale(1.0 / dim as f64);
    let cfg = SolverConfig::default().with_violation_tol(1e-10);

    let par = kl_parallel(&y0, &cs, &cfg)?;
    let seq = kl_sequential(&y0, &cs, &cfg)?;
    let fam = LegendreFamily::shannon();
    let dd = dual_descent(&fam, &y0, &cs, &vec![0.0; cs.k()], 20_000, &RateSchedule::default())?;

    let objective = |y: &HermitianMatrix| bregproj::bregman_divergence(&fam, cs.x0().unwrap(), y).map(|d| d.value());
    println!("kl_parallel   {:>5} iterations  D = {:.10e}", par.trace.iterations(), objective(&par.state.y)?);
    println!("kl_sequential {:>5} iterations  D = {:.10e}", seq.trace.iterations(), objective(&seq.state.y)?);
    println!("dual descent  {:>5} steps       D = {:.10e}", dd.steps, objective(&dd.y)?);
    println!("|Y_par - Y_dd| = {:.2e}", par.state.y.distance(&dd.y));
    println!("|Y_seq - Y_dd| = {:.2e}", seq.state.y.distance(&dd.y));
    Ok(())
}
