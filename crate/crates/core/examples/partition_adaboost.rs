//! AdaBoost as partition-function minimization. The matrix solver's steps
//! are compared with textbook AdaBoost on the same stumps.
//!
//! ```text
//! cargo run --example partition_adaboost
//! ```

use bregproj::oracle::{classical_adaboost, golden::adaboost_dataset};
use bregproj::solvers::{exponential_loss, partition_min};
use bregproj::{adaboost_embed, HermitianMatrix, SolverConfig};

fn main() -> bregproj::Result<()> {
    let (labels, outputs) = adaboost_dataset(104);
    let rounds = 50;
    let ops = adaboost_embed(&labels, &outputs)?;
    let cfg = SolverConfig::default()
        .with_max_iterations(rounds + 1)
        .with_violation_tol(0.0);
    let sol = partition_min(&ops, &cfg)?;
    let classical = classical_adaboost(&labels, &outputs, rounds);

    let deltas = sol.trace.deltas();
    let mut worst: f64 = 0.0;
    for (round, (d, c)) in deltas.iter().zip(&classical).enumerate() {
        worst = worst.max((d[c.hypothesis] - c.step).abs());
        if round < 5 {
            println!("round {round}: stump {} step {:.12} (classical {:.12})", c.hypothesis, d[c.hypothesis], c.step);
        }
    }
    println!("largest step difference over {rounds} rounds: {worst:.2e}");

    let z = HermitianMatrix::linear_combination(&sol.state.lambda, &ops)?;
    let partition = bregproj::matcore::expm(&z)?.trace();
    let loss = exponential_loss(&labels, &outputs, &sol.state.lambda)?;
    println!("tr exp(lambda.F) = {partition:.12}, exponential loss = {loss:.12}");
    Ok(())
}
