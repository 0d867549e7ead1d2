use proptest::prelude::*;

use bregproj::cli::tracefile::{TraceFile, TraceHeader, COLUMNS, TRACE_FORMAT};
use bregproj::matcore::{inner, HermitianMatrix};
use bregproj::oracle::random_interior_matrix;
use bregproj::random::{random_hermitian, seeded_rng};
use bregproj::solvers::{kl_step, KlStep, StepIndex, TraceRecord};
use bregproj::{bregman_divergence, lb_conjugate, lb_projection, ExtendedReal, LegendreFamily};

fn family(i: usize) -> LegendreFamily {
    [
        LegendreFamily::euclidean(),
        LegendreFamily::hellinger(),
        LegendreFamily::shannon(),
        LegendreFamily::fermi_dirac(),
        LegendreFamily::burg(),
    ][i % 5]
        .clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn divergence_is_nonnegative_and_vanishes_on_the_diagonal(seed in any::<u64>(), fi in 0usize..5, dim in 1usize..5) {
        let fam = family(fi);
        let mut rng = seeded_rng(seed);
        let x = random_interior_matrix(&mut rng, fam.domain(), dim);
        let y = random_interior_matrix(&mut rng, fam.domain(), dim);
        prop_assert!(bregman_divergence(&fam, &x, &y).unwrap().value() >= 0.0);
        prop_assert!(bregman_divergence(&fam, &y, &y).unwrap().value().abs() < 1e-10);
    }

    #[test]
    fn zero_shift_is_the_identity(seed in any::<u64>(), fi in 0usize..5, dim in 1usize..5) {
        let fam = family(fi);
        let mut rng = seeded_rng(seed);
        let y = random_interior_matrix(&mut rng, fam.domain(), dim);
        let p = lb_projection(&fam, &y, &HermitianMatrix::zeros(dim)).unwrap();
        prop_assert!(p.distance(&y) < 1e-9);
    }

    /// The projection attains the supremum defining the conjugate, and any
    /// other X stays below it.
    #[test]
    fn projection_attains_the_conjugate(seed in any::<u64>(), fi in 0usize..4, dim in 1usize..4) {
        let fam = family(fi);
        let mut rng = seeded_rng(seed);
        let y = random_interior_matrix(&mut rng, fam.domain(), dim);
        let lambda = random_hermitian(&mut rng, dim, 0.3);
        let Ok(l) = lb_projection(&fam, &y, &lambda) else { return Ok(()) };
        let conj = lb_conjugate(&fam, &y, &lambda).unwrap();
        let at_l = inner(&lambda, &l).unwrap() - bregman_divergence(&fam, &l, &y).unwrap().value();
        prop_assert!((conj - at_l).abs() < 1e-8 * conj.abs().max(1.0));
        let x = random_interior_matrix(&mut rng, fam.domain(), dim);
        let at_x = inner(&lambda, &x).unwrap() - bregman_divergence(&fam, &x, &y).unwrap().value();
        prop_assert!(at_x <= conj + 1e-9);
    }

    #[test]
    fn kl_step_solves_its_equation(a in 0.0f64..5.0, b in 0.0f64..5.0, c in -5.0f64..5.0) {
        match kl_step(a, b, c) {
            KlStep::Finite(d) => {
                let r = a * d.exp() - b * (-d).exp() - c;
                prop_assert!(r.abs() < 1e-9 * (a * d.exp() + b * (-d).exp() + c.abs()).max(1.0));
            }
            KlStep::Unbounded(_) => prop_assert!(a == 0.0 || b == 0.0),
        }
    }

    #[test]
    fn trace_rows_round_trip(
        rows in proptest::collection::vec((any::<bool>(), -1e6f64..1e6, 0.0f64..1e3, proptest::collection::vec(-60.0f64..60.0, 3)), 1..6)
    ) {
        let records: Vec<TraceRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, (inf, obj, viol, delta))| TraceRecord {
                t: i + 1,
                objective: if *inf { ExtendedReal::PosInfinity } else { ExtendedReal::Finite(*obj) },
                max_violation: *viol,
                step: if i % 2 == 0 { StepIndex::All } else { StepIndex::Coordinate(i % 3) },
                delta: delta.clone(),
                trace_y: obj.abs(),
                seconds: 1e-3 * i as f64,
                auxiliary: None,
            })
            .collect();
        let trace = TraceFile {
            header: TraceHeader {
                format: TRACE_FORMAT.into(),
                problem_hash: String::new(),
                subcommand: "project".into(),
                solver: "exact".into(),
                family: "shannon".into(),
                max_iterations: 10,
                violation_tol: 1e-8,
                divergence_delta_tol: 0.0,
                delta_max: 50.0,
                columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
            },
            rows: records,
            footer: None,
        };
        prop_assert_eq!(TraceFile::parse(&trace.render()).unwrap(), trace);
    }
}
