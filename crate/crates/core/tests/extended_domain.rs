//! Boundary behavior beyond what the acceptance suite gates on.

use bregproj::matcore::HermitianMatrix;
use bregproj::random::{random_hermitian, random_unitary, seeded_rng, uniform_vec};
use bregproj::{bregman_divergence, lb_projection, LegendreFamily};

/// When Λ couples the kernel of Y to its support, interior perturbations
/// still converge to the boundary projection, but only like 1/|ln ε|.
/// Perturbations below the boundary tolerance (1e-9) already count as zero.
#[test]
fn coupled_shifts_converge_slowly() {
    let fam = LegendreFamily::shannon();
    let mut rng = seeded_rng(77);
    for _ in 0..5 {
        let u = random_unitary(&mut rng, 3);
        let mut spectrum = uniform_vec(&mut rng, 3, 0.3, 1.0);
        spectrum[0] = 0.0;
        let y = HermitianMatrix::from_diagonal(&spectrum).unwrap().conjugate_by(&u);
        let lambda = random_hermitian(&mut rng, 3, 1.0);
        let boundary = lb_projection(&fam, &y, &lambda).unwrap();
        let gaps: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&eps| {
                let mut s = spectrum.clone();
                s[0] = eps;
                let y_eps = HermitianMatrix::from_diagonal(&s).unwrap().conjugate_by(&u);
                lb_projection(&fam, &y_eps, &lambda).unwrap().distance(&boundary)
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] < gaps[0] / 2.0, "{gaps:?}");
    }
}

#[test]
fn divergence_to_a_boundary_point_from_itself_is_zero() {
    let fam = LegendreFamily::shannon();
    let y = HermitianMatrix::from_diagonal(&[0.0, 0.4, 0.6]).unwrap();
    assert_eq!(bregman_divergence(&fam, &y, &y).unwrap().value(), 0.0);
    let euclid = LegendreFamily::euclidean();
    // The Euclidean domain has no boundary: every pair is admissible.
    assert!(bregman_divergence(&euclid, &HermitianMatrix::identity(3).scale(-2.0), &y).unwrap().is_finite());
}
