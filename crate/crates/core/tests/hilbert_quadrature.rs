use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use suitability::hilbert::{
    interference_pattern, mode_overlap, mode_overlap_quadrature, resolution_limited_overlap, FullPhotonState,
    ModeWavefunction, ResolutionModel,
};
use suitability::photon::poisson_weights;
use suitability::protocol::{Bit, PolarizationState};
use suitability::quadrature::integrate;

fn random_mode(rng: &mut ChaCha8Rng) -> ModeWavefunction {
    ModeWavefunction::new(rng.random_range(-6.0..6.0), rng.random_range(0.3..3.0)).unwrap()
}

#[test]
fn closed_form_overlap_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let (a, b) = (random_mode(&mut rng), random_mode(&mut rng));
        let closed = mode_overlap(&a, &b);
        let numeric = mode_overlap_quadrature(&a, &b).unwrap();
        assert!(
            (numeric - closed).abs() <= 1e-9 * closed,
            "{a:?} {b:?}: {numeric} vs {closed}"
        );
    }
}

#[test]
fn modes_are_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let m = random_mode(&mut rng);
        let span = 40.0 * m.width_ps;
        let norm = integrate(
            |t| m.intensity(t),
            m.center_ps - span,
            m.center_ps + span,
            1e-13,
            1e-300,
        )
        .unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn smearing_only_lowers_overlap_of_separated_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..50 {
        let a = random_mode(&mut rng);
        let b = ModeWavefunction {
            center_ps: a.center_ps + rng.random_range(0.1..5.0),
            ..a
        };
        let sharp = resolution_limited_overlap(&a, &b, &ResolutionModel::ideal());
        let coarse = resolution_limited_overlap(&a, &b, &ResolutionModel::new(rng.random_range(0.1..10.0)).unwrap());
        assert!(coarse >= sharp);
        assert!(coarse <= 1.0);
    }
}

#[test]
fn interference_integrates_to_two_plus_cross_term() {
    let photon = |center: f64, pol: PolarizationState, bit: Bit| FullPhotonState {
        number: poisson_weights(0.1, 7).unwrap(),
        mode: ModeWavefunction::new(center, 1.0).unwrap(),
        polarization: pol,
        bit,
    };
    let a = photon(0.0, PolarizationState::horizontal(), Bit::Zero);
    let b = photon(1.0, PolarizationState::diagonal(), Bit::One);
    let grid: Vec<f64> = (0..=4000).map(|k| -20.0 + 0.01 * k as f64).collect();
    let pattern = interference_pattern(&a, &b, &grid).unwrap();
    let area: f64 = pattern.windows(2).map(|w| 0.5 * (w[0] + w[1]) * 0.01).sum();
    let expected = 2.0 + 2.0 * a.single_photon_overlap(&b).re;
    assert!((area - expected).abs() < 1e-6, "{area} vs {expected}");
}
