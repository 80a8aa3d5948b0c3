use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempcorr::channel::{
    build_correlated_kraus, build_uncorrelated_kraus, ChannelKind, MemoryChannel,
};
use tempcorr::linalg::{hermitian_eigenvalues, ComplexVector, SquareMatrix};
use tempcorr::state::{schmidt_state, DensityMatrix};
use tempcorr::verify::{channel_properties, random_density};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn memoryless_sets() {
    let ad = build_uncorrelated_kraus(ChannelKind::AmplitudeDamping, 0.0).unwrap();
    let id = SquareMatrix::identity(4).unwrap();
    let zero = SquareMatrix::zeros(4).unwrap();
    assert!(ad
        .ops()
        .iter()
        .all(|k| k.max_abs_diff(&id) == 0.0 || k.max_abs_diff(&zero) == 0.0));
    assert_eq!(
        ad.ops()
            .iter()
            .filter(|k| k.max_abs_diff(&id) == 0.0)
            .count(),
        1
    );

    let pd = build_uncorrelated_kraus(ChannelKind::PhaseDamping, 0.5).unwrap();
    assert_eq!(pd.len(), 4);
    for k in pd.ops() {
        let scale = k.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert_abs_diff_eq!(scale, 0.5, epsilon = 1e-15);
    }

    for p in [0.0, 0.3, 1.0] {
        let dep = build_uncorrelated_kraus(ChannelKind::Depolarizing, p).unwrap();
        assert_eq!(dep.len(), 16);
        assert!(dep.gram_sum().max_abs_diff(&id) < 1e-12);
    }
}

#[test]
fn correlated_damping_at_full_strength() {
    let set = build_correlated_kraus(ChannelKind::AmplitudeDamping, 1.0).unwrap();
    let [e00, e11] = set.ops() else {
        panic!("two operators")
    };
    assert_eq!(
        *e00,
        SquareMatrix::diagonal(&[c(0.0), c(1.0), c(1.0), c(1.0)]).unwrap()
    );
    let mut want = SquareMatrix::zeros(4).unwrap();
    want.set(3, 0, c(1.0));
    assert_eq!(*e11, want);
    for p in [0.0, 0.2, 0.77, 1.0] {
        let set = build_correlated_kraus(ChannelKind::AmplitudeDamping, p).unwrap();
        assert!(
            set.gram_sum()
                .max_abs_diff(&SquareMatrix::identity(4).unwrap())
                < 1e-15
        );
    }
}

#[test]
fn correlated_dephasing_fixes_bell_state() {
    let rho = schmidt_state(FRAC_1_SQRT_2).unwrap().to_density();
    for p in [0.1, 0.5, 1.0] {
        let out = build_correlated_kraus(ChannelKind::PhaseDamping, p)
            .unwrap()
            .act(rho.matrix());
        assert!(out.max_abs_diff(rho.matrix()) < 1e-15);
    }
}

#[test]
fn zero_strength_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in ChannelKind::ALL {
        for mu in [0.0, 0.4, 1.0] {
            let ch = MemoryChannel::new(kind, 0.0, mu).unwrap();
            let rho = random_density(&mut rng);
            assert!(ch.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        }
    }
}

#[test]
fn full_correlated_decay() {
    let ch = MemoryChannel::new(ChannelKind::AmplitudeDamping, 1.0, 1.0).unwrap();
    let ground = ComplexVector::basis(4, 0).unwrap().projector();
    let out = ch.apply(&DensityMatrix::new(ground).unwrap()).unwrap();
    assert_eq!(
        *out.matrix(),
        ComplexVector::basis(4, 3).unwrap().projector()
    );
}

#[test]
fn completeness_examples() {
    for (kind, p, mu) in [
        (ChannelKind::AmplitudeDamping, 0.37, 0.42),
        (ChannelKind::PhaseDamping, 1.0, 0.0),
        (ChannelKind::Depolarizing, 0.9, 1.0),
    ] {
        assert!(
            MemoryChannel::new(kind, p, mu)
                .unwrap()
                .verify_completeness()
                < 1e-12
        );
    }
}

#[test]
fn parameter_validation() {
    assert!(MemoryChannel::new(ChannelKind::PhaseDamping, 1.2, 0.0).is_err());
    assert!(MemoryChannel::new(ChannelKind::PhaseDamping, 0.2, -0.1).is_err());
    assert!(MemoryChannel::new(ChannelKind::Depolarizing, f64::NAN, 0.0).is_err());
}

#[test]
fn channel_suite() {
    for check in channel_properties(11, 100).unwrap() {
        assert!(check.passed, "{check}");
    }
}

#[test]
fn kind_labels_round_trip() {
    for kind in ChannelKind::ALL {
        assert_eq!(kind.label().parse::<ChannelKind>().unwrap(), kind);
    }
    assert!("bitflip".parse::<ChannelKind>().is_err());
}

fn kind() -> impl Strategy<Value = ChannelKind> {
    prop::sample::select(ChannelKind::ALL.to_vec())
}

proptest! {
    #[test]
    fn outputs_are_states(kind in kind(), p in 0.0..=1.0f64, mu in 0.0..=1.0f64, seed in any::<u64>(), steps in 1usize..4) {
        let ch = MemoryChannel::new(kind, p, mu).unwrap();
        prop_assert!(ch.verify_completeness() < 1e-12);
        let rho = random_density(&mut ChaCha8Rng::seed_from_u64(seed));
        let out = ch.apply_n(&rho, steps).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(hermitian_eigenvalues(out.matrix(), 1e-10).unwrap()[0] >= -1e-10);
    }

    #[test]
    fn affine_in_memory(kind in kind(), p in 0.0..=1.0f64, mu in 0.0..=1.0f64, seed in any::<u64>()) {
        let rho = random_density(&mut ChaCha8Rng::seed_from_u64(seed));
        let ch = MemoryChannel::new(kind, p, mu).unwrap();
        let a = ch.with_mu(0.0).unwrap().act(rho.matrix());
        let b = ch.with_mu(1.0).unwrap().act(rho.matrix());
        let mix = a.scale_real(1.0 - mu) + b.scale_real(mu);
        prop_assert!(ch.act(rho.matrix()).max_abs_diff(&mix) < 1e-12);
    }
}
