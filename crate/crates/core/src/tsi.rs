//! Temporal steering in dimension four.
//!
//! Alice measures a mutually unbiased basis, the state passes through one
//! channel step, and Bob measures the same basis. `S4` adds the probability
//! that Bob reproduces Alice's outcome over two basis settings.

use crate::channel::MemoryChannel;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::measurement::{mub_basis, MUB_COUNT, ZERO_PROBABILITY};
use crate::state::schmidt_state;

/// The basis pair `{M1, M2}` used for the published curves.
pub const PUBLISHED_BASES: (usize, usize) = (1, 2);

#[derive(Clone, Debug)]
pub struct TsiConfig {
    pub k1: f64,
    pub alice_bases: (usize, usize),
    pub channel: MemoryChannel,
}

impl TsiConfig {
    pub fn new(k1: f64, alice_bases: (usize, usize), channel: MemoryChannel) -> Result<Self> {
        schmidt_state(k1)?;
        let (a, b) = alice_bases;
        for i in [a, b] {
            if i >= MUB_COUNT {
                return Err(Error::BadIndex {
                    index: i,
                    max: MUB_COUNT - 1,
                });
            }
        }
        if a == b {
            return Err(Error::InvalidProblem(format!(
                "steering needs two distinct bases, got M{a} twice"
            )));
        }
        Ok(Self {
            k1,
            alice_bases,
            channel,
        })
    }
}

/// Classical bound `1 + 1/sqrt(d)` on the steering sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionBound(u32);

impl DimensionBound {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidProblem(format!("dimension {d} < 2")));
        }
        Ok(Self(d))
    }

    pub fn dimension(&self) -> u32 {
        self.0
    }
}

pub fn classical_bound(b: DimensionBound) -> f64 {
    1.0 + 1.0 / f64::from(b.0).sqrt()
}

pub const TSI_CLASSICAL_BOUND: f64 = 1.5;

/// Bob's outcome distribution for each of Alice's outcomes in one basis;
/// `None` where Alice's outcome has zero probability.
pub fn conditional_distributions(cfg: &TsiConfig, basis: usize) -> Result<[Option<[f64; 4]>; 4]> {
    let rho = schmidt_state(cfg.k1)?.to_density();
    let projectors = mub_basis(basis)?.projectors();
    let mut out = [None; 4];
    for (a, pa) in projectors.iter().enumerate() {
        let branch = pa.sandwich(rho.matrix());
        let prob = branch.trace().re;
        if prob <= ZERO_PROBABILITY {
            continue;
        }
        let evolved = cfg.channel.act(&branch.scale_real(1.0 / prob));
        let mut dist = [0.0; 4];
        for (b, pb) in projectors.iter().enumerate() {
            dist[b] = pb.trace_product_re(&evolved);
        }
        out[a] = Some(dist);
    }
    Ok(out)
}

fn setting_sum(rho: &SquareMatrix, channel: &MemoryChannel, projectors: &[SquareMatrix; 4]) -> f64 {
    projectors
        .iter()
        .map(|p| {
            let branch = p.sandwich(rho);
            if branch.trace().re <= ZERO_PROBABILITY {
                0.0
            } else {
                // P(a) P(b = a | a), via linearity of the channel.
                p.trace_product_re(&channel.act(&branch))
            }
        })
        .sum()
}

/// `sum_a P(a, b = a)` for one basis setting; lies in `[0, 1]`.
pub fn setting_agreement(cfg: &TsiConfig, basis: usize) -> Result<f64> {
    let rho = schmidt_state(cfg.k1)?.to_density();
    Ok(setting_sum(
        rho.matrix(),
        &cfg.channel,
        &mub_basis(basis)?.projectors(),
    ))
}

pub fn s4(cfg: &TsiConfig) -> Result<f64> {
    let (a, b) = cfg.alice_bases;
    Ok(setting_agreement(cfg, a)? + setting_agreement(cfg, b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelKind;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cfg(kind: ChannelKind, p: f64, mu: f64) -> TsiConfig {
        TsiConfig::new(
            FRAC_1_SQRT_2,
            PUBLISHED_BASES,
            MemoryChannel::new(kind, p, mu).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn noiseless_steering_is_maximal() {
        for kind in ChannelKind::ALL {
            for mu in [0.0, 0.5, 1.0] {
                assert_abs_diff_eq!(s4(&cfg(kind, 0.0, mu)).unwrap(), 2.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn amplitude_damping_full_strength_full_memory() {
        assert_abs_diff_eq!(
            s4(&cfg(ChannelKind::AmplitudeDamping, 1.0, 1.0)).unwrap(),
            1.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn phase_damping_hits_classical_bound() {
        assert_abs_diff_eq!(
            s4(&cfg(ChannelKind::PhaseDamping, 0.25, 1.0)).unwrap(),
            1.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn bounds() {
        assert_eq!(classical_bound(DimensionBound::new(4).unwrap()), 1.5);
        assert_abs_diff_eq!(
            classical_bound(DimensionBound::new(2).unwrap()),
            1.0 + FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            classical_bound(DimensionBound::new(100).unwrap()),
            1.1,
            epsilon = 1e-15
        );
        let mut prev = f64::INFINITY;
        for d in 2..200 {
            let b = classical_bound(DimensionBound::new(d).unwrap());
            assert!(b < prev && b > 1.0);
            prev = b;
        }
        assert!(DimensionBound::new(1).is_err());
    }

    #[test]
    fn config_validation() {
        let ch = MemoryChannel::identity();
        assert!(TsiConfig::new(0.5, (1, 1), ch.clone()).is_err());
        assert!(TsiConfig::new(0.5, (1, 5), ch.clone()).is_err());
        assert!(TsiConfig::new(1.5, (1, 2), ch).is_err());
    }

    #[test]
    fn conditionals_are_normalized_and_partial_sums_bounded() {
        for kind in ChannelKind::ALL {
            let c = cfg(kind, 0.6, 0.3);
            for basis in 0..MUB_COUNT {
                for dist in conditional_distributions(&c, basis)
                    .unwrap()
                    .iter()
                    .flatten()
                {
                    assert_abs_diff_eq!(dist.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
                }
                let part = setting_agreement(&c, basis).unwrap();
                assert!((-1e-12..=1.0 + 1e-12).contains(&part));
            }
        }
    }
}
