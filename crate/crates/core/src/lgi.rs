//! Two-time correlators and the four-term Leggett-Garg quantity.
//!
//! Time placement: the state is prepared at `t1`, the channel acts once per
//! unit interval, and no channel acts before the first measurement. A
//! correlator `C_ij` therefore sees `i - 1` applications before `Q_i` and
//! `j - i` applications between `Q_i` and `Q_j`.

use serde::{Deserialize, Serialize};

use crate::channel::MemoryChannel;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::measurement::{bsm_scheme, BsmScheme, BsmType, ZERO_PROBABILITY};
use crate::state::{schmidt_state, DensityMatrix, Direction};

/// Eight measurement angles in radians: `theta_1..4` then `phi_1..4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub theta: [f64; 4],
    pub phi: [f64; 4],
}

impl AngleSet {
    /// From the flat `[theta1..theta4, phi1..phi4]` layout.
    pub fn from_flat(v: &[f64]) -> Result<Self> {
        if v.len() != 8 {
            return Err(Error::DimensionMismatch {
                left: 8,
                right: v.len(),
            });
        }
        let mut theta = [0.0; 4];
        let mut phi = [0.0; 4];
        theta.copy_from_slice(&v[..4]);
        phi.copy_from_slice(&v[4..]);
        let set = Self { theta, phi };
        set.directions()?;
        Ok(set)
    }

    pub fn to_flat(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        out[..4].copy_from_slice(&self.theta);
        out[4..].copy_from_slice(&self.phi);
        out
    }

    pub fn directions(&self) -> Result<[Direction; 4]> {
        let mut out = [Direction::new(0.0, 0.0)?; 4];
        for (i, d) in out.iter_mut().enumerate() {
            *d = Direction::new(self.theta[i], self.phi[i])?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct LgiConfig {
    pub k1: f64,
    pub directions: [Direction; 4],
    pub bsm_type: BsmType,
    pub channel: MemoryChannel,
}

impl LgiConfig {
    pub fn new(
        k1: f64,
        angles: &AngleSet,
        bsm_type: BsmType,
        channel: MemoryChannel,
    ) -> Result<Self> {
        schmidt_state(k1)?;
        Ok(Self {
            k1,
            directions: angles.directions()?,
            bsm_type,
            channel,
        })
    }
}

/// Measurement-time pair `(i, j)` with `1 <= i < j <= 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorrelatorPair {
    i: usize,
    j: usize,
}

impl CorrelatorPair {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if !(1..=4).contains(&i) || !(1..=4).contains(&j) || i >= j {
            return Err(Error::InvalidProblem(format!(
                "correlator pair ({i}, {j}) needs 1 <= i < j <= 4"
            )));
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }
}

/// Joint outcome distribution of `(Q_i, Q_j)`, indexed `[k][l]` with index 0
/// for outcome +1 and 1 for -1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointDistribution(pub [[f64; 2]; 2]);

impl JointDistribution {
    pub fn correlation(&self) -> f64 {
        let [[pp, pm], [mp, mm]] = self.0;
        pp - pm - mp + mm
    }

    pub fn total(&self) -> f64 {
        self.0.iter().flatten().sum()
    }
}

fn outcome_slot(outcome: i8) -> usize {
    if outcome > 0 {
        0
    } else {
        1
    }
}

fn propagate(channel: &MemoryChannel, m: &SquareMatrix, steps: usize) -> SquareMatrix {
    (0..steps).fold(*m, |acc, _| channel.act(&acc))
}

/// Exact enumeration over collapse branches. The channel map is linear, so
/// evolving the unnormalized branch `P rho P` gives `P(k) P(l|k)` directly.
fn joint_distribution_raw(
    rho: &SquareMatrix,
    channel: &MemoryChannel,
    first: &BsmScheme,
    second: &BsmScheme,
    before: usize,
    between: usize,
) -> JointDistribution {
    let evolved = propagate(channel, rho, before);
    let mut joint = [[0.0; 2]; 2];
    for b in first.branches() {
        let branch = b.projector.sandwich(&evolved);
        if branch.trace().re <= ZERO_PROBABILITY {
            continue;
        }
        let later = propagate(channel, &branch, between);
        for c in second.branches() {
            joint[outcome_slot(b.outcome)][outcome_slot(c.outcome)] +=
                c.projector.trace_product_re(&later);
        }
    }
    JointDistribution(joint)
}

/// A configuration with its four measurement schemes and initial state built.
#[derive(Clone, Debug)]
pub struct PreparedLgi {
    rho: DensityMatrix,
    schemes: [BsmScheme; 4],
    channel: MemoryChannel,
}

impl PreparedLgi {
    pub fn new(cfg: &LgiConfig) -> Result<Self> {
        let rho = schmidt_state(cfg.k1)?.to_density();
        let schemes = cfg.directions.map(|d| bsm_scheme(cfg.bsm_type, d));
        Ok(Self {
            rho,
            schemes,
            channel: cfg.channel.clone(),
        })
    }

    pub fn joint_distribution(&self, pair: CorrelatorPair) -> JointDistribution {
        joint_distribution_raw(
            self.rho.matrix(),
            &self.channel,
            &self.schemes[pair.i - 1],
            &self.schemes[pair.j - 1],
            pair.i - 1,
            pair.j - pair.i,
        )
    }

    pub fn correlator(&self, pair: CorrelatorPair) -> f64 {
        self.joint_distribution(pair).correlation()
    }

    pub fn k4(&self) -> f64 {
        let c = |i, j| self.correlator(CorrelatorPair { i, j });
        c(1, 2) + c(2, 3) + c(3, 4) - c(1, 4)
    }
}

/// `C_ij = sum_{k,l} k l P(k, l)`.
pub fn correlator(cfg: &LgiConfig, pair: CorrelatorPair) -> Result<f64> {
    Ok(PreparedLgi::new(cfg)?.correlator(pair))
}

pub fn joint_distribution(cfg: &LgiConfig, pair: CorrelatorPair) -> Result<JointDistribution> {
    Ok(PreparedLgi::new(cfg)?.joint_distribution(pair))
}

/// `K4 = C12 + C23 + C34 - C14`.
pub fn k4(cfg: &LgiConfig) -> Result<f64> {
    Ok(PreparedLgi::new(cfg)?.k4())
}

pub const LGI_CLASSICAL_BOUND: f64 = 2.0;
