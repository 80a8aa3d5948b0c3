//! Published closed forms for K4 and S4, and the measurement angles they
//! were evaluated at.
//!
//! K4 coefficients carry two decimals as published; the S4 expressions are
//! exact. Both are kept digit-for-digit, without refitting.

// Printed two-decimal values, not approximations of pi.
#![allow(clippy::approx_constant)]

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelKind;
use crate::channel::MemoryChannel;
use crate::error::{Error, Result};
use crate::lgi::{AngleSet, LgiConfig, PreparedLgi};
use crate::measurement::BsmType;
use crate::parallel::{self, Execution};
use crate::tsi::{s4, TsiConfig, PUBLISHED_BASES};

/// Schmidt coefficient used for every published curve.
pub const REFERENCE_K1: f64 = FRAC_1_SQRT_2;

/// Max |simulated - reference| allowed for the two-decimal K4 polynomials.
pub const K4_TOLERANCE: f64 = 0.1;
/// S4 closed forms are exact.
pub const S4_TOLERANCE: f64 = 1e-9;
/// Slack on identity-channel maxima from two-decimal angle rounding.
pub const MAXIMUM_TOLERANCE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Witness {
    K4,
    S4,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Witness::K4 => "K4",
            Witness::S4 => "S4",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReferenceKey {
    witness: Witness,
    kind: ChannelKind,
    bsm_type: Option<BsmType>,
}

impl ReferenceKey {
    pub fn k4(kind: ChannelKind, bsm_type: BsmType) -> Self {
        Self {
            witness: Witness::K4,
            kind,
            bsm_type: Some(bsm_type),
        }
    }

    pub fn s4(kind: ChannelKind) -> Self {
        Self {
            witness: Witness::S4,
            kind,
            bsm_type: None,
        }
    }

    /// Checked constructor: a BSM type is required for K4 and forbidden for S4.
    pub fn new(witness: Witness, kind: ChannelKind, bsm_type: Option<BsmType>) -> Result<Self> {
        match (witness, bsm_type) {
            (Witness::K4, Some(t)) => Ok(Self::k4(kind, t)),
            (Witness::S4, None) => Ok(Self::s4(kind)),
            _ => Err(Error::UnknownReference(format!(
                "{witness} {kind} {bsm_type:?}"
            ))),
        }
    }

    pub fn witness(&self) -> Witness {
        self.witness
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn bsm_type(&self) -> Option<BsmType> {
        self.bsm_type
    }

    /// All twelve published curves: nine K4, then three S4.
    pub fn all() -> Vec<ReferenceKey> {
        let mut keys = Vec::with_capacity(12);
        for kind in ChannelKind::ALL {
            for t in BsmType::ALL {
                keys.push(Self::k4(kind, t));
            }
        }
        keys.extend(ChannelKind::ALL.map(Self::s4));
        keys
    }
}

impl fmt::Display for ReferenceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bsm_type {
            Some(t) => write!(f, "{} {} type-{}", self.witness, self.kind, t),
            None => write!(f, "{} {}", self.witness, self.kind),
        }
    }
}

const fn angles(theta: [f64; 4], phi: [f64; 4]) -> AngleSet {
    AngleSet { theta, phi }
}

/// Published optimal angles for each channel and measurement type.
pub fn printed_angles(kind: ChannelKind, bsm_type: BsmType) -> AngleSet {
    use BsmType::*;
    use ChannelKind::*;
    match (kind, bsm_type) {
        (AmplitudeDamping, TypeI) | (Depolarizing, TypeI) => {
            angles([1.88, 1.54, 1.21, 3.14], [0.77, 0.57, 0.21, 1.73])
        }
        (AmplitudeDamping, TypeII) => angles([1.86, 1.01, 2.38, 1.38], [1.23, 4.06, 0.51, 3.08]),
        (AmplitudeDamping, TypeIII) => angles([0.48, 1.44, 2.04, 2.63], [0.34, 0.60, 0.79, 0.82]),
        (PhaseDamping, TypeI) => angles([2.36, 0.01, 0.0, 1.57], [1.57, 1.66, 1.31, 0.0]),
        (PhaseDamping, TypeII) => angles([1.27, 1.22, 2.28, 2.16], [0.63, 3.85, 1.22, 1.84]),
        (PhaseDamping, TypeIII) => angles([2.76, 0.81, 1.86, 3.14], [1.29, 0.87, 1.78, 0.32]),
        (Depolarizing, TypeII) => angles([1.24, 0.91, 0.63, 0.03], [1.37, 1.13, 0.73, 0.47]),
        (Depolarizing, TypeIII) => angles([2.76, 2.23, 1.53, 0.63], [0.87, 0.96, 0.95, 1.04]),
    }
}

/// Closed-form angles behind the phase-damping Type-I preset: `3pi/4, pi/2`
/// and the `z` axis. At these the memory-one curve is exactly 3 for all p.
pub const PD_TYPE_I_EXACT: AngleSet = AngleSet {
    theta: [3.0 * PI / 4.0, 0.0, 0.0, FRAC_PI_2],
    phi: [FRAC_PI_2, 1.66, 1.31, 0.0],
};

/// Identity-channel maximum reported alongside each curve.
pub fn printed_maximum(key: ReferenceKey) -> f64 {
    use BsmType::*;
    use ChannelKind::*;
    match (key.witness, key.kind, key.bsm_type) {
        (Witness::S4, _, _) => 2.0,
        (Witness::K4, AmplitudeDamping | Depolarizing, Some(TypeI)) => 3.18,
        (Witness::K4, PhaseDamping, Some(TypeI)) => 3.0,
        (Witness::K4, _, _) => 2.0 * SQRT_2,
    }
}

fn k4_ad_type_i(p: f64, m: f64) -> f64 {
    let s = (1.0 - p).sqrt();
    2.27 + 0.91 * s
        + m * (-3.23 + 3.23 * s + m * (7.18 - 7.18 * s + (-4.84 + 4.84 * s) * m))
        + p.powi(5) * (0.07 + m * (-0.22 + (0.22 - 0.07 * m) * m))
        + p * (-5.38 - 1.02 * s
            + m * (12.41 - 6.12 * s + m * (-18.04 + 14.44 * s + (10.94 - 8.52 * s) * m)))
        + p.powi(3)
            * (-1.64 - 0.01 * s
                + m * (4.86 - 0.30 * s + m * (-4.64 + 0.55 * s + (1.42 - 0.24 * s) * m)))
        + p.powi(4)
            * (0.82 + m * (-1.51 + 0.08 * s + m * (0.54 - 0.16 * s + (0.14 + 0.08 * s) * m)))
        + p.powi(2)
            * (4.55
                + 0.12 * s
                + m * (-11.80 + 3.66 * s + m * (14.74 - 7.62 * s + (-7.49 + 3.84 * s) * m)))
}

fn k4_ad_type_ii(p: f64, m: f64) -> f64 {
    let s = (1.0 - p).sqrt();
    2.11 + 0.72 * s
        + m * (-4.55 + 4.55 * s + m * (7.89 - 7.89 * s + (-4.99 + 4.99 * s) * m))
        + p.powi(6) * (-1.07 + m * (3.22 + m * (-3.22 + 1.07 * m)))
        + p * (-1.67 - 0.36 * s
            + m * (10.67 - 8.25 * s + m * (-19.58 + 15.63 * s + (10.98 - 8.48 * s) * m)))
        + p.powi(3)
            * (17.82 - 0.04 * s
                + m * (-32.80 - 0.69 * s + m * (16.70 + 1.07 * s + (-1.72 - 0.34 * s) * m)))
        + p.powi(5) * (6.22 + m * (-16.52 + m * (14.37 - 4.08 * m)))
        + p.powi(4)
            * (-15.24
                + 0.01 * s
                + m * (35.23 + 0.31 * s + m * (-25.83 - 0.66 * s + (5.83 + 0.34 * s) * m)))
        + p.powi(2)
            * (-8.16
                + 0.23 * s
                + m * (5.49 + 4.55 * s + m * (9.67 - 8.17 * s + (-7.08 + 3.47 * s) * m)))
}

fn k4_ad_type_iii(p: f64, m: f64) -> f64 {
    let s = (1.0 - p).sqrt();
    1.65 + 1.17 * s
        + m * (-0.16 + 0.16 * s + m * (1.11 - 1.11 * s + (-1.50 + 1.50 * s) * m))
        + p.powi(6) * (-0.13 + m * (0.40 + (-0.40 + 0.13 * m) * m))
        + p * (-2.44 - 1.84 * s
            + m * (3.89 - 0.31 * s + m * (-3.69 + 3.14 * s + (2.88 - 2.13 * s) * m)))
        + p.powi(3)
            * (3.10 - 0.49 * s
                + m * (-5.30 - 1.11 * s + m * (2.19 + 2.76 * s + (0.01 - 1.16 * s) * m)))
        + p.powi(5) * (1.04 + m * (-2.84 + m * (2.57 - 0.77 * m)))
        + p.powi(4)
            * (-2.66 - 0.02 * s
                + m * (6.30 + 0.84 * s + m * (-4.76 - 1.62 * s + (1.12 + 0.80 * s) * m)))
        + p.powi(2)
            * (0.31 + 1.89 * s + m * (-1.56 + 0.35 * s + m * (2.98 - 3.09 * s + (-1.88 + s) * m)))
}

fn k4_pd_type_i(p: f64, m: f64) -> f64 {
    3.0 + p
        * (-16.0
            + 16.0 * m
            + p * (32.0
                + m * (-48.0 + 16.0 * m)
                + p * (-32.0 + m * (64.0 - 32.0 * m))
                + p * p * (16.0 + m * (-32.0 + 16.0 * m))))
}

fn k4_pd_type_ii(p: f64, m: f64) -> f64 {
    2.83 + 17.65 * p.powi(6) * (1.0 - m).powi(3)
        + p.powi(4) * (99.63 - 252.22 * m + 205.56 * m * m - 52.96 * m.powi(3))
        + p.powi(2) * (40.17 - 54.07 * m + 17.47 * m * m)
        + p * (-14.86 + 10.91 * m)
        + p.powi(3) * (-77.79 + 160.26 * m - 102.51 * m * m + 17.65 * m.powi(3))
        + p.powi(5) * (-67.56 + 188.08 * m - 173.49 * m * m + 52.96 * m.powi(3))
}

fn k4_pd_type_iii(p: f64, m: f64) -> f64 {
    2.83 + 45.94 * p.powi(6) * (1.0 - m).powi(3)
        + p.powi(4) * (175.19 - 488.19 * m + 450.82 * m * m - 137.82 * m.powi(3))
        + p * (-17.91 + 17.85 * m)
        + p.powi(2) * (56.50 - 93.87 * m + 37.37 * m * m)
        + p.powi(3) * (-121.96 + 288.57 * m - 212.55 * m * m + 45.94 * m.powi(3))
        + p.powi(5) * (-137.82 + 413.45 * m - 413.45 * m * m + 137.82 * m.powi(3))
}

fn k4_depol_type_i(p: f64, m: f64) -> f64 {
    3.18 + 7.27 * p.powi(6) * (1.0 - m).powi(3)
        + p * (-15.32 + 12.54 * m)
        + p.powi(2) * (37.68 - 57.20 * m + 21.14 * m * m)
        + p.powi(4) * (61.28 - 158.12 * m + 135.26 * m * m - 38.42 * m.powi(3))
        + p.powi(3) * (-61.15 + 131.41 * m - 88.96 * m * m + 17.98 * m.powi(3))
        + p.powi(5) * (-32.72 + 93.65 * m - 89.14 * m * m + 28.21 * m.powi(3))
}

fn k4_depol_type_ii(p: f64, m: f64) -> f64 {
    2.83 + 1.56 * p.powi(6) * (1.0 - m).powi(3)
        + p * (-8.25 + 6.41 * m)
        + p.powi(2) * (12.94 - 20.03 * m + 7.0 * m * m)
        + p.powi(4) * (13.87 - 39.02 * m + 36.30 * m * m - 11.14 * m.powi(3))
        + p.powi(3) * (-15.20 + 35.99 * m - 26.39 * m * m + 5.64 * m.powi(3))
        + p.powi(5) * (-7.04 + 21.37 * m - 21.61 * m * m + 7.28 * m.powi(3))
}

fn k4_depol_type_iii(p: f64, m: f64) -> f64 {
    2.83 + 3.84 * p.powi(6) * (1.0 - m).powi(3)
        + p * (-10.80 + 9.13 * m)
        + p.powi(2) * (20.74 - 36.40 * m + 15.21 * m * m)
        + p.powi(4) * (31.92 - 94.97 * m + 93.39 * m * m - 30.34 * m.powi(3))
        + p.powi(3) * (-31.0 + 80.30 * m - 64.97 * m * m + 15.88 * m.powi(3))
        + p.powi(5) * (-17.27 + 53.55 * m - 55.29 * m * m + 19.01 * m.powi(3))
}

fn s4_ad(p: f64, m: f64) -> f64 {
    let s = (1.0 - p).sqrt();
    0.25 * (4.0 + 4.0 * s - 2.0 * p * (1.0 + s) * (1.0 - m) + (1.0 - s) * m)
}

fn s4_pd(p: f64, m: f64) -> f64 {
    2.0 * (1.0 - p) * (1.0 - p * (1.0 - m))
}

fn s4_depol(p: f64, m: f64) -> f64 {
    (18.0 - 15.0 * p * (2.0 - m) + 16.0 * p * p * (1.0 - m)) / 9.0
}

/// Evaluates a published curve at `(p, mu)`.
pub fn reference_value(key: ReferenceKey, p: f64, mu: f64) -> Result<f64> {
    crate::error::check_range("p", p, 0.0, 1.0)?;
    crate::error::check_range("mu", mu, 0.0, 1.0)?;
    use BsmType::*;
    use ChannelKind::*;
    let f: fn(f64, f64) -> f64 = match (key.witness, key.kind, key.bsm_type) {
        (Witness::K4, AmplitudeDamping, Some(TypeI)) => k4_ad_type_i,
        (Witness::K4, AmplitudeDamping, Some(TypeII)) => k4_ad_type_ii,
        (Witness::K4, AmplitudeDamping, Some(TypeIII)) => k4_ad_type_iii,
        (Witness::K4, PhaseDamping, Some(TypeI)) => k4_pd_type_i,
        (Witness::K4, PhaseDamping, Some(TypeII)) => k4_pd_type_ii,
        (Witness::K4, PhaseDamping, Some(TypeIII)) => k4_pd_type_iii,
        (Witness::K4, Depolarizing, Some(TypeI)) => k4_depol_type_i,
        (Witness::K4, Depolarizing, Some(TypeII)) => k4_depol_type_ii,
        (Witness::K4, Depolarizing, Some(TypeIII)) => k4_depol_type_iii,
        (Witness::S4, AmplitudeDamping, None) => s4_ad,
        (Witness::S4, PhaseDamping, None) => s4_pd,
        (Witness::S4, Depolarizing, None) => s4_depol,
        _ => return Err(Error::UnknownReference(key.to_string())),
    };
    Ok(f(p, mu))
}

/// Simulates a published curve at `(p, mu)` under its published settings.
pub fn simulate_reference(key: ReferenceKey, p: f64, mu: f64) -> Result<f64> {
    let channel = MemoryChannel::new(key.kind, p, mu)?;
    match (key.witness, key.bsm_type) {
        (Witness::K4, Some(t)) => {
            let cfg = LgiConfig::new(REFERENCE_K1, &printed_angles(key.kind, t), t, channel)?;
            Ok(PreparedLgi::new(&cfg)?.k4())
        }
        (Witness::S4, None) => s4(&TsiConfig::new(REFERENCE_K1, PUBLISHED_BASES, channel)?),
        _ => Err(Error::UnknownReference(key.to_string())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionRow {
    pub key: ReferenceKey,
    pub max_abs_deviation: f64,
    /// Grid point `(p, mu)` where the deviation peaks.
    pub worst_point: (f64, f64),
    pub tolerance: f64,
}

impl RegressionRow {
    pub fn passed(&self) -> bool {
        self.max_abs_deviation <= self.tolerance
    }
}

pub fn tolerance_for(key: ReferenceKey) -> f64 {
    match key.witness {
        Witness::K4 => K4_TOLERANCE,
        Witness::S4 => S4_TOLERANCE,
    }
}

/// Max |simulated - reference| per published curve over the grid.
pub fn regression_report(p_grid: &[f64], mu_list: &[f64]) -> Result<Vec<RegressionRow>> {
    regression_report_with(Execution::default(), p_grid, mu_list)
}

pub fn regression_report_with(
    exec: Execution,
    p_grid: &[f64],
    mu_list: &[f64],
) -> Result<Vec<RegressionRow>> {
    let keys = ReferenceKey::all();
    let mut points = Vec::with_capacity(keys.len() * p_grid.len() * mu_list.len());
    for &key in &keys {
        for &mu in mu_list {
            for &p in p_grid {
                points.push((key, p, mu));
            }
        }
    }
    let deviations = parallel::map(exec, &points, |&(key, p, mu)| -> Result<f64> {
        Ok((simulate_reference(key, p, mu)? - reference_value(key, p, mu)?).abs())
    });
    let mut rows: Vec<RegressionRow> = keys
        .iter()
        .map(|&key| RegressionRow {
            key,
            max_abs_deviation: 0.0,
            worst_point: (0.0, 0.0),
            tolerance: tolerance_for(key),
        })
        .collect();
    for (&(key, p, mu), dev) in points.iter().zip(deviations) {
        let dev = dev?;
        let row = rows.iter_mut().find(|r| r.key == key).expect("key listed");
        if dev > row.max_abs_deviation || dev.is_nan() {
            row.max_abs_deviation = dev;
            row.worst_point = (p, mu);
        }
    }
    Ok(rows)
}
