//! Parameter sweeps over `(p, mu)` grids and their CSV form.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::channel::{ChannelKind, MemoryChannel};
use crate::error::{check_range, Error, Result};
use crate::lgi::{AngleSet, LgiConfig, PreparedLgi, LGI_CLASSICAL_BOUND};
use crate::measurement::BsmType;
use crate::parallel::{self, Execution};
use crate::reference::{printed_angles, reference_value, ReferenceKey, Witness, REFERENCE_K1};
use crate::tsi::{s4, TsiConfig, PUBLISHED_BASES, TSI_CLASSICAL_BOUND};

pub const CSV_HEADER: &str = "witness,channel,scheme,p,mu,simulated,reference,classical_bound";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub witness: Witness,
    pub channel: ChannelKind,
    /// BSM type (`I`, `II`, `III`) or basis pair (`M1-M2`).
    pub scheme: String,
    pub p: f64,
    pub mu: f64,
    pub simulated: f64,
    pub reference: Option<f64>,
    pub classical_bound: f64,
}

/// Evenly spaced grid of `count >= 2` points on `[start, stop]`.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    check_range("grid start", start, 0.0, 1.0)?;
    check_range("grid stop", stop, 0.0, 1.0)?;
    if count < 2 || stop < start {
        return Err(Error::InvalidProblem(format!(
            "grid needs count >= 2 and start <= stop (got {count} points on [{start}, {stop}])"
        )));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct LgiSweep {
    pub kind: ChannelKind,
    pub bsm_type: BsmType,
    pub angles: AngleSet,
    pub k1: f64,
}

impl LgiSweep {
    /// Published angles and `k1 = 1/sqrt 2`.
    pub fn published(kind: ChannelKind, bsm_type: BsmType) -> Self {
        Self {
            kind,
            bsm_type,
            angles: printed_angles(kind, bsm_type),
            k1: REFERENCE_K1,
        }
    }

    fn reference_key(&self) -> Option<ReferenceKey> {
        (self.angles == printed_angles(self.kind, self.bsm_type) && self.k1 == REFERENCE_K1)
            .then(|| ReferenceKey::k4(self.kind, self.bsm_type))
    }
}

#[derive(Clone, Debug)]
pub struct TsiSweep {
    pub kind: ChannelKind,
    pub bases: (usize, usize),
    pub k1: f64,
}

impl TsiSweep {
    pub fn published(kind: ChannelKind) -> Self {
        Self {
            kind,
            bases: PUBLISHED_BASES,
            k1: REFERENCE_K1,
        }
    }

    fn reference_key(&self) -> Option<ReferenceKey> {
        let (a, b) = self.bases;
        ((a, b) == PUBLISHED_BASES || (b, a) == PUBLISHED_BASES)
            .then(|| ReferenceKey::s4(self.kind))
    }
}

fn grid_points(p_grid: &[f64], mu_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    for &p in p_grid {
        check_range("p", p, 0.0, 1.0)?;
    }
    for &mu in mu_list {
        check_range("mu", mu, 0.0, 1.0)?;
    }
    let mut points: Vec<(f64, f64)> = mu_list
        .iter()
        .flat_map(|&mu| p_grid.iter().map(move |&p| (mu, p)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(points)
}

pub fn k4_sweep(template: &LgiSweep, p_grid: &[f64], mu_list: &[f64]) -> Result<Vec<SweepRecord>> {
    k4_sweep_with(Execution::default(), template, p_grid, mu_list)
}

pub fn k4_sweep_with(
    exec: Execution,
    template: &LgiSweep,
    p_grid: &[f64],
    mu_list: &[f64],
) -> Result<Vec<SweepRecord>> {
    let points = grid_points(p_grid, mu_list)?;
    let key = template.reference_key();
    parallel::map(exec, &points, |&(mu, p)| {
        let channel = MemoryChannel::new(template.kind, p, mu)?;
        let cfg = LgiConfig::new(template.k1, &template.angles, template.bsm_type, channel)?;
        let simulated = PreparedLgi::new(&cfg)?.k4();
        Ok(SweepRecord {
            witness: Witness::K4,
            channel: template.kind,
            scheme: template.bsm_type.label().to_string(),
            p,
            mu,
            simulated,
            reference: key.map(|k| reference_value(k, p, mu)).transpose()?,
            classical_bound: LGI_CLASSICAL_BOUND,
        })
    })
    .into_iter()
    .collect()
}

pub fn s4_sweep(template: &TsiSweep, p_grid: &[f64], mu_list: &[f64]) -> Result<Vec<SweepRecord>> {
    s4_sweep_with(Execution::default(), template, p_grid, mu_list)
}

pub fn s4_sweep_with(
    exec: Execution,
    template: &TsiSweep,
    p_grid: &[f64],
    mu_list: &[f64],
) -> Result<Vec<SweepRecord>> {
    let points = grid_points(p_grid, mu_list)?;
    let key = template.reference_key();
    let (a, b) = template.bases;
    parallel::map(exec, &points, |&(mu, p)| {
        let channel = MemoryChannel::new(template.kind, p, mu)?;
        let simulated = s4(&TsiConfig::new(template.k1, template.bases, channel)?)?;
        Ok(SweepRecord {
            witness: Witness::S4,
            channel: template.kind,
            scheme: format!("M{a}-M{b}"),
            p,
            mu,
            simulated,
            reference: key.map(|k| reference_value(k, p, mu)).transpose()?,
            classical_bound: TSI_CLASSICAL_BOUND,
        })
    })
    .into_iter()
    .collect()
}

/// Largest grid `p` at which the witness still exceeds its classical bound,
/// per memory value, in `mu_list` order.
pub fn violation_thresholds(records: &[SweepRecord], mu_list: &[f64]) -> Vec<Option<f64>> {
    mu_list
        .iter()
        .map(|&mu| {
            records
                .iter()
                .filter(|r| r.mu == mu && r.simulated > r.classical_bound)
                .map(|r| r.p)
                .max_by(f64::total_cmp)
        })
        .collect()
}

/// Formats a real with ten significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exponent) {
        let decimals = (9 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            let trimmed = s.trim_end_matches('0').trim_end_matches('.');
            if trimmed == "-0" {
                "0".to_string()
            } else {
                trimmed.to_string()
            }
        } else {
            s
        }
    } else {
        format!("{x:.9e}")
    }
}

pub fn write_csv_to<W: Write>(records: &[SweepRecord], mut out: W) -> io::Result<usize> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.witness,
            r.channel,
            r.scheme,
            format_real(r.p),
            format_real(r.mu),
            format_real(r.simulated),
            r.reference.map(format_real).unwrap_or_default(),
            format_real(r.classical_bound),
        )?;
    }
    out.flush()?;
    Ok(records.len())
}

/// Writes header plus one row per record; returns the record count.
pub fn write_csv(records: &[SweepRecord], path: &Path) -> io::Result<usize> {
    if records.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no records to write",
        ));
    }
    let file = File::create(path)?;
    write_csv_to(records, BufWriter::new(file))
}
