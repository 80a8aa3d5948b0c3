//! Two-qubit decoherence channels with partial memory.
//!
//! One application of a [`MemoryChannel`] is one time step in which both
//! qubits pass through the noise. With probability `mu` the two uses share
//! the same Kraus branch (correlated set); otherwise they act independently
//! (product set):
//!
//! `rho -> (1 - mu) sum_ij E_ij rho E_ij^† + mu sum_k E_kk rho E_kk^†`

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{pauli, SquareMatrix};
use crate::state::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    #[serde(rename = "ad")]
    AmplitudeDamping,
    #[serde(rename = "pd")]
    PhaseDamping,
    #[serde(rename = "depol")]
    Depolarizing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::AmplitudeDamping,
        ChannelKind::PhaseDamping,
        ChannelKind::Depolarizing,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "ad",
            ChannelKind::PhaseDamping => "pd",
            ChannelKind::Depolarizing => "depol",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ad" | "amplitude" | "amplitude-damping" => Ok(ChannelKind::AmplitudeDamping),
            "pd" | "phase" | "phase-damping" => Ok(ChannelKind::PhaseDamping),
            "depol" | "dp" | "depolarizing" => Ok(ChannelKind::Depolarizing),
            other => Err(format!(
                "unknown channel '{other}' (expected ad, pd or depol)"
            )),
        }
    }
}

/// Kraus operators with their branch weights already folded in.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    ops: Vec<SquareMatrix>,
}

impl KrausSet {
    pub fn new(ops: Vec<SquareMatrix>) -> Self {
        Self { ops }
    }

    pub fn ops(&self) -> &[SquareMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `sum_i E_i^† E_i`.
    pub fn gram_sum(&self) -> SquareMatrix {
        let dim = self.ops.first().map_or(4, |e| e.dim());
        self.ops
            .iter()
            .fold(SquareMatrix::zeros(dim).expect("dim"), |acc, e| {
                acc + e.adjoint() * *e
            })
    }

    /// `sum_i E_i m E_i^†`, with no weighting or validation.
    pub fn act(&self, m: &SquareMatrix) -> SquareMatrix {
        self.ops
            .iter()
            .fold(SquareMatrix::zeros(m.dim()).expect("dim"), |acc, e| {
                acc + e.sandwich(m)
            })
    }
}

fn weighted_pauli_pair(weight: f64, a: usize, b: usize) -> SquareMatrix {
    pauli(a)
        .kron(&pauli(b))
        .expect("2x2 kron")
        .scale_real(weight.sqrt())
}

fn pauli_weights(kind: ChannelKind, p: f64) -> Vec<(usize, f64)> {
    match kind {
        ChannelKind::PhaseDamping => vec![(0, 1.0 - p), (3, p)],
        ChannelKind::Depolarizing => vec![(0, 1.0 - p), (1, p / 3.0), (2, p / 3.0), (3, p / 3.0)],
        ChannelKind::AmplitudeDamping => unreachable!("amplitude damping is not a Pauli channel"),
    }
}

/// Single-qubit amplitude-damping Kraus pair `(E0, E1)`.
pub fn amplitude_damping_qubit(p: f64) -> (SquareMatrix, SquareMatrix) {
    let e0 = SquareMatrix::from_real_rows(2, &[(1.0 - p).sqrt(), 0.0, 0.0, 1.0]).expect("finite");
    let e1 = SquareMatrix::from_real_rows(2, &[0.0, 0.0, p.sqrt(), 0.0]).expect("finite");
    (e0, e1)
}

/// Memoryless two-qubit Kraus set: every product of single-qubit operators.
pub fn build_uncorrelated_kraus(kind: ChannelKind, p: f64) -> Result<KrausSet> {
    let p = check_range("p", p, 0.0, 1.0)?;
    let ops = match kind {
        ChannelKind::AmplitudeDamping => {
            let (e0, e1) = amplitude_damping_qubit(p);
            let single = [e0, e1];
            let mut ops = Vec::with_capacity(4);
            for a in &single {
                for b in &single {
                    ops.push(a.kron(b)?);
                }
            }
            ops
        }
        ChannelKind::PhaseDamping | ChannelKind::Depolarizing => {
            let weights = pauli_weights(kind, p);
            let mut ops = Vec::with_capacity(weights.len() * weights.len());
            for &(i, pi) in &weights {
                for &(j, pj) in &weights {
                    ops.push(weighted_pauli_pair(pi * pj, i, j));
                }
            }
            ops
        }
    };
    Ok(KrausSet::new(ops))
}

/// Fully correlated Kraus set: both qubits take the same branch.
pub fn build_correlated_kraus(kind: ChannelKind, p: f64) -> Result<KrausSet> {
    let p = check_range("p", p, 0.0, 1.0)?;
    let ops = match kind {
        ChannelKind::AmplitudeDamping => {
            // Not a tensor product: |00> decays straight to |11>.
            let mut e00 = SquareMatrix::identity(4)?;
            e00.set(0, 0, (1.0 - p).sqrt().into());
            let mut e11 = SquareMatrix::zeros(4)?;
            e11.set(3, 0, p.sqrt().into());
            vec![e00, e11]
        }
        ChannelKind::PhaseDamping | ChannelKind::Depolarizing => pauli_weights(kind, p)
            .into_iter()
            .map(|(k, pk)| weighted_pauli_pair(pk, k, k))
            .collect(),
    };
    Ok(KrausSet::new(ops))
}

/// One time step of two-qubit noise with memory coefficient `mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryChannel {
    kind: ChannelKind,
    p: f64,
    mu: f64,
    uncorrelated: KrausSet,
    correlated: KrausSet,
}

impl MemoryChannel {
    pub fn new(kind: ChannelKind, p: f64, mu: f64) -> Result<Self> {
        let mu = check_range("mu", mu, 0.0, 1.0)?;
        Ok(Self {
            kind,
            p,
            mu,
            uncorrelated: build_uncorrelated_kraus(kind, p)?,
            correlated: build_correlated_kraus(kind, p)?,
        })
    }

    pub fn identity() -> Self {
        Self::new(ChannelKind::Depolarizing, 0.0, 0.0).expect("valid parameters")
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn uncorrelated(&self) -> &KrausSet {
        &self.uncorrelated
    }

    pub fn correlated(&self) -> &KrausSet {
        &self.correlated
    }

    /// Same kind and strength with a different memory coefficient.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        let mu = check_range("mu", mu, 0.0, 1.0)?;
        Ok(Self { mu, ..self.clone() })
    }

    /// Raw map on an arbitrary 4x4 operator (linear, no validation). Used
    /// for unnormalized post-measurement branches.
    pub fn act(&self, m: &SquareMatrix) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(4).expect("dim 4");
        if self.mu < 1.0 {
            out = out + self.uncorrelated.act(m).scale_real(1.0 - self.mu);
        }
        if self.mu > 0.0 {
            out = out + self.correlated.act(m).scale_real(self.mu);
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.act(rho.matrix());
        DensityMatrix::new(out).map_err(|e| {
            Error::Consistency(format!(
                "{} channel (p={}, mu={}) produced an invalid state: {e}",
                self.kind, self.p, self.mu
            ))
        })
    }

    /// Applies the channel `steps` times.
    pub fn apply_n(&self, rho: &DensityMatrix, steps: usize) -> Result<DensityMatrix> {
        let mut state = *rho;
        for _ in 0..steps {
            state = self.apply(&state)?;
        }
        Ok(state)
    }

    /// Max-norm of `(1-mu) sum E^†E + mu sum E^†E - 1`.
    pub fn verify_completeness(&self) -> f64 {
        let total = self.uncorrelated.gram_sum().scale_real(1.0 - self.mu)
            + self.correlated.gram_sum().scale_real(self.mu);
        total.max_abs_diff(&SquareMatrix::identity(4).expect("dim 4"))
    }
}

/// Trace and positivity residuals of a channel output, for diagnostics.
pub fn output_defects(out: &SquareMatrix) -> (f64, f64) {
    let trace_err = (out.trace().re - 1.0).abs();
    let min_eig = crate::linalg::hermitian_eigenvalues(out, 1e-10)
        .map(|ev| ev[0])
        .unwrap_or(f64::NEG_INFINITY);
    (trace_err, min_eig)
}
