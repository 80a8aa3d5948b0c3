//! Dichotomic Bell-state measurements and the five mutually unbiased bases
//! of the two-qubit space.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, SquareMatrix, I, ONE, ZERO};
use crate::state::{generalized_bell_states, DensityMatrix, Direction};

/// Branches with probability at or below this carry no post-measurement state.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BsmType {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
    #[serde(rename = "III")]
    TypeIII,
}

impl BsmType {
    pub const ALL: [BsmType; 3] = [BsmType::TypeI, BsmType::TypeII, BsmType::TypeIII];

    pub fn label(&self) -> &'static str {
        match self {
            BsmType::TypeI => "I",
            BsmType::TypeII => "II",
            BsmType::TypeIII => "III",
        }
    }
}

impl fmt::Display for BsmType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BsmType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" | "TYPE-I" => Ok(BsmType::TypeI),
            "II" | "2" | "TYPE-II" => Ok(BsmType::TypeII),
            "III" | "3" | "TYPE-III" => Ok(BsmType::TypeIII),
            other => Err(format!(
                "unknown BSM type '{other}' (expected I, II or III)"
            )),
        }
    }
}

/// One collapse branch: a projector and the ±1 value it reports.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branch {
    pub projector: SquareMatrix,
    pub outcome: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BsmScheme {
    bsm_type: BsmType,
    direction: Direction,
    branches: Vec<Branch>,
}

impl BsmScheme {
    pub fn bsm_type(&self) -> BsmType {
        self.bsm_type
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }
}

/// Builds the projector branches for a measurement type along `d`.
///
/// Type I keeps the four rank-1 Bell projectors as separate collapse
/// branches and only coarse-grains their values; Types II and III collapse
/// onto the degenerate ±1 subspaces directly.
pub fn bsm_scheme(bsm_type: BsmType, d: Direction) -> BsmScheme {
    let bell = generalized_bell_states(d);
    let psi_p = bell.psi_plus.vector().projector();
    let psi_m = bell.psi_minus.vector().projector();
    let phi_p = bell.phi_plus.vector().projector();
    let phi_m = bell.phi_minus.vector().projector();
    let id = SquareMatrix::identity(4).expect("dim 4");
    let branch = |projector, outcome| Branch { projector, outcome };
    let branches = match bsm_type {
        BsmType::TypeI => vec![
            branch(psi_p, 1),
            branch(phi_p, 1),
            branch(psi_m, -1),
            branch(phi_m, -1),
        ],
        BsmType::TypeII => vec![branch(psi_p, 1), branch(id - psi_p, -1)],
        BsmType::TypeIII => {
            let plus = psi_p + phi_p;
            vec![branch(plus, 1), branch(id - plus, -1)]
        }
    };
    BsmScheme {
        bsm_type,
        direction: d,
        branches,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchResult {
    pub outcome: i8,
    pub probability: f64,
    pub post_state: Option<DensityMatrix>,
}

/// Born probabilities and Lüders post-measurement states for every branch.
pub fn measure_branches(rho: &DensityMatrix, scheme: &BsmScheme) -> Vec<BranchResult> {
    scheme
        .branches
        .iter()
        .map(|b| {
            let unnormalized = b.projector.sandwich(rho.matrix());
            let probability = unnormalized.trace().re.max(0.0);
            let post_state = (probability > ZERO_PROBABILITY)
                .then(|| DensityMatrix::from_trusted(unnormalized.scale_real(1.0 / probability)));
            BranchResult {
                outcome: b.outcome,
                probability,
                post_state,
            }
        })
        .collect()
}

/// Outcome-level probabilities `(P(+1), P(-1))`.
pub fn outcome_probabilities(rho: &DensityMatrix, scheme: &BsmScheme) -> (f64, f64) {
    scheme.branches.iter().fold((0.0, 0.0), |(plus, minus), b| {
        let p = b.projector.trace_product_re(rho.matrix());
        if b.outcome > 0 {
            (plus + p, minus)
        } else {
            (plus, minus + p)
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MubBasis {
    index: usize,
    kets: [ComplexVector; 4],
}

impl MubBasis {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn kets(&self) -> &[ComplexVector; 4] {
        &self.kets
    }

    pub fn projectors(&self) -> [SquareMatrix; 4] {
        self.kets.map(|k| k.projector())
    }
}

pub const MUB_COUNT: usize = 5;

/// The five mutually unbiased bases of C^4, `M0` computational.
pub fn mub_basis(index: usize) -> Result<MubBasis> {
    let o = ONE;
    let z = ZERO;
    let i = I;
    let rows: [[Complex64; 4]; 4] = match index {
        0 => [[o, z, z, z], [z, o, z, z], [z, z, o, z], [z, z, z, o]],
        1 => [[o, o, o, o], [o, o, -o, -o], [o, -o, -o, o], [o, -o, o, -o]],
        2 => [[o, -o, -i, -i], [o, -o, i, i], [o, o, i, -i], [o, o, -i, i]],
        3 => [[o, -i, -i, -o], [o, -i, i, o], [o, i, i, -o], [o, i, -i, o]],
        4 => [[o, -i, -o, -i], [o, -i, o, i], [o, i, -o, i], [o, i, o, -i]],
        _ => {
            return Err(Error::BadIndex {
                index,
                max: MUB_COUNT - 1,
            })
        }
    };
    let scale = if index == 0 { 1.0 } else { 0.5 };
    let kets = rows.map(|r| {
        ComplexVector::new(&r)
            .expect("static table")
            .scale(Complex64::new(scale, 0.0))
    });
    Ok(MubBasis { index, kets })
}
