//! Leggett-Garg and temporal-steering witnesses for a two-qubit Schmidt
//! state sent repeatedly through amplitude-damping, phase-damping and
//! depolarizing channels with tunable memory.
//!
//! Basis order is `|00>, |01>, |10>, |11>` throughout.

pub mod channel;
pub mod error;
pub mod lgi;
pub mod linalg;
pub mod measurement;
pub mod optimize;
pub mod parallel;
pub mod reference;
pub mod state;
pub mod sweep;
pub mod tsi;
pub mod verify;

pub use channel::{ChannelKind, KrausSet, MemoryChannel};
pub use error::{Error, Result};
pub use lgi::{AngleSet, CorrelatorPair, LgiConfig, PreparedLgi};
pub use linalg::{ComplexScalar, ComplexVector, SquareMatrix};
pub use measurement::{BsmType, MubBasis};
pub use optimize::{maximize, maximize_k4, K4Search, OptProblem, OptResult};
pub use parallel::Execution;
pub use reference::{ReferenceKey, Witness};
pub use state::{DensityMatrix, Direction, PureState};
pub use sweep::SweepRecord;
pub use tsi::TsiConfig;
