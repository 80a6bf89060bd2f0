//! Gaussian fermionic pure states |R, C⟩ on a ring or chain of L sites:
//! Pfaffian amplitudes in the occupation basis, amplitudes and probabilities
//! in rotated (σ^x, σ^y, general φ) bases via the Kramers-Wannier dual
//! matrix, correlators, and emptiness-formation scans for the critical
//! transverse-field Ising chain.

pub mod basis;
pub mod config;
pub mod correlators;
pub mod dense;
pub mod error;
pub mod expm;
pub mod oracle;
pub mod pfaffian;
pub mod probability;
pub mod sampling;
pub mod scaling;
pub mod state;
pub mod tfi;

pub use basis::{BasisSpec, PhaseConvention, RotatedView};
pub use config::{BitString, Sign, SignSequence};
pub use error::{Error, Result};
pub use pfaffian::{AntisymmetricMatrix, IndexSet};
pub use scaling::{BoundaryClass, ScalingFit, ScalingModel};
pub use state::GaussianState;
pub use tfi::{Boundary, CrystalPattern, FormationBasis, ScanConfig, TfiModel};
