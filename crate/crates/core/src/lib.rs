//! Quantum channels in Kraus form and the analysis of control maps that force
//! an unknown state into a decoherence-free target subspace.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrix helpers (eigendecomposition, polar
//!   factor, vectorisation).
//! - [`state`]: tolerances, density matrices, pure states.
//! - [`channel`]: Kraus channels, Choi matrices, trace-preservation checks and
//!   Choi-distance between channels.
//! - [`subspace`]: the split `H = H_A ⊕ H_Ā`, block extraction, projection and
//!   pinching maps.
//! - [`analysis`]: range and DFS checks, the coherence-destruction residual,
//!   feedback-protocol extraction, and the pure-state purity check.
//! - [`generators`]: seeded Haar unitaries, random states, DFS control
//!   channels, and the two-qubit coherence-sensitive counterexample.
//!
//! Everything is a pure function over immutable values.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod state;
pub mod subspace;

pub use analysis::{AnalysisReport, Checked, CorollaryResult, DfsCertificate, DfsCheck, FeedbackProtocol, RangeCheck};
pub use channel::{ChoiMatrix, KrausChannel, VerificationReport};
pub use error::{Error, Result};
pub use generators::{DfsChannelSpec, DfsInstance, Seed};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use num_complex::Complex64;
pub use state::{DensityMatrix, PureState, Tolerance};
pub use subspace::{BlockDecomposition, BlockKraus, StateSplit, SubspaceSplit};
