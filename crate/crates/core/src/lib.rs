//! Correlation dynamics of two qubits coupled to a one-dimensional field.
//!
//! Qubit A starts excited, qubit B in its ground state, and the field in
//! vacuum. The crate builds the second-order reduced two-qubit state as a
//! function of the dimensionless time `xi = v t / r` and coupling `K`, and
//! evaluates geometric discord, negativity, the maximum connected
//! correlation function and two Bell parameters on it. Every closed form
//! has a brute-force counterpart in [`oracles`].

pub mod amplitudes;
pub mod bloch;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod oracles;
pub mod quadrature;
pub mod sweep;

pub use amplitudes::{assemble, compute_amplitudes, ModelParams, PerturbativeAmplitudes, XStateCoefficients};
pub use bloch::{BlochDecomposition, Party, StateKind, TwoQubitDensityMatrix};
pub use error::{Error, Result};
pub use measures::CorrelationReport;
pub use oracles::DirectionGrid;
