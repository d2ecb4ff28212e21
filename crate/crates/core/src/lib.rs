//! Exact diagonalization of giant-spin Hamiltonians for single-molecule magnets.
//!
//! The model is a single effective spin `S` with axial (`D`) and rhombic (`E`)
//! zero-field splitting in an external field:
//!
//! ```text
//! H = D (Sz² - S(S+1)/3) + E/2 (S+² + S-²) + g μB B·S
//! ```
//!
//! [`sweep`] evaluates spectra along a field path, follows eigenstates by
//! overlap, and classifies real and avoided level crossings; [`analysis`]
//! decomposes states into `|M⟩` probabilities.

pub mod analysis;
pub mod config;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod minimize;
pub mod output;
pub mod par;
pub mod run;
pub mod spin;
pub mod sweep;

pub use analysis::{
    barrier_height, hard_axis_symmetry_check, projection_probabilities, relaxation_time, RelaxationParams,
    StateComposition,
};
pub use eigen::{eigh, solve, EigenSolution};
pub use error::{Error, Result};
pub use hamiltonian::{
    build_hamiltonian, matrix_element_transcribed, parity_block_structure, BlockReport, FieldVector, HamiltonianModel,
    HermitianMatrix, SpinSystem,
};
pub use par::Execution;
pub use spin::{build_operators, ladder_element, parity_of, Ladder, OperatorSet, Parity, Projection, SpinQuantum};
pub use sweep::{
    find_crossings, refine_gap, sweep_spectrum, sweep_spectrum_with, track_states, CrossingEvent, CrossingKind,
    SweepGrid, SweepResult,
};
