//! Sparse Fock-space simulation of two-mode linear-optical interferometry.
//!
//! States are sparse maps from photon-occupation vectors to complex
//! amplitudes. Optical elements act on them as pure functions, and the
//! higher-level modules assemble Mach-Zehnder interferometers, heralded
//! N00N-state generators and loss sweeps on top of that.
//!
//! Conventions used throughout:
//!
//! * beam-splitter reflection carries a `+i` phase,
//!   `a† → cos θ a† + i sin θ b†`, `b† → i sin θ a† + cos θ b†`; 50-50 is `θ = π/4`;
//! * mode 0 (`A`, port `C`) is the phase/loss arm, mode 1 (`B`) exits at port `D`;
//! * loss is per-photon amplitude decay `e^{-nγ}` with no environment mode.

pub mod elements;
pub mod error;
pub mod fock;
pub mod generation;
pub mod interferometry;
pub mod loss;
pub mod optimize;
pub mod states;

pub use elements::{apply_beamsplitter, apply_circuit, apply_cross_kerr, apply_phase, CircuitStep};
pub use error::{Error, Result};
pub use fock::{
    inner_product, number_moments, tensor_product, FockOptions, Moments, OccupationVector,
    PureState, DEFAULT_PHOTON_CAP, DEFAULT_PRUNE_THRESHOLD,
};
pub use states::{make_coherent, make_fock, make_noon, make_opa, CoherentSpec, OpaSpec};

pub use num_complex::Complex64;
