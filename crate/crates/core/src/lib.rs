//! Desk-scale simulator of an ac-Stark-controlled spin-wave optical memory.
//!
//! Weak signal pulses are stored as collective atomic spin waves by an
//! adiabatically eliminated three-level model, reshaped in wavevector space
//! with programmable periodic phase gratings applied in the dark, and
//! retrieved on demand. The crate carries the propagation solver, the grating
//! engine (profiles, diffraction-order coefficients, amplitude solvers), the
//! built-in protocol library, analysis helpers (traces, far-field images,
//! fringe fits), and a line-oriented protocol description language.
//!
//! Units everywhere: rates rad/us, times us, lengths mm, wavevectors rad/mm.

pub mod analysis;
pub mod dsl;
pub mod error;
pub mod grating;
pub mod grid;
pub mod params;
pub mod protocol;
pub mod pulse;
pub mod solver;
pub mod spinwave;

/// Complex double, the working scalar of the whole crate.
pub type C64 = num_complex::Complex64;

pub use error::CoreError;
pub use grid::Grid;
pub use params::PhysicalParams;
