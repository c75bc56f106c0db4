//! Simulation and verification toolkit for the Fornberg-Whitham equation
//!
//! ```text
//! u_t + u u_x + K * u_x = 0,     K(x) = exp(-|x|) / 2
//! ```
//!
//! on the real line (truncated to a window) or on the unit torus. The crate
//! provides:
//!
//! * [`grid`]: cell-centred grid functions, norms, quadrature and differentiation;
//! * [`nonlocal`]: the convolutions `K*u` and `K'*u`, realised through `(1 - d²/dx²)⁻¹`;
//! * [`strong`]: method-of-lines solvers for smooth solutions up to wave breaking;
//! * [`shock`]: a Godunov flux-splitting finite-volume solver for weak entropy solutions;
//! * [`diagnostics`]: breaking criteria, Riccati envelopes, Oleinik and L¹-stability
//!   checks, weak-form and Kružkov entropy residuals;
//! * [`waves`]: the peakon and the cusped traveling wave.

pub mod diagnostics;
mod error;
pub mod grid;
pub mod nonlocal;
pub mod profile;
pub mod shock;
pub(crate) mod spectral;
pub mod strong;
pub mod trajectory;
pub mod waves;

pub use error::{Error, Result};
pub use grid::{Domain, GridFn, Norm, ScalarSeries};
pub use nonlocal::{kernel_eval, KernelKind, KernelOp};
pub use profile::{sample, Profile};
pub use trajectory::{Snapshot, Trajectory};
