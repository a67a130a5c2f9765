//! Entanglement measures for two-qubit states: concurrence, negativity,
//! entanglement of formation and participation ratio, together with tools to
//! study the gap `C − E_N` between concurrence and negativity.
//!
//! * [`linalg`]: 4×4 complex linear algebra (Jacobi eigensolver and SVD).
//! * [`states`]: density matrices, pure states, sampling and the generator of
//!   states with `C = E_N`.
//! * [`measures`]: the four scalar measures.
//! * [`analytic`]: closed forms for maximally entangled mixed states.
//! * [`optimize`]: Nelder–Mead and the constrained `C − E_N` searches.
//! * [`cli`]: the command-line front end.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod optimize;
pub mod rng;
pub mod states;

pub use analytic::Spectrum;
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use measures::EntanglementReport;
pub use rng::Seed;
pub use states::{DensityMatrix, Ensemble, PureState};
