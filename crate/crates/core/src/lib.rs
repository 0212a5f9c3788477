//! Wigner quasiprobability distributions and Weyl symbols on uniform
//! one-dimensional grids, with phase-space expectation values, marginals,
//! purity and negativity.
//!
//! ```
//! use wigner_core::{grid::GridSpec, state, transform, expectations};
//!
//! let grid = GridSpec::new(128, -8.0, 8.0, 1.0).unwrap();
//! let psi = state::oscillator_eigenstate(&grid, 1, &state::Oscillator::unit()).unwrap();
//! let w = transform::wigner_of_wavefunction(&psi).unwrap();
//! assert!((expectations::normalization(&w).unwrap() - 1.0).abs() < 1e-9);
//! assert!(expectations::negativity_volume(&w).unwrap() > 0.2);
//! ```

pub mod check;
pub mod cli;
pub mod error;
pub mod expectations;
pub mod field;
pub mod grid;
pub mod io;
pub mod render;
pub mod state;
pub mod transform;

pub use error::{Error, Result};
pub use field::{FieldKind, PhaseSpaceField};
pub use grid::GridSpec;
