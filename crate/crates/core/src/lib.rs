//! Solvers for time-fractional phase-field equations.
//!
//! The crate implements stabilized IMEX time steppers for the time-fractional
//! Allen-Cahn and Cahn-Hilliard equations on periodic grids, together with the
//! nonlocal-in-time modified energies that are nonincreasing along the
//! discrete trajectories. The modules are layered bottom-up:
//!
//! * [`fracops`]: discrete Caputo operators (L1, L2) and their coefficients.
//! * [`fields`]: periodic grids, spectral operators, snapshot I/O.
//! * [`energy`]: Ginzburg-Landau energy, discrete and continuous history terms.
//! * [`schemes`]: the time steppers and the run driver.
//! * [`mittag`]: Mittag-Leffler functions and the linear reference solution.
//! * [`verify`]: randomized property suites for the discrete inequalities.

pub mod energy;
pub mod error;
pub mod fields;
pub mod fracops;
pub mod mittag;
pub mod quadrature;
pub mod schemes;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
