//! Classical and quantum Lissajous system on the sphere.
//!
//! The system is a Pöschl–Teller potential on the sphere whose
//! azimuthal coupling `k = m/n` is rational. Factorization of the two
//! separated one-dimensional problems yields ladder and shift functions
//! (classically) or operators (quantum mechanically), and their products
//! are the extra symmetries that make the system superintegrable.
//!
//! * [`model`]: parameters, phase points, Hamiltonians.
//! * [`algebra`]: ladder/shift functions, numeric Poisson brackets,
//!   symmetries and constants of motion.
//! * [`dynamics`]: RK4 oracle, closed-form motion, turning points,
//!   frequencies and orbit generation from the phase relation.
//! * [`quantum`]: spectrum, degeneracy through the symmetry index maps and
//!   grid verification of the operator actions.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod quantum;

pub use error::{Error, Result};
pub use model::{CouplingParams, EnergyData, PhaseState, RawParams, Variant};
pub use num_complex::Complex64;
