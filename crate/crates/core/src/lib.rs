//! Quantum time-marching for the Lorenz system.
//!
//! The Lorenz map is carried to an augmented linear update (monomials of the
//! state), which is applied on a statevector simulator through a nonlinear
//! state preparation and an SVD block encoding.

pub mod analysis;
pub mod block_encoding;
pub mod dynamics;
pub mod error;
pub mod marching;
pub mod nonlinear;
pub mod qsim;
pub mod scaled;
pub mod scheme;

pub use analysis::{Engine, Trajectory};
pub use dynamics::{divergence, euler_step, lorenz_rhs, rk2_step, rk4_step, LorenzParams, State3};
pub use error::{Error, Result};
pub use marching::{march, Mode, ResourceReport};
pub use scaled::ScaledState;
pub use scheme::Scheme;
