//! Dense statevector simulator.

mod circuit;
mod cost;
mod gate;
mod library;
mod state;
mod text;

pub use circuit::Circuit;
pub use cost::{gate_cost, qsd_cnots, GateCost};
pub use gate::{apply_gate, is_bijection, unitarity_deviation, Control, Gate, GateKind, UNITARY_TOL};
pub use library::{decompose_shift_to_mcx, decrement_gates, shift_minus, shift_table, u_h_n, u_select_h};
pub use state::{project_measure, QuantumState, MIN_PROBABILITY, NORM_TOL};
pub use text::{from_text, to_text};
