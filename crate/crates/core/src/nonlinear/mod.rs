//! Preparation of the monomial (nonlinear) state from copies of the input.

mod lcu;
mod prep;
mod synth;

pub use lcu::{lcu_circuit, lcu_prep, lcu_select, lcu_width, reflector};
pub use prep::{build_u_nl, prepare_nonlinear_scaled, NonlinearPrep, SUPPORT};
pub use synth::{plan_terms, scheme_specs, synthesize_permutations, LcuTerm, MonomialSpec, PermutationGateSet};
