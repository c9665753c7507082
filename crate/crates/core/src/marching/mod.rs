//! Single-step operator, multi-step marching and resource accounting.

mod march;
mod resources;
mod step;

pub use march::{march, march_with, MarchResult, ProbabilityRecord};
pub use resources::{
    clock_width, expand_schedule, min_refills, resource_report, resource_report_for, schedule, success_probability_estimate,
    ClosedForms, RegisterLayout, ResourceReport, ScheduleCounts, MAX_COUNTED_NT,
};
pub use step::{single_step_collapsed, single_step_full, Mode, QuantumStepper, StepOutcome};
