//! Trajectories, Poincaré sections, bifurcation sweeps and oracle comparison.

mod compare;
mod config;
mod poincare;
mod sweep;
mod trajectory;
mod verify;
mod volume;

pub use compare::{compare_to_oracle, lobes, lobes_anchor, lyapunov_estimate, BoundingBox, CompareOptions, ComparisonReport, Lobe};
pub use config::Config;
pub use poincare::{
    cluster_values, detect_period, detect_period_with, poincare_section, Crossing, PeriodResult, PoincareSection,
    SectionBuilder, DEFAULT_CHAOS_THRESHOLD, DEFAULT_CLUSTER_TOL,
};
pub use sweep::{bifurcation_sweep, section_run, BifurcationDiagram, BifurcationEntry, SweepConfig, Transition};
pub use trajectory::{run_trajectory, Engine, Propagator, Sample, StepRecord, Trajectory};
pub use verify::{verify_suite, CheckResult};
pub use volume::log_volume_rate;
