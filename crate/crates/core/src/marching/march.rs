use serde::{Deserialize, Serialize};

use super::resources::{resource_report_for, ClosedForms, ResourceReport, MAX_COUNTED_NT};
use super::step::{Mode, QuantumStepper};
use crate::analysis::{Engine, Sample, Trajectory};
use crate::dynamics::{LorenzParams, State3};
use crate::error::{Error, Result};
use crate::scheme::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRecord {
    pub step: usize,
    pub p_block: f64,
    pub p_nl: f64,
    pub cumulative_log_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchResult {
    pub trajectory: Trajectory,
    pub probabilities: Vec<ProbabilityRecord>,
    /// None for Nt = 0 and for Nt beyond [`MAX_COUNTED_NT`].
    pub report: Option<ResourceReport>,
}

/// Marches `nt` steps from `x0`. Full mode simulates every register and is
/// limited to a single step.
pub fn march_with(scheme: Scheme, x0: State3, p: LorenzParams, dt: f64, nt: usize, mode: Mode) -> Result<MarchResult> {
    if mode == Mode::Full && nt > 1 {
        return Err(Error::RegisterInfeasible { qubits: ClosedForms::new(nt).n_qubits, nt });
    }
    let engine = match mode {
        Mode::Full => Engine::QuantumFull,
        Mode::Collapsed => Engine::QuantumCollapsed,
    };
    let mut samples = vec![Sample { step: 0, t: 0.0, state: x0, p_block: None, p_nl: None }];
    let mut probabilities = Vec::with_capacity(nt);
    let mut report = None;
    if nt > 0 {
        let st = QuantumStepper::new(scheme, p, dt)?;
        let mut s = st.encode(x0)?;
        let mut cum = 0.0;
        for k in 1..=nt {
            let out = st.step(mode, &s, cum)?;
            cum = out.cumulative_log_probability;
            s = out.next;
            samples.push(Sample { step: k, t: k as f64 * dt, state: s.state3(), p_block: Some(out.p_block), p_nl: Some(out.p_nl) });
            probabilities.push(ProbabilityRecord { step: k, p_block: out.p_block, p_nl: out.p_nl, cumulative_log_probability: cum });
        }
        let prep = st.prep();
        if nt <= MAX_COUNTED_NT {
            report = Some(resource_report_for(nt, scheme.name(), scheme.num_qubits(), prep.lcu_qubits(), scheme.max_degree())?);
        }
    }
    Ok(MarchResult { trajectory: Trajectory { params: p, dt, engine, samples }, probabilities, report })
}

/// [`march_with`] for the exact second-order scheme.
pub fn march(x0: State3, p: LorenzParams, dt: f64, nt: usize, mode: Mode) -> Result<MarchResult> {
    march_with(Scheme::Rk2, x0, p, dt, nt, mode)
}
