use serde::{Deserialize, Serialize};

use crate::block_encoding::BlockEncoding;
use crate::dynamics::{LorenzParams, State3};
use crate::error::{Error, Result};
use crate::nonlinear::NonlinearPrep;
use crate::qsim::{Circuit, QuantumState};
use crate::scaled::{ScaledState, IMAG_TOL};
use crate::scheme::Scheme;

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: ScaledState,
    pub p_block: f64,
    pub p_nl: f64,
    pub cumulative_log_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Full,
    Collapsed,
}

/// Û₁ = U_A · U_nl for one scheme, parameter set and step size.
#[derive(Debug, Clone)]
pub struct QuantumStepper {
    prep: NonlinearPrep,
    be: BlockEncoding,
    params: LorenzParams,
    dt: f64,
}

impl QuantumStepper {
    pub fn new(scheme: Scheme, params: LorenzParams, dt: f64) -> Result<Self> {
        Ok(Self { prep: NonlinearPrep::new(scheme)?, be: BlockEncoding::for_scheme(scheme, &params, dt)?, params, dt })
    }

    pub fn scheme(&self) -> Scheme {
        self.prep.scheme()
    }

    pub fn params(&self) -> &LorenzParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn block_encoding(&self) -> &BlockEncoding {
        &self.be
    }

    pub fn prep(&self) -> &NonlinearPrep {
        &self.prep
    }

    /// e + LCU + copies + target.
    pub fn full_register_qubits(&self) -> usize {
        self.prep.num_qubits() + 1
    }

    pub fn encode(&self, s: State3) -> Result<ScaledState> {
        ScaledState::from_state3(s, self.scheme().num_qubits())
    }

    fn outcome(&self, target: QuantumState, scale: f64, p_nl: f64, p_block: f64, cum: f64) -> Result<StepOutcome> {
        let next = ScaledState::new(target, scale)?;
        let im = next.imag_residual();
        if im > IMAG_TOL {
            return Err(Error::ImaginaryResidual(im));
        }
        Ok(StepOutcome { next, p_block, p_nl, cumulative_log_probability: cum + p_block.ln() + p_nl.ln() })
    }

    /// Simulates every register, then post-selects LCU and copies, then e.
    pub fn single_step_full(&self, s: &ScaledState, cumulative: f64) -> Result<StepOutcome> {
        let width = self.full_register_qubits();
        let n = self.prep.register_qubits();
        let e = width - 1;
        let unl = self.prep.circuit(&s.state, s.scale)?;
        let (loaded, selected) = self.prep_load(s)?;
        let mut full = QuantumState::zero(1).tensor(&loaded);
        let c = unl.embed(&(0..unl.num_qubits()).collect::<Vec<_>>(), width)?;
        c.apply(&mut full)?;
        let p_nl = full.project(&selected, 0)?;
        let mut ua = Circuit::new(width);
        ua.push(self.be.gate(&(0..n).collect::<Vec<_>>(), e)?)?;
        ua.apply(&mut full)?;
        let p_block = full.project(&[e], 0)?;
        let mut all: Vec<usize> = selected;
        all.push(e);
        let target = full.reduced(&all, 0)?;
        let coeff: f64 = self.prep.coefficients(s.scale).iter().sum();
        let scale = coeff * s.scale * p_nl.sqrt() * self.be.a * p_block.sqrt();
        self.outcome(target, scale, p_nl, p_block, cumulative)
    }

    fn prep_load(&self, s: &ScaledState) -> Result<(QuantumState, Vec<usize>)> {
        if s.state.num_qubits() != self.prep.register_qubits() {
            return Err(Error::WidthMismatch { expected: self.prep.register_qubits(), found: s.state.num_qubits() });
        }
        Ok(self.prep.load(s))
    }

    /// Applies the post-selected maps directly.
    pub fn single_step_collapsed(&self, s: &ScaledState, cumulative: f64) -> Result<StepOutcome> {
        let (w, p_nl) = self.prep.apply_collapsed(s)?;
        let image = self.be.apply_block(w.state.amplitudes());
        let p_block: f64 = image.iter().map(|z| z.norm_sqr()).sum();
        if p_block < crate::qsim::MIN_PROBABILITY {
            return Err(Error::ImpossibleOutcome { probability: p_block });
        }
        let target = QuantumState::from_amplitudes(image)?;
        self.outcome(target, w.scale * self.be.a * p_block.sqrt(), p_nl, p_block, cumulative)
    }

    pub fn step(&self, mode: Mode, s: &ScaledState, cumulative: f64) -> Result<StepOutcome> {
        match mode {
            Mode::Full => self.single_step_full(s, cumulative),
            Mode::Collapsed => self.single_step_collapsed(s, cumulative),
        }
    }
}

/// One full-register step of the exact second-order scheme.
pub fn single_step_full(s: &ScaledState, p: &LorenzParams, dt: f64) -> Result<StepOutcome> {
    QuantumStepper::new(Scheme::Rk2, *p, dt)?.single_step_full(s, 0.0)
}

/// One collapsed step of the exact second-order scheme.
pub fn single_step_collapsed(s: &ScaledState, p: &LorenzParams, dt: f64) -> Result<StepOutcome> {
    QuantumStepper::new(Scheme::Rk2, *p, dt)?.single_step_collapsed(s, 0.0)
}
