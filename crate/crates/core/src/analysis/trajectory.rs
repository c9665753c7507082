use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{euler_step, rk2_step, rk4_step, LorenzParams, State3};
use crate::error::{Error, Result};
use crate::marching::{Mode, QuantumStepper};
use crate::scaled::ScaledState;
use crate::scheme::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    Euler,
    /// Classical RK2 (Heun).
    Classical,
    Rk4,
    QuantumCollapsed,
    QuantumFull,
}

impl Engine {
    pub fn is_quantum(self) -> bool {
        matches!(self, Engine::QuantumCollapsed | Engine::QuantumFull)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Euler => "euler",
            Engine::Classical => "classical",
            Engine::Rk4 => "rk4",
            Engine::QuantumCollapsed => "quantum-collapsed",
            Engine::QuantumFull => "quantum-full",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Engine::Euler),
            "classical" | "rk2" => Ok(Engine::Classical),
            "rk4" => Ok(Engine::Rk4),
            "quantum-collapsed" | "collapsed" => Ok(Engine::QuantumCollapsed),
            "quantum-full" | "full" => Ok(Engine::QuantumFull),
            _ => Err(Error::InvalidParameter(format!("unknown engine `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub state: State3,
    pub p_block: Option<f64>,
    pub p_nl: Option<f64>,
}

/// Advances one initial condition with a fixed engine.
#[derive(Debug, Clone)]
pub struct Propagator {
    engine: Engine,
    params: LorenzParams,
    dt: f64,
    state: State3,
    quantum: Option<(QuantumStepper, ScaledState)>,
    cumulative_log: f64,
}

impl Propagator {
    /// `scheme` is only used by the quantum engines.
    pub fn new(engine: Engine, scheme: Scheme, params: LorenzParams, dt: f64, x0: State3) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter(format!("dt must be positive and finite, got {dt}")));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidParameter("initial state must be finite".into()));
        }
        let quantum = if engine.is_quantum() {
            let st = QuantumStepper::new(scheme, params, dt)?;
            let s = st.encode(x0)?;
            Some((st, s))
        } else {
            None
        };
        Ok(Self { engine, params, dt, state: x0, quantum, cumulative_log: 0.0 })
    }

    pub fn state(&self) -> State3 {
        self.state
    }

    pub fn cumulative_log_probability(&self) -> f64 {
        self.cumulative_log
    }

    pub fn advance(&mut self) -> Result<StepRecord> {
        let (p, dt) = (&self.params, self.dt);
        let rec = match self.engine {
            Engine::Euler => StepRecord { state: euler_step(self.state, p, dt)?, p_block: None, p_nl: None },
            Engine::Classical => StepRecord { state: rk2_step(self.state, p, dt)?, p_block: None, p_nl: None },
            Engine::Rk4 => StepRecord { state: rk4_step(self.state, p, dt)?, p_block: None, p_nl: None },
            Engine::QuantumCollapsed | Engine::QuantumFull => {
                let mode = if self.engine == Engine::QuantumFull { Mode::Full } else { Mode::Collapsed };
                let (st, s) = self.quantum.as_mut().expect("quantum engine");
                let out = st.step(mode, s, self.cumulative_log)?;
                self.cumulative_log = out.cumulative_log_probability;
                *s = out.next;
                StepRecord { state: s.state3(), p_block: Some(out.p_block), p_nl: Some(out.p_nl) }
            }
        };
        if !rec.state.is_finite() {
            return Err(Error::InvalidParameter("trajectory diverged".into()));
        }
        self.state = rec.state;
        Ok(rec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub step: usize,
    pub t: f64,
    pub state: State3,
    pub p_block: Option<f64>,
    pub p_nl: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: LorenzParams,
    /// Integration step.
    pub dt: f64,
    pub engine: Engine,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn has_probabilities(&self) -> bool {
        self.samples.iter().any(|s| s.p_block.is_some())
    }

    /// `step,t,x,y,z` plus `p_block,p_nl` for quantum runs; the initial row
    /// has probability 1.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let probs = self.engine.is_quantum();
        writeln!(w, "step,t,x,y,z{}", if probs { ",p_block,p_nl" } else { "" })?;
        for s in &self.samples {
            write!(w, "{},{},{},{},{}", s.step, s.t, s.state.x, s.state.y, s.state.z)?;
            if probs {
                write!(w, ",{},{}", s.p_block.unwrap_or(1.0), s.p_nl.unwrap_or(1.0))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Runs `steps` steps keeping every `stride`-th sample (the initial and last
/// samples are always kept).
pub fn run_trajectory(
    engine: Engine,
    scheme: Scheme,
    params: LorenzParams,
    dt: f64,
    steps: usize,
    x0: State3,
    stride: usize,
) -> Result<Trajectory> {
    let stride = stride.max(1);
    let mut prop = Propagator::new(engine, scheme, params, dt, x0)?;
    let mut samples = vec![Sample { step: 0, t: 0.0, state: x0, p_block: None, p_nl: None }];
    for k in 1..=steps {
        let r = prop.advance()?;
        if k % stride == 0 || k == steps {
            samples.push(Sample { step: k, t: k as f64 * dt, state: r.state, p_block: r.p_block, p_nl: r.p_nl });
        }
    }
    Ok(Trajectory { params, dt, engine, samples })
}
