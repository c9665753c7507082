use std::io::Write;

use serde::{Deserialize, Serialize};

use super::poincare::{detect_period_with, PeriodResult, SectionBuilder, DEFAULT_CHAOS_THRESHOLD, DEFAULT_CLUSTER_TOL};
use super::trajectory::{Engine, Propagator};
use crate::dynamics::{LorenzParams, State3};
use crate::error::{Error, Result};
use crate::scheme::Scheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: LorenzParams,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_step: f64,
    pub dt: f64,
    /// Total simulated time per β.
    pub t_total: f64,
    pub engine: Engine,
    pub scheme: Scheme,
    pub x0: State3,
    /// Fraction of `t_total` discarded before recording crossings.
    pub transient_fraction: f64,
    pub cluster_tol: f64,
    pub chaos_threshold: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            base: LorenzParams::new(10.0, 28.0, 0.55).expect("valid"),
            beta_min: 0.54,
            beta_max: 0.58,
            beta_step: 5e-4,
            dt: 2.5e-4,
            t_total: 150.0,
            engine: Engine::Classical,
            scheme: Scheme::Rk2,
            x0: State3::new(0.1, -1.1, 1.1),
            transient_fraction: 0.8,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            chaos_threshold: DEFAULT_CHAOS_THRESHOLD,
        }
    }
}

impl SweepConfig {
    pub fn betas(&self) -> Result<Vec<f64>> {
        if !(self.beta_step > 0.0) || !(self.beta_max >= self.beta_min) || !(self.beta_min > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bad β range [{}, {}] step {}",
                self.beta_min, self.beta_max, self.beta_step
            )));
        }
        let n = ((self.beta_max - self.beta_min) / self.beta_step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.beta_min + i as f64 * self.beta_step).collect())
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_total > 0.0) || !(0.0..1.0).contains(&self.transient_fraction) {
            return Err(Error::InvalidParameter(format!(
                "bad sweep timing dt={} T={} transient={}",
                self.dt, self.t_total, self.transient_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationEntry {
    pub beta: f64,
    pub z: Vec<f64>,
    /// None when the section is empty.
    pub period: Option<PeriodResult>,
}

impl BifurcationEntry {
    /// Cluster count, with chaos mapped to `usize::MAX` and an empty section to 0.
    pub fn order_key(&self) -> usize {
        match &self.period {
            None => 0,
            Some(r) if r.chaotic => usize::MAX,
            Some(r) => r.count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub engine: Engine,
    pub entries: Vec<BifurcationEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Period before the transition.
    pub from: usize,
    /// First β whose cluster count exceeds `from`.
    pub beta: Option<f64>,
}

impl BifurcationDiagram {
    /// First β at which the count exceeds 1, 2 and 4.
    pub fn transitions(&self) -> Vec<Transition> {
        [1usize, 2, 4]
            .into_iter()
            .map(|from| Transition { from, beta: self.entries.iter().find(|e| e.order_key() > from).map(|e| e.beta) })
            .collect()
    }

    pub fn periods(&self) -> Vec<Option<usize>> {
        self.entries.iter().map(|e| e.period.as_ref().and_then(PeriodResult::period)).collect()
    }

    /// `beta,z` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "beta,z")?;
        for e in &self.entries {
            for z in &e.z {
                writeln!(w, "{},{}", e.beta, z)?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Section and period of one run, streamed without storing the trajectory.
pub fn section_run(cfg: &SweepConfig, beta: f64) -> Result<BifurcationEntry> {
    cfg.validate()?;
    let p = LorenzParams::new(cfg.base.sigma, cfg.base.rho, beta)?;
    let steps = (cfg.t_total / cfg.dt).round() as usize;
    let mut prop = Propagator::new(cfg.engine, cfg.scheme, p, cfg.dt, cfg.x0)?;
    let mut b = SectionBuilder::new(cfg.transient_fraction * cfg.t_total, Some(p));
    b.push(0.0, cfg.x0);
    for k in 1..=steps {
        let r = prop.advance()?;
        b.push(k as f64 * cfg.dt, r.state);
    }
    let sec = b.finish();
    let period = match detect_period_with(&sec, cfg.cluster_tol, cfg.chaos_threshold) {
        Ok(r) => Some(r),
        Err(Error::EmptySection) => None,
        Err(e) => return Err(e),
    };
    Ok(BifurcationEntry { beta, z: sec.z_values(), period })
}

/// Runs every β of the grid; independent runs execute in parallel and the
/// result keeps grid order.
pub fn bifurcation_sweep(cfg: &SweepConfig) -> Result<BifurcationDiagram> {
    cfg.validate()?;
    let betas = cfg.betas()?;
    #[cfg(feature = "parallel")]
    let entries: Result<Vec<_>> = {
        use rayon::prelude::*;
        betas.par_iter().map(|&b| section_run(cfg, b)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let entries: Result<Vec<_>> = betas.iter().map(|&b| section_run(cfg, b)).collect();
    Ok(BifurcationDiagram { engine: cfg.engine, entries: entries? })
}
