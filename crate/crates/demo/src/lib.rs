//! Browser demo: trajectories, a small β sweep and the σ_max curve.
//!
//! Each export returns a flat `Float64Array`; the plain functions in [`core`]
//! do the work and are usable natively.

use wasm_bindgen::prelude::*;

pub mod core {
    use qmarch::analysis::{bifurcation_sweep, run_trajectory, Engine, SweepConfig};
    use qmarch::block_encoding::{dt_grid, sigma_max_curve};
    use qmarch::{LorenzParams, Scheme, State3};

    const MAX_STEPS: usize = 2_000_000;

    fn params(beta: f64) -> Result<LorenzParams, String> {
        LorenzParams::new(10.0, 28.0, beta).map_err(|e| e.to_string())
    }

    /// Rows of `t, xq, yq, zq, xc, yc, zc`: quantum-collapsed and classical
    /// RK2 side by side from (0.1, −1.1, 10.1).
    pub fn trajectories(beta: f64, dt: f64, steps: usize, stride: usize) -> Result<Vec<f64>, String> {
        if steps > MAX_STEPS {
            return Err(format!("at most {MAX_STEPS} steps"));
        }
        let p = params(beta)?;
        let x0 = State3::new(0.1, -1.1, 10.1);
        let run = |e| run_trajectory(e, Scheme::Rk2, p, dt, steps, x0, stride).map_err(|e| e.to_string());
        let (q, c) = (run(Engine::QuantumCollapsed)?, run(Engine::Classical)?);
        let mut out = Vec::with_capacity(q.len() * 7);
        for (a, b) in q.samples.iter().zip(&c.samples) {
            out.extend([a.t, a.state.x, a.state.y, a.state.z, b.state.x, b.state.y, b.state.z]);
        }
        Ok(out)
    }

    /// Pairs `beta, z` of the x = 0 section for each β of the grid.
    pub fn bifurcation(beta_min: f64, beta_max: f64, beta_step: f64, dt: f64, t_total: f64, quantum: bool) -> Result<Vec<f64>, String> {
        let cfg = SweepConfig {
            beta_min,
            beta_max,
            beta_step,
            dt,
            t_total,
            engine: if quantum { Engine::QuantumCollapsed } else { Engine::Classical },
            ..Default::default()
        };
        let n = cfg.betas().map_err(|e| e.to_string())?.len() as f64 * t_total / dt;
        if n > 5e7 {
            return Err("sweep too large for the browser".into());
        }
        let d = bifurcation_sweep(&cfg).map_err(|e| e.to_string())?;
        Ok(d.entries.iter().flat_map(|e| e.z.iter().flat_map(move |&z| [e.beta, z])).collect())
    }

    /// Pairs `dt, sigma_max`.
    pub fn sigma_max(beta: f64, dt_min: f64, dt_max: f64, points: usize) -> Result<Vec<f64>, String> {
        let dts = dt_grid(dt_min, dt_max, points.min(500)).map_err(|e| e.to_string())?;
        let curve = sigma_max_curve(&params(beta)?, Scheme::Rk2, &dts).map_err(|e| e.to_string())?;
        Ok(curve.into_iter().flat_map(|(a, b)| [a, b]).collect())
    }
}

#[wasm_bindgen]
pub fn trajectories(beta: f64, dt: f64, steps: usize, stride: usize) -> Result<Vec<f64>, JsError> {
    core::trajectories(beta, dt, steps, stride).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bifurcation(beta_min: f64, beta_max: f64, beta_step: f64, dt: f64, t_total: f64, quantum: bool) -> Result<Vec<f64>, JsError> {
    core::bifurcation(beta_min, beta_max, beta_step, dt, t_total, quantum).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sigma_max(beta: f64, dt_min: f64, dt_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    core::sigma_max(beta, dt_min, dt_max, points).map_err(|e| JsError::new(&e))
}
