//! Lorenz vector field and the classical fixed-step integrators used as oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
}

impl LorenzParams {
    pub fn new(sigma: f64, rho: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("sigma", sigma), ("rho", rho), ("beta", beta)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { sigma, rho, beta })
    }

    /// The classic chaotic setting (10, 28, 8/3).
    pub fn classic() -> Self {
        Self { sigma: 10.0, rho: 28.0, beta: 8.0 / 3.0 }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    /// Nontrivial equilibria C± = (±√(β(ρ−1)), ±√(β(ρ−1)), ρ−1), when ρ > 1.
    pub fn fixed_points(&self) -> Option<[State3; 2]> {
        if self.rho <= 1.0 {
            return None;
        }
        let r = (self.beta * (self.rho - 1.0)).sqrt();
        let z = self.rho - 1.0;
        Some([State3::new(r, r, z), State3::new(-r, -r, z)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl State3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn axpy(self, a: f64, d: State3) -> State3 {
        State3::new(self.x + a * d.x, self.y + a * d.y, self.z + a * d.z)
    }
}

pub fn lorenz_rhs(s: State3, p: &LorenzParams) -> State3 {
    State3::new(
        p.sigma * (s.y - s.x),
        s.x * (p.rho - s.z) - s.y,
        s.x * s.y - p.beta * s.z,
    )
}

/// Trace of the Jacobian; constant for the Lorenz field.
pub fn divergence(p: &LorenzParams) -> f64 {
    -(p.sigma + 1.0 + p.beta)
}

pub fn jacobian(s: State3, p: &LorenzParams) -> [[f64; 3]; 3] {
    [
        [-p.sigma, p.sigma, 0.0],
        [p.rho - s.z, -1.0, -s.x],
        [s.y, s.x, -p.beta],
    ]
}

fn check_dt(dt: f64) -> Result<()> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!("dt must be positive and finite, got {dt}")));
    }
    Ok(())
}

pub fn euler_step(s: State3, p: &LorenzParams, dt: f64) -> Result<State3> {
    check_dt(dt)?;
    Ok(s.axpy(dt, lorenz_rhs(s, p)))
}

/// Heun predictor-corrector: x* = x + δt f(x), x' = x + δt/2 (f(x) + f(x*)).
pub fn rk2_step(s: State3, p: &LorenzParams, dt: f64) -> Result<State3> {
    check_dt(dt)?;
    let k1 = lorenz_rhs(s, p);
    let k2 = lorenz_rhs(s.axpy(dt, k1), p);
    Ok(State3::new(
        s.x + 0.5 * dt * (k1.x + k2.x),
        s.y + 0.5 * dt * (k1.y + k2.y),
        s.z + 0.5 * dt * (k1.z + k2.z),
    ))
}

pub fn rk4_step(s: State3, p: &LorenzParams, dt: f64) -> Result<State3> {
    check_dt(dt)?;
    let k1 = lorenz_rhs(s, p);
    let k2 = lorenz_rhs(s.axpy(0.5 * dt, k1), p);
    let k3 = lorenz_rhs(s.axpy(0.5 * dt, k2), p);
    let k4 = lorenz_rhs(s.axpy(dt, k3), p);
    let w = dt / 6.0;
    Ok(State3::new(
        s.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        s.y + w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        s.z + w * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
    ))
}
