//! Augmented linear forms of the Euler and RK2 Lorenz maps.
//!
//! A scheme fixes the monomial carried in each slot of the augmented vector
//! and the real matrix Â advancing it by one step: the first three entries of
//! Â·v(s) are the next (x, y, z). Slots past the monomial list are padding.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::{LorenzParams, State3};
use crate::error::{Error, Result};

/// Variable indices whose product forms a monomial: `[0, 1, 1]` is x·y².
pub type Monomial = &'static [usize];

const EULER_MONOMIALS: [Monomial; 5] = [&[0], &[1], &[2], &[0, 1], &[0, 2]];

const RK2_PRINTED_MONOMIALS: [Monomial; 10] = [
    &[0],
    &[1],
    &[2],
    &[0, 1],
    &[0, 2],
    &[1, 2],
    &[0, 1, 1],
    &[0, 0, 1],
    &[0, 0, 2],
    &[0, 1, 2],
];

const RK2_MONOMIALS: [Monomial; 12] = [
    &[0],
    &[1],
    &[2],
    &[0, 1],
    &[0, 2],
    &[1, 2],
    &[0, 1, 1],
    &[0, 0, 1],
    &[0, 0, 2],
    &[0, 1, 2],
    &[0, 0],
    &[1, 1],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// First order, 8-dimensional.
    Euler,
    /// Second-order Heun map, exact: carries x² and y² in slots 10 and 11.
    Rk2,
    /// Second-order map with the 10-monomial layout and coefficients exactly
    /// as commonly printed; agrees with RK2 only up to O(δt²) per step.
    Rk2Printed,
}

impl Scheme {
    /// The exact scheme for a given order.
    pub fn for_order(order: usize) -> Result<Self> {
        match order {
            1 => Ok(Scheme::Euler),
            2 => Ok(Scheme::Rk2),
            _ => Err(Error::InvalidParameter(format!("order must be 1 or 2, got {order}"))),
        }
    }

    pub fn order(self) -> usize {
        match self {
            Scheme::Euler => 1,
            Scheme::Rk2 | Scheme::Rk2Printed => 2,
        }
    }

    /// Qubits in one data register.
    pub fn num_qubits(self) -> usize {
        match self {
            Scheme::Euler => 3,
            Scheme::Rk2 | Scheme::Rk2Printed => 4,
        }
    }

    pub fn dim(self) -> usize {
        1 << self.num_qubits()
    }

    /// Highest monomial degree, which is also the number of data registers a
    /// nonlinear preparation consumes.
    pub fn max_degree(self) -> usize {
        self.order() + 1
    }

    pub fn monomials(self) -> &'static [Monomial] {
        match self {
            Scheme::Euler => &EULER_MONOMIALS,
            Scheme::Rk2 => &RK2_MONOMIALS,
            Scheme::Rk2Printed => &RK2_PRINTED_MONOMIALS,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Euler => "euler",
            Scheme::Rk2 => "rk2",
            Scheme::Rk2Printed => "rk2-printed",
        }
    }

    pub fn augmented_vector(self, s: State3) -> Vec<f64> {
        let vars = s.to_array();
        let mut v = vec![0.0; self.dim()];
        for (slot, m) in self.monomials().iter().enumerate() {
            v[slot] = m.iter().map(|&i| vars[i]).product();
        }
        v
    }

    pub fn time_advance(self, p: &LorenzParams, dt: f64) -> Result<DMatrix<f64>> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter(format!("dt must be positive and finite, got {dt}")));
        }
        let (s, r, b) = (p.sigma, p.rho, p.beta);
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        match self {
            Scheme::Euler => {
                m[(0, 0)] = 1.0 - s * dt;
                m[(0, 1)] = s * dt;
                m[(1, 0)] = r * dt;
                m[(1, 1)] = 1.0 - dt;
                m[(1, 4)] = -dt;
                m[(2, 2)] = 1.0 - b * dt;
                m[(2, 3)] = dt;
            }
            Scheme::Rk2 | Scheme::Rk2Printed => {
                let h = 0.5 * dt;
                m[(0, 0)] = 1.0 - s * dt + s * dt * h * (r + s);
                m[(0, 1)] = s * dt * (1.0 - h - s * h);
                m[(0, 4)] = -s * dt * h;

                m[(1, 0)] = r * dt * (1.0 - h - s * h);
                m[(1, 1)] = 1.0 - dt + dt * h + r * s * dt * h;
                m[(1, 4)] = h * (-1.0 + dt - (1.0 - b * dt) * (1.0 - s * dt));
                m[(1, 5)] = -s * dt * h * (1.0 - b * dt);
                m[(1, 6)] = -s * dt * dt * h;
                m[(1, 7)] = -dt * h * (1.0 - s * dt);

                m[(2, 2)] = 1.0 - b * dt + b * b * dt * h;
                m[(2, 3)] = h * (1.0 - b * dt + (1.0 - dt) * (1.0 - s * dt) + s * r * dt * dt);
                m[(2, 8)] = -dt * h * (1.0 - s * dt);
                if self == Scheme::Rk2 {
                    m[(2, 9)] = -s * dt * dt * h;
                    m[(2, 10)] = r * dt * h * (1.0 - s * dt);
                    m[(2, 11)] = s * dt * h * (1.0 - dt);
                } else {
                    m[(2, 9)] = -s * dt * h;
                }
            }
        }
        Ok(m)
    }

    /// First three entries of Â·v(s).
    pub fn classical_augmented_step(self, s: State3, p: &LorenzParams, dt: f64) -> Result<State3> {
        let a = self.time_advance(p, dt)?;
        let v = self.augmented_vector(s);
        let row = |i: usize| (0..self.dim()).map(|j| a[(i, j)] * v[j]).sum::<f64>();
        Ok(State3::new(row(0), row(1), row(2)))
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" | "1" => Ok(Scheme::Euler),
            "rk2" | "2" => Ok(Scheme::Rk2),
            "rk2-printed" => Ok(Scheme::Rk2Printed),
            _ => Err(Error::InvalidParameter(format!("unknown scheme `{s}`"))),
        }
    }
}

pub fn build_time_advance(order: usize, p: &LorenzParams, dt: f64) -> Result<DMatrix<f64>> {
    Scheme::for_order(order)?.time_advance(p, dt)
}

pub fn augmented_vector(order: usize, s: State3) -> Result<Vec<f64>> {
    Ok(Scheme::for_order(order)?.augmented_vector(s))
}

pub fn classical_augmented_step(order: usize, s: State3, p: &LorenzParams, dt: f64) -> Result<State3> {
    Scheme::for_order(order)?.classical_augmented_step(s, p, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{euler_step, rk2_step};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300).max(1.0)
    }

    #[test]
    fn augmented_vector_order1() {
        let v = augmented_vector(1, State3::new(2.0, 3.0, 5.0)).unwrap();
        assert_eq!(v, vec![2.0, 3.0, 5.0, 6.0, 10.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn augmented_vector_order2_layout() {
        let v = Scheme::Rk2Printed.augmented_vector(State3::new(2.0, 3.0, 5.0));
        assert_eq!(&v[..10], &[2.0, 3.0, 5.0, 6.0, 10.0, 15.0, 18.0, 12.0, 20.0, 30.0]);
        assert!(v[10..].iter().all(|&e| e == 0.0));
        let v = Scheme::Rk2.augmented_vector(State3::new(2.0, 3.0, 5.0));
        assert_eq!(&v[10..12], &[4.0, 9.0]);
        assert!(v[12..].iter().all(|&e| e == 0.0));
    }

    #[test]
    fn zero_state_maps_to_zero_vector() {
        for s in [Scheme::Euler, Scheme::Rk2, Scheme::Rk2Printed] {
            assert!(s.augmented_vector(State3::default()).iter().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn order_validation() {
        assert!(build_time_advance(3, &LorenzParams::classic(), 1e-3).is_err());
        assert!(build_time_advance(2, &LorenzParams::classic(), 0.0).is_err());
    }

    #[test]
    fn a1_gap_is_second_order() {
        let p = LorenzParams::new(10.0, 28.0, 0.55).unwrap();
        let gap = |dt: f64| {
            let a = build_time_advance(2, &p, dt).unwrap();
            a[(0, 0)] - (1.0 - p.sigma * dt)
        };
        let g = gap(1e-3);
        assert!((g - p.sigma * (p.rho + p.sigma) * 1e-6 / 2.0).abs() < 1e-15);
        assert!((gap(1e-3) / gap(5e-4) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn trailing_columns_are_zero() {
        let p = LorenzParams::classic();
        for (scheme, used) in [(Scheme::Euler, 5), (Scheme::Rk2Printed, 10), (Scheme::Rk2, 12)] {
            let a = scheme.time_advance(&p, 1e-3).unwrap();
            for j in used..scheme.dim() {
                assert!(a.column(j).iter().all(|&e| e == 0.0));
            }
            for i in 3..scheme.dim() {
                assert!(a.row(i).iter().all(|&e| e == 0.0));
            }
        }
    }

    #[test]
    fn printed_variant_has_second_order_defect() {
        // the missing z-row terms scale like δt²
        let p = LorenzParams::new(10.0, 28.0, 0.55).unwrap();
        let s = State3::new(5.0, 7.0, 20.0);
        let err = |dt: f64| {
            let a = Scheme::Rk2Printed.classical_augmented_step(s, &p, dt).unwrap();
            let b = rk2_step(s, &p, dt).unwrap();
            (a.z - b.z).abs()
        };
        assert!(err(1e-3) > 1e-3);
        let ratio = err(1e-3) / err(5e-4);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    proptest! {
        #[test]
        fn rk2_augmentation_is_exact(
            x in -30.0..30.0f64, y in -30.0..30.0f64, z in -10.0..50.0f64,
            sigma in 1.0..20.0f64, rho in 1.0..40.0f64, beta in 0.1..4.0f64,
            dt in 1e-4..1e-2f64,
        ) {
            let p = LorenzParams::new(sigma, rho, beta).unwrap();
            let s = State3::new(x, y, z);
            let a = classical_augmented_step(2, s, &p, dt).unwrap();
            let b = rk2_step(s, &p, dt).unwrap();
            let scale = s.norm().max(1.0);
            for (u, v) in a.to_array().into_iter().zip(b.to_array()) {
                prop_assert!((u - v).abs() <= 1e-12 * scale.max(v.abs()));
            }
        }

        #[test]
        fn euler_augmentation_is_exact(
            x in -30.0..30.0f64, y in -30.0..30.0f64, z in -10.0..50.0f64,
            dt in 1e-4..1e-2f64,
        ) {
            let p = LorenzParams::new(10.0, 28.0, 0.55).unwrap();
            let s = State3::new(x, y, z);
            let a = classical_augmented_step(1, s, &p, dt).unwrap();
            let b = euler_step(s, &p, dt).unwrap();
            for (u, v) in a.to_array().into_iter().zip(b.to_array()) {
                prop_assert!(rel(u, v) <= 1e-12);
            }
        }
    }
}
