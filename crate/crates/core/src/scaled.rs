use num_complex::Complex64;

use crate::dynamics::State3;
use crate::error::{Error, Result};
use crate::qsim::QuantumState;

/// A unit quantum state paired with the norm of the vector it encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledState {
    pub state: QuantumState,
    pub scale: f64,
}

pub const IMAG_TOL: f64 = 1e-10;

impl ScaledState {
    pub fn new(state: QuantumState, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("scale must be positive and finite, got {scale}")));
        }
        Ok(Self { state, scale })
    }

    pub fn from_vector(v: &[f64]) -> Result<Self> {
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let state = QuantumState::from_real(v)?;
        Self::new(state, scale)
    }

    /// (x, y, z, 0, …) on `num_qubits` qubits.
    pub fn from_state3(s: State3, num_qubits: usize) -> Result<Self> {
        if num_qubits < 2 {
            return Err(Error::InvalidParameter("need at least two qubits for (x, y, z)".into()));
        }
        let mut v = vec![0.0; 1 << num_qubits];
        v[..3].copy_from_slice(&s.to_array());
        Self::from_vector(&v)
    }

    pub fn semantic_complex(&self) -> Vec<Complex64> {
        self.state.amplitudes().iter().map(|a| a * self.scale).collect()
    }

    /// Real parts of scale × amplitudes.
    pub fn semantic(&self) -> Vec<f64> {
        self.state.amplitudes().iter().map(|a| a.re * self.scale).collect()
    }

    /// Largest imaginary part among the first three semantic entries.
    pub fn imag_residual(&self) -> f64 {
        self.state.amplitudes()[..3].iter().map(|a| (a.im * self.scale).abs()).fold(0.0, f64::max)
    }

    pub fn state3(&self) -> State3 {
        let a = self.state.amplitudes();
        State3::new(a[0].re * self.scale, a[1].re * self.scale, a[2].re * self.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = ScaledState::from_state3(State3::new(2.0, -3.0, 6.0), 4).unwrap();
        assert!((s.scale - 7.0).abs() < 1e-15);
        let back = s.state3();
        assert!((back.x - 2.0).abs() < 1e-14 && (back.y + 3.0).abs() < 1e-14 && (back.z - 6.0).abs() < 1e-14);
        assert_eq!(s.imag_residual(), 0.0);
    }

    #[test]
    fn zero_rejected() {
        assert!(ScaledState::from_state3(State3::default(), 4).is_err());
        assert!(ScaledState::new(QuantumState::zero(1), 0.0).is_err());
    }
}
