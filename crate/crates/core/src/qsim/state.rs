use num_complex::Complex64;

use crate::error::{Error, Result};

/// Statevector over `num_qubits` qubits. Qubit q is bit q of the basis index,
/// so the least significant qubit varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

pub const NORM_TOL: f64 = 1e-10;

/// Smallest probability accepted for a post-selected outcome.
pub const MIN_PROBABILITY: f64 = 1e-300;

impl QuantumState {
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amps }
    }

    /// Normalizes the given amplitudes. Length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("amplitude count {len} is not a power of two")));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amps })
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        Self::from_amplitudes(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |ψ⟩ ⊗ |φ⟩ with `self` in the high qubits.
    pub fn tensor(&self, low: &QuantumState) -> QuantumState {
        let mut amps = Vec::with_capacity(self.dim() * low.dim());
        for a in &self.amps {
            for b in &low.amps {
                amps.push(a * b);
            }
        }
        QuantumState { num_qubits: self.num_qubits + low.num_qubits, amps }
    }

    /// Probability that the qubits in `register` read `outcome`
    /// (bit i of `outcome` is the value of `register[i]`).
    pub fn outcome_probability(&self, register: &[usize], outcome: usize) -> Result<f64> {
        let (mask, value) = self.register_mask(register, outcome)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == value)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects onto `outcome` in `register` and renormalizes. Returns the
    /// outcome probability.
    pub fn project(&mut self, register: &[usize], outcome: usize) -> Result<f64> {
        let (mask, value) = self.register_mask(register, outcome)?;
        let mut prob = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == value {
                prob += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        if prob < MIN_PROBABILITY {
            return Err(Error::ImpossibleOutcome { probability: prob });
        }
        let s = 1.0 / prob.sqrt();
        for a in &mut self.amps {
            *a *= s;
        }
        Ok(prob)
    }

    /// Amplitudes of the qubits outside `register` after a projection onto
    /// `outcome`; the remaining qubits keep their relative order.
    pub fn reduced(&self, register: &[usize], outcome: usize) -> Result<QuantumState> {
        let (mask, value) = self.register_mask(register, outcome)?;
        let keep: Vec<usize> = (0..self.num_qubits).filter(|q| mask >> q & 1 == 0).collect();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << keep.len()];
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == value {
                let j = keep.iter().enumerate().fold(0, |acc, (b, &q)| acc | ((i >> q & 1) << b));
                amps[j] = *a;
            }
        }
        QuantumState::from_amplitudes(amps)
    }

    fn register_mask(&self, register: &[usize], outcome: usize) -> Result<(usize, usize)> {
        let mut mask = 0usize;
        let mut value = 0usize;
        for (b, &q) in register.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits });
            }
            if mask >> q & 1 == 1 {
                return Err(Error::OverlappingQubits);
            }
            mask |= 1 << q;
            value |= (outcome >> b & 1) << q;
        }
        if register.len() < usize::BITS as usize && outcome >> register.len() != 0 {
            return Err(Error::InvalidParameter(format!("outcome {outcome} wider than register")));
        }
        Ok((mask, value))
    }
}

/// Measures `register`, post-selects `outcome`, and returns the renormalized
/// state together with the outcome probability.
pub fn project_measure(state: &QuantumState, register: &[usize], outcome: usize) -> Result<(QuantumState, f64)> {
    let mut s = state.clone();
    let p = s.project(register, outcome)?;
    Ok((s, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn from_amplitudes_normalizes() {
        let s = QuantumState::from_real(&[3.0, 4.0]).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - 0.8).abs() < 1e-15);
        assert_eq!(QuantumState::from_real(&[0.0, 0.0]), Err(Error::ZeroState));
        assert!(QuantumState::from_real(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn product_state_projection() {
        let psi = QuantumState::from_real(&[0.6, 0.8]).unwrap();
        let full = QuantumState::zero(1).tensor(&psi);
        let (post, p) = project_measure(&full, &[1], 0).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert_eq!(post.reduced(&[1], 0).unwrap(), psi);
    }

    #[test]
    fn uniform_projection_half() {
        let s = QuantumState::from_real(&[1.0, 1.0]).unwrap();
        let (post, p) = project_measure(&s, &[0], 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(post.amplitudes(), &[c(1.0), c(0.0)]);
    }

    #[test]
    fn impossible_outcome() {
        let s = QuantumState::zero(2);
        assert!(matches!(project_measure(&s, &[1], 1), Err(Error::ImpossibleOutcome { .. })));
        assert!(matches!(s.outcome_probability(&[2], 0), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(s.outcome_probability(&[0, 0], 0), Err(Error::OverlappingQubits)));
    }

    #[test]
    fn reduced_keeps_order() {
        // |q2 q1 q0⟩ = |1⟩|0⟩|1⟩ → drop q1 → |q2 q0⟩ = |11⟩
        let s = QuantumState::basis(3, 0b101);
        let r = s.reduced(&[1], 0).unwrap();
        assert_eq!(r, QuantumState::basis(2, 0b11));
    }
}
