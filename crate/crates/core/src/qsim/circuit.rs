use nalgebra::DMatrix;
use num_complex::Complex64;

use super::cost::{gate_cost, GateCost};
use super::gate::{apply_conditioned, Gate};
use super::state::QuantumState;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new() }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.num_qubits)?;
        self.gates.push(g);
        Ok(())
    }

    /// Appends `other`, which must have the same width.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, found: other.num_qubits });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Places this circuit into a wider register: local qubit q becomes `map[q]`.
    pub fn embed(&self, map: &[usize], num_qubits: usize) -> Result<Circuit> {
        if map.len() != self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, found: map.len() });
        }
        Circuit::from_gates(num_qubits, self.gates.iter().map(|g| g.remap(&|q| map[q])).collect())
    }

    pub fn inverse(&self) -> Circuit {
        Circuit { num_qubits: self.num_qubits, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, found: state.num_qubits() });
        }
        let amps = state.amplitudes_mut();
        for g in &self.gates {
            apply_conditioned(amps, g, 0, 0);
        }
        Ok(())
    }

    /// Dense matrix of the whole circuit, column k = circuit applied to |k⟩.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let d = 1usize << self.num_qubits;
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            let mut s = QuantumState::basis(self.num_qubits, k);
            self.apply(&mut s).expect("width checked");
            for (i, a) in s.amplitudes().iter().enumerate() {
                m[(i, k)] = *a;
            }
        }
        m
    }

    pub fn cost(&self) -> GateCost {
        gate_cost(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::gate::{apply_gate, Control};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
        let m = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        m.qr().q()
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> QuantumState {
        QuantumState::from_amplitudes(
            (0..1 << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect(),
        )
        .unwrap()
    }

    /// Kronecker expansion of a gate on qubits (a, b) of an n-qubit register.
    fn expand_two_qubit(u: &DMatrix<Complex64>, a: usize, b: usize, n: usize) -> DMatrix<Complex64> {
        let d = 1 << n;
        DMatrix::from_fn(d, d, |i, j| {
            let rest = !((1 << a) | (1 << b));
            if i & rest != j & rest {
                return Complex64::new(0.0, 0.0);
            }
            let li = (i >> a & 1) | (i >> b & 1) << 1;
            let lj = (j >> a & 1) | (j >> b & 1) << 1;
            u[(li, lj)]
        })
    }

    #[test]
    fn two_qubit_gate_matches_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (a, b) in [(0, 1), (3, 1), (2, 0)] {
            let u = random_unitary(&mut rng, 4);
            let psi = random_state(&mut rng, 4);
            let mut s = psi.clone();
            apply_gate(&mut s, &Gate::unitary(vec![a, b], u.clone()).unwrap()).unwrap();
            let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
            let expect = expand_two_qubit(&u, a, b, 4) * v;
            for (x, y) in s.amplitudes().iter().zip(expect.iter()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gate_by_gate_equals_composed_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            let mut c = Circuit::new(n);
            for step in 0..6 {
                let q = step % n;
                c.push(Gate::h(q)).unwrap();
                c.push(Gate::unitary(vec![q], random_unitary(&mut rng, 2)).unwrap()).unwrap();
                if n > 1 {
                    c.push(Gate::cnot(q, (q + 1) % n)).unwrap();
                    let t: Vec<usize> = vec![1, 0, 3, 2];
                    c.push(Gate::permutation(vec![(q + 1) % n, q], t).unwrap()).unwrap();
                }
                if n > 2 {
                    c.push(Gate::mcx(q, vec![Control::on((q + 1) % n), Control::off((q + 2) % n)])).unwrap();
                }
            }
            let m = c.to_matrix();
            for _ in 0..5 {
                let psi = random_state(&mut rng, n);
                let mut s = psi.clone();
                c.apply(&mut s).unwrap();
                let expect = &m * nalgebra::DVector::from_column_slice(psi.amplitudes());
                for (x, y) in s.amplitudes().iter().zip(expect.iter()) {
                    assert!((x - y).norm() < 1e-11);
                }
                assert!((s.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut c = Circuit::new(3);
        c.push(Gate::unitary(vec![2, 0], random_unitary(&mut rng, 4)).unwrap()).unwrap();
        c.push(Gate::mcx(1, vec![Control::on(0), Control::on(2)])).unwrap();
        let mut both = c.clone();
        both.append(&c.inverse()).unwrap();
        let m = both.to_matrix();
        assert!((m - DMatrix::identity(8, 8)).iter().all(|e| e.norm() < 1e-12));
    }

    #[test]
    fn width_mismatch() {
        let mut s = QuantumState::zero(2);
        assert!(matches!(Circuit::new(3).apply(&mut s), Err(Error::WidthMismatch { .. })));
        let mut a = Circuit::new(2);
        assert!(a.append(&Circuit::new(1)).is_err());
    }
}
