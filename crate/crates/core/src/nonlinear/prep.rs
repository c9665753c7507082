//! The nonlinear state preparation U_nl.
//!
//! Registers, from the least significant qubits up: the target, then
//! `max_degree − 1` copies, then the LCU index. A degree-j term permutes the
//! target and the first j − 1 copies, takes their Hadamard product with
//! U_h^j, and rotates each remaining copy from the reference state to |0…0⟩.
//! Term coefficients are sʲ⁻¹ for the tracked scale s, so the post-selected
//! target is the unnormalized monomial vector divided by a·s.

use num_complex::Complex64;

use super::lcu::{lcu_circuit, lcu_width, reflector};
use super::synth::{plan_terms, scheme_specs, LcuTerm};
use crate::error::{Error, Result};
use crate::qsim::{u_h_n, Circuit, Gate, QuantumState};
use crate::scaled::ScaledState;
use crate::scheme::Scheme;

/// Slots where a Lorenz state may be nonzero.
pub const SUPPORT: [usize; 3] = [0, 1, 2];

const PADDING_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct NonlinearPrep {
    scheme: Scheme,
    terms: Vec<LcuTerm>,
}

impl NonlinearPrep {
    pub fn new(scheme: Scheme) -> Result<Self> {
        let terms = plan_terms(&scheme_specs(scheme), scheme.dim(), &SUPPORT)?;
        Ok(Self { scheme, terms })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn terms(&self) -> &[LcuTerm] {
        &self.terms
    }

    pub fn register_qubits(&self) -> usize {
        self.scheme.num_qubits()
    }

    pub fn registers(&self) -> usize {
        self.scheme.max_degree()
    }

    pub fn lcu_qubits(&self) -> usize {
        lcu_width(self.terms.len())
    }

    /// Target + copies + LCU index.
    pub fn num_qubits(&self) -> usize {
        self.registers() * self.register_qubits() + self.lcu_qubits()
    }

    pub fn coefficients(&self, scale: f64) -> Vec<f64> {
        self.terms.iter().map(|t| scale.powi(t.degree as i32 - 1)).collect()
    }

    fn term_circuit(&self, term: &LcuTerm, unprepare: &Gate) -> Result<Circuit> {
        let n = self.register_qubits();
        let mut c = Circuit::new(self.registers() * n);
        for r in 0..term.degree {
            let table = term.gates.gate_table(r);
            if table.iter().enumerate().any(|(i, &t)| i != t) {
                c.push(Gate::permutation((r * n..(r + 1) * n).collect(), table)?)?;
            }
        }
        for r in term.degree..self.registers() {
            c.push(unprepare.remap(&|q| q + r * n))?;
        }
        if term.degree > 1 {
            let h = u_h_n(n, term.degree)?;
            c.append(&h.embed(&(0..h.num_qubits()).collect::<Vec<_>>(), c.num_qubits())?)?;
        }
        Ok(c)
    }

    /// The full LCU circuit for a state with unit amplitudes `reference`
    /// (real parts are used) and tracked norm `scale`.
    pub fn circuit(&self, reference: &QuantumState, scale: f64) -> Result<Circuit> {
        let re: Vec<f64> = reference.amplitudes().iter().map(|a| a.re).collect();
        let unprepare = Gate::unitary((0..self.register_qubits()).collect(), reflector(&re)?)?;
        let terms = self.terms.iter().map(|t| self.term_circuit(t, &unprepare)).collect::<Result<Vec<_>>>()?;
        lcu_circuit(&self.coefficients(scale), &terms)
    }

    fn check_input(&self, s: &ScaledState) -> Result<()> {
        if s.state.num_qubits() != self.register_qubits() {
            return Err(Error::WidthMismatch { expected: self.register_qubits(), found: s.state.num_qubits() });
        }
        check_padding(&s.state, SUPPORT.len())
    }

    fn finish(&self, target: QuantumState, s: &ScaledState, p: f64) -> Result<(ScaledState, f64)> {
        check_padding(&target, self.scheme.monomials().len())?;
        let a: f64 = self.coefficients(s.scale).iter().sum();
        Ok((ScaledState::new(target, a * s.scale * p.sqrt())?, p))
    }

    /// Simulates the circuit on all registers and post-selects the LCU index
    /// and copies on zero.
    pub fn apply_full(&self, s: &ScaledState) -> Result<(ScaledState, f64)> {
        self.check_input(s)?;
        let (mut full, copies) = self.load(s);
        self.circuit(&s.state, s.scale)?.apply(&mut full)?;
        let p = full.project(&copies, 0)?;
        let target = full.reduced(&copies, 0)?;
        self.finish(target, s, p)
    }

    /// |0⟩_LCU ⊗ ψ^{⊗p} and the qubits that are post-selected.
    pub(crate) fn load(&self, s: &ScaledState) -> (QuantumState, Vec<usize>) {
        let mut full = s.state.clone();
        for _ in 1..self.registers() {
            full = s.state.tensor(&full);
        }
        let full = QuantumState::zero(self.lcu_qubits()).tensor(&full);
        (full, (self.register_qubits()..self.num_qubits()).collect())
    }

    /// The same post-selected map evaluated without ancilla registers.
    pub fn apply_collapsed(&self, s: &ScaledState) -> Result<(ScaledState, f64)> {
        self.check_input(s)?;
        let psi = s.state.amplitudes();
        let overlap: Complex64 = psi.iter().map(|a| a.re * a).sum();
        let coeffs = self.coefficients(s.scale);
        let a: f64 = coeffs.iter().sum();
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (t, c) in self.terms.iter().zip(&coeffs) {
            let w = overlap.powi((self.registers() - t.degree) as i32) * (c / a);
            for (i, o) in out.iter_mut().enumerate() {
                let prod: Complex64 = t.gates.sources.iter().map(|src| psi[src[i]]).product();
                *o += w * prod;
            }
        }
        let p: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        if p < crate::qsim::MIN_PROBABILITY {
            return Err(Error::ImpossibleOutcome { probability: p });
        }
        self.finish(QuantumState::from_amplitudes(out)?, s, p)
    }
}

fn check_padding(state: &QuantumState, used: usize) -> Result<()> {
    for (slot, a) in state.amplitudes().iter().enumerate().skip(used) {
        if a.norm() > PADDING_TOL {
            return Err(Error::SupportViolation { slot, magnitude: a.norm() });
        }
    }
    Ok(())
}

/// U_nl for the exact scheme of `order` around `reference`, with its LCU
/// coefficients.
pub fn build_u_nl(order: usize, reference: &QuantumState, scale: f64) -> Result<(Circuit, Vec<f64>)> {
    let prep = NonlinearPrep::new(Scheme::for_order(order)?)?;
    Ok((prep.circuit(reference, scale)?, prep.coefficients(scale)))
}

/// Full-circuit preparation of the augmented vector of the state encoded by `s`.
pub fn prepare_nonlinear_scaled(s: &ScaledState, order: usize) -> Result<(ScaledState, f64)> {
    NonlinearPrep::new(Scheme::for_order(order)?)?.apply_full(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::State3;
    use proptest::prelude::*;

    fn scaled(s: State3, scheme: Scheme) -> ScaledState {
        ScaledState::from_state3(s, scheme.num_qubits()).unwrap()
    }

    fn assert_semantic(out: &ScaledState, want: &[f64], tol: f64) {
        let got = out.semantic();
        let scale = want.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol * scale, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn widths() {
        assert_eq!(NonlinearPrep::new(Scheme::Euler).unwrap().num_qubits(), 7);
        assert_eq!(NonlinearPrep::new(Scheme::Rk2Printed).unwrap().num_qubits(), 14);
        assert_eq!(NonlinearPrep::new(Scheme::Rk2).unwrap().num_qubits(), 15);
    }

    #[test]
    fn order_one_example() {
        let s = scaled(State3::new(2.0, 3.0, 5.0), Scheme::Euler);
        let (out, p) = prepare_nonlinear_scaled(&s, 1).unwrap();
        assert!(p > 0.0 && p <= 1.0);
        assert_semantic(&out, &[2.0, 3.0, 5.0, 6.0, 10.0, 0.0, 0.0, 0.0], 1e-12);
    }

    #[test]
    fn all_ones() {
        for scheme in [Scheme::Euler, Scheme::Rk2, Scheme::Rk2Printed] {
            let prep = NonlinearPrep::new(scheme).unwrap();
            let (out, _) = prep.apply_full(&scaled(State3::new(1.0, 1.0, 1.0), scheme)).unwrap();
            assert_semantic(&out, &scheme.augmented_vector(State3::new(1.0, 1.0, 1.0)), 1e-12);
        }
    }

    #[test]
    fn basis_state_keeps_powers_of_x() {
        let prep = NonlinearPrep::new(Scheme::Rk2).unwrap();
        let (out, _) = prep.apply_full(&scaled(State3::new(1.0, 0.0, 0.0), Scheme::Rk2)).unwrap();
        let v = out.semantic();
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[10] - 1.0).abs() < 1e-12);
        for (i, x) in v.iter().enumerate() {
            if i != 0 && i != 10 {
                assert!(x.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn probability_is_product_of_projections() {
        let prep = NonlinearPrep::new(Scheme::Rk2).unwrap();
        let s = scaled(State3::new(0.1, -1.1, 10.1), Scheme::Rk2);
        let (mut full, _) = prep.load(&s);
        prep.circuit(&s.state, s.scale).unwrap().apply(&mut full).unwrap();
        let n = prep.register_qubits();
        let lcu: Vec<usize> = (3 * n..prep.num_qubits()).collect();
        let p1 = full.project(&lcu, 0).unwrap();
        let p2 = full.project(&(n..3 * n).collect::<Vec<_>>(), 0).unwrap();
        let (_, p) = prep.apply_full(&s).unwrap();
        assert!((p1 * p2 - p).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_and_padding() {
        let prep = NonlinearPrep::new(Scheme::Euler).unwrap();
        let bad = ScaledState::from_vector(&[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(prep.apply_collapsed(&bad), Err(Error::SupportViolation { slot: 3, .. })));
        assert!(ScaledState::from_vector(&[0.0; 8]).is_err());
        let wrong = scaled(State3::new(1.0, 2.0, 3.0), Scheme::Rk2);
        assert!(matches!(prep.apply_full(&wrong), Err(Error::WidthMismatch { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn full_matches_monomials(x in -20.0..20.0f64, y in -20.0..20.0f64, z in -5.0..45.0f64) {
            prop_assume!(x.abs() + y.abs() + z.abs() > 1e-3);
            for scheme in [Scheme::Euler, Scheme::Rk2] {
                let prep = NonlinearPrep::new(scheme).unwrap();
                let s = scaled(State3::new(x, y, z), scheme);
                let (full, pf) = prep.apply_full(&s).unwrap();
                let (coll, pc) = prep.apply_collapsed(&s).unwrap();
                let want = scheme.augmented_vector(State3::new(x, y, z));
                let norm = want.iter().map(|v| v * v).sum::<f64>().sqrt();
                for ((f, c), w) in full.semantic().iter().zip(coll.semantic()).zip(&want) {
                    prop_assert!((f - w).abs() <= 1e-10 * norm);
                    prop_assert!((c - w).abs() <= 1e-10 * norm);
                }
                prop_assert!((pf - pc).abs() <= 1e-12);
            }
        }

        #[test]
        fn degree_scale_law(x in -5.0..5.0f64, y in -5.0..5.0f64, z in 0.5..30.0f64, lambda in 0.2..3.0f64) {
            let prep = NonlinearPrep::new(Scheme::Rk2).unwrap();
            let base = prep.apply_collapsed(&scaled(State3::new(x, y, z), Scheme::Rk2)).unwrap().0.semantic();
            let scaled_out = prep
                .apply_collapsed(&scaled(State3::new(lambda * x, lambda * y, lambda * z), Scheme::Rk2))
                .unwrap()
                .0
                .semantic();
            let norm = base.iter().map(|v| v.abs()).fold(1.0, f64::max) * lambda.powi(3).max(1.0);
            for (slot, m) in Scheme::Rk2.monomials().iter().enumerate() {
                let want = base[slot] * lambda.powi(m.len() as i32);
                prop_assert!((scaled_out[slot] - want).abs() <= 1e-11 * norm);
            }
        }
    }
}
