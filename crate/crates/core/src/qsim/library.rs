//! Shift operator, its multi-controlled-X form, and the Hadamard-product
//! multiplexers.

use super::circuit::Circuit;
use super::gate::{Control, Gate};
use crate::error::{Error, Result};

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > 20 {
        return Err(Error::InvalidParameter(format!("register width must be in 1..=20, got {n}")));
    }
    Ok(())
}

/// Table of Ŝ₋ᵏ: |i⟩ → |i − k mod 2ⁿ⟩.
pub fn shift_table(n: usize, k: usize) -> Vec<usize> {
    let d = 1usize << n;
    (0..d).map(|i| (i + d - k % d) % d).collect()
}

/// Ŝ₋ on qubits 0..n.
pub fn shift_minus(n: usize) -> Result<Gate> {
    check_n(n)?;
    Gate::permutation((0..n).collect(), shift_table(n, 1))
}

/// Ŝ₋ as a cascade of X gates with open controls: bit b flips when all lower
/// bits are zero, highest bit first.
pub fn decompose_shift_to_mcx(n: usize) -> Result<Circuit> {
    check_n(n)?;
    Circuit::from_gates(n, decrement_gates(&(0..n).collect::<Vec<_>>()))
}

/// MCX cascade decrementing the register `qubits` (least significant first).
pub fn decrement_gates(qubits: &[usize]) -> Vec<Gate> {
    (0..qubits.len())
        .rev()
        .map(|b| Gate::mcx(qubits[b], qubits[..b].iter().map(|&q| Control::off(q)).collect()))
        .collect()
}

/// Σₖ Ŝ₋ᵏ ⊗ |k⟩⟨k| on 2n qubits: the shifted register is qubits n..2n, the
/// control register qubits 0..n.
pub fn u_select_h(n: usize) -> Result<Circuit> {
    u_h_n(n, 2)
}

/// Applies Ŝ₋ᵏ to registers 1..N (qubits r·n..(r+1)·n) when register 0
/// reads k. N = 1 is the identity.
pub fn u_h_n(n: usize, copies: usize) -> Result<Circuit> {
    check_n(n)?;
    if copies == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let mut c = Circuit::new(n * copies);
    if copies == 1 {
        return Ok(c);
    }
    let branches = (0..1usize << n)
        .map(|k| {
            if k == 0 {
                return Ok(vec![]);
            }
            (1..copies)
                .map(|r| Gate::permutation((r * n..(r + 1) * n).collect(), shift_table(n, k)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    c.push(Gate::multiplexer((0..n).collect(), branches)?)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::gate::apply_gate;
    use crate::qsim::state::{project_measure, QuantumState};
    use num_complex::Complex64;

    #[test]
    fn shift_one_qubit_is_x() {
        for k in 0..2 {
            let mut s = QuantumState::basis(1, k);
            apply_gate(&mut s, &shift_minus(1).unwrap()).unwrap();
            assert_eq!(s, QuantumState::basis(1, 1 - k));
        }
    }

    #[test]
    fn shift_wraps_and_has_order_two_to_the_n() {
        let g = shift_minus(3).unwrap();
        let mut s = QuantumState::basis(3, 0);
        apply_gate(&mut s, &g).unwrap();
        assert_eq!(s, QuantumState::basis(3, 7));
        for _ in 0..7 {
            apply_gate(&mut s, &g).unwrap();
        }
        assert_eq!(s, QuantumState::basis(3, 0));
        assert!(shift_minus(0).is_err());
    }

    #[test]
    fn mcx_cascade_matches_permutation() {
        for n in 1..=6 {
            let c = decompose_shift_to_mcx(n).unwrap();
            for k in 0..1usize << n {
                let mut s = QuantumState::basis(n, k);
                c.apply(&mut s).unwrap();
                assert_eq!(s, QuantumState::basis(n, (k + (1 << n) - 1) % (1 << n)));
            }
        }
        let one = decompose_shift_to_mcx(1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one.gates()[0].controls.is_empty());
    }

    #[test]
    fn u_select_one_qubit_is_cnot() {
        let m = u_select_h(1).unwrap().to_matrix();
        let cnot = crate::qsim::Circuit::from_gates(2, vec![Gate::cnot(0, 1)]).unwrap().to_matrix();
        assert_eq!(m, cnot);
    }

    #[test]
    fn u_select_exhaustive_n2() {
        let c = u_select_h(2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = QuantumState::basis(4, i << 2 | j);
                c.apply(&mut s).unwrap();
                assert_eq!(s, QuantumState::basis(4, ((i + 4 - j) % 4) << 2 | j));
            }
        }
    }

    #[test]
    fn hadamard_product_of_uniform_qubits() {
        let plus = QuantumState::from_real(&[1.0, 1.0]).unwrap();
        let mut s = plus.tensor(&plus);
        u_select_h(1).unwrap().apply(&mut s).unwrap();
        let (post, p) = project_measure(&s, &[1], 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let out = post.reduced(&[1], 0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for a in out.amplitudes() {
            assert!((a - Complex64::new(r, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn u_h_identity_and_reduction() {
        assert!(u_h_n(2, 1).unwrap().is_empty());
        assert_eq!(u_h_n(2, 2).unwrap(), u_select_h(2).unwrap());
        assert!(u_h_n(2, 0).is_err());
    }

    #[test]
    fn u_h_three_copies_cubes() {
        let psi = [0.3, -0.5, 0.7, 0.2];
        let st = QuantumState::from_real(&psi).unwrap();
        let mut s = st.tensor(&st).tensor(&st);
        u_h_n(2, 3).unwrap().apply(&mut s).unwrap();
        let out = s.reduced(&[2, 3, 4, 5], 0).unwrap();
        let cube = QuantumState::from_real(&psi.map(|x: f64| x.powi(3))).unwrap();
        for (a, b) in out.amplitudes().iter().zip(cube.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
