//! Linear combination of unitaries: prepare, select, and their sandwich.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate};

/// Qubits needed to index `k` terms.
pub fn lcu_width(k: usize) -> usize {
    k.next_power_of_two().trailing_zeros() as usize
}

/// Real Householder reflection exchanging |0⟩ and the unit vector along `v`.
pub fn reflector(v: &[f64]) -> Result<DMatrix<Complex64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroState);
    }
    let d = v.len();
    let mut u: Vec<f64> = v.iter().map(|x| -x / norm).collect();
    u[0] += 1.0;
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let mut m = DMatrix::identity(d, d);
    if uu > 1e-30 {
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] -= Complex64::new(2.0 * u[i] * u[j] / uu, 0.0);
            }
        }
    }
    Ok(m)
}

/// Unitary on ⌈log₂K⌉ qubits whose first column is √(aⱼ/a).
pub fn lcu_prep(coeffs: &[f64]) -> Result<Circuit> {
    if coeffs.is_empty() {
        return Err(Error::InvalidParameter("no LCU coefficients".into()));
    }
    if let Some(c) = coeffs.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
        return Err(Error::InvalidParameter(format!("LCU coefficient must be positive, got {c}")));
    }
    let m = lcu_width(coeffs.len());
    let mut c = Circuit::new(m);
    if m == 0 {
        return Ok(c);
    }
    let mut col = vec![0.0; 1 << m];
    for (x, a) in col.iter_mut().zip(coeffs) {
        *x = a.sqrt();
    }
    c.push(Gate::unitary((0..m).collect(), reflector(&col)?)?)?;
    Ok(c)
}

/// Σⱼ |j⟩⟨j| ⊗ Uⱼ with the index register above the term register.
pub fn lcu_select(terms: &[Circuit]) -> Result<Circuit> {
    let first = terms.first().ok_or(Error::InvalidParameter("no LCU terms".into()))?;
    let w = first.num_qubits();
    if let Some(t) = terms.iter().find(|t| t.num_qubits() != w) {
        return Err(Error::WidthMismatch { expected: w, found: t.num_qubits() });
    }
    if terms.len() == 1 {
        return Ok(first.clone());
    }
    let m = lcu_width(terms.len());
    let mut c = Circuit::new(w + m);
    let branches = terms.iter().map(|t| t.gates().to_vec()).collect();
    c.push(Gate::multiplexer((w..w + m).collect(), branches)?)?;
    Ok(c)
}

/// prep† · select · prep with the index register on the top qubits.
pub fn lcu_circuit(coeffs: &[f64], terms: &[Circuit]) -> Result<Circuit> {
    if coeffs.len() != terms.len() {
        return Err(Error::WidthMismatch { expected: terms.len(), found: coeffs.len() });
    }
    let select = lcu_select(terms)?;
    let prep = lcu_prep(coeffs)?;
    let w = select.num_qubits() - prep.num_qubits();
    let map: Vec<usize> = (w..select.num_qubits()).collect();
    let mut c = prep.embed(&map, select.num_qubits())?;
    c.append(&select)?;
    c.append(&prep.inverse().embed(&map, select.num_qubits())?)?;
    Ok(c)
}
