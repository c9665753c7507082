use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::QuantumState;
use crate::error::{Error, Result};

pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    /// Required value; `false` is an open (negated) control.
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Self { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Self { qubit, value: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    X,
    H,
    /// Dense unitary; local basis bit b is `targets[b]`.
    Unitary(DMatrix<Complex64>),
    /// Local basis |i⟩ → |table[i]⟩.
    Permutation(Vec<usize>),
    /// Uniformly controlled block: branch k runs when the targets read k.
    Multiplexer(Vec<Vec<Gate>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn x(target: usize) -> Self {
        Self { kind: GateKind::X, targets: vec![target], controls: vec![] }
    }

    pub fn h(target: usize) -> Self {
        Self { kind: GateKind::H, targets: vec![target], controls: vec![] }
    }

    pub fn mcx(target: usize, controls: Vec<Control>) -> Self {
        Self { kind: GateKind::X, targets: vec![target], controls }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::mcx(target, vec![Control::on(control)])
    }

    pub fn unitary(targets: Vec<usize>, m: DMatrix<Complex64>) -> Result<Self> {
        let d = 1usize << targets.len();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::WidthMismatch { expected: d, found: m.nrows() });
        }
        let dev = unitarity_deviation(&m);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Self { kind: GateKind::Unitary(m), targets, controls: vec![] })
    }

    pub fn permutation(targets: Vec<usize>, table: Vec<usize>) -> Result<Self> {
        let d = 1usize << targets.len();
        if table.len() != d {
            return Err(Error::WidthMismatch { expected: d, found: table.len() });
        }
        if !is_bijection(&table) {
            return Err(Error::InvalidParameter("permutation table is not a bijection".into()));
        }
        Ok(Self { kind: GateKind::Permutation(table), targets, controls: vec![] })
    }

    /// `selector` qubits choose the branch. Missing trailing branches act as identity.
    pub fn multiplexer(selector: Vec<usize>, branches: Vec<Vec<Gate>>) -> Result<Self> {
        if branches.len() > 1usize << selector.len() {
            return Err(Error::WidthMismatch { expected: 1 << selector.len(), found: branches.len() });
        }
        Ok(Self { kind: GateKind::Multiplexer(branches), targets: selector, controls: vec![] })
    }

    pub fn with_controls(mut self, controls: Vec<Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Unitary(_) => "U",
            GateKind::Permutation(_) => "PERM",
            GateKind::Multiplexer(_) => "MUX",
        }
    }

    /// Every qubit the gate touches, including nested branches.
    pub fn qubits(&self) -> Vec<usize> {
        let mut q: Vec<usize> = self.targets.clone();
        q.extend(self.controls.iter().map(|c| c.qubit));
        if let GateKind::Multiplexer(branches) = &self.kind {
            for g in branches.iter().flatten() {
                q.extend(g.qubits());
            }
        }
        q.sort_unstable();
        q.dedup();
        q
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let mut seen = 0u128;
        for &q in self.targets.iter().chain(self.controls.iter().map(|c| &c.qubit)) {
            if q >= num_qubits || q >= 128 {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
            }
            if seen >> q & 1 == 1 {
                return Err(Error::OverlappingQubits);
            }
            seen |= 1 << q;
        }
        match &self.kind {
            GateKind::X | GateKind::H => {
                if self.targets.len() != 1 {
                    return Err(Error::WidthMismatch { expected: 1, found: self.targets.len() });
                }
            }
            GateKind::Unitary(m) => {
                if m.nrows() != 1 << self.targets.len() {
                    return Err(Error::WidthMismatch { expected: 1 << self.targets.len(), found: m.nrows() });
                }
            }
            GateKind::Permutation(t) => {
                if t.len() != 1 << self.targets.len() {
                    return Err(Error::WidthMismatch { expected: 1 << self.targets.len(), found: t.len() });
                }
            }
            GateKind::Multiplexer(branches) => {
                for g in branches.iter().flatten() {
                    g.validate(num_qubits)?;
                    if g.qubits().iter().any(|&q| seen >> q & 1 == 1) {
                        return Err(Error::OverlappingQubits);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        let kind = match &self.kind {
            GateKind::X => GateKind::X,
            GateKind::H => GateKind::H,
            GateKind::Unitary(m) => GateKind::Unitary(m.adjoint()),
            GateKind::Permutation(t) => {
                let mut inv = vec![0; t.len()];
                for (i, &j) in t.iter().enumerate() {
                    inv[j] = i;
                }
                GateKind::Permutation(inv)
            }
            GateKind::Multiplexer(branches) => GateKind::Multiplexer(
                branches.iter().map(|b| b.iter().rev().map(Gate::inverse).collect()).collect(),
            ),
        };
        Gate { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    /// Relabels every qubit through `map`.
    pub fn remap(&self, map: &impl Fn(usize) -> usize) -> Gate {
        let kind = match &self.kind {
            GateKind::Multiplexer(branches) => GateKind::Multiplexer(
                branches.iter().map(|b| b.iter().map(|g| g.remap(map)).collect()).collect(),
            ),
            k => k.clone(),
        };
        Gate {
            kind,
            targets: self.targets.iter().map(|&q| map(q)).collect(),
            controls: self.controls.iter().map(|c| Control { qubit: map(c.qubit), value: c.value }).collect(),
        }
    }
}

pub fn is_bijection(table: &[usize]) -> bool {
    let mut hit = vec![false; table.len()];
    for &j in table {
        if j >= table.len() || hit[j] {
            return false;
        }
        hit[j] = true;
    }
    true
}

pub fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let p = m.adjoint() * m;
    let mut dev: f64 = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let e = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((p[(i, j)] - Complex64::new(e, 0.0)).norm());
        }
    }
    dev
}

pub fn apply_gate(state: &mut QuantumState, g: &Gate) -> Result<()> {
    g.validate(state.num_qubits())?;
    apply_conditioned(state.amplitudes_mut(), g, 0, 0);
    Ok(())
}

/// Applies `g` on the subspace where `index & mask == value`.
pub(crate) fn apply_conditioned(amps: &mut [Complex64], g: &Gate, mut mask: usize, mut value: usize) {
    for c in &g.controls {
        mask |= 1 << c.qubit;
        value |= (c.value as usize) << c.qubit;
    }
    match &g.kind {
        GateKind::X => {
            let bit = 1 << g.targets[0];
            for i in 0..amps.len() {
                if i & bit == 0 && i & mask == value {
                    amps.swap(i, i | bit);
                }
            }
        }
        GateKind::H => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            for_each_block(amps, &g.targets, mask, value, |v| {
                let (a, b) = (v[0], v[1]);
                v[0] = (a + b) * r;
                v[1] = (a - b) * r;
            });
        }
        GateKind::Unitary(m) => {
            let mut out = vec![Complex64::new(0.0, 0.0); m.nrows()];
            for_each_block(amps, &g.targets, mask, value, |v| {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..v.len()).map(|j| m[(i, j)] * v[j]).sum();
                }
                v.copy_from_slice(&out);
            });
        }
        GateKind::Permutation(t) => {
            let mut out = vec![Complex64::new(0.0, 0.0); t.len()];
            for_each_block(amps, &g.targets, mask, value, |v| {
                for (i, &j) in t.iter().enumerate() {
                    out[j] = v[i];
                }
                v.copy_from_slice(&out);
            });
        }
        GateKind::Multiplexer(branches) => {
            let sel_mask: usize = g.targets.iter().map(|&q| 1 << q).sum();
            for (k, branch) in branches.iter().enumerate() {
                let sel: usize = g.targets.iter().enumerate().map(|(b, &q)| (k >> b & 1) << q).sum();
                for inner in branch {
                    apply_conditioned(amps, inner, mask | sel_mask, value | sel);
                }
            }
        }
    }
}

/// Gathers the 2^k amplitudes of each local block over `targets`, lets `f`
/// transform them, and scatters them back.
fn for_each_block(
    amps: &mut [Complex64],
    targets: &[usize],
    mask: usize,
    value: usize,
    mut f: impl FnMut(&mut [Complex64]),
) {
    let k = targets.len();
    let tmask: usize = targets.iter().map(|&q| 1 << q).sum();
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|i| targets.iter().enumerate().map(|(b, &q)| (i >> b & 1) << q).sum())
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); 1 << k];
    for base in 0..amps.len() {
        if base & tmask != 0 || base & mask != value {
            continue;
        }
        for (b, &o) in buf.iter_mut().zip(&offsets) {
            *b = amps[base | o];
        }
        f(&mut buf);
        for (b, &o) in buf.iter().zip(&offsets) {
            amps[base | o] = *b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x_flips_zero() {
        let mut s = QuantumState::zero(1);
        apply_gate(&mut s, &Gate::x(0)).unwrap();
        assert_eq!(s, QuantumState::basis(1, 1));
    }

    #[test]
    fn identity_leaves_state() {
        let mut s = QuantumState::from_real(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let before = s.clone();
        let id = Gate::unitary(vec![0, 1], DMatrix::identity(4, 4)).unwrap();
        apply_gate(&mut s, &id).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn rejects_invalid_gates() {
        let mut s = QuantumState::zero(2);
        assert!(matches!(apply_gate(&mut s, &Gate::x(2)), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(apply_gate(&mut s, &Gate::cnot(1, 1)), Err(Error::OverlappingQubits)));
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(Gate::unitary(vec![0], m), Err(Error::NotUnitary { .. })));
        assert!(Gate::permutation(vec![0], vec![0, 0]).is_err());
    }

    #[test]
    fn negated_control() {
        let g = Gate::mcx(1, vec![Control::off(0)]);
        let mut s = QuantumState::basis(2, 0);
        apply_gate(&mut s, &g).unwrap();
        assert_eq!(s, QuantumState::basis(2, 0b10));
        let mut s = QuantumState::basis(2, 1);
        apply_gate(&mut s, &g).unwrap();
        assert_eq!(s, QuantumState::basis(2, 1));
    }

    #[test]
    fn inverse_undoes() {
        let g = Gate::permutation(vec![0, 2], vec![2, 0, 3, 1]).unwrap().with_controls(vec![Control::on(1)]);
        let mut s = QuantumState::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        let before = s.clone();
        apply_gate(&mut s, &g).unwrap();
        assert_ne!(s, before);
        apply_gate(&mut s, &g.inverse()).unwrap();
        assert_eq!(s, before);
    }
}
