//! Elementary-gate counts under fixed lowering rules.
//!
//! * C⁰X is one single-qubit gate, C¹X one CNOT.
//! * C²X is a Toffoli: 6 CNOT + 9 single-qubit gates.
//! * CᶜX for c ≥ 3 uses 4(c − 2) Toffolis with one borrowed qubit.
//! * An open control adds two X gates.
//! * Cᶜ(U) for a one-qubit U is two CᶜX plus four single-qubit gates.
//! * A dense k-qubit unitary is lowered by quantum Shannon decomposition:
//!   ⌈(23/48)4ᵏ − (3/2)2ᵏ + 4/3⌉ CNOTs and at most 4ᵏ single-qubit gates.
//! * A permutation that is a cyclic shift Ŝ₋ˢ uses one decrement cascade per
//!   set bit of s; any other permutation is split into basis transpositions,
//!   each a Gray-code chain of 2d − 1 fully controlled X gates.
//! * A multiplexer whose branch k shifts its registers by k lowers to one
//!   singly controlled decrement per selector bit and register; any other
//!   multiplexer runs every branch under all selector controls.

use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use super::library::shift_table;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCost {
    pub single_qubit: u64,
    pub cnot: u64,
    /// X gates with two or more controls met during lowering.
    pub mcx: u64,
}

impl GateCost {
    pub fn elementary(&self) -> u64 {
        self.single_qubit + self.cnot
    }
}

impl std::ops::AddAssign for GateCost {
    fn add_assign(&mut self, o: Self) {
        self.single_qubit += o.single_qubit;
        self.cnot += o.cnot;
        self.mcx += o.mcx;
    }
}

pub fn gate_cost(c: &Circuit) -> GateCost {
    let mut acc = GateCost::default();
    for g in c.gates() {
        lower(g, 0, &mut acc);
    }
    acc
}

fn x_cost(c: usize, acc: &mut GateCost) {
    match c {
        0 => acc.single_qubit += 1,
        1 => acc.cnot += 1,
        2 => {
            acc.mcx += 1;
            acc.cnot += 6;
            acc.single_qubit += 9;
        }
        _ => {
            let t = 4 * (c as u64 - 2);
            acc.mcx += 1;
            acc.cnot += 6 * t;
            acc.single_qubit += 9 * t;
        }
    }
}

fn u1_cost(c: usize, acc: &mut GateCost) {
    if c == 0 {
        acc.single_qubit += 1;
    } else {
        x_cost(c, acc);
        x_cost(c, acc);
        acc.single_qubit += 4;
    }
}

/// Cascade decrementing a `w`-qubit register under `c` extra controls.
fn decrement_cost(w: usize, c: usize, acc: &mut GateCost) {
    for i in 0..w {
        x_cost(c + i, acc);
        acc.single_qubit += 2 * i as u64;
    }
}

pub fn qsd_cnots(k: usize) -> u64 {
    if k < 2 {
        return 0;
    }
    let f = 4f64.powi(k as i32);
    let t = 2f64.powi(k as i32);
    (23.0 / 48.0 * f - 1.5 * t + 4.0 / 3.0).ceil() as u64
}

fn shift_amount(t: &[usize]) -> Option<usize> {
    let n = t.len().trailing_zeros() as usize;
    let s = (t.len() - t[0]) % t.len();
    (shift_table(n, s) == t).then_some(s)
}

fn lower(g: &Gate, extra: usize, acc: &mut GateCost) {
    let c = g.controls.len() + extra;
    acc.single_qubit += 2 * g.controls.iter().filter(|c| !c.value).count() as u64;
    match &g.kind {
        GateKind::X => x_cost(c, acc),
        GateKind::H => u1_cost(c, acc),
        GateKind::Unitary(_) if g.targets.len() == 1 => u1_cost(c, acc),
        GateKind::Unitary(_) => {
            let k = g.targets.len();
            for _ in 0..qsd_cnots(k) {
                x_cost(c + 1, acc);
            }
            for _ in 0..1u64 << (2 * k) {
                u1_cost(c, acc);
            }
        }
        GateKind::Permutation(t) => {
            let k = g.targets.len();
            if let Some(s) = shift_amount(t) {
                for b in (0..k).filter(|b| s >> b & 1 == 1) {
                    decrement_cost(k - b, c, acc);
                }
            } else {
                for (a, b) in transpositions(t) {
                    let d = (a ^ b).count_ones() as u64;
                    for _ in 0..2 * d - 1 {
                        x_cost(c + k - 1, acc);
                        acc.single_qubit += 2 * (k as u64 - 1);
                    }
                }
            }
        }
        GateKind::Multiplexer(branches) => {
            let m = g.targets.len();
            if let Some(widths) = shift_multiplexer_registers(branches) {
                for w in widths {
                    for b in 0..m.min(w) {
                        decrement_cost(w - b, c + 1, acc);
                    }
                }
            } else {
                for (k, branch) in branches.iter().enumerate() {
                    if branch.is_empty() {
                        continue;
                    }
                    acc.single_qubit += 2 * (m as u64 - (k as u64).count_ones() as u64);
                    for inner in branch {
                        lower(inner, c + m, acc);
                    }
                }
            }
        }
    }
}

/// Register widths when branch k applies exactly Ŝ₋ᵏ to a fixed set of
/// registers.
fn shift_multiplexer_registers(branches: &[Vec<Gate>]) -> Option<Vec<usize>> {
    let first = branches.iter().find(|b| !b.is_empty())?;
    let regs: Vec<&Vec<usize>> = first.iter().map(|g| &g.targets).collect();
    for (k, branch) in branches.iter().enumerate() {
        if k == 0 && branch.is_empty() {
            continue;
        }
        if branch.len() != regs.len() {
            return None;
        }
        for (g, r) in branch.iter().zip(&regs) {
            if !g.controls.is_empty() || &g.targets != *r {
                return None;
            }
            match &g.kind {
                GateKind::Permutation(t) if *t == shift_table(r.len(), k) => {}
                _ => return None,
            }
        }
    }
    Some(regs.iter().map(|r| r.len()).collect())
}

/// Cycle decomposition of a permutation table into transpositions.
fn transpositions(t: &[usize]) -> Vec<(usize, usize)> {
    let mut seen = vec![false; t.len()];
    let mut out = Vec::new();
    for start in 0..t.len() {
        if seen[start] {
            continue;
        }
        let mut i = start;
        seen[i] = true;
        while t[i] != start {
            out.push((start, t[i]));
            i = t[i];
            seen[i] = true;
        }
    }
    out
}
