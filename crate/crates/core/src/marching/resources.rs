//! Register layout and gate/query counts of the recursive multi-step scheme
//! Û_j = Û₁ · Û_{j−1}^{⊗3}.
//!
//! Counters come from running the recursion on a register pool: the target
//! τ plus 2Nt − 1 register sets, each holding two copies of ψ_n. Every Û₁
//! consumes one set; a fresh set is used when one is left, otherwise a
//! consumed one is refilled with a controlled U_ψ^{⊗2}. The clock counts the
//! Û₁ applications on τ and is reset at the end.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub nt: usize,
    /// Qubits per data register.
    pub data_qubits: usize,
    pub lcu_qubits: usize,
    pub ancilla_qubits: usize,
    pub copies_per_set: usize,
    pub sets: usize,
    pub clock_qubits: usize,
}

impl RegisterLayout {
    pub fn new(nt: usize, data_qubits: usize, lcu_qubits: usize, copies_per_set: usize) -> Result<Self> {
        if nt == 0 {
            return Err(Error::InvalidParameter("Nt must be at least 1".into()));
        }
        Ok(Self { nt, data_qubits, lcu_qubits, ancilla_qubits: 1, copies_per_set, sets: 2 * nt - 1, clock_qubits: clock_width(nt) })
    }

    pub fn set_qubits(&self) -> usize {
        self.copies_per_set * self.data_qubits + self.ancilla_qubits + self.lcu_qubits
    }

    pub fn total_qubits(&self) -> usize {
        self.sets * self.set_qubits() + self.clock_qubits + self.data_qubits
    }

    pub fn copies(&self) -> usize {
        self.sets * self.copies_per_set + 1
    }
}

/// ⌈log₂ Nt⌉ + 1.
pub fn clock_width(nt: usize) -> usize {
    nt.next_power_of_two().trailing_zeros() as usize + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScheduleCounts {
    pub n_u1: u64,
    pub n_s: u64,
    /// Controlled U_ψ^{⊗2} refills.
    pub n_upsi: u64,
    /// Distinct data registers touched, τ included.
    pub n_copies: u64,
    /// Most sets held at once by unfinished Û₁ applications.
    pub peak_pinned_sets: u64,
}

impl ScheduleCounts {
    pub fn queries(&self) -> u64 {
        self.n_u1 + self.n_s + self.n_upsi
    }
}

struct Pool {
    fresh: usize,
    touched_sets: u64,
    pinned: u64,
    counts: ScheduleCounts,
}

impl Pool {
    /// Brings a register holding ψ_n forward by j steps.
    fn evolve(&mut self, j: usize, on_target: bool) {
        if j == 0 {
            return;
        }
        self.evolve(j - 1, on_target);
        if self.fresh > 0 {
            self.fresh -= 1;
            self.touched_sets += 1;
        } else {
            self.counts.n_upsi += 1;
        }
        self.pinned += 1;
        self.counts.peak_pinned_sets = self.counts.peak_pinned_sets.max(self.pinned);
        self.evolve(j - 1, false);
        self.evolve(j - 1, false);
        self.counts.n_u1 += 1;
        self.pinned -= 1;
        if on_target {
            self.counts.n_s += 1;
        }
    }
}

/// Largest Nt whose counts fit in `u64`.
pub const MAX_COUNTED_NT: usize = 40;

fn check_pool(nt: usize, sets: usize) -> Result<()> {
    if nt > 0 && sets < nt {
        return Err(Error::InvalidParameter(format!("{sets} register sets cannot hold {nt} pinned sets")));
    }
    Ok(())
}

/// Plays the recursion for Nt steps on a pool of `sets` register sets, one
/// Û₁ at a time.
pub fn expand_schedule(nt: usize, sets: usize) -> Result<ScheduleCounts> {
    if nt > 20 {
        return Err(Error::InvalidParameter(format!("Nt = {nt} too large to expand")));
    }
    check_pool(nt, sets)?;
    let mut pool = Pool { fresh: sets, touched_sets: 0, pinned: 0, counts: ScheduleCounts::default() };
    pool.evolve(nt, true);
    let mut c = pool.counts;
    c.n_s *= 2; // one reset per increment
    c.n_copies = 1 + 2 * pool.touched_sets;
    Ok(c)
}

/// Counts of [`expand_schedule`] from n_U1(j) = 3·n_U1(j−1) + 1: every Û₁
/// takes one set, fresh sets first, and the recursion depth pins Nt sets.
pub fn schedule(nt: usize, sets: usize) -> Result<ScheduleCounts> {
    if nt > MAX_COUNTED_NT {
        return Err(Error::InvalidParameter(format!("Nt = {nt} exceeds {MAX_COUNTED_NT}; counts overflow")));
    }
    check_pool(nt, sets)?;
    let n_u1 = (0..nt).fold(0u64, |n, _| 3 * n + 1);
    let touched = n_u1.min(sets as u64);
    Ok(ScheduleCounts {
        n_u1,
        n_s: 2 * nt as u64,
        n_upsi: n_u1 - touched,
        n_copies: 1 + 2 * touched,
        peak_pinned_sets: nt as u64,
    })
}

/// Refills `nt` steps need: ⌈(3^Nt − (4Nt − 1)) / 2⌉, since each Û₁ consumes
/// three ψ_n, the layout starts with 4Nt − 1 and a refill makes two.
pub fn min_refills(nt: usize) -> u64 {
    let need = 3u64.pow(nt as u32);
    let have = 4 * nt as u64 - 1;
    need.saturating_sub(have).div_ceil(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub n_copies: f64,
    pub n_qubits: f64,
    pub n_u1: f64,
    pub n_s: f64,
    pub n_upsi: f64,
    pub n_queries: f64,
}

impl ClosedForms {
    pub fn new(nt: usize) -> Self {
        let n = nt as f64;
        let p3 = 3f64.powi(nt as i32);
        Self {
            n_copies: 4.0 * n - 1.0,
            n_qubits: 22.0 * n + n.log2() - 6.0,
            n_u1: p3 / 2.0,
            n_s: 2.0 * n,
            n_upsi: p3 / 3.0 - n,
            n_queries: 5.0 / 6.0 * p3 + n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub nt: usize,
    pub scheme: String,
    pub n_copies: u64,
    /// Layout qubits for the scheme in use.
    pub n_qubits: usize,
    pub n_u1: u64,
    pub n_s: u64,
    pub n_upsi: u64,
    pub n_queries: u64,
    pub peak_pinned_sets: u64,
    pub layout: RegisterLayout,
    pub formula: ClosedForms,
    /// exact − formula for n_U1 and n_queries.
    pub n_u1_discrepancy: f64,
    pub n_queries_discrepancy: f64,
    /// Exact n_U1 + n_S with the formula refill count; differs from the
    /// formula total by the n_U1 rounding only.
    pub n_queries_with_formula_refills: f64,
    /// 60·d²·p^Nt with d = 16, p = 3.
    pub complexity_estimate: f64,
    /// 4ⁿ n² p^Nt for the scheme's register width and degree.
    pub general_estimate: f64,
}

/// Counts for Nt steps with `lcu_qubits` index qubits and `data_qubits`
/// qubits per register; the closed forms use d = 16, p = 3.
pub fn resource_report_for(nt: usize, scheme: &str, data_qubits: usize, lcu_qubits: usize, degree: usize) -> Result<ResourceReport> {
    let layout = RegisterLayout::new(nt, data_qubits, lcu_qubits, degree - 1)?;
    let counts = schedule(nt, layout.sets)?;
    let formula = ClosedForms::new(nt);
    let p3 = 3f64.powi(nt as i32);
    let n = data_qubits as f64;
    Ok(ResourceReport {
        nt,
        scheme: scheme.to_string(),
        n_copies: counts.n_copies,
        n_qubits: layout.total_qubits(),
        n_u1: counts.n_u1,
        n_s: counts.n_s,
        n_upsi: counts.n_upsi,
        n_queries: counts.queries(),
        peak_pinned_sets: counts.peak_pinned_sets,
        layout,
        formula,
        n_u1_discrepancy: counts.n_u1 as f64 - formula.n_u1,
        n_queries_discrepancy: counts.queries() as f64 - formula.n_queries,
        n_queries_with_formula_refills: (counts.n_u1 + counts.n_s) as f64 + formula.n_upsi,
        complexity_estimate: 60.0 * 256.0 * p3,
        general_estimate: 4f64.powf(n) * n * n * (degree as f64).powi(nt as i32),
    })
}

/// Report for the exact second-order scheme (5 LCU terms, 3 index qubits).
pub fn resource_report(nt: usize) -> Result<ResourceReport> {
    resource_report_for(nt, "rk2", 4, 3, 3)
}

/// 3^Nt · 2 ln(1/σ_max): log of the block-encoding success bound.
pub fn success_probability_estimate(nt: usize, sigma_max: f64) -> f64 {
    3f64.powi(nt as i32) * 2.0 * (1.0 / sigma_max).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// n_U1(j) = 3 n_U1(j−1) + 1 expanded directly.
    fn u1_recursion(j: usize) -> u64 {
        if j == 0 {
            0
        } else {
            3 * u1_recursion(j - 1) + 1
        }
    }

    #[test]
    fn counts_follow_recursion() {
        for nt in 1..=8 {
            let c = expand_schedule(nt, 2 * nt - 1).unwrap();
            assert_eq!(c, schedule(nt, 2 * nt - 1).unwrap());
            assert_eq!(c.n_u1, u1_recursion(nt));
            assert_eq!(c.n_u1, (3u64.pow(nt as u32) - 1) / 2);
            assert_eq!(c.n_s, 2 * nt as u64);
            assert_eq!(c.n_copies, 4 * nt as u64 - 1);
            assert_eq!(c.peak_pinned_sets, nt as u64);
            assert_eq!(c.n_upsi, min_refills(nt));
            assert_eq!(c.queries(), 3u64.pow(nt as u32));
        }
    }

    #[test]
    fn refill_examples() {
        assert_eq!(schedule(1, 1).unwrap().n_upsi, 0);
        assert_eq!(schedule(2, 3).unwrap().n_upsi, 1);
        // formula 3^(Nt−1) − Nt gives 6 here, below the 8 that 27 consumed
        // copies from 11 registers require
        assert_eq!(ClosedForms::new(3).n_upsi, 6.0);
        assert_eq!(schedule(3, 5).unwrap().n_upsi, 8);
        assert_eq!(min_refills(3), 8);
    }

    #[test]
    fn zero_steps_and_small_pools() {
        assert_eq!(schedule(0, 0).unwrap().n_u1, 0);
        assert!(schedule(3, 2).is_err());
        assert!(expand_schedule(3, 2).is_err());
        assert!(schedule(41, 81).is_err());
        assert_eq!(schedule(40, 79).unwrap().queries(), 3u64.pow(40));
        assert!(resource_report(0).is_err());
    }

    #[test]
    fn report_examples() {
        let r = resource_report(1).unwrap();
        assert_eq!(r.n_copies, 3);
        assert_eq!(r.formula.n_qubits, 16.0);
        assert_eq!(r.n_queries, r.n_u1 + 2 + 0);
        assert_eq!(r.n_u1, 1);
        let r = resource_report(2).unwrap();
        assert_eq!((r.n_copies, r.n_s), (7, 4));
        let r = resource_report(4).unwrap();
        assert_eq!(r.n_u1, 40);
        assert_eq!(r.formula.n_u1, 40.5);
        assert_eq!(r.n_u1_discrepancy, -0.5);
        assert!((r.n_queries_with_formula_refills - r.formula.n_queries + 0.5).abs() < 1e-9);
    }

    #[test]
    fn layout_matches_formula_with_two_lcu_qubits() {
        for nt in [1usize, 2, 4, 8] {
            let l = RegisterLayout::new(nt, 4, 2, 2).unwrap();
            assert_eq!(l.total_qubits() as f64, ClosedForms::new(nt).n_qubits);
        }
        let l = RegisterLayout::new(1, 4, 3, 2).unwrap();
        assert_eq!(l.total_qubits(), 17);
    }

    #[test]
    fn success_exponent() {
        assert_eq!(success_probability_estimate(3, 1.0), 0.0);
        assert!((success_probability_estimate(2, 1.01) + 9.0 * 2.0 * 1.01f64.ln()).abs() < 1e-15);
    }
}
