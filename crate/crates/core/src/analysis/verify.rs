use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::volume::log_volume_rate;
use crate::block_encoding::BlockEncoding;
use crate::dynamics::{divergence, rk2_step, LorenzParams, State3};
use crate::error::Result;
use crate::marching::{schedule, QuantumStepper};
use crate::qsim::{decompose_shift_to_mcx, shift_minus, Circuit};
use crate::scheme::Scheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name: name.to_string(), passed, detail }
}

fn rel(a: State3, b: State3) -> f64 {
    let d = State3::new(a.x - b.x, a.y - b.y, a.z - b.z).norm();
    d / b.norm().max(1.0)
}

fn sample_states() -> Vec<State3> {
    let mut v = Vec::new();
    for &x in &[-12.0, -0.7, 0.1, 3.3, 15.0] {
        for &y in &[-20.0, -1.1, 0.4, 9.0] {
            for &z in &[0.5, 10.1, 27.0, 41.0] {
                v.push(State3::new(x, y, z));
            }
        }
    }
    v
}

fn augmented_vs_rk2() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for (i, s) in sample_states().into_iter().enumerate() {
        let dt = [1e-4, 1e-3, 1e-2][i % 3];
        let p = LorenzParams::new(10.0, 28.0, 0.5 + 0.01 * (i % 9) as f64)?;
        let a = Scheme::Rk2.classical_augmented_step(s, &p, dt)?;
        worst = worst.max(rel(a, rk2_step(s, &p, dt)?));
    }
    Ok(check("augmented step = rk2", worst <= 1e-12, format!("max relative error {worst:.3e}")))
}

fn quantum_single_step() -> Result<Vec<CheckResult>> {
    let p = LorenzParams::new(10.0, 28.0, 0.58)?;
    let dt = 2.5e-4;
    let st = QuantumStepper::new(Scheme::Rk2, p, dt)?;
    let (mut err_full, mut err_modes, mut err_prob): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in sample_states().into_iter().step_by(16) {
        let enc = st.encode(s)?;
        let full = st.single_step_full(&enc, 0.0)?;
        let col = st.single_step_collapsed(&enc, 0.0)?;
        err_full = err_full.max(rel(full.next.state3(), rk2_step(s, &p, dt)?));
        err_modes = err_modes.max(rel(col.next.state3(), full.next.state3()));
        err_prob = err_prob.max((full.p_block - col.p_block).abs()).max((full.p_nl - col.p_nl).abs());
    }
    Ok(vec![
        check("full-register step = rk2", err_full <= 1e-8, format!("max relative error {err_full:.3e}")),
        check(
            "collapsed step = full step",
            err_modes <= 1e-9 && err_prob <= 1e-10,
            format!("state {err_modes:.3e}, probability {err_prob:.3e}"),
        ),
    ])
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn block_encoding() -> Result<CheckResult> {
    let p = LorenzParams::new(10.0, 28.0, 0.55)?;
    let (mut unit, mut recon): (f64, f64) = (0.0, 0.0);
    for dt in [2.5e-4, 5e-4, 1e-3] {
        let be = BlockEncoding::for_scheme(Scheme::Rk2, &p, dt)?;
        let u = &be.unitary;
        let id = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
        unit = unit.max(max_abs(&(u.adjoint() * u - id)));
        let src = be.source.map(|x| Complex64::new(x, 0.0));
        recon = recon.max(max_abs(&(be.block().scale(be.a) - src)));
    }
    Ok(check("block encoding", unit <= 1e-10 && recon <= 1e-10, format!("unitarity {unit:.3e}, reconstruction {recon:.3e}")))
}

fn shift_decomposition() -> Result<CheckResult> {
    let mut ok = true;
    for n in 1..=6 {
        let mut direct = Circuit::new(n);
        direct.push(shift_minus(n)?)?;
        ok &= max_abs(&(decompose_shift_to_mcx(n)?.to_matrix() - direct.to_matrix())) < 1e-15;
    }
    Ok(check("shift MCX decomposition", ok, "n = 1..6".into()))
}

fn resources() -> Result<CheckResult> {
    let mut ok = true;
    for nt in 1..=6 {
        let c = schedule(nt, 2 * nt - 1)?;
        let n = nt as u64;
        ok &= c.n_copies == 4 * n - 1 && c.n_s == 2 * n && c.n_u1 == (3u64.pow(nt as u32) - 1) / 2;
    }
    Ok(check("resource recursion", ok, "Nt = 1..6".into()))
}

fn volume() -> Result<CheckResult> {
    let p = LorenzParams::new(10.0, 28.0, 0.55)?;
    let r = log_volume_rate(State3::new(0.1, -1.1, 10.1), &p, 1e-5, 1.0, 1e-3)?;
    let d = divergence(&p);
    let e = ((r - d) / d).abs();
    Ok(check("volume contraction", e <= 0.01, format!("rate {r:.6} vs {d:.6}")))
}

/// Fast oracle cross-checks.
pub fn verify_suite() -> Result<Vec<CheckResult>> {
    let mut out = vec![augmented_vs_rk2()?];
    out.extend(quantum_single_step()?);
    out.push(block_encoding()?);
    out.push(shift_decomposition()?);
    out.push(resources()?);
    out.push(volume()?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for c in verify_suite().unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
