//! SVD-based block encoding: Â = V†ΣW split into two unitaries and dilated
//! with one ancilla.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dynamics::LorenzParams;
use crate::error::{Error, Result};
use crate::qsim::{Gate, QuantumState};
use crate::scaled::ScaledState;
use crate::scheme::Scheme;

#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// Left factor V† (columns are left singular vectors).
    pub v_dag: DMatrix<f64>,
    /// Right factor W (rows are right singular vectors).
    pub w: DMatrix<f64>,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
}

impl SvdFactors {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let s = DMatrix::from_diagonal(&DVector::from_column_slice(&self.singular_values));
        &self.v_dag * s * &self.w
    }
}

pub fn svd(m: &DMatrix<f64>) -> Result<SvdFactors> {
    if !m.is_square() {
        return Err(Error::InvalidParameter(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    let dec = nalgebra::linalg::SVD::try_new(m.clone(), true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidParameter("SVD did not converge".into()))?;
    let (u, vt) = (dec.u.expect("requested"), dec.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    Ok(SvdFactors {
        v_dag: DMatrix::from_fn(n, n, |i, k| u[(i, order[k])]),
        w: DMatrix::from_fn(n, n, |k, j| vt[(order[k], j)]),
        singular_values: order.iter().map(|&k| dec.singular_values[k].max(0.0)).collect(),
    })
}

/// Diagonals of Σ± = e^{±iθ} with θ = arccos(σ/σ_max), and σ_max.
pub fn split_unitaries(f: &SvdFactors) -> Result<(Vec<Complex64>, Vec<Complex64>, f64)> {
    let a = f.sigma_max();
    if !(a > 0.0) {
        return Err(Error::NothingToEncode);
    }
    let theta: Vec<f64> = f.singular_values.iter().map(|s| (s / a).clamp(0.0, 1.0).acos()).collect();
    Ok((
        theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
        theta.iter().map(|&t| Complex64::from_polar(1.0, -t)).collect(),
        a,
    ))
}

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    /// (H⊗V†)(|0⟩⟨0|⊗Σ₊ + |1⟩⟨1|⊗Σ₋)(H⊗W); the ancilla is the top qubit.
    pub unitary: DMatrix<Complex64>,
    /// Normalization, σ_max.
    pub a: f64,
    pub num_qubits: usize,
    pub source: DMatrix<f64>,
    /// Top-left block, Â/a.
    block: DMatrix<Complex64>,
}

pub fn assemble_block_encoding(source: &DMatrix<f64>, f: &SvdFactors) -> Result<BlockEncoding> {
    let (plus, minus, a) = split_unitaries(f)?;
    let d = source.nrows();
    if !d.is_power_of_two() || f.v_dag.nrows() != d {
        return Err(Error::WidthMismatch { expected: d, found: f.v_dag.nrows() });
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = [[r, r], [r, -r]];
    let vd = f.v_dag.map(|x| Complex64::new(x, 0.0));
    let w = f.w.map(|x| Complex64::new(x, 0.0));
    // block (p, q) = Σ_b H[p][b] H[b][q] V† Σ_b W
    let mut u = DMatrix::zeros(2 * d, 2 * d);
    for p in 0..2 {
        for q in 0..2 {
            let diag: Vec<Complex64> = (0..d).map(|k| plus[k] * h[p][0] * h[0][q] + minus[k] * h[p][1] * h[1][q]).collect();
            let mid = DMatrix::from_diagonal(&DVector::from_vec(diag));
            let blk = &vd * mid * &w;
            u.view_mut((p * d, q * d), (d, d)).copy_from(&blk);
        }
    }
    let block = u.view((0, 0), (d, d)).into_owned();
    Ok(BlockEncoding { unitary: u, a, num_qubits: d.trailing_zeros() as usize, source: source.clone(), block })
}

impl BlockEncoding {
    pub fn new(source: &DMatrix<f64>) -> Result<Self> {
        assemble_block_encoding(source, &svd(source)?)
    }

    pub fn for_scheme(scheme: Scheme, p: &LorenzParams, dt: f64) -> Result<Self> {
        Self::new(&scheme.time_advance(p, dt)?)
    }

    pub fn block(&self) -> &DMatrix<Complex64> {
        &self.block
    }

    /// U_A as a gate: data on `data` qubits, ancilla on `ancilla`.
    pub fn gate(&self, data: &[usize], ancilla: usize) -> Result<Gate> {
        if data.len() != self.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, found: data.len() });
        }
        let mut targets = data.to_vec();
        targets.push(ancilla);
        Gate::unitary(targets, self.unitary.clone())
    }

    /// Post-selected Â/a applied directly; returns the unnormalized image.
    pub fn apply_block(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let d = self.block.nrows();
        (0..d).map(|i| (0..d).map(|j| self.block[(i, j)] * amps[j]).sum()).collect()
    }
}

/// Runs U_A on |0⟩⊗ψ and post-selects the ancilla on zero.
pub fn apply_block_encoded(be: &BlockEncoding, s: &ScaledState) -> Result<(ScaledState, f64)> {
    let n = be.num_qubits;
    if s.state.num_qubits() != n {
        return Err(Error::WidthMismatch { expected: n, found: s.state.num_qubits() });
    }
    // roundoff in U_A would otherwise hide an exactly vanishing image
    let image: f64 = (0..be.source.nrows())
        .map(|i| {
            let row: Complex64 = (0..be.source.ncols()).map(|j| s.state.amplitudes()[j] * be.source[(i, j)]).sum();
            row.norm_sqr()
        })
        .sum();
    if image / (be.a * be.a) < crate::qsim::MIN_PROBABILITY {
        return Err(Error::ImpossibleOutcome { probability: image / (be.a * be.a) });
    }
    let mut full = QuantumState::zero(1).tensor(&s.state);
    crate::qsim::apply_gate(&mut full, &be.gate(&(0..n).collect::<Vec<_>>(), n)?)?;
    let p = full.project(&[n], 0)?;
    let out = full.reduced(&[n], 0)?;
    Ok((ScaledState::new(out, s.scale * be.a * p.sqrt())?, p))
}

/// σ_max of the scheme's time-advance matrix for each dt.
pub fn sigma_max_curve(p: &LorenzParams, scheme: Scheme, dts: &[f64]) -> Result<Vec<(f64, f64)>> {
    dts.iter().map(|&dt| Ok((dt, svd(&scheme.time_advance(p, dt)?)?.sigma_max()))).collect()
}

/// `points` values spaced evenly in [dt_min, dt_max].
pub fn dt_grid(dt_min: f64, dt_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(dt_min > 0.0) || dt_max < dt_min || points == 0 {
        return Err(Error::InvalidParameter(format!("bad dt grid [{dt_min}, {dt_max}] x {points}")));
    }
    if points == 1 {
        return Ok(vec![dt_min]);
    }
    Ok((0..points).map(|i| dt_min + (dt_max - dt_min) * i as f64 / (points - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> LorenzParams {
        LorenzParams::new(10.0, 28.0, 0.55).unwrap()
    }

    fn max_abs(m: DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn identity_and_zero() {
        let f = svd(&DMatrix::identity(4, 4)).unwrap();
        assert!(f.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-15));
        let z = svd(&DMatrix::zeros(4, 4)).unwrap();
        assert!(z.singular_values.iter().all(|&s| s == 0.0));
        assert_eq!(split_unitaries(&z).unwrap_err(), Error::NothingToEncode);
        let be = BlockEncoding::new(&DMatrix::identity(4, 4)).unwrap();
        assert!((be.a - 1.0).abs() < 1e-15);
        assert!(be.block().iter().enumerate().all(|(k, e)| {
            let want = if k % 5 == 0 { 1.0 } else { 0.0 };
            (e - Complex64::new(want, 0.0)).norm() < 1e-14
        }));
    }

    #[test]
    fn phases_at_extremes() {
        let f = SvdFactors { v_dag: DMatrix::identity(2, 2), w: DMatrix::identity(2, 2), singular_values: vec![1.0, 0.0] };
        let (p, m, _) = split_unitaries(&f).unwrap();
        assert!((p[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((p[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((m[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((p[1] + m[1]).norm() < 1e-15);
    }

    #[test]
    fn reconstruction_and_ordering() {
        for scheme in [Scheme::Euler, Scheme::Rk2, Scheme::Rk2Printed] {
            let a = scheme.time_advance(&params(), 1e-3).unwrap();
            let f = svd(&a).unwrap();
            assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
            assert!(max_abs(f.reconstruct() - &a) <= 1e-12);
            let (p, m, s) = split_unitaries(&f).unwrap();
            let half = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
                (0..a.nrows()).map(|k| f.v_dag[(i, k)] * ((p[k] + m[k]).re * s / 2.0) * f.w[(k, j)]).sum::<f64>()
            });
            assert!(max_abs(half - &a) <= 1e-12);
        }
    }

    #[test]
    fn encoding_contract() {
        for dt in [2.5e-4, 5e-4, 1e-3] {
            let be = BlockEncoding::for_scheme(Scheme::Rk2, &params(), dt).unwrap();
            assert!(crate::qsim::unitarity_deviation(&be.unitary) <= 1e-12);
            let back = be.block().map(|z| z.re * be.a);
            assert!(max_abs(back - &be.source) <= 1e-10);
        }
    }

    #[test]
    fn sigma_max_first_order_estimate() {
        // σ_max ≈ 1 + c·dt; the slope is fixed by the top 3×3 Jacobian block
        let curve = sigma_max_curve(&params(), Scheme::Rk2, &[2.5e-4, 5e-4, 1e-3]).unwrap();
        let slope = |(dt, s): (f64, f64)| (s - 1.0) / dt;
        let s = curve.iter().map(|&c| slope(c)).collect::<Vec<_>>();
        assert!(s.iter().all(|&x| (x - s[0]).abs() < 0.2));
        assert!(curve[2].1 > 1.0 && curve[2].1 < 1.02);
        let tiny = sigma_max_curve(&params(), Scheme::Rk2, &[1e-8]).unwrap()[0].1;
        assert!((tiny - 1.0).abs() < 1e-6);
    }

    #[test]
    fn probability_identity_random_states() {
        let be = BlockEncoding::for_scheme(Scheme::Rk2, &params(), 1e-3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let v: Vec<f64> = (0..16).map(|_| rng.random::<f64>() - 0.5).collect();
            let s = ScaledState::from_vector(&v).unwrap();
            let (out, p) = apply_block_encoded(&be, &s).unwrap();
            let unit: Vec<f64> = v.iter().map(|x| x / s.scale).collect();
            let av = &be.source * DVector::from_vec(unit);
            assert!((p - av.norm_squared() / (be.a * be.a)).abs() < 1e-12);
            let want = &be.source * DVector::from_vec(v.clone());
            for (g, w) in out.semantic().iter().zip(want.iter()) {
                assert!((g - w).abs() < 1e-12 * (1.0 + w.abs()));
            }
            // scale covariance
            let doubled = ScaledState::new(s.state.clone(), 2.0 * s.scale).unwrap();
            let (o2, _) = apply_block_encoded(&be, &doubled).unwrap();
            assert!((o2.scale - 2.0 * out.scale).abs() < 1e-12 * out.scale);
        }
    }

    #[test]
    fn kernel_vector_is_impossible() {
        let be = BlockEncoding::for_scheme(Scheme::Rk2, &params(), 1e-3).unwrap();
        let mut v = vec![0.0; 16];
        v[15] = 1.0;
        let s = ScaledState::from_vector(&v).unwrap();
        assert!(matches!(apply_block_encoded(&be, &s), Err(Error::ImpossibleOutcome { .. })));
    }

    #[test]
    fn identity_encoding_keeps_state() {
        let be = BlockEncoding::new(&DMatrix::identity(4, 4)).unwrap();
        let s = ScaledState::from_vector(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let (out, p) = apply_block_encoded(&be, &s).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        for (a, b) in out.semantic().iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn grid() {
        assert_eq!(dt_grid(1e-3, 2e-3, 3).unwrap(), vec![1e-3, 1.5e-3, 2e-3]);
        assert!(dt_grid(0.0, 1.0, 3).is_err());
    }
}
