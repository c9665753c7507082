use serde::{Deserialize, Serialize};

use super::poincare::{cluster_values, poincare_section, DEFAULT_CLUSTER_TOL};
use super::trajectory::{Sample, Trajectory};
use crate::dynamics::{rk4_step, LorenzParams, State3};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BoundingBox {
    pub fn of<'a>(points: impl IntoIterator<Item = &'a State3>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?.to_array();
        let mut b = Self { min: first, max: first };
        for p in it {
            for (i, v) in p.to_array().into_iter().enumerate() {
                b.min[i] = b.min[i].min(v);
                b.max[i] = b.max[i].max(v);
            }
        }
        Some(b)
    }

    /// Interval intersection over union per axis.
    pub fn overlap(&self, other: &Self) -> [f64; 3] {
        std::array::from_fn(|i| {
            let inter = (self.max[i].min(other.max[i]) - self.min[i].max(other.min[i])).max(0.0);
            let union = self.max[i].max(other.max[i]) - self.min[i].min(other.min[i]);
            if union == 0.0 {
                1.0
            } else {
                inter / union
            }
        })
    }

    pub fn contains(&self, p: State3) -> bool {
        p.to_array().iter().enumerate().all(|(i, &v)| v >= self.min[i] && v <= self.max[i])
    }

    pub fn diagonal(&self) -> f64 {
        (0..3).map(|i| (self.max[i] - self.min[i]).powi(2)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lobe {
    pub centroid: State3,
    pub bbox: BoundingBox,
    pub samples: usize,
}

/// Post-transient samples split by the sign of x (x > 0 first).
pub fn lobes(tr: &Trajectory, transient_time: f64) -> [Option<Lobe>; 2] {
    let pts: Vec<State3> = tr.samples.iter().filter(|s| s.t >= transient_time).map(|s| s.state).collect();
    let lobe = |pos: bool| {
        let sel: Vec<State3> = pts.iter().copied().filter(|p| (p.x > 0.0) == pos).collect();
        let bbox = BoundingBox::of(&sel)?;
        let n = sel.len() as f64;
        let sum = sel.iter().fold([0.0; 3], |a, p| [a[0] + p.x, a[1] + p.y, a[2] + p.z]);
        Some(Lobe { centroid: State3::new(sum[0] / n, sum[1] / n, sum[2] / n), bbox, samples: sel.len() })
    };
    [lobe(true), lobe(false)]
}

/// Each fixed point C± lies in its lobe's box and within `frac` of the box
/// diagonal from the lobe centroid.
pub fn lobes_anchor(tr: &Trajectory, transient_time: f64, frac: f64) -> bool {
    let Some(fps) = tr.params.fixed_points() else { return false };
    lobes(tr, transient_time).iter().zip(fps).all(|(l, c)| match l {
        Some(l) => {
            let d = State3::new(l.centroid.x - c.x, l.centroid.y - c.y, l.centroid.z - c.z).norm();
            l.bbox.contains(c) && d <= frac * l.bbox.diagonal()
        }
        None => false,
    })
}

/// Largest Lyapunov exponent from two nearby RK4 trajectories, renormalized
/// every unit of time.
pub fn lyapunov_estimate(x0: State3, p: &LorenzParams, dt: f64, t_total: f64) -> Result<f64> {
    let d0 = 1e-8;
    let mut a = x0;
    let mut b = State3::new(x0.x + d0, x0.y, x0.z);
    let per = (1.0 / dt).round().max(1.0) as usize;
    let blocks = (t_total / (per as f64 * dt)).floor().max(1.0) as usize;
    let mut sum = 0.0;
    for _ in 0..blocks {
        for _ in 0..per {
            a = rk4_step(a, p, dt)?;
            b = rk4_step(b, p, dt)?;
        }
        let diff = State3::new(b.x - a.x, b.y - a.y, b.z - a.z);
        let d = diff.norm().max(f64::MIN_POSITIVE);
        sum += (d / d0).ln();
        let k = d0 / d;
        b = State3::new(a.x + k * diff.x, a.y + k * diff.y, a.z + k * diff.z);
    }
    Ok(sum / (blocks as f64 * per as f64 * dt))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub samples: usize,
    /// (t, ‖engine − oracle‖) for samples with t ≤ horizon.
    pub pointwise: Vec<(f64, f64)>,
    pub max_pointwise_error: Option<f64>,
    pub lyapunov_estimate: Option<f64>,
    /// max over the horizon of error · exp(−λ t).
    pub growth_normalized_error: Option<f64>,
    pub engine_box: Option<BoundingBox>,
    pub oracle_box: Option<BoundingBox>,
    pub box_overlap: Option<[f64; 3]>,
    pub engine_clusters: Option<usize>,
    pub oracle_clusters: Option<usize>,
    /// Cluster means agree one to one within the cluster tolerance.
    pub clusters_match: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub horizon_time: f64,
    pub transient_fraction: f64,
    pub cluster_tol: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self { horizon_time: 10.0, transient_fraction: 0.5, cluster_tol: DEFAULT_CLUSTER_TOL }
    }
}

/// Replays the trajectory with RK4 at the same step and compares pointwise
/// up to the horizon and structurally after the transient.
pub fn compare_to_oracle(tr: &Trajectory, opts: &CompareOptions) -> Result<ComparisonReport> {
    let Some(first) = tr.samples.first() else { return Ok(ComparisonReport::default()) };
    let p = tr.params;
    let mut oracle_samples = Vec::with_capacity(tr.samples.len());
    let mut s = first.state;
    let mut step = first.step;
    for smp in &tr.samples {
        while step < smp.step {
            s = rk4_step(s, &p, tr.dt)?;
            step += 1;
        }
        oracle_samples.push(Sample { step, t: smp.t, state: s, p_block: None, p_nl: None });
    }
    let oracle = Trajectory { params: p, dt: tr.dt, engine: super::Engine::Rk4, samples: oracle_samples };

    let pointwise: Vec<(f64, f64)> = tr
        .samples
        .iter()
        .zip(&oracle.samples)
        .filter(|(a, _)| a.t <= opts.horizon_time)
        .map(|(a, b)| (a.t, State3::new(a.state.x - b.state.x, a.state.y - b.state.y, a.state.z - b.state.z).norm()))
        .collect();
    let max_pointwise_error = pointwise.iter().map(|e| e.1).reduce(f64::max);
    let span = tr.samples.last().map_or(0.0, |s| s.t).min(opts.horizon_time.max(1.0));
    let lyapunov = if span > 0.0 { Some(lyapunov_estimate(first.state, &p, tr.dt, span.max(1.0))?) } else { None };
    let growth_normalized_error =
        lyapunov.and_then(|l| pointwise.iter().map(|&(t, e)| e * (-l.max(0.0) * t).exp()).reduce(f64::max));

    let t_end = tr.samples.last().map_or(0.0, |s| s.t);
    let transient = opts.transient_fraction * t_end;
    let after = |t: &Trajectory| t.samples.iter().filter(|s| s.t >= transient).map(|s| s.state).collect::<Vec<_>>();
    let (ea, oa) = (after(tr), after(&oracle));
    let engine_box = BoundingBox::of(&ea);
    let oracle_box = BoundingBox::of(&oa);
    let box_overlap = engine_box.zip(oracle_box).map(|(a, b)| a.overlap(&b));

    let ec = cluster_values(&poincare_section(tr, transient).z_values(), opts.cluster_tol);
    let oc = cluster_values(&poincare_section(&oracle, transient).z_values(), opts.cluster_tol);
    let clusters_match = (!ec.is_empty() || !oc.is_empty())
        .then(|| ec.len() == oc.len() && ec.iter().zip(&oc).all(|(a, b)| (a - b).abs() <= opts.cluster_tol));

    Ok(ComparisonReport {
        samples: tr.samples.len(),
        pointwise,
        max_pointwise_error,
        lyapunov_estimate: lyapunov,
        growth_normalized_error,
        engine_box,
        oracle_box,
        box_overlap,
        engine_clusters: (!ec.is_empty()).then_some(ec.len()),
        oracle_clusters: (!oc.is_empty()).then_some(oc.len()),
        clusters_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{run_trajectory, Engine};
    use crate::scheme::Scheme;

    #[test]
    fn empty_trajectory_gives_empty_report() {
        let tr = Trajectory { params: LorenzParams::classic(), dt: 1e-3, engine: Engine::Classical, samples: vec![] };
        assert_eq!(compare_to_oracle(&tr, &CompareOptions::default()).unwrap(), ComparisonReport::default());
    }

    #[test]
    fn box_overlap() {
        let a = BoundingBox { min: [0.0; 3], max: [1.0; 3] };
        let b = BoundingBox { min: [0.5, 0.0, 2.0], max: [1.5, 1.0, 3.0] };
        assert_eq!(a.overlap(&b), [1.0 / 3.0, 1.0, 0.0]);
        assert!(a.contains(State3::new(0.5, 0.5, 0.5)));
        assert!((a.diagonal() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn classical_lyapunov_is_positive() {
        let l = lyapunov_estimate(State3::new(1.0, 1.0, 1.0), &LorenzParams::classic(), 1e-2, 100.0).unwrap();
        assert!(l > 0.6 && l < 1.2, "{l}");
    }

    #[test]
    fn rk2_short_horizon_error_is_second_order() {
        let p = LorenzParams::new(10.0, 28.0, 0.55).unwrap();
        let err = |dt: f64| {
            let steps = (2.0 / dt).round() as usize;
            let tr = run_trajectory(Engine::Classical, Scheme::Rk2, p, dt, steps, State3::new(0.1, -1.1, 1.1), 10).unwrap();
            let r = compare_to_oracle(&tr, &CompareOptions { horizon_time: 2.0, ..Default::default() }).unwrap();
            assert!(r.box_overlap.unwrap().iter().all(|&o| o > 0.9));
            r.max_pointwise_error.unwrap()
        };
        let ratio = err(1e-3) / err(5e-4);
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }
}
