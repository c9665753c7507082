use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use crate::dynamics::{lorenz_rhs, LorenzParams, State3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    /// Interpolated x; zero up to rounding.
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PoincareSection {
    pub crossings: Vec<Crossing>,
}

impl PoincareSection {
    pub fn z_values(&self) -> Vec<f64> {
        self.crossings.iter().map(|c| c.z).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }
}

/// Collects descending x = 0 crossings from a stream of samples.
#[derive(Debug, Clone)]
pub struct SectionBuilder {
    transient_time: f64,
    params: Option<LorenzParams>,
    prev: Option<(f64, State3)>,
    section: PoincareSection,
}

impl SectionBuilder {
    /// With `params`, crossings where the field does not point to −x are dropped.
    pub fn new(transient_time: f64, params: Option<LorenzParams>) -> Self {
        Self { transient_time, params, prev: None, section: PoincareSection::default() }
    }

    pub fn push(&mut self, t: f64, s: State3) {
        if let Some((t0, a)) = self.prev {
            if a.x > 0.0 && s.x <= 0.0 {
                let f = a.x / (a.x - s.x);
                let c = Crossing {
                    t: t0 + f * (t - t0),
                    x: a.x + f * (s.x - a.x),
                    y: a.y + f * (s.y - a.y),
                    z: a.z + f * (s.z - a.z),
                };
                let descending = self
                    .params
                    .is_none_or(|p| lorenz_rhs(State3::new(c.x, c.y, c.z), &p).x < 0.0);
                if c.t >= self.transient_time && descending {
                    self.section.crossings.push(c);
                }
            }
        }
        self.prev = Some((t, s));
    }

    pub fn finish(self) -> PoincareSection {
        self.section
    }
}

pub fn poincare_section(tr: &Trajectory, transient_time: f64) -> PoincareSection {
    let mut b = SectionBuilder::new(transient_time, Some(tr.params));
    for s in &tr.samples {
        b.push(s.t, s.state);
    }
    b.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodResult {
    /// Mean z of each cluster, ascending.
    pub clusters: Vec<f64>,
    pub chaotic: bool,
}

impl PeriodResult {
    pub fn count(&self) -> usize {
        self.clusters.len()
    }

    /// Cluster count when not chaotic.
    pub fn period(&self) -> Option<usize> {
        (!self.chaotic).then_some(self.clusters.len())
    }
}

pub const DEFAULT_CLUSTER_TOL: f64 = 0.05;
pub const DEFAULT_CHAOS_THRESHOLD: usize = 32;

/// Leader clustering of sorted z-values: a value more than `tol` above the
/// first member of the current cluster opens a new one.
pub fn cluster_values(values: &[f64], tol: f64) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut clusters: Vec<(f64, f64, usize)> = Vec::new();
    for z in v {
        match clusters.last_mut() {
            Some((start, sum, n)) if z - *start <= tol => {
                *sum += z;
                *n += 1;
            }
            _ => clusters.push((z, z, 1)),
        }
    }
    clusters.into_iter().map(|(_, s, n)| s / n as f64).collect()
}

pub fn detect_period_with(sec: &PoincareSection, tol: f64, chaos_threshold: usize) -> Result<PeriodResult> {
    if sec.is_empty() {
        return Err(Error::EmptySection);
    }
    let clusters = cluster_values(&sec.z_values(), tol);
    let chaotic = clusters.len() > chaos_threshold;
    Ok(PeriodResult { clusters, chaotic })
}

pub fn detect_period(sec: &PoincareSection, tol: f64) -> Result<PeriodResult> {
    detect_period_with(sec, tol, DEFAULT_CHAOS_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinusoid_crossings() {
        let mut b = SectionBuilder::new(0.0, None);
        let dt = 1e-3;
        for k in 0..=(20_000) {
            let t = k as f64 * dt;
            b.push(t, State3::new(t.sin(), 0.0, t.cos()));
        }
        let sec = b.finish();
        // sin descends through zero at t = π + 2πk
        assert_eq!(sec.len(), 3);
        for (k, c) in sec.crossings.iter().enumerate() {
            let want = std::f64::consts::PI * (2 * k + 1) as f64;
            assert!((c.t - want).abs() < 1e-6);
            assert!(c.x.abs() <= 1e-9);
            assert!((c.z + 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn no_crossings_is_empty() {
        let mut b = SectionBuilder::new(0.0, None);
        for k in 0..100 {
            b.push(k as f64, State3::new(1.0 + k as f64, 0.0, 0.0));
        }
        let sec = b.finish();
        assert!(sec.is_empty());
        assert_eq!(detect_period(&sec, 0.05), Err(Error::EmptySection));
    }

    #[test]
    fn transient_is_skipped() {
        let mut b = SectionBuilder::new(10.0, None);
        for k in 0..=20_000 {
            let t = k as f64 * 1e-3;
            b.push(t, State3::new(t.sin(), 0.0, 0.0));
        }
        assert_eq!(b.finish().len(), 1);
    }

    #[test]
    fn clustering() {
        let sec = PoincareSection {
            crossings: [30.0, 30.01, 35.0, 30.02, 35.03].iter().map(|&z| Crossing { t: 0.0, x: 0.0, y: -1.0, z }).collect(),
        };
        let r = detect_period(&sec, 0.05).unwrap();
        assert_eq!(r.period(), Some(2));
        let same = PoincareSection { crossings: vec![Crossing { t: 0.0, x: 0.0, y: -1.0, z: 3.0 }; 5] };
        assert_eq!(detect_period(&same, 0.05).unwrap().period(), Some(1));
        let spread: Vec<f64> = (0..40).map(|k| k as f64).collect();
        assert_eq!(cluster_values(&spread, 0.05).len(), 40);
        let chaos = PoincareSection { crossings: spread.iter().map(|&z| Crossing { t: 0.0, x: 0.0, y: -1.0, z }).collect() };
        assert!(detect_period(&chaos, 0.05).unwrap().chaotic);
    }
}
