use crate::dynamics::{rk4_step, LorenzParams, State3};
use crate::error::{Error, Result};

fn tetra_volume(v: &[State3; 4]) -> f64 {
    let d = |a: State3| [a.x - v[0].x, a.y - v[0].y, a.z - v[0].z];
    let (a, b, c) = (d(v[1]), d(v[2]), d(v[3]));
    let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
    det.abs() / 6.0
}

/// Least-squares slope of ln V(t) for a right tetrahedron of edge `edge` at
/// `x0`, carried by RK4 over [0, t_end].
pub fn log_volume_rate(x0: State3, p: &LorenzParams, edge: f64, t_end: f64, dt: f64) -> Result<f64> {
    if !(edge > 0.0) || !(t_end > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter("edge, t_end and dt must be positive".into()));
    }
    let mut v = [
        x0,
        State3::new(x0.x + edge, x0.y, x0.z),
        State3::new(x0.x, x0.y + edge, x0.z),
        State3::new(x0.x, x0.y, x0.z + edge),
    ];
    let steps = (t_end / dt).round() as usize;
    let (mut st, mut sv, mut stt, mut stv) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..=steps {
        if k > 0 {
            for q in &mut v {
                *q = rk4_step(*q, p, dt)?;
            }
        }
        let t = k as f64 * dt;
        let l = tetra_volume(&v).ln();
        st += t;
        sv += l;
        stt += t * t;
        stv += t * l;
    }
    let n = (steps + 1) as f64;
    Ok((n * stv - st * sv) / (n * stt - st * st))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::divergence;

    #[test]
    fn unit_volume() {
        let v = [State3::default(), State3::new(1.0, 0.0, 0.0), State3::new(0.0, 1.0, 0.0), State3::new(0.0, 0.0, 1.0)];
        assert!((tetra_volume(&v) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rate_matches_divergence() {
        let p = LorenzParams::new(10.0, 28.0, 0.55).unwrap();
        let r = log_volume_rate(State3::new(0.1, -1.1, 10.1), &p, 1e-5, 1.0, 1e-3).unwrap();
        let d = divergence(&p);
        assert!(((r - d) / d).abs() < 0.01, "{r} vs {d}");
    }
}
