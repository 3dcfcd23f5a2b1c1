use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::hamiltonian_vector_field;
use super::flow::{flow_to, flow_with, FlowOptions};
use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::numeric::{golden_min, substream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitConfig {
    pub field_tol: f64,
    pub return_tol: f64,
    pub energy_tol: f64,
    pub tol: f64,
    pub max_step: f64,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { field_tol: 1e-8, return_tol: 1e-6, energy_tol: 1e-8, tol: 1e-10, max_step: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Fixed,
    Periodic { period: f64 },
    NonReturning,
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryClassification {
    pub index: usize,
    pub start: Point,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub field_norm: f64,
    /// Smallest refined return distance among candidate returns.
    pub return_distance: Option<f64>,
    pub period_estimate: Option<f64>,
    pub orbit_diameter: f64,
    pub energy_drift: Option<f64>,
}

impl TrajectoryClassification {
    pub fn is_periodic(&self) -> bool {
        matches!(self.verdict, Verdict::Periodic { .. })
    }
}

/// Integrates slightly past `t_max` so that a return exactly at `t_max`
/// is an interior minimum of the return distance.
const OVERSHOOT: f64 = 0.02;
/// Refined periods up to `t_max + PERIOD_SLACK` count as `≤ t_max`.
const PERIOD_SLACK: f64 = 1e-6;

pub fn classify_start(h: &dyn Hamiltonian, x0: &Point, t_max: f64, cfg: &OrbitConfig) -> TrajectoryClassification {
    classify_indexed(h, 0, x0.clone(), t_max, cfg)
}

fn classify_indexed(h: &dyn Hamiltonian, index: usize, x0: Point, t_max: f64, cfg: &OrbitConfig) -> TrajectoryClassification {
    let mut out = TrajectoryClassification {
        index,
        start: x0.clone(),
        verdict: Verdict::NonReturning,
        field_norm: 0.0,
        return_distance: None,
        period_estimate: None,
        orbit_diameter: 0.0,
        energy_drift: None,
    };
    match search_returns(h, &x0, t_max, cfg, &mut out) {
        Ok(v) => out.verdict = v,
        Err(e) => out.verdict = Verdict::Inconclusive { reason: e.to_string() },
    }
    out
}

fn search_returns(
    h: &dyn Hamiltonian,
    x0: &Point,
    t_max: f64,
    cfg: &OrbitConfig,
    out: &mut TrajectoryClassification,
) -> Result<Verdict> {
    let m = h.manifold();
    out.field_norm = hamiltonian_vector_field(h, x0, 0.0)?.norm();
    if out.field_norm < cfg.field_tol {
        return Ok(Verdict::Fixed);
    }
    let t_end = t_max * (1.0 + OVERSHOOT);
    let opts = FlowOptions { tol: cfg.tol, max_step: cfg.max_step, record: true };
    let traj = flow_with(h, x0, 0.0, t_end, opts)?;
    out.energy_drift = traj.energy_drift;
    let d: Vec<f64> = traj.samples.iter().map(|(_, p)| m.distance(p, x0)).collect();
    let diam = d.iter().copied().fold(0.0, f64::max);
    out.orbit_diameter = diam;
    let mut departed = false;
    for k in 1..d.len() - 1 {
        departed |= d[k] >= 0.5 * diam;
        if !departed || d[k] > d[k - 1] || d[k] > d[k + 1] {
            continue;
        }
        let (ta, pa) = &traj.samples[k - 1];
        let tb = traj.samples[k + 1].0;
        let mut fail = None;
        let (period, dist) = golden_min(
            |t| match flow_to(h, pa, *ta, t, cfg.tol) {
                Ok(p) => m.distance(&p, x0),
                Err(e) => {
                    fail = Some(e);
                    f64::INFINITY
                }
            },
            *ta,
            tb,
            1e-11,
        );
        if let Some(e) = fail {
            return Err(e);
        }
        if out.return_distance.map_or(true, |r| dist < r) {
            out.return_distance = Some(dist);
            out.period_estimate = Some(period);
        }
        if dist < cfg.return_tol && dist <= 1e-3 * diam && period > 0.0 && period <= t_max + PERIOD_SLACK {
            out.return_distance = Some(dist);
            out.period_estimate = Some(period);
            return Ok(Verdict::Periodic { period });
        }
    }
    Ok(Verdict::NonReturning)
}

/// Classifies `n_starts` Liouville-uniform starts; start `i` is drawn from
/// substream `i` of `seed`, so results do not depend on thread count.
pub fn detect_closed_trajectories(
    h: &dyn Hamiltonian,
    t_max: f64,
    n_starts: usize,
    seed: u64,
) -> Result<Vec<TrajectoryClassification>> {
    let starts: Vec<Point> = (0..n_starts).map(|i| h.manifold().sample(&mut substream(seed, i as u64))).collect();
    classify_starts(h, &starts, t_max, &OrbitConfig::default())
}

pub fn classify_starts(
    h: &dyn Hamiltonian,
    starts: &[Point],
    t_max: f64,
    cfg: &OrbitConfig,
) -> Result<Vec<TrajectoryClassification>> {
    if !h.is_autonomous() {
        return Err(Error::Unsupported("closed-orbit detection for time-dependent H".into()));
    }
    if !(t_max > 0.0 && t_max <= 4.0) {
        return Err(Error::InvalidArgument(format!("T_max must lie in (0, 4], got {t_max}")));
    }
    let mut out: Vec<TrajectoryClassification> = starts
        .par_iter()
        .enumerate()
        .map(|(i, x)| classify_indexed(h, i, x.clone(), t_max, cfg))
        .collect();
    out.sort_by_key(|c| c.index);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MomentHamiltonian;
    use crate::geometry::{ManifoldModel, ProjectivePoint};

    fn point(z: &[f64]) -> Point {
        Point::Projective(ProjectivePoint::real(z).unwrap())
    }

    #[test]
    fn p_has_no_short_orbits_and_known_fixed_points() {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap();
        let out = detect_closed_trajectories(&h, 1.0, 40, 1).unwrap();
        assert!(out.iter().all(|c| c.verdict == Verdict::NonReturning), "{out:?}");
        let cfg = OrbitConfig::default();
        for z in [[1.0, 0.0, 0.0], [0.0, 0.3, 0.7], [0.0, 1.0, 0.0]] {
            assert_eq!(classify_start(&h, &point(&z), 1.0, &cfg).verdict, Verdict::Fixed);
        }
    }

    #[test]
    fn doubled_p_returns_at_one() {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap().scaled(2.0);
        let out = detect_closed_trajectories(&h, 1.1, 10, 2).unwrap();
        for c in out {
            match c.verdict {
                Verdict::Periodic { period } => assert!((period - 1.0).abs() < 1e-4, "{period}"),
                v => panic!("{v:?}"),
            }
        }
    }

    #[test]
    fn zero_is_all_fixed() {
        let h = MomentHamiltonian::new(ManifoldModel::Cp2, vec![0.0; 3], "0").unwrap();
        let out = detect_closed_trajectories(&h, 1.0, 10, 3).unwrap();
        assert!(out.iter().all(|c| c.verdict == Verdict::Fixed));
        assert!(out.windows(2).all(|w| w[0].index < w[1].index));
    }
}
