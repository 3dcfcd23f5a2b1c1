//! Dormand–Prince 5(4) in chart coordinates. The chart is re-selected
//! (largest homogeneous coordinate) before every step, so coordinates stay
//! in the unit polydisk of the active chart.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::chart_field;
use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::geometry::{Point, ProjectivePoint};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub chart_switches: usize,
    /// Largest accepted local error estimate, in units of the tolerance.
    pub max_local_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub start: Point,
    pub samples: Vec<(f64, Point)>,
    pub stats: IntegratorStats,
    /// `max |H(x(t)) − H(x(0))|` over the samples (autonomous `H` only).
    pub energy_drift: Option<f64>,
}

impl Trajectory {
    pub fn end(&self) -> &Point {
        &self.samples.last().expect("trajectory has samples").1
    }

    /// CSV with columns `t, re z0, im z0, …` (disk coordinate last).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let width = self.start.ambient().len();
        let mut header = String::from("t");
        for k in 0..width / 2 {
            header.push_str(&format!(",re{k},im{k}"));
        }
        writeln!(out, "{header}")?;
        for (t, p) in &self.samples {
            let row: Vec<String> = p.ambient().iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(out, "{t:.17e},{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub tol: f64,
    pub max_step: f64,
    pub record: bool,
}

impl FlowOptions {
    pub fn new(tol: f64) -> Self {
        FlowOptions { tol, max_step: 0.05, record: true }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One trial step; returns the fifth-order solution and the scaled error.
fn dp_step(
    h: &dyn Hamiltonian,
    chart: usize,
    t: f64,
    y: &[f64],
    dt: f64,
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    let mut stage = vec![0.0; n];
    for s in 0..7 {
        for i in 0..n {
            stage[i] = y[i] + dt * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
        }
        k.push(chart_field(h, chart, &stage, t + C[s] * dt)?.0);
    }
    let y5: Vec<f64> = (0..n).map(|i| y[i] + dt * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>()).collect();
    let mut err = 0.0;
    for i in 0..n {
        let e = dt * (0..7).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>();
        let sc = tol * (1.0 + y[i].abs().max(y5[i].abs()));
        err += (e / sc) * (e / sc);
    }
    Ok((y5, (err / n as f64).sqrt()))
}

/// Integrates `φ^H` from `(x0, t0)` to `t1` (either direction).
pub fn flow_with(h: &dyn Hamiltonian, x0: &Point, t0: f64, t1: f64, opts: FlowOptions) -> Result<Trajectory> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let m = h.manifold();
    let span = t1 - t0;
    let dir = if span < 0.0 { -1.0 } else { 1.0 };
    let mut t = t0;
    let mut p = x0.clone();
    let mut chart = m.best_chart(&p);
    let mut stats = IntegratorStats::default();
    let mut samples = vec![(t0, p.clone())];
    let mut dt = dir * (0.01 * span.abs()).clamp(1e-6, opts.max_step);
    while dir * (t1 - t) > 1e-15 * (1.0 + t.abs()) {
        if dir * (t + dt - t1) > 0.0 {
            dt = t1 - t;
        }
        let best = m.best_chart(&p);
        if best != chart {
            chart = best;
            stats.chart_switches += 1;
        }
        let y = m.to_chart(&p, chart)?;
        let (y5, err) = dp_step(h, chart, t, &y, dt, opts.tol)?;
        if err <= 1.0 {
            t = if dir * (t + dt - t1) >= 0.0 { t1 } else { t + dt };
            p = m.from_chart(chart, &y5);
            stats.steps += 1;
            stats.max_local_error = stats.max_local_error.max(err);
            if opts.record {
                samples.push((t, p.clone()));
            }
            if t == t1 {
                break;
            }
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        dt = dir * (dt.abs() * factor).min(opts.max_step);
        if dt.abs() < 1e-13 * (1.0 + t.abs()) {
            return Err(Error::StepFailure { t });
        }
    }
    if !opts.record {
        samples.push((t, p));
    }
    let energy_drift = h.is_autonomous().then(|| {
        let e0 = h.value(x0, t0);
        samples.iter().map(|(s, q)| (h.value(q, *s) - e0).abs()).fold(0.0, f64::max)
    });
    Ok(Trajectory { start: x0.clone(), samples, stats, energy_drift })
}

/// Integrates `φ^H_t` for `t ∈ [0, t_end]`, recording every accepted step.
pub fn flow(h: &dyn Hamiltonian, x0: &Point, t_end: f64, tol: f64) -> Result<Trajectory> {
    if !(0.0..=4.0).contains(&t_end) {
        return Err(Error::InvalidArgument(format!("t_end must lie in [0, 4], got {t_end}")));
    }
    flow_with(h, x0, 0.0, t_end, FlowOptions::new(tol))
}

/// Endpoint of the flow from `(x0, t0)` to `t1`, without recording samples.
pub fn flow_to(h: &dyn Hamiltonian, x0: &Point, t0: f64, t1: f64, tol: f64) -> Result<Point> {
    let opts = FlowOptions { record: false, ..FlowOptions::new(tol) };
    Ok(flow_with(h, x0, t0, t1, opts)?.end().clone())
}

/// Exact rotations: `P` multiplies `z₀` by `e^{iπt}`, `Q` multiplies `z₁`.
pub fn closed_form_flow(name: &str, x0: &Point, t: f64) -> Result<Point> {
    let k = match name {
        "P" => 0,
        "Q" => 1,
        other => return Err(Error::InvalidArgument(format!("no closed-form flow for {other}"))),
    };
    let rotate = |q: &ProjectivePoint| -> Result<ProjectivePoint> {
        if k >= q.len() {
            return Err(Error::Unsupported(format!("{name} on a point of CP^{}", q.len() - 1)));
        }
        let mut z = q.coords().to_vec();
        z[k] *= Complex64::from_polar(1.0, PI * t);
        ProjectivePoint::new(z)
    };
    match x0 {
        Point::Projective(q) => Ok(Point::Projective(rotate(q)?)),
        Point::Product(q, z) => Ok(Point::Product(rotate(q)?, *z)),
        Point::Disk(_) => Err(Error::Unsupported("closed-form flow on a disk".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::MomentHamiltonian;
    use crate::geometry::ManifoldModel;
    use crate::numeric::rng;

    fn point(z: &[f64]) -> Point {
        Point::Projective(ProjectivePoint::real(z).unwrap())
    }

    #[test]
    fn p_half_turn() {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap();
        let x0 = point(&[1.0, 1.0, 0.0]);
        let traj = flow(&h, &x0, 1.0, 1e-9).unwrap();
        let expect = point(&[-1.0, 1.0, 0.0]);
        assert!(ManifoldModel::Cp2.distance(traj.end(), &expect) < 1e-6);
        assert!(traj.energy_drift.unwrap() < 1e-8);
    }

    #[test]
    fn q_quarter_turn() {
        let m = ManifoldModel::Cp2;
        let h = MomentHamiltonian::q(m.clone()).unwrap();
        let x0 = point(&[0.0, 1.0, 1.0]);
        let end = flow(&h, &x0, 0.5, 1e-9).unwrap();
        let expect = Point::Projective(
            ProjectivePoint::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)])
                .unwrap(),
        );
        assert!(m.distance(end.end(), &expect) < 1e-6);
    }

    #[test]
    fn fixed_point_is_constant() {
        let h = MomentHamiltonian::p(ManifoldModel::Cp2).unwrap();
        let x0 = point(&[0.0, 1.0, 0.0]);
        let traj = flow(&h, &x0, 1.0, 1e-9).unwrap();
        assert!(traj.samples.iter().all(|(_, p)| ManifoldModel::Cp2.distance(p, &x0) < 1e-14));
    }

    #[test]
    fn closed_form_period_two() {
        let mut r = rng(9);
        let m = ManifoldModel::Cp2;
        for _ in 0..20 {
            let x = m.sample(&mut r);
            assert!(m.distance(&closed_form_flow("P", &x, 2.0).unwrap(), &x) < 1e-14);
        }
        let fixed = point(&[1.0, 0.0, 0.0]);
        assert!(m.distance(&closed_form_flow("P", &fixed, 0.3).unwrap(), &fixed) < 1e-15);
    }

    #[test]
    fn backward_flow_inverts_forward() {
        let m = ManifoldModel::blowup(0.5).unwrap();
        let h = MomentHamiltonian::new(m.clone(), vec![0.3, 1.0, -0.4], "h").unwrap();
        let mut r = rng(10);
        let x = m.sample(&mut r);
        let y = flow_to(&h, &x, 0.0, 0.7, 1e-10).unwrap();
        let back = flow_to(&h, &y, 0.7, 0.0, 1e-10).unwrap();
        assert!(m.distance(&back, &x) < 1e-8);
    }
}
